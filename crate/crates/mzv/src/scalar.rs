//! Scalars in two regimes, and the q-arithmetic kernels built on them.
//!
//! Every numeric quantity in this crate is either an exact rational
//! ([`Scalar::Exact`], arbitrary-precision GMP rationals) or a
//! floating-point value ([`Scalar::Float`], MPFR floats whose precision
//! travels with the value). The two regimes never mix silently: arithmetic
//! across regimes is an error, and conversions happen only through
//! [`Scalar::to_float`] at a caller-stated precision.
//!
//! The kernels are the q-integer `[m] = 1 + q + ... + q^(m-1)`, the shifted
//! factorial `fac(m; x) = prod_{h=1}^{m} ([h] - q^h x)`, and the connector
//! `conn(m, n) = q^(m n) fac(m) fac(n) / fac(m + n)`. The q-integer is
//! computed by summation rather than as `(1 - q^m)/(1 - q)`, so `q = 1`
//! needs no special case anywhere.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::{CompleteRound, Pow};
use rug::{Complete, Float, Integer, Rational};

use crate::error::{Error, Result};

/// Default precision, in bits, for floating-point evaluation.
pub const DEFAULT_PRECISION: u32 = 128;

/// Which kind of arithmetic a scalar or an evaluation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Arbitrary-precision rationals; results are exact.
    Exact,
    /// MPFR floating point at a fixed precision in bits.
    Float,
}

/// An exact rational or a floating-point number.
///
/// Equality and ordering are defined within one regime only: comparing an
/// exact scalar with a float yields `false`/`None` rather than coercing.
#[derive(Clone)]
pub enum Scalar {
    Exact(Rational),
    Float(Float),
}

impl Scalar {
    pub fn regime(&self) -> Regime {
        match self {
            Scalar::Exact(_) => Regime::Exact,
            Scalar::Float(_) => Regime::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// The precision in bits of a float; `None` for exact scalars.
    pub fn precision(&self) -> Option<u32> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Float(f) => Some(f.prec()),
        }
    }

    /// Exact integer scalar.
    pub fn integer(v: i64) -> Scalar {
        Scalar::Exact(Rational::from(v))
    }

    /// Exact ratio `num/den`.
    pub fn ratio(num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::Exact(Rational::from((num, den))))
    }

    /// Floating-point scalar of the given precision.
    pub fn float_from_f64(v: f64, prec: u32) -> Result<Scalar> {
        check_precision(prec)?;
        Ok(Scalar::Float(Float::with_val(prec, v)))
    }

    /// Converts to the float regime at the given precision. Floats are
    /// re-rounded; exact rationals are rounded once.
    pub fn to_float(&self, prec: u32) -> Result<Scalar> {
        check_precision(prec)?;
        let f = match self {
            Scalar::Exact(r) => Float::with_val(prec, r),
            Scalar::Float(f) => Float::with_val(prec, f),
        };
        Ok(Scalar::Float(f))
    }

    /// Parses `"p/q"`, an integer, or a decimal (optionally with exponent)
    /// into the requested regime. Decimals parse exactly in the exact
    /// regime: `"0.25"` becomes `1/4`.
    pub fn parse(s: &str, regime: Regime, prec: u32) -> Result<Scalar> {
        let s = s.trim();
        match regime {
            Regime::Exact => parse_exact(s).map(Scalar::Exact),
            Regime::Float => {
                check_precision(prec)?;
                // Ratios go through exact parsing so "1/3" rounds once.
                if s.contains('/') {
                    return Ok(Scalar::Float(Float::with_val(prec, parse_exact(s)?)));
                }
                let parsed =
                    Float::parse(s).map_err(|_| Error::ParseScalar(s.to_string()))?;
                let f = parsed.complete(prec);
                if !f.is_finite() {
                    return Err(Error::ParseScalar(s.to_string()));
                }
                Ok(Scalar::Float(f))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.cmp0() == Ordering::Equal,
            Scalar::Float(f) => f.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.cmp0() == Ordering::Less,
            Scalar::Float(f) => f.is_sign_negative() && !f.is_zero(),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.clone().abs()),
            Scalar::Float(f) => Scalar::Float(f.clone().abs()),
        }
    }

    pub fn try_add(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact((a + b).complete())),
            (Scalar::Float(a), Scalar::Float(b)) => {
                Ok(Scalar::Float((a + b).complete(a.prec().max(b.prec()))))
            }
            _ => Err(Error::RegimeMismatch),
        }
    }

    pub fn try_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact((a - b).complete())),
            (Scalar::Float(a), Scalar::Float(b)) => {
                Ok(Scalar::Float((a - b).complete(a.prec().max(b.prec()))))
            }
            _ => Err(Error::RegimeMismatch),
        }
    }

    pub fn try_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact((a * b).complete())),
            (Scalar::Float(a), Scalar::Float(b)) => {
                Ok(Scalar::Float((a * b).complete(a.prec().max(b.prec()))))
            }
            _ => Err(Error::RegimeMismatch),
        }
    }

    pub fn try_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact((a / b).complete())),
            (Scalar::Float(a), Scalar::Float(b)) => {
                Ok(Scalar::Float((a / b).complete(a.prec().max(b.prec()))))
            }
            _ => Err(Error::RegimeMismatch),
        }
    }

    /// Compares against a small integer; `None` only for NaN floats.
    fn cmp_i32(&self, v: i32) -> Option<Ordering> {
        match self {
            Scalar::Exact(r) => r.partial_cmp(&v),
            Scalar::Float(f) => f.partial_cmp(&v),
        }
    }

    /// Decimal rendering: rationals as `p/q` (or a bare integer), floats
    /// with enough digits to round-trip at their own precision.
    pub fn to_decimal_string(&self) -> String {
        match self {
            Scalar::Exact(r) => r.to_string(),
            Scalar::Float(f) => {
                let digits = float_digits(f.prec());
                f.to_string_radix(10, Some(digits))
            }
        }
    }

    /// Short scientific rendering for reports; exact zeros print as `0`.
    pub fn to_display_string(&self) -> String {
        match self {
            Scalar::Exact(r) => r.to_string(),
            Scalar::Float(f) => {
                if f.is_zero() {
                    "0".to_string()
                } else {
                    let short = Float::with_val(f.prec().min(40), f);
                    short.to_string_radix(10, Some(6))
                }
            }
        }
    }
}

/// Decimal digits sufficient for binary-to-decimal-to-binary round trips.
fn float_digits(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
}

fn check_precision(prec: u32) -> Result<()> {
    if prec < 2 {
        return Err(Error::PrecisionTooLow(prec));
    }
    Ok(())
}

fn parse_exact(s: &str) -> Result<Rational> {
    let err = || Error::ParseScalar(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let n: Integer = num.trim().parse().map_err(|_| err())?;
        let d: Integer = den.trim().parse().map_err(|_| err())?;
        if d.cmp0() == Ordering::Equal {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::from((n, d)));
    }
    // Decimal form: mantissa digits with optional point and exponent.
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e.parse().map_err(|_| err())?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    if frac_part.contains(['+', '-']) {
        return Err(err());
    }
    let joined = format!("{int_part}{frac_part}");
    if joined.is_empty() || joined == "+" || joined == "-" {
        return Err(err());
    }
    let mantissa: Integer = joined.parse().map_err(|_| err())?;
    let scale = exp - frac_part.len() as i64;
    let mut r = Rational::from(mantissa);
    let ten_pow = Integer::from(10).pow(scale.unsigned_abs() as u32);
    if scale >= 0 {
        r *= &ten_pow;
    } else {
        r /= &ten_pow;
    }
    Ok(r)
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "Exact({r})"),
            Scalar::Float(x) => write!(f, "Float({})", self_display(x)),
        }
    }
}

fn self_display(f: &Float) -> String {
    f.to_string_radix(10, Some(12))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => false,
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a.partial_cmp(b),
            _ => None,
        }
    }
}

/// Series parameters: the base `q` and the connector deformation `x`.
///
/// Requires `0 < q <= 1` and `-1 < x < 1`, both in the same regime. In the
/// float regime `x` is re-rounded to `q`'s precision so a parameter set
/// carries one precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    q: Scalar,
    x: Scalar,
}

impl Params {
    pub fn new(q: Scalar, x: Scalar) -> Result<Params> {
        if q.regime() != x.regime() {
            return Err(Error::RegimeMismatch);
        }
        check_q_range(&q)?;
        if !(x.cmp_i32(-1) == Some(Ordering::Greater)
            && x.cmp_i32(1) == Some(Ordering::Less))
        {
            return Err(Error::ParamOutOfRange {
                name: "x",
                value: x.to_decimal_string(),
            });
        }
        let x = match (&q, &x) {
            (Scalar::Float(qf), Scalar::Float(_)) => x.to_float(qf.prec())?,
            _ => x,
        };
        Ok(Params { q, x })
    }

    /// Exact parameters from integer ratios, for tests and sweeps.
    pub fn from_ratios(q: (i64, i64), x: (i64, i64)) -> Result<Params> {
        Params::new(Scalar::ratio(q.0, q.1)?, Scalar::ratio(x.0, x.1)?)
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn x(&self) -> &Scalar {
        &self.x
    }

    pub fn regime(&self) -> Regime {
        self.q.regime()
    }

    /// Converts both parameters to the float regime at `prec`.
    ///
    /// Re-validates the ranges: rounding can push a value onto a forbidden
    /// boundary (an `x` just below 1 rounding up to 1), and that must
    /// surface as an error rather than a division by zero later.
    pub fn to_float(&self, prec: u32) -> Result<Params> {
        Params::new(self.q.to_float(prec)?, self.x.to_float(prec)?)
    }
}

/// `0 < q <= 1`, shared by parameter validation and series entry points.
pub(crate) fn check_q_range(q: &Scalar) -> Result<()> {
    if q.cmp_i32(0) == Some(Ordering::Greater) && q.cmp_i32(1) != Some(Ordering::Greater) {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name: "q",
            value: q.to_decimal_string(),
        })
    }
}

/// The q-integer `[m] = 1 + q + ... + q^(m-1)`, defined for `m >= 1`.
pub fn q_integer(m: u32, q: &Scalar) -> Result<Scalar> {
    if m == 0 {
        return Err(Error::QIntegerAtZero);
    }
    Ok(match q {
        Scalar::Exact(q) => Scalar::Exact(kernel::q_integer(m, q)),
        Scalar::Float(q) => Scalar::Float(kernel::q_integer(m, q)),
    })
}

/// The shifted factorial `fac(m; x) = prod_{h=1}^{m} ([h] - q^h x)`.
///
/// The empty product gives `fac(0) = 1`; at `q = 1, x = 0` this is `m!`.
/// Every factor is positive on the valid parameter range.
pub fn qx_factorial(m: u32, params: &Params) -> Scalar {
    match (params.q(), params.x()) {
        (Scalar::Exact(q), Scalar::Exact(x)) => Scalar::Exact(kernel::qx_factorial(m, q, x)),
        (Scalar::Float(q), Scalar::Float(x)) => Scalar::Float(kernel::qx_factorial(m, q, x)),
        _ => unreachable!("Params enforces a single regime"),
    }
}

/// The connector `conn(m, n) = q^(m n) fac(m) fac(n) / fac(m + n)`.
///
/// Symmetric in `m` and `n`, equal to 1 when either argument is 0, and
/// satisfying the row recurrence
/// `conn(m+1, n) = conn(m, n) * q^n * ([m+1] - q^(m+1) x) / ([m+n+1] - q^(m+n+1) x)`.
pub fn connector(m: u32, n: u32, params: &Params) -> Scalar {
    match (params.q(), params.x()) {
        (Scalar::Exact(q), Scalar::Exact(x)) => Scalar::Exact(kernel::connector(m, n, q, x)),
        (Scalar::Float(q), Scalar::Float(x)) => Scalar::Float(kernel::connector(m, n, q, x)),
        _ => unreachable!("Params enforces a single regime"),
    }
}

/// Arithmetic interface the generic series engines run on. Implemented by
/// exact rationals and MPFR floats; "like" constructors propagate the
/// float precision of their prototype.
pub(crate) trait Numeric:
    Clone
    + PartialOrd
    + for<'a> std::ops::AddAssign<&'a Self>
    + for<'a> std::ops::SubAssign<&'a Self>
    + for<'a> std::ops::MulAssign<&'a Self>
    + for<'a> std::ops::DivAssign<&'a Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_u32_like(&self, v: u32) -> Self;
    fn into_scalar(self) -> Scalar;

    /// Binary powering; `e = 0` gives 1.
    fn pow_u32(&self, mut e: u32) -> Self {
        let mut acc = self.one_like();
        let mut base = self.clone();
        loop {
            if e & 1 == 1 {
                acc *= &base;
            }
            e >>= 1;
            if e == 0 {
                return acc;
            }
            let b = base.clone();
            base *= &b;
        }
    }
}

impl Numeric for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn from_u32_like(&self, v: u32) -> Self {
        Rational::from(v)
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Exact(self)
    }
}

impl Numeric for Float {
    fn zero_like(&self) -> Self {
        Float::new(self.prec())
    }
    fn one_like(&self) -> Self {
        Float::with_val(self.prec(), 1)
    }
    fn from_u32_like(&self, v: u32) -> Self {
        Float::with_val(self.prec(), v)
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Float(self)
    }
}

pub(crate) mod kernel {
    //! Generic q-arithmetic primitives shared by the public wrappers and
    //! the series engines.

    use super::Numeric;

    /// `[m] = 1 + q + ... + q^(m-1)` by direct summation.
    pub fn q_integer<T: Numeric>(m: u32, q: &T) -> T {
        let mut acc = q.zero_like();
        let mut qp = q.one_like();
        for _ in 0..m {
            acc += &qp;
            qp *= q;
        }
        acc
    }

    /// Power and q-integer tables: `qpow[j] = q^j` and `qint[j] = [j]` for
    /// `j = 0..=m_max`, built incrementally so `[j+1] = [j] + q^j`.
    pub fn tables<T: Numeric>(m_max: usize, q: &T) -> (Vec<T>, Vec<T>) {
        let mut qpow = Vec::with_capacity(m_max + 1);
        let mut qint = Vec::with_capacity(m_max + 1);
        qpow.push(q.one_like());
        qint.push(q.zero_like());
        for j in 0..m_max {
            let mut next_int = qint[j].clone();
            next_int += &qpow[j];
            qint.push(next_int);
            let mut next_pow = qpow[j].clone();
            next_pow *= q;
            qpow.push(next_pow);
        }
        (qpow, qint)
    }

    /// `g[j] = [j] - q^j x` for `j = 0..=m_max`; `g[0] = -x`.
    pub fn shifted_table<T: Numeric>(qpow: &[T], qint: &[T], x: &T) -> Vec<T> {
        qpow.iter()
            .zip(qint)
            .map(|(p, i)| {
                let mut t = p.clone();
                t *= x;
                let mut g = i.clone();
                g -= &t;
                g
            })
            .collect()
    }

    /// `fac(m; x) = prod_{h=1}^{m} ([h] - q^h x)`.
    pub fn qx_factorial<T: Numeric>(m: u32, q: &T, x: &T) -> T {
        let (qpow, qint) = tables(m as usize, q);
        let g = shifted_table(&qpow, &qint, x);
        let mut acc = q.one_like();
        for h in 1..=m as usize {
            acc *= &g[h];
        }
        acc
    }

    /// `conn(m, n) = q^(m n) fac(m) fac(n) / fac(m + n)` by the direct
    /// product formula.
    pub fn connector<T: Numeric>(m: u32, n: u32, q: &T, x: &T) -> T {
        let (qpow, qint) = tables((m + n) as usize, q);
        let g = shifted_table(&qpow, &qint, x);
        // q^(m n) with exponent up to m*n: power the table entry.
        let mut acc = q.pow_u32(m * n);
        for h in 1..=m as usize {
            acc *= &g[h];
        }
        for h in 1..=n as usize {
            acc *= &g[h];
        }
        for h in 1..=(m + n) as usize {
            acc /= &g[h];
        }
        acc
    }
}
