//! Truncated evaluation of q-zeta values, connected sums, generating
//! functions, and Ohno sums.
//!
//! All series here are sums of positive terms over strictly increasing
//! chains `0 < m_1 < ... < m_r`. Evaluation truncates every summation
//! variable at a common bound `M` (a box truncation: for two-sided sums
//! both chains stop at `M`) and sums in a fixed deterministic order,
//! ascending in the outer variable with ascending inner prefixes. Partial
//! sums are recorded at `floor(M/4)`, `floor(M/2)`, and `M`; a run at
//! truncation `M` therefore reproduces the value a run at `floor(M/2)`
//! would produce, bit for bit in the float regime, as its middle partial.
//!
//! The inner loop is a prefix-sum dynamic program: layer `i` holds the sum
//! over all chains of the first `i` index parts ending at `m`, so depth-`r`
//! evaluation costs `O(r M)` for one-sided sums. Two-sided sums pair the
//! two chain-weight vectors through the connector, updated row by row with
//! its first-argument recurrence, for `O(M^2)` total.
//!
//! A tail estimate accompanies every value: the increments between the
//! recorded partial sums feed a one-step geometric extrapolation
//! ([`estimate_tail`]), with a conservative linear fallback when the
//! increments do not contract.

use rug::Rational;

use crate::error::{Error, Result};
use crate::index::{compositions, Index};
use crate::scalar::{check_q_range, kernel, Numeric, Params, Regime, Scalar};

pub mod reference;

/// How to run a truncated evaluation: the truncation bound, the arithmetic
/// regime, and the float precision (ignored in the exact regime).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalConfig {
    pub truncation: u32,
    pub precision: u32,
    pub regime: Regime,
}

impl EvalConfig {
    /// Float-regime configuration.
    pub fn float(truncation: u32, precision: u32) -> Self {
        EvalConfig {
            truncation,
            precision,
            regime: Regime::Float,
        }
    }

    /// Exact-regime configuration; precision is irrelevant and set to 0.
    pub fn exact(truncation: u32) -> Self {
        EvalConfig {
            truncation,
            precision: 0,
            regime: Regime::Exact,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation == 0 {
            return Err(Error::ZeroTruncation);
        }
        if self.regime == Regime::Float && self.precision < 2 {
            return Err(Error::PrecisionTooLow(self.precision));
        }
        Ok(())
    }
}

/// Default truncation bound for a given base: 200 when `q <= 3/4` (the
/// terms then decay geometrically), 2000 otherwise, including `q = 1`,
/// where convergence is only polynomial.
pub fn default_truncation(q: &Scalar) -> u32 {
    let le_three_quarters = match q {
        Scalar::Exact(r) => *r <= Rational::from((3, 4)),
        Scalar::Float(f) => *f <= 0.75f64,
    };
    if le_three_quarters {
        200
    } else {
        2000
    }
}

/// A truncated value, its tail estimate, and the truncation that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub value: Scalar,
    pub tail_estimate: Scalar,
    pub truncation_used: u32,
}

/// The q-zeta value `zeta_q(k)` truncated at the configured bound.
///
/// Errors with [`Error::Divergent`] unless `k` is admissible: the untruncated
/// series diverges otherwise, so a truncated value would be meaningless.
pub fn eval_qmzv(k: &Index, q: &Scalar, cfg: &EvalConfig) -> Result<EvalResult> {
    cfg.validate()?;
    if !k.is_admissible() {
        return Err(Error::Divergent(k.to_string()));
    }
    let q = prepare_q(q, cfg)?;
    Ok(match &q {
        Scalar::Exact(q) => one_sided_result(k.parts(), q, None, cfg.truncation),
        Scalar::Float(q) => one_sided_result(k.parts(), q, None, cfg.truncation),
    })
}

/// The connected sum `Z(kL; kR; x)` truncated at the configured bound.
///
/// Both sides empty gives exactly 1. When one side is empty the sum is
/// one-sided and the remaining index must be admissible; with both sides
/// non-empty the connector's decay makes any pair of indices summable, so
/// no admissibility is required.
pub fn eval_connected(
    left: &Index,
    right: &Index,
    params: &Params,
    cfg: &EvalConfig,
) -> Result<EvalResult> {
    cfg.validate()?;
    let params = prepare_params(params, cfg)?;
    match (left.is_empty(), right.is_empty()) {
        (true, true) => Ok(unit_result(&params, cfg.truncation)),
        (false, true) => connected_one_sided(left, &params, cfg),
        (true, false) => connected_one_sided(right, &params, cfg),
        (false, false) => {
            let (q, x) = (params.q(), params.x());
            Ok(match (q, x) {
                (Scalar::Exact(q), Scalar::Exact(x)) => {
                    two_sided_result(left.parts(), right.parts(), q, x, cfg.truncation)
                }
                (Scalar::Float(q), Scalar::Float(x)) => {
                    two_sided_result(left.parts(), right.parts(), q, x, cfg.truncation)
                }
                _ => unreachable!("Params enforces a single regime"),
            })
        }
    }
}

/// The Ohno generating function `Z(k; x) = Z(k; {}; x)`.
pub fn eval_generating(k: &Index, params: &Params, cfg: &EvalConfig) -> Result<EvalResult> {
    eval_connected(k, &Index::empty(), params, cfg)
}

/// The Ohno sum `S(k; c)`: the sum of `zeta_q` over every way of adding a
/// total of `c` to the parts of `k`, all at one shared truncation.
///
/// The partial sums of the aggregate feed a single tail estimate, so the
/// reported tail covers the whole sum rather than one term.
pub fn eval_ohno_sum(k: &Index, c: u32, q: &Scalar, cfg: &EvalConfig) -> Result<EvalResult> {
    cfg.validate()?;
    if !k.is_admissible() {
        return Err(Error::Divergent(k.to_string()));
    }
    let q = prepare_q(q, cfg)?;
    Ok(match &q {
        Scalar::Exact(q) => ohno_result(k, c, q, cfg.truncation),
        Scalar::Float(q) => ohno_result(k, c, q, cfg.truncation),
    })
}

/// One-step geometric tail extrapolation from three box partial sums at
/// `floor(M/4)`, `floor(M/2)`, and `M`.
///
/// With increments `d0 = S(M/2) - S(M/4)` and `d1 = S(M) - S(M/2)`:
/// a zero `d1` estimates a zero tail; contracting increments (`d1 < d0`)
/// give the geometric value `d1 * rho / (1 - rho)` with `rho = d1/d0`;
/// otherwise the conservative fallback `d1 * M` is returned. Requires all
/// three partials in one regime and non-decreasing.
pub fn estimate_tail(
    quarter: &Scalar,
    half: &Scalar,
    full: &Scalar,
    truncation: u32,
) -> Result<Scalar> {
    match (quarter, half, full) {
        (Scalar::Exact(a), Scalar::Exact(b), Scalar::Exact(c)) => {
            estimate_tail_t(a, b, c, truncation).map(Scalar::Exact)
        }
        (Scalar::Float(a), Scalar::Float(b), Scalar::Float(c)) => {
            estimate_tail_t(a, b, c, truncation).map(Scalar::Float)
        }
        _ => Err(Error::RegimeMismatch),
    }
}

fn estimate_tail_t<T: Numeric>(quarter: &T, half: &T, full: &T, truncation: u32) -> Result<T> {
    let mut d1 = full.clone();
    d1 -= half;
    let mut d0 = half.clone();
    d0 -= quarter;
    let zero = d1.zero_like();
    if d1 < zero || d0 < zero {
        return Err(Error::ParamOutOfRange {
            name: "partial sums",
            value: "not non-decreasing".to_string(),
        });
    }
    Ok(tail_from_increments(d1, d0, truncation))
}

/// Core of the tail rule; assumes `d1, d0 >= 0`.
fn tail_from_increments<T: Numeric>(d1: T, d0: T, truncation: u32) -> T {
    let zero = d1.zero_like();
    if d1 <= zero {
        return zero;
    }
    if d0 <= d1 {
        // No contraction observed; linear-in-M conservative bound.
        let m = d1.from_u32_like(truncation);
        let mut t = d1;
        t *= &m;
        return t;
    }
    // d1 * rho / (1 - rho) with rho = d1/d0, i.e. d1^2 / (d0 - d1).
    let mut num = d1.clone();
    num *= &d1;
    let mut den = d0;
    den -= &d1;
    num /= &den;
    num
}

// ---- regime preparation ----

/// Resolves the base against the configured regime: exact configs require
/// an exact base; float configs promote or re-round to the configured
/// precision. Range-checks `0 < q <= 1` after conversion.
fn prepare_q(q: &Scalar, cfg: &EvalConfig) -> Result<Scalar> {
    let q = match (cfg.regime, q) {
        (Regime::Exact, Scalar::Exact(_)) => q.clone(),
        (Regime::Exact, Scalar::Float(_)) => return Err(Error::ExactRegimeRequired),
        (Regime::Float, _) => q.to_float(cfg.precision)?,
    };
    check_q_range(&q)?;
    Ok(q)
}

fn prepare_params(params: &Params, cfg: &EvalConfig) -> Result<Params> {
    match cfg.regime {
        Regime::Exact => {
            if params.regime() != Regime::Exact {
                return Err(Error::ExactRegimeRequired);
            }
            Ok(params.clone())
        }
        Regime::Float => params.to_float(cfg.precision),
    }
}

fn unit_result(params: &Params, truncation: u32) -> EvalResult {
    let one = match params.q() {
        Scalar::Exact(q) => Scalar::Exact(q.one_like()),
        Scalar::Float(q) => Scalar::Float(q.one_like()),
    };
    let zero = match params.q() {
        Scalar::Exact(q) => Scalar::Exact(q.zero_like()),
        Scalar::Float(q) => Scalar::Float(q.zero_like()),
    };
    EvalResult {
        value: one,
        tail_estimate: zero,
        truncation_used: truncation,
    }
}

fn connected_one_sided(k: &Index, params: &Params, cfg: &EvalConfig) -> Result<EvalResult> {
    if !k.is_admissible() {
        return Err(Error::Divergent(k.to_string()));
    }
    Ok(match (params.q(), params.x()) {
        (Scalar::Exact(q), Scalar::Exact(x)) => {
            one_sided_result(k.parts(), q, Some(x), cfg.truncation)
        }
        (Scalar::Float(q), Scalar::Float(x)) => {
            one_sided_result(k.parts(), q, Some(x), cfg.truncation)
        }
        _ => unreachable!("Params enforces a single regime"),
    })
}

// ---- generic engines ----

/// Box partial sums at the three checkpoints.
struct Accum<T> {
    quarter: T,
    half: T,
    full: T,
}

impl<T: Numeric> Accum<T> {
    fn zero(proto: &T) -> Self {
        Accum {
            quarter: proto.zero_like(),
            half: proto.zero_like(),
            full: proto.zero_like(),
        }
    }

    fn add(&mut self, other: &Accum<T>) {
        self.quarter += &other.quarter;
        self.half += &other.half;
        self.full += &other.full;
    }

    fn into_result(self, truncation: u32) -> EvalResult {
        let mut d1 = self.full.clone();
        d1 -= &self.half;
        let mut d0 = self.half;
        d0 -= &self.quarter;
        let tail = tail_from_increments(d1, d0, truncation);
        EvalResult {
            value: self.full.into_scalar(),
            tail_estimate: tail.into_scalar(),
            truncation_used: truncation,
        }
    }
}

/// Precomputed per-m quantities: `qpow[j] = q^j`, `qint[j] = [j]`, and,
/// when a connector deformation is in play, `g[j] = [j] - q^j x`.
struct Tables<T> {
    qpow: Vec<T>,
    qint: Vec<T>,
    g: Option<Vec<T>>,
}

impl<T: Numeric> Tables<T> {
    fn build(m_max: usize, q: &T, x: Option<&T>) -> Self {
        let (qpow, qint) = kernel::tables(m_max, q);
        let g = x.map(|x| kernel::shifted_table(&qpow, &qint, x));
        Tables { qpow, qint, g }
    }

    /// One chain factor at position value `m >= 1` for an index part `k`:
    /// `q^((k-1) m) / [m]^k` plainly, or with one power of `[m]` replaced
    /// by `[m] - q^m x` for connected sums.
    fn term(&self, k: u32, m: usize) -> T {
        let mut t = self.qpow[m].pow_u32(k - 1);
        match &self.g {
            None => t /= &self.qint[m].pow_u32(k),
            Some(g) => {
                t /= &g[m];
                if k >= 2 {
                    t /= &self.qint[m].pow_u32(k - 1);
                }
            }
        }
        t
    }
}

/// Chain-weight vector: entry `m` is the sum over all chains
/// `0 < m_1 < ... < m_r = m` of the product of factors, for `m = 0..=mm`
/// (entry 0 is zero). Layered prefix sums, ascending in `m` throughout.
fn chain_weights<T: Numeric>(parts: &[u32], tables: &Tables<T>, mm: usize) -> Vec<T> {
    let proto = &tables.qpow[0];
    let mut cur: Vec<T> = (0..=mm)
        .map(|m| {
            if m == 0 {
                proto.zero_like()
            } else {
                tables.term(parts[0], m)
            }
        })
        .collect();
    for &k in &parts[1..] {
        let mut running = proto.zero_like();
        let mut next = Vec::with_capacity(mm + 1);
        next.push(proto.zero_like());
        for (m, prev) in cur.iter().enumerate().skip(1) {
            // The new layer at m sums chains with the previous part < m,
            // so take the running prefix before absorbing this m.
            let mut t = tables.term(k, m);
            t *= &running;
            next.push(t);
            running += prev;
        }
        cur = next;
    }
    cur
}

/// Sum of a weight vector over `1..=mm` with checkpoints at `mm/4`, `mm/2`.
fn checkpointed_sum<T: Numeric>(weights: &[T], mm: usize) -> Accum<T> {
    let proto = &weights[0];
    let (a1, a2) = (mm / 4, mm / 2);
    let mut acc = Accum::zero(proto);
    for (m, w) in weights.iter().enumerate().skip(1) {
        acc.full += w;
        if m == a1 {
            acc.quarter = acc.full.clone();
        }
        if m == a2 {
            acc.half = acc.full.clone();
        }
    }
    acc
}

fn one_sided_result<T: Numeric>(parts: &[u32], q: &T, x: Option<&T>, truncation: u32) -> EvalResult {
    let mm = truncation as usize;
    let tables = Tables::build(mm, q, x);
    let weights = chain_weights(parts, &tables, mm);
    checkpointed_sum(&weights, mm).into_result(truncation)
}

fn ohno_result<T: Numeric>(k: &Index, c: u32, q: &T, truncation: u32) -> EvalResult {
    let mm = truncation as usize;
    let tables = Tables::build(mm, q, None);
    let mut total = Accum::zero(q);
    let mut elevated = Vec::with_capacity(k.depth());
    for comp in compositions(c, k.depth() as u32) {
        elevated.clear();
        elevated.extend(k.parts().iter().zip(&comp).map(|(&p, &e)| p + e));
        let weights = chain_weights(&elevated, &tables, mm);
        total.add(&checkpointed_sum(&weights, mm));
    }
    total.into_result(truncation)
}

fn two_sided_result<T: Numeric>(
    left: &[u32],
    right: &[u32],
    q: &T,
    x: &T,
    truncation: u32,
) -> EvalResult {
    two_sided_accum(left, right, q, x, truncation).into_result(truncation)
}

fn two_sided_accum<T: Numeric>(
    left: &[u32],
    right: &[u32],
    q: &T,
    x: &T,
    truncation: u32,
) -> Accum<T> {
    let mm = truncation as usize;
    // The connector recurrence reaches g[m + n], so tables go to 2 mm.
    let tables = Tables::build(2 * mm, q, Some(x));
    let g = tables.g.as_ref().expect("built with x");
    let lw = chain_weights(left, &tables, mm);
    let rw = chain_weights(right, &tables, mm);
    let (a1, a2) = (mm / 4, mm / 2);

    // conn[n] holds conn(m, n) for the current row m; row 0 is all ones.
    let mut conn: Vec<T> = (0..=mm).map(|_| q.one_like()).collect();
    let mut acc = Accum::zero(q);
    let mut t = q.zero_like();
    for m in 1..=mm {
        let mut row_full = q.zero_like();
        let mut row_quarter = q.zero_like();
        let mut row_half = q.zero_like();
        for n in 1..=mm {
            // conn(m, n) = conn(m-1, n) * q^n * g[m] / g[m+n].
            conn[n] *= &tables.qpow[n];
            conn[n] *= &g[m];
            conn[n] /= &g[m + n];
            t.clone_from(&conn[n]);
            t *= &rw[n];
            row_full += &t;
            if n == a1 {
                row_quarter.clone_from(&row_full);
            }
            if n == a2 {
                row_half.clone_from(&row_full);
            }
        }
        if m <= a1 {
            t.clone_from(&lw[m]);
            t *= &row_quarter;
            acc.quarter += &t;
        }
        if m <= a2 {
            t.clone_from(&lw[m]);
            t *= &row_half;
            acc.half += &t;
        }
        t.clone_from(&lw[m]);
        t *= &row_full;
        acc.full += &t;
    }
    acc
}
