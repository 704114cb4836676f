//! Naive reference evaluators, deliberately independent of the layered
//! engine: chains are enumerated one by one with no shared prefix sums,
//! q-integers use the closed form `(1 - q^m)/(1 - q)` instead of the
//! incremental summation, and connectors come straight from the factorial
//! product formula rather than the row recurrence. Exact regime only.
//!
//! Cost grows like `binomial(M, depth)` per side, so these are for small
//! truncations; they exist to pin the engine down, not to be fast.

use rug::ops::Pow;
use rug::{Complete, Rational};

use crate::error::{Error, Result};
use crate::index::Index;
use crate::scalar::{Params, Scalar};

fn rpow(q: &Rational, e: u32) -> Rational {
    q.pow(e).complete()
}

/// `[m]` in closed form; the engine builds it by summation instead.
fn qint_closed(m: u32, q: &Rational) -> Rational {
    if *q == 1u32 {
        Rational::from(m)
    } else {
        (Rational::from(1) - rpow(q, m)) / (Rational::from(1) - q.clone())
    }
}

/// All strictly increasing chains of length `parts.len()` with entries in
/// `1..=m_cap`, as `(top entry, product of factors)` pairs. The empty
/// index yields the single empty chain `(0, 1)`.
fn chains(
    parts: &[u32],
    m_cap: u32,
    factor: &impl Fn(u32, u32) -> Rational,
) -> Vec<(u32, Rational)> {
    let mut out = Vec::new();
    fn go(
        parts: &[u32],
        pos: usize,
        start: u32,
        m_cap: u32,
        prod: Rational,
        factor: &impl Fn(u32, u32) -> Rational,
        out: &mut Vec<(u32, Rational)>,
    ) {
        if pos == parts.len() {
            out.push((start, prod));
            return;
        }
        for m in (start + 1)..=m_cap {
            let p = prod.clone() * factor(parts[pos], m);
            go(parts, pos + 1, m, m_cap, p, factor, out);
        }
    }
    go(parts, 0, 0, m_cap, Rational::from(1), factor, &mut out);
    out
}

/// Truncated `zeta_q(k)` by direct chain enumeration. Any index is
/// accepted: a truncated sum is finite regardless of admissibility.
pub fn naive_qmzv(k: &Index, q: &Rational, truncation: u32) -> Rational {
    let factor = |part: u32, m: u32| {
        rpow(q, (part - 1) * m) / rpow(&qint_closed(m, q), part)
    };
    chains(k.parts(), truncation, &factor)
        .into_iter()
        .map(|(_, p)| p)
        .sum()
}

/// Truncated connected sum by double chain enumeration with the direct
/// connector formula `q^(m n) fac(m) fac(n) / fac(m + n)`.
pub fn naive_connected(
    left: &Index,
    right: &Index,
    params: &Params,
    truncation: u32,
) -> Result<Scalar> {
    let (Scalar::Exact(q), Scalar::Exact(x)) = (params.q(), params.x()) else {
        return Err(Error::ExactRegimeRequired);
    };
    let g = |m: u32| qint_closed(m, q) - rpow(q, m) * x.clone();
    let mut fac = Vec::with_capacity(2 * truncation as usize + 1);
    fac.push(Rational::from(1));
    for h in 1..=2 * truncation {
        let next = fac.last().unwrap().clone() * g(h);
        fac.push(next);
    }
    let factor = |part: u32, m: u32| {
        rpow(q, (part - 1) * m) / (g(m) * rpow(&qint_closed(m, q), part - 1))
    };
    let lc = chains(left.parts(), truncation, &factor);
    let rc = chains(right.parts(), truncation, &factor);
    let mut acc = Rational::new();
    for (m, lp) in &lc {
        for (n, rp) in &rc {
            let conn = rpow(q, m * n) * &fac[*m as usize] * &fac[*n as usize]
                / &fac[(m + n) as usize];
            acc += conn * lp * rp;
        }
    }
    Ok(Scalar::Exact(acc))
}
