//! The two-move rewriting system on connected sums, its duality proofs,
//! and the checks that certify them.
//!
//! A state is a pair of indices `(kL; kR)`. Two moves rewrite states while
//! preserving the value of the connected sum `Z(kL; kR; x)`:
//!
//! * Move `A` applies when `kL` ends in 1 and `kR` is non-empty: the
//!   trailing 1 is removed and the last part of `kR` grows by one.
//! * Move `B` applies when `kL` ends in a part of at least 2: that part
//!   shrinks by one and a new part 1 is appended to `kR`.
//!
//! Each move shifts one unit of weight from left to right, so exactly
//! `wt(k)` moves lead from `(k; {})` to `({}; k')`, and the endpoint `k'`
//! is the dual index: running the greedy strategy "B when possible, else
//! A" is a constructive proof of duality, recorded as a [`ProofTrace`].
//! Value preservation itself rests on a telescoping identity for the
//! connector, checked exactly by [`check_telescoping`], and can be
//! spot-checked numerically on any trace by [`verify_trace_numeric`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{eval_connected, EvalConfig, EvalResult};
use crate::index::Index;
use crate::scalar::{connector, Params, Regime, Scalar};

/// One rewriting move. Serializes as the bare string `"A"` or `"B"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransportMove {
    A,
    B,
}

impl TransportMove {
    fn letter(self) -> char {
        match self {
            TransportMove::A => 'A',
            TransportMove::B => 'B',
        }
    }
}

impl fmt::Display for TransportMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A two-sided state `(kL; kR)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectedState {
    pub left: Index,
    pub right: Index,
}

impl ConnectedState {
    pub fn new(left: Index, right: Index) -> Self {
        ConnectedState { left, right }
    }

    /// The starting state of a duality proof: everything on the left.
    pub fn initial(k: Index) -> Self {
        ConnectedState {
            left: k,
            right: Index::empty(),
        }
    }
}

impl fmt::Display for ConnectedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |k: &Index| {
            if k.is_empty() {
                "\u{2205}".to_string()
            } else {
                k.to_string()
            }
        };
        write!(f, "({}; {})", side(&self.left), side(&self.right))
    }
}

/// Move `A`: drop a trailing 1 on the left, grow the last right part.
pub fn apply_move_a(state: &ConnectedState) -> Result<ConnectedState> {
    let fail = || Error::MoveNotApplicable {
        mv: 'A',
        state: state.to_string(),
    };
    if state.left.last() != Some(1) {
        return Err(fail());
    }
    let Some(last_r) = state.right.last() else {
        return Err(fail());
    };
    let mut left = state.left.parts().to_vec();
    left.pop();
    let mut right = state.right.parts().to_vec();
    *right.last_mut().expect("checked non-empty") = last_r + 1;
    Ok(ConnectedState {
        left: Index::new(left)?,
        right: Index::new(right)?,
    })
}

/// Move `B`: shrink a left part of at least 2, append 1 on the right.
pub fn apply_move_b(state: &ConnectedState) -> Result<ConnectedState> {
    let fail = || Error::MoveNotApplicable {
        mv: 'B',
        state: state.to_string(),
    };
    match state.left.last() {
        Some(p) if p >= 2 => {
            let mut left = state.left.parts().to_vec();
            *left.last_mut().expect("checked non-empty") = p - 1;
            let mut right = state.right.parts().to_vec();
            right.push(1);
            Ok(ConnectedState {
                left: Index::new(left)?,
                right: Index::new(right)?,
            })
        }
        _ => Err(fail()),
    }
}

pub fn apply_move(state: &ConnectedState, mv: TransportMove) -> Result<ConnectedState> {
    match mv {
        TransportMove::A => apply_move_a(state),
        TransportMove::B => apply_move_b(state),
    }
}

/// Inverts a move: `undo_move(apply_move(s, mv), mv) == s` wherever the
/// forward move applies. Each move is a bijection onto its image, so
/// traces replay backwards without re-deriving anything.
pub fn undo_move(state: &ConnectedState, mv: TransportMove) -> Result<ConnectedState> {
    let fail = || Error::MoveNotApplicable {
        mv: mv.letter(),
        state: state.to_string(),
    };
    match mv {
        TransportMove::A => {
            // Forward A made the last right part at least 2.
            let Some(last_r) = state.right.last() else {
                return Err(fail());
            };
            if last_r < 2 {
                return Err(fail());
            }
            let mut right = state.right.parts().to_vec();
            *right.last_mut().expect("checked non-empty") = last_r - 1;
            let mut left = state.left.parts().to_vec();
            left.push(1);
            Ok(ConnectedState {
                left: Index::new(left)?,
                right: Index::new(right)?,
            })
        }
        TransportMove::B => {
            // Forward B left a trailing 1 on the right and a non-empty left.
            if state.right.last() != Some(1) || state.left.is_empty() {
                return Err(fail());
            }
            let mut right = state.right.parts().to_vec();
            right.pop();
            let mut left = state.left.parts().to_vec();
            *left.last_mut().expect("checked non-empty") += 1;
            Ok(ConnectedState {
                left: Index::new(left)?,
                right: Index::new(right)?,
            })
        }
    }
}

/// A complete transport proof that `dual` is the dual of `input`.
///
/// `states` has one more entry than `moves`; `states[0]` is `(input; {})`,
/// every transition applies the recorded move, and the final state is
/// `({}; dual)` after exactly `wt(input)` moves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofTrace {
    pub input: Index,
    pub dual: Index,
    pub moves: Vec<TransportMove>,
    pub states: Vec<ConnectedState>,
}

impl ProofTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serialization cannot fail")
    }

    /// Parses a trace from JSON. Structural soundness is a separate
    /// concern: call [`ProofTrace::validate`] on the result.
    pub fn from_json(s: &str) -> Result<ProofTrace> {
        serde_json::from_str(s).map_err(|e| Error::InvalidTrace(e.to_string()))
    }

    /// Checks every structural invariant of the trace: endpoint shapes,
    /// move count equal to the weight, each transition being the recorded
    /// move, and the claimed dual matching the combinatorial dual.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidTrace(msg));
        if self.states.len() != self.moves.len() + 1 {
            return fail(format!(
                "{} states do not frame {} moves",
                self.states.len(),
                self.moves.len()
            ));
        }
        if self.moves.len() as u32 != self.input.weight() {
            return fail(format!(
                "{} moves for weight {}",
                self.moves.len(),
                self.input.weight()
            ));
        }
        let first = &self.states[0];
        if first.left != self.input || !first.right.is_empty() {
            return fail(format!("first state {first} is not the input state"));
        }
        let last = self.states.last().expect("at least one state");
        if !last.left.is_empty() || last.right != self.dual {
            return fail(format!("last state {last} is not the dual state"));
        }
        for (i, mv) in self.moves.iter().enumerate() {
            let expected = apply_move(&self.states[i], *mv).map_err(|e| {
                Error::InvalidTrace(format!("step {i}: {e}"))
            })?;
            if expected != self.states[i + 1] {
                return fail(format!(
                    "step {i}: move {mv} on {} gives {expected}, trace has {}",
                    self.states[i], self.states[i + 1]
                ));
            }
        }
        match self.input.dual() {
            Ok(d) if d == self.dual => Ok(()),
            Ok(d) => fail(format!("claimed dual {} but the dual is {d}", self.dual)),
            Err(e) => Err(e),
        }
    }
}

/// Proves duality for an admissible index by transport.
///
/// Strategy: play `B` whenever the left index ends in a part of at least
/// 2, otherwise play `A`. Admissibility makes the first move a `B`, so the
/// right side is never empty when `A` is needed, and each move shifts one
/// unit of weight rightwards until the left side is exhausted.
pub fn prove_duality(k: &Index) -> Result<ProofTrace> {
    if !k.is_admissible() {
        return Err(Error::NotAdmissible(k.to_string()));
    }
    let dual = k.dual()?;
    let mut states = vec![ConnectedState::initial(k.clone())];
    let mut moves = Vec::with_capacity(k.weight() as usize);
    while !states.last().expect("non-empty").left.is_empty() {
        let cur = states.last().expect("non-empty");
        let mv = if matches!(cur.left.last(), Some(p) if p >= 2) {
            TransportMove::B
        } else {
            TransportMove::A
        };
        let next = apply_move(cur, mv)?;
        moves.push(mv);
        states.push(next);
    }
    let trace = ProofTrace {
        input: k.clone(),
        dual,
        moves,
        states,
    };
    // The construction guarantees validity; the check is cheap insurance
    // that the endpoint really is the combinatorial dual.
    trace.validate()?;
    Ok(trace)
}

/// Exact residuals of the telescoping identity behind move invariance.
///
/// With `T(a) = conn(a, n)` and `g(a) = [a] - q^a x`, the identity
/// `T(a) / g(a) = (q^n / [n]) (T(a-1) - T(a))` makes the sum over
/// `a = m+1 ..= a_max` collapse to `(q^n / [n]) (T(m) - T(a_max))`.
/// All residuals are exact rationals and should be zero.
#[derive(Clone, Debug)]
pub struct TelescopeCheck {
    pub per_term_residuals: Vec<Scalar>,
    pub partial_sum_residual: Scalar,
}

impl TelescopeCheck {
    pub fn all_zero(&self) -> bool {
        self.partial_sum_residual.is_zero()
            && self.per_term_residuals.iter().all(Scalar::is_zero)
    }
}

/// Verifies the telescoping identity exactly on `a = m+1 ..= a_max`.
///
/// Requires exact-regime parameters, `n >= 1`, and `a_max > m`.
pub fn check_telescoping(m: u32, n: u32, params: &Params, a_max: u32) -> Result<TelescopeCheck> {
    if params.regime() != Regime::Exact {
        return Err(Error::ExactRegimeRequired);
    }
    if n == 0 {
        return Err(Error::ParamOutOfRange {
            name: "n",
            value: "0".to_string(),
        });
    }
    if a_max <= m {
        return Err(Error::ParamOutOfRange {
            name: "a_max",
            value: format!("{a_max} (must exceed m = {m})"),
        });
    }
    let q = params.q();
    // q^n / [n], the constant in front of the telescoped difference.
    let qn = pow_scalar(q, n);
    let coeff = qn.try_div(&crate::scalar::q_integer(n, q)?)?;

    let conn_at = |a: u32| connector(a, n, params);
    let g_at = |a: u32| -> Result<Scalar> {
        crate::scalar::q_integer(a, q)?.try_sub(&pow_scalar(q, a).try_mul(params.x())?)
    };

    let mut per_term = Vec::with_capacity((a_max - m) as usize);
    let mut lhs_sum = Scalar::integer(0);
    for a in m + 1..=a_max {
        let lhs = conn_at(a).try_div(&g_at(a)?)?;
        let diff = conn_at(a - 1).try_sub(&conn_at(a))?;
        per_term.push(lhs.try_sub(&coeff.try_mul(&diff)?)?);
        lhs_sum = lhs_sum.try_add(&lhs)?;
    }
    let telescoped = coeff.try_mul(&conn_at(m).try_sub(&conn_at(a_max))?)?;
    Ok(TelescopeCheck {
        per_term_residuals: per_term,
        partial_sum_residual: lhs_sum.try_sub(&telescoped)?,
    })
}

fn pow_scalar(q: &Scalar, e: u32) -> Scalar {
    use crate::scalar::Numeric;
    match q {
        Scalar::Exact(r) => Scalar::Exact(r.pow_u32(e)),
        Scalar::Float(f) => Scalar::Float(f.pow_u32(e)),
    }
}

/// One state of a trace together with its evaluated connected sum.
#[derive(Clone, Debug)]
pub struct StateEvaluation {
    pub state: ConnectedState,
    pub result: EvalResult,
}

/// Numeric spot check of a proof trace: every state evaluated under one
/// configuration, with the largest pairwise deviation of the values.
#[derive(Clone, Debug)]
pub struct TraceVerification {
    pub per_state: Vec<StateEvaluation>,
    pub max_deviation: Scalar,
}

impl TraceVerification {
    pub fn within(&self, tol: &Scalar) -> bool {
        self.max_deviation <= *tol
    }
}

/// Evaluates every state of a validated trace and reports the spread.
///
/// Move invariance says the untruncated values all coincide; truncation
/// breaks the tie, so the spread should be on the order of the reported
/// tail estimates, not of the values themselves.
pub fn verify_trace_numeric(
    trace: &ProofTrace,
    params: &Params,
    cfg: &EvalConfig,
) -> Result<TraceVerification> {
    trace.validate()?;
    let mut per_state = Vec::with_capacity(trace.states.len());
    for state in &trace.states {
        let result = eval_connected(&state.left, &state.right, params, cfg)?;
        per_state.push(StateEvaluation {
            state: state.clone(),
            result,
        });
    }
    let mut lo = per_state[0].result.value.clone();
    let mut hi = lo.clone();
    for ev in &per_state[1..] {
        if ev.result.value < lo {
            lo = ev.result.value.clone();
        }
        if ev.result.value > hi {
            hi = ev.result.value.clone();
        }
    }
    Ok(TraceVerification {
        max_deviation: hi.try_sub(&lo)?,
        per_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(parts: &[u32]) -> Index {
        Index::new(parts.to_vec()).unwrap()
    }

    fn state(l: &[u32], r: &[u32]) -> ConnectedState {
        ConnectedState::new(idx(l), idx(r))
    }

    #[test]
    fn move_examples() {
        // The weight-3 chain: (1,2; {}) -B-> (1,1; 1) -A-> (1; 2) -A-> ({}; 3).
        let s0 = state(&[1, 2], &[]);
        let s1 = apply_move_b(&s0).unwrap();
        assert_eq!(s1, state(&[1, 1], &[1]));
        let s2 = apply_move_a(&s1).unwrap();
        assert_eq!(s2, state(&[1], &[2]));
        let s3 = apply_move_a(&s2).unwrap();
        assert_eq!(s3, state(&[], &[3]));
    }

    #[test]
    fn move_preconditions() {
        assert!(apply_move_a(&state(&[2], &[1])).is_err());
        assert!(apply_move_a(&state(&[1], &[])).is_err());
        assert!(apply_move_a(&state(&[], &[2])).is_err());
        assert!(apply_move_b(&state(&[1, 1], &[])).is_err());
        assert!(apply_move_b(&state(&[], &[2])).is_err());
    }

    #[test]
    fn undo_inverts_moves() {
        for (s, mv) in [
            (state(&[1, 2], &[]), TransportMove::B),
            (state(&[1, 1], &[1]), TransportMove::A),
            (state(&[1], &[2]), TransportMove::A),
            (state(&[3, 2], &[1, 1]), TransportMove::B),
            (state(&[2, 1], &[4]), TransportMove::A),
        ] {
            let fwd = apply_move(&s, mv).unwrap();
            assert_eq!(undo_move(&fwd, mv).unwrap(), s, "undo {mv} after {s}");
        }
        assert!(undo_move(&state(&[1], &[1]), TransportMove::A).is_err());
        assert!(undo_move(&state(&[], &[2]), TransportMove::B).is_err());
    }

    #[test]
    fn golden_trace_json() {
        let trace = prove_duality(&idx(&[1, 2])).unwrap();
        let expected = concat!(
            "{\"input\":[1,2],\"dual\":[3],\"moves\":[\"B\",\"A\",\"A\"],",
            "\"states\":[{\"left\":[1,2],\"right\":[]},{\"left\":[1,1],\"right\":[1]},",
            "{\"left\":[1],\"right\":[2]},{\"left\":[],\"right\":[3]}]}"
        );
        assert_eq!(trace.to_json(), expected);
        let back = ProofTrace::from_json(expected).unwrap();
        assert_eq!(back, trace);
        back.validate().unwrap();
    }

    #[test]
    fn prove_duality_sweep() {
        for w in 2..=10u32 {
            for k in crate::index::enumerate_admissible(w, None) {
                let trace = prove_duality(&k).unwrap();
                assert_eq!(trace.moves.len() as u32, w, "move count for {k:?}");
                assert_eq!(trace.dual, k.dual().unwrap());
                trace.validate().unwrap();
                assert_eq!(trace.moves[0], TransportMove::B, "first move for {k:?}");
                // Replay backwards through the inverses.
                let mut cur = trace.states.last().unwrap().clone();
                for (mv, prev) in trace.moves.iter().zip(&trace.states).rev() {
                    cur = undo_move(&cur, *mv).unwrap();
                    assert_eq!(&cur, prev);
                }
            }
        }
        assert!(prove_duality(&idx(&[2, 1])).is_err());
        assert!(prove_duality(&Index::empty()).is_err());
    }

    #[test]
    fn validate_rejects_tampering() {
        let good = prove_duality(&idx(&[2, 3])).unwrap();
        let mut wrong_move = good.clone();
        wrong_move.moves[0] = TransportMove::A;
        assert!(wrong_move.validate().is_err());

        let mut wrong_dual = good.clone();
        wrong_dual.dual = idx(&[5]);
        assert!(wrong_dual.validate().is_err());

        let mut dropped_state = good.clone();
        dropped_state.states.pop();
        assert!(dropped_state.validate().is_err());

        let mut edited_state = good.clone();
        edited_state.states[1] = state(&[9], &[9]);
        assert!(edited_state.validate().is_err());
    }

    #[test]
    fn telescoping_exact_on_grid() {
        let qs = [(1, 1), (1, 2), (1, 4), (3, 4)];
        let xs = [(0, 1), (1, 3), (-1, 2)];
        for &q in &qs {
            for &x in &xs {
                let params = Params::from_ratios(q, x).unwrap();
                for m in [0u32, 1, 3] {
                    for n in [1u32, 2, 5] {
                        let chk = check_telescoping(m, n, &params, m + 20).unwrap();
                        assert!(
                            chk.all_zero(),
                            "nonzero residual at q={q:?} x={x:?} m={m} n={n}"
                        );
                        assert_eq!(chk.per_term_residuals.len(), 20);
                    }
                }
            }
        }
    }

    #[test]
    fn telescoping_collapses_to_closed_form() {
        // At q = 1, x = 0, n = 1: T(a) = conn(a, 1) = 1/(a+1) and g(a) = a,
        // so the sum over a = 1..=100 of T(a)/g(a) is 1 - 1/101 = 100/101.
        let params = Params::from_ratios((1, 1), (0, 1)).unwrap();
        let chk = check_telescoping(0, 1, &params, 100).unwrap();
        assert!(chk.all_zero());
        let mut total = Scalar::integer(0);
        for a in 1..=100u32 {
            let t = connector(a, 1, &params);
            let g = Scalar::integer(a as i64);
            total = total.try_add(&t.try_div(&g).unwrap()).unwrap();
        }
        assert_eq!(total, Scalar::ratio(100, 101).unwrap());
    }

    #[test]
    fn telescoping_preconditions() {
        let params = Params::from_ratios((1, 2), (0, 1)).unwrap();
        assert!(check_telescoping(3, 0, &params, 10).is_err());
        assert!(check_telescoping(5, 1, &params, 5).is_err());
        let fp = params.to_float(64).unwrap();
        assert_eq!(
            check_telescoping(0, 1, &fp, 10).unwrap_err(),
            Error::ExactRegimeRequired
        );
    }

    #[test]
    fn verify_trace_fast_base() {
        // Geometric decay at q = 1/2 makes truncation error invisible at
        // this precision: the three states of the weight-2 trace agree to
        // far below 1e-20.
        let trace = prove_duality(&idx(&[2])).unwrap();
        let params = Params::from_ratios((1, 2), (0, 1)).unwrap();
        let cfg = EvalConfig::float(200, 128);
        let v = verify_trace_numeric(&trace, &params, &cfg).unwrap();
        assert_eq!(v.per_state.len(), 3);
        let tol = Scalar::float_from_f64(1e-20, 128).unwrap();
        assert!(v.within(&tol), "deviation {:?}", v.max_deviation);
    }

    #[test]
    fn verify_trace_classical_boundary_gap() {
        // At q = 1 the states disagree by a truncation boundary term of
        // order log(M)/M; at M = 300 that is a few percent at most.
        let trace = prove_duality(&idx(&[1, 2])).unwrap();
        let params = Params::from_ratios((1, 1), (0, 1)).unwrap();
        let cfg = EvalConfig::float(300, 128);
        let v = verify_trace_numeric(&trace, &params, &cfg).unwrap();
        let dev = match &v.max_deviation {
            Scalar::Float(f) => f.to_f64(),
            _ => unreachable!(),
        };
        assert!(dev < 0.04, "deviation {dev}");
        assert!(dev > 0.005, "deviation suspiciously small: {dev}");
    }

    #[test]
    fn verify_trace_exact_regime() {
        let trace = prove_duality(&idx(&[1, 2])).unwrap();
        let params = Params::from_ratios((1, 2), (1, 3)).unwrap();
        let cfg = EvalConfig::exact(12);
        let v = verify_trace_numeric(&trace, &params, &cfg).unwrap();
        assert!(!v.max_deviation.is_zero(), "truncated states differ exactly");
        assert!(v.max_deviation < Scalar::ratio(1, 100).unwrap());
    }
}
