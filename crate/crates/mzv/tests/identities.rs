//! Tail-aware identity witnesses. Box truncation at a fixed depth M leaves
//! a real gap between the two sides of each identity, so these tests compare
//! against tolerances derived from the reported tail estimates instead of
//! fixed constants. They are expected to stay green at any reasonable M.

use mzv::eval::EvalConfig;
use mzv::index::{enumerate_admissible, Index};
use mzv::scalar::{Params, Scalar};
use mzv::suite::{run_duality, run_ohno, run_sum_formula};
use mzv::suite::{DualityOptions, OhnoOptions, SumFormulaOptions};
use mzv::transport::{prove_duality, verify_trace_numeric};

fn ix(parts: &[u32]) -> Index {
    Index::new(parts.to_vec()).expect("parts are positive")
}

#[test]
fn euler_chain_spread_within_tails() {
    let k = ix(&[1, 2]);
    let trace = prove_duality(&k).expect("admissible");
    let params = Params::from_ratios((1, 1), (0, 1)).expect("q=1, x=0");
    let cfg = EvalConfig::float(2000, 128);
    let verification = verify_trace_numeric(&trace, &params, &cfg).expect("valid trace");

    let mut tail_sum = Scalar::float_from_f64(0.0, 128).expect("zero");
    for ev in &verification.per_state {
        tail_sum = tail_sum
            .try_add(&ev.result.tail_estimate)
            .expect("floats");
    }
    let margin = Scalar::integer(1000).to_float(128).expect("finite");
    let tol = tail_sum.try_mul(&margin).expect("floats");
    assert!(
        verification.within(&tol),
        "spread {} exceeds tail-derived tolerance {}",
        verification.max_deviation.to_display_string(),
        tol.to_display_string()
    );
    // The spread is a real truncation artifact, not rounding noise.
    assert!(!verification.max_deviation.is_zero());
}

#[test]
fn duality_sweep_q1_within_tails() {
    let mut indices = Vec::new();
    for w in 2..=6u32 {
        indices.extend(enumerate_admissible(w, None));
    }
    let suite = run_duality(&DualityOptions {
        indices,
        grid: vec![Params::from_ratios((1, 1), (0, 1)).expect("q=1, x=0")],
        cfg: EvalConfig::float(2000, 128),
        tol: None,
    })
    .expect("indices admissible");
    assert!(suite.all_pass(), "\n{}", suite.render_text());
    assert_eq!(suite.cases.len(), 31);
}

#[test]
fn x_duality_q1_within_tails() {
    let suite = run_duality(&DualityOptions {
        indices: vec![ix(&[1, 2]), ix(&[2, 2]), ix(&[1, 1, 2])],
        grid: vec![Params::from_ratios((1, 1), (1, 4)).expect("in range")],
        cfg: EvalConfig::float(2000, 128),
        tol: None,
    })
    .expect("indices admissible");
    assert!(suite.all_pass(), "\n{}", suite.render_text());
}

#[test]
fn ohno_sweep_q1_within_tails() {
    let mut indices = Vec::new();
    for w in 2..=4u32 {
        indices.extend(enumerate_admissible(w, None));
    }
    let suite = run_ohno(&OhnoOptions {
        indices,
        c_max: 2,
        q_list: vec![Scalar::integer(1)],
        precision: 128,
        truncation: None,
        tol: None,
    })
    .expect("indices admissible");
    assert!(suite.all_pass(), "\n{}", suite.render_text());
}

#[test]
fn sum_formula_q1_within_tails() {
    let suite = run_sum_formula(&SumFormulaOptions {
        weights: (2..=6).collect(),
        depth: None,
        q: Scalar::integer(1),
        cfg: EvalConfig::float(2000, 128),
        tol: None,
    })
    .expect("weights >= 2");
    assert!(suite.all_pass(), "\n{}", suite.render_text());
    assert_eq!(suite.cases.len(), 15);
}
