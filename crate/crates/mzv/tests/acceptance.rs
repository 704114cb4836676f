//! Acceptance sweep. Each test prints exactly one summary line of the form
//! `Cnn <description> :: PASS|FAIL` and then asserts it, so the suite's
//! stdout doubles as a checklist. Every tolerance and truncation below is a
//! pinned constant; none are derived from tail estimates.

use mzv::eval::reference::naive_connected;
use mzv::eval::{
    default_truncation, eval_connected, eval_generating, eval_ohno_sum, eval_qmzv, EvalConfig,
};
use mzv::index::{enumerate_admissible, Index};
use mzv::scalar::{Params, Scalar};
use mzv::suite::{run_ohno, run_sum_formula, run_telescope};
use mzv::suite::{OhnoOptions, SumFormulaOptions, TelescopeOptions};
use mzv::transport::prove_duality;

fn ix(parts: &[u32]) -> Index {
    Index::new(parts.to_vec()).expect("parts are positive")
}

fn report(id: &str, detail: &str, pass: bool) {
    println!("{id} {detail} :: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} {detail}");
}

/// Absolute difference of two same-regime scalars.
fn dev(a: &Scalar, b: &Scalar) -> Scalar {
    a.try_sub(b).expect("same regime").abs()
}

/// A pinned rational tolerance, rounded into the 128-bit float regime so it
/// compares against float deviations.
fn tol(num: i64, den: i64) -> Scalar {
    Scalar::ratio(num, den)
        .expect("den nonzero")
        .to_float(128)
        .expect("tolerance is finite")
}

fn max_scalar(a: Scalar, b: Scalar) -> Scalar {
    if b > a {
        b
    } else {
        a
    }
}

/// The shared exact grid: q in {1/4, 1/2, 3/4, 1} by x in {-1/2, 0, 1/3}.
fn exact_grid() -> Vec<Params> {
    let qs = [(1i64, 4i64), (1, 2), (3, 4), (1, 1)];
    let xs = [(-1i64, 2i64), (0, 1), (1, 3)];
    let mut grid = Vec::new();
    for q in qs {
        for x in xs {
            grid.push(Params::from_ratios(q, x).expect("grid point in range"));
        }
    }
    grid
}

#[test]
fn c01_dual_involution_and_weight() {
    let mut count = 0usize;
    let mut failures = 0usize;
    for w in 2..=12u32 {
        for k in enumerate_admissible(w, None) {
            count += 1;
            let d = k.dual().expect("admissible");
            let dd = d.dual().expect("dual is admissible");
            if dd != k || d.weight() != k.weight() {
                failures += 1;
            }
        }
    }
    report(
        "C01",
        &format!(
            "dual involution and weight preservation, weight <= 12: \
             {count} indices, {failures} failures"
        ),
        failures == 0 && count == 2047,
    );
}

#[test]
fn c02_transport_termination() {
    let mut count = 0usize;
    let mut failures = 0usize;
    for w in 2..=12u32 {
        for k in enumerate_admissible(w, None) {
            count += 1;
            let dual = k.dual().expect("admissible");
            let trace = prove_duality(&k).expect("admissible input");
            let last = trace.states.last().expect("traces are non-empty");
            let ok = trace.moves.len() == k.weight() as usize
                && last.left.is_empty()
                && last.right == dual
                && trace.dual == dual;
            if !ok {
                failures += 1;
            }
        }
    }
    report(
        "C02",
        &format!(
            "transport reaches (empty; dual) in exactly wt(k) moves, weight <= 12: \
             {count} traces, {failures} failures"
        ),
        failures == 0 && count == 2047,
    );
}

#[test]
fn c03_telescoping_exact() {
    let suite = run_telescope(&TelescopeOptions {
        grid: exact_grid(),
        m_max: 5,
        n_max: 5,
        a_max: 30,
    })
    .expect("exact grid is valid");
    report(
        "C03",
        &format!(
            "telescoping residuals exactly zero, 12-point grid, m,n <= 5, a <= 30: \
             {} cases, {} failed",
            suite.cases.len(),
            suite.failed
        ),
        suite.all_pass(),
    );
}

/// All indices with parts in {1,2,3} up to the given depth, including the
/// empty index.
fn small_indices(max_depth: usize) -> Vec<Index> {
    let mut out = vec![Index::empty()];
    let mut frontier: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for base in &frontier {
            for p in 1..=3u32 {
                let mut v = base.clone();
                v.push(p);
                out.push(ix(&v));
                next.push(v);
            }
        }
        frontier = next;
    }
    out
}

#[test]
fn c04_dp_matches_naive_exactly() {
    let family = small_indices(3);
    let mut pairs: Vec<(Index, Index)> = Vec::new();
    for l in &family {
        for r in &family {
            if l.depth() + r.depth() > 3 {
                continue;
            }
            // One-sided states must be admissible for either evaluator.
            if l.is_empty() != r.is_empty() {
                let side = if l.is_empty() { r } else { l };
                if !side.is_admissible() {
                    continue;
                }
            }
            pairs.push((l.clone(), r.clone()));
        }
    }
    // Spot checks with parts outside the systematic family.
    pairs.push((ix(&[5]), ix(&[4])));
    pairs.push((ix(&[1, 4]), ix(&[2, 1])));
    pairs.push((ix(&[2, 3]), ix(&[1, 1])));

    let cfg = EvalConfig::exact(30);
    let mut count = 0usize;
    let mut failures = 0usize;
    for params in exact_grid() {
        for (l, r) in &pairs {
            count += 1;
            let got = eval_connected(l, r, &params, &cfg).expect("pair is evaluable");
            let want = naive_connected(l, r, &params, 30).expect("pair is evaluable");
            if got.value != want {
                failures += 1;
            }
        }
    }
    report(
        "C04",
        &format!(
            "connected-sum engine equals naive summation exactly, total depth <= 3, \
             M = 30, 12-point grid: {count} evaluations, {failures} mismatches"
        ),
        failures == 0,
    );
}

#[test]
fn c05_euler_chain() {
    let q1 = Scalar::integer(1);
    let cfg = EvalConfig::float(2000, 128);
    let params = Params::from_ratios((1, 1), (0, 1)).expect("q=1, x=0");
    let z12 = eval_qmzv(&ix(&[1, 2]), &q1, &cfg).expect("admissible").value;
    let z3 = eval_qmzv(&ix(&[3]), &q1, &cfg).expect("admissible").value;
    let s_11_1 = eval_connected(&ix(&[1, 1]), &ix(&[1]), &params, &cfg)
        .expect("two-sided state")
        .value;
    let s_1_2 = eval_connected(&ix(&[1]), &ix(&[2]), &params, &cfg)
        .expect("two-sided state")
        .value;
    let mut worst = dev(&z12, &z3);
    for s in [&s_11_1, &s_1_2] {
        worst = max_scalar(worst, dev(s, &z12));
        worst = max_scalar(worst, dev(s, &z3));
    }
    let bound = tol(1, 1_000_000);
    report(
        "C05",
        &format!(
            "Euler chain zeta(1,2) = Z(1,1;1) = Z(1;2) = zeta(3) at q=1, M=2000: \
             worst deviation {}, tolerance 1e-6",
            worst.to_display_string()
        ),
        worst <= bound,
    );
}

#[test]
fn c06_duality_witness() {
    let q1 = Scalar::integer(1);
    let cfg = EvalConfig::float(2000, 128);
    let bound = tol(1, 100_000);
    let mut count = 0usize;
    let mut over = 0usize;
    let mut worst = Scalar::float_from_f64(0.0, 128).expect("zero");
    for w in 2..=6u32 {
        for k in enumerate_admissible(w, None) {
            count += 1;
            let d = k.dual().expect("admissible");
            let a = eval_qmzv(&k, &q1, &cfg).expect("admissible").value;
            let b = eval_qmzv(&d, &q1, &cfg).expect("admissible").value;
            let gap = dev(&a, &b);
            if gap > bound {
                over += 1;
            }
            worst = max_scalar(worst, gap);
        }
    }
    report(
        "C06",
        &format!(
            "duality |zeta(k) - zeta(dual k)| < 1e-5 at q=1, M=2000, weight <= 6: \
             {count} indices, {over} over tolerance, worst {}",
            worst.to_display_string()
        ),
        over == 0,
    );
}

#[test]
fn c07_x_duality_witness() {
    let ks = [ix(&[1, 2]), ix(&[2, 2]), ix(&[1, 1, 2])];
    let combos: [((i64, i64), (i64, i64), u32); 3] = [
        ((1, 1), (1, 4), 2000),
        ((1, 2), (1, 3), 300),
        ((1, 2), (-1, 2), 300),
    ];
    let bound = tol(1, 10_000);
    let mut count = 0usize;
    let mut over = 0usize;
    let mut worst = Scalar::float_from_f64(0.0, 128).expect("zero");
    for (q, x, m) in combos {
        let params = Params::from_ratios(q, x).expect("in range");
        let cfg = EvalConfig::float(m, 128);
        for k in &ks {
            count += 1;
            let d = k.dual().expect("admissible");
            let a = eval_generating(k, &params, &cfg).expect("admissible").value;
            let b = eval_generating(&d, &params, &cfg).expect("admissible").value;
            let gap = dev(&a, &b);
            if gap > bound {
                over += 1;
            }
            worst = max_scalar(worst, gap);
        }
    }
    report(
        "C07",
        &format!(
            "x-duality |Z(k;x) - Z(dual k;x)| < 1e-4 on three (q,x) points: \
             {count} cases, {over} over tolerance, worst {}",
            worst.to_display_string()
        ),
        over == 0,
    );
}

#[test]
fn c08_ohno_witness() {
    let mut indices = Vec::new();
    for w in 2..=5u32 {
        indices.extend(enumerate_admissible(w, None));
    }
    let suite = run_ohno(&OhnoOptions {
        indices,
        c_max: 3,
        q_list: vec![Scalar::ratio(1, 2).expect("nonzero den"), Scalar::integer(1)],
        precision: 128,
        truncation: None,
        tol: Some(Scalar::ratio(1, 10_000).expect("nonzero den")),
    })
    .expect("indices admissible");
    report(
        "C08",
        &format!(
            "Ohno sums |S(k;c) - S(dual k;c)| < 1e-4, weight <= 5, c <= 3, \
             q in {{1/2, 1}}: {} cases, {} failed",
            suite.cases.len(),
            suite.failed
        ),
        suite.all_pass(),
    );
}

#[test]
fn c09_generating_series_expansion() {
    let ks = [ix(&[2]), ix(&[1, 2])];
    let qs = [(1i64, 2i64), (1, 1)];
    let bound = tol(1, 1000);
    let mut count = 0usize;
    let mut over = 0usize;
    let mut worst = Scalar::float_from_f64(0.0, 128).expect("zero");
    for q in qs {
        let qs_scalar = Scalar::ratio(q.0, q.1).expect("nonzero den");
        let m = default_truncation(&qs_scalar);
        let cfg = EvalConfig::float(m, 128);
        let params = Params::from_ratios(q, (1, 4)).expect("in range");
        let xf = tol(1, 4);
        for k in &ks {
            count += 1;
            let z = eval_generating(k, &params, &cfg).expect("admissible").value;
            let mut sum = Scalar::float_from_f64(0.0, 128).expect("zero");
            let mut xpow = tol(1, 1);
            for c in 0..=8u32 {
                let s = eval_ohno_sum(k, c, &qs_scalar, &cfg)
                    .expect("admissible")
                    .value;
                sum = sum
                    .try_add(&s.try_mul(&xpow).expect("floats"))
                    .expect("floats");
                xpow = xpow.try_mul(&xf).expect("floats");
            }
            let gap = dev(&z, &sum);
            if gap > bound {
                over += 1;
            }
            worst = max_scalar(worst, gap);
        }
    }
    report(
        "C09",
        &format!(
            "generating series matches sum of x^c S(k;c) for c <= 8 at x=1/4, \
             q in {{1/2, 1}}: {count} cases, {over} over tolerance 1e-3, worst {}",
            worst.to_display_string()
        ),
        over == 0,
    );
}

#[test]
fn c10_sum_formula() {
    let suite = run_sum_formula(&SumFormulaOptions {
        weights: (2..=6).collect(),
        depth: None,
        q: Scalar::integer(1),
        cfg: EvalConfig::float(2000, 128),
        tol: Some(Scalar::ratio(1, 10_000).expect("nonzero den")),
    })
    .expect("weights >= 2");
    report(
        "C10",
        &format!(
            "sum formula |sum of zeta over weight w depth d - zeta(w)| < 1e-4, \
             1 <= d < w <= 6, M=2000: {} cases, {} failed",
            suite.cases.len(),
            suite.failed
        ),
        suite.all_pass(),
    );
}

#[test]
fn c11_geometric_depth_bound() {
    let ks = [ix(&[1, 2]), ix(&[2, 2]), ix(&[1, 1, 2])];
    let combos: [((i64, i64), (i64, i64), u32); 2] =
        [((1, 1), (1, 4), 2000), ((1, 2), (1, 3), 300)];
    let mut count = 0usize;
    let mut failures = 0usize;
    for (q, x, m) in combos {
        let params = Params::from_ratios(q, x).expect("in range");
        let cfg = EvalConfig::float(m, 128);
        for k in &ks {
            count += 1;
            let z = eval_generating(k, &params, &cfg).expect("admissible");
            let zeta = eval_qmzv(k, params.q(), &cfg).expect("admissible");
            // (1/(1-x))^depth, computed exactly then rounded once.
            let one = Scalar::integer(1);
            let xe = Scalar::ratio(x.0, x.1).expect("nonzero den");
            let base = one
                .try_div(&one.try_sub(&xe).expect("exact"))
                .expect("x < 1");
            let mut factor = Scalar::integer(1);
            for _ in 0..k.depth() {
                factor = factor.try_mul(&base).expect("exact");
            }
            let factor = factor.to_float(128).expect("finite");
            let rhs = factor
                .try_mul(
                    &zeta
                        .value
                        .try_add(&zeta.tail_estimate)
                        .expect("floats"),
                )
                .expect("floats")
                .try_add(&z.tail_estimate)
                .expect("floats");
            if !(z.value <= rhs) {
                failures += 1;
            }
        }
    }
    report(
        "C11",
        &format!(
            "depth-geometric bound Z(k;x) <= (1/(1-x))^depth zeta(k) plus tails, \
             x > 0 grid: {count} cases, {failures} failures"
        ),
        failures == 0,
    );
}
