//! Verification sweeps bundled into serializable reports.
//!
//! Four suites cover the standard identities: numeric duality of
//! generating functions, duality of Ohno sums, exact telescoping of the
//! connector, and the sum formula. Each produces a [`SuiteReport`] with
//! one [`CaseReport`] per checked instance; the same functions back the
//! CLI `check` command and the integration tests.
//!
//! Tolerances: every case either receives the caller's fixed tolerance or
//! derives one as the sum of the tail estimates involved times a safety
//! factor of 1000. Exact suites (telescoping) tolerate exactly zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{
    default_truncation, eval_generating, eval_ohno_sum, eval_qmzv, EvalConfig,
};
use crate::index::{enumerate_admissible, Index};
use crate::scalar::{Params, Scalar};
use crate::transport::check_telescoping;

/// Outcome of a single checked identity instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub input: String,
    pub deviation: String,
    pub tolerance: String,
    pub pass: bool,
}

/// Outcome of a whole sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<CaseReport>,
    pub passed: usize,
    pub failed: usize,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            cases: Vec::new(),
            passed: 0,
            failed: 0,
        }
    }

    fn push_case(&mut self, input: String, deviation: &Scalar, tolerance: &Scalar) {
        let pass = deviation <= tolerance;
        self.cases.push(CaseReport {
            input,
            deviation: deviation.to_display_string(),
            tolerance: tolerance.to_display_string(),
            pass,
        });
        if pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<SuiteReport> {
        serde_json::from_str(s).map_err(|e| Error::InvalidReport(e.to_string()))
    }

    /// Plain-text rendering, one line per case plus a summary line.
    pub fn render_text(&self) -> String {
        let mut out = format!("suite: {}\n", self.suite);
        for c in &self.cases {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "  {verdict}  {}  dev={} tol={}\n",
                c.input, c.deviation, c.tolerance
            ));
        }
        out.push_str(&format!(
            "passed {}, failed {}\n",
            self.passed, self.failed
        ));
        out
    }
}

/// Default tolerance rule: sum of tail estimates times a safety factor of
/// 1000, plus the same multiple of the rounding floor in the float regime.
/// When truncation error is far below one ulp (geometric bases), the spread
/// between two evaluations is rounding noise, which tails alone cannot see.
pub fn derived_tolerance(tails: &[&Scalar], values: &[&Scalar]) -> Result<Scalar> {
    let mut acc = tails.first().expect("at least one tail").to_owned().clone();
    for t in &tails[1..] {
        acc = acc.try_add(t)?;
    }
    if let Scalar::Float(f) = &acc {
        let prec = f.prec();
        let mut mag = rug::Float::new(prec);
        for v in values {
            if let Scalar::Float(vf) = v {
                mag += &vf.clone().abs();
            }
        }
        // One-ulp relative floor on the combined magnitude.
        mag >>= prec - 1;
        acc = acc.try_add(&Scalar::Float(mag))?;
    }
    let factor = match &acc {
        Scalar::Exact(_) => Scalar::integer(1000),
        Scalar::Float(f) => Scalar::integer(1000).to_float(f.prec())?,
    };
    acc.try_mul(&factor)
}

/// Brings a caller-supplied tolerance into the regime of the deviations.
fn coerce_tolerance(tol: &Scalar, like: &Scalar) -> Result<Scalar> {
    match like {
        Scalar::Exact(_) => {
            if tol.is_exact() {
                Ok(tol.clone())
            } else {
                Err(Error::ExactRegimeRequired)
            }
        }
        Scalar::Float(f) => tol.to_float(f.prec()),
    }
}

/// Numeric duality sweep: `Z(k; x)` against `Z(dual(k); x)` for every
/// index and parameter point. At `x = 0` this is q-zeta duality.
pub struct DualityOptions {
    pub indices: Vec<Index>,
    pub grid: Vec<Params>,
    pub cfg: EvalConfig,
    pub tol: Option<Scalar>,
}

pub fn run_duality(opts: &DualityOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("duality");
    for params in &opts.grid {
        for k in &opts.indices {
            let dual = k.dual()?;
            let a = eval_generating(k, params, &opts.cfg)?;
            let b = eval_generating(&dual, params, &opts.cfg)?;
            let dev = a.value.try_sub(&b.value)?.abs();
            let tol = match &opts.tol {
                Some(t) => coerce_tolerance(t, &dev)?,
                None => derived_tolerance(
                    &[&a.tail_estimate, &b.tail_estimate],
                    &[&a.value, &b.value],
                )?,
            };
            let input = format!(
                "k={k} dual={dual} q={} x={}",
                params.q().to_display_string(),
                params.x().to_display_string()
            );
            report.push_case(input, &dev, &tol);
        }
    }
    Ok(report)
}

/// Ohno-sum duality sweep: `S(k; c)` against `S(dual(k); c)` for every
/// index, every elevation `c` up to `c_max`, and every base in `q_list`.
pub struct OhnoOptions {
    pub indices: Vec<Index>,
    pub c_max: u32,
    pub q_list: Vec<Scalar>,
    pub precision: u32,
    /// Per-base default when `None` (see [`default_truncation`]).
    pub truncation: Option<u32>,
    pub tol: Option<Scalar>,
}

pub fn run_ohno(opts: &OhnoOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("ohno");
    for q in &opts.q_list {
        let truncation = opts.truncation.unwrap_or_else(|| default_truncation(q));
        let cfg = EvalConfig::float(truncation, opts.precision);
        for k in &opts.indices {
            let dual = k.dual()?;
            for c in 0..=opts.c_max {
                let a = eval_ohno_sum(k, c, q, &cfg)?;
                let b = eval_ohno_sum(&dual, c, q, &cfg)?;
                let dev = a.value.try_sub(&b.value)?.abs();
                let tol = match &opts.tol {
                    Some(t) => coerce_tolerance(t, &dev)?,
                    None => derived_tolerance(
                        &[&a.tail_estimate, &b.tail_estimate],
                        &[&a.value, &b.value],
                    )?,
                };
                let input = format!("k={k} c={c} q={}", q.to_display_string());
                report.push_case(input, &dev, &tol);
            }
        }
    }
    Ok(report)
}

/// Exact telescoping sweep over a parameter grid and window offsets.
pub struct TelescopeOptions {
    pub grid: Vec<Params>,
    pub m_max: u32,
    pub n_max: u32,
    pub a_max: u32,
}

pub fn run_telescope(opts: &TelescopeOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("telescope");
    let zero = Scalar::integer(0);
    for params in &opts.grid {
        for m in 0..=opts.m_max {
            for n in 1..=opts.n_max {
                let chk = check_telescoping(m, n, params, opts.a_max)?;
                let mut worst = chk.partial_sum_residual.abs();
                for r in &chk.per_term_residuals {
                    let a = r.abs();
                    if a > worst {
                        worst = a;
                    }
                }
                let input = format!(
                    "q={} x={} m={m} n={n} a_max={}",
                    params.q().to_display_string(),
                    params.x().to_display_string(),
                    opts.a_max
                );
                report.push_case(input, &worst, &zero);
            }
        }
    }
    Ok(report)
}

/// Sum-formula sweep: for each weight (and optionally one depth), the sum
/// of `zeta_q` over all admissible indices of that shape against
/// `zeta_q(w)`.
pub struct SumFormulaOptions {
    pub weights: Vec<u32>,
    /// All depths `1..w` when `None`.
    pub depth: Option<u32>,
    pub q: Scalar,
    pub cfg: EvalConfig,
    pub tol: Option<Scalar>,
}

pub fn run_sum_formula(opts: &SumFormulaOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("sumformula");
    for &w in &opts.weights {
        let depths: Vec<u32> = match opts.depth {
            Some(d) => vec![d],
            None => (1..w).collect(),
        };
        for d in depths {
            let family = enumerate_admissible(w, Some(d));
            if family.is_empty() {
                continue;
            }
            let target = eval_qmzv(&Index::new(vec![w])?, &opts.q, &opts.cfg)?;
            let mut total: Option<Scalar> = None;
            let mut tails = vec![target.tail_estimate.clone()];
            for k in &family {
                let r = eval_qmzv(k, &opts.q, &opts.cfg)?;
                total = Some(match total {
                    None => r.value.clone(),
                    Some(t) => t.try_add(&r.value)?,
                });
                tails.push(r.tail_estimate);
            }
            let total = total.expect("family checked non-empty");
            let dev = total.try_sub(&target.value)?.abs();
            let tol = match &opts.tol {
                Some(t) => coerce_tolerance(t, &dev)?,
                None => derived_tolerance(
                    &tails.iter().collect::<Vec<_>>(),
                    &[&total, &target.value],
                )?,
            };
            let input = format!("w={w} d={d} q={}", opts.q.to_display_string());
            report.push_case(input, &dev, &tol);
        }
    }
    Ok(report)
}

/// Indices for a duality-style sweep: all admissible indices of weight
/// `2..=max_weight`, deduplicated so each dual pair appears once (the
/// lexicographically smaller member represents the pair).
pub fn duality_sweep_indices(max_weight: u32) -> Vec<Index> {
    let mut out = Vec::new();
    for w in 2..=max_weight {
        for k in enumerate_admissible(w, None) {
            let dual = k.dual().expect("enumerated indices are admissible");
            if k <= dual {
                out.push(k);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Regime;

    #[test]
    fn sweep_indices_cover_pairs_once() {
        let indices = duality_sweep_indices(6);
        // Self-dual indices count once, others once per pair: weights
        // 2..=6 hold 1+2+4+8+16 = 31 indices total.
        let mut seen = std::collections::HashSet::new();
        for k in &indices {
            seen.insert(k.clone());
            seen.insert(k.dual().unwrap());
        }
        assert_eq!(seen.len(), 31);
        for k in &indices {
            assert!(k <= &k.dual().unwrap());
        }
    }

    #[test]
    fn duality_suite_geometric_base() {
        // At q = 1/2 the truncation error is geometric; every pair agrees
        // to far inside the derived tolerance.
        let opts = DualityOptions {
            indices: duality_sweep_indices(4),
            grid: vec![Params::from_ratios((1, 2), (0, 1)).unwrap()],
            cfg: EvalConfig::float(200, 128),
            tol: None,
        };
        let report = run_duality(&opts).unwrap();
        assert!(report.all_pass(), "{}", report.render_text());
        assert_eq!(report.cases.len(), opts.indices.len());
    }

    #[test]
    fn ohno_suite_geometric_base() {
        let opts = OhnoOptions {
            indices: vec![Index::new(vec![1, 2]).unwrap(), Index::new(vec![2]).unwrap()],
            c_max: 3,
            q_list: vec![Scalar::ratio(1, 2).unwrap()],
            precision: 128,
            truncation: None,
            tol: None,
        };
        let report = run_ohno(&opts).unwrap();
        assert!(report.all_pass(), "{}", report.render_text());
        assert_eq!(report.cases.len(), 8);
    }

    #[test]
    fn telescope_suite_exact() {
        let opts = TelescopeOptions {
            grid: vec![
                Params::from_ratios((1, 1), (0, 1)).unwrap(),
                Params::from_ratios((1, 2), (1, 3)).unwrap(),
            ],
            m_max: 2,
            n_max: 2,
            a_max: 10,
        };
        let report = run_telescope(&opts).unwrap();
        assert!(report.all_pass(), "{}", report.render_text());
        assert_eq!(report.cases.len(), 2 * 3 * 2);
        for c in &report.cases {
            assert_eq!(c.deviation, "0");
        }
    }

    #[test]
    fn sum_formula_suite_geometric_base() {
        let opts = SumFormulaOptions {
            weights: vec![3, 4],
            depth: None,
            q: Scalar::ratio(1, 2).unwrap(),
            cfg: EvalConfig::float(200, 128),
            tol: None,
        };
        let report = run_sum_formula(&opts).unwrap();
        assert!(report.all_pass(), "{}", report.render_text());
        // w=3: d in {1,2}; w=4: d in {1,2,3}.
        assert_eq!(report.cases.len(), 5);
    }

    #[test]
    fn report_json_roundtrip() {
        let opts = TelescopeOptions {
            grid: vec![Params::from_ratios((1, 2), (0, 1)).unwrap()],
            m_max: 0,
            n_max: 1,
            a_max: 5,
        };
        let report = run_telescope(&opts).unwrap();
        let json = report.to_json();
        let back: SuiteReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn fixed_tolerance_flows_through() {
        // An absurdly tight fixed tolerance turns honest truncation gaps
        // into failures; the report must say so rather than pass silently.
        let opts = DualityOptions {
            indices: vec![Index::new(vec![1, 2]).unwrap()],
            grid: vec![Params::from_ratios((1, 1), (0, 1)).unwrap()],
            cfg: EvalConfig::float(100, 64),
            tol: Some(Scalar::parse("1e-30", Regime::Float, 64).unwrap()),
        };
        let report = run_duality(&opts).unwrap();
        assert!(!report.all_pass());
        assert_eq!(report.failed, 1);
    }
}
