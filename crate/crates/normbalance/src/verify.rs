//! Randomized self-checks for the norm layer.
//!
//! The checks live in the library (rather than only in `#[cfg(test)]`) so the
//! CLI `verify` subcommand and the test suites share one implementation. All
//! suites draw from a seeded generator and report failure counts instead of
//! panicking, which also lets a test inject a deliberately broken evaluator
//! and confirm the suites catch it.

use crate::norms::{self, NormSpec, SortedVector};
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Evaluation hook: the suites score norms through this so tests can swap in
/// a tampered implementation.
pub trait NormEval {
    fn eval(&self, spec: &NormSpec, u: &[f64]) -> Result<f64>;
}

/// The real evaluator.
pub struct DefaultEval;

impl NormEval for DefaultEval {
    fn eval(&self, spec: &NormSpec, u: &[f64]) -> Result<f64> {
        spec.eval(u)
    }
}

/// Outcome of one property suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    /// Human-readable detail for the first failing trial, if any.
    pub first_failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport { name, trials: 0, failures: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }
}

/// A random vector with entries in `[0, hi)`, occasionally sparse.
pub fn random_vec(rng: &mut impl Rng, dim: usize, hi: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            if rng.gen_bool(0.2) {
                0.0
            } else {
                rng.gen_range(0.0..hi)
            }
        })
        .collect()
}

/// A random member of the norm family. `depth` bounds combinator nesting.
pub fn random_norm_spec(rng: &mut impl Rng, max_dim: usize, depth: usize) -> NormSpec {
    let top = if depth == 0 { 5 } else { 7 };
    match rng.gen_range(0..top) {
        0 => NormSpec::l1(),
        1 => NormSpec::linf(),
        2 => NormSpec::lp(rng.gen_range(1.0..4.0)).unwrap(),
        3 => NormSpec::topk(rng.gen_range(1..=max_dim.max(1))).unwrap(),
        4 => {
            let len = rng.gen_range(1..=max_dim.max(1));
            let mut w: Vec<f64> = (0..len).map(|_| rng.gen_range(0.1..3.0)).collect();
            w.sort_by(|a, b| b.partial_cmp(a).unwrap());
            NormSpec::ordered(w).unwrap()
        }
        5 => NormSpec::scaled(
            rng.gen_range(0.25..4.0),
            random_norm_spec(rng, max_dim, depth - 1),
        )
        .unwrap(),
        _ => {
            let count = rng.gen_range(2..=3);
            NormSpec::max_of(
                (0..count)
                    .map(|_| random_norm_spec(rng, max_dim, depth - 1))
                    .collect(),
            )
            .unwrap()
        }
    }
}

/// `Top_k` versus its threshold form: equality at `t = u↓_k` and a grid scan
/// that includes every entry value (minima of the convex piecewise-linear
/// threshold form sit at entry breakpoints, so the scan is an honest oracle).
pub fn suite_topk_identity(trials: usize, seed: u64, eval: &dyn NormEval) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("topk-identity");
    for _ in 0..trials {
        let dim = rng.gen_range(1..=8);
        let u = random_vec(&mut rng, dim, 10.0);
        let k = rng.gen_range(1..=dim);
        let sorted = SortedVector::from_unsorted(&u);
        let direct = eval.eval(&NormSpec::TopK(k), &u).unwrap_or(f64::NAN);
        let at_kth = norms::top_k_threshold(&u, k, sorted.kth(k));
        let hi = sorted.kth(1).max(1.0);
        let grid_min = (0..=1000)
            .map(|i| hi * i as f64 / 1000.0)
            .chain(u.iter().copied())
            .map(|t| norms::top_k_threshold(&u, k, t))
            .fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * (1.0 + direct.abs());
        let ok = (direct - at_kth).abs() <= tol && (grid_min - direct).abs() <= 1e-6;
        report.record(ok, || {
            format!("u={u:?} k={k}: direct={direct} at_kth={at_kth} grid={grid_min}")
        });
    }
    report
}

/// `Top_k` domination transfers to every norm in the family.
pub fn suite_majorization(trials: usize, seed: u64, eval: &dyn NormEval) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("majorization");
    for _ in 0..trials {
        let dim = rng.gen_range(1..=8);
        let u = random_vec(&mut rng, dim, 10.0);
        let v = random_vec(&mut rng, dim, 10.0);
        let spec = random_norm_spec(&mut rng, dim, 2);
        let alpha = norms::majorization_ratio(&u, &v);
        if !alpha.is_finite() {
            report.record(true, String::new);
            continue;
        }
        let pu = eval.eval(&spec, &u).unwrap_or(f64::NAN);
        let pv = eval.eval(&spec, &v).unwrap_or(f64::NAN);
        let ok = pu <= alpha * pv + 1e-9 * (1.0 + pu.abs());
        report.record(ok, || {
            format!("u={u:?} v={v:?} alpha={alpha}: psi(u)={pu} > alpha*psi(v)={}", alpha * pv)
        });
    }
    report
}

/// Invariance under coordinate permutation.
pub fn suite_permutation(trials: usize, seed: u64, eval: &dyn NormEval) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("permutation-invariance");
    for _ in 0..trials {
        let dim = rng.gen_range(1..=8);
        let u = random_vec(&mut rng, dim, 10.0);
        let spec = random_norm_spec(&mut rng, dim, 2);
        let mut shuffled = u.clone();
        for i in (1..shuffled.len()).rev() {
            let j = rng.gen_range(0..=i);
            shuffled.swap(i, j);
        }
        let a = eval.eval(&spec, &u).unwrap_or(f64::NAN);
        let b = eval.eval(&spec, &shuffled).unwrap_or(f64::NAN);
        let ok = (a - b).abs() <= 1e-9 * (1.0 + a.abs());
        report.record(ok, || format!("u={u:?} shuffled={shuffled:?}: {a} vs {b}"));
    }
    report
}

/// Entrywise domination implies domination of values.
pub fn suite_monotonicity(trials: usize, seed: u64, eval: &dyn NormEval) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("monotonicity");
    for _ in 0..trials {
        let dim = rng.gen_range(1..=8);
        let u = random_vec(&mut rng, dim, 10.0);
        let v: Vec<f64> = u.iter().map(|&x| x + rng.gen_range(0.0..3.0)).collect();
        let spec = random_norm_spec(&mut rng, dim, 2);
        let pu = eval.eval(&spec, &u).unwrap_or(f64::NAN);
        let pv = eval.eval(&spec, &v).unwrap_or(f64::NAN);
        let ok = pu <= pv + 1e-9 * (1.0 + pv.abs());
        report.record(ok, || format!("u={u:?} v={v:?}: psi(u)={pu} > psi(v)={pv}"));
    }
    report
}

/// Subadditivity on nonnegative vectors.
pub fn suite_triangle(trials: usize, seed: u64, eval: &dyn NormEval) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("triangle");
    for _ in 0..trials {
        let dim = rng.gen_range(1..=8);
        let u = random_vec(&mut rng, dim, 10.0);
        let v = random_vec(&mut rng, dim, 10.0);
        let w: Vec<f64> = u.iter().zip(&v).map(|(&a, &b)| a + b).collect();
        let spec = random_norm_spec(&mut rng, dim, 2);
        let pu = eval.eval(&spec, &u).unwrap_or(f64::NAN);
        let pv = eval.eval(&spec, &v).unwrap_or(f64::NAN);
        let pw = eval.eval(&spec, &w).unwrap_or(f64::NAN);
        let ok = pw <= pu + pv + 1e-9 * (1.0 + pw.abs());
        report.record(ok, || format!("psi(u+v)={pw} > psi(u)+psi(v)={}", pu + pv));
    }
    report
}

/// Positive homogeneity.
pub fn suite_homogeneity(trials: usize, seed: u64, eval: &dyn NormEval) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::new("homogeneity");
    for _ in 0..trials {
        let dim = rng.gen_range(1..=8);
        let u = random_vec(&mut rng, dim, 10.0);
        let c = rng.gen_range(0.1..5.0);
        let cu: Vec<f64> = u.iter().map(|&x| c * x).collect();
        let spec = random_norm_spec(&mut rng, dim, 2);
        let a = eval.eval(&spec, &cu).unwrap_or(f64::NAN);
        let b = c * eval.eval(&spec, &u).unwrap_or(f64::NAN);
        let ok = (a - b).abs() <= 1e-9 * (1.0 + a.abs());
        report.record(ok, || format!("c={c} u={u:?}: {a} vs {b}"));
    }
    report
}

/// Runs every suite with distinct derived seeds.
pub fn run_all(trials: usize, seed: u64, eval: &dyn NormEval) -> Vec<SuiteReport> {
    vec![
        suite_topk_identity(trials, seed, eval),
        suite_majorization(trials, seed.wrapping_add(1), eval),
        suite_permutation(trials, seed.wrapping_add(2), eval),
        suite_monotonicity(trials, seed.wrapping_add(3), eval),
        suite_triangle(trials, seed.wrapping_add(4), eval),
        suite_homogeneity(trials, seed.wrapping_add(5), eval),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_on_real_evaluator() {
        for report in run_all(300, 7, &DefaultEval) {
            assert_eq!(
                report.failures, 0,
                "suite {} failed: {:?}",
                report.name, report.first_failure
            );
            assert_eq!(report.trials, 300);
        }
    }

    #[test]
    fn suites_are_deterministic_for_fixed_seed() {
        let a = suite_majorization(50, 99, &DefaultEval);
        let b = suite_majorization(50, 99, &DefaultEval);
        assert_eq!(a.trials, b.trials);
        assert_eq!(a.failures, b.failures);
    }

    /// A broken Top_k (drops the smallest of the k entries) must be caught.
    struct Tampered;

    impl NormEval for Tampered {
        fn eval(&self, spec: &NormSpec, u: &[f64]) -> crate::Result<f64> {
            if let NormSpec::TopK(k) = spec {
                if *k > 1 && !u.is_empty() {
                    return Ok(crate::norms::top_k(u, k - 1));
                }
            }
            spec.eval(u)
        }
    }

    #[test]
    fn tampered_evaluator_is_detected() {
        let report = suite_topk_identity(400, 3, &Tampered);
        assert!(report.failures > 0, "canary not detected");
    }
}
