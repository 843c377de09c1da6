//! Separation over the dual side of the configuration program.
//!
//! The cutting loop in [`crate::glb`] works with restricted column sets, so
//! infeasibility of a restricted program proves nothing by itself: the Farkas
//! multipliers it produces might be beaten by a configuration that was never
//! priced. [`separate`] settles that question for a dual candidate. It either
//! exhibits a configuration whose constraint the candidate violates (the
//! column to add), or certifies the candidate — after halving its per-job
//! values — against *every* configuration at coverage level 1 and load
//! cut-off 1, which rejects the profile guess outright.
//!
//! Candidate configurations come from a selection subproblem per machine:
//! given per-job values, find the cheapest job set (by that machine's inner
//! norm) whose values sum to at least a target. Scanning a doubling grid of
//! targets anchored at each distinct per-job value is enough, because halving
//! the per-job values on certification absorbs the factor a grid step can
//! lose. The subproblem itself runs either exactly (subset enumeration) or
//! through the polynomial approximation scheme in [`crate::normlin`].

use std::collections::HashSet;

use rayon::prelude::*;

use crate::exact::{solve_normlin_exact, ExactCaps};
use crate::glb::ProfileGuess;
use crate::instance::ScaledInstance;
use crate::normlin::{solve_ptas, NormLinInstance};
use crate::{tol, Error, Result};

/// A candidate for the dual of the configuration program: multipliers for the
/// per-position growth rows (`r`), the expensive-column row (`s`), the
/// total-mass row (`t`), the per-machine rows (`y`) and the per-job coverage
/// rows (`z`). All entries are nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    pub r: Vec<f64>,
    pub s: f64,
    pub t: f64,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

/// How [`separate`] solves its per-machine selection subproblems.
#[derive(Debug, Clone)]
pub enum NormLinStrategy {
    /// Enumerate all subsets of the eligible jobs. Exact, exponential.
    Exact { caps: ExactCaps },
    /// The approximation scheme: polynomial, returns a set whose cost is
    /// within `1 + 11 * epsilon` of the cheapest. Violations it reports are
    /// always genuine (the constraint is re-checked on the true loads), but a
    /// certificate obtained through it leans on the scheme having looked at a
    /// near-cheapest set, so the certified guarantee degrades with `epsilon`.
    Ptas { epsilon: f64, budget: Option<u64> },
}

impl Default for NormLinStrategy {
    fn default() -> Self {
        NormLinStrategy::Exact { caps: ExactCaps::default() }
    }
}

impl NormLinStrategy {
    /// Exact up to the default subset budget (`2^22` subsets, so 22 jobs),
    /// the approximation scheme beyond it.
    pub fn default_for(n: usize) -> Self {
        if n <= 22 {
            NormLinStrategy::Exact { caps: ExactCaps::default() }
        } else {
            NormLinStrategy::Ptas { epsilon: 0.5, budget: None }
        }
    }
}

#[derive(Debug, Clone)]
pub enum SeparationResult {
    /// The candidate already fails the normalization inequality; its scaled-up
    /// multiples fail every stronger one, so no column search is needed.
    ViolatedNormalization { value: f64 },
    /// A configuration whose dual constraint the candidate violates by
    /// `margin` (the amount by which the constraint's left side falls below
    /// `-y[machine]`).
    ViolatedColumn { machine: usize, jobs: Vec<usize>, margin: f64 },
    /// No candidate configuration is violated. The returned point is the
    /// input with `z` halved; it satisfies every configuration constraint at
    /// coverage level 1 and load cut-off 1, plus the matching normalization.
    Certified(DualPoint),
}

fn validate_dual_point(
    dp: &DualPoint,
    inst: &ScaledInstance,
    guess: &ProfileGuess,
) -> Result<()> {
    let raw = inst.instance();
    if guess.machines() != raw.machines() || guess.jobs() != raw.jobs() {
        return Err(Error::ShapeMismatch(format!(
            "profile is for {} machines / {} jobs, instance has {} / {}",
            guess.machines(),
            guess.jobs(),
            raw.machines(),
            raw.jobs()
        )));
    }
    if dp.r.len() != guess.pos().len() {
        return Err(Error::ShapeMismatch(format!(
            "{} growth multipliers for {} positions",
            dp.r.len(),
            guess.pos().len()
        )));
    }
    if dp.y.len() != raw.machines() {
        return Err(Error::ShapeMismatch(format!(
            "{} machine multipliers for {} machines",
            dp.y.len(),
            raw.machines()
        )));
    }
    if dp.z.len() != raw.jobs() {
        return Err(Error::ShapeMismatch(format!(
            "{} job multipliers for {} jobs",
            dp.z.len(),
            raw.jobs()
        )));
    }
    let all = dp
        .r
        .iter()
        .chain(dp.y.iter())
        .chain(dp.z.iter())
        .chain([&dp.s, &dp.t]);
    for &v in all {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidVector(format!(
                "dual multipliers must be finite and nonnegative, got {v}"
            )));
        }
    }
    Ok(())
}

/// Left side of the dual normalization at coverage level `lambda`:
/// `lambda * sum(z) - sum_k headroom_k * r_k - sum(y) - n * t`, where
/// `headroom_k` is the profile's slack at position `k` (the sum of its `k`
/// largest expanded entries minus `k` times the entry at `k`).
pub fn normalization_value(dp: &DualPoint, guess: &ProfileGuess, lambda: f64) -> f64 {
    let prefix = guess.expansion_prefix();
    let mut value = lambda * dp.z.iter().sum::<f64>();
    for (slot, &k) in guess.pos().elements().iter().enumerate() {
        value -= (prefix[k] - k as f64 * guess.rho(slot)) * dp.r[slot];
    }
    value -= dp.y.iter().sum::<f64>();
    value -= guess.jobs() as f64 * dp.t;
    value
}

/// Whether the candidate meets the normalization (value at least 1, within
/// tolerance).
pub fn check_normalization(dp: &DualPoint, guess: &ProfileGuess, lambda: f64) -> bool {
    normalization_value(dp, guess, lambda) >= 1.0 - tol::ZERO
}

/// Left side of the dual constraint of configuration `(machine, jobs)` at
/// load cut-off `tau`:
///
/// `s * [load > tau] + t + sum_k (round_up(load / tau) - rho_k)^+ r_k -
/// sum_{j in jobs} z_j`.
///
/// The constraint itself reads `column_rhs >= -y[machine]`. Errors if some
/// job in the set is forbidden on the machine.
pub fn column_rhs(
    dp: &DualPoint,
    inst: &ScaledInstance,
    guess: &ProfileGuess,
    machine: usize,
    jobs: &[usize],
    tau: f64,
) -> Result<f64> {
    validate_dual_point(dp, inst, guess)?;
    let raw = inst.instance();
    if machine >= raw.machines() {
        return Err(Error::InvalidVector(format!("machine index {} out of range", machine + 1)));
    }
    let row = raw.restricted_row(machine, jobs)?;
    let load = raw.inner_norm(machine).eval(&row)?;
    let indicator = if load > tau + 1e-12 { 1.0 } else { 0.0 };
    let rounded = guess.round_up(load / tau);
    let mut value = dp.s * indicator + dp.t;
    for slot in 0..guess.pos().len() {
        value += (rounded - guess.rho(slot)).max(0.0) * dp.r[slot];
    }
    for &j in jobs {
        value -= dp.z[j];
    }
    Ok(value)
}

/// Separates the dual candidate over all configurations at coverage level
/// `1/2` and load cut-off `3/2`, or certifies it (with `z` halved) at
/// coverage level 1 and cut-off 1.
///
/// Candidates are scanned machine by machine: the empty configuration first,
/// then, per distinct positive job value on that machine (an *anchor*), the
/// cheapest eligible job sets reaching each target on the anchor's doubling
/// grid. Eligible for an anchor means allowed on the machine with a job value
/// no larger than the anchor's; the grid runs until targets exceed the total
/// eligible value. The first violated candidate in this fixed order is
/// returned, so the outcome is deterministic even though the subproblems run
/// in parallel.
pub fn separate(
    dp: &DualPoint,
    inst: &ScaledInstance,
    guess: &ProfileGuess,
    strategy: &NormLinStrategy,
) -> Result<SeparationResult> {
    validate_dual_point(dp, inst, guess)?;
    let lambda = 0.5;
    let tau = 1.5;
    let value = normalization_value(dp, guess, lambda);
    if value < 1.0 - tol::ZERO {
        return Ok(SeparationResult::ViolatedNormalization { value });
    }

    let raw = inst.instance();
    let m = raw.machines();
    let n = raw.jobs();
    // Levels 0..=L with 2^L >= n: the top target then covers any eligible sum.
    let levels = (n as u64).next_power_of_two().trailing_zeros() as usize;

    // One task per (machine, anchor job); anchors with equal value on the
    // same machine pose identical subproblems, so only the lowest job index
    // of each value is kept.
    let mut tasks: Vec<(usize, usize)> = Vec::new();
    for i in 0..m {
        let mut seen = HashSet::new();
        for j in 0..n {
            if raw.allowed(i, j) && dp.z[j] > 0.0 && seen.insert(dp.z[j].to_bits()) {
                tasks.push((i, j));
            }
        }
    }

    let solved: Vec<Vec<Vec<usize>>> = tasks
        .par_iter()
        .map(|&(i, anchor)| -> Result<Vec<Vec<usize>>> {
            let eligible: Vec<usize> =
                (0..n).filter(|&j| raw.allowed(i, j) && dp.z[j] <= dp.z[anchor]).collect();
            let p: Vec<f64> =
                eligible.iter().map(|&j| raw.processing(i, j).expect("eligible is allowed")).collect();
            let z: Vec<f64> = eligible.iter().map(|&j| dp.z[j]).collect();
            let psi = raw.inner_norm(i);
            let mut candidates = Vec::new();
            for level in 0..=levels {
                let target = dp.z[anchor] * (1u64 << level) as f64;
                let items = match strategy {
                    NormLinStrategy::Exact { caps } => {
                        match solve_normlin_exact(&p, &z, target, psi, *caps)? {
                            Some(choice) => choice.items,
                            // Targets only grow along the grid.
                            None => break,
                        }
                    }
                    NormLinStrategy::Ptas { epsilon, budget } => {
                        let sub =
                            NormLinInstance::new(p.clone(), z.clone(), target, psi.clone(), *epsilon)?;
                        if sub.infeasible() {
                            break;
                        }
                        solve_ptas(&sub, *budget)?.items
                    }
                };
                let mut jobs: Vec<usize> = items.into_iter().map(|loc| eligible[loc]).collect();
                jobs.sort_unstable();
                candidates.push(jobs);
            }
            Ok(candidates)
        })
        .collect::<Result<_>>()?;

    let mut dedup: HashSet<(usize, Vec<usize>)> = HashSet::new();
    let mut candidates: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut task_idx = 0usize;
    for i in 0..m {
        candidates.push((i, Vec::new()));
        while task_idx < tasks.len() && tasks[task_idx].0 == i {
            for jobs in &solved[task_idx] {
                if dedup.insert((i, jobs.clone())) {
                    candidates.push((i, jobs.clone()));
                }
            }
            task_idx += 1;
        }
    }

    for (machine, jobs) in candidates {
        let rhs = column_rhs(dp, inst, guess, machine, &jobs, tau)?;
        if rhs < -dp.y[machine] - tol::ZERO {
            return Ok(SeparationResult::ViolatedColumn {
                machine,
                jobs,
                margin: -dp.y[machine] - rhs,
            });
        }
    }

    let certified = DualPoint {
        r: dp.r.clone(),
        s: dp.s,
        t: dp.t,
        y: dp.y.clone(),
        z: dp.z.iter().map(|v| v / 2.0).collect(),
    };
    Ok(SeparationResult::Certified(certified))
}

/// Checks every configuration constraint at coverage level 1 and load cut-off
/// 1 by brute force: for each machine, all subsets of its allowed jobs
/// (including the empty one) must satisfy `column_rhs >= -y[machine]` within
/// tolerance. The normalization is deliberately not part of this check.
///
/// Only for small instances — the work is `sum_i 2^(allowed jobs of i)`.
pub fn verify_certificate_small(
    dp: &DualPoint,
    inst: &ScaledInstance,
    guess: &ProfileGuess,
) -> Result<bool> {
    validate_dual_point(dp, inst, guess)?;
    let raw = inst.instance();
    let m = raw.machines();
    let n = raw.jobs();
    if n > 20 || (m as u64) << n > 1 << 22 {
        return Err(Error::CapExceeded(format!(
            "brute-force certificate check needs m * 2^n = {m} * 2^{n} column evaluations"
        )));
    }
    for i in 0..m {
        let allowed = raw.allowed_jobs(i);
        for pick in 0u64..(1u64 << allowed.len()) {
            let jobs: Vec<usize> = allowed
                .iter()
                .enumerate()
                .filter(|&(b, _)| pick >> b & 1 == 1)
                .map(|(_, &j)| j)
                .collect();
            let rhs = column_rhs(dp, inst, guess, i, &jobs, 1.0)?;
            if rhs < -dp.y[i] - tol::FEASIBILITY {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_random, normalize, Instance, NormProfile};
    use crate::normlin::Pos;
    use crate::norms::NormSpec;
    use crate::glb::enumerate_profiles;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square_instance() -> ScaledInstance {
        let inst = Instance::from_parts(
            vec![
                vec![Some(1.0), Some(2.0)],
                vec![Some(3.0), Some(4.0)],
            ],
            vec![NormSpec::l1(), NormSpec::l1()],
            NormSpec::linf(),
        )
        .unwrap();
        normalize(&inst, 0, 0).unwrap()
    }

    fn square_guess() -> ProfileGuess {
        ProfileGuess::new(Pos::powers_of_two(2), vec![0, -1], 2).unwrap()
    }

    fn zeros(slots: usize, m: usize, n: usize) -> DualPoint {
        DualPoint { r: vec![0.0; slots], s: 0.0, t: 0.0, y: vec![0.0; m], z: vec![0.0; n] }
    }

    #[test]
    fn normalization_value_examples() {
        let guess = square_guess();
        let n = 2usize;
        let lambda = 0.5;
        // Uniform z summing against lambda only.
        let mut dp = zeros(2, 2, n);
        dp.z = vec![4.0 / (lambda * n as f64); n];
        assert!((normalization_value(&dp, &guess, lambda) - 4.0).abs() < 1e-12);
        dp.z.iter_mut().for_each(|v| *v *= 2.0);
        assert!((normalization_value(&dp, &guess, lambda) - 8.0).abs() < 1e-12);

        // Growth multipliers charge the profile headroom: expansion (1, 1/2),
        // headroom at position 1 is 0, at position 2 it is 1.5 - 1 = 0.5.
        dp.r = vec![3.0, 2.0];
        assert!((normalization_value(&dp, &guess, lambda) - (8.0 - 0.5 * 2.0)).abs() < 1e-12);

        // Machine and total-mass multipliers subtract directly.
        dp.y = vec![1.0, 0.25];
        dp.t = 0.5;
        let expected = 8.0 - 1.0 - 1.25 - 2.0 * 0.5;
        assert!((normalization_value(&dp, &guess, lambda) - expected).abs() < 1e-12);

        assert!(check_normalization(&dp, &guess, lambda));
        dp.z = vec![0.9 / lambda, 0.0];
        dp.r = vec![0.0, 0.0];
        dp.y = vec![0.0, 0.0];
        dp.t = 0.0;
        assert!(!check_normalization(&dp, &guess, lambda)); // value 0.9
    }

    #[test]
    fn empty_configuration_prices_to_exactly_t() {
        let scaled = square_instance();
        let guess = square_guess();
        let dp = DualPoint {
            r: vec![2.5, 0.75],
            s: 0.3,
            t: 0.7,
            y: vec![0.1, 0.2],
            z: vec![1.0, 2.0],
        };
        for machine in 0..2 {
            let rhs = column_rhs(&dp, &scaled, &guess, machine, &[], 1.5).unwrap();
            assert_eq!(rhs, 0.7);
        }
    }

    #[test]
    fn column_rhs_rejects_forbidden_pairs_and_bad_shapes() {
        let inst = Instance::from_parts(
            vec![
                vec![Some(1.0), None],
                vec![Some(2.0), Some(2.0)],
            ],
            vec![NormSpec::l1(), NormSpec::l1()],
            NormSpec::l1(),
        )
        .unwrap();
        let scaled = normalize(&inst, 0, 0).unwrap();
        let guess = square_guess();
        let dp = zeros(2, 2, 2);
        assert!(matches!(
            column_rhs(&dp, &scaled, &guess, 0, &[1], 1.5),
            Err(Error::InvalidAssignment(_))
        ));

        let mut short = dp.clone();
        short.r = vec![0.0];
        assert!(matches!(
            column_rhs(&short, &scaled, &guess, 0, &[0], 1.5),
            Err(Error::ShapeMismatch(_))
        ));
        let mut negative = dp.clone();
        negative.z[1] = -0.5;
        assert!(matches!(
            column_rhs(&negative, &scaled, &guess, 0, &[0], 1.5),
            Err(Error::InvalidVector(_))
        ));
    }

    #[test]
    fn all_zero_candidate_fails_the_normalization_first() {
        let scaled = square_instance();
        let guess = square_guess();
        let dp = zeros(2, 2, 2);
        match separate(&dp, &scaled, &guess, &NormLinStrategy::default()).unwrap() {
            SeparationResult::ViolatedNormalization { value } => assert_eq!(value, 0.0),
            other => panic!("expected a normalization violation, got {other:?}"),
        }
    }

    #[test]
    fn planted_heavy_job_value_is_separated_with_a_verifiable_margin() {
        let scaled = square_instance();
        let guess = square_guess();
        let mut dp = zeros(2, 2, 2);
        dp.z[0] = 100.0;
        match separate(&dp, &scaled, &guess, &NormLinStrategy::default()).unwrap() {
            SeparationResult::ViolatedColumn { machine, jobs, margin } => {
                // Machine 0 is scanned first; the cheapest set reaching the
                // anchor target 100 is job 0 alone.
                assert_eq!(machine, 0);
                assert_eq!(jobs, vec![0]);
                let rhs = column_rhs(&dp, &scaled, &guess, machine, &jobs, 1.5).unwrap();
                assert!(rhs < -dp.y[machine] - tol::ZERO);
                assert!((margin - (-dp.y[machine] - rhs)).abs() < 1e-12);
                assert!((margin - 100.0).abs() < 1e-9);
            }
            other => panic!("expected a violated column, got {other:?}"),
        }
    }

    #[test]
    fn approximation_strategy_finds_the_planted_violation_too() {
        let scaled = square_instance();
        let guess = square_guess();
        let mut dp = zeros(2, 2, 2);
        dp.z[0] = 100.0;
        let strategy = NormLinStrategy::Ptas { epsilon: 0.5, budget: None };
        match separate(&dp, &scaled, &guess, &strategy).unwrap() {
            SeparationResult::ViolatedColumn { machine, jobs, margin } => {
                assert_eq!(machine, 0);
                assert!(jobs.contains(&0));
                let rhs = column_rhs(&dp, &scaled, &guess, machine, &jobs, 1.5).unwrap();
                assert!((margin - (-dp.y[machine] - rhs)).abs() < 1e-12);
                assert!(margin > 90.0);
            }
            other => panic!("expected a violated column, got {other:?}"),
        }
    }

    #[test]
    fn certified_point_on_a_single_pair_instance() {
        let inst = Instance::from_parts(
            vec![vec![Some(1.0)]],
            vec![NormSpec::l1()],
            NormSpec::l1(),
        )
        .unwrap();
        let scaled = normalize(&inst, 0, 0).unwrap();
        let guess = ProfileGuess::new(Pos::powers_of_two(1), vec![-1], 1).unwrap();
        let dp = DualPoint { r: vec![4.0], s: 0.0, t: 0.0, y: vec![0.0], z: vec![2.0] };
        assert!(check_normalization(&dp, &guess, 0.5));

        match separate(&dp, &scaled, &guess, &NormLinStrategy::default()).unwrap() {
            SeparationResult::Certified(pt) => {
                assert_eq!(
                    pt,
                    DualPoint { r: vec![4.0], s: 0.0, t: 0.0, y: vec![0.0], z: vec![1.0] }
                );
                assert!(check_normalization(&pt, &guess, 1.0));
                assert!(verify_certificate_small(&pt, &scaled, &guess).unwrap());
            }
            other => panic!("expected a certificate, got {other:?}"),
        }
    }

    #[test]
    fn brute_force_check_accepts_the_zero_point_and_enforces_its_cap() {
        let scaled = square_instance();
        let guess = square_guess();
        assert!(verify_certificate_small(&zeros(2, 2, 2), &scaled, &guess).unwrap());

        let wide = Instance::from_parts(
            vec![vec![Some(1.0); 21]],
            vec![NormSpec::l1()],
            NormSpec::l1(),
        )
        .unwrap();
        let wide_scaled = normalize(&wide, 0, 0).unwrap();
        let wide_guess = ProfileGuess::new(Pos::powers_of_two(1), vec![0], 21).unwrap();
        assert!(matches!(
            verify_certificate_small(&zeros(1, 1, 21), &wide_scaled, &wide_guess),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn random_candidates_separate_soundly() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        let mut violated = 0usize;
        let mut certified = 0usize;
        for trial in 0..40u64 {
            let m = 1 + (trial as usize % 3);
            let n = 1 + (trial as usize % 3);
            let inst = gen_random(m, n, 7000 + trial, (0.3, 2.5), 0.15, NormProfile::Mixed)
                .unwrap();
            let (i0, j0) = (0..m)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .find(|&(i, j)| inst.allowed(i, j))
                .unwrap();
            let scaled = normalize(&inst, i0, j0).unwrap();
            let stream = enumerate_profiles(m, n);
            let guess = stream[trial as usize % stream.len()].clone();

            let mut dp = DualPoint {
                r: (0..guess.pos().len()).map(|_| rng.gen_range(0.0..1.5)).collect(),
                s: rng.gen_range(0.0..1.0),
                t: rng.gen_range(0.0..0.3),
                y: (0..m).map(|_| rng.gen_range(0.0..0.5)).collect(),
                z: (0..n).map(|_| rng.gen_range(0.0..2.0)).collect(),
            };
            let value = normalization_value(&dp, &guess, 0.5);
            if value < 1.0 {
                let bump = (1.2 - value) / (0.5 * n as f64);
                dp.z.iter_mut().for_each(|v| *v += bump);
            }

            match separate(&dp, &scaled, &guess, &NormLinStrategy::default()).unwrap() {
                SeparationResult::ViolatedNormalization { value } => {
                    panic!("bumped candidate failed the normalization: {value}")
                }
                SeparationResult::ViolatedColumn { machine, jobs, margin } => {
                    violated += 1;
                    let rhs = column_rhs(&dp, &scaled, &guess, machine, &jobs, 1.5).unwrap();
                    assert!(rhs < -dp.y[machine] - tol::ZERO, "trial {trial}");
                    assert!((margin - (-dp.y[machine] - rhs)).abs() < 1e-9, "trial {trial}");
                }
                SeparationResult::Certified(pt) => {
                    certified += 1;
                    assert!(check_normalization(&pt, &guess, 1.0), "trial {trial}");
                    assert!(
                        verify_certificate_small(&pt, &scaled, &guess).unwrap(),
                        "trial {trial}"
                    );
                }
            }
        }
        assert!(violated > 0, "random candidates never produced a violation");
        let _ = certified; // certificates are exercised by the dedicated tests
    }

    #[test]
    fn strategy_defaults_switch_at_the_subset_budget() {
        assert!(matches!(NormLinStrategy::default_for(22), NormLinStrategy::Exact { .. }));
        match NormLinStrategy::default_for(23) {
            NormLinStrategy::Ptas { epsilon, budget } => {
                assert_eq!(epsilon, 0.5);
                assert!(budget.is_none());
            }
            other => panic!("expected the approximation scheme, got {other:?}"),
        }
    }
}
