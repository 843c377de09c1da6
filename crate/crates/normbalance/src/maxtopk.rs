//! Deterministic approximation for instances whose machine loads are
//! top-k sums and whose objective is the worst machine.
//!
//! The solver guesses the shape of an optimal solution's job-size profile:
//! for a sparse set of positions it guesses powers of `1+eps` standing in for
//! the k-th largest job size any relevant machine receives. Each machine's
//! top-k index is first reduced to the nearest position at or below it, which
//! costs at most a `1+eps` factor. For a fixed guess, a small linear program
//! minimizes the worst per-machine *excess* over the guessed threshold, and
//! its fractional assignment is rounded with the classic machine-copy
//! technique: every machine is split into unit-capacity copies, jobs are
//! poured in by non-increasing size, and an integral matching of jobs to
//! copies is read off a vertex of the bipartite matching polytope. The best
//! assignment over all guesses is within `3 + 7 eps` of optimal.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::instance::{objective, Assignment, Instance};
use crate::lp::{self, LinearProgram, LpOutcome, Relation};
use crate::normlin::{round_up_exponents, Pos};
use crate::norms::NormSpec;
use crate::{tol, Error, Result};

const WRONG_SHAPE: &str = "instance is not GLB-MaxTopK";

fn validate_epsilon(epsilon: f64) -> Result<()> {
    if !epsilon.is_finite() || epsilon <= 0.0 || epsilon > 0.5 {
        return Err(Error::InvalidInstance(format!(
            "epsilon must lie in (0, 1/2], got {epsilon}"
        )));
    }
    Ok(())
}

/// Per-machine top-k indices, clamped to the job count (a top-k sum over at
/// most `n` entries never sees indices beyond `n`). Errors unless every inner
/// norm is a top-k sum and the outer norm is the maximum.
fn topk_indices(inst: &Instance) -> Result<Vec<usize>> {
    if !matches!(inst.outer_norm(), NormSpec::Linf) {
        return Err(Error::InvalidInstance(WRONG_SHAPE.into()));
    }
    inst.inner_norms()
        .iter()
        .map(|s| match s {
            NormSpec::TopK(k) => Ok((*k).min(inst.jobs())),
            _ => Err(Error::InvalidInstance(WRONG_SHAPE.into())),
        })
        .collect()
}

/// The nearest position at or below `k`: `k` itself when it belongs to the
/// set, otherwise the largest member below it. The result `k'` satisfies
/// `k' <= k < (1+eps) k'` by the geometric gaps of the position set.
pub fn reduce_k(k: usize, pos: &Pos) -> usize {
    assert!(k >= 1 && k <= pos.dimension(), "index {k} out of range");
    if pos.contains(k) {
        k
    } else {
        pos.prev(k)
    }
}

/// One guessed profile: a non-increasing vector of integer powers of
/// `1 + epsilon` over the position set, anchored at a guessed largest job
/// size `o1`. Entry values below `eps * o1 / n` are pinned to that floor
/// (rounded up to a power), so only `(n/eps)^O(1/eps)` vectors exist per
/// anchor.
#[derive(Debug, Clone)]
pub struct MaxTopKGuess {
    epsilon: f64,
    pos: Pos,
    k_prime: Vec<usize>,
    o1_candidate: f64,
    exponents: Vec<i64>,
}

impl MaxTopKGuess {
    pub fn new(
        epsilon: f64,
        pos: Pos,
        k_prime: Vec<usize>,
        o1_candidate: f64,
        exponents: Vec<i64>,
    ) -> Result<Self> {
        validate_epsilon(epsilon)?;
        if !o1_candidate.is_finite() || o1_candidate <= 0.0 {
            return Err(Error::InvalidInstance(format!(
                "anchor size must be finite and positive, got {o1_candidate}"
            )));
        }
        if exponents.len() != pos.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} exponents for {} positions",
                exponents.len(),
                pos.len()
            )));
        }
        if exponents.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidInstance("profile entries must be non-increasing".into()));
        }
        for &k in &k_prime {
            if !pos.contains(k) {
                return Err(Error::InvalidInstance(format!(
                    "reduced index {k} is not a member of the position set"
                )));
            }
        }
        Ok(MaxTopKGuess { epsilon, pos, k_prime, o1_candidate, exponents })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn pos(&self) -> &Pos {
        &self.pos
    }

    /// Reduced top-k index per machine.
    pub fn k_prime(&self) -> &[usize] {
        &self.k_prime
    }

    pub fn o1_candidate(&self) -> f64 {
        self.o1_candidate
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    /// Profile value at position-slot `slot`.
    pub fn rho(&self, slot: usize) -> f64 {
        (1.0 + self.epsilon).powi(self.exponents[slot] as i32)
    }

    /// Profile value at position `k`, which must belong to the position set.
    pub fn rho_at(&self, k: usize) -> f64 {
        let slot = self
            .pos
            .elements()
            .binary_search(&k)
            .expect("rho_at expects a member of the position set");
        self.rho(slot)
    }

    /// The profile values in slot order.
    pub fn entries(&self) -> Vec<f64> {
        (0..self.exponents.len()).map(|s| self.rho(s)).collect()
    }
}

fn descending_vectors(slots: usize, head: i64, floor: i64) -> Vec<Vec<i64>> {
    fn rec(slot: usize, slots: usize, upper: i64, floor: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if slot == slots {
            out.push(cur.clone());
            return;
        }
        for e in (floor..=upper).rev() {
            cur.push(e);
            rec(slot + 1, slots, e, floor, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![head];
    rec(1, slots, head, floor, &mut cur, &mut out);
    out
}

/// All candidate profiles, in a fixed order: anchors are the distinct finite
/// processing times (largest first); per anchor, the first entry is pinned to
/// the anchor rounded up to a power of `1+eps` and the remaining entries run
/// through every non-increasing completion down to the anchor's floor value.
/// Profiles whose exponent vectors coincide across anchors are emitted once.
pub fn enumerate_guesses(inst: &Instance, epsilon: f64) -> Result<Vec<MaxTopKGuess>> {
    validate_epsilon(epsilon)?;
    let k = topk_indices(inst)?;
    let n = inst.jobs();
    let pos = Pos::iterative(n, epsilon);
    let k_prime: Vec<usize> = k.iter().map(|&ki| reduce_k(ki, &pos)).collect();

    let mut anchors: Vec<f64> = Vec::new();
    for i in 0..inst.machines() {
        for j in 0..n {
            if let Some(p) = inst.processing(i, j) {
                anchors.push(p);
            }
        }
    }
    anchors.sort_by(|a, b| b.partial_cmp(a).unwrap());
    anchors.dedup();

    let mut guesses = Vec::new();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    for &o1 in &anchors {
        let head = round_up_exponents(&[o1], epsilon)[0];
        let floor = round_up_exponents(&[epsilon * o1 / n as f64], epsilon)[0];
        for exps in descending_vectors(pos.len(), head, floor) {
            if seen.insert(exps.clone()) {
                guesses.push(MaxTopKGuess::new(
                    epsilon,
                    pos.clone(),
                    k_prime.clone(),
                    o1,
                    exps,
                )?);
            }
        }
    }
    Ok(guesses)
}

/// The profile an actual optimum induces: position `k` carries the maximum
/// k-th largest assigned size among machines whose reduced index reaches `k`,
/// rounded up to a power of `1+eps` (or the floor value when below it). Its
/// exponent vector always appears in [`enumerate_guesses`]' stream.
pub fn guess_from_optimum(
    inst: &Instance,
    opt: &Assignment,
    epsilon: f64,
) -> Result<MaxTopKGuess> {
    validate_epsilon(epsilon)?;
    let k = topk_indices(inst)?;
    opt.validate(inst)?;
    let m = inst.machines();
    let n = inst.jobs();
    let pos = Pos::iterative(n, epsilon);
    let k_prime: Vec<usize> = k.iter().map(|&ki| reduce_k(ki, &pos)).collect();

    let sorted_rows: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = opt
                .jobs_of(i)
                .iter()
                .map(|&j| inst.processing(i, j).expect("validated assignment"))
                .collect();
            row.sort_by(|a, b| b.partial_cmp(a).unwrap());
            row
        })
        .collect();
    let o: Vec<f64> = (1..=n)
        .map(|kk| {
            (0..m)
                .filter(|&i| k_prime[i] >= kk)
                .filter_map(|i| sorted_rows[i].get(kk - 1).copied())
                .fold(0.0, f64::max)
        })
        .collect();
    let o1 = o[0];
    debug_assert!(o1 > 0.0, "some job is assigned and processing times are positive");

    let threshold = epsilon * o1 / n as f64;
    let floor = round_up_exponents(&[threshold], epsilon)[0];
    let exponents: Vec<i64> = pos
        .elements()
        .iter()
        .map(|&kk| {
            let ok = o[kk - 1];
            if ok >= threshold {
                round_up_exponents(&[ok], epsilon)[0]
            } else {
                floor
            }
        })
        .collect();
    MaxTopKGuess::new(epsilon, pos, k_prime, o1, exponents)
}

/// The relaxation for one guess. Variables are the assignment extents
/// `x_ij` for pairs whose processing time does not exceed the first profile
/// entry (larger pairs are removed outright), plus the excess bound `r` as
/// the last variable; the objective minimizes `r`.
///
/// Rows: per machine, the sizes' excess over the profile at the machine's
/// reduced index, `sum_j (p_ij - rho_{k'_i})^+ x_ij <= r`; per job, full
/// assignment `sum_i x_ij = 1`. A job all of whose pairs were removed leaves
/// an unsatisfiable row — the program is then infeasible, which callers treat
/// as "wrong guess, skip".
pub fn build_mtop_lp(
    inst: &Instance,
    guess: &MaxTopKGuess,
) -> (LinearProgram, Vec<(usize, usize)>) {
    let m = inst.machines();
    let n = inst.jobs();
    let rho1 = guess.rho(0);
    let mut vars: Vec<(usize, usize)> = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if let Some(p) = inst.processing(i, j) {
                if p <= rho1 {
                    vars.push((i, j));
                }
            }
        }
    }
    let nv = vars.len() + 1;
    let mut cost = vec![0.0; nv];
    cost[nv - 1] = 1.0;
    let mut lp = LinearProgram::minimize(cost);
    for i in 0..m {
        let cap = guess.rho_at(guess.k_prime[i]);
        let mut row = vec![0.0; nv];
        for (c, &(vi, vj)) in vars.iter().enumerate() {
            if vi == i {
                row[c] = (inst.processing(vi, vj).expect("variable pairs are allowed") - cap)
                    .max(0.0);
            }
        }
        row[nv - 1] = -1.0;
        lp.add_row(row, Relation::Le, 0.0);
    }
    for j in 0..n {
        let mut row = vec![0.0; nv];
        for (c, &(_, vj)) in vars.iter().enumerate() {
            if vj == j {
                row[c] = 1.0;
            }
        }
        lp.add_row(row, Relation::Eq, 1.0);
    }
    (lp, vars)
}

/// One unit-capacity machine copy and the job fractions poured into it.
struct MachineCopy {
    machine: usize,
    edges: Vec<(usize, f64)>,
}

/// Machine-copy rounding of a feasible fractional assignment (`x` aligned
/// with `vars`, the excess variable already stripped).
///
/// Per machine, jobs with positive extent are poured into unit-capacity
/// copies in non-increasing size order (ties by job index), splitting at copy
/// boundaries, so every copy except the last is filled exactly. The poured
/// fractions form a fractional matching of jobs to copies; a vertex of the
/// matching polytope restricted to the poured edges is integral and covers
/// every job, and reading it off gives the assignment.
pub fn shmoys_tardos_round(
    inst: &Instance,
    vars: &[(usize, usize)],
    x: &[f64],
) -> Result<Assignment> {
    let m = inst.machines();
    let n = inst.jobs();
    if x.len() != vars.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} extents for {} variables",
            x.len(),
            vars.len()
        )));
    }
    for &v in x {
        if !v.is_finite() || v < -tol::ZERO {
            return Err(Error::InvalidVector(format!(
                "assignment extents must be finite and nonnegative, got {v}"
            )));
        }
    }

    let mut per_machine: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    for (c, &(i, j)) in vars.iter().enumerate() {
        if x[c] > tol::ZERO {
            per_machine[i].push((j, x[c]));
        }
    }

    let mut copies: Vec<MachineCopy> = Vec::new();
    for (i, mut items) in per_machine.into_iter().enumerate() {
        if items.is_empty() {
            continue;
        }
        items.sort_by(|a, b| {
            let pa = inst.processing(i, a.0).expect("extents live on allowed pairs");
            let pb = inst.processing(i, b.0).expect("extents live on allowed pairs");
            pb.partial_cmp(&pa).unwrap().then(a.0.cmp(&b.0))
        });
        let mut edges: Vec<(usize, f64)> = Vec::new();
        let mut room = 1.0f64;
        for (j, mut frac) in items {
            while frac > tol::ZERO {
                let take = frac.min(room);
                edges.push((j, take));
                frac -= take;
                room -= take;
                if room <= tol::ZERO {
                    copies.push(MachineCopy { machine: i, edges: std::mem::take(&mut edges) });
                    room = 1.0;
                }
            }
        }
        if !edges.is_empty() {
            copies.push(MachineCopy { machine: i, edges });
        }
    }

    // Structural sanity of the pour order: everything on a later copy is no
    // larger than the average size on the copy before it.
    for w in copies.windows(2) {
        let (prev, cur) = (&w[0], &w[1]);
        if prev.machine != cur.machine {
            continue;
        }
        let mass: f64 = prev.edges.iter().map(|&(_, a)| a).sum();
        let avg = prev
            .edges
            .iter()
            .map(|&(j, a)| inst.processing(prev.machine, j).unwrap() * a)
            .sum::<f64>()
            / mass;
        let largest = cur
            .edges
            .iter()
            .map(|&(j, _)| inst.processing(cur.machine, j).unwrap())
            .fold(0.0, f64::max);
        if largest > avg + tol::ZERO {
            return Err(Error::Internal(format!(
                "copy fill out of order on machine {}: {largest} > average {avg}",
                prev.machine + 1
            )));
        }
    }

    let edge_list: Vec<(usize, usize)> = copies
        .iter()
        .enumerate()
        .flat_map(|(c, copy)| copy.edges.iter().map(move |&(j, _)| (c, j)))
        .collect();
    let mut matching = LinearProgram::feasibility(edge_list.len());
    for j in 0..n {
        let row: Vec<f64> =
            edge_list.iter().map(|&(_, ej)| if ej == j { 1.0 } else { 0.0 }).collect();
        matching.add_row(row, Relation::Eq, 1.0);
    }
    for c in 0..copies.len() {
        let row: Vec<f64> =
            edge_list.iter().map(|&(ec, _)| if ec == c { 1.0 } else { 0.0 }).collect();
        matching.add_row(row, Relation::Le, 1.0);
    }
    let sol = match lp::solve_feasibility(&matching)? {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Infeasible(_) => {
            return Err(Error::Internal(
                "copy matching is infeasible; the input extents cannot cover every job".into(),
            ))
        }
        LpOutcome::Unbounded => {
            return Err(Error::Internal("feasibility program reported unbounded".into()))
        }
    };

    let mut sigma = vec![usize::MAX; n];
    for (e, &(c, j)) in edge_list.iter().enumerate() {
        if sol.x[e] > 0.5 {
            if sigma[j] != usize::MAX {
                return Err(Error::Internal(format!("matching assigned job {} twice", j + 1)));
            }
            sigma[j] = copies[c].machine;
        }
    }
    if sigma.iter().any(|&i| i == usize::MAX) {
        return Err(Error::Internal("matching vertex is not integral on some job".into()));
    }
    let assignment = Assignment::new(sigma);
    assignment.validate(inst)?;
    Ok(assignment)
}

#[derive(Debug, Clone)]
pub struct MaxTopKOutcome {
    pub assignment: Assignment,
    pub objective: f64,
    /// The proven approximation factor `3 + 7 eps`.
    pub guarantee: f64,
    pub guesses_total: usize,
    pub guesses_feasible: usize,
    /// Enumeration index of the winning guess.
    pub best_guess: usize,
    /// Profile values of the winning guess.
    pub best_rho: Vec<f64>,
}

/// Full solve with diagnostics: every guess is relaxed, rounded and scored,
/// and the cheapest assignment wins (ties go to the earlier guess).
pub fn solve_detailed(inst: &Instance, epsilon: f64) -> Result<MaxTopKOutcome> {
    let guesses = enumerate_guesses(inst, epsilon)?;
    let scored: Vec<Option<(f64, Assignment)>> = guesses
        .par_iter()
        .map(|guess| -> Result<Option<(f64, Assignment)>> {
            let (lp, vars) = build_mtop_lp(inst, guess);
            match lp::solve(&lp)? {
                LpOutcome::Optimal(sol) => {
                    let assignment = shmoys_tardos_round(inst, &vars, &sol.x[..vars.len()])?;
                    let rho1 = guess.rho(0);
                    for (j, &i) in assignment.sigma().iter().enumerate() {
                        let p = inst.processing(i, j).expect("validated assignment");
                        if p > rho1 {
                            return Err(Error::Internal(format!(
                                "rounded assignment uses size {p} above the profile cap {rho1}"
                            )));
                        }
                    }
                    let phi = objective(inst, &assignment)?;
                    Ok(Some((phi, assignment)))
                }
                LpOutcome::Infeasible(_) => Ok(None),
                LpOutcome::Unbounded => {
                    Err(Error::Internal("excess minimization reported unbounded".into()))
                }
            }
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(f64, usize, Assignment)> = None;
    let mut feasible = 0usize;
    for (g, entry) in scored.into_iter().enumerate() {
        if let Some((phi, assignment)) = entry {
            feasible += 1;
            if best.as_ref().map_or(true, |(b, ..)| phi < *b) {
                best = Some((phi, g, assignment));
            }
        }
    }
    match best {
        Some((phi, g, assignment)) => Ok(MaxTopKOutcome {
            assignment,
            objective: phi,
            guarantee: 3.0 + 7.0 * epsilon,
            guesses_total: guesses.len(),
            guesses_feasible: feasible,
            best_guess: g,
            best_rho: guesses[g].entries(),
        }),
        None => Err(Error::Internal(format!(
            "all {} profile guesses were infeasible, including the optimum's own",
            guesses.len()
        ))),
    }
}

/// The assignment and its objective value, within `3 + 7 eps` of optimal.
pub fn solve_maxtopk(inst: &Instance, epsilon: f64) -> Result<(Assignment, f64)> {
    solve_detailed(inst, epsilon).map(|out| (out.assignment, out.objective))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{solve_glb_exact, ExactCaps};
    use crate::instance::{gen_random, NormProfile};
    use crate::norms::top_k;

    fn topk_instance(p: Vec<Vec<Option<f64>>>, k: Vec<usize>) -> Instance {
        let inner = k.into_iter().map(|ki| NormSpec::topk(ki).unwrap()).collect();
        Instance::from_parts(p, inner, NormSpec::linf()).unwrap()
    }

    #[test]
    fn reduced_indices_follow_the_position_set() {
        let pos = Pos::iterative(10, 0.5);
        assert_eq!(pos.elements(), &[1, 2, 3, 5, 8, 10]);
        assert_eq!(reduce_k(7, &pos), 5);
        assert_eq!(reduce_k(1, &pos), 1);
        for &k in pos.elements() {
            assert_eq!(reduce_k(k, &pos), k);
        }
        for (n, eps) in [(10usize, 0.5f64), (17, 0.3), (40, 0.2), (6, 0.45)] {
            let pos = Pos::iterative(n, eps);
            for k in 1..=n {
                let kp = reduce_k(k, &pos);
                assert!(kp >= 1 && kp <= k);
                assert!((k as f64) < (1.0 + eps) * kp as f64, "n={n} eps={eps} k={k} k'={kp}");
            }
        }
    }

    #[test]
    fn guess_stream_shape_and_anchors() {
        let single = topk_instance(vec![vec![Some(5.0)]], vec![1]);
        let stream = enumerate_guesses(&single, 0.2).unwrap();
        assert_eq!(stream.len(), 1);
        assert_eq!(stream[0].o1_candidate(), 5.0);
        let rho1 = stream[0].rho(0);
        assert!(rho1 >= 5.0 && rho1 < 1.2 * 5.0);

        // Distinct processing values two, duplicated across the matrix.
        let two = topk_instance(
            vec![
                vec![Some(2.0), Some(1.0)],
                vec![Some(1.0), Some(2.0)],
            ],
            vec![1, 2],
        );
        let stream = enumerate_guesses(&two, 0.2).unwrap();
        let anchors: HashSet<u64> = stream.iter().map(|g| g.o1_candidate().to_bits()).collect();
        assert_eq!(anchors.len(), 2);
        for g in &stream {
            assert!(g.exponents().windows(2).all(|w| w[1] <= w[0]));
        }
        // No duplicate exponent vectors survive.
        let distinct: HashSet<Vec<i64>> =
            stream.iter().map(|g| g.exponents().to_vec()).collect();
        assert_eq!(distinct.len(), stream.len());
    }

    #[test]
    fn wrong_norm_shapes_are_rejected() {
        let l1_inner = Instance::from_parts(
            vec![vec![Some(1.0)]],
            vec![NormSpec::l1()],
            NormSpec::linf(),
        )
        .unwrap();
        match enumerate_guesses(&l1_inner, 0.2) {
            Err(Error::InvalidInstance(msg)) => assert_eq!(msg, WRONG_SHAPE),
            other => panic!("expected a shape error, got {other:?}"),
        }
        let l1_outer = Instance::from_parts(
            vec![vec![Some(1.0)]],
            vec![NormSpec::topk(1).unwrap()],
            NormSpec::l1(),
        )
        .unwrap();
        assert!(matches!(solve_maxtopk(&l1_outer, 0.2), Err(Error::InvalidInstance(_))));
        assert!(matches!(
            solve_maxtopk(&topk_instance(vec![vec![Some(1.0)]], vec![1]), 0.0),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn excess_program_worked_single_machine() {
        let inst = topk_instance(vec![vec![Some(2.0), Some(1.0), Some(0.5)]], vec![2]);
        let opt = Assignment::new(vec![0, 0, 0]);
        let guess = guess_from_optimum(&inst, &opt, 0.2).unwrap();
        assert_eq!(guess.k_prime(), &[2]);
        assert_eq!(guess.exponents(), &[4, 0, -11]);

        let (lp, vars) = build_mtop_lp(&inst, &guess);
        assert_eq!(vars.len(), 3);
        let sol = match lp::solve(&lp).unwrap() {
            LpOutcome::Optimal(sol) => sol,
            other => panic!("expected an optimum, got {other:?}"),
        };
        // x is forced to 1 on the single machine, so the optimum equals the
        // total excess over the profile value at the reduced index (1.0).
        assert!((sol.objective - 1.0).abs() < 1e-9);

        // A profile at the cap everywhere zeroes the excess...
        let lax = MaxTopKGuess::new(0.2, guess.pos().clone(), vec![2], 2.0, vec![4, 4, 4]).unwrap();
        let (lp, _) = build_mtop_lp(&inst, &lax);
        match lp::solve(&lp).unwrap() {
            LpOutcome::Optimal(sol) => assert!(sol.objective.abs() < 1e-9),
            other => panic!("expected an optimum, got {other:?}"),
        }
        // ...while one below every size strips all variables of every job.
        let tight =
            MaxTopKGuess::new(0.2, guess.pos().clone(), vec![2], 2.0, vec![-5, -5, -5]).unwrap();
        let (lp, vars) = build_mtop_lp(&inst, &tight);
        assert!(vars.is_empty());
        assert!(matches!(lp::solve(&lp).unwrap(), LpOutcome::Infeasible(_)));
    }

    #[test]
    fn excess_optimum_is_bounded_by_the_true_optimum() {
        for trial in 0..15u64 {
            let m = 1 + (trial as usize % 3);
            let n = 1 + (trial as usize % 4);
            let inst = gen_random(m, n, 4400 + trial, (0.2, 3.0), 0.15, NormProfile::TopkLinf)
                .unwrap();
            let (opt, value) = solve_glb_exact(&inst, ExactCaps::default()).unwrap();
            let guess = guess_from_optimum(&inst, &opt, 0.2).unwrap();
            let (lp, _) = build_mtop_lp(&inst, &guess);
            match lp::solve(&lp).unwrap() {
                LpOutcome::Optimal(sol) => {
                    assert!(
                        sol.objective <= value + 1e-7,
                        "trial {trial}: excess {} vs optimum {value}",
                        sol.objective
                    );
                }
                other => panic!("optimum-derived guess must be feasible, got {other:?}"),
            }
        }
    }

    #[test]
    fn optimum_guess_is_always_in_the_stream() {
        for trial in 0..12u64 {
            let m = 1 + (trial as usize % 3);
            let n = 1 + (trial as usize % 4);
            let inst = gen_random(m, n, 5100 + trial, (0.2, 3.0), 0.1, NormProfile::TopkLinf)
                .unwrap();
            let (opt, _) = solve_glb_exact(&inst, ExactCaps::default()).unwrap();
            let star = guess_from_optimum(&inst, &opt, 0.2).unwrap();
            let stream = enumerate_guesses(&inst, 0.2).unwrap();
            assert!(
                stream.iter().any(|g| g.exponents() == star.exponents()),
                "trial {trial}: {:?} missing",
                star.exponents()
            );
        }
    }

    #[test]
    fn rounding_reads_off_integral_extents() {
        let inst = topk_instance(
            vec![
                vec![Some(1.0), Some(2.0), Some(0.7)],
                vec![Some(1.5), Some(0.4), Some(2.0)],
            ],
            vec![2, 1],
        );
        let vars: Vec<(usize, usize)> =
            (0..2).flat_map(|i| (0..3).map(move |j| (i, j))).collect();
        let target = [0usize, 1, 0];
        let x: Vec<f64> =
            vars.iter().map(|&(i, j)| if target[j] == i { 1.0 } else { 0.0 }).collect();
        let a = shmoys_tardos_round(&inst, &vars, &x).unwrap();
        assert_eq!(a.sigma(), &target);
    }

    #[test]
    fn rounding_keeps_both_jobs_on_the_single_machine() {
        let inst = topk_instance(vec![vec![Some(1.0), Some(0.5)]], vec![1]);
        let vars = vec![(0usize, 0usize), (0, 1)];
        let a = shmoys_tardos_round(&inst, &vars, &[1.0, 1.0]).unwrap();
        assert_eq!(a.sigma(), &[0, 0]);
    }

    #[test]
    fn rounding_resolves_split_extents_deterministically() {
        let inst = topk_instance(
            vec![vec![Some(1.0)], vec![Some(1.0)]],
            vec![1, 1],
        );
        let vars = vec![(0usize, 0usize), (1, 0)];
        let a = shmoys_tardos_round(&inst, &vars, &[0.5, 0.5]).unwrap();
        let b = shmoys_tardos_round(&inst, &vars, &[0.5, 0.5]).unwrap();
        assert_eq!(a.sigma(), b.sigma());
        assert!(a.sigma()[0] < 2);
    }

    #[test]
    fn rounding_splits_jobs_across_copies() {
        let inst = topk_instance(
            vec![
                vec![Some(3.0), Some(1.0)],
                vec![Some(3.0), Some(1.0)],
            ],
            vec![2, 2],
        );
        let vars: Vec<(usize, usize)> =
            (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).collect();
        // Machine 0 carries 1.5 units and needs two copies; job 1 straddles
        // the boundary.
        let x = vec![0.75, 0.75, 0.25, 0.25];
        let a = shmoys_tardos_round(&inst, &vars, &x).unwrap();
        a.validate(&inst).unwrap();
    }

    #[test]
    fn single_machine_solve_is_exact() {
        let inst = topk_instance(vec![vec![Some(2.0), Some(1.0), Some(0.5)]], vec![2]);
        let (assignment, phi) = solve_maxtopk(&inst, 0.2).unwrap();
        assert_eq!(assignment.sigma(), &[0, 0, 0]);
        assert!((phi - top_k(&[2.0, 1.0, 0.5], 2)).abs() < 1e-12);
    }

    #[test]
    fn diagonal_instance_stays_within_the_guarantee() {
        let inst = topk_instance(
            vec![
                vec![Some(1.0), Some(10.0)],
                vec![Some(10.0), Some(1.0)],
            ],
            vec![2, 2],
        );
        let out = solve_detailed(&inst, 0.2).unwrap();
        let (_, opt) = solve_glb_exact(&inst, ExactCaps::default()).unwrap();
        assert!((opt - 1.0).abs() < 1e-12);
        assert!((out.guarantee - 4.4).abs() < 1e-12);
        assert!(out.objective <= out.guarantee * opt + 1e-9);
        assert!((out.objective - 1.0).abs() < 1e-9, "diagonal case solves exactly");
        assert!(out.guesses_feasible > 0 && out.guesses_feasible <= out.guesses_total);
    }

    #[test]
    fn random_instances_meet_the_ratio() {
        for trial in 0..10u64 {
            let m = 1 + (trial as usize % 4);
            let n = 1 + (trial as usize % 4);
            let inst = gen_random(m, n, 6200 + trial, (0.2, 3.0), 0.15, NormProfile::TopkLinf)
                .unwrap();
            let (_, opt) = solve_glb_exact(&inst, ExactCaps::default()).unwrap();
            let (assignment, phi) = solve_maxtopk(&inst, 0.2).unwrap();
            assignment.validate(&inst).unwrap();
            assert!(phi >= opt - 1e-9, "trial {trial}");
            assert!(phi <= 4.4 * opt + 1e-9, "trial {trial}: {phi} vs {opt}");
        }
    }
}
