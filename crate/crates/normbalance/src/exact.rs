//! Brute-force reference solvers.
//!
//! These enumerate every candidate outright and exist to anchor the
//! approximation algorithms in tests and benchmarks: tiny inputs only, but
//! the answers are ground truth. Both solvers are deterministic — among
//! optima they return a fixed canonical representative, so comparisons
//! against them can use exact equality on the selection.

use crate::instance::{Assignment, Instance};
use crate::norms::NormSpec;
use crate::{Error, Result};

/// Enumeration budgets. The defaults keep worst-case runtimes around a
/// second; callers with bigger appetites can raise them explicitly.
#[derive(Debug, Clone, Copy)]
pub struct ExactCaps {
    /// maximum number of full assignments `m^n` to visit
    pub max_assignments: u64,
    /// maximum number of subsets `2^n` to visit
    pub max_subsets: u64,
}

impl Default for ExactCaps {
    fn default() -> Self {
        ExactCaps {
            max_assignments: 10_000_000,
            max_subsets: 1 << 22,
        }
    }
}

/// The globally optimal assignment, found by trying all `m^n` of them.
///
/// Ties on the objective keep the lexicographically smallest assignment
/// vector, so the result is a canonical optimum. Forbidden pairs are skipped
/// during enumeration.
pub fn solve_glb_exact(inst: &Instance, caps: ExactCaps) -> Result<(Assignment, f64)> {
    let m = inst.machines();
    let n = inst.jobs();
    let total = (m as u64)
        .checked_pow(n as u32)
        .filter(|&t| t <= caps.max_assignments)
        .ok_or_else(|| {
            Error::CapExceeded(format!(
                "exact enumeration needs {m}^{n} assignments, cap is {}",
                caps.max_assignments
            ))
        })?;
    let _ = total;

    // per-job candidate machines, ascending, so the odometer below emits
    // valid assignments in lexicographic order
    let candidates: Vec<Vec<usize>> = (0..n).map(|j| inst.allowed_machines(j)).collect();

    let mut pos = vec![0usize; n]; // index into candidates[j]
    let mut best: Option<(Vec<usize>, f64)> = None;
    'outer: loop {
        let sigma: Vec<usize> = pos.iter().enumerate().map(|(j, &c)| candidates[j][c]).collect();
        let a = Assignment::new(sigma.clone());
        let obj = crate::instance::objective(inst, &a)?;
        if best.as_ref().map_or(true, |(_, b)| obj < *b) {
            best = Some((sigma, obj));
        }
        // advance the odometer (last job varies fastest)
        for j in (0..n).rev() {
            pos[j] += 1;
            if pos[j] < candidates[j].len() {
                continue 'outer;
            }
            pos[j] = 0;
        }
        break;
    }
    let (sigma, obj) = best.expect("every instance has at least one assignment");
    Ok((Assignment::new(sigma), obj))
}

/// One optimal answer to the subset selection problem: minimize `psi` of the
/// chosen processing times subject to the chosen `z` mass reaching `z_target`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetChoice {
    /// chosen item indices, ascending
    pub items: Vec<usize>,
    /// `psi` evaluated on the chosen processing times
    pub cost: f64,
}

/// Minimizes `psi(p[J])` over subsets `J` with `sum_{j in J} z[j] >= z_target`,
/// by trying all `2^n` subsets.
///
/// Returns `None` when even the full set misses the target (beyond a small
/// slack in the caller's favor). Ties prefer lower cost, then fewer items,
/// then the lexicographically smaller ascending index list.
pub fn solve_normlin_exact(
    p: &[f64],
    z: &[f64],
    z_target: f64,
    psi: &NormSpec,
    caps: ExactCaps,
) -> Result<Option<SubsetChoice>> {
    if p.len() != z.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} processing times vs {} masses",
            p.len(),
            z.len()
        )));
    }
    let n = p.len();
    if n >= 63 || (1u64 << n) > caps.max_subsets {
        return Err(Error::CapExceeded(format!(
            "exact subset search needs 2^{n} subsets, cap is {}",
            caps.max_subsets
        )));
    }
    let slack = crate::tol::FEASIBILITY;
    if z.iter().sum::<f64>() < z_target - slack {
        return Ok(None);
    }

    let mut best: Option<SubsetChoice> = None;
    let mut chosen_p = Vec::with_capacity(n);
    let mut chosen_idx = Vec::with_capacity(n);
    for mask in 0u64..(1u64 << n) {
        let mut mass = 0.0;
        chosen_p.clear();
        chosen_idx.clear();
        for j in 0..n {
            if mask >> j & 1 == 1 {
                mass += z[j];
                chosen_p.push(p[j]);
                chosen_idx.push(j);
            }
        }
        if mass < z_target - slack {
            continue;
        }
        let cost = psi.eval(&chosen_p)?;
        let better = match &best {
            None => true,
            Some(b) => {
                cost < b.cost
                    || (cost == b.cost
                        && (chosen_idx.len() < b.items.len()
                            || (chosen_idx.len() == b.items.len()
                                && chosen_idx.as_slice() < b.items.as_slice())))
            }
        };
        if better {
            best = Some(SubsetChoice {
                items: chosen_idx.clone(),
                cost,
            });
        }
    }
    Ok(best)
}
