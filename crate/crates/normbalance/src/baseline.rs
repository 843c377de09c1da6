//! Greedy list assignment, the comparison baseline for the real solvers.

use crate::instance::{objective, Assignment, Instance};
use crate::Result;

/// Assigns jobs in input order, each to the allowed machine that minimizes
/// the objective of the partial assignment; ties go to the lowest machine
/// index. No guarantee — this exists to have something cheap to compare
/// against.
pub fn solve_greedy(inst: &Instance) -> Result<(Assignment, f64)> {
    let m = inst.machines();
    let n = inst.jobs();
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut loads = vec![0.0f64; m];
    let mut sigma = vec![0usize; n];
    for j in 0..n {
        let mut best: Option<(f64, usize, f64)> = None;
        for i in 0..m {
            if !inst.allowed(i, j) {
                continue;
            }
            let mut jobs_i = assigned[i].clone();
            jobs_i.push(j);
            let row = inst.restricted_row(i, &jobs_i)?;
            let load_i = inst.inner_norm(i).eval(&row)?;
            let mut tentative = loads.clone();
            tentative[i] = load_i;
            let phi = inst.outer_norm().eval(&tentative)?;
            if best.as_ref().map_or(true, |&(b, ..)| phi < b) {
                best = Some((phi, i, load_i));
            }
        }
        let (_, i, load_i) = best.expect("every job is allowed on some machine");
        assigned[i].push(j);
        loads[i] = load_i;
        sigma[j] = i;
    }
    let assignment = Assignment::new(sigma);
    let phi = objective(inst, &assignment)?;
    Ok((assignment, phi))
}
