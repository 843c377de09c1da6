//! Constant-factor assignment for the max-of-top-k shape: every machine
//! measures its load by the sum of its k largest jobs and the objective is
//! the worst machine. One guessed threshold vector turns the problem into a
//! generalized matching program whose vertex solutions round losslessly.

use normbalance::exact::{solve_glb_exact, ExactCaps};
use normbalance::instance::{gen_random, load_vector, NormProfile};
use normbalance::maxtopk::{enumerate_guesses, reduce_k, solve_detailed};
use normbalance::normlin::Pos;

fn main() {
    let epsilon = 0.2;

    // Each machine's k is first pulled down to a nearby member of a geometric
    // position grid; the loss is at most a (1+eps) factor. Small k survive
    // unchanged, large k snap to the grid.
    let pos = Pos::iterative(20, epsilon);
    println!("position grid for n = 20, eps = {epsilon}: {:?}", pos.elements());
    let snapped: Vec<String> = (1..=20)
        .filter(|&k| reduce_k(k, &pos) != k)
        .map(|k| format!("{k}->{}", reduce_k(k, &pos)))
        .collect();
    println!("  reduced indices: {}", snapped.join(", "));

    let inst = gen_random(3, 5, 42, (0.2, 3.0), 0.1, NormProfile::TopkLinf).unwrap();
    let (m, n) = (inst.machines(), inst.jobs());
    println!("\ninstance: {m} machines, {n} jobs, top-k inner norms, max outer norm");

    let guesses = enumerate_guesses(&inst, epsilon).unwrap();
    println!("threshold guesses to scan: {}", guesses.len());

    let outcome = solve_detailed(&inst, epsilon).unwrap();
    let (exact, opt) = solve_glb_exact(&inst, ExactCaps::default()).unwrap();
    println!(
        "\nsolver objective {:.4}, exact optimum {:.4}, ratio {:.4} (proven factor {})",
        outcome.objective,
        opt,
        outcome.objective / opt,
        outcome.guarantee
    );
    println!(
        "{} of {} guesses had a feasible matching program; guess #{} won with top threshold {:.4}",
        outcome.guesses_feasible,
        outcome.guesses_total,
        outcome.best_guess + 1,
        outcome.best_rho[0]
    );

    println!(
        "\nsolver placement: {:?}",
        outcome.assignment.sigma().iter().map(|&i| i + 1).collect::<Vec<_>>()
    );
    println!(
        "exact placement:  {:?}",
        exact.sigma().iter().map(|&i| i + 1).collect::<Vec<_>>()
    );
    let loads = load_vector(&inst, &outcome.assignment).unwrap();
    println!(
        "solver loads: {:?}",
        loads.iter().map(|l| format!("{l:.3}")).collect::<Vec<_>>()
    );
}
