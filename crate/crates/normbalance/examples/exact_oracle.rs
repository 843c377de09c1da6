//! The brute-force oracles: exact assignment search over all m^n placements
//! and exact norm-constrained selection over all 2^n item subsets. Small by
//! design — these exist so the approximation algorithms have something
//! honest to be measured against.

use normbalance::exact::{solve_glb_exact, solve_normlin_exact, ExactCaps};
use normbalance::instance::{gen_random, NormProfile};
use normbalance::norms::NormSpec;

fn main() {
    let inst = gen_random(3, 6, 7, (0.5, 6.0), 0.1, NormProfile::Mixed).unwrap();
    let (assignment, value) = solve_glb_exact(&inst, ExactCaps::default()).unwrap();
    println!("3x6 mixed-norm instance, seed 7:");
    println!("  optimal objective {value:.6}");
    println!(
        "  optimal placement {:?} (machine per job)",
        assignment.sigma().iter().map(|&i| i + 1).collect::<Vec<_>>()
    );

    // The caps guard the exponential enumerations; an instance beyond them
    // is refused rather than silently truncated.
    let tiny_caps = ExactCaps { max_assignments: 10, max_subsets: 1 << 20 };
    match solve_glb_exact(&inst, tiny_caps) {
        Err(e) => println!("  with a 10-assignment cap: {e}"),
        Ok(_) => unreachable!("3^6 placements exceed the cap"),
    }

    // Selection: minimize the norm of the chosen sizes subject to a total
    // value target.
    let p = vec![3.0, 1.0, 2.0, 0.5, 4.0];
    let z = vec![1.0, 2.0, 1.5, 0.5, 2.5];
    let psi = NormSpec::topk(2).unwrap();
    println!("\nselection: sizes {p:?}, values {z:?}, top-2 cost");
    for target in [2.0, 4.0, 6.5] {
        let choice = solve_normlin_exact(&p, &z, target, &psi, ExactCaps::default())
            .unwrap()
            .expect("targets stay below the total value");
        println!(
            "  target {target}: pick items {:?}, cost {:.4}",
            choice.items.iter().map(|&j| j + 1).collect::<Vec<_>>(),
            choice.cost
        );
    }
    let impossible =
        solve_normlin_exact(&p, &z, 100.0, &psi, ExactCaps::default()).unwrap();
    println!("  target 100: {:?} (total value is only 7.5)", impossible.map(|c| c.items));
}
