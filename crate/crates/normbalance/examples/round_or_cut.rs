//! Decide each profile guess without enumerating the exponential column set:
//! grow a column pool from Farkas certificates of the restricted program
//! until it either turns feasible (round) or the separation oracle certifies
//! the dual polytope nonempty, which rejects the guess for good (cut).

use normbalance::glb::{
    enumerate_profiles, solve_profile_cutting, solve_profile_direct, CuttingOutcome,
    ProfileFeasibility,
};
use normbalance::instance::{gen_random, normalize, NormProfile};
use normbalance::oracle::{verify_certificate_small, NormLinStrategy};

fn main() {
    let inst = gen_random(2, 4, 3, (0.2, 3.0), 0.1, NormProfile::Mixed).unwrap();
    let (m, n) = (inst.machines(), inst.jobs());
    let scaled = normalize(&inst, 0, 0).unwrap();
    let strategy = NormLinStrategy::default_for(n);

    let mut agree = 0usize;
    let mut feasible = 0usize;
    let mut rejected = 0usize;
    let mut shown_feasible = false;
    let mut shown_rejected = false;

    let profiles = enumerate_profiles(m, n);
    println!("scanning {} profile guesses on a {m}x{n} instance\n", profiles.len());
    for guess in &profiles {
        let outcome = solve_profile_cutting(&scaled, guess, &strategy, 500).unwrap();

        // The direct solve enumerates every column, so it is the ground truth
        // the cutting loop must match.
        let (_, direct) = solve_profile_direct(&scaled, guess, 12).unwrap();

        match outcome {
            CuttingOutcome::Feasible { columns, x, iterations, .. } => {
                feasible += 1;
                assert!(matches!(direct, ProfileFeasibility::Feasible { .. }));
                agree += 1;
                if !shown_feasible {
                    shown_feasible = true;
                    let support = x.iter().filter(|&&v| v > 1e-9).count();
                    println!(
                        "guess {:?}: feasible after {iterations} cuts, pool {} columns, support {support}",
                        guess.entries(),
                        columns.len()
                    );
                }
            }
            CuttingOutcome::GuessRejected { iterations, certified, .. } => {
                rejected += 1;
                assert!(matches!(direct, ProfileFeasibility::Infeasible));
                agree += 1;
                let checked = verify_certificate_small(&certified, &scaled, guess).unwrap();
                assert!(checked, "certificate must satisfy every column constraint");
                if !shown_rejected {
                    shown_rejected = true;
                    println!(
                        "guess {:?}: rejected after {iterations} cuts; certificate r={:?} t={:.3}",
                        guess.entries(),
                        certified.r,
                        certified.t
                    );
                    println!("  brute-force check over all {} columns: certificate holds", {
                        m * ((1usize << n) - 1)
                    });
                }
            }
            CuttingOutcome::IterationCap { iterations } => {
                println!("guess {:?}: undecided after {iterations} iterations", guess.entries())
            }
        }
    }

    println!("\n{feasible} guesses feasible, {rejected} rejected, {agree}/{} match the direct solve", profiles.len());
}
