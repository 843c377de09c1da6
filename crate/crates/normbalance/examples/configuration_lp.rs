//! Build and solve the fractional covering program for one load-profile
//! guess. A guess fixes, per position class, a power-of-two ceiling on the
//! sorted machine loads; the program then asks for fractional configurations
//! that cover half of every job while respecting the guessed profile.

use normbalance::exact::{solve_glb_exact, ExactCaps};
use normbalance::glb::{
    anchor_from_optimum, enumerate_columns, enumerate_profiles, profile_from_optimum,
    solve_profile_direct, solve_profile_with, support_cap, ProfileFeasibility, ProfileGuess,
};
use normbalance::instance::{gen_random, normalize, NormProfile};
use normbalance::normlin::Pos;

fn main() {
    let inst = gen_random(3, 5, 11, (0.3, 4.0), 0.1, NormProfile::Mixed).unwrap();
    let (m, n) = (inst.machines(), inst.jobs());
    println!("instance: {m} machines, {n} jobs");

    let profiles = enumerate_profiles(m, n);
    println!("candidate profiles for this shape: {}", profiles.len());

    // Anchor the scaling at the largest-load machine of a true optimum and
    // read the profile that optimum induces. In the solver this guess is one
    // of the enumerated candidates; here we jump straight to it.
    let (opt, phi) = solve_glb_exact(&inst, ExactCaps::default()).unwrap();
    println!("exact optimum: {phi:.4}");
    let (i_star, j_star) = anchor_from_optimum(&inst, &opt).unwrap();
    let scaled = normalize(&inst, i_star, j_star).unwrap();
    let guess = profile_from_optimum(&scaled, &opt).unwrap();
    println!(
        "optimum-induced guess (anchor machine {}, job {}): entries {:?}",
        i_star + 1,
        j_star + 1,
        guess.entries()
    );
    println!("  expansion over all machines: {:?}", guess.expansion());
    for x in [0.0, 0.3, 0.9, 2.0] {
        println!("  round_up({x}) = {}", guess.round_up(x));
    }

    // All configurations with scaled load within the cut-off 3/2.
    let columns = enumerate_columns(&scaled, 1.5, 12).unwrap();
    println!("columns at cut-off 1.5: {}", columns.len());

    let (_, feas) = solve_profile_direct(&scaled, &guess, 12).unwrap();
    match feas {
        ProfileFeasibility::Feasible { x } => {
            let support: Vec<usize> =
                (0..x.len()).filter(|&c| x[c] > 1e-9).collect();
            println!(
                "covering program: feasible, support {} of {} columns (cap {})",
                support.len(),
                x.len(),
                support_cap(n)
            );
            for &c in &support {
                let col = &columns[c];
                println!(
                    "  machine {} <- jobs {:?}  load {:.4}  weight {:.4}",
                    col.machine + 1,
                    col.jobs().iter().map(|&j| j + 1).collect::<Vec<_>>(),
                    col.psi,
                    x[c]
                );
            }
        }
        ProfileFeasibility::Infeasible => println!("covering program: infeasible"),
    }

    // Most candidate profiles are too tight for this anchor and come back
    // infeasible; the solver simply skips those guesses.
    let mut split = (0usize, 0usize);
    for candidate in &profiles {
        match solve_profile_with(&scaled, candidate, 0.5, 1.5, &columns).unwrap() {
            ProfileFeasibility::Feasible { .. } => split.0 += 1,
            ProfileFeasibility::Infeasible => split.1 += 1,
        }
    }
    println!("verdicts at this anchor: {} profiles feasible, {} infeasible", split.0, split.1);

    // Guesses outside the proven load range don't even construct.
    let slots = Pos::powers_of_two(m).len();
    let err = ProfileGuess::new(Pos::powers_of_two(m), vec![-40; slots], n).unwrap_err();
    println!("profile with entries 2^-40: {err}");
}
