//! Price configurations against a dual point. The oracle either finds a
//! violated column (a machine and job set whose constraint the point breaks),
//! rejects the point's normalization outright, or certifies that every one of
//! the exponentially many columns is satisfied — using only polynomially many
//! norm-constrained selection calls.

use normbalance::glb::ProfileGuess;
use normbalance::instance::{normalize, Instance};
use normbalance::normlin::Pos;
use normbalance::norms::NormSpec;
use normbalance::oracle::{
    column_rhs, normalization_value, separate, verify_certificate_small, DualPoint,
    NormLinStrategy, SeparationResult,
};

fn main() {
    // The smallest interesting case: one machine, one job, unit time.
    let inst = Instance::from_parts(
        vec![vec![Some(1.0)]],
        vec![NormSpec::l1()],
        NormSpec::linf(),
    )
    .unwrap();
    let scaled = normalize(&inst, 0, 0).unwrap();
    let guess = ProfileGuess::new(Pos::powers_of_two(1), vec![-1], 1).unwrap();
    println!("profile entries: {:?}", guess.entries());

    let certified_point =
        DualPoint { r: vec![4.0], s: 0.0, t: 0.0, y: vec![0.0], z: vec![2.0] };
    println!(
        "dual point (r=4, z=2): normalization value {:.3}",
        normalization_value(&certified_point, &guess, 0.5)
    );
    println!(
        "  column (machine 1, jobs {{1}}) prices to {:+.3}",
        column_rhs(&certified_point, &scaled, &guess, 0, &[0], 1.5).unwrap()
    );
    match separate(&certified_point, &scaled, &guess, &NormLinStrategy::default()).unwrap() {
        SeparationResult::Certified(dp) => {
            println!("  verdict: certified (rescaled z = {:?})", dp.z);
            println!(
                "  brute-force column check agrees: {}",
                verify_certificate_small(&dp, &scaled, &guess).unwrap()
            );
        }
        other => println!("  verdict: {other:?}"),
    }

    // Doubling z makes the job constraint too greedy: the singleton column
    // now prices negative and comes back as a cut.
    let greedy_point = DualPoint { r: vec![4.0], s: 0.0, t: 0.0, y: vec![0.0], z: vec![4.0] };
    match separate(&greedy_point, &scaled, &guess, &NormLinStrategy::default()).unwrap() {
        SeparationResult::ViolatedColumn { machine, jobs, margin } => println!(
            "\ndual point (r=4, z=4): violated column on machine {}, jobs {:?}, margin {margin:.3}",
            machine + 1,
            jobs.iter().map(|&j| j + 1).collect::<Vec<_>>()
        ),
        other => println!("\nunexpected verdict: {other:?}"),
    }

    // Scaling everything down breaks the normalization plane first.
    let deflated = DualPoint { r: vec![0.1], s: 0.0, t: 0.0, y: vec![0.0], z: vec![0.2] };
    match separate(&deflated, &scaled, &guess, &NormLinStrategy::default()).unwrap() {
        SeparationResult::ViolatedNormalization { value } => {
            println!("deflated point: normalization value {value:.3} < 1, rejected before pricing")
        }
        other => println!("unexpected verdict: {other:?}"),
    }
}
