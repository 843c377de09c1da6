//! The norm-constrained selection scheme: guess the shape of an optimal
//! selection (anchors, thresholds, class counts), solve a small feasibility
//! program per guess, round class by class, and keep the best candidate.
//! Compared against the exact subset oracle on a batch of random inputs.

use normbalance::exact::{solve_normlin_exact, ExactCaps};
use normbalance::normlin::{solve_ptas, NormLinInstance};
use normbalance::norms::NormSpec;
use normbalance::verify::random_norm_spec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    // One instance in detail.
    let p = vec![5.0, 3.0, 2.2, 1.4, 0.9, 0.5];
    let z = vec![2.0, 2.5, 1.0, 1.2, 0.8, 0.4];
    let target = 4.5;
    let inst =
        NormLinInstance::new(p.clone(), z.clone(), target, NormSpec::l1(), 0.5).unwrap();
    let out = solve_ptas(&inst, None).unwrap();
    let picked: Vec<usize> = out.items.iter().map(|&j| j + 1).collect();
    let mass: f64 = out.items.iter().map(|&j| z[j]).sum();
    println!("sizes {p:?}");
    println!("values {z:?}, target {target}");
    println!(
        "scheme picks {picked:?}: cost {:.4}, mass {:.2}, {} guesses evaluated",
        out.cost, mass, out.guesses_evaluated
    );
    let exact = solve_normlin_exact(&p, &z, target, &NormSpec::l1(), ExactCaps::default())
        .unwrap()
        .unwrap();
    println!("exact optimum: cost {:.4} on items {:?}", exact.cost, {
        let mut v: Vec<usize> = exact.items.iter().map(|&j| j + 1).collect();
        v.sort_unstable();
        v
    });

    // A batch with random norms. The proven factor at epsilon = 1/2 is 72.5;
    // observed ratios sit far below it.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 1.0;
    let trials = 40;
    for _ in 0..trials {
        let n = rng.gen_range(2..=8);
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..10.0)).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..5.0)).collect();
        let target = 0.6 * z.iter().sum::<f64>();
        let psi = random_norm_spec(&mut rng, n, 2);
        let inst = NormLinInstance::new(p.clone(), z.clone(), target, psi.clone(), 0.5).unwrap();
        let out = solve_ptas(&inst, None).unwrap();
        let exact = solve_normlin_exact(&p, &z, target, &psi, ExactCaps::default())
            .unwrap()
            .unwrap();
        if exact.cost > 0.0 {
            worst = worst.max(out.cost / exact.cost);
        }
    }
    println!("\n{trials} random instances at epsilon 1/2: worst ratio {worst:.4} (bound 72.5)");
}
