//! Build instances three ways — by hand, from a seeded generator, and from a
//! set-cover system — and round-trip one through its JSON file form.

use normbalance::instance::{
    gen_from_set_cover, gen_random, objective, Assignment, Instance, NormProfile,
};
use normbalance::norms::NormSpec;

fn main() {
    // By hand: two machines, three jobs, one forbidden pair.
    let inst = Instance::from_parts(
        vec![
            vec![Some(2.0), Some(1.0), None],
            vec![Some(3.0), Some(0.5), Some(1.5)],
        ],
        vec![NormSpec::l1(), NormSpec::topk(2).unwrap()],
        NormSpec::linf(),
    )
    .unwrap();
    println!("hand-built: {} machines, {} jobs", inst.machines(), inst.jobs());
    let a = Assignment::new(vec![0, 0, 1]);
    println!("  loads under {:?}: objective {:.4}", a.sigma(), objective(&inst, &a).unwrap());

    // Seeded generator: same seed, same instance, byte for byte.
    let g1 = gen_random(3, 5, 42, (0.5, 8.0), 0.2, NormProfile::Mixed).unwrap();
    let g2 = gen_random(3, 5, 42, (0.5, 8.0), 0.2, NormProfile::Mixed).unwrap();
    assert_eq!(g1.to_json().unwrap(), g2.to_json().unwrap());
    println!("\nseeded 3x5 mixed-norm instance (seed 42) regenerates identically");
    let forbidden = (0..3)
        .map(|i| (0..5).filter(|&j| !g1.allowed(i, j)).count())
        .sum::<usize>();
    println!("  forbidden pairs: {forbidden}");

    // Set-cover reduction: machines are sets with max-loads, the objective
    // counts the used sets, so the optimum is the minimum cover size.
    let sets = vec![vec![0, 1], vec![1, 2], vec![2, 3]];
    let cover = gen_from_set_cover(&sets, 4).unwrap();
    println!(
        "\nset-cover reduction: {} sets over 4 elements, all unit times",
        cover.machines()
    );
    let pick_outer = Assignment::new(vec![0, 0, 1, 2]);
    println!(
        "  covering with all three sets costs {:.1}",
        objective(&cover, &pick_outer).unwrap()
    );
    let pick_two = Assignment::new(vec![0, 0, 2, 2]);
    println!(
        "  covering with sets 1 and 3 costs  {:.1}",
        objective(&cover, &pick_two).unwrap()
    );

    // File round-trip.
    let text = inst.to_json().unwrap();
    let back = Instance::from_json(&text).unwrap();
    assert_eq!(text, back.to_json().unwrap());
    println!("\nJSON round-trip preserved the hand-built instance:\n{text}");
}
