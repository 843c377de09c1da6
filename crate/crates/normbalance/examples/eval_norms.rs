//! Evaluate the supported norms on a sample vector and demonstrate the two
//! structural facts the solvers lean on: the top-k linearization identity and
//! majorization transfer between vectors.

use normbalance::norms::{majorization_ratio, top_k, NormSpec};

fn main() {
    let u = vec![4.0, 1.5, 3.0, 0.5, 2.0];
    println!("vector: {u:?}\n");

    let specs = vec![
        ("l1", NormSpec::l1()),
        ("linf", NormSpec::linf()),
        ("l2", NormSpec::lp(2.0).unwrap()),
        ("top-2", NormSpec::topk(2).unwrap()),
        ("top-4", NormSpec::topk(4).unwrap()),
        (
            "max(l1/3, top-2)",
            NormSpec::max_of(vec![
                NormSpec::scaled(1.0 / 3.0, NormSpec::l1()).unwrap(),
                NormSpec::topk(2).unwrap(),
            ])
            .unwrap(),
        ),
    ];
    for (name, spec) in &specs {
        println!("{name:>18}: {:.6}", spec.eval(&u).unwrap());
    }

    // Top-k as a minimum of linear functions: min_t [ k t + sum (u_j - t)^+ ]
    // with the minimum attained at the k-th largest entry.
    println!("\ntop-k via its linearization:");
    for k in 1..=u.len() {
        let direct = top_k(&u, k);
        let mut sorted = u.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let t = sorted[k - 1];
        let linearized = k as f64 * t + u.iter().map(|&x| (x - t).max(0.0)).sum::<f64>();
        println!("  k={k}: direct {direct:.6}, at t=u_({k}) {linearized:.6}");
    }

    // If every top-k of u is within alpha of the top-k of v, then *every*
    // monotone symmetric norm transfers with the same factor.
    let v = vec![2.0, 2.0, 2.0, 2.0, 2.0];
    let alpha = majorization_ratio(&u, &v);
    println!("\nmajorization ratio of {u:?} over {v:?}: {alpha:.4}");
    for (name, spec) in &specs {
        let lhs = spec.eval(&u).unwrap();
        let rhs = spec.eval(&v).unwrap();
        println!("  {name:>18}: {lhs:.4} <= {alpha:.4} * {rhs:.4} = {:.4}", alpha * rhs);
    }
}
