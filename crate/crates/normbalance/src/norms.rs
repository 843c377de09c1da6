//! Monotone symmetric norms on nonnegative vectors.
//!
//! All machine-load aggregation in this crate happens through [`NormSpec`], a
//! small closed family: `Lp` norms (including `L1`/`Linf`), `Top_k` (sum of
//! the `k` largest entries), ordered weighted norms, positive scalings and
//! pointwise maxima. Every member is symmetric (permutation invariant) and
//! monotone (entrywise domination implies domination of values), which is
//! exactly what the solver layers rely on.
//!
//! The `Top_k` calculus does the heavy lifting everywhere else:
//!
//! * `Top_k(u) = min_{t >= 0} { k*t + sum_j (u_j - t)^+ }`, attained at
//!   `t = u↓_k` (the k-th largest entry), see [`top_k_threshold`];
//! * if `Top_k(u) <= alpha * Top_k(v)` for all `k`, then
//!   `psi(u) <= alpha * psi(v)` for every monotone symmetric norm `psi`,
//!   see [`majorization_ratio`].

use crate::{tol, Error, Result};
use serde::{Deserialize, Serialize};

/// Specification of a monotone symmetric norm.
#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    /// `(sum u_j^p)^(1/p)` for a finite exponent `p >= 1`.
    Lp(f64),
    /// `max_j u_j`.
    Linf,
    /// Sum of the `k` largest entries (`k` clamps to the dimension).
    TopK(usize),
    /// `sum_k w_k * u↓_k` for non-increasing nonnegative weights.
    Ordered(Vec<f64>),
    /// `c * inner(u)` for a factor `c > 0`.
    Scaled(f64, Box<NormSpec>),
    /// Pointwise maximum of a nonempty list of members.
    MaxOf(Vec<NormSpec>),
}

impl NormSpec {
    /// The `L1` norm, i.e. `Lp(1)`.
    pub fn l1() -> Self {
        NormSpec::Lp(1.0)
    }

    /// The `Linf` norm.
    pub fn linf() -> Self {
        NormSpec::Linf
    }

    /// A finite-exponent `Lp` norm; rejects `p < 1`, NaN and infinity.
    pub fn lp(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidNorm(format!(
                "lp exponent must be finite and >= 1, got {p}"
            )));
        }
        Ok(NormSpec::Lp(p))
    }

    /// `Top_k`; rejects `k = 0`.
    pub fn topk(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidNorm("topk requires k >= 1".into()));
        }
        Ok(NormSpec::TopK(k))
    }

    /// Ordered weighted norm; weights must be nonempty, finite, nonnegative,
    /// non-increasing and not all zero.
    pub fn ordered(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidNorm("ordered weights must be nonempty".into()));
        }
        for &x in &w {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidNorm(format!(
                    "ordered weights must be finite and nonnegative, got {x}"
                )));
            }
        }
        if w.windows(2).any(|p| p[0] < p[1]) {
            return Err(Error::InvalidNorm(
                "ordered weights must be non-increasing".into(),
            ));
        }
        if w[0] <= 0.0 {
            return Err(Error::InvalidNorm(
                "ordered weights must have a positive leading weight".into(),
            ));
        }
        Ok(NormSpec::Ordered(w))
    }

    /// A positive rescaling of another member; rejects `c <= 0`.
    pub fn scaled(c: f64, inner: NormSpec) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::InvalidNorm(format!(
                "scale factor must be finite and positive, got {c}"
            )));
        }
        Ok(NormSpec::Scaled(c, Box::new(inner)))
    }

    /// Pointwise maximum; rejects an empty member list.
    pub fn max_of(members: Vec<NormSpec>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidNorm("max requires at least one member".into()));
        }
        Ok(NormSpec::MaxOf(members))
    }

    /// Evaluates the norm on `u`. Entries must be finite and nonnegative.
    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        for &x in u {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidVector(format!(
                    "norm arguments must be finite and nonnegative, got {x}"
                )));
            }
        }
        let sorted = SortedVector::from_unsorted(u);
        Ok(self.eval_sorted(&sorted))
    }

    /// Evaluates on an already-sorted vector, skipping re-validation. This is
    /// the hot path for configuration enumeration.
    pub fn eval_sorted(&self, u: &SortedVector) -> f64 {
        match self {
            NormSpec::Lp(p) => {
                if *p == 1.0 {
                    u.entries().iter().sum()
                } else {
                    let s: f64 = u.entries().iter().map(|&x| x.powf(*p)).sum();
                    s.powf(1.0 / *p)
                }
            }
            NormSpec::Linf => u.entries().first().copied().unwrap_or(0.0),
            NormSpec::TopK(k) => u.prefix_sum(*k),
            NormSpec::Ordered(w) => w
                .iter()
                .zip(u.entries())
                .map(|(&wk, &uk)| wk * uk)
                .sum(),
            NormSpec::Scaled(c, inner) => c * inner.eval_sorted(u),
            NormSpec::MaxOf(members) => members
                .iter()
                .map(|m| m.eval_sorted(u))
                .fold(0.0, f64::max),
        }
    }
}

mod serde_repr {
    //! JSON representation: a tagged object such as `{"kind":"topk","k":3}`.
    //! `Lp(1)` round-trips through the dedicated `{"kind":"l1"}` tag.

    use super::NormSpec;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    #[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
    pub(super) enum Repr {
        L1,
        Linf,
        Lp { p: f64 },
        TopK { k: usize },
        Ordered { w: Vec<f64> },
        Scaled { c: f64, inner: Box<Repr> },
        Max { members: Vec<Repr> },
    }

    impl From<&NormSpec> for Repr {
        fn from(spec: &NormSpec) -> Repr {
            match spec {
                NormSpec::Lp(p) if *p == 1.0 => Repr::L1,
                NormSpec::Lp(p) => Repr::Lp { p: *p },
                NormSpec::Linf => Repr::Linf,
                NormSpec::TopK(k) => Repr::TopK { k: *k },
                NormSpec::Ordered(w) => Repr::Ordered { w: w.clone() },
                NormSpec::Scaled(c, inner) => Repr::Scaled {
                    c: *c,
                    inner: Box::new(inner.as_ref().into()),
                },
                NormSpec::MaxOf(members) => Repr::Max {
                    members: members.iter().map(Repr::from).collect(),
                },
            }
        }
    }

    impl TryFrom<Repr> for NormSpec {
        type Error = crate::Error;

        fn try_from(repr: Repr) -> crate::Result<NormSpec> {
            match repr {
                Repr::L1 => Ok(NormSpec::l1()),
                Repr::Linf => Ok(NormSpec::linf()),
                Repr::Lp { p } => NormSpec::lp(p),
                Repr::TopK { k } => NormSpec::topk(k),
                Repr::Ordered { w } => NormSpec::ordered(w),
                Repr::Scaled { c, inner } => {
                    NormSpec::scaled(c, NormSpec::try_from(*inner)?)
                }
                Repr::Max { members } => NormSpec::max_of(
                    members
                        .into_iter()
                        .map(NormSpec::try_from)
                        .collect::<crate::Result<Vec<_>>>()?,
                ),
            }
        }
    }
}

impl Serialize for NormSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_repr::Repr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = serde_repr::Repr::deserialize(d)?;
        NormSpec::try_from(repr).map_err(serde::de::Error::custom)
    }
}

/// A vector stored in non-increasing order, with cached prefix sums so that
/// `Top_k` queries are O(1).
#[derive(Debug, Clone, PartialEq)]
pub struct SortedVector {
    entries: Vec<f64>,
    prefix: Vec<f64>,
}

impl SortedVector {
    /// Sorts `u` non-increasingly (stable, so equal entries keep input order).
    pub fn from_unsorted(u: &[f64]) -> Self {
        let mut entries = u.to_vec();
        entries.sort_by(|a, b| b.partial_cmp(a).expect("NaN in sorted vector"));
        let mut prefix = Vec::with_capacity(entries.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for &x in &entries {
            acc += x;
            prefix.push(acc);
        }
        SortedVector { entries, prefix }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// The k-th largest entry (1-based). Panics if `k` is out of range.
    pub fn kth(&self, k: usize) -> f64 {
        assert!(k >= 1 && k <= self.entries.len(), "kth index out of range");
        self.entries[k - 1]
    }

    /// Sum of the `min(k, len)` largest entries.
    pub fn prefix_sum(&self, k: usize) -> f64 {
        self.prefix[k.min(self.entries.len())]
    }
}

/// Sum of the `k` largest entries of `u` (`k` clamps to the dimension).
/// Panics if `k = 0` or `u` is empty; callers own those cases.
pub fn top_k(u: &[f64], k: usize) -> f64 {
    assert!(k >= 1, "top_k requires k >= 1");
    assert!(!u.is_empty(), "top_k requires a nonempty vector");
    SortedVector::from_unsorted(u).prefix_sum(k)
}

/// The threshold form `k*t + sum_j (u_j - t)^+`. Minimising over `t >= 0`
/// recovers `top_k(u, k)`, with the minimum attained at `t = u↓_k`.
pub fn top_k_threshold(u: &[f64], k: usize, t: f64) -> f64 {
    assert!(k >= 1, "top_k_threshold requires k >= 1");
    assert!(t >= 0.0, "threshold must be nonnegative");
    let excess: f64 = u.iter().map(|&x| (x - t).max(0.0)).sum();
    k as f64 * t + excess
}

/// Zeroes every coordinate of `u` outside the index set `keep`; the dimension
/// is preserved. Errors on an out-of-range index.
pub fn restrict(u: &[f64], keep: &[usize]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; u.len()];
    for &j in keep {
        if j >= u.len() {
            return Err(Error::InvalidVector(format!(
                "restrict index {j} out of range for dimension {}",
                u.len()
            )));
        }
        out[j] = u[j];
    }
    Ok(out)
}

/// The smallest `alpha` with `Top_k(u) <= alpha * Top_k(v)` for every `k`:
/// `0` if `u = 0`, infinity if `v = 0 != u`. Panics on dimension mismatch.
///
/// Majorization controls every monotone symmetric norm, so the returned
/// `alpha` satisfies `psi(u) <= alpha * psi(v)` for every such norm `psi`.
pub fn majorization_ratio(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "majorization_ratio needs equal dimensions");
    let su = SortedVector::from_unsorted(u);
    let sv = SortedVector::from_unsorted(v);
    if su.prefix_sum(su.len().max(1)) <= tol::ZERO {
        return 0.0;
    }
    let mut alpha: f64 = 0.0;
    for k in 1..=u.len() {
        let tu = su.prefix_sum(k);
        let tv = sv.prefix_sum(k);
        if tv <= tol::ZERO {
            if tu > tol::ZERO {
                return f64::INFINITY;
            }
        } else {
            alpha = alpha.max(tu / tv);
        }
    }
    alpha
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_roundtrip(spec: &NormSpec) -> NormSpec {
        let text = serde_json::to_string(spec).unwrap();
        serde_json::from_str(&text).unwrap()
    }

    #[test]
    fn top_k_basics() {
        let u = [3.0, 1.0, 2.0];
        assert_eq!(top_k(&u, 1), 3.0);
        assert_eq!(top_k(&u, 2), 5.0);
        assert_eq!(top_k(&u, 3), 6.0);
        // k beyond the dimension clamps to the full sum
        assert_eq!(top_k(&u, 5), 6.0);
    }

    #[test]
    fn threshold_form_at_large_t_is_linear() {
        // with t above every entry the excess vanishes: k*t remains
        assert_eq!(top_k_threshold(&[3.0, 1.0, 2.0], 2, 10.0), 20.0);
    }

    #[test]
    fn threshold_form_attains_top_k_at_kth_entry() {
        let u = [3.0, 1.0, 2.0];
        for k in 1..=3 {
            let t = SortedVector::from_unsorted(&u).kth(k);
            let lhs = top_k_threshold(&u, k, t);
            let rhs = top_k(&u, k);
            assert!((lhs - rhs).abs() <= 1e-12, "k={k}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn threshold_form_grid_minimum_matches_top_k() {
        let u = [0.7, 5.3, 2.2, 2.2, 0.0];
        let hi = 6.0;
        for k in 1..=5 {
            let grid_min = (0..=2000)
                .map(|i| top_k_threshold(&u, k, hi * i as f64 / 2000.0))
                .fold(f64::INFINITY, f64::min);
            let exact = top_k(&u, k);
            assert!(grid_min >= exact - 1e-9, "grid undercuts Top_k at k={k}");
            assert!(grid_min <= exact + 1e-2, "grid too far above Top_k at k={k}");
        }
    }

    #[test]
    fn eval_lp_family() {
        let u = [3.0, 4.0];
        assert_eq!(NormSpec::l1().eval(&u).unwrap(), 7.0);
        assert_eq!(NormSpec::linf().eval(&u).unwrap(), 4.0);
        assert!((NormSpec::lp(2.0).unwrap().eval(&u).unwrap() - 5.0).abs() < 1e-12);
        // empty vector: every norm evaluates to 0
        assert_eq!(NormSpec::linf().eval(&[]).unwrap(), 0.0);
        assert_eq!(NormSpec::lp(3.0).unwrap().eval(&[]).unwrap(), 0.0);
    }

    #[test]
    fn eval_ordered_and_combinators() {
        let u = [3.0, 1.0, 2.0];
        let ordered = NormSpec::ordered(vec![2.0, 1.0]).unwrap();
        // 2*3 + 1*2, third entry carries implicit weight 0
        assert_eq!(ordered.eval(&u).unwrap(), 8.0);
        let scaled = NormSpec::scaled(2.0, NormSpec::l1()).unwrap();
        assert_eq!(scaled.eval(&[1.0, 2.0]).unwrap(), 6.0);

        // max{2*Top_1, Top_3} separates from any single Top_k or scaled Top_k:
        // on the all-ones vector the Top_3 branch wins, on a single spike the
        // scaled Top_1 branch wins.
        let mixed = NormSpec::max_of(vec![
            NormSpec::scaled(2.0, NormSpec::TopK(1)).unwrap(),
            NormSpec::TopK(3),
        ])
        .unwrap();
        assert_eq!(mixed.eval(&[1.0, 1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(mixed.eval(&[1.0, 0.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn eval_rejects_bad_entries() {
        assert!(NormSpec::l1().eval(&[1.0, -0.5]).is_err());
        assert!(NormSpec::l1().eval(&[f64::NAN]).is_err());
        assert!(NormSpec::l1().eval(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn constructors_validate() {
        assert!(NormSpec::lp(0.5).is_err());
        assert!(NormSpec::lp(f64::NAN).is_err());
        assert!(NormSpec::topk(0).is_err());
        assert!(NormSpec::ordered(vec![]).is_err());
        assert!(NormSpec::ordered(vec![1.0, 2.0]).is_err());
        assert!(NormSpec::ordered(vec![-1.0]).is_err());
        assert!(NormSpec::ordered(vec![0.0, 0.0]).is_err());
        assert!(NormSpec::scaled(0.0, NormSpec::l1()).is_err());
        assert!(NormSpec::max_of(vec![]).is_err());
    }

    #[test]
    fn json_tags_round_trip() {
        let specs = vec![
            NormSpec::l1(),
            NormSpec::linf(),
            NormSpec::lp(2.0).unwrap(),
            NormSpec::topk(3).unwrap(),
            NormSpec::ordered(vec![3.0, 1.0, 1.0]).unwrap(),
            NormSpec::scaled(2.0, NormSpec::topk(1).unwrap()).unwrap(),
            NormSpec::max_of(vec![NormSpec::l1(), NormSpec::linf()]).unwrap(),
        ];
        for spec in &specs {
            assert_eq!(&spec_roundtrip(spec), spec);
        }
        assert_eq!(serde_json::to_string(&NormSpec::l1()).unwrap(), r#"{"kind":"l1"}"#);
        assert_eq!(
            serde_json::to_string(&NormSpec::topk(3).unwrap()).unwrap(),
            r#"{"kind":"topk","k":3}"#
        );
        assert_eq!(
            serde_json::to_string(&NormSpec::lp(2.0).unwrap()).unwrap(),
            r#"{"kind":"lp","p":2.0}"#
        );
    }

    #[test]
    fn json_rejects_invalid_specs() {
        for text in [
            r#"{"kind":"lp","p":0.5}"#,
            r#"{"kind":"topk","k":0}"#,
            r#"{"kind":"ordered","w":[1.0,2.0]}"#,
            r#"{"kind":"scaled","c":-1.0,"inner":{"kind":"l1"}}"#,
            r#"{"kind":"max","members":[]}"#,
            r#"{"kind":"l7"}"#,
        ] {
            assert!(
                serde_json::from_str::<NormSpec>(text).is_err(),
                "accepted invalid spec {text}"
            );
        }
    }

    #[test]
    fn restrict_zeroes_complement() {
        let u = [1.0, 2.0, 3.0];
        assert_eq!(restrict(&u, &[0, 2]).unwrap(), vec![1.0, 0.0, 3.0]);
        assert_eq!(restrict(&u, &[]).unwrap(), vec![0.0; 3]);
        assert!(restrict(&u, &[3]).is_err());
    }

    #[test]
    fn majorization_ratio_cases() {
        assert_eq!(majorization_ratio(&[2.0, 0.0], &[1.0, 1.0]), 2.0);
        assert_eq!(majorization_ratio(&[0.0, 0.0], &[1.0, 1.0]), 0.0);
        assert_eq!(majorization_ratio(&[0.0, 0.0], &[0.0, 0.0]), 0.0);
        assert_eq!(majorization_ratio(&[1.0, 0.0], &[0.0, 0.0]), f64::INFINITY);
    }

    #[test]
    fn sorted_vector_is_stable_and_prefixed() {
        let s = SortedVector::from_unsorted(&[1.0, 3.0, 2.0, 3.0]);
        assert_eq!(s.entries(), &[3.0, 3.0, 2.0, 1.0]);
        assert_eq!(s.kth(1), 3.0);
        assert_eq!(s.kth(4), 1.0);
        assert_eq!(s.prefix_sum(2), 6.0);
        assert_eq!(s.prefix_sum(9), 9.0);
    }
}
