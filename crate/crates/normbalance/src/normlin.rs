//! Approximation scheme for norm-minimal item selection under a mass
//! constraint: given sizes `p`, masses `z`, a target `Z` and a monotone
//! symmetric norm `psi`, pick items `J` minimizing `psi(p[J])` subject to
//! `sum_{j in J} z_j >= Z`.
//!
//! The scheme rounds sizes up to powers of `1+eps`, then guesses a sketch of
//! an optimal solution: the largest selected size, the largest selected mass,
//! a non-increasing threshold vector `R` over a sparse index set `POS`, and a
//! per-size-class selection count. Each guess induces a small feasibility LP
//! whose fractional solution is rounded class by class; the best candidate
//! over all guesses is returned. The loss is bounded by `1 + 143*eps`.
//!
//! Guesses inconsistent with *every* candidate optimum (class counts larger
//! than the class, mass targets above the reachable total, duplicate
//! `(size, mass)` anchor pairs) are skipped: their LPs are infeasible by
//! construction, so skipping them changes no outcome, only the work done.

use rayon::prelude::*;

use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::norms::NormSpec;
use crate::tol;
use crate::{Error, Result};

/// Sparse index set `1 = k_1 < k_2 < ... < n` with geometric-ish gaps,
/// plus `next`/`prev` lookups against it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pos {
    elems: Vec<usize>,
    n: usize,
}

impl Pos {
    /// Iterative construction: start at 1, repeatedly append
    /// `min(n, ceil((1+eps) * last))` until `n` is reached.
    pub fn iterative(n: usize, epsilon: f64) -> Pos {
        assert!(n >= 1, "index set needs n >= 1");
        assert!(
            epsilon > 0.0 && epsilon <= 0.5,
            "epsilon must lie in (0, 1/2], got {epsilon}"
        );
        let mut elems = vec![1usize];
        while *elems.last().unwrap() < n {
            let last = *elems.last().unwrap();
            let raw = ((1.0 + epsilon) * last as f64 - 1e-9).ceil() as usize;
            elems.push(raw.max(last + 1).min(n));
        }
        Pos { elems, n }
    }

    /// Doubling construction: `1, 2, 4, ..., min(2^s, n)` up to `n`.
    pub fn powers_of_two(n: usize) -> Pos {
        assert!(n >= 1, "index set needs n >= 1");
        let mut elems = vec![1usize];
        while *elems.last().unwrap() < n {
            let last = *elems.last().unwrap();
            elems.push((last * 2).min(n));
        }
        Pos { elems, n }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always contains 1
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn contains(&self, k: usize) -> bool {
        self.elems.binary_search(&k).is_ok()
    }

    /// Smallest member greater than `k`; `n + 1` when none is.
    pub fn next(&self, k: usize) -> usize {
        match self.elems.iter().find(|&&t| t > k) {
            Some(&t) => t,
            None => self.n + 1,
        }
    }

    /// Largest member smaller than `k`; `0` when none is.
    pub fn prev(&self, k: usize) -> usize {
        match self.elems.iter().rev().find(|&&t| t < k) {
            Some(&t) => t,
            None => 0,
        }
    }
}

/// A validated selection instance. Zero-size items are accepted up front
/// (taking them is free and only helps the mass constraint), so the stored
/// sizes are strictly positive and the stored target is already reduced by
/// the pre-accepted mass.
#[derive(Debug, Clone)]
pub struct NormLinInstance {
    /// strictly positive sizes, one per kept item
    p: Vec<f64>,
    /// nonnegative masses, aligned with `p`
    z: Vec<f64>,
    /// remaining mass target after pre-acceptance
    z_target: f64,
    psi: NormSpec,
    epsilon: f64,
    /// original indices of the kept items
    kept: Vec<usize>,
    /// original indices of pre-accepted zero-size items
    pre_accepted: Vec<usize>,
    /// original target, before pre-acceptance
    original_target: f64,
    /// total mass over all original items
    total_mass: f64,
}

impl NormLinInstance {
    pub fn new(
        p: Vec<f64>,
        z: Vec<f64>,
        z_target: f64,
        psi: NormSpec,
        epsilon: f64,
    ) -> Result<Self> {
        if p.len() != z.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} sizes vs {} masses",
                p.len(),
                z.len()
            )));
        }
        for &v in &p {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "sizes must be finite and nonnegative, got {v}"
                )));
            }
        }
        for &v in &z {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "masses must be finite and nonnegative, got {v}"
                )));
            }
        }
        if !z_target.is_finite() || z_target < 0.0 {
            return Err(Error::InvalidInstance(format!(
                "mass target must be finite and nonnegative, got {z_target}"
            )));
        }
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return Err(Error::InvalidInstance(format!(
                "epsilon must lie in (0, 1/2], got {epsilon}"
            )));
        }
        let total_mass = z.iter().sum();
        let mut kept = Vec::new();
        let mut pre_accepted = Vec::new();
        let mut kept_p = Vec::new();
        let mut kept_z = Vec::new();
        let mut free_mass = 0.0;
        for (j, (&pj, &zj)) in p.iter().zip(&z).enumerate() {
            if pj == 0.0 {
                pre_accepted.push(j);
                free_mass += zj;
            } else {
                kept.push(j);
                kept_p.push(pj);
                kept_z.push(zj);
            }
        }
        Ok(NormLinInstance {
            p: kept_p,
            z: kept_z,
            z_target: (z_target - free_mass).max(0.0),
            psi,
            epsilon,
            kept,
            pre_accepted,
            original_target: z_target,
            total_mass,
        })
    }

    /// Number of kept (positive-size) items.
    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn sizes(&self) -> &[f64] {
        &self.p
    }

    pub fn masses(&self) -> &[f64] {
        &self.z
    }

    /// Mass target still to cover after pre-acceptance.
    pub fn target(&self) -> f64 {
        self.z_target
    }

    pub fn norm(&self) -> &NormSpec {
        &self.psi
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn kept_indices(&self) -> &[usize] {
        &self.kept
    }

    pub fn pre_accepted(&self) -> &[usize] {
        &self.pre_accepted
    }

    /// True iff no selection can reach the target (up to a 1e-9 slack).
    pub fn infeasible(&self) -> bool {
        self.total_mass < self.original_target - tol::ZERO
    }
}

/// Rounds each positive entry up to the nearest integer power of `1+eps`,
/// returned as the integer exponents.
pub fn round_up_exponents(p: &[f64], epsilon: f64) -> Vec<i64> {
    let base = 1.0 + epsilon;
    let lb = base.ln();
    p.iter()
        .map(|&x| {
            assert!(x > 0.0, "rounding requires positive sizes");
            let mut e = (x.ln() / lb - tol::LOG_NUDGE).ceil() as i64;
            // the log estimate can be off by one ulp either way; fix up
            // against the actual powers
            while base.powi(e as i32) < x {
                e += 1;
            }
            while e > i64::MIN && base.powi((e - 1) as i32) >= x {
                e -= 1;
            }
            e
        })
        .collect()
}

/// Rounds each positive entry up to the nearest integer power of `1+eps`.
/// The ratio to the original value lies in `[1, 1+eps)`.
pub fn round_up_powers(p: &[f64], epsilon: f64) -> Vec<f64> {
    let base = 1.0 + epsilon;
    round_up_exponents(p, epsilon)
        .into_iter()
        .map(|e| base.powi(e as i32))
        .collect()
}

/// One guess: anchor items, threshold exponents over `POS`, and the selected
/// count per size class. Exponents are for powers of `1+eps` in rescaled
/// units where the largest selected size is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NormLinGuess {
    /// kept-item index whose size is guessed largest in the optimum
    pub j1: usize,
    /// kept-item index whose mass is guessed largest in the optimum
    pub j2: usize,
    pub pos: Pos,
    /// non-increasing exponents of the thresholds, one per `POS` element;
    /// the first is always 0
    pub r_exp: Vec<i64>,
    /// `(class exponent, label)` pairs, ascending by exponent; label `t >= 0`
    /// means exactly `t` items of that class are selected, `-1` means more
    /// than `ceil(1/eps)` of them are
    pub labels: Vec<(i64, i32)>,
}

/// Per-anchor-pair data shared by every guess with the same `(j1, j2)`.
#[derive(Debug, Clone)]
struct PairCtx {
    j1: usize,
    j2: usize,
    /// kept-item indices surviving the rescaled size/mass caps
    survivors: Vec<usize>,
    /// rescaled size exponents, aligned with `survivors` (all <= 0)
    exps: Vec<i64>,
    /// distinct admissible threshold exponents, descending (starts at 0)
    exp_menu: Vec<i64>,
}

fn ceil_inv(epsilon: f64) -> i32 {
    (1.0 / epsilon - tol::LOG_NUDGE).ceil() as i32
}

/// Builds the shared context for an anchor pair, or `None` when the pair is
/// inconsistent with any optimum (the anchors would eliminate themselves).
fn pair_context(
    inst: &NormLinInstance,
    rounded_exp: &[i64],
    j1: usize,
    j2: usize,
) -> Option<PairCtx> {
    let z = inst.masses();
    if z[j2] <= 0.0 && inst.target() > tol::ZERO {
        return None;
    }
    // the max-size anchor cannot out-mass the max-mass anchor, and vice versa
    if z[j1] > z[j2] * (1.0 + 1e-12) || rounded_exp[j2] > rounded_exp[j1] {
        return None;
    }
    let n = inst.len();
    let base = 1.0 + inst.epsilon();
    let floor_exp = {
        let target = inst.epsilon() / n as f64;
        let mut e = (target.ln() / base.ln() - tol::LOG_NUDGE).ceil() as i64;
        while base.powi(e as i32) < target {
            e += 1;
        }
        while base.powi((e - 1) as i32) >= target {
            e -= 1;
        }
        e
    };
    let mut survivors = Vec::new();
    let mut exps = Vec::new();
    let z_cap = z[j2] * (1.0 + 1e-12);
    for j in 0..n {
        let e = rounded_exp[j] - rounded_exp[j1];
        if e <= 0 && z[j] <= z_cap {
            survivors.push(j);
            exps.push(e);
        }
    }
    // no subset of the survivors reaches the target: skip the pair
    let reach: f64 = survivors.iter().map(|&j| z[j]).sum();
    if reach < inst.target() - tol::FEASIBILITY {
        return None;
    }
    // admissible threshold entries: either a survivor's size or the floor
    let mut exp_menu: Vec<i64> = exps
        .iter()
        .copied()
        .filter(|&e| e >= floor_exp)
        .chain(std::iter::once(floor_exp))
        .collect();
    exp_menu.sort_unstable_by(|a, b| b.cmp(a));
    exp_menu.dedup();
    Some(PairCtx {
        j1,
        j2,
        survivors,
        exps,
        exp_menu,
    })
}

/// All non-increasing threshold exponent vectors over `POS` drawn from the
/// pair's menu, first entry pinned to 0.
fn threshold_vectors(ctx: &PairCtx, pos: &Pos) -> Vec<Vec<i64>> {
    let menu = &ctx.exp_menu; // descending, starts at 0
    let slots = pos.len() - 1;
    let mut out = Vec::new();
    let mut idx = vec![0usize; slots]; // non-decreasing indices into menu
    loop {
        let mut v = Vec::with_capacity(slots + 1);
        v.push(0i64);
        v.extend(idx.iter().map(|&i| menu[i]));
        out.push(v);
        // advance the non-decreasing odometer
        let mut s = slots;
        loop {
            if s == 0 {
                return out;
            }
            s -= 1;
            if idx[s] + 1 < menu.len() {
                idx[s] += 1;
                for t in s + 1..slots {
                    idx[t] = idx[s];
                }
                break;
            }
        }
    }
}

/// Class exponent of one item: the smallest threshold entry at least as
/// large as the item's size, compared exactly in exponent space.
fn class_of(item_exp: i64, pwr: &[i64]) -> i64 {
    // `pwr` ascending; all items have exponent <= 0 = max(pwr)
    *pwr.iter().find(|&&e| e >= item_exp).expect("0 is always present")
}

/// Distinct exponents of a threshold vector, ascending.
fn distinct_exponents(r_exp: &[i64]) -> Vec<i64> {
    let mut pwr = r_exp.to_vec();
    pwr.sort_unstable();
    pwr.dedup();
    pwr
}

/// Label menus per class under the counting rules: a class with `c` surviving
/// items allows exact counts `0..=min(c, ceil(1/eps))`, and the "many" label
/// only when `c > ceil(1/eps)`.
fn label_menus(class_sizes: &[usize], cap: i32) -> Vec<Vec<i32>> {
    class_sizes
        .iter()
        .map(|&c| {
            let mut menu: Vec<i32> = (0..=(cap.min(c as i32))).collect();
            if c as i32 >= cap + 1 {
                menu.push(-1);
            }
            menu
        })
        .collect()
}

/// All guesses for one anchor pair, in deterministic order.
fn guesses_for_pair(ctx: &PairCtx, pos: &Pos, cap: i32) -> Vec<NormLinGuess> {
    let mut out = Vec::new();
    for r_exp in threshold_vectors(ctx, pos) {
        let pwr = distinct_exponents(&r_exp);
        let mut class_sizes = vec![0usize; pwr.len()];
        for &e in &ctx.exps {
            let cls = class_of(e, &pwr);
            let slot = pwr.binary_search(&cls).unwrap();
            class_sizes[slot] += 1;
        }
        let menus = label_menus(&class_sizes, cap);
        // odometer over the label menus
        let mut pick = vec![0usize; pwr.len()];
        'labels: loop {
            let labels: Vec<(i64, i32)> = pwr
                .iter()
                .zip(&pick)
                .enumerate()
                .map(|(s, (&e, &i))| (e, menus[s][i]))
                .collect();
            out.push(NormLinGuess {
                j1: ctx.j1,
                j2: ctx.j2,
                pos: pos.clone(),
                r_exp: r_exp.clone(),
                labels,
            });
            let mut s = pwr.len();
            loop {
                if s == 0 {
                    break 'labels;
                }
                s -= 1;
                if pick[s] + 1 < menus[s].len() {
                    pick[s] += 1;
                    for t in s + 1..pwr.len() {
                        pick[t] = 0;
                    }
                    break;
                }
            }
        }
    }
    out
}

/// Valid anchor pairs in scan order, deduplicated by value: two valid pairs
/// with identical (rescaled size, anchor mass) values generate identical
/// guess blocks, so only the first representative is kept. Invalid pairs do
/// not claim their key — a later valid pair with the same values must still
/// stream.
fn anchor_pairs(inst: &NormLinInstance, rounded_exp: &[i64]) -> Vec<PairCtx> {
    let n = inst.len();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for j1 in 0..n {
        for j2 in 0..n {
            let key = (rounded_exp[j1], inst.masses()[j2].to_bits());
            if seen.contains(&key) {
                continue;
            }
            if let Some(ctx) = pair_context(inst, rounded_exp, j1, j2) {
                seen.insert(key);
                out.push(ctx);
            }
        }
    }
    out
}

/// Streams every guess for the instance in deterministic order.
pub fn enumerate_guesses(inst: &NormLinInstance) -> impl Iterator<Item = NormLinGuess> + '_ {
    let rounded_exp = round_up_exponents(inst.sizes(), inst.epsilon());
    let pos = Pos::iterative(inst.len().max(1), inst.epsilon());
    let cap = ceil_inv(inst.epsilon());
    anchor_pairs(inst, &rounded_exp)
        .into_iter()
        .flat_map(move |ctx| guesses_for_pair(&ctx, &pos, cap).into_iter())
}

/// The feasibility LP for one guess. Returns the program together with the
/// kept-item index of each variable. Variables exist only for items whose
/// rescaled size and mass fit under the anchors; everything else is fixed to
/// zero by omission.
pub fn build_nlin_lp(
    inst: &NormLinInstance,
    guess: &NormLinGuess,
) -> Result<(LinearProgram, Vec<usize>)> {
    let rounded_exp = round_up_exponents(inst.sizes(), inst.epsilon());
    let ctx = pair_context(inst, &rounded_exp, guess.j1, guess.j2).ok_or_else(|| {
        Error::Internal("guess anchors are inconsistent with the instance".into())
    })?;
    let pos = &guess.pos;
    if guess.r_exp.len() != pos.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} thresholds for {} index positions",
            guess.r_exp.len(),
            pos.len()
        )));
    }
    let base = 1.0 + inst.epsilon();
    let nv = ctx.survivors.len();
    let mut lp = LinearProgram::feasibility(nv);
    for v in 0..nv {
        lp.set_upper_bound(v, 1.0);
    }

    let pwr = distinct_exponents(&guess.r_exp);
    let class_exp: Vec<i64> = ctx.exps.iter().map(|&e| class_of(e, &pwr)).collect();

    // expansion of the thresholds to every index: position k in POS keeps its
    // own entry, positions in between inherit the previous one
    let n = inst.len();
    let mut expansion = Vec::with_capacity(n);
    {
        let elems = pos.elements();
        let mut slot = 0usize;
        for k in 1..=n {
            if slot + 1 < elems.len() && elems[slot + 1] <= k {
                slot += 1;
            }
            // elems[slot] is the largest POS element <= k
            expansion.push(base.powi(guess.r_exp[slot] as i32));
        }
    }

    // per-position cap rows: selected size overshoot above the threshold is
    // bounded by the expansion's slack at that position
    for (slot, &k) in pos.elements().iter().enumerate() {
        let rho_k = base.powi(guess.r_exp[slot] as i32);
        let coeffs: Vec<f64> = class_exp
            .iter()
            .map(|&ce| {
                if ce > guess.r_exp[slot] {
                    base.powi(ce as i32) - rho_k
                } else {
                    0.0
                }
            })
            .collect();
        let rhs: f64 = expansion[..k].iter().map(|&v| (v - rho_k).max(0.0)).sum();
        lp.add_row(coeffs, Relation::Le, rhs);
    }

    // mass row in original units (positive rescaling preserves feasibility)
    let mass_coeffs: Vec<f64> = ctx.survivors.iter().map(|&j| inst.masses()[j]).collect();
    lp.add_row(mass_coeffs, Relation::Ge, inst.target());

    // class count rows
    let cap = ceil_inv(inst.epsilon());
    for &(e, label) in &guess.labels {
        let coeffs: Vec<f64> = class_exp
            .iter()
            .map(|&ce| if ce == e { 1.0 } else { 0.0 })
            .collect();
        if label >= 0 {
            lp.add_row(coeffs, Relation::Eq, label as f64);
        } else {
            lp.add_row(coeffs, Relation::Ge, (1 + cap) as f64);
        }
    }
    Ok((lp, ctx.survivors))
}

/// Rounds a fractional LP solution class by class: a class labeled `t` keeps
/// its `t` largest-mass supported items, a class labeled "many" keeps
/// `ceil(sum of its fractions)` of them. Returns kept-item indices,
/// ascending.
pub fn round_nlin(
    inst: &NormLinInstance,
    guess: &NormLinGuess,
    vars: &[usize],
    xbar: &[f64],
) -> Result<Vec<usize>> {
    if vars.len() != xbar.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} variables vs {} values",
            vars.len(),
            xbar.len()
        )));
    }
    let rounded_exp = round_up_exponents(inst.sizes(), inst.epsilon());
    let pwr = distinct_exponents(&guess.r_exp);
    let mut chosen = Vec::new();
    for &(e, label) in &guess.labels {
        // supported items of this class
        let mut members: Vec<usize> = Vec::new();
        let mut frac_sum = 0.0;
        for (v, &j) in vars.iter().enumerate() {
            let item_exp = rounded_exp[j] - rounded_exp[guess.j1];
            if class_of(item_exp, &pwr) == e && xbar[v] > tol::ZERO {
                members.push(j);
                frac_sum += xbar[v];
            }
        }
        let want = if label >= 0 {
            label as usize
        } else {
            (frac_sum - tol::ZERO).ceil().max(0.0) as usize
        };
        if members.len() < want {
            return Err(Error::Internal(format!(
                "class {e} supports {} items but the rounding needs {want}",
                members.len()
            )));
        }
        // largest mass first; ties prefer the smaller size, then the lower index
        members.sort_by(|&a, &b| {
            inst.masses()[b]
                .partial_cmp(&inst.masses()[a])
                .unwrap()
                .then(inst.sizes()[a].partial_cmp(&inst.sizes()[b]).unwrap())
                .then(a.cmp(&b))
        });
        chosen.extend_from_slice(&members[..want]);
    }
    chosen.sort_unstable();
    chosen.dedup();
    Ok(chosen)
}

/// Result of the approximation scheme, in original item indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PtasOutcome {
    /// selected original item indices, ascending (pre-accepted zero-size
    /// items included)
    pub items: Vec<usize>,
    /// norm of the original sizes over `items`
    pub cost: f64,
    /// guesses actually evaluated (skipped inconsistent ones not counted)
    pub guesses_evaluated: u64,
    /// true when the guess budget ran out before the stream ended
    pub truncated: bool,
}

#[derive(Debug, Clone)]
struct Candidate {
    items: Vec<usize>, // kept-item indices
    cost: f64,
}

/// Runs the full scheme. `budget` caps the number of guesses evaluated; on
/// exhaustion the best candidate so far is returned with `truncated` set.
pub fn solve_ptas(inst: &NormLinInstance, budget: Option<u64>) -> Result<PtasOutcome> {
    if inst.infeasible() {
        return Err(Error::Infeasible(format!(
            "total mass falls short of the target {}",
            inst.original_target
        )));
    }
    if inst.target() <= tol::ZERO {
        // the pre-accepted items already cover the target
        return Ok(PtasOutcome {
            items: inst.pre_accepted().to_vec(),
            cost: 0.0,
            guesses_evaluated: 0,
            truncated: false,
        });
    }

    let rounded_exp = round_up_exponents(inst.sizes(), inst.epsilon());
    let pos = Pos::iterative(inst.len(), inst.epsilon());
    let cap = ceil_inv(inst.epsilon());
    let pairs = anchor_pairs(inst, &rounded_exp);

    let mut best: Option<Candidate> = None;
    let mut evaluated: u64 = 0;
    let mut truncated = false;

    'pairs: for ctx in pairs {
        let mut block = guesses_for_pair(&ctx, &pos, cap);
        if let Some(b) = budget {
            let remaining = b.saturating_sub(evaluated);
            if (block.len() as u64) > remaining {
                block.truncate(remaining as usize);
                truncated = true;
            }
        }
        evaluated += block.len() as u64;

        // guesses are independent; evaluate in parallel, reduce in stream order
        let results: Vec<Result<Option<Candidate>>> = block
            .par_iter()
            .map(|guess| evaluate_guess(inst, guess))
            .collect();
        for r in results {
            if let Some(cand) = r? {
                let better = match &best {
                    None => true,
                    Some(b) => cand.cost < b.cost,
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        if truncated {
            break 'pairs;
        }
    }

    let Some(best) = best else {
        return Err(Error::CapExceeded(format!(
            "no feasible candidate found within {evaluated} guesses"
        )));
    };
    let mut items: Vec<usize> = best
        .items
        .iter()
        .map(|&j| inst.kept_indices()[j])
        .chain(inst.pre_accepted().iter().copied())
        .collect();
    items.sort_unstable();
    Ok(PtasOutcome {
        items,
        cost: best.cost,
        guesses_evaluated: evaluated,
        truncated,
    })
}

fn evaluate_guess(inst: &NormLinInstance, guess: &NormLinGuess) -> Result<Option<Candidate>> {
    let (lp, vars) = build_nlin_lp(inst, guess)?;
    let sol = match crate::lp::solve_feasibility(&lp).map_err(Error::Lp)? {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Infeasible(_) => return Ok(None),
        LpOutcome::Unbounded => {
            return Err(Error::Internal(
                "feasibility program reported unbounded".into(),
            ))
        }
    };
    let items = round_nlin(inst, guess, &vars, &sol.x)?;
    let mass: f64 = items.iter().map(|&j| inst.masses()[j]).sum();
    if mass < inst.target() - tol::ZERO {
        // numerically sound roundings always reach the target; treat a miss
        // as a non-candidate rather than an answer
        return Ok(None);
    }
    let sizes: Vec<f64> = items.iter().map(|&j| inst.sizes()[j]).collect();
    let cost = inst.norm().eval(&sizes)?;
    Ok(Some(Candidate { items, cost }))
}

/// Builds the guess a given optimal selection would produce: anchors from its
/// largest size and mass, thresholds read off its sorted rounded sizes, class
/// labels from its per-class counts. Used to certify that the guess stream
/// covers the optimum.
pub fn guess_from_optimum(inst: &NormLinInstance, optimum: &[usize]) -> Result<NormLinGuess> {
    if optimum.is_empty() {
        return Err(Error::InvalidInstance(
            "cannot sketch an empty optimal selection".into(),
        ));
    }
    let rounded_exp = round_up_exponents(inst.sizes(), inst.epsilon());
    let j1 = *optimum
        .iter()
        .max_by(|&&a, &&b| {
            rounded_exp[a]
                .cmp(&rounded_exp[b])
                .then(b.cmp(&a)) // prefer the lower index among ties
        })
        .unwrap();
    let j2 = *optimum
        .iter()
        .max_by(|&&a, &&b| {
            inst.masses()[a]
                .partial_cmp(&inst.masses()[b])
                .unwrap()
                .then(b.cmp(&a))
        })
        .unwrap();
    // swap the anchors for the representative pair that actually streams:
    // the first valid pair carrying the same (size exponent, mass) values
    let (j1, j2) = {
        let key = (rounded_exp[j1], inst.masses()[j2].to_bits());
        let mut found = None;
        'scan: for a in 0..inst.len() {
            for b in 0..inst.len() {
                if (rounded_exp[a], inst.masses()[b].to_bits()) == key
                    && pair_context(inst, &rounded_exp, a, b).is_some()
                {
                    found = Some((a, b));
                    break 'scan;
                }
            }
        }
        found.ok_or_else(|| {
            Error::Internal("the optimal selection induces no valid anchor pair".into())
        })?
    };
    let n = inst.len();
    let pos = Pos::iterative(n, inst.epsilon());
    let base = 1.0 + inst.epsilon();
    let floor_exp = {
        let target = inst.epsilon() / n as f64;
        let mut e = (target.ln() / base.ln() - tol::LOG_NUDGE).ceil() as i64;
        while base.powi(e as i32) < target {
            e += 1;
        }
        while base.powi((e - 1) as i32) >= target {
            e -= 1;
        }
        e
    };
    // rescaled selected exponents, descending, padded with "zero" sentinels
    let mut sel: Vec<i64> = optimum
        .iter()
        .map(|&j| rounded_exp[j] - rounded_exp[j1])
        .collect();
    sel.sort_unstable_by(|a, b| b.cmp(a));
    let r_exp: Vec<i64> = pos
        .elements()
        .iter()
        .map(|&k| {
            if k <= sel.len() && sel[k - 1] >= floor_exp {
                sel[k - 1]
            } else {
                floor_exp
            }
        })
        .collect();
    let pwr = distinct_exponents(&r_exp);
    let cap = ceil_inv(inst.epsilon());
    let labels: Vec<(i64, i32)> = pwr
        .iter()
        .map(|&e| {
            let count = optimum
                .iter()
                .filter(|&&j| class_of(rounded_exp[j] - rounded_exp[j1], &pwr) == e)
                .count() as i32;
            (e, if count > cap { -1 } else { count })
        })
        .collect();
    Ok(NormLinGuess {
        j1,
        j2,
        pos,
        r_exp,
        labels,
    })
}

/// Expansion of a guess's thresholds to all indices (position `k` keeps its
/// own entry, the gaps inherit from the previous position), as values.
pub fn expanded_thresholds(inst: &NormLinInstance, guess: &NormLinGuess) -> Vec<f64> {
    let base = 1.0 + inst.epsilon();
    let n = inst.len();
    let elems = guess.pos.elements();
    let mut out = Vec::with_capacity(n);
    let mut slot = 0usize;
    for k in 1..=n {
        if slot + 1 < elems.len() && elems[slot + 1] <= k {
            slot += 1;
        }
        out.push(base.powi(guess.r_exp[slot] as i32));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{solve_normlin_exact, ExactCaps};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn simple_instance() -> NormLinInstance {
        NormLinInstance::new(
            vec![1.0, 2.0, 3.0],
            vec![1.0, 1.0, 1.0],
            2.0,
            NormSpec::l1(),
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn iterative_positions_match_hand_execution() {
        let pos = Pos::iterative(10, 0.5);
        assert_eq!(pos.elements(), &[1, 2, 3, 5, 8, 10]);
        assert_eq!(Pos::iterative(1, 0.5).elements(), &[1]);
        assert_eq!(pos.next(3), 5);
        assert_eq!(pos.next(10), 11);
        assert_eq!(pos.prev(5), 3);
        assert_eq!(pos.prev(1), 0);
        assert!(pos.contains(8));
        assert!(!pos.contains(9));
    }

    #[test]
    fn doubling_positions() {
        assert_eq!(Pos::powers_of_two(5).elements(), &[1, 2, 4, 5]);
        assert_eq!(Pos::powers_of_two(16).elements(), &[1, 2, 4, 8, 16]);
        assert_eq!(Pos::powers_of_two(1).elements(), &[1]);
    }

    #[test]
    fn position_count_stays_logarithmic() {
        for &eps in &[0.2, 0.3, 0.5] {
            for &n in &[1usize, 2, 7, 50, 400, 3000, 10_000] {
                let pos = Pos::iterative(n, eps);
                let bound = 2.0 * ((n + 1) as f64).ln() / eps + 2.0;
                assert!(
                    (pos.len() as f64) <= bound,
                    "|POS| = {} exceeds {bound} for n={n}, eps={eps}",
                    pos.len()
                );
            }
        }
    }

    #[test]
    fn rounding_up_to_powers() {
        let eps = 0.5;
        let exact_power = 1.5f64.powi(3);
        let rounded = round_up_powers(&[exact_power, 1.1, 1.0], eps);
        assert_eq!(rounded[0], exact_power);
        assert!((rounded[1] - 1.5).abs() < 1e-12);
        assert_eq!(rounded[2], 1.0);
        // ratio always within [1, 1+eps)
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let x: f64 = rng.gen_range(1e-6..1e6);
            let r = round_up_powers(&[x], eps)[0];
            assert!(r >= x * (1.0 - 1e-12), "{r} < {x}");
            assert!(r < x * (1.0 + eps) * (1.0 + 1e-12), "{r} too far above {x}");
        }
    }

    #[test]
    fn single_item_guess_stream() {
        let inst =
            NormLinInstance::new(vec![2.0], vec![1.0], 1.0, NormSpec::l1(), 0.5).unwrap();
        let guesses: Vec<_> = enumerate_guesses(&inst).collect();
        // one anchor pair, one threshold vector, labels 0 and 1 for the only class
        assert_eq!(guesses.len(), 2);
        assert!(guesses.len() <= (ceil_inv(0.5) + 2) as usize);
        for g in &guesses {
            assert_eq!((g.j1, g.j2), (0, 0));
            assert_eq!(g.r_exp, vec![0]);
        }
        assert_eq!(guesses[0].labels, vec![(0, 0)]);
        assert_eq!(guesses[1].labels, vec![(0, 1)]);
    }

    #[test]
    fn guess_stream_matches_independent_count() {
        // recount the stream with independent combinatorics: for every
        // deduplicated consistent anchor pair, (number of non-increasing
        // threshold vectors) summed over label products
        let inst = NormLinInstance::new(
            vec![1.0, 2.0, 4.0, 8.0],
            vec![0.5, 1.0, 1.5, 2.0],
            2.0,
            NormSpec::linf(),
            0.5,
        )
        .unwrap();
        let streamed = enumerate_guesses(&inst).count();

        let rounded = round_up_exponents(inst.sizes(), inst.epsilon());
        let pos = Pos::iterative(inst.len(), inst.epsilon());
        let cap = ceil_inv(inst.epsilon());
        let mut expected = 0usize;
        let mut seen = std::collections::HashSet::new();
        for j1 in 0..inst.len() {
            for j2 in 0..inst.len() {
                if !seen.insert((rounded[j1], inst.masses()[j2].to_bits())) {
                    continue;
                }
                let Some(ctx) = pair_context(&inst, &rounded, j1, j2) else {
                    continue;
                };
                // count non-increasing vectors recursively rather than by odometer
                fn count_vecs(menu_len: usize, slots: usize, min_idx: usize) -> usize {
                    if slots == 0 {
                        return 1;
                    }
                    (min_idx..menu_len)
                        .map(|i| count_vecs(menu_len, slots - 1, i))
                        .sum()
                }
                let _ = count_vecs(ctx.exp_menu.len(), pos.len() - 1, 0);
                // label products depend on each vector's class sizes, so walk
                // the vectors but tally labels by formula
                for r_exp in threshold_vectors(&ctx, &pos) {
                    let pwr = distinct_exponents(&r_exp);
                    let mut sizes = vec![0usize; pwr.len()];
                    for &e in &ctx.exps {
                        let slot = pwr.binary_search(&class_of(e, &pwr)).unwrap();
                        sizes[slot] += 1;
                    }
                    let product: usize = sizes
                        .iter()
                        .map(|&c| {
                            let exact = (cap.min(c as i32) + 1) as usize;
                            exact + usize::from(c as i32 >= cap + 1)
                        })
                        .product();
                    expected += product;
                }
            }
        }
        assert_eq!(streamed, expected);
        assert!(streamed > 0);
    }

    #[test]
    fn every_threshold_vector_is_non_increasing() {
        let inst = NormLinInstance::new(
            vec![0.3, 2.0, 5.0, 1.0, 0.9],
            vec![1.0, 0.2, 0.7, 1.3, 0.4],
            1.5,
            NormSpec::topk(2).unwrap(),
            0.4,
        )
        .unwrap();
        for g in enumerate_guesses(&inst) {
            for w in g.r_exp.windows(2) {
                assert!(w[0] >= w[1], "thresholds increased: {:?}", g.r_exp);
            }
            assert_eq!(g.r_exp[0], 0);
        }
    }

    #[test]
    fn ptas_on_the_three_item_example() {
        let inst = simple_instance();
        let out = solve_ptas(&inst, None).unwrap();
        assert!((out.cost - 3.0).abs() < 1e-9, "cost {}", out.cost);
        assert_eq!(out.items, vec![0, 1]);
        assert!(!out.truncated);
    }

    #[test]
    fn ptas_trivial_cases() {
        // zero target: nothing selected
        let inst =
            NormLinInstance::new(vec![1.0, 2.0], vec![1.0, 1.0], 0.0, NormSpec::l1(), 0.5)
                .unwrap();
        let out = solve_ptas(&inst, None).unwrap();
        assert!(out.items.is_empty());
        assert_eq!(out.cost, 0.0);

        // single item exactly covering the target
        let inst =
            NormLinInstance::new(vec![4.0], vec![2.5], 2.5, NormSpec::l1(), 0.5).unwrap();
        let out = solve_ptas(&inst, None).unwrap();
        assert_eq!(out.items, vec![0]);
        assert!((out.cost - 4.0).abs() < 1e-12);

        // unreachable target
        let inst =
            NormLinInstance::new(vec![1.0], vec![1.0], 3.0, NormSpec::l1(), 0.5).unwrap();
        assert!(matches!(solve_ptas(&inst, None), Err(Error::Infeasible(_))));
    }

    #[test]
    fn zero_size_items_are_pre_accepted() {
        let inst = NormLinInstance::new(
            vec![0.0, 5.0, 0.0, 1.0],
            vec![2.0, 1.0, 1.0, 1.0],
            3.5,
            NormSpec::l1(),
            0.5,
        )
        .unwrap();
        assert_eq!(inst.pre_accepted(), &[0, 2]);
        assert_eq!(inst.len(), 2);
        assert!((inst.target() - 0.5).abs() < 1e-12);
        let out = solve_ptas(&inst, None).unwrap();
        // free items cover all but 0.5; the cheapest positive item finishes it
        assert_eq!(out.items, vec![0, 2, 3]);
        assert!((out.cost - 1.0).abs() < 1e-12);
        let mass: f64 = out.items.iter().map(|&j| [2.0, 1.0, 1.0, 1.0][j]).sum();
        assert!(mass >= 3.5 - 1e-9);
    }

    #[test]
    fn budget_truncation_is_flagged() {
        let inst = simple_instance();
        let full = solve_ptas(&inst, None).unwrap();
        assert!(full.guesses_evaluated > 2);
        let capped = solve_ptas(&inst, Some(full.guesses_evaluated - 1));
        match capped {
            Ok(out) => {
                assert!(out.truncated);
                assert!(out.guesses_evaluated < full.guesses_evaluated);
            }
            Err(Error::CapExceeded(_)) => {} // budget too small for any candidate
            Err(e) => panic!("unexpected error {e}"),
        }
        assert!(matches!(
            solve_ptas(&inst, Some(0)),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn ptas_is_deterministic() {
        let inst = NormLinInstance::new(
            vec![0.7, 2.0, 1.1, 3.0, 0.4],
            vec![0.2, 1.0, 0.8, 1.5, 0.3],
            2.0,
            NormSpec::topk(2).unwrap(),
            0.5,
        )
        .unwrap();
        let a = solve_ptas(&inst, None).unwrap();
        let b = solve_ptas(&inst, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ptas_respects_the_ratio_bound_and_feasibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..30 {
            let n = rng.gen_range(1..=6);
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..8.0)).collect();
            let z: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
            let total: f64 = z.iter().sum();
            let z_target = rng.gen_range(0.0..total.max(1e-9));
            let psi = crate::verify::random_norm_spec(&mut rng, n.max(1), 1);
            let eps = 0.5;
            let inst =
                NormLinInstance::new(p.clone(), z.clone(), z_target, psi.clone(), eps).unwrap();
            let out = solve_ptas(&inst, None).unwrap();
            let mass: f64 = out.items.iter().map(|&j| z[j]).sum();
            assert!(mass >= z_target - 1e-9, "trial {trial}: infeasible output");
            let exact = solve_normlin_exact(&p, &z, z_target, &psi, ExactCaps::default())
                .unwrap()
                .expect("target below total mass");
            assert!(
                out.cost <= (1.0 + 143.0 * eps) * exact.cost + 1e-7,
                "trial {trial}: cost {} vs exact {}",
                out.cost,
                exact.cost
            );
        }
    }

    #[test]
    fn optimum_sketch_is_streamed_and_its_lp_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..20 {
            let n = rng.gen_range(1..=5);
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..6.0)).collect();
            let z: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
            let total: f64 = z.iter().sum();
            let z_target = rng.gen_range(total * 0.3..total);
            let psi = NormSpec::topk(rng.gen_range(1..=n)).unwrap();
            let eps = 0.5;
            let inst =
                NormLinInstance::new(p.clone(), z.clone(), z_target, psi.clone(), eps).unwrap();

            // optimum of the size-rounded instance
            let rounded = round_up_powers(&p, eps);
            let opt = solve_normlin_exact(&rounded, &z, z_target, &psi, ExactCaps::default())
                .unwrap()
                .expect("feasible by construction");
            if opt.items.is_empty() {
                continue;
            }
            let guess = guess_from_optimum(&inst, &opt.items).unwrap();
            assert!(
                enumerate_guesses(&inst).any(|g| g == guess),
                "trial {trial}: sketch of the optimum missing from the stream"
            );

            // its LP admits the indicator of the optimum
            let (lp, vars) = build_nlin_lp(&inst, &guess).unwrap();
            let x_star: Vec<f64> = vars
                .iter()
                .map(|j| if opt.items.contains(j) { 1.0 } else { 0.0 })
                .collect();
            for r in 0..lp.num_rows() {
                let (a, rel, b) = lp.row(r);
                let lhs: f64 = a.iter().zip(&x_star).map(|(&c, &x)| c * x).sum();
                let ok = match rel {
                    Relation::Le => lhs <= b + 1e-7,
                    Relation::Ge => lhs >= b - 1e-7,
                    Relation::Eq => (lhs - b).abs() <= 1e-7,
                };
                assert!(ok, "trial {trial}: row {r} fails at the indicator");
            }
            assert!(matches!(
                crate::lp::solve_feasibility(&lp).unwrap(),
                LpOutcome::Optimal(_)
            ));

            // threshold expansion dominates the optimum within the promised factor
            let expansion = expanded_thresholds(&inst, &guess);
            let mut o: Vec<f64> = opt
                .items
                .iter()
                .map(|&j| rounded[j] / rounded[guess.j1])
                .collect();
            o.resize(n, 0.0);
            let lhs = psi.eval(&expansion).unwrap();
            let rhs = psi.eval(&o).unwrap();
            assert!(
                lhs <= (1.0 + 11.0 * eps) * rhs + 1e-7,
                "trial {trial}: expansion {lhs} vs optimum {rhs}"
            );
        }
    }

    #[test]
    fn rounding_examples() {
        let inst = NormLinInstance::new(
            vec![1.0, 1.0, 1.0, 1.0],
            vec![4.0, 3.0, 2.0, 1.0],
            1.0,
            NormSpec::l1(),
            0.5,
        )
        .unwrap();
        let guess = NormLinGuess {
            j1: 0,
            j2: 0,
            pos: Pos::iterative(4, 0.5),
            r_exp: vec![0, 0, 0],
            labels: vec![(0, -1)],
        };
        // fractional sum 3.2 over one "many" class selects ceil(3.2) = 4 items
        let vars = vec![0, 1, 2, 3];
        let xbar = vec![1.0, 1.0, 0.7, 0.5];
        let out = round_nlin(&inst, &guess, &vars, &xbar).unwrap();
        assert_eq!(out, vec![0, 1, 2, 3]);

        // integral solution: the support is returned as-is
        let guess2 = NormLinGuess {
            labels: vec![(0, 2)],
            ..guess.clone()
        };
        let out = round_nlin(&inst, &guess2, &vars, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(out, vec![0, 1]);

        // label 0 contributes nothing
        let guess3 = NormLinGuess {
            labels: vec![(0, 0)],
            ..guess
        };
        let out = round_nlin(&inst, &guess3, &vars, &[0.0; 4]).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn instance_validation() {
        assert!(NormLinInstance::new(
            vec![1.0],
            vec![1.0, 2.0],
            0.0,
            NormSpec::l1(),
            0.5
        )
        .is_err());
        assert!(
            NormLinInstance::new(vec![-1.0], vec![1.0], 0.0, NormSpec::l1(), 0.5).is_err()
        );
        assert!(
            NormLinInstance::new(vec![1.0], vec![1.0], -2.0, NormSpec::l1(), 0.5).is_err()
        );
        assert!(
            NormLinInstance::new(vec![1.0], vec![1.0], 0.0, NormSpec::l1(), 0.7).is_err()
        );
    }
}
