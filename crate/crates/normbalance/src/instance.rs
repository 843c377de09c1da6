//! Problem instances: `n` jobs, `m` unrelated machines, per-machine inner
//! norms and one outer norm. Forbidden machine/job pairs are `None` in the
//! processing-time matrix (`null` in files). Files index machines and jobs
//! from 1; everything in memory is 0-indexed, converted only at the I/O
//! boundary.

use crate::norms::NormSpec;
use crate::verify::random_norm_spec;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    m: usize,
    n: usize,
    /// `p[i][j]`: processing time of job `j` on machine `i`, `None` if forbidden.
    p: Vec<Vec<Option<f64>>>,
    inner_norms: Vec<NormSpec>,
    outer_norm: NormSpec,
}

impl Instance {
    pub fn from_parts(
        p: Vec<Vec<Option<f64>>>,
        inner_norms: Vec<NormSpec>,
        outer_norm: NormSpec,
    ) -> Result<Self> {
        let m = p.len();
        if m == 0 {
            return Err(Error::InvalidInstance("need at least one machine".into()));
        }
        let n = p[0].len();
        if n == 0 {
            return Err(Error::InvalidInstance("need at least one job".into()));
        }
        if p.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInstance("ragged processing matrix".into()));
        }
        for (i, row) in p.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if let Some(x) = v {
                    if !x.is_finite() || x <= 0.0 {
                        return Err(Error::InvalidInstance(format!(
                            "processing time p[{}][{}] must be finite and positive, got {x}",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        for j in 0..n {
            if (0..m).all(|i| p[i][j].is_none()) {
                return Err(Error::InvalidInstance(format!(
                    "job {} is forbidden on every machine",
                    j + 1
                )));
            }
        }
        if inner_norms.len() != m {
            return Err(Error::InvalidInstance(format!(
                "expected {m} inner norms, got {}",
                inner_norms.len()
            )));
        }
        Ok(Instance { m, n, p, inner_norms, outer_norm })
    }

    pub fn machines(&self) -> usize {
        self.m
    }

    pub fn jobs(&self) -> usize {
        self.n
    }

    pub fn processing(&self, i: usize, j: usize) -> Option<f64> {
        self.p[i][j]
    }

    pub fn allowed(&self, i: usize, j: usize) -> bool {
        self.p[i][j].is_some()
    }

    pub fn inner_norm(&self, i: usize) -> &NormSpec {
        &self.inner_norms[i]
    }

    pub fn inner_norms(&self) -> &[NormSpec] {
        &self.inner_norms
    }

    pub fn outer_norm(&self) -> &NormSpec {
        &self.outer_norm
    }

    pub fn allowed_jobs(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.allowed(i, j)).collect()
    }

    pub fn allowed_machines(&self, j: usize) -> Vec<usize> {
        (0..self.m).filter(|&i| self.allowed(i, j)).collect()
    }

    /// The n-dimensional vector carrying `p[i][j]` on coordinates `j` in
    /// `jobs` and zero elsewhere. Errors if some pair is forbidden.
    pub fn restricted_row(&self, i: usize, jobs: &[usize]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        for &j in jobs {
            if j >= self.n {
                return Err(Error::InvalidVector(format!(
                    "job index {} out of range",
                    j + 1
                )));
            }
            out[j] = self.p[i][j].ok_or_else(|| {
                Error::InvalidAssignment(format!(
                    "job {} is forbidden on machine {}",
                    j + 1,
                    i + 1
                ))
            })?;
        }
        Ok(out)
    }

    /// The inner-norm value of machine `i` for a job set given as a bitmask.
    pub fn load_of_mask(&self, i: usize, mask: u64) -> Result<f64> {
        let jobs: Vec<usize> = (0..self.n).filter(|&j| mask >> j & 1 == 1).collect();
        let row = self.restricted_row(i, &jobs)?;
        self.inner_norms[i].eval(&row)
    }

    fn scale_by(&self, s: f64) -> Instance {
        let p = self
            .p
            .iter()
            .map(|row| row.iter().map(|v| v.map(|x| x * s)).collect())
            .collect();
        Instance {
            m: self.m,
            n: self.n,
            p,
            inner_norms: self.inner_norms.clone(),
            outer_norm: self.outer_norm.clone(),
        }
    }
}

/// A total assignment of jobs to machines, 0-indexed in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    sigma: Vec<usize>,
}

impl Assignment {
    pub fn new(sigma: Vec<usize>) -> Self {
        Assignment { sigma }
    }

    pub fn machine_of(&self, j: usize) -> usize {
        self.sigma[j]
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Jobs assigned to machine `i`, ascending.
    pub fn jobs_of(&self, i: usize) -> Vec<usize> {
        (0..self.sigma.len()).filter(|&j| self.sigma[j] == i).collect()
    }

    pub fn validate(&self, inst: &Instance) -> Result<()> {
        if self.sigma.len() != inst.jobs() {
            return Err(Error::InvalidAssignment(format!(
                "assignment covers {} jobs, instance has {}",
                self.sigma.len(),
                inst.jobs()
            )));
        }
        for (j, &i) in self.sigma.iter().enumerate() {
            if i >= inst.machines() {
                return Err(Error::InvalidAssignment(format!(
                    "machine index {} out of range for job {}",
                    i + 1,
                    j + 1
                )));
            }
            if !inst.allowed(i, j) {
                return Err(Error::InvalidAssignment(format!(
                    "job {} is forbidden on machine {}",
                    j + 1,
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// The load of machine `i` under `a`: the inner norm of the restricted row.
pub fn machine_load(inst: &Instance, a: &Assignment, i: usize) -> Result<f64> {
    if a.len() != inst.jobs() {
        return Err(Error::InvalidAssignment("assignment length mismatch".into()));
    }
    let row = inst.restricted_row(i, &a.jobs_of(i))?;
    inst.inner_norm(i).eval(&row)
}

/// All machine loads as a vector indexed by machine.
pub fn load_vector(inst: &Instance, a: &Assignment) -> Result<Vec<f64>> {
    (0..inst.machines()).map(|i| machine_load(inst, a, i)).collect()
}

/// The outer norm of the load vector.
pub fn objective(inst: &Instance, a: &Assignment) -> Result<f64> {
    let loads = load_vector(inst, a)?;
    inst.outer_norm().eval(&loads)
}

/// Which norms a generated instance carries, written `<inner>-<outer>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormProfile {
    /// inner `L1`, outer `Linf`
    L1Linf,
    /// inner `Linf`, outer `L1` (the set-cover shape)
    LinfL1,
    /// inner `Top_{k_i}` with random `k_i`, outer `Linf`
    TopkLinf,
    /// inner and outer `L2`
    L2L2,
    /// random members of the whole family
    Mixed,
}

impl std::str::FromStr for NormProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1-linf" => Ok(NormProfile::L1Linf),
            "linf-l1" => Ok(NormProfile::LinfL1),
            "topk-linf" => Ok(NormProfile::TopkLinf),
            "l2-l2" => Ok(NormProfile::L2L2),
            "mixed" => Ok(NormProfile::Mixed),
            other => Err(Error::InvalidInstance(format!(
                "unknown norm profile '{other}' (expected l1-linf, linf-l1, topk-linf, l2-l2 or mixed)"
            ))),
        }
    }
}

/// Deterministic random instance. Processing times are uniform on
/// `value_range`, each pair is forbidden independently with probability
/// `forbidden_prob`, and a job whose machines all came out forbidden is
/// redrawn until it has one.
pub fn gen_random(
    m: usize,
    n: usize,
    seed: u64,
    value_range: (f64, f64),
    forbidden_prob: f64,
    profile: NormProfile,
) -> Result<Instance> {
    let (lo, hi) = value_range;
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi <= lo {
        return Err(Error::InvalidInstance(format!(
            "value range must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )));
    }
    if !(0.0..1.0).contains(&forbidden_prob) {
        return Err(Error::InvalidInstance(format!(
            "forbidden probability must lie in [0, 1), got {forbidden_prob}"
        )));
    }
    if m == 0 || n == 0 {
        return Err(Error::InvalidInstance("m and n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = vec![vec![None; n]; m];
    for j in 0..n {
        loop {
            let mut any = false;
            for i in 0..m {
                if forbidden_prob > 0.0 && rng.gen_bool(forbidden_prob) {
                    p[i][j] = None;
                } else {
                    p[i][j] = Some(rng.gen_range(lo..hi));
                    any = true;
                }
            }
            if any {
                break;
            }
        }
    }
    let inner_norms: Vec<NormSpec> = (0..m)
        .map(|_| match profile {
            NormProfile::L1Linf => NormSpec::l1(),
            NormProfile::LinfL1 => NormSpec::linf(),
            NormProfile::TopkLinf => NormSpec::TopK(rng.gen_range(1..=n)),
            NormProfile::L2L2 => NormSpec::Lp(2.0),
            NormProfile::Mixed => random_norm_spec(&mut rng, n, 2),
        })
        .collect();
    let outer_norm = match profile {
        NormProfile::L1Linf => NormSpec::linf(),
        NormProfile::LinfL1 => NormSpec::l1(),
        NormProfile::TopkLinf => NormSpec::linf(),
        NormProfile::L2L2 => NormSpec::Lp(2.0),
        NormProfile::Mixed => random_norm_spec(&mut rng, m, 2),
    };
    Instance::from_parts(p, inner_norms, outer_norm)
}

/// Encodes set cover: machine `i` can run exactly the jobs in `sets[i]` at
/// unit processing time, machine loads are `Linf` (so a used machine costs 1)
/// and the objective is `L1` (the number of used machines). Feasible
/// assignments then correspond to covers, with equal objective value.
pub fn gen_from_set_cover(sets: &[Vec<usize>], n: usize) -> Result<Instance> {
    if sets.is_empty() || n == 0 {
        return Err(Error::InvalidInstance("need at least one set and one element".into()));
    }
    let m = sets.len();
    let mut p = vec![vec![None; n]; m];
    for (i, set) in sets.iter().enumerate() {
        for &j in set {
            if j >= n {
                return Err(Error::InvalidInstance(format!(
                    "set {} contains element {} beyond universe size {n}",
                    i + 1,
                    j + 1
                )));
            }
            p[i][j] = Some(1.0);
        }
    }
    Instance::from_parts(p, vec![NormSpec::linf(); m], NormSpec::l1())
}

/// An instance scaled so the pinned machine/job pair has single-job load
/// exactly `1/n`; solvers that guess the pair run on this form.
#[derive(Debug, Clone)]
pub struct ScaledInstance {
    scaled: Instance,
    scale: f64,
    i_star: usize,
    j_star: usize,
}

impl ScaledInstance {
    pub fn instance(&self) -> &Instance {
        &self.scaled
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn i_star(&self) -> usize {
        self.i_star
    }

    pub fn j_star(&self) -> usize {
        self.j_star
    }
}

/// Rescales `inst` so that `psi_{i*}(p_{i*,j*} e_{j*}) = 1/n`.
pub fn normalize(inst: &Instance, i_star: usize, j_star: usize) -> Result<ScaledInstance> {
    if i_star >= inst.machines() || j_star >= inst.jobs() {
        return Err(Error::InvalidInstance("normalization pair out of range".into()));
    }
    let single = inst.restricted_row(i_star, &[j_star])?;
    let base = inst.inner_norm(i_star).eval(&single)?;
    if base <= 0.0 {
        return Err(Error::InvalidInstance(
            "normalization pair has zero single-job load".into(),
        ));
    }
    let n = inst.jobs() as f64;
    let scale = 1.0 / (n * base);
    let scaled = inst.scale_by(scale);
    let check = scaled
        .inner_norm(i_star)
        .eval(&scaled.restricted_row(i_star, &[j_star])?)?;
    if (check - 1.0 / n).abs() > 1e-12 * (1.0 + 1.0 / n) {
        return Err(Error::Internal(format!(
            "normalization check failed: {check} vs {}",
            1.0 / n
        )));
    }
    Ok(ScaledInstance { scaled, scale, i_star, j_star })
}

// ---------------------------------------------------------------------------
// file formats
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    m: usize,
    n: usize,
    p: Vec<Vec<Option<f64>>>,
    inner_norms: Vec<NormSpec>,
    outer_norm: NormSpec,
}

#[derive(Serialize, Deserialize)]
struct AssignmentFile {
    sigma: Vec<usize>,
}

impl Instance {
    pub fn to_json(&self) -> Result<String> {
        let file = InstanceFile {
            m: self.m,
            n: self.n,
            p: self.p.clone(),
            inner_norms: self.inner_norms.clone(),
            outer_norm: self.outer_norm.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        let inst = Instance::from_parts(file.p, file.inner_norms, file.outer_norm)?;
        if inst.m != file.m || inst.n != file.n {
            return Err(Error::InvalidInstance(format!(
                "declared shape {}x{} does not match matrix {}x{}",
                file.m, file.n, inst.m, inst.n
            )));
        }
        Ok(inst)
    }
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, inst.to_json()?)?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    Instance::from_json(&std::fs::read_to_string(path)?)
}

/// Serialized assignments are 1-indexed.
pub fn assignment_to_json(a: &Assignment) -> Result<String> {
    let file = AssignmentFile { sigma: a.sigma.iter().map(|&i| i + 1).collect() };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn assignment_from_json(text: &str) -> Result<Assignment> {
    let file: AssignmentFile = serde_json::from_str(text)?;
    let mut sigma = Vec::with_capacity(file.sigma.len());
    for (j, i) in file.sigma.into_iter().enumerate() {
        if i == 0 {
            return Err(Error::InvalidAssignment(format!(
                "machine index for job {} must be 1-indexed",
                j + 1
            )));
        }
        sigma.push(i - 1);
    }
    Ok(Assignment::new(sigma))
}

pub fn save_assignment(a: &Assignment, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, assignment_to_json(a)?)?;
    Ok(())
}

pub fn load_assignment(path: impl AsRef<Path>) -> Result<Assignment> {
    assignment_from_json(&std::fs::read_to_string(path)?)
}
