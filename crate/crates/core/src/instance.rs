//! Prior-pair generators: the hard `(m, S)` family on `k² + 1` messages and
//! random α-close pairs for measurement campaigns.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution as _, Exp1, Gamma};
use serde::{Deserialize, Serialize};

use crate::dist::{min_closeness, Distribution, DistributionFile};
use crate::error::{Error, Result};

/// Smallest `k` for which the hard family has positive mass outside `S`.
pub const MIN_HARD_K: u64 = 4;

fn k_weight(k: u64) -> f64 {
    let k = k as f64;
    k * k.log2().sqrt()
}

/// The largest `k ≥ 2` with `k·√(log₂ k) ≤ alpha`.
pub fn largest_k(alpha: f64) -> Result<u64> {
    if !(alpha.is_finite() && alpha >= 2.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    // k·√log₂k is increasing; bracket then bisect.
    let mut lo = 2u64;
    let mut hi = 4u64;
    while k_weight(hi) <= alpha {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if k_weight(mid) <= alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// One member of the hard family, parameterized by a distinguished message
/// and a `(k+1)`-set `S` containing it.
#[derive(Debug, Clone, PartialEq)]
pub struct HardInstance {
    pub alpha: f64,
    pub k: u64,
    pub p: Distribution,
    pub q: Distribution,
    pub distinguished: usize,
    /// Sorted.
    pub s: Vec<usize>,
}

/// Closed-form masses of the hard family for a given `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardMasses {
    pub p_distinguished: f64,
    pub p_other: f64,
    pub q_in_s: f64,
    pub q_outside: f64,
}

impl HardMasses {
    pub fn for_k(k: u64) -> Self {
        let kf = k as f64;
        let log_k = kf.log2();
        let q_in_s = 1.0 / (kf * log_k.sqrt());
        Self {
            p_distinguished: 1.0 - 1.0 / log_k,
            p_other: 1.0 / (kf * kf * log_k),
            q_in_s,
            q_outside: (1.0 - (kf + 1.0) * q_in_s) / (kf * kf - kf),
        }
    }
}

/// Builds the instance for an explicit `(m, S)`. `S` must have `k + 1`
/// distinct members including `distinguished`.
pub fn hard_instance_for(alpha: f64, distinguished: usize, s: &[usize]) -> Result<HardInstance> {
    let k = largest_k(alpha)?;
    if k < MIN_HARD_K {
        return Err(Error::InstanceConstruction(format!(
            "alpha = {alpha} gives k = {k}, need k >= {MIN_HARD_K}"
        )));
    }
    let size = (k * k + 1) as usize;
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() as u64 != k + 1 || !s.contains(&distinguished) || s.iter().any(|&x| x >= size) {
        return Err(Error::InstanceConstruction(format!(
            "S must be {} distinct messages below {size} containing {distinguished}",
            k + 1
        )));
    }
    let masses = HardMasses::for_k(k);
    if masses.q_outside <= 0.0 {
        return Err(Error::InstanceConstruction(format!(
            "nonpositive mass outside S at k = {k}"
        )));
    }
    let mut p = vec![masses.p_other; size];
    p[distinguished] = masses.p_distinguished;
    let mut q = vec![masses.q_outside; size];
    for &x in &s {
        q[x] = masses.q_in_s;
    }
    let construction = |e: Error| Error::InstanceConstruction(e.to_string());
    let p = Distribution::new(p, None).map_err(construction)?;
    let q = Distribution::new(q, None).map_err(construction)?;
    let closeness = min_closeness(&p, &q)?;
    if !closeness.within(alpha) {
        return Err(Error::InstanceConstruction(format!(
            "constructed pair is only {}-close, wanted {alpha}",
            closeness.alpha_star
        )));
    }
    Ok(HardInstance {
        alpha,
        k,
        p,
        q,
        distinguished,
        s,
    })
}

/// Samples `m` uniformly and `S` uniformly among `(k+1)`-sets containing `m`.
pub fn hard_instance<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<HardInstance> {
    let k = largest_k(alpha)?;
    if k < MIN_HARD_K {
        return Err(Error::InstanceConstruction(format!(
            "alpha = {alpha} gives k = {k}, need k >= {MIN_HARD_K}"
        )));
    }
    let size = (k * k + 1) as usize;
    let distinguished = rng.random_range(0..size);
    let mut s: Vec<usize> = index::sample(rng, size - 1, k as usize)
        .into_iter()
        .map(|i| if i >= distinguished { i + 1 } else { i })
        .collect();
    s.push(distinguished);
    hard_instance_for(alpha, distinguished, &s)
}

/// Family the receiver prior `Q` of a random pair is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SimplexFamily {
    /// Uniform on the simplex.
    #[default]
    Uniform,
    /// Symmetric Dirichlet; small concentrations give spiky priors.
    Dirichlet { concentration: f64 },
}

/// Samples a point of the `n`-simplex.
pub fn sample_simplex<R: Rng + ?Sized>(n: usize, family: SimplexFamily, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyDistribution);
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let gamma = match family {
        SimplexFamily::Uniform => None,
        SimplexFamily::Dirichlet { concentration } => Some(
            Gamma::new(concentration, 1.0)
                .map_err(|e| Error::InvalidConfig(format!("dirichlet concentration: {e}")))?,
        ),
    };
    loop {
        let raw: Vec<f64> = (0..n)
            .map(|_| match &gamma {
                None => Exp1.sample(rng),
                Some(g) => g.sample(rng),
            })
            .collect();
        let total: f64 = raw.iter().sum();
        if total > 0.0 && total.is_finite() {
            return Ok(raw.into_iter().map(|x| x / total).collect());
        }
    }
}

/// A random pair `(P, Q)` that is guaranteed `alpha`-close, with `Q` uniform
/// on the simplex.
pub fn random_close_pair<R: Rng + ?Sized>(
    alpha: f64,
    n: usize,
    rng: &mut R,
) -> Result<(Distribution, Distribution)> {
    random_close_pair_from(alpha, n, SimplexFamily::Uniform, rng)
}

/// `P ∝ Q·w` with each `w_m` uniform on `[1/√α, √α]`. The normalizer lies
/// in the same interval, so every ratio `P/Q` lies in `[1/α, α]`.
pub fn random_close_pair_from<R: Rng + ?Sized>(
    alpha: f64,
    n: usize,
    family: SimplexFamily,
    rng: &mut R,
) -> Result<(Distribution, Distribution)> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let q = Distribution::new(sample_simplex(n, family, rng)?, None)?;
    if alpha == 1.0 || n == 1 {
        return Ok((q.clone(), q));
    }
    let root = alpha.sqrt();
    // Rounding can in principle push a ratio a hair past alpha; redraw then.
    for _ in 0..64 {
        let weighted: Vec<f64> = q
            .probs()
            .iter()
            .map(|&x| x * rng.random_range(1.0 / root..=root))
            .collect();
        let z: f64 = weighted.iter().sum();
        let p = Distribution::new(weighted.into_iter().map(|x| x / z).collect(), None)?;
        if min_closeness(&p, &q)?.within(alpha) {
            return Ok((p, q));
        }
    }
    Err(Error::InstanceConstruction(format!(
        "could not draw an {alpha}-close pair over {n} messages"
    )))
}

/// Provenance recorded alongside an exported pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetadata {
    pub kind: String,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, rename = "S", skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_seed: Option<String>,
}

/// On-disk prior pair: the sender's `p`, the receiver's `q`, and metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub p: DistributionFile,
    pub q: DistributionFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<InstanceMetadata>,
}

impl InstanceFile {
    pub fn from_pair(p: &Distribution, q: &Distribution, metadata: Option<InstanceMetadata>) -> Self {
        Self {
            p: p.into(),
            q: q.into(),
            metadata,
        }
    }

    pub fn from_hard(instance: &HardInstance, generator_seed: Option<String>) -> Self {
        Self::from_pair(
            &instance.p,
            &instance.q,
            Some(InstanceMetadata {
                kind: "hard".into(),
                alpha: instance.alpha,
                k: Some(instance.k),
                m: Some(instance.distinguished),
                s: Some(instance.s.clone()),
                generator_seed,
            }),
        )
    }

    /// Validates both distributions and that they share a message set.
    pub fn into_pair(self) -> Result<(Distribution, Distribution)> {
        let p = Distribution::try_from(self.p)?;
        let q = Distribution::try_from(self.q)?;
        min_closeness(&p, &q)?;
        Ok((p, q))
    }
}
