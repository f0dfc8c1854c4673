//! Finite probability distributions and the information quantities the codecs
//! and harness are measured against.
//!
//! All logarithms are base 2, so every entropy and length is in bits.
//! `0 · log(1/0)` is taken as 0 and a `0/0` likelihood ratio as 1.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `|Σ p − 1|` accepted by [`Distribution::new`].
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A finite, indexed set of messages `0..size`, optionally labelled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageSet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl MessageSet {
    pub fn new(size: usize, labels: Option<Vec<String>>) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyDistribution);
        }
        if let Some(labels) = &labels {
            if labels.len() != size {
                return Err(Error::LabelCountMismatch {
                    labels: labels.len(),
                    probs: size,
                });
            }
            let mut seen = HashSet::with_capacity(size);
            for label in labels {
                if !seen.insert(label.as_str()) {
                    return Err(Error::DuplicateLabel(label.clone()));
                }
            }
        }
        Ok(Self { size, labels })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.as_ref().and_then(|l| l.get(index)).map(String::as_str)
    }
}

/// A probability distribution over a [`MessageSet`].
///
/// Construction validates but never renormalizes: probabilities are kept
/// exactly as given.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    message_set: MessageSet,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        for (index, &value) in probs.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteProbability { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotNormalized {
                sum,
                tolerance: SUM_TOLERANCE,
            });
        }
        let message_set = MessageSet::new(probs.len(), labels)?;
        Ok(Self { message_set, probs })
    }

    /// The uniform distribution over `n` messages.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDistribution);
        }
        Self::new(vec![1.0 / n as f64; n], None)
    }

    pub fn message_set(&self) -> &MessageSet {
        &self.message_set
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// Always false: a distribution has at least one message.
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Checked lookup, for message indices that come from outside the crate.
    pub fn try_prob(&self, index: usize) -> Result<f64> {
        self.probs.get(index).copied().ok_or(Error::MessageOutOfRange {
            index,
            size: self.len(),
        })
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.message_set.labels()
    }

    /// Indices of messages with positive probability.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
    }

    fn ensure_same_set(&self, other: &Distribution) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::MessageSetMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }
}

/// Validates raw probabilities (and optional labels) into a [`Distribution`].
pub fn validate_distribution(probs: &[f64], labels: Option<&[String]>) -> Result<Distribution> {
    Distribution::new(probs.to_vec(), labels.map(<[String]>::to_vec))
}

/// Shannon entropy in bits.
pub fn entropy(p: &Distribution) -> f64 {
    p.probs
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Smallest `α` for which two distributions are α-close.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosenessReport {
    /// `max_m max(P(m)/Q(m), Q(m)/P(m))`; infinite when exactly one of the
    /// two assigns some message zero mass.
    pub alpha_star: f64,
    /// A message attaining the maximum ratio.
    pub witness_index: usize,
}

impl ClosenessReport {
    pub fn is_finite(&self) -> bool {
        self.alpha_star.is_finite()
    }

    /// Whether the pair is `alpha`-close.
    pub fn within(&self, alpha: f64) -> bool {
        self.alpha_star <= alpha
    }
}

fn likelihood_ratio(p: f64, q: f64) -> f64 {
    match (p > 0.0, q > 0.0) {
        (false, false) => 1.0,
        (true, true) => (p / q).max(q / p),
        _ => f64::INFINITY,
    }
}

/// Computes the minimal closeness parameter of `(p, q)`. Symmetric in its
/// arguments.
pub fn min_closeness(p: &Distribution, q: &Distribution) -> Result<ClosenessReport> {
    p.ensure_same_set(q)?;
    let mut report = ClosenessReport {
        alpha_star: 1.0,
        witness_index: 0,
    };
    for (i, (&a, &b)) in p.probs.iter().zip(&q.probs).enumerate() {
        let ratio = likelihood_ratio(a, b);
        if ratio > report.alpha_star {
            report = ClosenessReport {
                alpha_star: ratio,
                witness_index: i,
            };
        }
    }
    Ok(report)
}

/// `RE(P‖Q) = Σ_{P(m)>0} P(m) log₂(P(m)/Q(m))`.
pub fn relative_entropy(p: &Distribution, q: &Distribution) -> Result<f64> {
    p.ensure_same_set(q)?;
    let mut total = 0.0;
    for (index, (&a, &b)) in p.probs.iter().zip(&q.probs).enumerate() {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Err(Error::UndefinedRelativeEntropy { index });
        }
        total += a * (a / b).log2();
    }
    Ok(total)
}

/// Messages ordered by nonincreasing probability, ties by ascending index.
pub fn rank_by_probability(p: &Distribution) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p.probs[b].total_cmp(&p.probs[a]).then(a.cmp(&b)));
    order
}

/// Codeword lengths of the canonical optimal one-to-one code: the `i`-th most
/// likely message (1-indexed) gets the `i`-th shortest binary string, of
/// length `⌊log₂ i⌋`. Indexed by message.
pub fn one_to_one_code_lengths(p: &Distribution) -> Vec<u32> {
    let mut lengths = vec![0u32; p.len()];
    for (rank, message) in rank_by_probability(p).into_iter().enumerate() {
        lengths[message] = (rank + 1).ilog2();
    }
    lengths
}

/// `ℓ(P)`: the expected length of the optimal one-to-one (not prefix-free)
/// code for `p`, in bits.
pub fn one_to_one_optimal_length(p: &Distribution) -> f64 {
    one_to_one_code_lengths(p)
        .iter()
        .zip(&p.probs)
        .map(|(&len, &x)| len as f64 * x)
        .sum()
}

/// On-disk form of a distribution: `{"labels": [...], "probs": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub probs: Vec<f64>,
}

impl From<&Distribution> for DistributionFile {
    fn from(d: &Distribution) -> Self {
        Self {
            labels: d.labels().map(<[String]>::to_vec),
            probs: d.probs.clone(),
        }
    }
}

impl TryFrom<DistributionFile> for Distribution {
    type Error = Error;

    fn try_from(file: DistributionFile) -> Result<Self> {
        Distribution::new(file.probs, file.labels)
    }
}
