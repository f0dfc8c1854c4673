//! Monte Carlo driver: sample a message from `P`, encode, decode under `Q`,
//! repeat, and summarize against the closed-form bounds.
//!
//! Every random choice is a function of the master seed. Trial `i` uses the
//! stream seed `master.derive("trial", i)` and samples its message from an
//! RNG keyed by a further derivation of that seed, so trials are independent
//! and any one of them can be replayed in isolation.

use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, InstanceSpec, Scheme};
use super::files::{write_json, PriorFile};
use super::report::{redundancy_report, RedundancyReport};
use crate::codec::{
    encode_error_free, encode_positive_error, exact_expected_length_positive, MaxLikelihoodDecoder,
};
use crate::dist::{entropy, min_closeness, one_to_one_optimal_length, Distribution};
use crate::error::{Error, Result};
use crate::instance::{hard_instance, random_close_pair_from, InstanceFile, InstanceMetadata};
use crate::stream::StreamSeed;

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

/// The prior pair an experiment runs on.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedInstance {
    pub p: Distribution,
    pub q: Distribution,
    pub k: Option<u64>,
    pub metadata: Option<InstanceMetadata>,
}

fn instance_rng(master: &StreamSeed) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(*master.derive("instance", 0).as_bytes())
}

/// Builds (or loads) the pair described by `config.instance`.
pub fn resolve_instance(config: &ExperimentConfig) -> Result<ResolvedInstance> {
    let generator_seed = Some(config.master_seed.derive("instance", 0).to_hex());
    match &config.instance {
        InstanceSpec::Hard => {
            let inst = hard_instance(config.alpha, &mut instance_rng(&config.master_seed))?;
            let metadata = InstanceFile::from_hard(&inst, generator_seed).metadata;
            Ok(ResolvedInstance {
                k: Some(inst.k),
                p: inst.p,
                q: inst.q,
                metadata,
            })
        }
        InstanceSpec::Random { size, prior } => {
            let (p, q) = random_close_pair_from(
                config.alpha,
                *size,
                *prior,
                &mut instance_rng(&config.master_seed),
            )?;
            Ok(ResolvedInstance {
                p,
                q,
                k: None,
                metadata: Some(InstanceMetadata {
                    kind: "random".into(),
                    alpha: config.alpha,
                    k: None,
                    m: None,
                    s: None,
                    generator_seed,
                }),
            })
        }
        InstanceSpec::File { path } => {
            let (p, q) = PriorFile::load(path)?.into_pair()?;
            check_premise(config, &p, &q)?;
            Ok(ResolvedInstance {
                p,
                q,
                k: None,
                metadata: None,
            })
        }
    }
}

/// File-supplied pairs must satisfy the premise of the configured scheme:
/// alpha-closeness for error-free, `Q ≥ P/α` for positive-error.
fn check_premise(config: &ExperimentConfig, p: &Distribution, q: &Distribution) -> Result<()> {
    let ok = match config.scheme {
        Scheme::ErrorFree => min_closeness(p, q)?.within(config.alpha),
        Scheme::PositiveError => p
            .probs()
            .iter()
            .zip(q.probs())
            .all(|(&a, &b)| b >= a / config.alpha),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "instance priors do not satisfy the {} premise for alpha = {}",
            config.scheme, config.alpha
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub message: usize,
    pub codeword_length: u64,
    pub decoded: usize,
    pub success: bool,
    pub stream_bits_read: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub scheme: Scheme,
    pub alpha: f64,
    pub epsilon: Option<f64>,
    pub k: Option<u64>,
    pub message_count: usize,
    pub trials: u64,
    pub mean_length: f64,
    /// Half-width of the 99% normal-approximation interval on `mean_length`.
    pub length_ci99: f64,
    pub error_rate: f64,
    pub error_rate_ci: f64,
    pub entropy: f64,
    pub ell_p: f64,
    /// `mean_length − ell_p`.
    pub redundancy: f64,
    pub upper_bound: f64,
    pub lower_bound_reference: Option<f64>,
    /// Positive-error only: `Σ P(m)·⌈log₂(α/(P(m)ε))⌉`.
    pub exact_expected_length: Option<f64>,
    pub mean_stream_bits_read: f64,
}

/// Proven expected-length bound of the scheme.
pub fn upper_bound(scheme: Scheme, entropy: f64, alpha: f64, epsilon: Option<f64>) -> f64 {
    match scheme {
        Scheme::ErrorFree => entropy + 2.0 * alpha.log2() + 2.0,
        Scheme::PositiveError => {
            entropy + alpha.log2() + (1.0 / epsilon.unwrap_or(1.0)).log2() + 1.0
        }
    }
}

/// Leading terms of the asymptotic redundancy lower bounds with the unknown
/// additive constant set to zero; `None` where `log log α` is undefined.
pub fn lower_bound_reference(scheme: Scheme, alpha: f64, epsilon: Option<f64>) -> Option<f64> {
    let log_a = alpha.log2();
    let log_log_a = log_a.log2();
    if !log_log_a.is_finite() {
        return None;
    }
    Some(match scheme {
        Scheme::ErrorFree => 2.0 * log_a - 3.0 * log_log_a,
        Scheme::PositiveError => {
            log_a + (1.0 / epsilon.unwrap_or(1.0)).log2() - 4.5 * log_log_a
        }
    })
}

/// Results of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub summary: SummaryStats,
    pub records: Vec<TrialRecord>,
    pub instance: ResolvedInstance,
}

impl Experiment {
    pub fn report(&self) -> RedundancyReport {
        redundancy_report(&self.summary, self.summary.alpha, self.summary.epsilon)
    }

    /// Writes `records.csv`, `summary.json` and `instance.json` into `dir`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("records.csv"))?;
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        #[derive(Serialize)]
        struct Summary<'a> {
            summary: &'a SummaryStats,
            report: RedundancyReport,
        }
        write_json(
            &dir.join("summary.json"),
            &Summary {
                summary: &self.summary,
                report: self.report(),
            },
        )?;
        write_json(
            &dir.join("instance.json"),
            &InstanceFile::from_pair(&self.instance.p, &self.instance.q, self.instance.metadata.clone()),
        )
    }
}

/// Runs `config.trials` independent trials. An error-free trial that decodes
/// incorrectly aborts the run with [`Error::ContractViolation`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<Experiment> {
    config.validate()?;
    let instance = resolve_instance(config)?;
    run_on_instance(config, instance)
}

/// Like [`run_experiment`] but on a caller-supplied pair.
pub fn run_on_instance(config: &ExperimentConfig, instance: ResolvedInstance) -> Result<Experiment> {
    config.validate()?;
    let (p, q) = (&instance.p, &instance.q);
    let sampler = WeightedIndex::new(p.probs())
        .map_err(|e| Error::InvalidConfig(format!("cannot sample from P: {e}")))?;
    let decoder = MaxLikelihoodDecoder::new(q);

    let mut records = Vec::with_capacity(config.trials as usize);
    for trial_index in 0..config.trials {
        let seed = config.master_seed.derive("trial", trial_index);
        let mut rng = ChaCha8Rng::from_seed(*seed.derive("message", 0).as_bytes());
        let message = sampler.sample(&mut rng);
        let (codeword, stream_bits_read) = match config.scheme {
            Scheme::ErrorFree => {
                let trace = encode_error_free(message, p, config.alpha, &seed)?;
                (trace.codeword, trace.stream_bits_read)
            }
            Scheme::PositiveError => {
                let epsilon = config.epsilon.expect("validated");
                let c = encode_positive_error(message, p, config.alpha, epsilon, &seed)?;
                let read = c.len();
                (c, read)
            }
        };
        let decoded = decoder.decode(&codeword, &seed)?;
        let success = decoded == message;
        if !success && config.scheme == Scheme::ErrorFree {
            return Err(Error::ContractViolation(format!(
                "error-free trial {trial_index}: message {message} decoded as {decoded}"
            )));
        }
        records.push(TrialRecord {
            trial_index,
            message,
            codeword_length: codeword.len(),
            decoded,
            success,
            stream_bits_read,
        });
    }

    let summary = summarize(config, &instance, &records)?;
    Ok(Experiment {
        summary,
        records,
        instance,
    })
}

fn summarize(
    config: &ExperimentConfig,
    instance: &ResolvedInstance,
    records: &[TrialRecord],
) -> Result<SummaryStats> {
    let n = records.len() as f64;
    let lengths: Vec<f64> = records.iter().map(|r| r.codeword_length as f64).collect();
    let mean_length = lengths.iter().sum::<f64>() / n;
    let variance = if records.len() > 1 {
        lengths.iter().map(|x| (x - mean_length).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let failures = records.iter().filter(|r| !r.success).count() as f64;
    let error_rate = failures / n;
    let h = entropy(&instance.p);
    let ell_p = one_to_one_optimal_length(&instance.p);
    let exact_expected_length = match (config.scheme, config.epsilon) {
        (Scheme::PositiveError, Some(e)) => {
            Some(exact_expected_length_positive(&instance.p, config.alpha, e)?)
        }
        _ => None,
    };
    Ok(SummaryStats {
        scheme: config.scheme,
        alpha: config.alpha,
        epsilon: config.epsilon,
        k: instance.k,
        message_count: instance.p.len(),
        trials: config.trials,
        mean_length,
        length_ci99: Z99 * (variance / n).sqrt(),
        error_rate,
        error_rate_ci: Z99 * (error_rate * (1.0 - error_rate) / n).sqrt(),
        entropy: h,
        ell_p,
        redundancy: mean_length - ell_p,
        upper_bound: upper_bound(config.scheme, h, config.alpha, config.epsilon),
        lower_bound_reference: lower_bound_reference(config.scheme, config.alpha, config.epsilon),
        exact_expected_length,
        mean_stream_bits_read: records.iter().map(|r| r.stream_bits_read as f64).sum::<f64>() / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(scheme: Scheme, alpha: f64, epsilon: Option<f64>, trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            scheme,
            alpha,
            epsilon,
            instance: InstanceSpec::Hard,
            trials,
            master_seed: StreamSeed::from_u64(42),
            output_path: None,
        }
    }

    #[test]
    fn single_trial_is_reproducible() {
        let c = config(Scheme::ErrorFree, 16.0, None, 1);
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.summary, b.summary);
    }

    #[test]
    fn summary_invariants() {
        let e = run_experiment(&config(Scheme::PositiveError, 10.0, Some(0.1), 500)).unwrap();
        let s = &e.summary;
        assert_eq!(s.k, Some(6));
        assert_eq!(s.message_count, 37);
        assert_eq!(s.redundancy, s.mean_length - s.ell_p);
        assert_eq!(
            s.upper_bound,
            s.entropy + 10f64.log2() + 10f64.log2() + 1.0
        );
        for r in &e.records {
            assert_eq!(r.success, r.message == r.decoded);
            assert_eq!(r.stream_bits_read, r.codeword_length);
        }
        let failures = e.records.iter().filter(|r| !r.success).count();
        assert_eq!(s.error_rate, failures as f64 / 500.0);
    }

    fn run_pair(c: &ExperimentConfig, p: Distribution) -> Experiment {
        let inst = ResolvedInstance {
            p: p.clone(),
            q: p,
            k: None,
            metadata: None,
        };
        run_on_instance(c, inst).unwrap()
    }

    #[test]
    fn degenerate_alpha_one() {
        let c = config(Scheme::PositiveError, 1.0, Some(1.0), 50);
        // ⌈log₂(1/(½·1))⌉ = 1 bit for either message.
        let e = run_pair(&c, Distribution::uniform(2).unwrap());
        assert_eq!(e.summary.mean_length, 1.0);
        assert_eq!(e.summary.ell_p, 0.5);
        assert_eq!(e.summary.redundancy, 0.5);
        assert_eq!(e.summary.length_ci99, 0.0);
        // A point mass needs no bits at all.
        let e = run_pair(&c, Distribution::new(vec![1.0], None).unwrap());
        assert_eq!(e.summary.mean_length, 0.0);
        assert_eq!(e.summary.redundancy, 0.0);
    }

    #[test]
    fn file_instance_premise_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pair.json");
        std::fs::write(&path, r#"{"p":{"probs":[0.9,0.1]},"q":{"probs":[0.1,0.9]}}"#).unwrap();
        let mut c = config(Scheme::ErrorFree, 2.0, None, 5);
        c.instance = InstanceSpec::File { path: path.clone() };
        assert!(matches!(run_experiment(&c), Err(Error::InvalidConfig(_))));
        c.alpha = 9.0;
        assert!(run_experiment(&c).is_ok());
    }

    #[test]
    fn hard_instance_too_small() {
        let e = run_experiment(&config(Scheme::ErrorFree, 5.0, None, 5));
        assert!(matches!(e, Err(Error::InstanceConstruction(_))));
    }

    #[test]
    fn reference_curves() {
        assert_eq!(lower_bound_reference(Scheme::ErrorFree, 1.0, None), None);
        assert_eq!(lower_bound_reference(Scheme::ErrorFree, 16.0, None), Some(8.0 - 6.0));
        assert_eq!(
            lower_bound_reference(Scheme::PositiveError, 16.0, Some(0.5)),
            Some(4.0 + 1.0 - 9.0)
        );
    }
}
