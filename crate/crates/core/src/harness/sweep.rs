//! Grid runs over `(alpha, epsilon)` and their CSV tables.

use std::io::Write;
use std::path::Path;

use super::config::{ExperimentConfig, Scheme};
use super::experiment::{run_experiment, SummaryStats};
use crate::error::{Error, Result};

pub const SWEEP_HEADER: [&str; 11] = [
    "alpha",
    "epsilon",
    "scheme",
    "k",
    "entropy",
    "ell_P",
    "mean_length",
    "length_ci99",
    "error_rate",
    "redundancy",
    "upper_bound",
];

/// Why a grid point produced no statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub exit_code: i32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub epsilon: Option<f64>,
    pub scheme: Scheme,
    pub outcome: std::result::Result<SummaryStats, PointFailure>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Runs `base` at every `(alpha, epsilon)` point, ordered by alpha then
/// epsilon. Without `epsilons` the base config's epsilon is used. A failing
/// point becomes a failed row.
pub fn sweep(base: &ExperimentConfig, alphas: &[f64], epsilons: Option<&[f64]>) -> Result<SweepTable> {
    let epsilons: Vec<Option<f64>> = match (base.scheme, epsilons) {
        (Scheme::ErrorFree, Some(_)) => {
            return Err(Error::InvalidConfig(
                "epsilons cannot be swept for the error_free scheme".into(),
            ))
        }
        (Scheme::PositiveError, Some(list)) => sorted(list).into_iter().map(Some).collect(),
        (_, None) => vec![base.epsilon],
    };
    let mut rows = Vec::new();
    for alpha in sorted(alphas) {
        for &epsilon in &epsilons {
            let config = ExperimentConfig {
                alpha,
                epsilon,
                ..base.clone()
            };
            let outcome = run_experiment(&config)
                .map(|e| e.summary)
                .map_err(|e| PointFailure {
                    exit_code: e.exit_code(),
                    message: e.to_string(),
                });
            rows.push(SweepRow {
                alpha,
                epsilon,
                scheme: base.scheme,
                outcome,
            });
        }
    }
    Ok(SweepTable { rows })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

impl SweepTable {
    pub fn failures(&self) -> impl Iterator<Item = &PointFailure> {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().err())
    }

    /// Wide table, one row per grid point. Failed points leave the measured
    /// columns empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SWEEP_HEADER)?;
        for row in &self.rows {
            let mut record = vec![
                row.alpha.to_string(),
                opt(row.epsilon),
                row.scheme.to_string(),
            ];
            match &row.outcome {
                Ok(s) => record.extend([
                    opt(s.k),
                    s.entropy.to_string(),
                    s.ell_p.to_string(),
                    s.mean_length.to_string(),
                    s.length_ci99.to_string(),
                    s.error_rate.to_string(),
                    s.redundancy.to_string(),
                    s.upper_bound.to_string(),
                ]),
                Err(_) => record.extend(std::iter::repeat_n(String::new(), 8)),
            }
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Long table `alpha,epsilon,scheme,metric,value`, convenient for
    /// plotting. Failed points emit a single `error` metric.
    pub fn write_long_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["alpha", "epsilon", "scheme", "metric", "value"])?;
        for row in &self.rows {
            let key = [row.alpha.to_string(), opt(row.epsilon), row.scheme.to_string()];
            let metrics: Vec<(&str, String)> = match &row.outcome {
                Ok(s) => {
                    let mut m = vec![
                        ("entropy", s.entropy.to_string()),
                        ("ell_P", s.ell_p.to_string()),
                        ("mean_length", s.mean_length.to_string()),
                        ("length_ci99", s.length_ci99.to_string()),
                        ("error_rate", s.error_rate.to_string()),
                        ("error_rate_ci", s.error_rate_ci.to_string()),
                        ("redundancy", s.redundancy.to_string()),
                        ("upper_bound", s.upper_bound.to_string()),
                    ];
                    if let Some(lb) = s.lower_bound_reference {
                        m.push(("lower_bound_reference", lb.to_string()));
                    }
                    if let Some(exact) = s.exact_expected_length {
                        m.push(("exact_expected_length", exact.to_string()));
                    }
                    m
                }
                Err(f) => vec![("error", f.message.clone())],
            };
            for (metric, value) in metrics {
                w.write_record(key.iter().map(String::as_str).chain([metric, value.as_str()]))?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `sweep.csv` and `sweep_long.csv` into `dir`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_csv(std::fs::File::create(dir.join("sweep.csv"))?)?;
        self.write_long_csv(std::fs::File::create(dir.join("sweep_long.csv"))?)
    }
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
