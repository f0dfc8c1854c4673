use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::Scheme;
use super::experiment::{lower_bound_reference, upper_bound, SummaryStats};

pub const LOWER_BOUND_NOTE: &str = "asymptotic leading terms only; unknown additive constant set to 0";

/// Measured redundancy next to the scheme's proven bound and the reference
/// lower-bound curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundancyReport {
    pub scheme: Scheme,
    pub alpha: f64,
    pub epsilon: Option<f64>,
    pub mean_length: f64,
    pub length_ci99: f64,
    pub ell_p: f64,
    pub measured_redundancy: f64,
    pub upper_bound: f64,
    /// `upper_bound − ell_p`.
    pub upper_bound_redundancy: f64,
    pub lower_bound_reference: Option<f64>,
    pub lower_bound_note: String,
    pub exact_expected_length: Option<f64>,
    pub error_rate: f64,
    /// Positive-error only: `ε + 3·√(ε(1−ε)/trials)`.
    pub error_budget: Option<f64>,
    /// The length interval lies entirely above the upper bound.
    pub upper_bound_violated: bool,
    pub error_budget_exceeded: bool,
}

impl RedundancyReport {
    pub fn failed(&self) -> bool {
        self.upper_bound_violated || self.error_budget_exceeded
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let eps = self.epsilon.map_or_else(|| "-".to_string(), |e| e.to_string());
        let _ = writeln!(out, "scheme            {}  alpha={}  epsilon={eps}", self.scheme, self.alpha);
        let _ = writeln!(out, "mean length       {:.4} ± {:.4} bits (99%)", self.mean_length, self.length_ci99);
        let _ = writeln!(out, "ell(P)            {:.4}", self.ell_p);
        let _ = writeln!(out, "redundancy        {:.4}", self.measured_redundancy);
        let _ = writeln!(
            out,
            "upper bound       {:.4} (redundancy {:.4})",
            self.upper_bound, self.upper_bound_redundancy
        );
        match self.lower_bound_reference {
            Some(lb) => {
                let _ = writeln!(out, "lower reference   {lb:.4} ({})", self.lower_bound_note);
            }
            None => {
                let _ = writeln!(out, "lower reference   undefined at this alpha");
            }
        }
        if let Some(exact) = self.exact_expected_length {
            let _ = writeln!(out, "exact E[length]   {exact:.4}");
        }
        let _ = write!(out, "error rate        {:.6}", self.error_rate);
        if let Some(budget) = self.error_budget {
            let _ = write!(out, " (budget {budget:.6})");
        }
        let _ = writeln!(out);
        let verdict = if self.failed() { "FAIL" } else { "ok" };
        let _ = writeln!(out, "verdict           {verdict}");
        out
    }
}

/// Compares `stats` with the bounds for `(alpha, epsilon)`.
pub fn redundancy_report(stats: &SummaryStats, alpha: f64, epsilon: Option<f64>) -> RedundancyReport {
    let scheme = stats.scheme;
    let upper = upper_bound(scheme, stats.entropy, alpha, epsilon);
    let error_budget = match (scheme, epsilon) {
        (Scheme::PositiveError, Some(e)) => {
            Some(e + 3.0 * (e * (1.0 - e) / stats.trials as f64).sqrt())
        }
        _ => None,
    };
    let error_budget_exceeded = match error_budget {
        Some(budget) => stats.error_rate > budget,
        None => stats.error_rate > 0.0,
    };
    RedundancyReport {
        scheme,
        alpha,
        epsilon,
        mean_length: stats.mean_length,
        length_ci99: stats.length_ci99,
        ell_p: stats.ell_p,
        measured_redundancy: stats.redundancy,
        upper_bound: upper,
        upper_bound_redundancy: upper - stats.ell_p,
        lower_bound_reference: lower_bound_reference(scheme, alpha, epsilon),
        lower_bound_note: LOWER_BOUND_NOTE.to_string(),
        exact_expected_length: stats.exact_expected_length,
        error_rate: stats.error_rate,
        error_budget,
        upper_bound_violated: stats.mean_length - stats.length_ci99 > upper,
        error_budget_exceeded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(mean_length: f64, ci: f64, error_rate: f64) -> SummaryStats {
        SummaryStats {
            scheme: Scheme::ErrorFree,
            alpha: 10.0,
            epsilon: None,
            k: Some(6),
            message_count: 37,
            trials: 100,
            mean_length,
            length_ci99: ci,
            error_rate,
            error_rate_ci: 0.0,
            entropy: 2.962_738_492_234_011_6,
            ell_p: 1.375_476_647_945_036_9,
            redundancy: mean_length - 1.375_476_647_945_036_9,
            upper_bound: 0.0,
            lower_bound_reference: None,
            exact_expected_length: None,
            mean_stream_bits_read: 0.0,
        }
    }

    #[test]
    fn error_free_bound_at_alpha_ten() {
        let r = redundancy_report(&stats(7.0, 0.1, 0.0), 10.0, None);
        assert!((r.upper_bound - 11.606_594_682_008_737).abs() < 1e-9);
        assert!(!r.failed());
        assert!(r.render().contains("verdict           ok"));
    }

    #[test]
    fn violation_needs_whole_interval_above_bound() {
        let r = redundancy_report(&stats(11.7, 0.2, 0.0), 10.0, None);
        assert!(!r.upper_bound_violated);
        let r = redundancy_report(&stats(11.9, 0.2, 0.0), 10.0, None);
        assert!(r.upper_bound_violated);
        assert!(r.failed());
    }

    #[test]
    fn any_error_free_failure_is_flagged() {
        let r = redundancy_report(&stats(7.0, 0.1, 0.01), 10.0, None);
        assert!(r.error_budget_exceeded);
    }

    #[test]
    fn positive_error_budget() {
        let mut s = stats(10.0, 0.1, 0.12);
        s.scheme = Scheme::PositiveError;
        s.trials = 100_000;
        let r = redundancy_report(&s, 10.0, Some(0.1));
        let budget = r.error_budget.unwrap();
        assert!((budget - 0.102_846_049_894_151_54).abs() < 1e-12);
        assert!(r.error_budget_exceeded);
        s.error_rate = 0.1;
        assert!(!redundancy_report(&s, 10.0, Some(0.1)).error_budget_exceeded);
    }
}
