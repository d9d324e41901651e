use serde::{Deserialize, Serialize};

/// The statistic a report compares against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Kolmogorov-Smirnov p-value.
    Ks,
    L1Histogram,
    MaxAbsDev,
    /// Absolute standardized deviation of a proportion.
    BinomialZ,
    /// Median relative deviation between two paths.
    RelativeDrift,
}

/// Whether passing needs the value below or above the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AtMost,
    AtLeast,
}

impl Statistic {
    pub fn direction(self) -> Direction {
        match self {
            Statistic::Ks => Direction::AtLeast,
            _ => Direction::AtMost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub statistic: Statistic,
    pub value: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub pass: bool,
    pub n_samples: usize,
    pub seed: u64,
    pub runtime_secs: f64,
    /// Stride used to decorrelate a path before testing, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thinning: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, statistic: Statistic, value: f64, threshold: f64, n_samples: usize, seed: u64) -> Self {
        let direction = statistic.direction();
        let pass = match direction {
            Direction::AtMost => value <= threshold,
            Direction::AtLeast => value >= threshold,
        };
        Self {
            name: name.into(),
            statistic,
            value,
            threshold,
            direction,
            pass,
            n_samples,
            seed,
            runtime_secs: 0.0,
            thinning: None,
            detail: None,
        }
    }

    pub fn with_runtime(mut self, secs: f64) -> Self {
        self.runtime_secs = secs;
        self
    }

    pub fn with_thinning(mut self, stride: usize) -> Self {
        self.thinning = Some(stride);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// One-line human-readable summary.
    pub fn summary(&self) -> String {
        let op = match self.direction {
            Direction::AtMost => "<=",
            Direction::AtLeast => ">=",
        };
        format!(
            "{} {:<22} {:?} = {:.6} (need {} {}) n={} [{:.2}s]",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.statistic,
            self.value,
            op,
            self.threshold,
            self.n_samples,
            self.runtime_secs
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_follows_direction() {
        assert!(VerificationReport::new("a", Statistic::L1Histogram, 0.04, 0.05, 1, 0).pass);
        assert!(!VerificationReport::new("a", Statistic::L1Histogram, 0.06, 0.05, 1, 0).pass);
        assert!(VerificationReport::new("a", Statistic::Ks, 0.2, 0.01, 1, 0).pass);
        assert!(!VerificationReport::new("a", Statistic::Ks, 0.001, 0.01, 1, 0).pass);
        assert!(!VerificationReport::new("a", Statistic::MaxAbsDev, f64::NAN, 0.1, 1, 0).pass);
    }

    #[test]
    fn serializes_to_json() {
        let r = VerificationReport::new("fig5", Statistic::Ks, 0.5, 0.01, 10, 3).with_thinning(4);
        let j = serde_json::to_value(&r).unwrap();
        assert_eq!(j["statistic"], "ks");
        assert_eq!(j["direction"], "at_least");
        assert_eq!(j["thinning"], 4);
        assert!(j.get("detail").is_none());
    }
}
