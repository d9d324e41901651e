//! On/off sojourns of an SNR path around a threshold.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::SnrThreshold;
use crate::procsim::{PathKind, SamplePath};

/// One maximal run of samples on the same side of the threshold.
///
/// Sample `i` stands for the interval `[i dt, (i+1) dt)`, so a crossing between two
/// samples is attributed to the later one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sojourn {
    pub on: bool,
    pub start: usize,
    pub samples: usize,
    /// The run touches either end of the path, so its true length is unknown.
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingSummary {
    pub threshold: f64,
    pub dt: f64,
    pub sojourns: Vec<Sojourn>,
    pub fraction_on: f64,
}

impl CrossingSummary {
    fn durations(&self, on: bool) -> Vec<f64> {
        self.sojourns
            .iter()
            .filter(|s| s.on == on)
            .map(|s| s.samples as f64 * self.dt)
            .collect()
    }

    /// Every on-sojourn in seconds, boundary ones included.
    pub fn on_durations(&self) -> Vec<f64> {
        self.durations(true)
    }

    pub fn off_durations(&self) -> Vec<f64> {
        self.durations(false)
    }

    /// Total number of samples covered, equal to the path length.
    pub fn total_samples(&self) -> usize {
        self.sojourns.iter().map(|s| s.samples).sum()
    }

    pub fn horizon(&self) -> f64 {
        self.total_samples() as f64 * self.dt
    }

    /// Mean duration over uncensored sojourns, if any.
    pub fn mean_duration(&self, on: bool) -> Option<f64> {
        let full: Vec<f64> = self
            .sojourns
            .iter()
            .filter(|s| s.on == on && !s.censored)
            .map(|s| s.samples as f64 * self.dt)
            .collect();
        (!full.is_empty()).then(|| full.iter().sum::<f64>() / full.len() as f64)
    }

    /// Number of off-to-on transitions per second.
    pub fn upcrossing_rate(&self) -> f64 {
        let ups = self.sojourns.iter().skip(1).filter(|s| s.on).count();
        ups as f64 / self.horizon()
    }
}

/// Splits an SNR path into on (`N >= rho_th`) and off sojourns.
pub fn crossing_analysis(path: &SamplePath, thr: &SnrThreshold) -> Result<CrossingSummary> {
    if path.kind != PathKind::Snr {
        return Err(invalid("path", "crossing analysis needs an SNR path"));
    }
    let n = path.len();
    if n < 2 {
        return Err(invalid("path", "need at least two samples"));
    }
    let rho = thr.rho_th();
    let mut sojourns: Vec<Sojourn> = Vec::new();
    let mut on_samples = 0usize;
    for (i, &v) in path.values.iter().enumerate() {
        let on = v >= rho;
        on_samples += usize::from(on);
        match sojourns.last_mut() {
            Some(s) if s.on == on => s.samples += 1,
            _ => sojourns.push(Sojourn {
                on,
                start: i,
                samples: 1,
                censored: i == 0,
            }),
        }
    }
    if let Some(last) = sojourns.last_mut() {
        last.censored = true;
    }
    Ok(CrossingSummary {
        threshold: rho,
        dt: path.dt,
        sojourns,
        fraction_on: on_samples as f64 / n as f64,
    })
}
