//! Correlated Rayleigh fading. The complex gain `h = I + iQ` has independent Gaussian
//! quadratures whose autocorrelation follows `J0(2 pi nu_max lag)`. Each quadrature is an
//! autoregressive process fitted to that autocorrelation, and the power gain is
//! `G = |h|^2 ~ Exp(1)` with autocovariance `J0^2`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::procsim::{PathKind, SamplePath};
use crate::rng::{substream, Component};
use crate::special::bessel_j0;

/// Discretization of the Jakes fading process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingModel {
    nu_max: f64,
    dt: f64,
    ar_order: usize,
    bias_eps: f64,
}

impl FadingModel {
    pub const DEFAULT_ORDER: usize = 50;
    pub const DEFAULT_BIAS: f64 = 1e-9;

    pub fn new(nu_max: f64, dt: f64) -> Result<Self> {
        Self::with_options(nu_max, dt, Self::DEFAULT_ORDER, Self::DEFAULT_BIAS)
    }

    pub fn with_options(nu_max: f64, dt: f64, ar_order: usize, bias_eps: f64) -> Result<Self> {
        if !(nu_max >= 0.0 && nu_max.is_finite()) {
            return Err(invalid("nu_max", format!("Doppler shift must be finite and >= 0, got {nu_max}")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("sampling interval must be > 0, got {dt}")));
        }
        if ar_order == 0 {
            return Err(invalid("ar_order", "must be at least 1"));
        }
        if !(bias_eps >= 0.0 && bias_eps.is_finite()) {
            return Err(invalid("bias_eps", format!("must be finite and >= 0, got {bias_eps}")));
        }
        if 2.0 * nu_max * dt >= 1.0 {
            log::warn!("2 nu_max dt = {} >= 1: the Doppler spectrum is undersampled", 2.0 * nu_max * dt);
        }
        Ok(Self {
            nu_max,
            dt,
            ar_order,
            bias_eps,
        })
    }

    pub fn nu_max(&self) -> f64 {
        self.nu_max
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn ar_order(&self) -> usize {
        self.ar_order
    }

    pub fn bias_eps(&self) -> f64 {
        self.bias_eps
    }

    /// Target autocorrelation of the complex gain at `m` samples.
    pub fn autocorrelation(&self, m: usize) -> f64 {
        bessel_j0(2.0 * std::f64::consts::PI * self.nu_max * self.dt * m as f64)
    }

    /// Number of samples spanning the coherence-time heuristic `1/(2 nu_max)`.
    pub fn coherence_samples(&self) -> usize {
        if self.nu_max == 0.0 {
            return usize::MAX;
        }
        (0.5 / (self.nu_max * self.dt)).ceil() as usize
    }
}

/// Fitted AR model of one quadrature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArFit {
    model: FadingModel,
    /// `a_1..a_p` with `x_n = sum_i a_i x_{n-i} + e_n`; empty for the constant channel.
    coefficients: Vec<f64>,
    innovation_variance: f64,
    /// Coefficients of the order-1..p-1 predictors, used to draw a stationary start.
    partial: Vec<Vec<f64>>,
    /// Prediction-error variances of orders 0..p-1.
    partial_variance: Vec<f64>,
}

impl ArFit {
    pub fn model(&self) -> &FadingModel {
        &self.model
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn innovation_variance(&self) -> f64 {
        self.innovation_variance
    }

    /// True for `nu_max = 0`, where the gain never changes.
    pub fn is_constant(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Lag-zero variance of the fitted process, `1 + bias_eps`.
    pub fn variance(&self) -> f64 {
        1.0 + self.model.bias_eps
    }
}

/// Solves the loaded Yule-Walker system by the Levinson-Durbin recursion.
pub fn fit_ar(model: &FadingModel) -> Result<ArFit> {
    let p = model.ar_order;
    let r0 = 1.0 + model.bias_eps;
    if model.nu_max == 0.0 {
        return Ok(ArFit {
            model: *model,
            coefficients: Vec::new(),
            innovation_variance: 0.0,
            partial: Vec::new(),
            partial_variance: vec![r0],
        });
    }
    let r: Vec<f64> = (0..=p).map(|m| model.autocorrelation(m)).collect();
    let mut a: Vec<f64> = Vec::with_capacity(p);
    let mut err = r0;
    let mut partial = Vec::with_capacity(p);
    let mut partial_variance = Vec::with_capacity(p);
    for m in 1..=p {
        partial.push(a.clone());
        partial_variance.push(err);
        let acc: f64 = a.iter().enumerate().map(|(i, ai)| ai * r[m - 1 - i]).sum();
        let kappa = (r[m] - acc) / err;
        if !(kappa.abs() < 1.0) {
            return Err(Error::IllConditioned {
                order: m,
                reason: format!("reflection coefficient {kappa} outside (-1, 1)"),
            });
        }
        let prev = a.clone();
        for i in 0..a.len() {
            a[i] -= kappa * prev[a.len() - 1 - i];
        }
        a.push(kappa);
        err *= 1.0 - kappa * kappa;
        if !(err > 0.0) {
            return Err(Error::IllConditioned {
                order: m,
                reason: format!("prediction error variance {err} not positive"),
            });
        }
    }
    Ok(ArFit {
        model: *model,
        coefficients: a,
        innovation_variance: err,
        partial,
        partial_variance,
    })
}

fn ar_stream<R: Rng + ?Sized>(fit: &ArFit, n: usize, rng: &mut R) -> Vec<f64> {
    let p = fit.coefficients.len();
    let burn = 10 * p;
    let total = burn + n;
    let mut x = Vec::with_capacity(total);
    for t in 0..total {
        let (coef, var): (&[f64], f64) = if t < p {
            (&fit.partial[t], fit.partial_variance[t])
        } else {
            (&fit.coefficients, fit.innovation_variance)
        };
        let pred: f64 = coef.iter().enumerate().map(|(i, a)| a * x[t - 1 - i]).sum();
        let xi: f64 = rng.sample(StandardNormal);
        x.push(pred + var.sqrt() * xi);
    }
    x.drain(..burn);
    x
}

/// In-phase and quadrature components, each of variance one half.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexGain {
    pub dt: f64,
    pub in_phase: Vec<f64>,
    pub quadrature: Vec<f64>,
}

/// Simulates `n_steps + 1` samples of the complex gain from the substreams of `(seed, path)`.
pub fn complex_gain_path(fit: &ArFit, n_steps: usize, seed: u64, path: u64) -> ComplexGain {
    let n = n_steps + 1;
    let scale = (0.5 / fit.variance()).sqrt();
    let draw = |component| {
        let mut rng = substream(seed, path, component);
        if fit.is_constant() {
            let xi: f64 = rng.sample(StandardNormal);
            vec![xi * 0.5f64.sqrt(); n]
        } else {
            ar_stream(fit, n, &mut rng).into_iter().map(|v| v * scale).collect()
        }
    };
    let in_phase = draw(Component::FadingInPhase);
    let quadrature = draw(Component::FadingQuadrature);
    ComplexGain {
        dt: fit.model.dt,
        in_phase,
        quadrature,
    }
}

/// Power-gain path `G = |h|^2` with `n_steps + 1` samples.
pub fn gain_path(fit: &ArFit, n_steps: usize, seed: u64, path: u64) -> SamplePath {
    let h = complex_gain_path(fit, n_steps, seed, path);
    let values = h
        .in_phase
        .iter()
        .zip(&h.quadrature)
        .map(|(i, q)| i * i + q * q)
        .collect();
    SamplePath {
        kind: PathKind::Gain,
        dt: fit.model.dt,
        seed,
        path,
        values,
        diagnostics: None,
    }
}

/// Independent unit-mean exponential gains, `-ln U` with `U` uniform on `(0, 1]`.
pub fn gain_iid<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u = 1.0 - rng.random::<f64>();
            -u.ln()
        })
        .collect()
}
