//! Sample-path simulation: exact OU stepping of node coordinates, the induced squared
//! distance, and Euler-Maruyama integration of the squared-distance and SNR diffusions.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{CirParams, MobilityParams, PathLossParams};
use crate::rng::{substream, Component};

/// What a [`SamplePath`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    OuCoord,
    /// Four values per sample: `x1, y1, x2, y2`.
    Position2d,
    SquaredDistance,
    Distance,
    Snr,
    Gain,
}

impl PathKind {
    pub fn width(self) -> usize {
        match self {
            PathKind::Position2d => 4,
            _ => 1,
        }
    }
}

/// Counters collected while integrating an Euler scheme.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EulerDiagnostics {
    /// Steps whose raw update left the admissible range and was clamped.
    pub clamp_count: usize,
    /// `(step, value)` of every raw update before clamping.
    pub pre_clamp: Vec<(usize, f64)>,
    /// Step at which the state overflowed; the path stops there.
    pub blow_up: Option<usize>,
    /// Steps actually taken.
    pub steps: usize,
    /// Set when the clamp rate exceeds [`CLAMP_RATE_WARNING`].
    pub clamp_warning: bool,
}

/// Clamp rate per step above which an Euler run is flagged.
pub const CLAMP_RATE_WARNING: f64 = 1e-3;

impl EulerDiagnostics {
    pub fn clamp_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.clamp_count as f64 / self.steps as f64
        }
    }

    fn finish(&mut self, steps: usize, what: &str, dt: f64) {
        self.steps = steps;
        self.clamp_warning = self.clamp_rate() > CLAMP_RATE_WARNING;
        if self.clamp_warning {
            log::debug!(
                "{what}: {} of {steps} Euler steps clamped at dt = {dt:e}",
                self.clamp_count
            );
        }
    }
}

/// A uniformly sampled path starting at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub kind: PathKind,
    pub dt: f64,
    pub seed: u64,
    pub path: u64,
    pub values: Vec<f64>,
    pub diagnostics: Option<EulerDiagnostics>,
}

impl SamplePath {
    /// Number of time samples.
    pub fn len(&self) -> usize {
        self.values.len() / self.kind.width()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.dt * i as f64
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.len() as f64
    }

    /// Every `stride`-th sample, starting with the first.
    pub fn thinned(&self, stride: usize) -> Vec<f64> {
        assert_eq!(self.kind.width(), 1, "thinning is defined for scalar paths");
        self.values.iter().step_by(stride.max(1)).copied().collect()
    }

    /// Pointwise transform into a new scalar path of `kind`.
    pub fn map(&self, kind: PathKind, f: impl Fn(f64) -> f64) -> SamplePath {
        SamplePath {
            kind,
            dt: self.dt,
            seed: self.seed,
            path: self.path,
            values: self.values.iter().map(|&v| f(v)).collect(),
            diagnostics: None,
        }
    }
}

/// Precomputed exact transition of one OU coordinate over `dt`.
#[derive(Debug, Clone, Copy)]
pub struct OuStepper {
    mu: f64,
    decay: f64,
    sd: f64,
}

impl OuStepper {
    pub fn new(dt: f64, m: &MobilityParams) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("step must be finite and > 0, got {dt}")));
        }
        let decay = (-dt / m.tau()).exp();
        let var = -m.stationary_variance() * (-2.0 * dt / m.tau()).exp_m1();
        Ok(Self {
            mu: m.mu(),
            decay,
            sd: var.sqrt(),
        })
    }

    #[inline]
    pub fn step<R: Rng + ?Sized>(&self, s: f64, rng: &mut R) -> f64 {
        let xi: f64 = rng.sample(StandardNormal);
        self.mu + (s - self.mu) * self.decay + self.sd * xi
    }
}

/// Advances a coordinate by one exact OU transition of length `dt`.
///
/// # Panics
/// If `dt` is not finite and positive.
pub fn ou_step_exact<R: Rng + ?Sized>(s: f64, dt: f64, m: &MobilityParams, rng: &mut R) -> f64 {
    OuStepper::new(dt, m).expect("ou_step_exact needs dt > 0").step(s, rng)
}

/// Initial node placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Every coordinate drawn from its stationary law `N(mu, D tau / 2)`.
    Stationary,
    Fixed { node1: (f64, f64), node2: (f64, f64) },
}

impl Init {
    /// Nodes placed so that the initial squared distance is `z0`.
    pub fn fixed_squared_distance(z0: f64) -> Self {
        Init::Fixed {
            node1: (0.0, 0.0),
            node2: (z0.max(0.0).sqrt(), 0.0),
        }
    }
}

/// Positions, squared distance and distance of one simulated node pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPath {
    pub positions: SamplePath,
    pub z: SamplePath,
    pub r: SamplePath,
}

const COORDS: [Component; 4] = [Component::Node1X, Component::Node1Y, Component::Node2X, Component::Node2Y];

/// Simulates two nodes for `n_steps` exact steps; the paths hold `n_steps + 1` samples.
/// The four coordinates draw from independent substreams of `(seed, path)`.
pub fn simulate_pair_2d(
    m: &MobilityParams,
    dt: f64,
    n_steps: usize,
    init: Init,
    seed: u64,
    path: u64,
) -> Result<PairPath> {
    if n_steps == 0 {
        return Err(invalid("n_steps", "need at least one step"));
    }
    let stepper = OuStepper::new(dt, m)?;
    let mut rngs = COORDS.map(|c| substream(seed, path, c));
    let mut state = initial_coordinates(m, init, &mut rngs);
    let n = n_steps + 1;
    let mut positions = Vec::with_capacity(4 * n);
    let mut z = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            for (s, rng) in state.iter_mut().zip(rngs.iter_mut()) {
                *s = stepper.step(*s, rng);
            }
        }
        positions.extend_from_slice(&state);
        z.push(squared_separation(&state));
    }
    let r = z.iter().map(|v| v.sqrt()).collect();
    let make = |kind, values| SamplePath {
        kind,
        dt,
        seed,
        path,
        values,
        diagnostics: None,
    };
    Ok(PairPath {
        positions: make(PathKind::Position2d, positions),
        z: make(PathKind::SquaredDistance, z),
        r: make(PathKind::Distance, r),
    })
}

fn initial_coordinates<R: Rng>(m: &MobilityParams, init: Init, rngs: &mut [R; 4]) -> [f64; 4] {
    match init {
        Init::Stationary => {
            let sd = m.stationary_variance().sqrt();
            let mut out = [0.0; 4];
            for (o, rng) in out.iter_mut().zip(rngs.iter_mut()) {
                let xi: f64 = rng.sample(StandardNormal);
                *o = m.mu() + sd * xi;
            }
            out
        }
        Init::Fixed { node1, node2 } => [node1.0, node1.1, node2.0, node2.1],
    }
}

#[inline]
fn squared_separation(s: &[f64; 4]) -> f64 {
    let dx = s[0] - s[2];
    let dy = s[1] - s[3];
    dx * dx + dy * dy
}

/// Squared distance at time `t` for `n_paths` independent node pairs, each advanced by
/// a single exact transition. Path `i` uses substreams `(seed, i)`.
pub fn z_ensemble(m: &MobilityParams, init: Init, t: f64, n_paths: usize, seed: u64) -> Result<Vec<f64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("time must be finite and >= 0, got {t}")));
    }
    let stepper = if t > 0.0 { Some(OuStepper::new(t, m)?) } else { None };
    Ok((0..n_paths as u64)
        .into_par_iter()
        .map(|p| {
            let mut rngs = COORDS.map(|c| substream(seed, p, c));
            let mut state = initial_coordinates(m, init, &mut rngs);
            if let Some(st) = &stepper {
                for (s, rng) in state.iter_mut().zip(rngs.iter_mut()) {
                    *s = st.step(*s, rng);
                }
            }
            squared_separation(&state)
        })
        .collect())
}

/// Draws `Z_s` given `Z_t = z_t` from the exact noncentral chi-square transition, as the
/// squared norm of a shifted two-dimensional Gaussian.
pub fn z_transition_sample<R: Rng + ?Sized>(z_t: f64, lag: f64, cir: &CirParams, rng: &mut R) -> Result<f64> {
    let tc = cir.transition(lag)?;
    let sd = tc.rice_b_sq().sqrt();
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    let shift = (z_t.max(0.0) * tc.decay()).sqrt();
    Ok((shift + sd * x).powi(2) + (sd * y).powi(2))
}

/// Draws `Z` from its stationary law `Exp(theta)`.
pub fn z_stationary_sample<R: Rng + ?Sized>(cir: &CirParams, rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    cir.theta() * e
}

/// Euler discretization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EulerScheme {
    /// Coefficients evaluated at the positive part of the state; negative updates
    /// clamped back to the boundary.
    FullTruncation,
}

/// Step size and scheme for Euler integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerControl {
    dt: f64,
    scheme: EulerScheme,
}

impl EulerControl {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("step must be finite and > 0, got {dt}")));
        }
        Ok(Self {
            dt,
            scheme: EulerScheme::FullTruncation,
        })
    }

    /// The default step `1e-3 tau`.
    pub fn default_for(m: &MobilityParams) -> Self {
        Self::new(1e-3 * m.tau()).expect("tau > 0")
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> EulerScheme {
        self.scheme
    }
}

/// Full-truncation Euler path of `dZ = k(theta - Z) dt + sigma sqrt(Z) dW`.
///
/// One standard normal is drawn per step, so [`euler_snr_path`] fed an identically
/// seeded generator sees the same Brownian increments.
pub fn euler_z_path<R: Rng + ?Sized>(
    z0: f64,
    cir: &CirParams,
    ctl: &EulerControl,
    n_steps: usize,
    seed: u64,
    rng: &mut R,
) -> Result<SamplePath> {
    if !(z0 >= 0.0 && z0.is_finite()) {
        return Err(invalid("z0", format!("must be finite and >= 0, got {z0}")));
    }
    let (k, theta, sigma) = (cir.k(), cir.theta(), cir.sigma());
    let dt = ctl.dt;
    let sqdt = dt.sqrt();
    let mut diag = EulerDiagnostics::default();
    let mut values = Vec::with_capacity(n_steps + 1);
    let mut z = z0;
    values.push(z);
    for i in 1..=n_steps {
        let xi: f64 = rng.sample(StandardNormal);
        let zp = z.max(0.0);
        let next = z + k * (theta - zp) * dt + sigma * zp.sqrt() * sqdt * xi;
        z = if next < 0.0 {
            diag.clamp_count += 1;
            diag.pre_clamp.push((i, next));
            0.0
        } else {
            next
        };
        values.push(z);
    }
    diag.finish(n_steps, "squared distance", dt);
    Ok(SamplePath {
        kind: PathKind::SquaredDistance,
        dt,
        seed,
        path: 0,
        values,
        diagnostics: Some(diag),
    })
}

/// Drift and diffusion of the link-SNR diffusion `N = Z^(-eta/2)` (unit `psi`).
pub fn snr_sde_coefficients(n: f64, cir: &CirParams, pl: &PathLossParams) -> (f64, f64) {
    let (k, theta, sigma) = (cir.k(), cir.theta(), cir.sigma());
    let eta = pl.eta();
    let h = 0.5 * eta;
    let n_pow = n.powf(1.0 + 2.0 / eta);
    let drift = k * h * n - k * theta * h * n_pow + 0.5 * sigma * sigma * h * (1.0 + h) * n_pow;
    let diffusion = -sigma * h * n.powf(1.0 + 1.0 / eta);
    (drift, diffusion)
}

/// Euler path of the link-SNR diffusion started at `n0`.
///
/// Updates that leave `(0, inf)` are reflected to the floor `f64::EPSILON` and counted.
/// If the state overflows the path stops and the step is recorded in the diagnostics.
pub fn euler_snr_path<R: Rng + ?Sized>(
    n0: f64,
    cir: &CirParams,
    pl: &PathLossParams,
    ctl: &EulerControl,
    n_steps: usize,
    seed: u64,
    rng: &mut R,
) -> Result<SamplePath> {
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(invalid("n0", format!("must be finite and > 0, got {n0}")));
    }
    let dt = ctl.dt;
    let sqdt = dt.sqrt();
    let mut diag = EulerDiagnostics::default();
    let mut values = Vec::with_capacity(n_steps + 1);
    let mut n = n0;
    values.push(n);
    for i in 1..=n_steps {
        let xi: f64 = rng.sample(StandardNormal);
        let (a, b) = snr_sde_coefficients(n, cir, pl);
        let next = n + a * dt + b * sqdt * xi;
        if !next.is_finite() {
            diag.blow_up = Some(i);
            break;
        }
        n = if next <= 0.0 {
            diag.clamp_count += 1;
            diag.pre_clamp.push((i, next));
            f64::EPSILON
        } else {
            next
        };
        values.push(n);
    }
    diag.finish(values.len() - 1, "link SNR", dt);
    Ok(SamplePath {
        kind: PathKind::Snr,
        dt,
        seed,
        path: 0,
        values,
        diagnostics: Some(diag),
    })
}

/// Stationary starting SNR `Z0^(-eta/2)` with `Z0 ~ Exp(theta)`.
pub fn stationary_snr_start<R: Rng + ?Sized>(cir: &CirParams, pl: &PathLossParams, rng: &mut R) -> f64 {
    let z = z_stationary_sample(cir, rng);
    pl.psi() * z.powf(-0.5 * pl.eta())
}

/// Link SNR `psi Z^(-eta/2)` along a squared-distance path, optionally multiplied by a
/// fading gain path of the same length.
pub fn snr_from_distance(z: &SamplePath, pl: &PathLossParams, gain: Option<&SamplePath>) -> Result<SamplePath> {
    if z.kind != PathKind::SquaredDistance {
        return Err(invalid("z", "expected a squared-distance path"));
    }
    let h = 0.5 * pl.eta();
    let mut out = z.map(PathKind::Snr, |v| pl.psi() * v.powf(-h));
    if let Some(g) = gain {
        if g.len() != z.len() || g.kind != PathKind::Gain {
            return Err(invalid("gain", "gain path must match the distance path length"));
        }
        for (o, gv) in out.values.iter_mut().zip(&g.values) {
            *o *= gv;
        }
    }
    Ok(out)
}
