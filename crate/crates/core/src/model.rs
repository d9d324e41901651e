//! Model parameters shared by every other module.
//!
//! Mobility is a per-coordinate Ornstein-Uhlenbeck process with relaxation
//! time `tau`, diffusion coefficient `diffusion` and rest position `mu`. The
//! squared inter-node distance is then a CIR diffusion
//!
//! ```text
//! dZ = k (theta - Z) dt + sigma sqrt(Z) dW,   k = 2/tau, theta = 2 D tau, sigma = 2 sqrt(2 D)
//! ```
//!
//! and the link SNR is `N = psi * Z^(-eta/2) * G` with `G ~ Exp(1)` under
//! Rayleigh fading (or `G = 1` without fading).

use serde::Serialize;

use crate::error::{invalid, Result};

/// Ornstein-Uhlenbeck mobility of a single coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MobilityParams {
    tau: f64,
    diffusion: f64,
    mu: f64,
}

impl MobilityParams {
    pub fn new(tau: f64, diffusion: f64, mu: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(invalid("tau", format!("relaxation time must be > 0, got {tau}")));
        }
        if !(diffusion.is_finite() && diffusion > 0.0) {
            return Err(invalid(
                "diffusion",
                format!("diffusion coefficient must be > 0, got {diffusion}"),
            ));
        }
        if !mu.is_finite() {
            return Err(invalid("mu", "rest position must be finite"));
        }
        Ok(Self { tau, diffusion, mu })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Stationary variance `D tau / 2` of one coordinate.
    pub fn stationary_variance(&self) -> f64 {
        0.5 * self.diffusion * self.tau
    }

    pub fn cir(&self) -> CirParams {
        derive_cir(self)
    }
}

/// CIR coefficients of the squared-distance process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CirParams {
    k: f64,
    theta: f64,
    sigma: f64,
}

/// Maps mobility parameters onto the squared-distance diffusion.
pub fn derive_cir(m: &MobilityParams) -> CirParams {
    CirParams {
        k: 2.0 / m.tau,
        theta: 2.0 * m.diffusion * m.tau,
        sigma: 2.0 * (2.0 * m.diffusion).sqrt(),
    }
}

impl CirParams {
    /// Builds coefficients directly. Unlike [`derive_cir`] this does not tie
    /// `sigma` to `k` and `theta`, so the Feller equality need not hold.
    pub fn new(k: f64, theta: f64, sigma: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(invalid("k", format!("mean-reversion speed must be > 0, got {k}")));
        }
        if !(theta.is_finite() && theta > 0.0) {
            return Err(invalid("theta", format!("long-run mean must be > 0, got {theta}")));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(invalid("sigma", format!("volatility must be >= 0, got {sigma}")));
        }
        Ok(Self { k, theta, sigma })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Copy with a different long-run mean; `k` and `sigma` are kept.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.k, theta, self.sigma)
    }

    /// `2 k theta / sigma^2`; exactly 1 for parameters derived from mobility.
    pub fn feller_ratio(&self) -> f64 {
        2.0 * self.k * self.theta / (self.sigma * self.sigma)
    }

    pub fn transition(&self, lag: f64) -> Result<TransitionCoefficients> {
        TransitionCoefficients::new(self, lag)
    }
}

/// Coefficients of the noncentral chi-square transition over a fixed lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionCoefficients {
    c: f64,
    u: f64,
    decay: f64,
    lag: f64,
}

impl TransitionCoefficients {
    pub fn new(cir: &CirParams, lag: f64) -> Result<Self> {
        if !(lag > 0.0) || lag.is_nan() {
            return Err(crate::error::domain(
                "transition",
                format!("lag must be > 0, got {lag}"),
            ));
        }
        let decay = (-cir.k * lag).exp();
        let c = 1.0 / (cir.theta * -(-cir.k * lag).exp_m1());
        Ok(Self {
            c,
            u: c * decay,
            decay,
            lag,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn lag(&self) -> f64 {
        self.lag
    }

    /// `u / c = exp(-k lag)`, computed without the division.
    pub fn decay(&self) -> f64 {
        self.decay
    }

    /// Squared Rice line-of-sight scale `a^2 = u / c`.
    pub fn rice_a_sq(&self) -> f64 {
        self.decay
    }

    /// Squared Rice spread `b^2 = 1 / (2c)`.
    pub fn rice_b_sq(&self) -> f64 {
        0.5 / self.c
    }
}

/// Reduced fraction `p / q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Exponent {
    p: u32,
    q: u32,
}

/// Path-loss exponent `eta = p / q` (kept exact) and the gain constant `psi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathLossParams {
    exponent: Exponent,
    psi: f64,
}

/// Largest denominator tried when rationalizing a float exponent.
pub const MAX_DENOMINATOR: u32 = 100;

impl PathLossParams {
    pub fn new(p: u32, q: u32, psi: f64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(invalid("eta", format!("p and q must be >= 1, got {p}/{q}")));
        }
        if !(psi.is_finite() && psi > 0.0) {
            return Err(invalid("psi", format!("gain constant must be > 0, got {psi}")));
        }
        let g = gcd(p, q);
        let exponent = Exponent { p: p / g, q: q / g };
        let out = Self { exponent, psi };
        if !out.in_typical_range() {
            log::warn!(
                "path loss exponent {} = {} lies outside the typical range [2, 5]",
                out.eta_label(),
                out.eta()
            );
        }
        Ok(out)
    }

    /// Rationalizes `eta` by continued fractions with denominator at most
    /// [`MAX_DENOMINATOR`].
    pub fn from_eta(eta: f64, psi: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(invalid("eta", format!("path loss exponent must be > 0, got {eta}")));
        }
        let (p, q) = rationalize(eta, MAX_DENOMINATOR)
            .ok_or_else(|| invalid("eta", format!("cannot rationalize {eta}")))?;
        Self::new(p, q, psi)
    }

    /// Accepts `"p/q"` or a decimal such as `"2.5"`.
    pub fn parse(text: &str, psi: f64) -> Result<Self> {
        let text = text.trim();
        if let Some((p, q)) = text.split_once('/') {
            let p = p
                .trim()
                .parse::<u32>()
                .map_err(|e| invalid("eta", format!("bad numerator in `{text}`: {e}")))?;
            let q = q
                .trim()
                .parse::<u32>()
                .map_err(|e| invalid("eta", format!("bad denominator in `{text}`: {e}")))?;
            Self::new(p, q, psi)
        } else {
            let eta = text
                .parse::<f64>()
                .map_err(|e| invalid("eta", format!("bad exponent `{text}`: {e}")))?;
            Self::from_eta(eta, psi)
        }
    }

    pub fn p(&self) -> u32 {
        self.exponent.p
    }

    pub fn q(&self) -> u32 {
        self.exponent.q
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn eta(&self) -> f64 {
        f64::from(self.exponent.p) / f64::from(self.exponent.q)
    }

    pub fn eta_label(&self) -> String {
        if self.exponent.q == 1 {
            self.exponent.p.to_string()
        } else {
            format!("{}/{}", self.exponent.p, self.exponent.q)
        }
    }

    /// True when eta is exactly the integer `n`.
    pub fn is_integer(&self, n: u32) -> bool {
        self.exponent.q == 1 && self.exponent.p == n
    }

    pub fn in_typical_range(&self) -> bool {
        let e = self.eta();
        (2.0..=5.0).contains(&e)
    }

    pub fn with_psi(&self, psi: f64) -> Result<Self> {
        Self::new(self.exponent.p, self.exponent.q, psi)
    }
}

/// Best rational approximation `p/q` with `q <= max_den` (continued fractions
/// with a final semiconvergent check).
pub fn rationalize(x: f64, max_den: u32) -> Option<(u32, u32)> {
    if !(x.is_finite() && x > 0.0) || max_den == 0 {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut frac = x;
    let max_den = u64::from(max_den);
    for _ in 0..64 {
        let a = frac.floor();
        if a > u32::MAX as f64 {
            break;
        }
        let a = a as u64;
        let q2 = a * q1 + q0;
        if q2 > max_den {
            // semiconvergent p0 + t p1 with the largest admissible t
            let t = (max_den - q0) / q1;
            let (ps, qs) = (p0 + t * p1, q0 + t * q1);
            let err_semi = (ps as f64 / qs as f64 - x).abs();
            let err_conv = (p1 as f64 / q1 as f64 - x).abs();
            if t > 0 && err_semi < err_conv {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        let p2 = a * p1 + p0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let rest = frac - a as f64;
        if rest.abs() < 1e-12 {
            break;
        }
        frac = 1.0 / rest;
    }
    if p1 == 0 || p1 > u64::from(u32::MAX) {
        return None;
    }
    Some((p1 as u32, q1 as u32))
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rayleigh parameter of the channel; fixed to one so that `G ~ Exp(1)`.
pub const RAYLEIGH_LAMBDA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    nu_max: f64,
}

impl ChannelParams {
    pub fn new(nu_max: f64) -> Result<Self> {
        if !(nu_max.is_finite() && nu_max >= 0.0) {
            return Err(invalid(
                "nu_max",
                format!("maximum Doppler shift must be >= 0, got {nu_max}"),
            ));
        }
        Ok(Self { nu_max })
    }

    pub fn nu_max(&self) -> f64 {
        self.nu_max
    }

    pub fn lambda(&self) -> f64 {
        RAYLEIGH_LAMBDA
    }
}

/// SNR threshold and the matching hard-connection range `r0 = rho_th^(-1/eta)`.
///
/// A zero threshold is accepted and means "always connected" (`r0 = inf`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrThreshold {
    rho_th: f64,
    r0: f64,
}

impl SnrThreshold {
    pub fn new(rho_th: f64, path_loss: &PathLossParams) -> Result<Self> {
        if !(rho_th >= 0.0) || rho_th.is_infinite() {
            return Err(invalid(
                "rho_th",
                format!("SNR threshold must be finite and >= 0, got {rho_th}"),
            ));
        }
        let r0 = if rho_th == 0.0 {
            f64::INFINITY
        } else {
            rho_th.recip().powf(1.0 / path_loss.eta())
        };
        Ok(Self { rho_th, r0 })
    }

    pub fn from_db(rho_th_db: f64, path_loss: &PathLossParams) -> Result<Self> {
        Self::new(db_to_linear(rho_th_db), path_loss)
    }

    pub fn rho_th(&self) -> f64 {
        self.rho_th
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(crate::error::domain(
            "linear_to_db",
            format!("linear value must be > 0, got {x}"),
        ));
    }
    Ok(10.0 * x.log10())
}

/// Every model symbol in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    pub mobility: MobilityParams,
    pub path_loss: PathLossParams,
    pub channel: ChannelParams,
    pub threshold: SnrThreshold,
}

impl SystemParams {
    pub fn cir(&self) -> CirParams {
        self.mobility.cir()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn cir_from_figure_parameters() {
        let cir = MobilityParams::new(1.0, 100.0, 0.0).unwrap().cir();
        assert_eq!(cir.k(), 2.0);
        assert_eq!(cir.theta(), 200.0);
        assert!((cir.sigma() - 28.284_271_247_461_9).abs() < 1e-12);

        let cir = MobilityParams::new(0.6, 4.0, 0.0).unwrap().cir();
        assert!(rel(cir.k(), 10.0 / 3.0) < 1e-15);
        assert!(rel(cir.theta(), 4.8) < 1e-15);
        assert!(rel(cir.sigma(), 4.0 * 2f64.sqrt()) < 1e-15);

        let cir = MobilityParams::new(1.0, 0.125, 0.0).unwrap().cir();
        assert_eq!(2.0 * cir.k() * cir.theta(), 1.0);
        assert_eq!(cir.sigma() * cir.sigma(), 1.0);
    }

    #[test]
    fn rejects_bad_mobility() {
        assert!(MobilityParams::new(0.0, 1.0, 0.0).is_err());
        assert!(MobilityParams::new(1.0, -1.0, 0.0).is_err());
        assert!(MobilityParams::new(f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn transition_limits() {
        let cir = MobilityParams::new(1.0, 100.0, 0.0).unwrap().cir();
        let far = cir.transition(50.0).unwrap();
        assert!((far.c() - 1.0 / cir.theta()).abs() < 1e-10);
        assert!(far.u() < 1e-10);
        let near = cir.transition(1e-9).unwrap();
        assert!(near.c() > 1e6);
        assert!((near.u() / near.c() - 1.0).abs() < 1e-8);
        assert!(near.u() < near.c());
        assert!(cir.transition(0.0).is_err());
        assert!(cir.transition(-1.0).is_err());
    }

    #[test]
    fn rice_parameters() {
        let cir = MobilityParams::new(1.0, 100.0, 0.0).unwrap().cir();
        let tc = cir.transition(0.2).unwrap();
        assert!(rel(tc.rice_a_sq(), tc.u() / tc.c()) < 1e-14);
        assert!(rel(tc.rice_b_sq(), 1.0 / (2.0 * tc.c())) < 1e-15);
    }

    #[test]
    fn exponent_parsing_and_reduction() {
        let pl = PathLossParams::new(4, 2, 1.0).unwrap();
        assert_eq!((pl.p(), pl.q()), (2, 1));
        assert!(pl.is_integer(2));
        let pl = PathLossParams::parse("5/2", 1.0).unwrap();
        assert_eq!((pl.p(), pl.q()), (5, 2));
        let pl = PathLossParams::parse("3.5", 1.0).unwrap();
        assert_eq!((pl.p(), pl.q()), (7, 2));
        let pl = PathLossParams::parse("2.7", 1.0).unwrap();
        assert_eq!((pl.p(), pl.q()), (27, 10));
        assert!(PathLossParams::parse("0/1", 1.0).is_err());
        assert!(PathLossParams::parse("x", 1.0).is_err());
        assert!(PathLossParams::new(2, 1, 0.0).is_err());
        // outside [2, 5] is only a warning
        assert!(!PathLossParams::new(1, 1, 1.0).unwrap().in_typical_range());
    }

    #[test]
    fn rationalize_respects_denominator_cap() {
        let (p, q) = rationalize(std::f64::consts::PI, 100).unwrap();
        assert_eq!((p, q), (311, 99));
        let (p, q) = rationalize(std::f64::consts::PI, 10).unwrap();
        assert_eq!((p, q), (22, 7));
        assert_eq!(rationalize(2.0, 100), Some((2, 1)));
        assert_eq!(rationalize(0.0, 100), None);
    }

    #[test]
    fn decibels() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(2.0) - 1.584_893_192_461_113_5).abs() < 1e-15);
        assert!(rel(db_to_linear(10.0), 10.0) < 1e-15);
        for x in [1e-6, 0.3, 1.0, 7.5, 1e9] {
            assert!(rel(db_to_linear(linear_to_db(x).unwrap()), x) < 1e-12);
        }
        assert!(linear_to_db(0.0).is_err());
        assert!(linear_to_db(-3.0).is_err());
    }

    #[test]
    fn threshold_round_trip() {
        for (p, q) in [(2, 1), (4, 1), (5, 2), (3, 1)] {
            let pl = PathLossParams::new(p, q, 1.0).unwrap();
            for rho in [0.01, 0.5, 1.0, 2.0, 1e3] {
                let thr = SnrThreshold::new(rho, &pl).unwrap();
                assert!(rel(thr.r0().powf(pl.eta()).recip(), rho) < 1e-12);
            }
        }
        let pl = PathLossParams::new(2, 1, 1.0).unwrap();
        assert_eq!(SnrThreshold::new(0.0, &pl).unwrap().r0(), f64::INFINITY);
        assert!(SnrThreshold::new(-1.0, &pl).is_err());
    }
}
