//! Laws of a node coordinate, the squared separation `Z` and the distance `R = sqrt(Z)`.

use crate::error::{domain, Result};
use crate::model::{CirParams, MobilityParams};
use crate::special::log_bessel_i0_scaled;

fn check_nonneg(op: &'static str, name: &str, x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(domain(op, format!("{name} must be >= 0, got {x}")))
    }
}

/// Mean and variance of a coordinate at time `t` after starting at `s0`.
pub fn ou_moments(t: f64, s0: f64, m: &MobilityParams) -> Result<(f64, f64)> {
    check_nonneg("ou_moments", "t", t)?;
    let decay = (-t / m.tau()).exp();
    let mean = m.mu() + (s0 - m.mu()) * decay;
    let variance = -m.stationary_variance() * (-2.0 * t / m.tau()).exp_m1();
    Ok((mean, variance))
}

/// Stationary autocovariance of a coordinate, `(D tau / 2) exp(-lag / tau)`.
pub fn ou_autocov(lag: f64, m: &MobilityParams) -> Result<f64> {
    check_nonneg("ou_autocov", "lag", lag)?;
    Ok(m.stationary_variance() * (-lag / m.tau()).exp())
}

/// Log of the transition density of `Z_s` given `Z_t = z_t` after `lag` seconds.
pub fn z_transition_ln_pdf(z_s: f64, z_t: f64, lag: f64, cir: &CirParams) -> Result<f64> {
    check_nonneg("z_transition_pdf", "z_s", z_s)?;
    check_nonneg("z_transition_pdf", "z_t", z_t)?;
    let tc = cir.transition(lag)?;
    let (c, u) = (tc.c(), tc.u());
    let a = (z_s * c).sqrt();
    let b = (z_t * u).sqrt();
    Ok(c.ln() - (a - b).powi(2) + log_bessel_i0_scaled(2.0 * a * b)?)
}

/// Noncentral chi-square transition density of the squared distance.
pub fn z_transition_pdf(z_s: f64, z_t: f64, lag: f64, cir: &CirParams) -> Result<f64> {
    z_transition_ln_pdf(z_s, z_t, lag, cir).map(f64::exp)
}

/// Stationary exponential density of `Z` with mean `theta`.
pub fn z_stationary_pdf(z: f64, cir: &CirParams) -> Result<f64> {
    check_nonneg("z_stationary_pdf", "z", z)?;
    Ok((-z / cir.theta()).exp() / cir.theta())
}

pub fn z_stationary_cdf(z: f64, cir: &CirParams) -> Result<f64> {
    check_nonneg("z_stationary_cdf", "z", z)?;
    Ok(-(-z / cir.theta()).exp_m1())
}

/// Stationary autocovariance of `Z`, `theta^2 exp(-k lag)`.
pub fn z_autocov(lag: f64, cir: &CirParams) -> Result<f64> {
    check_nonneg("z_autocov", "lag", lag)?;
    Ok(cir.theta().powi(2) * (-cir.k() * lag).exp())
}

/// Rice transition density of the distance `R_s` given `R_t = r_t`.
pub fn r_transition_pdf(r_s: f64, r_t: f64, lag: f64, cir: &CirParams) -> Result<f64> {
    check_nonneg("r_transition_pdf", "r_s", r_s)?;
    check_nonneg("r_transition_pdf", "r_t", r_t)?;
    let tc = cir.transition(lag)?;
    if r_s == 0.0 {
        return Ok(0.0);
    }
    let a = tc.rice_a_sq().sqrt();
    let b2 = tc.rice_b_sq();
    let los = r_t * a;
    let ln = (r_s / b2).ln() - (r_s - los).powi(2) / (2.0 * b2) + log_bessel_i0_scaled(r_s * los / b2)?;
    Ok(ln.exp())
}

/// Stationary Rayleigh density of the distance, `(2r/theta) exp(-r^2/theta)`.
pub fn r_stationary_pdf(r: f64, cir: &CirParams) -> Result<f64> {
    check_nonneg("r_stationary_pdf", "r", r)?;
    let theta = cir.theta();
    Ok(2.0 * r / theta * (-r * r / theta).exp())
}

pub fn r_stationary_cdf(r: f64, cir: &CirParams) -> Result<f64> {
    check_nonneg("r_stationary_cdf", "r", r)?;
    Ok(-(-r * r / cir.theta()).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> CirParams {
        MobilityParams::new(1.0, 100.0, 0.0).unwrap().cir()
    }

    #[test]
    fn ou_moments_limits() {
        let m = MobilityParams::new(1.0, 100.0, 0.0).unwrap();
        assert_eq!(ou_moments(0.0, 5.0, &m).unwrap(), (5.0, 0.0));
        let (mean, var) = ou_moments(100.0, 5.0, &m).unwrap();
        assert!(mean.abs() < 1e-40);
        assert!((var - 50.0).abs() < 1e-12);
        let (_, var) = ou_moments(1.0, 0.0, &m).unwrap();
        assert!((var - 50.0 * (1.0 - (-2.0f64).exp())).abs() < 1e-12);
        assert!(ou_moments(-1.0, 0.0, &m).is_err());
    }

    #[test]
    fn ou_autocov_values() {
        let m = MobilityParams::new(1.0, 100.0, 0.0).unwrap();
        assert_eq!(ou_autocov(0.0, &m).unwrap(), 50.0);
        assert!((ou_autocov(1.0, &m).unwrap() - 18.393_972_058_572_12).abs() < 1e-12);
    }

    #[test]
    fn zero_noncentrality_is_exponential() {
        let cir = fig3();
        let tc = cir.transition(0.2).unwrap();
        for z in [0.0, 1.0, 100.0, 5000.0] {
            let got = z_transition_pdf(z, 0.0, 0.2, &cir).unwrap();
            let want = tc.c() * (-z * tc.c()).exp();
            assert!((got - want).abs() <= 1e-12 * want, "{got} {want}");
        }
    }

    #[test]
    fn large_arguments_stay_finite() {
        let cir = fig3();
        let v = z_transition_pdf(3000.0, 3000.0, 0.01, &cir).unwrap();
        assert!(v.is_finite() && v > 0.0);
        let far = z_transition_pdf(1e6, 3000.0, 0.2, &cir).unwrap();
        assert_eq!(far, 0.0);
    }

    #[test]
    fn long_lag_forgets_start() {
        let cir = fig3();
        for z_t in [0.0, 3000.0] {
            for z_s in [0.0, 50.0, 200.0, 1000.0] {
                let got = z_transition_pdf(z_s, z_t, 10.0, &cir).unwrap();
                let want = z_stationary_pdf(z_s, &cir).unwrap();
                assert!((got - want).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rice_with_zero_offset_is_rayleigh() {
        let cir = fig3();
        let tc = cir.transition(0.3).unwrap();
        let b2 = tc.rice_b_sq();
        for r in [0.0, 1.0, 3.0, 10.0] {
            let got = r_transition_pdf(r, 0.0, 0.3, &cir).unwrap();
            let want = r / b2 * (-r * r / (2.0 * b2)).exp();
            assert!((got - want).abs() <= 1e-14 * want.max(1e-300));
        }
    }

    #[test]
    fn stationary_values() {
        let cir = fig3();
        assert_eq!(z_stationary_pdf(0.0, &cir).unwrap(), 0.005);
        assert!((z_stationary_pdf(200.0, &cir).unwrap() - (-1.0f64).exp() / 200.0).abs() < 1e-18);
        assert_eq!(r_stationary_pdf(0.0, &cir).unwrap(), 0.0);
        assert_eq!(z_autocov(0.0, &cir).unwrap(), 200.0 * 200.0);
        assert!(z_transition_pdf(1.0, 1.0, 0.0, &cir).is_err());
        assert!(r_transition_pdf(1.0, 1.0, -1.0, &cir).is_err());
    }

    #[test]
    fn rayleigh_mode() {
        let cir = fig3();
        let mode = (cir.theta() / 2.0).sqrt();
        let grid: Vec<f64> = (1..20_000).map(|i| i as f64 * 1e-3).collect();
        let best = grid
            .iter()
            .copied()
            .max_by(|a, b| r_stationary_pdf(*a, &cir).unwrap().total_cmp(&r_stationary_pdf(*b, &cir).unwrap()))
            .unwrap();
        assert!((best - mode).abs() < 1e-3);
    }
}
