//! Link-SNR laws with unit-mean Rayleigh fading, `N = psi * Z^(-eta/2) * G`, `G ~ Exp(1)`.

use crate::error::{domain, Result};
use crate::model::{CirParams, PathLossParams, SnrThreshold};
use crate::quad::{integrate, integrate_to_infinity, QuadratureControl};
use crate::special::erfcx;

/// Density of the faded link SNR for any rational path-loss exponent.
///
/// Conditioning on `Z = w` leaves an exponential law with rate `w^(eta/2)`, so
/// `f(rho) = (1/theta) int_0^inf w^(eta/2) exp(-rho w^(eta/2) - w/theta) dw`.
/// The integral is rescaled so that both exponents are of order one on `[0, 1]`,
/// then split at 1 and integrated adaptively.
pub fn snr_pdf_fading(rho: f64, cir: &CirParams, pl: &PathLossParams, ctl: &QuadratureControl) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(domain("snr_pdf_fading", format!("SNR must be > 0, got {rho}")));
    }
    let x = rho / pl.psi();
    let h = 0.5 * pl.eta();
    let theta = cir.theta();
    // w = theta * scale * s
    let lambda = x * theta.powf(h);
    let scale = 1.0 / (1.0 + lambda.powf(1.0 / h));
    let a = lambda * scale.powf(h);
    let integrand = |s: f64| {
        if s == 0.0 {
            return 0.0;
        }
        let sh = s.powf(h);
        sh * (-a * sh - scale * s).exp()
    };
    let head = integrate(integrand, 0.0, 1.0, ctl)?;
    let tail = integrate_to_infinity(integrand, 1.0, ctl)?;
    let integral = head.value + tail.value;
    let ln_prefactor = h * theta.ln() + (h + 1.0) * scale.ln() - pl.psi().ln();
    Ok((ln_prefactor + integral.ln()).exp())
}

/// Shifted-Pareto density of the faded SNR for `eta = 2`, `1 / (theta (rho + 1/theta)^2)`.
pub fn snr_pdf_fading_eta2(rho: f64, cir: &CirParams) -> Result<f64> {
    check_nonneg("snr_pdf_fading_eta2", rho)?;
    let theta = cir.theta();
    Ok(theta / (1.0 + rho * theta).powi(2))
}

pub fn snr_cdf_fading_eta2(rho: f64, cir: &CirParams) -> Result<f64> {
    check_nonneg("snr_cdf_fading_eta2", rho)?;
    let t = rho * cir.theta();
    Ok(t / (1.0 + t))
}

/// Connectivity with fading and `eta = 2`, `1 / (1 + rho_th theta)`.
pub fn conn_prob_fading_eta2(thr: &SnrThreshold, cir: &CirParams) -> f64 {
    1.0 - snr_cdf_fading_eta2(thr.rho_th(), cir).expect("threshold is nonnegative")
}

/// Closed-form faded SNR density for `eta = 4`.
///
/// With `y = 1/(2 theta sqrt(rho))` the numerator is
/// `g(y) = sqrt(pi) erfcx(y) (1 + 1/(2y^2)) - 1/y` and `f = g / (8 theta^3 rho^(5/2))`.
/// For large `y` the two terms of `g` cancel, so its asymptotic series is used instead.
pub fn snr_pdf_fading_eta4(rho: f64, cir: &CirParams) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(domain("snr_pdf_fading_eta4", format!("SNR must be > 0, got {rho}")));
    }
    let theta = cir.theta();
    let y = 0.5 / (theta * rho.sqrt());
    let g = if y < 8.0 {
        std::f64::consts::PI.sqrt() * erfcx(y) * (1.0 + 0.5 / (y * y)) - 1.0 / y
    } else {
        eta4_numerator_asymptotic(y)
    };
    Ok(g / (8.0 * theta.powi(3) * rho.powf(2.5)))
}

/// `(1/y) sum_{n>=2} e_n y^(-2n)` with `e_n = (-1)^n (2n-3)!! (2n-2) / 2^n`.
fn eta4_numerator_asymptotic(y: f64) -> f64 {
    let w = 1.0 / (y * y);
    // e_n y^(-2n) for n = 2
    let mut odd_fact = 1.0;
    let mut sign_pow = 0.25 * w * w;
    let mut sum = 0.0f64;
    let mut prev = f64::INFINITY;
    for n in 2..200 {
        let nf = f64::from(n);
        if n > 2 {
            odd_fact *= 2.0 * nf - 3.0;
            sign_pow *= -0.5 * w;
        }
        let term = sign_pow * odd_fact * (2.0 * nf - 2.0);
        if term.abs() >= prev || term.abs() < 1e-17 * sum.abs() {
            break;
        }
        sum += term;
        prev = term.abs();
    }
    sum / y
}

fn check_nonneg(op: &'static str, rho: f64) -> Result<()> {
    if rho >= 0.0 {
        Ok(())
    } else {
        Err(domain(op, format!("SNR must be >= 0, got {rho}")))
    }
}
