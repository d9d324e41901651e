//! Link-SNR laws without fading, `N = psi * Z^(-eta/2)`.

use crate::analytic::curve::{sum_log_series, SeriesControl, SeriesValue};
use crate::error::{domain, Result};
use crate::model::{CirParams, PathLossParams, SnrThreshold};
use crate::special::ln_gamma_p;

/// Maps an SNR value to the squared distance that produces it, `(rho/psi)^(-2/eta)`.
fn squared_distance(op: &'static str, rho: f64, pl: &PathLossParams) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(domain(op, format!("SNR must be > 0, got {rho}")));
    }
    Ok((rho / pl.psi()).powf(-2.0 / pl.eta()))
}

/// Density of the stationary link SNR.
pub fn snr_pdf_nofading(rho: f64, cir: &CirParams, pl: &PathLossParams) -> Result<f64> {
    let z = squared_distance("snr_pdf_nofading", rho, pl)?;
    let beta = 2.0 / pl.eta();
    let theta = cir.theta();
    // |dz/drho| = beta z / rho
    let ln = (beta / theta).ln() + z.ln() - rho.ln() - z / theta;
    Ok(ln.exp())
}

/// Distribution function of the stationary link SNR, `exp(-(rho/psi)^(-2/eta) / theta)`.
pub fn snr_cdf_nofading(rho: f64, cir: &CirParams, pl: &PathLossParams) -> Result<f64> {
    let z = squared_distance("snr_cdf_nofading", rho, pl)?;
    Ok((-z / cir.theta()).exp())
}

/// Probability that the link SNR reaches `thr`, which equals `P(Z <= r0^2)` for `psi = 1`.
pub fn conn_prob_nofading(thr: &SnrThreshold, cir: &CirParams, pl: &PathLossParams) -> f64 {
    if thr.rho_th() == 0.0 {
        return 1.0;
    }
    let z = (thr.rho_th() / pl.psi()).powf(-2.0 / pl.eta());
    -(-z / cir.theta()).exp_m1()
}

/// Joint survival `P(N_s >= rho_s, N_t >= rho_t)` of the SNR at two instants `lag` apart.
///
/// Evaluated as `(1 - r) sum_j r^j P(j+1, x_s) P(j+1, x_t)` with `r = exp(-k lag)`,
/// `x = c (rho/psi)^(-2/eta)` and `P` the regularized lower incomplete gamma function.
pub fn snr_bivariate_survival(
    rho_s: f64,
    rho_t: f64,
    lag: f64,
    cir: &CirParams,
    pl: &PathLossParams,
    ctl: &SeriesControl,
) -> Result<SeriesValue> {
    let z_s = squared_distance("snr_bivariate_survival", rho_s, pl)?;
    let z_t = squared_distance("snr_bivariate_survival", rho_t, pl)?;
    let tc = cir.transition(lag)?;
    let (x_s, x_t) = (tc.c() * z_s, tc.c() * z_t);
    let ln_r = -cir.k() * lag;
    let (ln_sum, terms) = sum_log_series(
        |j| {
            let a = j as f64 + 1.0;
            Ok(j as f64 * ln_r + ln_gamma_p(a, x_s)? + ln_gamma_p(a, x_t)?)
        },
        ctl,
    )?;
    let value = (ln_sum + (-tc.decay()).ln_1p()).exp().min(1.0);
    Ok(SeriesValue { value, terms })
}

/// Joint distribution function `P(N_s <= rho_s, N_t <= rho_t)`.
pub fn snr_bivariate_cdf(
    rho_s: f64,
    rho_t: f64,
    lag: f64,
    cir: &CirParams,
    pl: &PathLossParams,
    ctl: &SeriesControl,
) -> Result<SeriesValue> {
    let survival = snr_bivariate_survival(rho_s, rho_t, lag, cir, pl, ctl)?;
    let f_s = snr_cdf_nofading(rho_s, cir, pl)?;
    let f_t = snr_cdf_nofading(rho_t, cir, pl)?;
    // Inclusion-exclusion, with the bracket grouped to keep small results accurate.
    let value = (survival.value - (1.0 - f_s)) + f_t;
    Ok(SeriesValue {
        value: value.clamp(0.0, f_s.min(f_t)),
        terms: survival.terms,
    })
}

/// Joint density of the SNR at two instants `lag` apart.
///
/// `beta^2 (rho_s rho_t)^(-1) z_s z_t (c/theta) exp(-c (z_s + z_t)) sum_j (u c z_s z_t)^j / (j!)^2`
/// with `beta = 2/eta` and `z = (rho/psi)^(-beta)`.
pub fn snr_bivariate_pdf(
    rho_s: f64,
    rho_t: f64,
    lag: f64,
    cir: &CirParams,
    pl: &PathLossParams,
    ctl: &SeriesControl,
) -> Result<SeriesValue> {
    let z_s = squared_distance("snr_bivariate_pdf", rho_s, pl)?;
    let z_t = squared_distance("snr_bivariate_pdf", rho_t, pl)?;
    let tc = cir.transition(lag)?;
    let (c, u) = (tc.c(), tc.u());
    let ln_y = (u * c * z_s * z_t).ln();
    let mut ln_fact = 0.0;
    let (ln_sum, terms) = sum_log_series(
        |j| {
            if j > 0 {
                ln_fact += (j as f64).ln();
            }
            Ok(j as f64 * ln_y - 2.0 * ln_fact)
        },
        ctl,
    )?;
    let beta = 2.0 / pl.eta();
    let ln_jacobian = 2.0 * beta.ln() + z_s.ln() + z_t.ln() - rho_s.ln() - rho_t.ln();
    let ln_prefactor = (c / cir.theta()).ln() - c * (z_s + z_t);
    let value = (ln_jacobian + ln_prefactor + ln_sum).exp();
    Ok(SeriesValue { value, terms })
}

/// Log-density of the pair `(Z_s, Z_t)` in closed form, used to cross-check the series.
pub fn z_bivariate_ln_pdf(z_s: f64, z_t: f64, lag: f64, cir: &CirParams) -> Result<f64> {
    let ln_marginal = -z_t / cir.theta() - cir.theta().ln();
    let ln_transition = crate::analytic::z_transition_ln_pdf(z_s, z_t, lag, cir)?;
    Ok(ln_marginal + ln_transition)
}
