//! Test-only numerics kept independent of the library's own quadrature.
#![allow(dead_code)]

use oulink::{CirParams, MobilityParams, PathLossParams};

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite 20-point Gauss-Legendre over `panels` equal panels of [a, b].
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        for (xi, wi) in x.iter().zip(&w) {
            sum += wi * f(mid + 0.5 * h * xi);
        }
    }
    0.5 * h * sum
}

/// Integral over [a, b] with a > 0 on a logarithmic scale, `int f(e^t) e^t dt`.
pub fn integrate_log(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    integrate(
        |t| {
            let x = t.exp();
            f(x) * x
        },
        a.ln(),
        b.ln(),
        panels,
    )
}

pub fn figure_mobility() -> MobilityParams {
    MobilityParams::new(1.0, 100.0, 0.0).unwrap()
}

pub fn figure_cir() -> CirParams {
    figure_mobility().cir()
}

pub fn path_loss(p: u32, q: u32) -> PathLossParams {
    PathLossParams::new(p, q, 1.0).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Three-sigma binomial band check for an observed proportion.
pub fn within_binomial_band(successes: usize, n: usize, p: f64) -> bool {
    let sd = (p * (1.0 - p) / n as f64).sqrt();
    (successes as f64 / n as f64 - p).abs() <= 3.0 * sd
}
