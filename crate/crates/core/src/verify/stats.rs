//! Empirical estimators and goodness-of-fit statistics.

use serde::{Deserialize, Serialize};

use crate::analytic::{CurveKind, DistributionCurve, QuadratureControl, Spacing};
use crate::error::{invalid, Error, Result};
use crate::quad::integrate;

const MIN_PDF_SAMPLES: usize = 100;
const MIN_BINS: usize = 10;
const MIN_KS_SAMPLES: usize = 50;

/// Density-normalized histogram over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Samples outside `[lo, hi]`, including non-finite ones.
    pub outside: usize,
    pub total: usize,
}

impl Histogram {
    pub fn new(samples: &[f64], lo: f64, hi: f64, bins: usize, spacing: Spacing) -> Result<Self> {
        if bins == 0 {
            return Err(invalid("bins", "need at least one bin"));
        }
        if !(lo < hi) || (spacing == Spacing::Log && lo <= 0.0) {
            return Err(invalid("range", format!("unusable histogram range [{lo}, {hi}]")));
        }
        let edges = bin_edges(lo, hi, bins, spacing);
        let mut counts = vec![0usize; bins];
        let mut outside = 0;
        let (tlo, thi) = match spacing {
            Spacing::Linear => (lo, hi),
            Spacing::Log => (lo.ln(), hi.ln()),
        };
        let width = (thi - tlo) / bins as f64;
        for &x in samples {
            if !(x >= lo && x <= hi) {
                outside += 1;
                continue;
            }
            let tx = match spacing {
                Spacing::Linear => x,
                Spacing::Log => x.ln(),
            };
            let mut i = (((tx - tlo) / width) as usize).min(bins - 1);
            // Correct for rounding at the edges.
            while i > 0 && x < edges[i] {
                i -= 1;
            }
            while i + 1 < bins && x >= edges[i + 1] {
                i += 1;
            }
            counts[i] += 1;
        }
        Ok(Self {
            edges,
            counts,
            outside,
            total: samples.len(),
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Fraction of all samples per unit length in each bin.
    pub fn density(&self) -> Vec<f64> {
        let n = self.total as f64;
        self.counts
            .iter()
            .zip(self.edges.windows(2))
            .map(|(&c, w)| c as f64 / (n * (w[1] - w[0])))
            .collect()
    }
}

fn bin_edges(lo: f64, hi: f64, bins: usize, spacing: Spacing) -> Vec<f64> {
    let mut edges: Vec<f64> = match spacing {
        Spacing::Linear => {
            let h = (hi - lo) / bins as f64;
            (0..=bins).map(|i| lo + h * i as f64).collect()
        }
        Spacing::Log => {
            let (a, b) = (lo.ln(), hi.ln());
            let h = (b - a) / bins as f64;
            (0..=bins).map(|i| (a + h * i as f64).exp()).collect()
        }
    };
    edges[0] = lo;
    edges[bins] = hi;
    edges
}

fn finite_range(samples: &[f64]) -> Option<(f64, f64)> {
    samples
        .iter()
        .filter(|x| x.is_finite())
        .fold(None, |acc, &x| match acc {
            None => Some((x, x)),
            Some((lo, hi)) => Some((lo.min(x), hi.max(x))),
        })
}

/// Histogram density estimate over the sample range, evaluated at bin centers.
pub fn empirical_pdf(samples: &[f64], bins: usize) -> Result<DistributionCurve> {
    if samples.is_empty() {
        return Err(invalid("samples", "empty sample"));
    }
    if samples.len() < MIN_PDF_SAMPLES {
        return Err(Error::InsufficientData {
            op: "empirical_pdf",
            needed: MIN_PDF_SAMPLES,
            got: samples.len(),
        });
    }
    if bins < MIN_BINS {
        return Err(invalid("bins", format!("need at least {MIN_BINS} bins, got {bins}")));
    }
    let (mut lo, mut hi) = finite_range(samples).ok_or_else(|| invalid("samples", "no finite samples"))?;
    if lo == hi {
        let half = 0.5 * bins as f64 * lo.abs().max(1.0) * 1e-6;
        lo -= half;
        hi += half;
    }
    let h = Histogram::new(samples, lo, hi, bins, Spacing::Linear)?;
    DistributionCurve::new(h.centers(), h.density(), CurveKind::Pdf, "empirical-histogram")
}

/// Right-continuous step distribution function at the distinct sample values.
pub fn empirical_cdf(samples: &[f64]) -> Result<DistributionCurve> {
    let mut sorted: Vec<f64> = samples.iter().copied().filter(|x| !x.is_nan()).collect();
    if sorted.is_empty() {
        return Err(invalid("samples", "empty sample"));
    }
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        if xs.last() == Some(&x) {
            *fs.last_mut().expect("paired with xs") = (i + 1) as f64 / n;
        } else {
            xs.push(x);
            fs.push((i + 1) as f64 / n);
        }
    }
    DistributionCurve::new(xs, fs, CurveKind::Cdf, "empirical-cdf")
}

/// Histogram-versus-density comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1Comparison {
    /// `sum_i |n_i/n - P_i| + |outside_emp - outside_ana|`, where `P_i` is the analytic
    /// mass of bin `i`.
    pub distance: f64,
    pub histogram: Histogram,
    /// Analytic mean density per bin, `P_i / width_i`.
    pub analytic_density: Vec<f64>,
}

/// L1 distance between the histogram of `samples` and the law with density `pdf`.
///
/// Bins span the finite sample range; samples that are not finite count as lying outside,
/// and the analytic mass outside the range is `1 - sum_i P_i`.
pub fn l1_histogram_distance<F>(samples: &[f64], pdf: F, bins: usize, spacing: Spacing) -> Result<L1Comparison>
where
    F: Fn(f64) -> Result<f64>,
{
    let (lo, hi) = finite_range(samples).ok_or_else(|| invalid("samples", "no finite samples"))?;
    l1_histogram_distance_on(samples, pdf, lo, hi, bins, spacing)
}

/// As [`l1_histogram_distance`], on a caller-chosen range.
pub fn l1_histogram_distance_on<F>(
    samples: &[f64],
    pdf: F,
    lo: f64,
    hi: f64,
    bins: usize,
    spacing: Spacing,
) -> Result<L1Comparison>
where
    F: Fn(f64) -> Result<f64>,
{
    let histogram = Histogram::new(samples, lo, hi, bins, spacing)?;
    let ctl = QuadratureControl::new(1e-12, 1e-10, 2000)?;
    let n = histogram.total as f64;
    let mut distance = 0.0;
    let mut inside_mass = 0.0;
    let mut analytic_density = Vec::with_capacity(bins);
    let failure = std::cell::RefCell::new(None);
    for (w, &count) in histogram.edges.windows(2).zip(&histogram.counts) {
        let mass = integrate(
            |x| match pdf(x) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            },
            w[0],
            w[1],
            &ctl,
        )?
        .value;
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        inside_mass += mass;
        distance += (count as f64 / n - mass).abs();
        analytic_density.push(mass / (w[1] - w[0]));
    }
    let outside_ana = (1.0 - inside_mass).max(0.0);
    distance += (histogram.outside as f64 / n - outside_ana).abs();
    Ok(L1Comparison {
        distance,
        histogram,
        analytic_density,
    })
}

/// One-sample Kolmogorov-Smirnov result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample Kolmogorov-Smirnov test against `cdf` with the asymptotic p-value
/// (Stephens' small-sample correction).
pub fn ks_test<F>(samples: &[f64], cdf: F) -> Result<KsResult>
where
    F: Fn(f64) -> f64,
{
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::InsufficientData {
            op: "ks_test",
            needed: MIN_KS_SAMPLES,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf);
    }
    let sqrt_n = nf.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_survival(lambda),
        n,
    })
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-theta form, fast for small arguments.
        let pi2 = std::f64::consts::PI.powi(2);
        let mut cdf = 0.0;
        for j in 1..=20 {
            let m = f64::from(2 * j - 1);
            cdf += (-m * m * pi2 / (8.0 * lambda * lambda)).exp();
        }
        cdf *= (2.0 * std::f64::consts::PI).sqrt() / lambda;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = f64::from(j);
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Autocovariance estimates on a lag grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Autocovariance {
    /// Lags in seconds.
    pub lags: Vec<f64>,
    pub values: Vec<f64>,
    pub normalized: bool,
}

/// Biased (`1/N`) autocovariance of an evenly sampled series for lags `0..=max_lag`,
/// optionally divided by the lag-zero value.
pub fn empirical_autocov(values: &[f64], dt: f64, max_lag: usize, normalize: bool) -> Result<Autocovariance> {
    let needed = 10 * max_lag.max(1);
    if values.len() < needed {
        return Err(Error::InsufficientData {
            op: "empirical_autocov",
            needed,
            got: values.len(),
        });
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let mut out: Vec<f64> = (0..=max_lag)
        .map(|m| centered[..n - m].iter().zip(&centered[m..]).map(|(a, b)| a * b).sum::<f64>() / n as f64)
        .collect();
    if normalize && out[0] > 0.0 {
        let c0 = out[0];
        out.iter_mut().for_each(|v| *v /= c0);
    }
    Ok(Autocovariance {
        lags: (0..=max_lag).map(|m| m as f64 * dt).collect(),
        values: out,
        normalized: normalize,
    })
}

/// Cross-sum autocorrelation `(1/N) sum (a_n a_{n+m} + b_n b_{n+m})` of a complex series
/// given by its real parts `a` and imaginary parts `b`, for lags `0..=max_lag`.
pub fn complex_autocorrelation(a: &[f64], b: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(invalid("quadrature", "component lengths differ"));
    }
    let needed = 10 * max_lag.max(1);
    if a.len() < needed {
        return Err(Error::InsufficientData {
            op: "complex_autocorrelation",
            needed,
            got: a.len(),
        });
    }
    let n = a.len();
    Ok((0..=max_lag)
        .map(|m| {
            let s: f64 = (0..n - m).map(|i| a[i] * a[i + m] + b[i] * b[i + m]).sum();
            s / n as f64
        })
        .collect())
}

/// Sample mean and its standard error from `batches` non-overlapping batch means, which
/// stays valid for autocorrelated series when each batch spans many correlation times.
pub fn batch_means(values: &[f64], batches: usize) -> Result<(f64, f64)> {
    if batches < 2 || values.len() < 2 * batches {
        return Err(Error::InsufficientData {
            op: "batch_means",
            needed: 2 * batches.max(2),
            got: values.len(),
        });
    }
    let size = values.len() / batches;
    let means: Vec<f64> = values
        .chunks_exact(size)
        .take(batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches - 1) as f64;
    Ok((grand, (var / batches as f64).sqrt()))
}

/// Standardized deviation of an observed proportion from `p` under the binomial model.
pub fn binomial_z(successes: usize, n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let sd = (p * (1.0 - p) / nf).sqrt();
    let phat = successes as f64 / nf;
    if sd == 0.0 {
        return if phat == p { 0.0 } else { f64::INFINITY };
    }
    (phat - p) / sd
}
