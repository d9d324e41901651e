use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Whether a curve tabulates a density or a distribution function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Pdf,
    Cdf,
}

/// A tabulated distribution, tagged with the formula or estimator that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionCurve {
    abscissa: Vec<f64>,
    values: Vec<f64>,
    kind: CurveKind,
    source: String,
}

const CDF_SLACK: f64 = 1e-12;

impl DistributionCurve {
    /// Builds a curve, checking that the grid is strictly increasing and that the values
    /// are admissible for `kind`.
    pub fn new(abscissa: Vec<f64>, values: Vec<f64>, kind: CurveKind, source: impl Into<String>) -> Result<Self> {
        if abscissa.len() != values.len() {
            return Err(invalid(
                "values",
                format!("{} values for {} abscissae", values.len(), abscissa.len()),
            ));
        }
        if abscissa.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("abscissa", "must be strictly increasing"));
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= 0.0)) {
            return Err(invalid("values", format!("negative or NaN value {bad}")));
        }
        if kind == CurveKind::Cdf {
            if values.iter().any(|v| *v > 1.0 + CDF_SLACK) {
                return Err(invalid("values", "cdf exceeds 1"));
            }
            if values.windows(2).any(|w| w[1] < w[0]) {
                return Err(invalid("values", "cdf must be nondecreasing"));
            }
        }
        Ok(Self {
            abscissa,
            values,
            kind,
            source: source.into(),
        })
    }

    /// Evaluates `f` on every grid point.
    pub fn tabulate<F>(grid: &[f64], kind: CurveKind, source: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let values = grid.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        Self::new(grid.to_vec(), values, kind, source)
    }

    pub fn abscissa(&self) -> &[f64] {
        &self.abscissa
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.abscissa.iter().copied().zip(self.values.iter().copied())
    }
}

/// Grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// An evaluation grid `points` long from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize, spacing: Spacing) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(invalid("grid", format!("need finite min < max, got [{min}, {max}]")));
        }
        if points < 2 {
            return Err(invalid("grid", "need at least 2 points"));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return Err(invalid("grid", "log spacing needs min > 0"));
        }
        Ok(Self {
            min,
            max,
            points,
            spacing,
        })
    }

    pub fn linear(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::new(min, max, points, Spacing::Linear)
    }

    pub fn log(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::new(min, max, points, Spacing::Log)
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        let mut out: Vec<f64> = match self.spacing {
            Spacing::Linear => {
                let h = (self.max - self.min) / n as f64;
                (0..=n).map(|i| self.min + h * i as f64).collect()
            }
            Spacing::Log => {
                let (a, b) = (self.min.ln(), self.max.ln());
                let h = (b - a) / n as f64;
                (0..=n).map(|i| (a + h * i as f64).exp()).collect()
            }
        };
        out[0] = self.min;
        out[n] = self.max;
        out
    }
}

/// Truncation control for the bivariate series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    rel_tol: f64,
    max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_terms: 10_000,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(invalid("rel_tol", format!("must lie in (0, 1), got {rel_tol}")));
        }
        if max_terms == 0 {
            return Err(invalid("max_terms", "must be at least 1"));
        }
        Ok(Self { rel_tol, max_terms })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

/// A truncated series value and the number of terms summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub terms: usize,
}

/// Sums a series of positive terms given by their logarithms and returns the log of the sum.
///
/// Summation stops once the terms are decreasing and the geometric tail bound implied by
/// the latest ratio falls below `rel_tol` of the running sum. Valid for series whose term
/// ratios are eventually nonincreasing.
pub(crate) fn sum_log_series<F>(mut ln_term: F, ctl: &SeriesControl) -> Result<(f64, usize)>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut ln_sum = ln_term(0)?;
    let mut prev = ln_sum;
    for j in 1..ctl.max_terms {
        let cur = ln_term(j)?;
        if cur == f64::NEG_INFINITY && prev == f64::NEG_INFINITY {
            return Ok((ln_sum, j + 1));
        }
        ln_sum = log_add(ln_sum, cur);
        if cur < prev {
            let ratio = (cur - prev).exp();
            let ln_tail = cur + ratio.ln() - (-ratio).ln_1p();
            if ln_tail - ln_sum <= ctl.rel_tol.ln() {
                return Ok((ln_sum, j + 1));
            }
        }
        prev = cur;
    }
    Err(Error::SeriesNotConverged {
        terms: ctl.max_terms,
        last_term: (prev - ln_sum).exp(),
    })
}

pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_invariants_enforced() {
        assert!(DistributionCurve::new(vec![0.0, 1.0], vec![0.1, 0.2], CurveKind::Cdf, "t").is_ok());
        assert!(DistributionCurve::new(vec![1.0, 0.0], vec![0.1, 0.2], CurveKind::Pdf, "t").is_err());
        assert!(DistributionCurve::new(vec![0.0, 1.0], vec![0.3, 0.2], CurveKind::Cdf, "t").is_err());
        assert!(DistributionCurve::new(vec![0.0, 1.0], vec![0.3, 1.1], CurveKind::Cdf, "t").is_err());
        assert!(DistributionCurve::new(vec![0.0, 1.0], vec![-0.1, 2.0], CurveKind::Pdf, "t").is_err());
    }

    #[test]
    fn grids_hit_endpoints() {
        let g = Grid::log(1e-3, 1e3, 7).unwrap().values();
        assert_eq!(g.first(), Some(&1e-3));
        assert_eq!(g.last(), Some(&1e3));
        assert!((g[3] - 1.0).abs() < 1e-14);
        assert!(Grid::log(0.0, 1.0, 5).is_err());
        assert!(Grid::linear(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn log_series_reproduces_exponential() {
        // sum x^j / j! = e^x
        let x: f64 = 30.0;
        let ctl = SeriesControl::default();
        let (ln_sum, terms) = sum_log_series(
            |j| Ok(j as f64 * x.ln() - statrs::function::gamma::ln_gamma(j as f64 + 1.0)),
            &ctl,
        )
        .unwrap();
        assert!((ln_sum - x).abs() < 1e-10, "{ln_sum}");
        assert!(terms > 30 && terms < 200);
    }

    #[test]
    fn log_series_reports_nonconvergence() {
        let ctl = SeriesControl::new(1e-10, 50).unwrap();
        let err = sum_log_series(|_| Ok(0.0), &ctl).unwrap_err();
        assert!(matches!(err, Error::SeriesNotConverged { terms: 50, .. }));
    }
}
