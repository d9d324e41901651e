use std::path::Path;

use clap::{Args, ValueEnum};
use oulink::analytic::{self, CurveKind, DistributionCurve, Grid, QuadratureControl, SeriesControl, Spacing};
use oulink::quad::integrate;
use oulink::{CirParams, PathLossParams, SnrThreshold};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::Output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curve {
    ZStationaryPdf,
    ZStationaryCdf,
    /// Density of Z after `--lag` given Z = `--z0`.
    ZTransition,
    /// Stationary autocovariance of Z against lag.
    ZAutocov,
    RStationaryPdf,
    RStationaryCdf,
    /// Density of R after `--lag` given R = sqrt(`--z0`).
    RTransition,
    SnrPdfNofading,
    SnrCdfNofading,
    /// Joint cdf of the SNR `--lag` apart, as a slice at `--rho-t`.
    SnrBivariateCdf,
    SnrBivariatePdf,
    /// Faded SNR density; closed form for eta 2 and 4 unless `--quadrature`.
    SnrPdfFading,
    /// Faded SNR cdf (eta = 2 only).
    SnrCdfFading,
    /// Connectivity probability against the threshold.
    ConnProbNofading,
    ConnProbFading,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingArg {
    Linear,
    Log,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DistArgs {
    #[arg(long, value_enum)]
    pub curve: Curve,
    /// Time between the two observations [s].
    #[arg(long, default_value_t = 0.2)]
    pub lag: f64,
    /// Initial squared distance for the transition curves.
    #[arg(long, default_value_t = 3000.0)]
    pub z0: f64,
    /// Second SNR of a bivariate slice; defaults to the marginal median.
    #[arg(long)]
    pub rho_t: Option<f64>,
    #[arg(long)]
    pub min: Option<f64>,
    #[arg(long)]
    pub max: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, value_enum)]
    pub spacing: Option<SpacingArg>,
    /// Evaluate the faded density by quadrature even where a closed form exists.
    #[arg(long)]
    pub quadrature: bool,
}

impl Curve {
    fn name(self) -> String {
        serde_json::to_value(self).unwrap().as_str().unwrap().to_string()
    }

    fn columns(self) -> [&'static str; 2] {
        use Curve::*;
        match self {
            ZStationaryPdf | ZTransition | RStationaryPdf | RTransition | SnrPdfNofading | SnrBivariatePdf
            | SnrPdfFading => [self.abscissa(), "pdf"],
            ZAutocov => ["lag", "autocov"],
            ConnProbNofading | ConnProbFading => ["rho_th", "probability"],
            _ => [self.abscissa(), "cdf"],
        }
    }

    fn abscissa(self) -> &'static str {
        use Curve::*;
        match self {
            ZStationaryPdf | ZStationaryCdf | ZTransition => "z",
            RStationaryPdf | RStationaryCdf | RTransition => "r",
            ZAutocov => "lag",
            ConnProbNofading | ConnProbFading => "rho_th",
            _ => "rho",
        }
    }

    fn kind(self) -> Option<CurveKind> {
        match self.columns()[1] {
            "pdf" => Some(CurveKind::Pdf),
            "cdf" => Some(CurveKind::Cdf),
            _ => None,
        }
    }
}

/// Median of the no-fading SNR, `psi (theta ln 2)^(-eta/2)`.
fn snr_median(cir: &CirParams, pl: &PathLossParams) -> f64 {
    pl.psi() * (cir.theta() * std::f64::consts::LN_2).powf(-0.5 * pl.eta())
}

fn default_grid(curve: Curve, args: &DistArgs, cfg: &RunConfig, cir: &CirParams, pl: &PathLossParams) -> (f64, f64, Spacing) {
    use Curve::*;
    let theta = cir.theta();
    match curve {
        ZStationaryPdf | ZStationaryCdf => (0.0, 5.0 * theta, Spacing::Linear),
        ZTransition => {
            let decay = (-cir.k() * args.lag).exp();
            let mean = args.z0 * decay + theta * (1.0 - decay);
            (0.0, 2.0 * mean + 5.0 * theta, Spacing::Linear)
        }
        RStationaryPdf | RStationaryCdf => (0.0, 3.0 * theta.sqrt(), Spacing::Linear),
        RTransition => (0.0, 2.0 * args.z0.sqrt() + 3.0 * theta.sqrt(), Spacing::Linear),
        ZAutocov => (0.0, 3.0 * cfg.tau, Spacing::Linear),
        _ => {
            let m = snr_median(cir, pl);
            (m * 1e-3, m * 1e4, Spacing::Log)
        }
    }
}

pub fn run(args: &DistArgs, cfg: &RunConfig, out_dir: &Path) -> CliResult<()> {
    let cir = cfg.mobility()?.cir();
    let pl = cfg.path_loss()?;
    let (dmin, dmax, dspacing) = default_grid(args.curve, args, cfg, &cir, &pl);
    let spacing = match args.spacing {
        Some(SpacingArg::Linear) => Spacing::Linear,
        Some(SpacingArg::Log) => Spacing::Log,
        None => dspacing,
    };
    let grid = Grid::new(args.min.unwrap_or(dmin), args.max.unwrap_or(dmax), args.points, spacing)?;
    let xs = grid.values();
    let f = evaluator(args, &cir, &pl)?;
    let values = match args.curve.kind() {
        Some(kind) => DistributionCurve::tabulate(&xs, kind, args.curve.name(), &f)?.values().to_vec(),
        None => xs.iter().map(|&x| f(x)).collect::<oulink::Result<Vec<_>>>()?,
    };

    let mut out = Output::new(out_dir, "dist", serde_json::to_value(args).expect("args serialize"), cfg)?;
    let name = args.curve.name();
    let extra = json!({ "grid": grid });
    out.csv(&format!("{name}.csv"), &args.curve.columns(), Some(extra), xs.iter().zip(&values).map(|(x, v)| [*x, *v]))?;
    if args.curve == Curve::SnrPdfFading {
        let mass = log_scale_mass(&f)?;
        out.json(&format!("{name}.json"), &json!({ "normalization": mass }))?;
        println!("normalization of {name}: {mass:.9}");
    }
    out.finish();
    Ok(())
}

/// `int_0^inf f`, integrated in `ln rho` over a range far beyond the heavy tails.
fn log_scale_mass(f: &dyn Fn(f64) -> oulink::Result<f64>) -> CliResult<f64> {
    let ctl = QuadratureControl::new(1e-12, 1e-10, 10_000)?;
    let failure = std::cell::RefCell::new(None);
    let v = integrate(
        |t| {
            let x = t.exp();
            f(x).map(|v| v * x).unwrap_or_else(|e| {
                failure.borrow_mut().get_or_insert(e);
                0.0
            })
        },
        -80.0,
        80.0,
        &ctl,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    Ok(v.value)
}

type Evaluator<'a> = Box<dyn Fn(f64) -> oulink::Result<f64> + 'a>;

fn evaluator<'a>(args: &'a DistArgs, cir: &'a CirParams, pl: &'a PathLossParams) -> CliResult<Evaluator<'a>> {
    use Curve::*;
    let series = SeriesControl::default();
    let quad = QuadratureControl::default();
    let rho_t = args.rho_t.unwrap_or_else(|| snr_median(cir, pl));
    let (lag, z0) = (args.lag, args.z0);
    let eta2 = pl.is_integer(2) && pl.psi() == 1.0;
    Ok(match args.curve {
        ZStationaryPdf => Box::new(move |z| analytic::z_stationary_pdf(z, cir)),
        ZStationaryCdf => Box::new(move |z| analytic::z_stationary_cdf(z, cir)),
        ZTransition => Box::new(move |z| analytic::z_transition_pdf(z, z0, lag, cir)),
        ZAutocov => Box::new(move |l| analytic::z_autocov(l, cir)),
        RStationaryPdf => Box::new(move |r| analytic::r_stationary_pdf(r, cir)),
        RStationaryCdf => Box::new(move |r| analytic::r_stationary_cdf(r, cir)),
        RTransition => Box::new(move |r| analytic::r_transition_pdf(r, z0.sqrt(), lag, cir)),
        SnrPdfNofading => Box::new(move |x| analytic::snr_pdf_nofading(x, cir, pl)),
        SnrCdfNofading => Box::new(move |x| analytic::snr_cdf_nofading(x, cir, pl)),
        SnrBivariateCdf => Box::new(move |x| Ok(analytic::snr_bivariate_cdf(x, rho_t, lag, cir, pl, &series)?.value)),
        SnrBivariatePdf => Box::new(move |x| Ok(analytic::snr_bivariate_pdf(x, rho_t, lag, cir, pl, &series)?.value)),
        SnrPdfFading if !args.quadrature && eta2 => Box::new(move |x| analytic::snr_pdf_fading_eta2(x, cir)),
        SnrPdfFading if !args.quadrature && pl.is_integer(4) && pl.psi() == 1.0 => {
            Box::new(move |x| analytic::snr_pdf_fading_eta4(x, cir))
        }
        SnrPdfFading => Box::new(move |x| analytic::snr_pdf_fading(x, cir, pl, &quad)),
        SnrCdfFading | ConnProbFading if !eta2 => {
            return Err(CliError::usage(format!(
                "{} has a closed form only for eta = 2 and psi = 1 (got eta = {}, psi = {})",
                args.curve.name(),
                pl.eta_label(),
                pl.psi()
            )))
        }
        SnrCdfFading => Box::new(move |x| analytic::snr_cdf_fading_eta2(x, cir)),
        ConnProbNofading => Box::new(move |x| Ok(analytic::conn_prob_nofading(&SnrThreshold::new(x, pl)?, cir, pl))),
        ConnProbFading => Box::new(move |x| Ok(analytic::conn_prob_fading_eta2(&SnrThreshold::new(x, pl)?, cir))),
    })
}
