use std::path::Path;

use clap::Args;
use oulink::analytic::{conn_prob_fading_eta2, conn_prob_nofading};
use oulink::fading::{fit_ar, gain_path, FadingModel};
use oulink::procsim::{simulate_pair_2d, snr_from_distance, Init};
use oulink::verify::{batch_means, crossing_analysis};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::Output;

#[derive(Args, Debug, Clone, Serialize)]
pub struct CrossingsArgs {
    /// Number of steps; defaults to horizon / dt.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Samples of the SNR path written to `path.csv`.
    #[arg(long, default_value_t = 10_000)]
    pub path_samples: usize,
    /// Include correlated Rayleigh fading in the SNR.
    #[arg(long)]
    pub fading: bool,
    /// Batches for the standard error of the on-fraction.
    #[arg(long, default_value_t = 100)]
    pub batches: usize,
}

pub fn run(args: &CrossingsArgs, cfg: &RunConfig, out_dir: &Path) -> CliResult<()> {
    let m = cfg.mobility()?;
    let cir = m.cir();
    let pl = cfg.path_loss()?;
    let thr = cfg.threshold()?;
    let steps = args.steps.unwrap_or_else(|| cfg.steps());
    let pair = simulate_pair_2d(&m, cfg.dt, steps, Init::Stationary, cfg.seed, 0)?;
    let gain = if args.fading {
        let fit = fit_ar(&FadingModel::new(cfg.nu_max, cfg.dt)?)?;
        Some(gain_path(&fit, steps, cfg.seed, 0))
    } else {
        None
    };
    let snr = snr_from_distance(&pair.z, &pl, gain.as_ref())?;
    let summary = crossing_analysis(&snr, &thr)?;

    let analytic = if !args.fading {
        Some(conn_prob_nofading(&thr, &cir, &pl))
    } else if pl.is_integer(2) && pl.psi() == 1.0 {
        Some(conn_prob_fading_eta2(&thr, &cir))
    } else {
        None
    };
    let on: Vec<f64> = snr.values.iter().map(|&v| f64::from(u8::from(v >= thr.rho_th()))).collect();
    let (mean, se) = batch_means(&on, args.batches)?;
    let z = analytic.map(|p| if se > 0.0 { (mean - p) / se } else if mean == p { 0.0 } else { f64::INFINITY });

    let mut out = Output::new(out_dir, "crossings", serde_json::to_value(args).expect("args serialize"), cfg)?;
    let shown = args.path_samples.min(snr.len());
    let rows = (0..shown).map(|i| [snr.time(i), snr.values[i], thr.rho_th()]);
    out.csv("path.csv", &["t", "snr", "threshold"], None, rows)?;
    for on in [true, false] {
        let rows = summary
            .sojourns
            .iter()
            .filter(|s| s.on == on)
            .map(|s| [s.start as f64 * summary.dt, s.samples as f64 * summary.dt, f64::from(u8::from(s.censored))]);
        let name = if on { "on-durations.csv" } else { "off-durations.csv" };
        out.csv(name, &["start", "duration", "censored"], None, rows)?;
    }
    let result = json!({
        "threshold": summary.threshold,
        "r0": thr.r0(),
        "dt": summary.dt,
        "samples": summary.total_samples(),
        "horizon": summary.horizon(),
        "sojourns": summary.sojourns.len(),
        "fraction_on": summary.fraction_on,
        "fraction_on_se": se,
        "conn_prob": analytic,
        "z_score": z,
        "mean_on_duration": summary.mean_duration(true),
        "mean_off_duration": summary.mean_duration(false),
        "upcrossing_rate": summary.upcrossing_rate(),
    });
    out.json("crossings.json", &result)?;
    match (analytic, z) {
        (Some(p), Some(z)) => println!("fraction on {:.6} vs connectivity {p:.6} (z = {z:.2})", summary.fraction_on),
        _ => println!("fraction on {:.6}", summary.fraction_on),
    }
    out.finish();
    Ok(())
}
