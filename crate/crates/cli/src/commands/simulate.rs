use std::path::Path;

use clap::{Args, ValueEnum};
use oulink::fading::{complex_gain_path, fit_ar, FadingModel};
use oulink::procsim::{
    euler_snr_path, euler_z_path, simulate_pair_2d, snr_from_distance, z_stationary_sample, EulerControl, Init,
    SamplePath,
};
use oulink::rng::{substream, Component};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::Output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Process {
    /// Exact positions of both nodes with Z and R.
    Pair,
    /// Link SNR from the exact distance path, optionally faded.
    Snr,
    /// Fading power gain with its complex components.
    Gain,
    /// Full-truncation Euler path of the squared distance.
    ZEuler,
    /// Euler path of the link-SNR diffusion.
    SnrEuler,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "pair")]
    pub process: Process,
    /// Number of steps; defaults to horizon / dt.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Start from this squared distance instead of the stationary law.
    #[arg(long)]
    pub z0: Option<f64>,
    /// Multiply the SNR path by a correlated fading gain.
    #[arg(long)]
    pub fading: bool,
    /// Path index selecting the random substreams.
    #[arg(long, default_value_t = 0)]
    pub path: u64,
}

fn timed(p: &SamplePath) -> impl Iterator<Item = [f64; 2]> + '_ {
    p.values.iter().enumerate().map(|(i, &v)| [p.time(i), v])
}

pub fn run(args: &SimulateArgs, cfg: &RunConfig, out_dir: &Path) -> CliResult<()> {
    let m = cfg.mobility()?;
    let cir = m.cir();
    let pl = cfg.path_loss()?;
    let steps = args.steps.unwrap_or_else(|| cfg.steps());
    let init = args.z0.map_or(Init::Stationary, Init::fixed_squared_distance);
    let (seed, path) = (cfg.seed, args.path);
    let mut out = Output::new(out_dir, "simulate", serde_json::to_value(args).expect("args serialize"), cfg)?;
    let meta = match args.process {
        Process::Pair => {
            let pair = simulate_pair_2d(&m, cfg.dt, steps, init, seed, path)?;
            let rows = pair.positions.values.chunks_exact(4).enumerate().map(|(i, c)| {
                let mut row = [pair.positions.time(i), 0.0, 0.0, 0.0, 0.0];
                row[1..].copy_from_slice(c);
                row
            });
            out.csv("positions.csv", &["t", "x1", "y1", "x2", "y2"], None, rows)?;
            out.csv("z.csv", &["t", "z"], None, timed(&pair.z))?;
            out.csv("r.csv", &["t", "r"], None, timed(&pair.r))?;
            json!({ "samples": pair.z.len() })
        }
        Process::Snr => {
            let pair = simulate_pair_2d(&m, cfg.dt, steps, init, seed, path)?;
            let gain = if args.fading {
                let fit = fit_ar(&FadingModel::new(cfg.nu_max, cfg.dt)?)?;
                Some(oulink::fading::gain_path(&fit, steps, seed, path))
            } else {
                None
            };
            let snr = snr_from_distance(&pair.z, &pl, gain.as_ref())?;
            out.csv("snr.csv", &["t", "snr"], None, timed(&snr))?;
            json!({ "samples": snr.len(), "fading": args.fading })
        }
        Process::Gain => {
            let model = FadingModel::new(cfg.nu_max, cfg.dt)?;
            let fit = fit_ar(&model)?;
            let h = complex_gain_path(&fit, steps, seed, path);
            let rows = h.in_phase.iter().zip(&h.quadrature).enumerate().map(|(i, (a, b))| {
                [i as f64 * h.dt, a * a + b * b, *a, *b]
            });
            out.csv("gain.csv", &["t", "gain", "in_phase", "quadrature"], None, rows)?;
            json!({
                "samples": h.in_phase.len(),
                "ar_order": model.ar_order(),
                "bias_eps": model.bias_eps(),
                "innovation_variance": fit.innovation_variance(),
            })
        }
        Process::ZEuler | Process::SnrEuler => {
            let ctl = EulerControl::new(cfg.dt)?;
            let z0 = match args.z0 {
                Some(z) => z,
                None => z_stationary_sample(&cir, &mut substream(seed, path, Component::Initial)),
            };
            let mut noise = substream(seed, path, Component::Euler);
            let (name, column, p) = if args.process == Process::ZEuler {
                ("z-euler.csv", "z", euler_z_path(z0, &cir, &ctl, steps, seed, &mut noise)?)
            } else {
                let n0 = pl.psi() * z0.powf(-0.5 * pl.eta());
                ("snr-euler.csv", "snr", euler_snr_path(n0, &cir, &pl, &ctl, steps, seed, &mut noise)?)
            };
            out.csv(name, &["t", column], None, timed(&p))?;
            let d = p.diagnostics.expect("Euler paths carry diagnostics");
            if d.clamp_warning {
                log::warn!("{} of {} steps clamped", d.clamp_count, d.steps);
            }
            if let Some(step) = d.blow_up {
                log::warn!("path overflowed at step {step}");
            }
            json!({
                "samples": p.values.len(),
                "z0": z0,
                "clamp_count": d.clamp_count,
                "clamp_rate": d.clamp_rate(),
                "clamp_warning": d.clamp_warning,
                "blow_up": d.blow_up,
            })
        }
    };
    out.json("simulate.json", &json!({ "dt": cfg.dt, "seed": seed, "path": path, "steps": steps, "diagnostics": meta }))?;
    out.finish();
    Ok(())
}
