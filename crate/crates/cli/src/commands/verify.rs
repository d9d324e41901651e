use std::path::Path;

use clap::Args;
use oulink::verify::{figure_suite, SuiteConfig};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::Output;

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    /// Comma-separated job names (fig3, fig4, fig5, fig6, fig7, fig8, sde-snr, fig9, snr-pdf-4, fig10).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Use this theta on the analytic side of every comparison.
    #[arg(long)]
    pub theta_override: Option<f64>,
    /// Histogram bins for the L1 comparisons.
    #[arg(long)]
    pub bins: Option<usize>,
}

pub fn run(args: &VerifyArgs, cfg: &RunConfig, out_dir: &Path) -> CliResult<()> {
    let defaults = SuiteConfig::default();
    let suite = SuiteConfig {
        seed: cfg.seed,
        samples: cfg.samples,
        bins: args.bins.unwrap_or(defaults.bins),
        only: (!args.only.is_empty()).then(|| args.only.clone()),
        theta_override: args.theta_override,
        ..defaults
    };
    let outcome = figure_suite(&suite)?;
    let mut out = Output::new(out_dir, "verify", serde_json::to_value(args).expect("args serialize"), cfg)?;
    for c in &outcome.curves {
        let rows = c
            .x
            .iter()
            .zip(&c.analytic)
            .zip(&c.empirical)
            .map(|((x, a), e)| [*x, *a, *e]);
        out.csv(&format!("{}.csv", c.name), &["x", "analytic", "empirical"], None, rows)?;
    }
    out.json(
        "verify.json",
        &json!({ "suite": suite, "reports": outcome.reports, "failures": outcome.failures, "passed": outcome.all_passed() }),
    )?;
    for r in &outcome.reports {
        println!("{}", r.summary());
    }
    out.finish();
    if !outcome.failures.is_empty() {
        let msgs: Vec<String> = outcome.failures.iter().map(|f| format!("{}: {}", f.job, f.message)).collect();
        return Err(CliError::Numerical(msgs.join("; ")));
    }
    let failed: Vec<String> = outcome.reports.iter().filter(|r| !r.pass).map(|r| r.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed))
    }
}
