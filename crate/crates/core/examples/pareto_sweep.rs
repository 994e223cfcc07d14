//! Trade-off sweep: error probability and angle RMSE as the weight moves from
//! pure sensing (0) to pure communication (1), for several feedback lengths.
//!
//! cargo run --release --example pareto_sweep -- [n_trials] [out.csv]

use std::time::Instant;

use isac_feedback::harness::{fig3_csv, run_fig3, Fig3Plan};
use isac_feedback::SystemConfig;

fn main() -> isac_feedback::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_trials = args
        .next()
        .map(|s| s.parse().expect("n_trials"))
        .unwrap_or(50);
    let out = args.next();
    let plan = Fig3Plan {
        system: SystemConfig::default(),
        mu_list: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        l_list: vec![16, 32, 64],
        n_trials,
    };
    let started = Instant::now();
    let results = run_fig3(&plan, None)?;
    let csv = fig3_csv(&plan, &results)?;
    match out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    for r in &results {
        eprintln!(
            "mu={:<4} L={:<3} mse={:.4e} deg² crlb={:.4e} deg²",
            r.config.mu, r.config.l, r.aggregates.mean_sq_error_deg2, r.aggregates.mean_crlb_deg2
        );
    }
    eprintln!(
        "{} cells in {:.1}s",
        results.len(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}
