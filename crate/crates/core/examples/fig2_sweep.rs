//! Communication-only sweep: error probability of the designed feedback and
//! of the matched filter for several user counts and feedback lengths.
//!
//! cargo run --release --example fig2_sweep -- [n_trials] [out.csv]

use std::time::Instant;

use isac_feedback::harness::{fig2_csv, run_fig2, Fig2Plan};
use isac_feedback::SystemConfig;

fn main() -> isac_feedback::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_trials = args
        .next()
        .map(|s| s.parse().expect("n_trials"))
        .unwrap_or(50);
    let out = args.next();
    let plan = Fig2Plan {
        system: SystemConfig::default(),
        k_list: vec![25, 50],
        l_list: vec![16, 32, 64],
        n_trials,
    };
    let started = Instant::now();
    let results = run_fig2(&plan, None)?;
    let csv = fig2_csv(&plan, &results)?;
    match out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    eprintln!(
        "{} cells in {:.1}s",
        results.len(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}
