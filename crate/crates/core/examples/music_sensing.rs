//! Angle estimation quality of the designed feedback as the echo noise falls
//! by decades, next to the exact bound.
//!
//! cargo run --release --example music_sensing -- [n_trials] [mu]

use isac_feedback::harness::{run_experiment, Method};
use isac_feedback::{PowerLevel, SystemConfig};

fn main() -> isac_feedback::Result<()> {
    let mut args = std::env::args().skip(1);
    let n_trials = args
        .next()
        .map(|s| s.parse().expect("n_trials"))
        .unwrap_or(100);
    let mu = args.next().map(|s| s.parse().expect("mu")).unwrap_or(0.5);
    println!("sigma_e2[dBm]  rmse[deg]   mse[deg²]    bound[deg²]  mse/bound");
    for dbm in [-90.0, -100.0, -110.0, -120.0, -130.0] {
        let cfg = SystemConfig {
            mu,
            sigma_e2: PowerLevel::from_dbm(dbm),
            ..SystemConfig::default()
        };
        let r = run_experiment(&cfg, Method::Pgd, n_trials, None)?;
        let a = &r.aggregates;
        println!(
            "{dbm:>8}       {:<10.4} {:<12.4e} {:<12.4e} {:.3}",
            a.rmse_deg,
            a.mean_sq_error_deg2,
            a.mean_crlb_deg2,
            a.mean_sq_error_deg2 / a.mean_crlb_deg2
        );
    }
    Ok(())
}
