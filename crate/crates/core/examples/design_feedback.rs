//! Designs one feedback matrix for a freshly drawn population and prints the
//! iteration history next to the matched-filter starting point.
//!
//! cargo run --release --example design_feedback -- [mu]

use isac_feedback::harness::design_report;
use isac_feedback::SystemConfig;

fn main() -> isac_feedback::Result<()> {
    let mu = std::env::args()
        .nth(1)
        .map(|s| s.parse::<f64>().expect("mu must be a number"))
        .unwrap_or(1.0);
    let cfg = SystemConfig {
        mu,
        ..SystemConfig::default()
    };
    let report = design_report(&cfg, 0)?;
    println!("M={} L={} K={} mu={}", cfg.m, cfg.l, cfg.k_users, cfg.mu);
    println!(
        "start: e_c={:.4e} e_s={:.4e}",
        report.e_c_initial, report.e_s_initial
    );
    println!(" k   q_k        active(D/F)  e_c        e_s        objective");
    for it in &report.trace.iterations {
        println!(
            "{:>2}  {:.3e}  {:>3}/{:<3}      {:.4e} {:.4e} {:.4e}",
            it.k, it.q_k, it.active_decoded, it.active_failed, it.e_c, it.e_s, it.objective
        );
    }
    println!(
        "final: e_c={:.4e} e_s={:.4e}",
        report.e_c_final, report.e_s_final
    );
    Ok(())
}
