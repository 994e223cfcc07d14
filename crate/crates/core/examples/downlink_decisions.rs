//! Simulates the downlink for one designed matrix many times and compares the
//! observed decision error rate with the closed-form prediction, per user group.

use isac_feedback::airlink::simulate_decisions;
use isac_feedback::designer::{design_feedback, user_error_probabilities};
use isac_feedback::harness::TrialStreams;
use isac_feedback::numerics::SimRng;
use isac_feedback::scenario::{make_grid, make_population};
use isac_feedback::SystemConfig;

fn main() -> isac_feedback::Result<()> {
    let cfg = SystemConfig {
        l: 16,
        ..SystemConfig::default()
    };
    let mut streams = TrialStreams::new(cfg.seed, 0);
    let pop = make_population(&cfg, &cfg.codebook()?, &mut streams.population)?;
    let (v, _) = design_feedback(&cfg, &pop, &make_grid(&cfg)?)?;
    let predicted = user_error_probabilities(v.matrix(), &pop, cfg.sigma_ch2())?;

    let rounds = 20_000;
    let mut wrong = vec![0usize; pop.len()];
    let mut rng = SimRng::substream(cfg.seed, 0, "example-downlink");
    for _ in 0..rounds {
        let outcomes = simulate_decisions(v.matrix(), &pop, &mut rng, cfg.sigma_c2.linear_mw())?;
        for (w, o) in wrong.iter_mut().zip(&outcomes) {
            *w += usize::from(o.is_error());
        }
    }
    for (label, decoded) in [
        ("decoded (expect ACK)", true),
        ("failed (expect NACK)", false),
    ] {
        let idx: Vec<usize> = (0..pop.len())
            .filter(|&i| pop.users[i].decoded == decoded)
            .collect();
        let p = idx.iter().map(|&i| predicted[i]).sum::<f64>() / idx.len() as f64;
        let e = idx.iter().map(|&i| wrong[i]).sum::<usize>() as f64 / (idx.len() * rounds) as f64;
        println!(
            "{label:<22} users={:<3} predicted {p:.5}  observed {e:.5}",
            idx.len()
        );
    }
    Ok(())
}
