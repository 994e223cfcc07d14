//! Exact and approximate angle bounds across the sector for the matched-filter
//! start and for designs at three trade-off weights.

use isac_feedback::designer::{
    approx_sense_error, crlb_diagonal, design_feedback, matched_filter_baseline, SenseParams,
};
use isac_feedback::harness::TrialStreams;
use isac_feedback::numerics::CMat;
use isac_feedback::scenario::{make_grid, make_population, TargetScene};
use isac_feedback::{Angle, SystemConfig};

fn main() -> isac_feedback::Result<()> {
    let base = SystemConfig::default();
    let mut streams = TrialStreams::new(base.seed, 0);
    let pop = make_population(&base, &base.codebook()?, &mut streams.population)?;
    let grid = make_grid(&base)?;
    let params = SenseParams::from_config(&base);

    let mut beams: Vec<(String, CMat)> = vec![(
        "start".into(),
        matched_filter_baseline(&base, &pop)?.into_matrix(),
    )];
    for mu in [0.0, 0.5, 1.0] {
        let cfg = SystemConfig { mu, ..base.clone() };
        beams.push((
            format!("mu={mu}"),
            design_feedback(&cfg, &pop, &grid)?.0.into_matrix(),
        ));
    }

    println!("std of angle error in degrees: exact / approximate");
    print!("theta ");
    for (name, _) in &beams {
        print!("  {name:>17}");
    }
    println!();
    for deg in [80.0, 84.0, 88.0, 92.0, 96.0, 100.0] {
        let theta = Angle::from_degrees(deg);
        let scene = TargetScene::single(theta, base.target_dist);
        print!("{deg:>5.1} ");
        for (_, v) in &beams {
            let exact = crlb_diagonal(
                v,
                &scene,
                base.sigma_e2.linear_mw(),
                base.rho0_linear(),
                base.alpha_t,
            )?[0];
            let approx = approx_sense_error(v, theta, &params)?;
            print!(
                "  {:>7.3} / {:>7.3}",
                exact.sqrt().to_degrees(),
                approx.sqrt().to_degrees()
            );
        }
        println!();
    }
    Ok(())
}
