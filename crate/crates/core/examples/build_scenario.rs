//! Draws one trial's world at the reference operating point and summarizes it:
//! user distances and channel strengths, hash assignment, target and grid.

use isac_feedback::harness::TrialStreams;
use isac_feedback::scenario::{make_grid, make_population, make_targets};
use isac_feedback::SystemConfig;

fn main() -> isac_feedback::Result<()> {
    let cfg = SystemConfig::default();
    let mut streams = TrialStreams::new(cfg.seed, 0);
    let codebook = cfg.codebook()?;
    let pop = make_population(&cfg, &codebook, &mut streams.population)?;
    let scene = make_targets(&cfg, &mut streams.targets);
    let grid = make_grid(&cfg)?;

    println!(
        "{} users ({} decoded), codebook of 2^{} rows of length {} (seed {})",
        pop.len(),
        pop.n_decoded(),
        codebook.b_p(),
        cfg.l,
        codebook.seed()
    );
    println!(" user  decoded  distance[m]  |h|^2[mW]   hash row");
    for (i, u) in pop.iter().enumerate().take(10) {
        println!(
            " {i:>4}  {:<7}  {:>10.1}  {:.3e}  {}",
            u.decoded,
            u.distance,
            u.h_true.norm_squared(),
            u.hash_index
        );
    }
    println!(" ...");
    for t in &scene.targets {
        println!("target at {:.3} deg, {} m", t.angle.degrees(), t.distance);
    }
    let degs: Vec<String> = grid
        .angles
        .iter()
        .map(|a| format!("{:.2}", a.degrees()))
        .collect();
    println!("sense grid: {}", degs.join(" "));
    Ok(())
}
