#![allow(dead_code)]

use isac_feedback::harness::TrialStreams;
use isac_feedback::scenario::{
    make_grid, make_population, make_targets, SenseGrid, TargetScene, UserPopulation,
};
use isac_feedback::SystemConfig;

pub struct Instance {
    pub pop: UserPopulation,
    pub grid: SenseGrid,
    pub scene: TargetScene,
}

/// The world of trial `index`, drawn exactly as the harness draws it.
pub fn instance(cfg: &SystemConfig, index: u64) -> Instance {
    let mut s = TrialStreams::new(cfg.seed, index);
    let pop = make_population(cfg, &cfg.codebook().unwrap(), &mut s.population).unwrap();
    let scene = make_targets(cfg, &mut s.targets);
    Instance {
        pop,
        grid: make_grid(cfg).unwrap(),
        scene,
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard error of the mean.
pub fn stderr(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}
