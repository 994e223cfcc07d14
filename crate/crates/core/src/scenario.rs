//! The simulated world: configuration, users with their channels and hashes,
//! sensing targets, and the angle grid the designer averages over.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::HashCodebook;
use crate::numerics::{
    db_to_linear, derive_seed, sample_cgauss, steering_vector, Angle, CVec, PowerLevel,
};

/// Sign applied to the matched-filter initialization of the designer.
///
/// `Literal` keeps `Σ_{failed} ĥ*p − Σ_{decoded} ĥ*p`; `Negated` flips it so
/// decoded users start with positive margins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitSign {
    Literal,
    Negated,
}

impl InitSign {
    pub fn factor(self) -> f64 {
        match self {
            InitSign::Literal => 1.0,
            InitSign::Negated => -1.0,
        }
    }
}

fn one() -> usize {
    1
}

fn negated() -> InitSign {
    InitSign::Negated
}

/// Every physical and algorithmic parameter of a run.
///
/// Powers are in dBm; `rho0` is the unit-distance path gain in dB. Angles and
/// angle ranges are in degrees. Distances are in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub m: usize,
    pub l: usize,
    pub k_users: usize,
    pub n_decoded: usize,
    pub p_tx: PowerLevel,
    pub sigma_c2: PowerLevel,
    pub sigma_e2: PowerLevel,
    pub sigma_h2: PowerLevel,
    pub rho0: f64,
    pub n_paths: usize,
    pub alpha_u: f64,
    pub alpha_t: f64,
    pub user_dist_range: [f64; 2],
    pub target_dist: f64,
    pub target_angle_range: [f64; 2],
    pub sense_grid_size: usize,
    pub mu: f64,
    pub eta: f64,
    pub n_stp: usize,
    pub b_p: u32,
    /// Stored for completeness; the designer uses its adaptive threshold instead.
    pub q_o: f64,
    pub seed: u64,
    #[serde(default = "one")]
    pub n_targets: usize,
    #[serde(default = "negated")]
    pub init_sign: InitSign,
}

impl Default for SystemConfig {
    /// The reference operating point: 20 antennas, 13 dBm, 50 users with 45 decoded.
    fn default() -> Self {
        SystemConfig {
            m: 20,
            l: 32,
            k_users: 50,
            n_decoded: 45,
            p_tx: PowerLevel::from_dbm(13.0),
            sigma_c2: PowerLevel::from_dbm(-100.0),
            sigma_e2: PowerLevel::from_dbm(-100.0),
            sigma_h2: PowerLevel::ZERO,
            rho0: -30.0,
            n_paths: 5,
            alpha_u: 3.0,
            alpha_t: 2.2,
            user_dist_range: [1000.0, 1500.0],
            target_dist: 300.0,
            target_angle_range: [80.0, 100.0],
            sense_grid_size: 20,
            mu: 1.0,
            eta: 0.1,
            n_stp: 30,
            b_p: 16,
            q_o: 1e-3,
            seed: 1,
            n_targets: 1,
            init_sign: InitSign::Negated,
        }
    }
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SystemConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = Error::invalid;
        if self.m < 2 {
            return Err(bad("m", "need at least 2 antennas"));
        }
        if self.l < 1 {
            return Err(bad("l", "feedback length must be at least 1"));
        }
        if self.k_users < 1 {
            return Err(bad("k_users", "need at least one user"));
        }
        if self.n_decoded > self.k_users {
            return Err(bad("n_decoded", "cannot exceed k_users"));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::invalid(
                "mu",
                format!("must lie in [0, 1], got {}", self.mu),
            ));
        }
        if !(self.eta > 0.0) {
            return Err(bad("eta", "step size must be positive"));
        }
        if self.n_stp < 1 {
            return Err(bad("n_stp", "need at least one iteration"));
        }
        if self.n_paths < 1 {
            return Err(bad("n_paths", "need at least one path"));
        }
        let [dmin, dmax] = self.user_dist_range;
        if !(dmin > 0.0 && dmax >= dmin) {
            return Err(bad("user_dist_range", "need 0 < min <= max"));
        }
        if !(self.target_dist > 0.0) {
            return Err(bad("target_dist", "must be positive"));
        }
        let [lo, hi] = self.target_angle_range;
        if !(lo > 0.0 && hi < 180.0 && lo < hi) {
            return Err(bad(
                "target_angle_range",
                "need 0 < min < max < 180 degrees",
            ));
        }
        if self.sense_grid_size < 2 {
            return Err(bad("sense_grid_size", "need at least 2 grid angles"));
        }
        if self.n_targets >= self.m {
            return Err(bad("n_targets", "must be smaller than the antenna count"));
        }
        if !(self.p_tx.linear_mw() > 0.0) {
            return Err(bad("p_tx", "transmit power must be positive"));
        }
        if self.b_p == 0 || self.b_p > 63 {
            return Err(bad("b_p", "must be in 1..=63"));
        }
        Ok(())
    }

    /// Frobenius power budget `P·L`.
    pub fn power_budget(&self) -> f64 {
        self.p_tx.linear_mw() * self.l as f64
    }

    /// Decision-noise variance `0.5·(P·L·σ_h² + σ_c²)`.
    pub fn sigma_ch2(&self) -> f64 {
        0.5 * (self.power_budget() * self.sigma_h2.linear_mw() + self.sigma_c2.linear_mw())
    }

    pub fn rho0_linear(&self) -> f64 {
        db_to_linear(self.rho0)
    }

    pub fn sector(&self) -> (Angle, Angle) {
        (
            Angle::from_degrees(self.target_angle_range[0]),
            Angle::from_degrees(self.target_angle_range[1]),
        )
    }

    /// Seed of the hash codebook shared by all trials of this configuration.
    pub fn codebook_seed(&self) -> u64 {
        derive_seed(self.seed, "hash-codebook")
    }

    pub fn codebook(&self) -> Result<HashCodebook> {
        HashCodebook::new(self.b_p, self.l, self.codebook_seed())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub h_true: CVec,
    pub h_est: CVec,
    pub hash_index: u64,
    pub hash: CVec,
    /// `true` for a decoded message (s = +1), `false` for a failed one (s = −1).
    pub decoded: bool,
    pub distance: f64,
}

impl User {
    pub fn sign(&self) -> i8 {
        if self.decoded {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserPopulation {
    pub users: Vec<User>,
}

impl UserPopulation {
    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn n_decoded(&self) -> usize {
        self.users.iter().filter(|u| u.decoded).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = &User> {
        self.users.iter()
    }

    pub(crate) fn check_dims(&self, m: usize, l: usize) -> Result<()> {
        for u in &self.users {
            if u.h_est.len() != m || u.h_true.len() != m {
                return Err(Error::DimensionMismatch {
                    context: "user channel",
                    expected: m,
                    found: u.h_est.len(),
                });
            }
            if u.hash.len() != l {
                return Err(Error::DimensionMismatch {
                    context: "user hash",
                    expected: l,
                    found: u.hash.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub angle: Angle,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetScene {
    pub targets: Vec<Target>,
}

impl TargetScene {
    pub fn single(angle: Angle, distance: f64) -> Self {
        TargetScene {
            targets: vec![Target { angle, distance }],
        }
    }

    pub fn angles(&self) -> Vec<Angle> {
        self.targets.iter().map(|t| t.angle).collect()
    }
}

/// The candidate target directions the sensing objective averages over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenseGrid {
    pub angles: Vec<Angle>,
}

impl SenseGrid {
    /// `n` equally spaced angles from `lo_deg` to `hi_deg` inclusive.
    pub fn linspace(lo_deg: f64, hi_deg: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(
                "sense_grid_size",
                "need at least 2 grid angles",
            ));
        }
        let step = (hi_deg - lo_deg) / (n - 1) as f64;
        let angles = (0..n)
            .map(|i| {
                if i == n - 1 {
                    Angle::from_degrees(hi_deg)
                } else {
                    Angle::from_degrees(lo_deg + step * i as f64)
                }
            })
            .collect();
        Ok(SenseGrid { angles })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// `Σ_j τ_j √gain · a(θ_j)` for explicit path amplitudes and angles.
pub fn channel_from_paths(m: usize, gain: f64, paths: &[(Complex64, Angle)]) -> Result<CVec> {
    let amp = gain.sqrt();
    let mut h = CVec::zeros(m);
    for &(tau, theta) in paths {
        h += steering_vector(theta, m)? * (tau * amp);
    }
    Ok(h)
}

/// Multipath channel of a user at `distance`: `n_paths` Rayleigh paths with
/// angles uniform on (0°, 180°) and common attenuation `ρ₀ d^{−α_u}`.
pub fn make_user_channel<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    rng: &mut R,
    distance: f64,
) -> Result<CVec> {
    if !(distance > 0.0) {
        return Err(Error::invalid(
            "distance",
            format!("must be positive, got {distance}"),
        ));
    }
    let gain = cfg.rho0_linear() * distance.powf(-cfg.alpha_u);
    let taus = sample_cgauss(rng, cfg.n_paths, 1.0)?;
    let paths: Vec<(Complex64, Angle)> = taus
        .iter()
        .map(|&tau| {
            let theta = loop {
                let t = rng.random_range(0.0..PI);
                if t > 0.0 {
                    break t;
                }
            };
            (tau, Angle::from_radians(theta))
        })
        .collect();
    channel_from_paths(cfg.m, gain, &paths)
}

/// Draws the `K` detected users: distances, channels, noisy estimates, hash
/// indices, and a random decoded/failed split with exactly `n_decoded` decoded.
pub fn make_population<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    codebook: &HashCodebook,
    rng: &mut R,
) -> Result<UserPopulation> {
    cfg.validate()?;
    if codebook.len() != cfg.l {
        return Err(Error::DimensionMismatch {
            context: "codebook length",
            expected: cfg.l,
            found: codebook.len(),
        });
    }
    let [dmin, dmax] = cfg.user_dist_range;
    let est_var = cfg.sigma_h2.linear_mw();
    let mut users = Vec::with_capacity(cfg.k_users);
    for i in 0..cfg.k_users {
        let distance = if dmax > dmin {
            rng.random_range(dmin..dmax)
        } else {
            dmin
        };
        let h_true = make_user_channel(cfg, rng, distance)?;
        let h_est = &h_true + sample_cgauss(rng, cfg.m, est_var)?;
        let hash_index = rng.random_range(0..codebook.rows());
        users.push(User {
            h_true,
            h_est,
            hash_index,
            hash: codebook.hash_row(hash_index)?,
            decoded: i < cfg.n_decoded,
            distance,
        });
    }
    let mut flags: Vec<bool> = users.iter().map(|u| u.decoded).collect();
    flags.shuffle(rng);
    for (u, f) in users.iter_mut().zip(flags) {
        u.decoded = f;
    }
    Ok(UserPopulation { users })
}

/// Places `n_targets` targets at the nominal distance with angles uniform
/// inside the open sensing sector.
pub fn make_targets<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> TargetScene {
    let [lo, hi] = cfg.target_angle_range;
    let targets = (0..cfg.n_targets)
        .map(|_| {
            let deg = loop {
                let d = rng.random_range(lo..hi);
                if d > lo {
                    break d;
                }
            };
            Target {
                angle: Angle::from_degrees(deg),
                distance: cfg.target_dist,
            }
        })
        .collect();
    TargetScene { targets }
}

pub fn make_grid(cfg: &SystemConfig) -> Result<SenseGrid> {
    let [lo, hi] = cfg.target_angle_range;
    SenseGrid::linspace(lo, hi, cfg.sense_grid_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SimRng;

    #[test]
    fn degenerate_single_path_channel() {
        let h = channel_from_paths(
            6,
            1.0,
            &[(Complex64::new(1.0, 0.0), Angle::from_degrees(90.0))],
        )
        .unwrap();
        for z in h.iter() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn channel_rejects_bad_distance() {
        let cfg = SystemConfig::default();
        let mut rng = SimRng::from_seed(0);
        assert!(make_user_channel(&cfg, &mut rng, 0.0).is_err());
        assert!(make_user_channel(&cfg, &mut rng, -5.0).is_err());
    }

    #[test]
    fn channel_energy_matches_closed_form() {
        let cfg = SystemConfig::default();
        let mut rng = SimRng::substream(11, 0, "chan");
        let n = 10_000;
        let per: Vec<f64> = (0..n)
            .map(|_| {
                let h = make_user_channel(&cfg, &mut rng, 1000.0).unwrap();
                h.norm_squared() / (cfg.m * cfg.n_paths) as f64
            })
            .collect();
        let mean = per.iter().sum::<f64>() / n as f64;
        let var = per.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let expected = 1e-3 * 1000f64.powf(-3.0);
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "{mean:e} vs {expected:e} (se {se:e})"
        );
    }

    #[test]
    fn channel_is_deterministic() {
        let cfg = SystemConfig::default();
        let a = make_user_channel(&cfg, &mut SimRng::substream(1, 2, "u"), 1200.0).unwrap();
        let b = make_user_channel(&cfg, &mut SimRng::substream(1, 2, "u"), 1200.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn population_split_and_noiseless_estimates() {
        let cfg = SystemConfig::default();
        let cb = cfg.codebook().unwrap();
        let pop = make_population(&cfg, &cb, &mut SimRng::from_seed(4)).unwrap();
        assert_eq!(pop.len(), 50);
        assert_eq!(pop.n_decoded(), 45);
        for u in pop.iter() {
            assert_eq!(u.h_est, u.h_true);
            assert!((1000.0..1500.0).contains(&u.distance));
            assert_eq!(u.hash, cb.hash_row(u.hash_index).unwrap());
            assert!((u.hash.norm_squared() - 1.0).abs() < 1e-12);
        }
        // membership is shuffled, not simply the first 45
        assert!(pop.users[..45].iter().any(|u| !u.decoded));
    }

    #[test]
    fn figure_two_splits() {
        for k in [25usize, 50] {
            let cfg = SystemConfig {
                k_users: k,
                n_decoded: (0.9 * k as f64).floor() as usize,
                ..SystemConfig::default()
            };
            let pop =
                make_population(&cfg, &cfg.codebook().unwrap(), &mut SimRng::from_seed(2)).unwrap();
            assert_eq!(pop.n_decoded(), k * 9 / 10);
            assert_eq!(pop.len() - pop.n_decoded(), k - k * 9 / 10);
        }
    }

    #[test]
    fn estimation_noise_variance() {
        let cfg = SystemConfig {
            sigma_h2: PowerLevel::from_dbm(-110.0),
            k_users: 5000,
            n_decoded: 100,
            ..SystemConfig::default()
        };
        let pop =
            make_population(&cfg, &cfg.codebook().unwrap(), &mut SimRng::from_seed(8)).unwrap();
        let diffs: Vec<f64> = pop
            .iter()
            .flat_map(|u| {
                (&u.h_est - &u.h_true)
                    .iter()
                    .map(|z| z.norm_sqr())
                    .collect::<Vec<_>>()
            })
            .collect();
        let n = diffs.len() as f64;
        let mean = diffs.iter().sum::<f64>() / n;
        let var = diffs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let target = cfg.sigma_h2.linear_mw();
        assert!(
            (mean - target).abs() < 3.0 * (var / n).sqrt(),
            "{mean:e} vs {target:e}"
        );
    }

    #[test]
    fn population_is_reproducible_through_json() {
        let cfg = SystemConfig {
            sigma_h2: PowerLevel::from_dbm(-115.0),
            ..SystemConfig::default()
        };
        let cb = cfg.codebook().unwrap();
        let a = make_population(&cfg, &cb, &mut SimRng::substream(3, 9, "pop")).unwrap();
        let b = make_population(&cfg, &cb, &mut SimRng::substream(3, 9, "pop")).unwrap();
        assert_eq!(a, b);
        let back: UserPopulation =
            serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn targets_inside_sector() {
        let cfg = SystemConfig::default();
        let mut rng = SimRng::from_seed(12);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let scene = make_targets(&cfg, &mut rng);
            assert_eq!(scene.targets.len(), 1);
            let d = scene.targets[0].angle.degrees();
            assert!(d > 80.0 && d < 100.0);
            sum += d;
        }
        let mean = sum / n as f64;
        // uniform on a 20 degree interval: sd = 20/sqrt(12)
        let se = 20.0 / 12f64.sqrt() / (n as f64).sqrt();
        assert!((mean - 90.0).abs() < 3.0 * se, "{mean}");

        let a = make_targets(&cfg, &mut SimRng::from_seed(5));
        let b = make_targets(&cfg, &mut SimRng::from_seed(5));
        assert_eq!(a, b);
    }

    #[test]
    fn grid_spacing() {
        let g = make_grid(&SystemConfig::default()).unwrap();
        assert_eq!(g.len(), 20);
        for w in g.angles.windows(2) {
            assert!((w[1].degrees() - w[0].degrees() - 20.0 / 19.0).abs() < 1e-9);
        }
        assert_eq!(g.angles[0], Angle::from_degrees(80.0));
        assert_eq!(g.angles[19], Angle::from_degrees(100.0));

        let g = SenseGrid::linspace(80.0, 100.0, 2).unwrap();
        assert_eq!(
            g.angles,
            vec![Angle::from_degrees(80.0), Angle::from_degrees(100.0)]
        );
        let g = SenseGrid::linspace(80.0, 100.0, 3).unwrap();
        assert!((g.angles[1].degrees() - 90.0).abs() < 1e-12);
        assert!(SenseGrid::linspace(80.0, 100.0, 1).is_err());
    }

    #[test]
    fn config_json_contract() {
        let cfg = SystemConfig::default();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert!(text.contains("\"sigma_h2\": \"-inf\""));
        assert_eq!(SystemConfig::from_json(&text).unwrap(), cfg);

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["sigma_c"] = serde_json::json!(1.0);
        assert!(SystemConfig::from_json(&v.to_string()).is_err());

        let bad = SystemConfig {
            n_decoded: 60,
            ..cfg.clone()
        };
        assert!(bad.validate().is_err());
        let bad = SystemConfig {
            m: 1,
            ..cfg.clone()
        };
        assert!(bad.validate().is_err());
        let bad = SystemConfig { mu: 1.5, ..cfg };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn derived_quantities() {
        let cfg = SystemConfig::default();
        assert!((cfg.power_budget() - 19.952623149688796 * 32.0).abs() < 1e-9);
        assert!((cfg.sigma_ch2() - 0.5e-10).abs() < 1e-22);
        assert!((cfg.rho0_linear() - 1e-3).abs() < 1e-18);
    }
}
