//! Monte Carlo driver.
//!
//! A trial draws a fresh population and target from substreams keyed by
//! `(seed, trial_index, label)`, designs the feedback, simulates every user's
//! decision and the echo, and estimates the target angle. Experiments run
//! trials on a worker pool and aggregate them in trial order, so the output
//! does not depend on the number of threads.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::airlink::{echo, empirical_comm_error, simulate_decisions};
use crate::designer::{
    analytic_comm_error, crlb_diagonal, design_feedback, matched_filter_baseline, mean_sense_error,
    weighted_objective, DesignTrace, FeedbackMatrix, SenseParams,
};
use crate::error::{Error, Result};
use crate::numerics::{Angle, SimRng};
use crate::scenario::{make_grid, make_population, make_targets, InitSign, SystemConfig};
use crate::sensing::{squared_errors_deg, MusicEstimator};

/// Which feedback matrix a trial transmits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Projected-gradient design.
    Pgd,
    /// Zero-iteration matched filter.
    MatchedFilter,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Pgd => "pgd",
            Method::MatchedFilter => "matched_filter",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pgd" => Ok(Method::Pgd),
            "matched_filter" => Ok(Method::MatchedFilter),
            other => Err(Error::invalid(
                "method",
                format!("unknown method {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSummary {
    pub initial: f64,
    pub final_value: f64,
    pub e_s_final: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub trial_index: u64,
    pub method: Method,
    pub e_c_empirical: f64,
    pub e_c_analytic: f64,
    pub theta_true_deg: Vec<f64>,
    pub theta_hat_deg: Vec<f64>,
    /// Summed over targets, deg².
    pub sq_angle_error: f64,
    /// Exact bound on the angle MSE of each target, deg².
    pub crlb_deg2: Vec<f64>,
    pub objective: ObjectiveSummary,
    pub wall_time_s: f64,
}

impl TrialMetrics {
    /// Equality on everything except the wall-clock time.
    pub fn same_outcome(&self, other: &TrialMetrics) -> bool {
        TrialMetrics {
            wall_time_s: 0.0,
            ..self.clone()
        } == TrialMetrics {
            wall_time_s: 0.0,
            ..other.clone()
        }
    }
}

/// Random streams of one trial.
pub struct TrialStreams {
    pub population: SimRng,
    pub targets: SimRng,
    pub downlink: SimRng,
    pub echo: SimRng,
}

impl TrialStreams {
    pub fn new(seed: u64, trial_index: u64) -> Self {
        TrialStreams {
            population: SimRng::substream(seed, trial_index, "population"),
            targets: SimRng::substream(seed, trial_index, "targets"),
            downlink: SimRng::substream(seed, trial_index, "downlink"),
            echo: SimRng::substream(seed, trial_index, "echo"),
        }
    }
}

pub fn design_with(
    cfg: &SystemConfig,
    method: Method,
    pop: &crate::scenario::UserPopulation,
    grid: &crate::scenario::SenseGrid,
) -> Result<(FeedbackMatrix, DesignTrace)> {
    match method {
        Method::Pgd => design_feedback(cfg, pop, grid),
        Method::MatchedFilter => Ok((matched_filter_baseline(cfg, pop)?, DesignTrace::default())),
    }
}

/// One full pipeline pass with the projected-gradient design.
pub fn run_trial(cfg: &SystemConfig, trial_index: u64) -> Result<TrialMetrics> {
    run_trial_with(cfg, trial_index, Method::Pgd)
}

pub fn run_trial_with(
    cfg: &SystemConfig,
    trial_index: u64,
    method: Method,
) -> Result<TrialMetrics> {
    let started = Instant::now();
    cfg.validate()?;
    let mut streams = TrialStreams::new(cfg.seed, trial_index);
    let codebook = cfg.codebook()?;
    let pop = make_population(cfg, &codebook, &mut streams.population)?;
    let scene = make_targets(cfg, &mut streams.targets);
    let grid = make_grid(cfg)?;

    let (v, trace) = design_with(cfg, method, &pop, &grid)?;
    let initial = matched_filter_baseline(cfg, &pop)?;

    let outcomes = simulate_decisions(
        v.matrix(),
        &pop,
        &mut streams.downlink,
        cfg.sigma_c2.linear_mw(),
    )?;
    let e_c_empirical = empirical_comm_error(&outcomes)?;
    let e_c_analytic = analytic_comm_error(v.matrix(), &pop, cfg.sigma_ch2())?;

    let sigma_e2 = cfg.sigma_e2.linear_mw();
    let obs = echo(
        v.matrix(),
        &scene,
        &mut streams.echo,
        sigma_e2,
        cfg.rho0_linear(),
        cfg.alpha_t,
    )?;
    let estimates =
        MusicEstimator::default().estimate_angles(&obs, scene.targets.len(), cfg.sector())?;
    let truth = scene.angles();
    let hats: Vec<Angle> = estimates.iter().map(|e| e.theta_hat).collect();
    let sq = squared_errors_deg(&truth, &hats)?;
    let rad2_to_deg2 = (180.0 / std::f64::consts::PI).powi(2);
    let crlb_deg2 = crlb_diagonal(v.matrix(), &scene, sigma_e2, cfg.rho0_linear(), cfg.alpha_t)?
        .into_iter()
        .map(|c| c * rad2_to_deg2)
        .collect();

    let objective = ObjectiveSummary {
        initial: weighted_objective(initial.matrix(), &pop, &grid, cfg)?,
        final_value: weighted_objective(v.matrix(), &pop, &grid, cfg)?,
        e_s_final: mean_sense_error(v.matrix(), &grid, &SenseParams::from_config(cfg))?,
        iterations: trace.len(),
    };

    Ok(TrialMetrics {
        trial_index,
        method,
        e_c_empirical,
        e_c_analytic,
        theta_true_deg: truth.iter().map(|a| a.degrees()).collect(),
        theta_hat_deg: hats.iter().map(|a| a.degrees()).collect(),
        sq_angle_error: sq.iter().sum(),
        crlb_deg2,
        objective,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub mean_ec: f64,
    pub stderr_ec: f64,
    pub mean_ec_analytic: f64,
    pub rmse_deg: f64,
    pub mean_sq_error_deg2: f64,
    pub mean_crlb_deg2: f64,
    pub n_trials: usize,
}

impl Aggregates {
    pub fn from_trials(trials: &[TrialMetrics]) -> Result<Self> {
        if trials.is_empty() {
            return Err(Error::Empty("trial list"));
        }
        let n = trials.len() as f64;
        let mean_ec = trials.iter().map(|t| t.e_c_empirical).sum::<f64>() / n;
        let stderr_ec = if trials.len() > 1 {
            let var = trials
                .iter()
                .map(|t| (t.e_c_empirical - mean_ec).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        let mean_ec_analytic = trials.iter().map(|t| t.e_c_analytic).sum::<f64>() / n;
        let pairs: usize = trials.iter().map(|t| t.theta_true_deg.len()).sum();
        let sq_total: f64 = trials.iter().map(|t| t.sq_angle_error).sum();
        let crlb_total: f64 = trials.iter().flat_map(|t| t.crlb_deg2.iter()).sum();
        let (mean_sq, mean_crlb) = if pairs > 0 {
            (sq_total / pairs as f64, crlb_total / pairs as f64)
        } else {
            (0.0, 0.0)
        };
        Ok(Aggregates {
            mean_ec,
            stderr_ec,
            mean_ec_analytic,
            rmse_deg: mean_sq.sqrt(),
            mean_sq_error_deg2: mean_sq,
            mean_crlb_deg2: mean_crlb,
            n_trials: trials.len(),
        })
    }

    fn close_to(&self, other: &Aggregates, tol: f64) -> bool {
        let near = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0);
        self.n_trials == other.n_trials
            && near(self.mean_ec, other.mean_ec)
            && near(self.stderr_ec, other.stderr_ec)
            && near(self.mean_ec_analytic, other.mean_ec_analytic)
            && near(self.rmse_deg, other.rmse_deg)
            && near(self.mean_sq_error_deg2, other.mean_sq_error_deg2)
            && near(self.mean_crlb_deg2, other.mean_crlb_deg2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: SystemConfig,
    pub method: Method,
    pub codebook_seed: u64,
    pub trials: Vec<TrialMetrics>,
    pub aggregates: Aggregates,
}

impl ExperimentResult {
    /// Recomputes the aggregates from the rows and compares them to the stored ones.
    pub fn verify(&self) -> Result<()> {
        let fresh = Aggregates::from_trials(&self.trials)?;
        if !fresh.close_to(&self.aggregates, 1e-12) {
            return Err(Error::Inconsistent(format!(
                "stored aggregates {:?} differ from recomputed {:?}",
                self.aggregates, fresh
            )));
        }
        for (i, t) in self.trials.iter().enumerate() {
            if t.trial_index != i as u64 {
                return Err(Error::Inconsistent(format!(
                    "row {i} holds trial {}",
                    t.trial_index
                )));
            }
            if !(0.0..=1.0).contains(&t.e_c_empirical) || !(0.0..=1.0).contains(&t.e_c_analytic) {
                return Err(Error::Inconsistent(format!(
                    "trial {i} has e_c outside [0, 1]"
                )));
            }
            if !(t.sq_angle_error >= 0.0) {
                return Err(Error::Inconsistent(format!(
                    "trial {i} has negative squared error"
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: ExperimentResult = serde_json::from_str(text)?;
        r.verify()?;
        Ok(r)
    }
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::invalid("threads", e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs `n_trials` independent trials. `threads = None` uses the global pool.
pub fn run_experiment(
    cfg: &SystemConfig,
    method: Method,
    n_trials: usize,
    threads: Option<usize>,
) -> Result<ExperimentResult> {
    cfg.validate()?;
    if n_trials == 0 {
        return Err(Error::invalid("n_trials", "need at least one trial"));
    }
    let trials = with_pool(threads, || {
        (0..n_trials as u64)
            .into_par_iter()
            .map(|i| run_trial_with(cfg, i, method))
            .collect::<Result<Vec<_>>>()
    })??;
    let aggregates = Aggregates::from_trials(&trials)?;
    Ok(ExperimentResult {
        config: cfg.clone(),
        method,
        codebook_seed: cfg.codebook_seed(),
        trials,
        aggregates,
    })
}

/// Communication-only sweep over user counts and feedback lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig2Plan {
    pub system: SystemConfig,
    pub k_list: Vec<usize>,
    pub l_list: Vec<usize>,
    pub n_trials: usize,
}

/// Trade-off sweep over the weight μ and feedback lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig3Plan {
    pub system: SystemConfig,
    pub mu_list: Vec<f64>,
    pub l_list: Vec<usize>,
    pub n_trials: usize,
}

impl Fig2Plan {
    pub fn from_json(text: &str) -> Result<Self> {
        let plan: Fig2Plan = serde_json::from_str(text)?;
        plan.system.validate()?;
        Ok(plan)
    }

    /// Configuration of one `(K, L)` cell: μ = 1 and ⌊0.9K⌋ decoded users.
    pub fn cell(&self, k: usize, l: usize) -> SystemConfig {
        SystemConfig {
            k_users: k,
            n_decoded: (k * 9) / 10,
            l,
            mu: 1.0,
            ..self.system.clone()
        }
    }
}

impl Fig3Plan {
    pub fn from_json(text: &str) -> Result<Self> {
        let plan: Fig3Plan = serde_json::from_str(text)?;
        plan.system.validate()?;
        Ok(plan)
    }

    pub fn cell(&self, mu: f64, l: usize) -> SystemConfig {
        SystemConfig {
            mu,
            l,
            ..self.system.clone()
        }
    }
}

/// Mean and spread of one sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub k: usize,
    pub l: usize,
    pub mu: f64,
    pub method: Method,
    pub aggregates: Aggregates,
}

pub fn run_fig2(plan: &Fig2Plan, threads: Option<usize>) -> Result<Vec<ExperimentResult>> {
    let mut out = Vec::new();
    for &k in &plan.k_list {
        for &l in &plan.l_list {
            let cfg = plan.cell(k, l);
            for method in [Method::Pgd, Method::MatchedFilter] {
                out.push(run_experiment(&cfg, method, plan.n_trials, threads)?);
            }
        }
    }
    Ok(out)
}

pub fn run_fig3(plan: &Fig3Plan, threads: Option<usize>) -> Result<Vec<ExperimentResult>> {
    let mut out = Vec::new();
    for &mu in &plan.mu_list {
        for &l in &plan.l_list {
            out.push(run_experiment(
                &plan.cell(mu, l),
                Method::Pgd,
                plan.n_trials,
                threads,
            )?);
        }
    }
    Ok(out)
}

pub fn summarize(results: &[ExperimentResult]) -> Vec<CellSummary> {
    results
        .iter()
        .map(|r| CellSummary {
            k: r.config.k_users,
            l: r.config.l,
            mu: r.config.mu,
            method: r.method,
            aggregates: r.aggregates.clone(),
        })
        .collect()
}

/// Hex SHA-256 of the compact JSON encoding of a plan or config.
pub fn config_hash<T: Serialize>(value: &T) -> Result<String> {
    let text = serde_json::to_string(value)?;
    let digest = Sha256::digest(text.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn header_line(hash: &str, system: &SystemConfig) -> String {
    format!(
        "# config_hash={hash} seed={} codebook_seed={} init_sign={}\n",
        system.seed,
        system.codebook_seed(),
        match system.init_sign {
            InitSign::Literal => "literal",
            InitSign::Negated => "negated",
        }
    )
}

pub const FIG2_COLUMNS: &str = "K,L,method,mean_ec,stderr_ec,n_trials";
pub const FIG3_COLUMNS: &str = "mu,L,mean_ec,stderr_ec,rmse_deg,n_trials";

pub fn fig2_csv(plan: &Fig2Plan, results: &[ExperimentResult]) -> Result<String> {
    let mut s = header_line(&config_hash(plan)?, &plan.system);
    s.push_str(FIG2_COLUMNS);
    s.push('\n');
    for r in results {
        let a = &r.aggregates;
        writeln!(
            s,
            "{},{},{},{},{},{}",
            r.config.k_users,
            r.config.l,
            r.method.label(),
            a.mean_ec,
            a.stderr_ec,
            a.n_trials
        )
        .expect("writing to a String");
    }
    Ok(s)
}

pub fn fig3_csv(plan: &Fig3Plan, results: &[ExperimentResult]) -> Result<String> {
    let mut s = header_line(&config_hash(plan)?, &plan.system);
    s.push_str(FIG3_COLUMNS);
    s.push('\n');
    for r in results {
        let a = &r.aggregates;
        writeln!(
            s,
            "{},{},{},{},{},{}",
            r.config.mu, r.config.l, a.mean_ec, a.stderr_ec, a.rmse_deg, a.n_trials
        )
        .expect("writing to a String");
    }
    Ok(s)
}

/// Output of the `design` command: one designed matrix with its history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub config: SystemConfig,
    pub config_hash: String,
    pub codebook_seed: u64,
    pub trial_index: u64,
    pub init_sign: InitSign,
    /// Row-major real parts of `V` (M rows of L entries).
    pub v_re: Vec<Vec<f64>>,
    pub v_im: Vec<Vec<f64>>,
    pub e_c_initial: f64,
    pub e_c_final: f64,
    pub e_s_initial: f64,
    pub e_s_final: f64,
    pub trace: DesignTrace,
}

pub fn design_report(cfg: &SystemConfig, trial_index: u64) -> Result<DesignReport> {
    cfg.validate()?;
    let mut streams = TrialStreams::new(cfg.seed, trial_index);
    let pop = make_population(cfg, &cfg.codebook()?, &mut streams.population)?;
    let grid = make_grid(cfg)?;
    let sense = SenseParams::from_config(cfg);
    let v0 = matched_filter_baseline(cfg, &pop)?;
    let (v, trace) = design_feedback(cfg, &pop, &grid)?;
    let rows = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
        v.matrix()
            .row_iter()
            .map(|r| r.iter().map(f).collect())
            .collect()
    };
    Ok(DesignReport {
        config: cfg.clone(),
        config_hash: config_hash(cfg)?,
        codebook_seed: cfg.codebook_seed(),
        trial_index,
        init_sign: cfg.init_sign,
        v_re: rows(|z| z.re),
        v_im: rows(|z| z.im),
        e_c_initial: analytic_comm_error(v0.matrix(), &pop, cfg.sigma_ch2())?,
        e_c_final: analytic_comm_error(v.matrix(), &pop, cfg.sigma_ch2())?,
        e_s_initial: mean_sense_error(v0.matrix(), &grid, &sense)?,
        e_s_final: mean_sense_error(v.matrix(), &grid, &sense)?,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::PowerLevel;

    fn quick_cfg() -> SystemConfig {
        SystemConfig {
            k_users: 10,
            n_decoded: 9,
            l: 8,
            n_stp: 5,
            ..SystemConfig::default()
        }
    }

    #[test]
    fn trial_is_deterministic() {
        let cfg = quick_cfg();
        let a = run_trial(&cfg, 3).unwrap();
        let b = run_trial(&cfg, 3).unwrap();
        assert!(a.same_outcome(&b));
        let c = run_trial(&cfg, 4).unwrap();
        assert!(!a.same_outcome(&c));
    }

    #[test]
    fn comm_only_trial_still_senses() {
        let cfg = SystemConfig {
            mu: 1.0,
            ..quick_cfg()
        };
        let t = run_trial(&cfg, 0).unwrap();
        assert_eq!(t.theta_true_deg.len(), 1);
        assert_eq!(t.theta_hat_deg.len(), 1);
        assert!(t.sq_angle_error >= 0.0);
        assert!(t.crlb_deg2[0] > 0.0);
        assert_eq!(t.objective.iterations, 5);
    }

    #[test]
    fn noiseless_trial_has_no_decision_errors_when_margins_are_right() {
        let cfg = SystemConfig {
            sigma_c2: PowerLevel::ZERO,
            sigma_e2: PowerLevel::ZERO,
            sigma_h2: PowerLevel::ZERO,
            ..quick_cfg()
        };
        // The analytic error needs positive decision noise; check the margins directly.
        let mut streams = TrialStreams::new(cfg.seed, 0);
        let pop = make_population(&cfg, &cfg.codebook().unwrap(), &mut streams.population).unwrap();
        let grid = make_grid(&cfg).unwrap();
        let (v, _) = design_feedback(
            &SystemConfig {
                sigma_c2: PowerLevel::from_dbm(-100.0),
                ..cfg.clone()
            },
            &pop,
            &grid,
        )
        .unwrap();
        let outcomes = simulate_decisions(v.matrix(), &pop, &mut streams.downlink, 0.0).unwrap();
        for (o, u) in outcomes.iter().zip(pop.iter()) {
            let m = crate::designer::comm_margin(v.matrix(), &u.h_est, &u.hash).unwrap();
            assert!((o.margin - m).abs() <= 1e-12 * m.abs().max(1e-30));
            if m * f64::from(u.sign()) > 0.0 {
                assert!(!o.is_error());
            }
        }
    }

    #[test]
    fn experiment_is_thread_count_independent() {
        let cfg = quick_cfg();
        let one = run_experiment(&cfg, Method::Pgd, 6, Some(1)).unwrap();
        let four = run_experiment(&cfg, Method::Pgd, 6, Some(4)).unwrap();
        assert_eq!(one.aggregates, four.aggregates);
        for (a, b) in one.trials.iter().zip(&four.trials) {
            assert!(a.same_outcome(b));
        }
        one.verify().unwrap();
    }

    #[test]
    fn verify_catches_tampering() {
        let cfg = quick_cfg();
        let mut r = run_experiment(&cfg, Method::MatchedFilter, 3, Some(2)).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back = ExperimentResult::from_json(&text).unwrap();
        assert_eq!(back, r);
        r.aggregates.mean_ec += 1e-6;
        assert!(matches!(r.verify(), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn csv_layout() {
        let plan = Fig2Plan {
            system: quick_cfg(),
            k_list: vec![10],
            l_list: vec![8],
            n_trials: 2,
        };
        let results = run_fig2(&plan, Some(2)).unwrap();
        let csv = fig2_csv(&plan, &results).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# config_hash="));
        assert!(lines[0].contains(&format!("seed={}", plan.system.seed)));
        assert_eq!(lines[1], FIG2_COLUMNS);
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("10,8,pgd,"));
        assert!(lines[3].starts_with("10,8,matched_filter,"));

        let plan3 = Fig3Plan {
            system: quick_cfg(),
            mu_list: vec![0.0, 1.0],
            l_list: vec![8],
            n_trials: 2,
        };
        let csv = fig3_csv(&plan3, &run_fig3(&plan3, None).unwrap()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1], FIG3_COLUMNS);
        assert!(lines[2].starts_with("0,8,"));
        assert!(lines[3].starts_with("1,8,"));
    }

    #[test]
    fn plans_reject_unknown_keys() {
        let plan = Fig2Plan {
            system: quick_cfg(),
            k_list: vec![10],
            l_list: vec![8],
            n_trials: 2,
        };
        let mut v = serde_json::to_value(&plan).unwrap();
        assert_eq!(Fig2Plan::from_json(&v.to_string()).unwrap(), plan);
        v["trials"] = serde_json::json!(3);
        assert!(Fig2Plan::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn fig2_cells_force_communication_only() {
        let plan = Fig2Plan {
            system: SystemConfig {
                mu: 0.3,
                ..SystemConfig::default()
            },
            k_list: vec![25],
            l_list: vec![16],
            n_trials: 1,
        };
        let c = plan.cell(25, 16);
        assert_eq!((c.k_users, c.n_decoded, c.l, c.mu), (25, 22, 16, 1.0));
    }

    #[test]
    fn design_report_shapes() {
        let cfg = quick_cfg();
        let r = design_report(&cfg, 0).unwrap();
        assert_eq!(r.v_re.len(), cfg.m);
        assert!(r.v_re.iter().all(|row| row.len() == cfg.l));
        assert_eq!(r.trace.len(), cfg.n_stp);
        let p: f64 = r
            .v_re
            .iter()
            .flatten()
            .chain(r.v_im.iter().flatten())
            .map(|x| x * x)
            .sum();
        assert!((p - cfg.power_budget()).abs() < 1e-9 * cfg.power_budget());
    }
}
