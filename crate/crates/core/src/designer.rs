//! Feedback matrix design.
//!
//! The base station sends one `M×L` matrix `V` that must (a) push every
//! detected user's decision statistic `Re(ĥᵀ V pᴴ)` to the side of zero that
//! matches its decoding status, and (b) put enough energy toward the sensing
//! sector for the echo to reveal target angles. This module holds the analytic
//! error metrics for both tasks, their gradients, and the normalized projected
//! gradient loop that trades them off with a weight `μ`.
//!
//! Gradients are expressed in the real inner product `Re Σ conj(G) ⊙ ΔV`, so
//! the first-order change of a cost `f` along `ΔV` is `real_inner(G, ΔV)`.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    q_function, real_inner, sample_cgauss_mat, steering_derivative, steering_vector, Angle, CMat,
    CVec, SimRng,
};
use crate::scenario::{InitSign, SenseGrid, SystemConfig, TargetScene, UserPopulation};

/// A transmit matrix together with its Frobenius power budget `P·L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackMatrix {
    v: CMat,
    power_budget: f64,
}

impl FeedbackMatrix {
    /// Scales `v` onto the sphere `‖V‖_F² = power_budget`.
    pub fn projected(v: CMat, power_budget: f64) -> Result<Self> {
        if !(power_budget > 0.0) {
            return Err(Error::invalid("power_budget", "must be positive"));
        }
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid(
                "v",
                "cannot project a zero or non-finite matrix",
            ));
        }
        let v = v * num_complex::Complex64::from(power_budget.sqrt() / norm);
        Ok(FeedbackMatrix { v, power_budget })
    }

    pub fn matrix(&self) -> &CMat {
        &self.v
    }

    pub fn into_matrix(self) -> CMat {
        self.v
    }

    pub fn power_budget(&self) -> f64 {
        self.power_budget
    }

    /// `‖V‖_F²`.
    pub fn power(&self) -> f64 {
        self.v.norm_squared()
    }

    /// Relative deviation of the transmit power from the budget.
    pub fn power_error(&self) -> f64 {
        (self.power() - self.power_budget).abs() / self.power_budget
    }
}

/// Constants of the echo link that scale the sensing bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SenseParams {
    /// Echo noise variance σ_e² in mW.
    pub sigma_e2: f64,
    /// Linear unit-distance path gain ρ₀.
    pub rho0: f64,
    /// Nominal target distance in meters.
    pub target_dist: f64,
    pub alpha_t: f64,
}

impl SenseParams {
    pub fn from_config(cfg: &SystemConfig) -> Self {
        SenseParams {
            sigma_e2: cfg.sigma_e2.linear_mw(),
            rho0: cfg.rho0_linear(),
            target_dist: cfg.target_dist,
            alpha_t: cfg.alpha_t,
        }
    }

    /// Round-trip echo gain `ρ₀ d^{−2α_t}`.
    pub fn echo_gain(&self) -> f64 {
        self.rho0 * self.target_dist.powf(-2.0 * self.alpha_t)
    }

    /// `σ_e² / (2 ρ₀ d^{−2α_t} π² sin²θ)`.
    pub fn variance_factor(&self, theta: Angle) -> Result<f64> {
        let s = theta.radians().sin();
        if s == 0.0 {
            return Err(Error::invalid("theta", "sin(theta) must be non-zero"));
        }
        Ok(self.sigma_e2 / (2.0 * self.echo_gain() * PI * PI * s * s))
    }
}

fn check_user_dims(v: &CMat, h: &CVec, p: &CVec) -> Result<()> {
    if v.nrows() != h.len() {
        return Err(Error::DimensionMismatch {
            context: "channel vs. feedback rows",
            expected: v.nrows(),
            found: h.len(),
        });
    }
    if v.ncols() != p.len() {
        return Err(Error::DimensionMismatch {
            context: "hash vs. feedback columns",
            expected: v.ncols(),
            found: p.len(),
        });
    }
    Ok(())
}

/// Mean of user decision statistic, `Re(ĥᵀ V pᴴ)`.
pub fn comm_margin(v: &CMat, h_est: &CVec, hash: &CVec) -> Result<f64> {
    check_user_dims(v, h_est, hash)?;
    let u = v.tr_mul(h_est);
    Ok(hash.dotc(&u).re)
}

/// Per-user probability of a wrong ACK/NACK decision.
pub fn user_error_probabilities(
    v: &CMat,
    pop: &UserPopulation,
    sigma_ch2: f64,
) -> Result<Vec<f64>> {
    if !(sigma_ch2 > 0.0) {
        return Err(Error::invalid(
            "sigma_ch2",
            "decision noise variance must be positive",
        ));
    }
    let sd = sigma_ch2.sqrt();
    pop.iter()
        .map(|u| {
            let m = comm_margin(v, &u.h_est, &u.hash)?;
            Ok(q_function(f64::from(u.sign()) * m / sd))
        })
        .collect()
}

/// Average probability of a wrong decision over all detected users.
pub fn analytic_comm_error(v: &CMat, pop: &UserPopulation, sigma_ch2: f64) -> Result<f64> {
    if pop.is_empty() {
        return Err(Error::Empty("user population"));
    }
    let errs = user_error_probabilities(v, pop, sigma_ch2)?;
    Ok(errs.iter().sum::<f64>() / errs.len() as f64)
}

/// The adaptive activity threshold, i.e. the mean detection error at `v_prev`.
pub fn q_threshold(v_prev: &CMat, pop: &UserPopulation, sigma_ch2: f64) -> Result<f64> {
    analytic_comm_error(v_prev, pop, sigma_ch2)
}

/// `Σ_{failed} ĥ*pᵀ − Σ_{decoded} ĥ*pᵀ` over the users selected by `keep`.
fn signed_outer_sum(
    pop: &UserPopulation,
    m: usize,
    l: usize,
    mut keep: impl FnMut(usize) -> bool,
) -> Result<CMat> {
    let mut acc = CMat::zeros(m, l);
    for (i, u) in pop.iter().enumerate() {
        if !keep(i) {
            continue;
        }
        check_user_dims(&acc, &u.h_est, &u.hash)?;
        let w = -f64::from(u.sign());
        acc += (u.h_est.conjugate() * u.hash.transpose()) * num_complex::Complex64::from(w);
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommGradient {
    pub grad: CMat,
    /// `|A_k|`: decoded users still above the threshold.
    pub active_decoded: usize,
    /// `|Ã_k|`: failed users still above the threshold.
    pub active_failed: usize,
}

/// Gradient of the linearized communication cost over the active users, those
/// whose error probability strictly exceeds `q_k`.
pub fn grad_comm(v: &CMat, pop: &UserPopulation, sigma_ch2: f64, q_k: f64) -> Result<CommGradient> {
    let errs = user_error_probabilities(v, pop, sigma_ch2)?;
    let active: Vec<bool> = errs.iter().map(|&e| e > q_k).collect();
    let grad = signed_outer_sum(pop, v.nrows(), v.ncols(), |i| active[i])?;
    let (mut active_decoded, mut active_failed) = (0, 0);
    for (u, &a) in pop.iter().zip(&active) {
        match (a, u.decoded) {
            (true, true) => active_decoded += 1,
            (true, false) => active_failed += 1,
            _ => {}
        }
    }
    Ok(CommGradient {
        grad,
        active_decoded,
        active_failed,
    })
}

/// Energy radiated toward `theta`, `aᵀ(θ) V Vᴴ a*(θ)`.
pub fn beam_energy(v: &CMat, theta: Angle) -> Result<f64> {
    let a = steering_vector(theta, v.nrows())?;
    Ok(v.tr_mul(&a).norm_squared())
}

/// Approximate angle-MSE bound for a target at `theta`.
pub fn approx_sense_error(v: &CMat, theta: Angle, params: &SenseParams) -> Result<f64> {
    let factor = params.variance_factor(theta)?;
    let y = beam_energy(v, theta)?;
    if y == 0.0 {
        return Err(Error::ZeroBeamEnergy {
            theta_deg: theta.degrees(),
        });
    }
    Ok(factor / y)
}

/// Uniform average of [`approx_sense_error`] over the grid.
pub fn mean_sense_error(v: &CMat, grid: &SenseGrid, params: &SenseParams) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::Empty("sense grid"));
    }
    let mut total = 0.0;
    for &theta in &grid.angles {
        total += approx_sense_error(v, theta, params)?;
    }
    Ok(total / grid.len() as f64)
}

/// `Σ_θ −a*(θ)aᵀ(θ)V / (y_θ² sin²θ)` with `y_θ = aᵀ(θ)VVᴴa*(θ)`.
///
/// This is the gradient of the linearized sensing cost up to a positive
/// constant, which the normalized update discards anyway.
pub fn grad_sense(v: &CMat, grid: &SenseGrid) -> Result<CMat> {
    let mut acc = CMat::zeros(v.nrows(), v.ncols());
    for &theta in &grid.angles {
        let a = steering_vector(theta, v.nrows())?;
        let u = v.tr_mul(&a);
        let y = u.norm_squared();
        let s2 = theta.radians().sin().powi(2);
        if y == 0.0 || s2 == 0.0 {
            return Err(Error::ZeroBeamEnergy {
                theta_deg: theta.degrees(),
            });
        }
        acc -= (a.conjugate() * u.transpose()) * num_complex::Complex64::from(1.0 / (y * y * s2));
    }
    Ok(acc)
}

/// Diagonal of the exact deterministic Cramér–Rao bound for the echo model.
///
/// `C = σ_e²/2 · (Σ_s Re(X_sᴴ Dᴴ P⊥ D X_s))⁻¹` with `P⊥` the projector onto the
/// orthogonal complement of the target steering vectors, `D` their angular
/// derivatives and `X_s` the per-snapshot echo amplitudes.
pub fn crlb_diagonal(
    v: &CMat,
    scene: &TargetScene,
    sigma_e2: f64,
    rho0: f64,
    alpha_t: f64,
) -> Result<Vec<f64>> {
    let t = scene.targets.len();
    let m = v.nrows();
    if t == 0 {
        return Err(Error::Empty("target scene"));
    }
    if m <= t {
        return Err(Error::invalid("m", "need more antennas than targets"));
    }
    let mut b = CMat::zeros(m, t);
    let mut d = CMat::zeros(m, t);
    for (j, tgt) in scene.targets.iter().enumerate() {
        b.set_column(j, &steering_vector(tgt.angle, m)?);
        d.set_column(j, &steering_derivative(tgt.angle, m)?);
    }
    let gram_inv = (b.adjoint() * &b)
        .try_inverse()
        .ok_or(Error::Singular("steering Gram matrix"))?;
    let proj = CMat::identity(m, m) - &b * gram_inv * b.adjoint();
    let g = d.adjoint() * proj * &d;

    // x[(t, s)] = sqrt(ρ₀ d_t^{−2α}) · (aᵀ(θ_t) V)_s
    let mut x = b.tr_mul(v);
    for (j, tgt) in scene.targets.iter().enumerate() {
        let amp = (rho0 * tgt.distance.powf(-2.0 * alpha_t)).sqrt();
        x.row_mut(j).scale_mut(amp);
    }
    let fisher = nalgebra::DMatrix::<f64>::from_fn(t, t, |r, c| {
        (0..v.ncols())
            .map(|s| (x[(r, s)].conj() * g[(r, c)] * x[(c, s)]).re)
            .sum()
    });
    let inv = fisher
        .try_inverse()
        .ok_or(Error::Singular("Fisher information"))?;
    Ok((0..t).map(|j| 0.5 * sigma_e2 * inv[(j, j)]).collect())
}

/// Matched-filter starting point `±(Σ_{failed} ĥ*pᵀ − Σ_{decoded} ĥ*pᵀ)`,
/// projected onto the power sphere. A degenerate all-zero sum falls back to a
/// random matrix drawn from `fallback`.
pub fn initial_v<R: Rng + ?Sized>(
    pop: &UserPopulation,
    m: usize,
    l: usize,
    power_budget: f64,
    sign: InitSign,
    fallback: &mut R,
) -> Result<FeedbackMatrix> {
    if pop.is_empty() {
        return Err(Error::Empty("user population"));
    }
    let raw = signed_outer_sum(pop, m, l, |_| true)? * num_complex::Complex64::from(sign.factor());
    if raw.norm() > 0.0 {
        FeedbackMatrix::projected(raw, power_budget)
    } else {
        FeedbackMatrix::projected(sample_cgauss_mat(fallback, m, l, 1.0)?, power_budget)
    }
}

/// The zero-iteration design used as the comparison curve.
pub fn matched_filter_baseline(cfg: &SystemConfig, pop: &UserPopulation) -> Result<FeedbackMatrix> {
    let mut rng = SimRng::substream(cfg.seed, 0, "init-fallback");
    initial_v(
        pop,
        cfg.m,
        cfg.l,
        cfg.power_budget(),
        cfg.init_sign,
        &mut rng,
    )
}

/// μ-weighted cost `μ e_c + (1−μ) e_s`. The sensing term is skipped at μ = 1.
pub fn weighted_objective(
    v: &CMat,
    pop: &UserPopulation,
    grid: &SenseGrid,
    cfg: &SystemConfig,
) -> Result<f64> {
    let e_c = analytic_comm_error(v, pop, cfg.sigma_ch2())?;
    if cfg.mu == 1.0 {
        return Ok(e_c);
    }
    let e_s = mean_sense_error(v, grid, &SenseParams::from_config(cfg))?;
    Ok(cfg.mu * e_c + (1.0 - cfg.mu) * e_s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub q_k: f64,
    pub active_decoded: usize,
    pub active_failed: usize,
    /// Metrics of the iterate produced by this step.
    pub e_c: f64,
    pub e_s: f64,
    pub objective: f64,
    pub power_error: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DesignTrace {
    pub iterations: Vec<IterationRecord>,
}

impl DesignTrace {
    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.iterations.last()
    }
}

fn unit(m: &CMat) -> Option<CMat> {
    let n = m.norm();
    (n > 0.0).then(|| m / num_complex::Complex64::from(n))
}

/// Runs the normalized projected-gradient design for `cfg.n_stp` iterations.
///
/// Each step forms
/// `V/‖V‖ − η (μ Δᶜ/‖Δᶜ‖ + (1−μ) Δˢ/‖Δˢ‖)` and rescales it back onto
/// `‖V‖_F² = P·L`. The activity threshold of step `k` is the mean detection
/// error of the iterate before the current one.
pub fn design_feedback(
    cfg: &SystemConfig,
    pop: &UserPopulation,
    grid: &SenseGrid,
) -> Result<(FeedbackMatrix, DesignTrace)> {
    cfg.validate()?;
    pop.check_dims(cfg.m, cfg.l)?;
    let sigma_ch2 = cfg.sigma_ch2();
    let sense = SenseParams::from_config(cfg);
    let budget = cfg.power_budget();

    let mut current = matched_filter_baseline(cfg, pop)?;
    let mut previous = current.matrix().clone();
    let mut trace = DesignTrace::default();

    for k in 1..=cfg.n_stp {
        let v = current.matrix();
        let q_k = q_threshold(&previous, pop, sigma_ch2)?;
        let comm = grad_comm(v, pop, sigma_ch2, q_k)?;

        let mut step = CMat::zeros(cfg.m, cfg.l);
        if cfg.mu > 0.0 {
            if let Some(dir) = unit(&comm.grad) {
                step += dir * num_complex::Complex64::from(cfg.mu);
            }
        }
        if cfg.mu < 1.0 {
            if let Some(dir) = unit(&grad_sense(v, grid)?) {
                step += dir * num_complex::Complex64::from(1.0 - cfg.mu);
            }
        }
        let moved = v / num_complex::Complex64::from(v.norm())
            - step * num_complex::Complex64::from(cfg.eta);
        let next = FeedbackMatrix::projected(moved, budget)?;

        let e_c = analytic_comm_error(next.matrix(), pop, sigma_ch2)?;
        let e_s = mean_sense_error(next.matrix(), grid, &sense)?;
        trace.iterations.push(IterationRecord {
            k,
            q_k,
            active_decoded: comm.active_decoded,
            active_failed: comm.active_failed,
            e_c,
            e_s,
            objective: cfg.mu * e_c + (1.0 - cfg.mu) * e_s,
            power_error: next.power_error(),
        });
        previous = std::mem::replace(&mut current, next).into_matrix();
    }
    Ok((current, trace))
}

/// Directional derivative helper for tests and diagnostics: `Re⟨G, ΔV⟩`.
pub fn directional(grad: &CMat, direction: &CMat) -> f64 {
    real_inner(grad, direction)
}
