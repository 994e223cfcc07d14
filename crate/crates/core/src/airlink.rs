//! Physical-layer simulation of the designed feedback: what each user hears,
//! the ACK/NACK decision it takes, and the echo the base station collects.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{sample_cgauss, sample_cgauss_mat, steering_vector, CMat, CVec};
use crate::scenario::{TargetScene, UserPopulation};

/// Echo received at the `M` base-station antennas over `L` channel uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoObservation {
    pub y_e: CMat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionOutcome {
    pub s_true: i8,
    pub s_hat: i8,
    /// Realized statistic `Re(y pᴴ)`.
    pub margin: f64,
}

impl DecisionOutcome {
    pub fn is_error(&self) -> bool {
        self.s_true != self.s_hat
    }
}

/// `y = hᵀ V + z`, returned as a length-`L` vector.
pub fn receive_downlink<R: Rng + ?Sized>(
    v: &CMat,
    h_true: &CVec,
    rng: &mut R,
    sigma_c2: f64,
) -> Result<CVec> {
    if v.nrows() != h_true.len() {
        return Err(Error::DimensionMismatch {
            context: "downlink channel",
            expected: v.nrows(),
            found: h_true.len(),
        });
    }
    Ok(v.tr_mul(h_true) + sample_cgauss(rng, v.ncols(), sigma_c2)?)
}

/// `Re(y pᴴ)`.
pub fn correlate(y: &CVec, hash: &CVec) -> Result<f64> {
    if y.len() != hash.len() {
        return Err(Error::DimensionMismatch {
            context: "hash correlation",
            expected: hash.len(),
            found: y.len(),
        });
    }
    Ok(hash.dotc(y).re)
}

/// ACK (+1) when `Re(y pᴴ) ≥ 0`, NACK (−1) otherwise.
pub fn decide(y: &CVec, hash: &CVec) -> Result<i8> {
    Ok(if correlate(y, hash)? >= 0.0 { 1 } else { -1 })
}

/// One downlink realization for every user in the population.
pub fn simulate_decisions<R: Rng + ?Sized>(
    v: &CMat,
    pop: &UserPopulation,
    rng: &mut R,
    sigma_c2: f64,
) -> Result<Vec<DecisionOutcome>> {
    pop.iter()
        .map(|u| {
            let y = receive_downlink(v, &u.h_true, rng, sigma_c2)?;
            let margin = correlate(&y, &u.hash)?;
            Ok(DecisionOutcome {
                s_true: u.sign(),
                s_hat: if margin >= 0.0 { 1 } else { -1 },
                margin,
            })
        })
        .collect()
}

/// `Y_e = Σ_t √(ρ₀ d_t^{−2α_t}) a(θ_t) aᵀ(θ_t) V + Z_e`.
pub fn echo<R: Rng + ?Sized>(
    v: &CMat,
    scene: &TargetScene,
    rng: &mut R,
    sigma_e2: f64,
    rho0: f64,
    alpha_t: f64,
) -> Result<EchoObservation> {
    let (m, l) = v.shape();
    let mut y_e = CMat::zeros(m, l);
    for tgt in &scene.targets {
        if !(tgt.distance > 0.0) {
            return Err(Error::invalid("target distance", "must be positive"));
        }
        let a = steering_vector(tgt.angle, m)?;
        let amp = (rho0 * tgt.distance.powf(-2.0 * alpha_t)).sqrt();
        let row = v.tr_mul(&a).transpose();
        y_e += (&a * row) * Complex64::from(amp);
    }
    y_e += sample_cgauss_mat(rng, m, l, sigma_e2)?;
    Ok(EchoObservation { y_e })
}

/// Fraction of wrong decisions.
pub fn empirical_comm_error(outcomes: &[DecisionOutcome]) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::Empty("decision outcomes"));
    }
    let wrong = outcomes.iter().filter(|o| o.is_error()).count();
    Ok(wrong as f64 / outcomes.len() as f64)
}
