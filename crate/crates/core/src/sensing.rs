//! Target angle estimation from the echo, and the RMSE score.
//!
//! The estimator is MUSIC with a known target count: the sample covariance
//! `R = Y_e Y_eᴴ / L` is eigendecomposed, the `M − T` weakest eigenvectors
//! span the noise subspace `E_n`, and the pseudospectrum `1/‖E_nᴴ a(θ)‖²` is
//! scanned over the sector. Peaks are refined by fitting a parabola to the
//! null spectrum `‖E_nᴴ a(θ)‖²` through the three grid points around each
//! peak, which is exact for a quadratic null and well behaved at high SNR.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::airlink::EchoObservation;
use crate::error::{Error, Result};
use crate::numerics::{steering_vector, Angle, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleEstimate {
    pub theta_hat: Angle,
    pub spectrum_peak: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MusicEstimator {
    pub grid_step_deg: f64,
}

impl Default for MusicEstimator {
    fn default() -> Self {
        MusicEstimator {
            grid_step_deg: 0.01,
        }
    }
}

impl MusicEstimator {
    /// Eigenvectors of the `M − t_count` smallest eigenvalues of the sample covariance.
    pub fn noise_subspace(&self, obs: &EchoObservation, t_count: usize) -> Result<CMat> {
        let (m, l) = obs.y_e.shape();
        if t_count == 0 {
            return Err(Error::invalid("t_count", "need at least one target"));
        }
        if t_count >= m {
            return Err(Error::invalid(
                "t_count",
                "must be smaller than the antenna count",
            ));
        }
        if l == 0 {
            return Err(Error::Empty("echo snapshots"));
        }
        let r = &obs.y_e * obs.y_e.adjoint() / num_complex::Complex64::from(l as f64);
        let eig = SymmetricEigen::new(r);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let keep = m - t_count;
        let mut en = CMat::zeros(m, keep);
        for (j, &idx) in order.iter().take(keep).enumerate() {
            en.set_column(j, &eig.eigenvectors.column(idx));
        }
        Ok(en)
    }

    /// `‖E_nᴴ a(θ)‖²` for each angle.
    pub fn null_spectrum(&self, noise: &CMat, angles: &[Angle]) -> Result<Vec<f64>> {
        angles
            .iter()
            .map(|&th| {
                let a = steering_vector(th, noise.nrows())?;
                Ok(noise.ad_mul(&a).norm_squared())
            })
            .collect()
    }

    /// MUSIC pseudospectrum `1/‖E_nᴴ a(θ)‖²`.
    pub fn pseudospectrum(
        &self,
        obs: &EchoObservation,
        t_count: usize,
        angles: &[Angle],
    ) -> Result<Vec<f64>> {
        let en = self.noise_subspace(obs, t_count)?;
        Ok(self
            .null_spectrum(&en, angles)?
            .into_iter()
            .map(|d| 1.0 / d)
            .collect())
    }

    fn scan_grid(&self, sector: (Angle, Angle)) -> Result<Vec<f64>> {
        let (lo, hi) = (sector.0.degrees(), sector.1.degrees());
        if !(hi > lo) || !(self.grid_step_deg > 0.0) {
            return Err(Error::invalid(
                "sector",
                "need lo < hi and a positive grid step",
            ));
        }
        let n = ((hi - lo) / self.grid_step_deg).round() as usize + 1;
        let step = (hi - lo) / (n - 1).max(1) as f64;
        Ok((0..n).map(|i| lo + step * i as f64).collect())
    }

    /// The `t_count` strongest pseudospectrum peaks inside `sector`, strongest first.
    ///
    /// Sector endpoints count as peaks when they beat their single neighbour.
    pub fn estimate_angles(
        &self,
        obs: &EchoObservation,
        t_count: usize,
        sector: (Angle, Angle),
    ) -> Result<Vec<AngleEstimate>> {
        let en = self.noise_subspace(obs, t_count)?;
        let degs = self.scan_grid(sector)?;
        let angles: Vec<Angle> = degs.iter().map(|&d| Angle::from_degrees(d)).collect();
        let null = self.null_spectrum(&en, &angles)?;
        let n = null.len();

        let mut peaks: Vec<usize> = (0..n)
            .filter(|&i| {
                let left = i == 0 || null[i] < null[i - 1];
                let right = i + 1 == n || null[i] <= null[i + 1];
                left && right && n > 1
            })
            .collect();
        if peaks.len() < t_count {
            return Err(Error::PeakShortfall {
                found: peaks.len(),
                wanted: t_count,
            });
        }
        peaks.sort_by(|&a, &b| null[a].total_cmp(&null[b]));
        peaks.truncate(t_count);

        let step = if n > 1 { degs[1] - degs[0] } else { 0.0 };
        Ok(peaks
            .into_iter()
            .map(|i| {
                let (deg, floor) = if i > 0 && i + 1 < n {
                    refine(null[i - 1], null[i], null[i + 1], degs[i], step)
                } else {
                    (degs[i], null[i])
                };
                AngleEstimate {
                    theta_hat: Angle::from_degrees(deg),
                    spectrum_peak: 1.0 / floor,
                }
            })
            .collect())
    }
}

/// Vertex of the parabola through `(−1, l), (0, c), (1, r)` scaled to the grid.
fn refine(l: f64, c: f64, r: f64, center: f64, step: f64) -> (f64, f64) {
    let curv = l - 2.0 * c + r;
    if !(curv > 0.0) {
        return (center, c);
    }
    let delta = (0.5 * (l - r) / curv).clamp(-0.5, 0.5);
    let floor = (c - 0.25 * (l - r) * delta).max(0.0);
    (center + delta * step, floor)
}

/// Pairs estimates with truths by sorting both (optimal for squared error on
/// a line) and returns the squared errors in deg².
pub fn squared_errors_deg(truth: &[Angle], estimates: &[Angle]) -> Result<Vec<f64>> {
    if truth.len() != estimates.len() {
        return Err(Error::DimensionMismatch {
            context: "angle lists",
            expected: truth.len(),
            found: estimates.len(),
        });
    }
    let mut t: Vec<f64> = truth.iter().map(|a| a.degrees()).collect();
    let mut e: Vec<f64> = estimates.iter().map(|a| a.degrees()).collect();
    t.sort_by(f64::total_cmp);
    e.sort_by(f64::total_cmp);
    Ok(t.iter().zip(&e).map(|(a, b)| (a - b).powi(2)).collect())
}

/// Root-mean-square angle error in degrees.
pub fn rmse(truth: &[Angle], estimates: &[Angle]) -> Result<f64> {
    let sq = squared_errors_deg(truth, estimates)?;
    if sq.is_empty() {
        return Err(Error::Empty("angle lists"));
    }
    Ok((sq.iter().sum::<f64>() / sq.len() as f64).sqrt())
}
