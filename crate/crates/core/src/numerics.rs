//! Scalar and vector primitives shared by the rest of the crate.
//!
//! Steering vectors of a half-wavelength uniform linear array, the Gaussian
//! tail function, dBm conversions and seeded complex Gaussian sampling.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Dense complex column vector.
pub type CVec = DVector<Complex64>;
/// Dense complex matrix.
pub type CMat = DMatrix<Complex64>;

/// An angle, stored in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub fn from_radians(rad: f64) -> Self {
        Angle(rad)
    }

    pub fn from_degrees(deg: f64) -> Self {
        Angle(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4} deg", self.degrees())
    }
}

/// A power level given in dBm. `-inf` dBm is an exact zero.
///
/// Serialized as a plain number of dBm, or the string `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLevel {
    dbm: f64,
}

impl PowerLevel {
    pub const ZERO: PowerLevel = PowerLevel {
        dbm: f64::NEG_INFINITY,
    };

    pub fn from_dbm(dbm: f64) -> Self {
        PowerLevel { dbm }
    }

    pub fn from_mw(mw: f64) -> Self {
        PowerLevel { dbm: mw_to_dbm(mw) }
    }

    pub fn dbm(self) -> f64 {
        self.dbm
    }

    pub fn linear_mw(self) -> f64 {
        dbm_to_mw(self.dbm)
    }
}

impl Serialize for PowerLevel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.dbm == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.dbm)
        }
    }
}

impl<'de> Deserialize<'de> for PowerLevel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(PowerLevel::from_dbm(x)),
            Repr::Text(t) if t.trim() == "-inf" => Ok(PowerLevel::ZERO),
            Repr::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a dBm number or \"-inf\", got {t:?}"
            ))),
        }
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    if dbm == f64::NEG_INFINITY {
        0.0
    } else {
        10f64.powf(dbm / 10.0)
    }
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    if mw == 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * mw.log10()
    }
}

/// Linear gain of a value quoted in dB.
pub fn db_to_linear(db: f64) -> f64 {
    dbm_to_mw(db)
}

/// ULA response `[1, e^{jπ cos θ}, …, e^{jπ(m-1) cos θ}]`.
pub fn steering_vector(theta: Angle, m: usize) -> Result<CVec> {
    if m == 0 {
        return Err(Error::invalid("m", "antenna count must be at least 1"));
    }
    let phase = PI * theta.radians().cos();
    Ok(CVec::from_fn(m, |k, _| {
        if k == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, phase * k as f64)
        }
    }))
}

/// Derivative of [`steering_vector`] with respect to θ.
pub fn steering_derivative(theta: Angle, m: usize) -> Result<CVec> {
    let a = steering_vector(theta, m)?;
    let s = -PI * theta.radians().sin();
    Ok(CVec::from_fn(m, |k, _| {
        Complex64::new(0.0, s * k as f64) * a[k]
    }))
}

/// Standard Gaussian tail probability `P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Draws `n` i.i.d. circularly-symmetric `CN(0, variance)` entries.
pub fn sample_cgauss<R: Rng + ?Sized>(rng: &mut R, n: usize, variance: f64) -> Result<CVec> {
    if !(variance >= 0.0) {
        return Err(Error::invalid(
            "variance",
            format!("must be non-negative, got {variance}"),
        ));
    }
    if variance == 0.0 {
        return Ok(CVec::zeros(n));
    }
    let sd = (variance / 2.0).sqrt();
    Ok(CVec::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(sd * re, sd * im)
    }))
}

/// Matrix of i.i.d. `CN(0, variance)` entries, filled column by column.
pub fn sample_cgauss_mat<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    variance: f64,
) -> Result<CMat> {
    let v = sample_cgauss(rng, rows * cols, variance)?;
    Ok(CMat::from_column_slice(rows, cols, v.as_slice()))
}

/// Deterministic generator used for every random draw in the crate.
///
/// Substreams are keyed by a SHA-256 digest of (seed, index, label), so trials
/// can run in any order on any thread and still draw identical sequences.
#[derive(Debug, Clone)]
pub struct SimRng(ChaCha12Rng);

impl SimRng {
    pub fn from_seed(seed: u64) -> Self {
        SimRng(ChaCha12Rng::from_seed(derive_key(seed, 0, "root")))
    }

    pub fn substream(seed: u64, index: u64, label: &str) -> Self {
        SimRng(ChaCha12Rng::from_seed(derive_key(seed, index, label)))
    }
}

impl RngCore for SimRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

pub(crate) fn derive_key(seed: u64, index: u64, label: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(index.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    let mut key = [0u8; 32];
    key.copy_from_slice(&h.finalize());
    key
}

/// Derives a 64-bit seed for a named sub-component (e.g. the hash codebook).
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let key = derive_key(seed, u64::MAX, label);
    u64::from_le_bytes(key[..8].try_into().expect("8 bytes"))
}

/// Frobenius inner product `Re Σ conj(a) b`, the real inner product the
/// gradients in this crate are expressed in.
pub fn real_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}
