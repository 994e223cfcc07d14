//! Downlink feedback design for unsourced random access with a sensing side job.
//!
//! After a random-access round the base station knows which users it decoded,
//! and has rough channel estimates for everyone. It broadcasts a short
//! feedback matrix `V` (M antennas by L channel uses). Each user correlates
//! what it hears with its own hash row and reads ACK or NACK from the sign.
//! The same transmission illuminates the surrounding sector, so the echo can
//! be used to estimate target angles.
//!
//! Modules, roughly in pipeline order:
//!
//! * [`numerics`]: steering vectors, the Gaussian tail function, dBm
//!   conversions and the seeded random streams.
//! * [`hashing`]: the pseudo-random ±1/√L hash codebook.
//! * [`scenario`]: configuration, user populations, targets and the sensing grid.
//! * [`designer`]: error metrics, gradients, the projected-gradient design and
//!   the exact bound on angle error.
//! * [`airlink`]: simulated downlink decisions and echo.
//! * [`sensing`]: MUSIC angle estimation and RMSE.
//! * [`harness`]: Monte Carlo trials, sweeps and CSV output.
//!
//! The `examples/` directory has one runnable program per capability, e.g.
//! `cargo run --release --example design_feedback`.

// Negated comparisons below reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod airlink;
pub mod designer;
pub mod error;
pub mod harness;
pub mod hashing;
pub mod numerics;
pub mod scenario;
pub mod sensing;

pub use error::{Error, Result};
pub use harness::{run_trial, run_trial_with, Method, TrialMetrics};
pub use numerics::{Angle, PowerLevel};
pub use scenario::SystemConfig;
