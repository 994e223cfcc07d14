//! Random sign hash codebook shared by the base station and the users.
//!
//! Row `i` of the codebook is a length-`L` vector with entries `±1/√L`. Rows
//! are never stored: the sign bits of row `i` are read from a ChaCha keystream
//! starting at word offset `i * ceil(L/32)`, so any row can be derived on
//! demand and the lazy rows agree with a sequential read of the whole table.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{derive_key, CVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashCodebook {
    b_p: u32,
    l: usize,
    codebook_seed: u64,
}

impl HashCodebook {
    pub fn new(b_p: u32, l: usize, codebook_seed: u64) -> Result<Self> {
        if b_p == 0 || b_p > 63 {
            return Err(Error::invalid(
                "b_p",
                format!("must be in 1..=63, got {b_p}"),
            ));
        }
        if l == 0 {
            return Err(Error::invalid("l", "hash length must be at least 1"));
        }
        Ok(HashCodebook {
            b_p,
            l,
            codebook_seed,
        })
    }

    pub fn rows(&self) -> u64 {
        1u64 << self.b_p
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    pub fn b_p(&self) -> u32 {
        self.b_p
    }

    pub fn seed(&self) -> u64 {
        self.codebook_seed
    }

    fn words_per_row(&self) -> usize {
        self.l.div_ceil(32)
    }

    fn keystream(&self) -> ChaCha12Rng {
        ChaCha12Rng::from_seed(derive_key(self.codebook_seed, 0, "hash-codebook"))
    }

    fn row_from_words(&self, words: &[u32]) -> CVec {
        let amp = 1.0 / (self.l as f64).sqrt();
        CVec::from_fn(self.l, |k, _| {
            let bit = (words[k / 32] >> (k % 32)) & 1;
            Complex64::new(if bit == 1 { amp } else { -amp }, 0.0)
        })
    }

    /// Hash vector for `index`.
    pub fn hash_row(&self, index: u64) -> Result<CVec> {
        if index >= self.rows() {
            return Err(Error::IndexOutOfRange {
                index,
                rows: self.rows(),
            });
        }
        let wpr = self.words_per_row();
        let mut rng = self.keystream();
        rng.set_word_pos(index as u128 * wpr as u128);
        let words: Vec<u32> = (0..wpr).map(|_| rng.next_u32()).collect();
        Ok(self.row_from_words(&words))
    }

    /// Every row, read sequentially from one keystream. Only sensible for small `b_p`.
    pub fn materialize(&self) -> Result<Vec<CVec>> {
        if self.b_p > 20 {
            return Err(Error::invalid(
                "b_p",
                format!("refusing to materialize 2^{} rows", self.b_p),
            ));
        }
        let wpr = self.words_per_row();
        let mut rng = self.keystream();
        Ok((0..self.rows())
            .map(|_| {
                let words: Vec<u32> = (0..wpr).map(|_| rng.next_u32()).collect();
                self.row_from_words(&words)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SimRng;
    use rand::Rng;

    #[test]
    fn entries_have_fixed_magnitude() {
        let cb = HashCodebook::new(16, 4, 7).unwrap();
        for idx in [0, 1, 77, 65535] {
            let row = cb.hash_row(idx).unwrap();
            for z in row.iter() {
                assert!(z.re == 0.5 || z.re == -0.5);
                assert_eq!(z.im, 0.0);
            }
        }
    }

    #[test]
    fn rows_are_unit_norm_and_repeatable() {
        let cb = HashCodebook::new(16, 37, 99).unwrap();
        for idx in 0..200 {
            let a = cb.hash_row(idx).unwrap();
            assert!((a.norm_squared() - 1.0).abs() < 1e-12);
            assert_eq!(a, cb.hash_row(idx).unwrap());
        }
        let other = HashCodebook::new(16, 37, 100).unwrap();
        assert_ne!(cb.hash_row(3).unwrap(), other.hash_row(3).unwrap());
    }

    #[test]
    fn out_of_range_index() {
        let cb = HashCodebook::new(4, 8, 1).unwrap();
        assert!(cb.hash_row(15).is_ok());
        assert!(matches!(
            cb.hash_row(16),
            Err(Error::IndexOutOfRange {
                index: 16,
                rows: 16
            })
        ));
    }

    #[test]
    fn lazy_rows_match_eager_table() {
        for (b_p, l) in [(4, 1), (8, 32), (10, 33), (12, 64), (6, 100)] {
            let cb = HashCodebook::new(b_p, l, 0xfeed).unwrap();
            let table = cb.materialize().unwrap();
            assert_eq!(table.len() as u64, cb.rows());
            for (i, row) in table.iter().enumerate() {
                assert_eq!(
                    *row,
                    cb.hash_row(i as u64).unwrap(),
                    "b_p={b_p} l={l} row={i}"
                );
            }
        }
    }

    #[test]
    fn cross_correlation_statistics() {
        // E|<p_a, p_b>| for independent Rademacher rows is E|S_L|/L with S_L a
        // ±1 walk; for L = 64 that is C(64,32)·64/2^64 / 64 ≈ sqrt(2/(πL)).
        let l = 64;
        let cb = HashCodebook::new(20, l, 3).unwrap();
        let mut rng = SimRng::substream(3, 0, "pairs");
        let n = 10_000;
        let mut vals = Vec::with_capacity(n);
        for _ in 0..n {
            let a = rng.random_range(0..cb.rows());
            let mut b = rng.random_range(0..cb.rows());
            while b == a {
                b = rng.random_range(0..cb.rows());
            }
            let pa = cb.hash_row(a).unwrap();
            let pb = cb.hash_row(b).unwrap();
            vals.push(pa.dotc(&pb).re.abs());
        }
        let mean = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let limit = (2.0 / (std::f64::consts::PI * l as f64)).sqrt();
        // exact walk mean: C(L, L/2) / 2^L
        let exact = (1..=l / 2).fold(1.0, |acc, k| acc * (l / 2 + k) as f64 / k as f64 / 4.0);
        assert!((exact - limit).abs() < 1e-3);
        assert!(
            (mean - exact).abs() < 3.0 * se,
            "{mean} vs {exact} (se {se})"
        );
        assert!((mean - limit).abs() < 3.0 * se + (exact - limit).abs());
    }
}
