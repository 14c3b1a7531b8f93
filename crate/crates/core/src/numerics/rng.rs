//! Reproducible pseudo-random substreams.
//!
//! Streams are keyed by (master seed, stream index, substream index); the
//! stream index enumerates outer market realizations and the substream
//! index enumerates firms within one realization. Identical indices always
//! replay the identical draw sequence, so parallel and serial runs agree
//! bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u32,
    substream_index: u32,
    counter: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u32, substream_index: u32) -> Self {
        let mut key = [0u8; 32];
        let mut state = master_seed;
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(((stream_index as u64) << 32) | substream_index as u64);
        Self {
            master_seed,
            stream_index,
            substream_index,
            counter: 0,
            rng,
        }
    }

    /// A sibling stream for the same realization with a different substream
    /// index, starting from draw zero.
    pub fn substream(&self, substream_index: u32) -> Self {
        Self::new(self.master_seed, self.stream_index, substream_index)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u32 {
        self.stream_index
    }

    pub fn substream_index(&self) -> u32 {
        self.substream_index
    }

    /// Number of variates drawn so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn draw_standard_normal(&mut self) -> f64 {
        self.counter += 1;
        self.rng.sample(StandardNormal)
    }

    pub fn draw_uniform(&mut self) -> f64 {
        self.counter += 1;
        self.rng.random()
    }

    pub fn draw_poisson(&mut self, mean: f64) -> Result<u64> {
        if !(mean >= 0.0) || !mean.is_finite() {
            return Err(Error::Domain(format!(
                "poisson mean must be finite and nonnegative, got {mean}"
            )));
        }
        if mean == 0.0 {
            return Ok(0);
        }
        self.counter += 1;
        let dist = Poisson::new(mean)
            .map_err(|e| Error::Domain(format!("poisson mean {mean}: {e}")))?;
        let draw: f64 = dist.sample(&mut self.rng);
        Ok(draw as u64)
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_identical() {
        let mut a = RngStream::new(42, 7, 3);
        let mut b = RngStream::new(42, 7, 3);
        for _ in 0..100 {
            assert_eq!(a.draw_standard_normal(), b.draw_standard_normal());
        }
        assert_eq!(a.counter(), 100);
    }

    #[test]
    fn distinct_substreams_differ() {
        let mut a = RngStream::new(42, 7, 0);
        let mut b = RngStream::new(42, 7, 1);
        let va: Vec<f64> = (0..16).map(|_| a.draw_standard_normal()).collect();
        let vb: Vec<f64> = (0..16).map(|_| b.draw_standard_normal()).collect();
        assert_ne!(va, vb);
    }

    #[test]
    fn normal_sample_mean() {
        let n = 1_000_000;
        let mut stream = RngStream::new(1, 0, 0);
        let mean: f64 = (0..n).map(|_| stream.draw_standard_normal()).sum::<f64>() / n as f64;
        // CLT bound 3/sqrt(n)
        assert!(mean.abs() < 3e-3, "mean = {mean}");
    }

    #[test]
    fn poisson_small_mean_frequency() {
        let n = 1_000_000u64;
        let mean = 2e-5;
        let mut stream = RngStream::new(2, 0, 0);
        let nonzero = (0..n)
            .filter(|_| stream.draw_poisson(mean).unwrap() > 0)
            .count() as f64;
        let freq = nonzero / n as f64;
        let bound = 3.0 * (mean / n as f64).sqrt();
        assert!((freq - mean).abs() < bound, "freq = {freq}");
    }

    #[test]
    fn poisson_zero_mean_is_zero() {
        let mut stream = RngStream::new(3, 0, 0);
        assert_eq!(stream.draw_poisson(0.0).unwrap(), 0);
        assert_eq!(stream.counter(), 0);
    }

    #[test]
    fn poisson_rejects_bad_mean() {
        let mut stream = RngStream::new(3, 0, 0);
        assert!(stream.draw_poisson(-1.0).is_err());
        assert!(stream.draw_poisson(f64::NAN).is_err());
    }

    #[test]
    fn substream_pairwise_correlation() {
        let n = 100_000;
        let mut a = RngStream::new(9, 5, 0);
        let mut b = RngStream::new(9, 5, 1);
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        let mut syy = 0.0;
        for _ in 0..n {
            let x = a.draw_standard_normal();
            let y = b.draw_standard_normal();
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
        let rho = sxy / (sxx.sqrt() * syy.sqrt());
        assert!(rho.abs() < 4.0 / (n as f64).sqrt(), "rho = {rho}");
    }
}
