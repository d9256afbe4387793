use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::C64;
use crate::error::{Error, Result};

/// Seeded, splittable random stream.
///
/// Backed by ChaCha20 with the 64-bit stream selector set to `stream_id`, so
/// every `(seed, stream_id)` pair names an independent, platform-stable
/// sequence. Monte-Carlo drops each take their own stream id.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub const ALGORITHM: &'static str = "chacha20";

    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn algorithm_name(&self) -> &'static str {
        Self::ALGORITHM
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn below(&mut self, n: u32) -> u32 {
        self.inner.random_range(0..n)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Circularly-symmetric complex Gaussian samples, `CN(0, variance)`.
pub fn complex_gaussian(rng: &mut RngStream, n: usize, variance: f64) -> Result<Vec<C64>> {
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(Error::Parameter(format!("variance must be >= 0, got {variance}")));
    }
    let s = (variance / 2.0).sqrt();
    Ok((0..n)
        .map(|_| {
            let re = rng.standard_normal();
            let im = rng.standard_normal();
            C64::new(re * s, im * s)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variance_is_zero() {
        let mut rng = RngStream::new(1, 0);
        assert!(complex_gaussian(&mut rng, 16, 0.0)
            .unwrap()
            .iter()
            .all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn same_stream_same_samples() {
        let a = complex_gaussian(&mut RngStream::new(42, 3), 64, 1.0).unwrap();
        let b = complex_gaussian(&mut RngStream::new(42, 3), 64, 1.0).unwrap();
        assert_eq!(a, b);
        let c = complex_gaussian(&mut RngStream::new(42, 4), 64, 1.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn negative_variance_rejected() {
        let mut rng = RngStream::new(1, 0);
        assert!(matches!(
            complex_gaussian(&mut rng, 4, -1.0),
            Err(Error::Parameter(_))
        ));
        assert!(complex_gaussian(&mut rng, 4, f64::NAN).is_err());
    }

    #[test]
    fn empirical_variance_million_samples() {
        let mut rng = RngStream::new(2024, 9);
        let x = complex_gaussian(&mut rng, 1_000_000, 1.0).unwrap();
        let n = x.len() as f64;
        let var: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        let var_re: f64 = x.iter().map(|z| z.re * z.re).sum::<f64>() / n;
        let var_im: f64 = x.iter().map(|z| z.im * z.im).sum::<f64>() / n;
        assert!((var - 1.0).abs() < 0.01, "{var}");
        assert!((var_re - 0.5).abs() < 0.01 && (var_im - 0.5).abs() < 0.01);
        // circular symmetry: E[z^2] ~ 0
        let pseudo: C64 = x.iter().map(|z| z * z).sum::<C64>() / n;
        assert!(pseudo.norm() < 0.01);
    }

    #[test]
    fn independent_streams_uncorrelated() {
        let a = complex_gaussian(&mut RngStream::new(5, 0), 200_000, 1.0).unwrap();
        let b = complex_gaussian(&mut RngStream::new(5, 1), 200_000, 1.0).unwrap();
        let corr: C64 = a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum::<C64>() / a.len() as f64;
        assert!(corr.norm() < 0.01);
    }
}
