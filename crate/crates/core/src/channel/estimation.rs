use super::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::{complex_gaussian, ComplexMatrix, RngStream, C64};

/// Per-entry error variance for an estimation SNR in dB.
pub fn error_variance_from_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// `H + dH` with `dH` entries i.i.d. `CN(0, error_variance)`.
pub fn add_estimation_error(
    h: &ChannelRealization,
    error_variance: f64,
    rng: &mut RngStream,
) -> Result<ChannelRealization> {
    if !(error_variance >= 0.0) || !error_variance.is_finite() {
        return Err(Error::Parameter(format!(
            "error variance must be >= 0, got {error_variance}"
        )));
    }
    if error_variance == 0.0 {
        return Ok(h.clone());
    }
    let n = h.n_rx() * h.n_tx();
    h.try_map(|_, m| {
        let noise = ComplexMatrix::from_vec(h.n_rx(), h.n_tx(), complex_gaussian(rng, n, error_variance)?)?;
        m.add(&noise)
    })
}

/// Replaces each run of `group_size` consecutive subcarriers by its mean
/// matrix. A trailing short group averages over its own members.
pub fn prg_average(h: &ChannelRealization, group_size: usize) -> Result<ChannelRealization> {
    if group_size == 0 {
        return Err(Error::Parameter("PRG size must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(h.n_active());
    for group in h.matrices().chunks(group_size) {
        let mut mean = ComplexMatrix::zeros(h.n_rx(), h.n_tx());
        for m in group {
            for (a, b) in mean.as_mut_slice().iter_mut().zip(m.as_slice()) {
                *a += b;
            }
        }
        let inv = C64::new(1.0 / group.len() as f64, 0.0);
        let mean = mean.scale(inv);
        out.extend(std::iter::repeat_n(mean, group.len()));
    }
    ChannelRealization::new(out, h.metadata().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_channel, TdlProfile};

    fn sample(seed: u64, n_active: usize) -> ChannelRealization {
        let p = TdlProfile::exponential(12, 300e-9).unwrap();
        generate_channel(&p, 4, 2, n_active, &mut RngStream::new(seed, 0)).unwrap()
    }

    #[test]
    fn snr_to_variance() {
        assert!((error_variance_from_snr_db(5.0) - 0.316_227_766).abs() < 1e-9);
        assert_eq!(error_variance_from_snr_db(0.0), 1.0);
    }

    #[test]
    fn zero_variance_and_reproducibility() {
        let h = sample(1, 10);
        let same = add_estimation_error(&h, 0.0, &mut RngStream::new(5, 1)).unwrap();
        assert_eq!(same, h);
        let a = add_estimation_error(&h, 0.3, &mut RngStream::new(5, 1)).unwrap();
        let b = add_estimation_error(&h, 0.3, &mut RngStream::new(5, 1)).unwrap();
        assert_eq!(a, b);
        assert!(add_estimation_error(&h, -1.0, &mut RngStream::new(5, 1)).is_err());
    }

    #[test]
    fn empirical_error_power() {
        let h = sample(2, 12_500);
        let var = error_variance_from_snr_db(5.0);
        let e = add_estimation_error(&h, var, &mut RngStream::new(3, 3)).unwrap();
        let mut acc = 0.0;
        let mut count = 0;
        for (a, b) in e.matrices().iter().zip(h.matrices()) {
            acc += a.sub(b).unwrap().frobenius_norm_sqr();
            count += 8;
        }
        assert!(count >= 100_000);
        let got = acc / count as f64;
        assert!((got - var).abs() / var < 0.01, "{got}");
    }

    #[test]
    fn prg_identity_and_constant_groups() {
        let h = sample(4, 50);
        assert_eq!(prg_average(&h, 1).unwrap(), h);
        assert!(prg_average(&h, 0).is_err());
        let g = prg_average(&h, 24).unwrap();
        for (gi, group) in h.matrices().chunks(24).enumerate() {
            let mut oracle = ComplexMatrix::zeros(2, 4);
            for r in 0..2 {
                for t in 0..4 {
                    let s: C64 = group.iter().map(|m| m[(r, t)]).sum();
                    oracle[(r, t)] = s / group.len() as f64;
                }
            }
            for i in 0..group.len() {
                assert!(g.matrix(gi * 24 + i).distance(&oracle) < 1e-12);
            }
        }
        let twice = prg_average(&g, 24).unwrap();
        for (a, b) in twice.matrices().iter().zip(g.matrices()) {
            assert!(a.distance(b) < 1e-12);
        }
    }

    #[test]
    fn prg_keeps_identical_pairs() {
        let h = sample(5, 1);
        let pairs = ChannelRealization::flat(h.matrix(0).clone(), 6).unwrap();
        let avg = prg_average(&pairs, 2).unwrap();
        for (a, b) in avg.matrices().iter().zip(pairs.matrices()) {
            assert!(a.distance(b) < 1e-15);
        }
    }
}
