use super::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_sqrt, ComplexMatrix, C64};

/// Exponential correlation, entry `(p, q) = a^|p-q|`.
pub fn exp_correlation_matrix(n: usize, a: f64) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Parameter(format!("correlation coefficient {a} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::Sizing("correlation matrix needs n >= 1".into()));
    }
    Ok(ComplexMatrix::from_fn(n, n, |p, q| {
        C64::new(a.powi(p.abs_diff(q) as i32), 0.0)
    }))
}

/// Kronecker model `R_rx^{1/2} H (R_tx^{1/2})^T` on every subcarrier.
pub fn apply_spatial_correlation(
    h: &ChannelRealization,
    r_tx: &ComplexMatrix,
    r_rx: &ComplexMatrix,
) -> Result<ChannelRealization> {
    if r_tx.shape() != (h.n_tx(), h.n_tx()) || r_rx.shape() != (h.n_rx(), h.n_rx()) {
        return Err(Error::Parameter(format!(
            "correlation shapes {:?}/{:?} do not fit a {}x{} channel",
            r_tx.shape(),
            r_rx.shape(),
            h.n_rx(),
            h.n_tx()
        )));
    }
    let tx_t = hermitian_sqrt(r_tx)?.transpose();
    let rx = hermitian_sqrt(r_rx)?;
    h.try_map(|_, m| rx.matmul(m)?.matmul(&tx_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_channel, TdlProfile};
    use crate::numerics::{hermitian_eigen, RngStream};

    fn white(n_tx: usize, n_rx: usize, n_active: usize, rng: &mut RngStream) -> ChannelRealization {
        let p = TdlProfile::exponential(1, 0.0).unwrap();
        generate_channel(&p, n_tx, n_rx, n_active, rng).unwrap()
    }

    #[test]
    fn exp_matrix_limits() {
        assert_eq!(exp_correlation_matrix(4, 0.0).unwrap(), ComplexMatrix::identity(4));
        let ones = exp_correlation_matrix(3, 1.0).unwrap();
        assert!(ones.as_slice().iter().all(|z| *z == C64::new(1.0, 0.0)));
        let (vals, _) = hermitian_eigen(&exp_correlation_matrix(8, 0.9).unwrap()).unwrap();
        assert!(vals.iter().all(|v| *v >= 0.0));
        assert!(exp_correlation_matrix(2, 1.5).is_err());
    }

    #[test]
    fn identity_correlation_is_noop() {
        let h = white(4, 2, 6, &mut RngStream::new(1, 0));
        let c = apply_spatial_correlation(&h, &ComplexMatrix::identity(4), &ComplexMatrix::identity(2))
            .unwrap();
        for (a, b) in c.matrices().iter().zip(h.matrices()) {
            assert!(a.distance(b) < 1e-12);
        }
        assert!(apply_spatial_correlation(&h, &ComplexMatrix::identity(3), &ComplexMatrix::identity(2))
            .is_err());
    }

    #[test]
    fn rank_one_tx_correlation_equalises_columns() {
        let h = white(4, 2, 3, &mut RngStream::new(2, 0));
        let ones = exp_correlation_matrix(4, 1.0).unwrap();
        let c = apply_spatial_correlation(&h, &ones, &ComplexMatrix::identity(2)).unwrap();
        for m in c.matrices() {
            for r in 0..2 {
                for t in 1..4 {
                    assert!((m[(r, t)] - m[(r, 0)]).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn empirical_tx_correlation_matches() {
        let n_tx = 4;
        let r_tx = exp_correlation_matrix(n_tx, 0.7).unwrap();
        let r_rx = exp_correlation_matrix(2, 0.3).unwrap();
        let mut rng = RngStream::new(77, 0);
        let drops = 10_000;
        let mut acc = ComplexMatrix::zeros(n_tx, n_tx);
        let mut energy = 0.0;
        for _ in 0..drops {
            let h = white(n_tx, 2, 1, &mut rng);
            let c = apply_spatial_correlation(&h, &r_tx, &r_rx).unwrap();
            let m = c.matrix(0);
            energy += m.frobenius_norm_sqr();
            for r in 0..2 {
                for p in 0..n_tx {
                    for q in 0..n_tx {
                        acc[(p, q)] += m[(r, p)] * m[(r, q)].conj();
                    }
                }
            }
        }
        let est = acc.scale_real(1.0 / (2 * drops) as f64);
        for p in 0..n_tx {
            for q in 0..n_tx {
                assert!((est[(p, q)] - r_tx[(p, q)]).norm() < 0.02, "{p},{q}");
            }
        }
        let mean = energy / (drops * 2 * n_tx) as f64;
        assert!((mean - 1.0).abs() < 0.02);
    }
}
