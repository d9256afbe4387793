use std::sync::Arc;

use rayon::prelude::*;

use super::SymbolGrid;
use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::{solve, ComplexMatrix, C64};
use crate::waveform::{ResourceGrid, SubcarrierLayout};

pub const DEFAULT_RZF_ALPHA: f64 = 0.001;

/// Per-subcarrier precoding matrices, `n_tx x n_layers`.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    w: Vec<ComplexMatrix>,
    alpha: f64,
}

impl Precoder {
    pub fn new(w: Vec<ComplexMatrix>, alpha: f64) -> Result<Self> {
        let shape = w
            .first()
            .ok_or_else(|| Error::Sizing("precoder needs at least one subcarrier".into()))?
            .shape();
        if w.iter().any(|m| m.shape() != shape || !m.is_finite()) {
            return Err(Error::Validation("precoder matrices differ in shape or are not finite".into()));
        }
        Ok(Self { w, alpha })
    }

    pub fn n_tx(&self) -> usize {
        self.w[0].rows()
    }

    pub fn n_layers(&self) -> usize {
        self.w[0].cols()
    }

    pub fn n_active(&self) -> usize {
        self.w.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn matrix(&self, i: usize) -> &ComplexMatrix {
        &self.w[i]
    }

    /// Keeps the first `n` layer columns.
    pub fn first_layers(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.n_layers() {
            return Err(Error::Parameter(format!(
                "cannot keep {n} of {} layers",
                self.n_layers()
            )));
        }
        let w = self
            .w
            .iter()
            .map(|m| ComplexMatrix::from_fn(m.rows(), n, |r, c| m[(r, c)]))
            .collect();
        Self::new(w, self.alpha)
    }
}

/// Un-normalised RZF, `Hhat^H (Hhat Hhat^H + alpha I)^{-1}`, one layer per
/// receive antenna.
pub fn rzf_precoder(h_est: &ChannelRealization, alpha: f64) -> Result<Precoder> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Parameter(format!("alpha must be >= 0, got {alpha}")));
    }
    if h_est.n_rx() > h_est.n_tx() {
        return Err(Error::Sizing(format!(
            "RZF needs n_rx <= n_tx, got {}x{}",
            h_est.n_rx(),
            h_est.n_tx()
        )));
    }
    let w = h_est
        .matrices()
        .par_iter()
        .map(|h| {
            let hh = h.adjoint();
            let mut gram = h.matmul(&hh)?;
            for d in 0..gram.rows() {
                gram[(d, d)] += C64::new(alpha, 0.0);
            }
            // W = Hh G^{-1}, i.e. W^H = G^{-1} H since G is Hermitian
            Ok(solve(&gram, h)?.adjoint())
        })
        .collect::<Result<Vec<_>>>()?;
    Precoder::new(w, alpha)
}

/// `X[:, k] = W[k] S[:, k]` on the active set, zero on guard bins.
pub fn precode(s: &SymbolGrid, w: &Precoder, layout: Arc<SubcarrierLayout>) -> Result<ResourceGrid> {
    if s.n_active() != w.n_active()
        || s.n_layers() != w.n_layers()
        || layout.n_active() != s.n_active()
    {
        return Err(Error::Parameter(format!(
            "symbols {}x{}, precoder {} layers on {} subcarriers and {} active bins do not agree",
            s.n_layers(),
            s.n_active(),
            w.n_layers(),
            w.n_active(),
            layout.n_active()
        )));
    }
    let mut grid = ResourceGrid::zeros(layout.clone(), w.n_tx());
    for (i, &k) in layout.active().iter().enumerate() {
        let x = w.matrix(i).matvec(&s.column(i))?;
        grid.data_mut().set_column(k, &x);
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_channel, ChannelMetadata, TdlProfile};
    use crate::mimo::generate_symbols;
    use crate::numerics::RngStream;

    #[test]
    fn identity_and_scalar_channels() {
        let h = ChannelRealization::flat(ComplexMatrix::identity(3), 2).unwrap();
        let w = rzf_precoder(&h, 0.001).unwrap();
        let want = ComplexMatrix::identity(3).scale_real(1.0 / 1.001);
        assert!(w.matrix(0).distance(&want) < 1e-14);

        let hs = C64::new(0.6, -1.3);
        let h = ChannelRealization::new(
            vec![ComplexMatrix::from_vec(1, 1, vec![hs]).unwrap()],
            ChannelMetadata::default(),
        )
        .unwrap();
        let w = rzf_precoder(&h, 0.2).unwrap();
        let want = hs.conj() / (hs.norm_sqr() + 0.2);
        assert!((w.matrix(0)[(0, 0)] - want).norm() < 1e-14);
    }

    #[test]
    fn singular_without_regularisation_fails() {
        let h = ChannelRealization::flat(ComplexMatrix::zeros(2, 4), 1).unwrap();
        assert!(matches!(rzf_precoder(&h, 0.0), Err(Error::SolverFailure(_))));
    }

    #[test]
    fn large_alpha_is_matched_filter() {
        let p = TdlProfile::exponential(4, 100e-9).unwrap();
        let h = generate_channel(&p, 8, 2, 3, &mut RngStream::new(2, 0)).unwrap();
        for i in 0..3 {
            let hk = h.matrix(i);
            let g = hk.matmul(&hk.adjoint()).unwrap().frobenius_norm();
            let alpha = 100.0 * g;
            let w = rzf_precoder(&h, alpha).unwrap();
            let mf = hk.adjoint().scale_real(1.0 / alpha);
            assert!(w.matrix(i).distance(&mf) / mf.frobenius_norm() < 0.01);
        }
    }

    #[test]
    fn precode_against_direct_product() {
        let layout = Arc::new(SubcarrierLayout::centered(64, 20).unwrap());
        let p = TdlProfile::exponential(6, 300e-9).unwrap();
        let mut rng = RngStream::new(5, 0);
        let h = generate_channel(&p, 4, 2, 20, &mut rng).unwrap();
        let w = rzf_precoder(&h, 0.001).unwrap();
        let s = generate_symbols(2, 20, 4, &mut rng).unwrap();
        let x = precode(&s, &w, layout.clone()).unwrap();
        for (i, &k) in layout.active().iter().enumerate() {
            for t in 0..4 {
                let mut acc = C64::default();
                for l in 0..2 {
                    acc += w.matrix(i)[(t, l)] * s.data()[(l, i)];
                }
                assert!((x.data()[(t, k)] - acc).norm() < 1e-14);
            }
        }
        for &g in layout.guard() {
            assert!(x.data().column(g).iter().all(|z| *z == C64::default()));
        }
        let zero = SymbolGrid::new(ComplexMatrix::zeros(2, 20), 4);
        assert_eq!(precode(&zero, &w, layout.clone()).unwrap().data().frobenius_norm(), 0.0);
        assert!(precode(&s, &w.first_layers(1).unwrap(), layout).is_err());
    }

    #[test]
    fn identity_precoder_carries_symbols() {
        let layout = Arc::new(SubcarrierLayout::centered(16, 4).unwrap());
        let w = Precoder::new(vec![ComplexMatrix::identity(2); 4], 0.0).unwrap();
        let s = generate_symbols(2, 4, 2, &mut RngStream::new(1, 1)).unwrap();
        let x = precode(&s, &w, layout.clone()).unwrap();
        for (i, &k) in layout.active().iter().enumerate() {
            assert_eq!(x.data().column(k), s.column(i));
        }
    }
}
