use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::{lambda_max_psd, ComplexMatrix, C64};

/// Per-subcarrier Hermitian PSD weights of the distortion penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationWeights {
    q: Vec<ComplexMatrix>,
    nu: f64,
    lambda: Vec<f64>,
}

fn check_lambda(lambda: &[f64], n_active: usize) -> Result<()> {
    if lambda.len() != n_active {
        return Err(Error::Parameter(format!(
            "{} multipliers for {n_active} subcarriers",
            lambda.len()
        )));
    }
    if let Some(l) = lambda.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
        return Err(Error::Parameter(format!("multiplier must be >= 0, got {l}")));
    }
    Ok(())
}

impl MitigationWeights {
    /// Channel-agnostic weights `Q[k] = lambda[k] I`.
    pub fn scaled_identity(n_tx: usize, lambda: &[f64]) -> Result<Self> {
        check_lambda(lambda, lambda.len())?;
        if lambda.is_empty() || n_tx == 0 {
            return Err(Error::Sizing("weights need at least one subcarrier and antenna".into()));
        }
        let q = lambda
            .iter()
            .map(|l| ComplexMatrix::identity(n_tx).scale_real(*l))
            .collect();
        Ok(Self {
            q,
            nu: 0.0,
            lambda: lambda.to_vec(),
        })
    }

    /// All-zero weights: the smooth term then only carries `zeta`.
    pub fn zeros(n_tx: usize, n_active: usize) -> Result<Self> {
        Self::scaled_identity(n_tx, &vec![0.0; n_active])
    }

    pub fn n_tx(&self) -> usize {
        self.q[0].rows()
    }

    pub fn n_active(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self, i: usize) -> &ComplexMatrix {
        &self.q[i]
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Largest eigenvalue over all subcarriers.
    pub fn lambda_max(&self) -> f64 {
        self.q
            .par_iter()
            .map(|q| lambda_max_psd(q, 500))
            .reduce(|| 0.0, f64::max)
    }

    /// Rescales every multiplier so the largest eigenvalue becomes `target`.
    pub fn normalized(&self, target: f64) -> Self {
        let top = self.lambda_max();
        if top == 0.0 {
            return self.clone();
        }
        let s = target / top;
        Self {
            q: self.q.iter().map(|q| q.scale_real(s)).collect(),
            nu: self.nu,
            lambda: self.lambda.iter().map(|l| l * s).collect(),
        }
    }
}

/// `Q[k] = lambda[k] (Hhat[k]^H Hhat[k] + nu I)`.
pub fn build_q(h_est: &ChannelRealization, nu: f64, lambda: &[f64]) -> Result<MitigationWeights> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::Parameter(format!("nu must be >= 0, got {nu}")));
    }
    check_lambda(lambda, h_est.n_active())?;
    let q = h_est
        .matrices()
        .par_iter()
        .zip(lambda)
        .map(|(h, l)| {
            let mut g = h.adjoint().matmul(h)?;
            for d in 0..g.rows() {
                g[(d, d)] += C64::new(nu, 0.0);
            }
            // enforce exact Hermitian symmetry against round-off
            let n = g.rows();
            let sym = ComplexMatrix::from_fn(n, n, |r, c| (g[(r, c)] + g[(c, r)].conj()) * 0.5);
            Ok(sym.scale_real(*l))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MitigationWeights {
        q,
        nu,
        lambda: lambda.to_vec(),
    })
}
