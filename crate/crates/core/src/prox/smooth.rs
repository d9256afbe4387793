use crate::channel::MitigationWeights;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64};
use crate::waveform::{ResourceGrid, SubcarrierLayout};

fn check(
    xbar: &ComplexMatrix,
    x: &ComplexMatrix,
    layout: &SubcarrierLayout,
    q: &MitigationWeights,
) -> Result<()> {
    if xbar.shape() != x.shape()
        || x.cols() != layout.total_bins()
        || q.n_active() != layout.n_active()
        || q.n_tx() != x.rows()
    {
        return Err(Error::Sizing(
            "iterate, anchor, layout and weights disagree in shape".into(),
        ));
    }
    Ok(())
}

/// Gradient of the distortion penalty into `out` (same shape as `x`):
/// `Q[k] d[:,k] + zeta d[:,k]` on active bins and `zeta d[:,k]` on guard bins,
/// with `d = xbar - x`.
pub fn grad_h_into(
    xbar: &ComplexMatrix,
    x: &ComplexMatrix,
    layout: &SubcarrierLayout,
    q: &MitigationWeights,
    zeta: f64,
    out: &mut ComplexMatrix,
) {
    let n_tx = x.rows();
    let xs = x.as_slice();
    let xb = xbar.as_slice();
    let o = out.as_mut_slice();
    for ((o, a), b) in o.iter_mut().zip(xb).zip(xs) {
        *o = (a - b) * zeta;
    }
    let cols = x.cols();
    let mut d = vec![C64::default(); n_tx];
    for (i, &k) in layout.active().iter().enumerate() {
        for (t, dt) in d.iter_mut().enumerate() {
            *dt = xb[t * cols + k] - xs[t * cols + k];
        }
        let qk = q.q(i).as_slice();
        for r in 0..n_tx {
            let row = &qk[r * n_tx..(r + 1) * n_tx];
            let acc: C64 = row.iter().zip(&d).map(|(a, b)| a * b).sum();
            o[r * cols + k] += acc;
        }
    }
}

pub fn grad_h(
    xbar: &ResourceGrid,
    x: &ResourceGrid,
    q: &MitigationWeights,
    zeta: f64,
) -> Result<ResourceGrid> {
    check(xbar.data(), x.data(), x.layout(), q)?;
    let mut out = ComplexMatrix::zeros(x.n_tx(), x.total_bins());
    grad_h_into(xbar.data(), x.data(), x.layout(), q, zeta, &mut out);
    x.with_data(out)
}

/// `sum_k d[:,k]^H Q[k] d[:,k] + zeta ||d||^2` with `d = xbar - x`.
pub fn objective_h_data(
    xbar: &ComplexMatrix,
    x: &ComplexMatrix,
    layout: &SubcarrierLayout,
    q: &MitigationWeights,
    zeta: f64,
) -> f64 {
    let d = xbar.sub(x).expect("shapes checked by caller");
    let mut total = zeta * d.frobenius_norm_sqr();
    for (i, &k) in layout.active().iter().enumerate() {
        let dk = d.column(k);
        let qd = q.q(i).matvec(&dk).expect("weights sized to antennas");
        total += dk.iter().zip(&qd).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
    }
    total
}

pub fn objective_h(
    xbar: &ResourceGrid,
    x: &ResourceGrid,
    q: &MitigationWeights,
    zeta: f64,
) -> Result<f64> {
    check(xbar.data(), x.data(), x.layout(), q)?;
    Ok(objective_h_data(xbar.data(), x.data(), x.layout(), q, zeta))
}
