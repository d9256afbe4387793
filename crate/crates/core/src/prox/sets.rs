use serde::{Deserialize, Serialize};

use super::proj_linf_ball_in_place;
use crate::error::{Error, Result};
use crate::numerics::{db_to_linear, ComplexMatrix, UnitaryFft, C64};
use crate::waveform::{ResourceGrid, SubcarrierLayout};

/// Per-antenna time-domain peak bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaprSetSpec {
    pub gamma_par_db: Vec<f64>,
    pub radius: Vec<f64>,
}

/// Per-antenna bound on guard-band energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AclrSetSpec {
    pub psi_aclr_db: Vec<f64>,
    pub radius: Vec<f64>,
}

fn check_targets(targets: &[f64], n_tx: usize, what: &str) -> Result<()> {
    if targets.len() != n_tx {
        return Err(Error::Parameter(format!(
            "{} {what} targets for {n_tx} antennas",
            targets.len()
        )));
    }
    Ok(())
}

/// `sqrt(gamma * mean time-domain power)` per antenna. With a unitary
/// transform the mean power is the row energy over the bin count.
pub fn papr_radii(reference: &ComplexMatrix, gamma_par_db: &[f64]) -> Result<PaprSetSpec> {
    check_targets(gamma_par_db, reference.rows(), "PAPR")?;
    let n = reference.cols() as f64;
    let mut radius = Vec::with_capacity(reference.rows());
    for (j, g) in gamma_par_db.iter().enumerate() {
        let e: f64 = reference.row(j).iter().map(|z| z.norm_sqr()).sum();
        if e == 0.0 {
            return Err(Error::UndefinedMetric {
                metric: "papr_radius",
                index: j,
            });
        }
        radius.push((db_to_linear(*g) * e / n).sqrt());
    }
    Ok(PaprSetSpec {
        gamma_par_db: gamma_par_db.to_vec(),
        radius,
    })
}

/// `sqrt(psi) * ||reference[j, active]||` per antenna.
pub fn aclr_radii(
    reference: &ComplexMatrix,
    layout: &SubcarrierLayout,
    psi_aclr_db: &[f64],
) -> Result<AclrSetSpec> {
    check_targets(psi_aclr_db, reference.rows(), "ACLR")?;
    let mut radius = Vec::with_capacity(reference.rows());
    for (j, p) in psi_aclr_db.iter().enumerate() {
        let row = reference.row(j);
        let e: f64 = layout.active().iter().map(|&k| row[k].norm_sqr()).sum();
        if e == 0.0 {
            return Err(Error::UndefinedMetric {
                metric: "aclr_radius",
                index: j,
            });
        }
        radius.push((db_to_linear(*p) * e).sqrt());
    }
    Ok(AclrSetSpec {
        psi_aclr_db: psi_aclr_db.to_vec(),
        radius,
    })
}

/// Both radii from one reference grid.
pub fn update_set_radii(
    reference: &ResourceGrid,
    gamma_par_db: &[f64],
    psi_aclr_db: &[f64],
) -> Result<(PaprSetSpec, AclrSetSpec)> {
    Ok((
        papr_radii(reference.data(), gamma_par_db)?,
        aclr_radii(reference.data(), reference.layout(), psi_aclr_db)?,
    ))
}

/// Clips every antenna row in the time domain and maps it back, in place.
/// `buf` must have the FFT length.
pub fn proj_papr_in_place(
    data: &mut ComplexMatrix,
    radius: &[f64],
    fft: &UnitaryFft,
    buf: &mut [C64],
) {
    for (j, &r) in radius.iter().enumerate() {
        let row = data.row_mut(j);
        buf.copy_from_slice(row);
        fft.inverse(buf);
        let r2 = r * r;
        if buf.iter().all(|z| z.norm_sqr() <= r2) {
            continue;
        }
        proj_linf_ball_in_place(buf, r);
        fft.forward(buf);
        row.copy_from_slice(buf);
    }
}

/// Scales each antenna's guard bins into the ball of its radius, in place.
pub fn proj_aclr_in_place(data: &mut ComplexMatrix, layout: &SubcarrierLayout, radius: &[f64]) {
    for (j, &r) in radius.iter().enumerate() {
        let row = data.row_mut(j);
        let e: f64 = layout.guard().iter().map(|&k| row[k].norm_sqr()).sum();
        let norm = e.sqrt();
        if norm <= r {
            continue;
        }
        let s = r / norm;
        for &k in layout.guard() {
            row[k] *= s;
        }
    }
}

fn check_radii(n: usize, grid: &ResourceGrid) -> Result<()> {
    if n != grid.n_tx() {
        return Err(Error::Parameter(format!(
            "{n} radii for {} antennas",
            grid.n_tx()
        )));
    }
    Ok(())
}

pub fn proj_papr_set(grid: &ResourceGrid, spec: &PaprSetSpec) -> Result<ResourceGrid> {
    check_radii(spec.radius.len(), grid)?;
    let fft = UnitaryFft::new(grid.total_bins())?;
    let mut buf = vec![C64::default(); grid.total_bins()];
    let mut out = grid.clone();
    proj_papr_in_place(out.data_mut(), &spec.radius, &fft, &mut buf);
    Ok(out)
}

pub fn proj_aclr_set(grid: &ResourceGrid, spec: &AclrSetSpec) -> Result<ResourceGrid> {
    check_radii(spec.radius.len(), grid)?;
    let mut out = grid.clone();
    let layout = grid.layout().clone();
    proj_aclr_in_place(out.data_mut(), &layout, &spec.radius);
    Ok(out)
}
