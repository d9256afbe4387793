use super::problem::dist;
use super::{Observer, ResidualTrace, SolveOutput, SolverConfig, SolverState};
use crate::error::{Error, Result};
use crate::numerics::{db_to_linear, UnitaryFft, C64};
use crate::prox::{aclr_radii, papr_radii, proj_linf_ball_in_place};
use crate::waveform::ResourceGrid;

/// Clip amplitude `sqrt(gamma * mean power)` of one antenna's samples.
pub fn icf_clip_level(samples: &[C64], gamma_par_db: f64) -> f64 {
    let mean = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / samples.len() as f64;
    (db_to_linear(gamma_par_db) * mean).sqrt()
}

/// Iterative clipping and filtering: clip each antenna's time signal at its
/// current clip level, return to frequency and zero the guard bins.
pub fn icf_run(x0: &ResourceGrid, gamma_par_db: f64, iters: usize) -> Result<ResourceGrid> {
    icf_iterate(x0, gamma_par_db, iters, &mut |_, _, _| {}).map(|(g, _)| g)
}

/// Per-iteration callback: `(iteration, grid, (removed, step))`.
type IterHook<'a> = dyn FnMut(usize, &ResourceGrid, (f64, f64)) + 'a;

fn icf_iterate(
    x0: &ResourceGrid,
    gamma_par_db: f64,
    iters: usize,
    on_iter: &mut IterHook<'_>,
) -> Result<(ResourceGrid, ResidualTrace)> {
    if iters == 0 {
        return Err(Error::Parameter("ICF needs at least one iteration".into()));
    }
    let fft = UnitaryFft::new(x0.total_bins())?;
    let mut buf = vec![C64::default(); x0.total_bins()];
    let mut cur = x0.clone();
    let mut trace = ResidualTrace::default();
    for it in 1..=iters {
        let prev = cur.data().clone();
        let mut removed = 0.0;
        for j in 0..cur.n_tx() {
            let row = cur.data_mut().row_mut(j);
            buf.copy_from_slice(row);
            fft.inverse(&mut buf);
            let a = icf_clip_level(&buf, gamma_par_db);
            proj_linf_ball_in_place(&mut buf, a);
            fft.forward(&mut buf);
            row.copy_from_slice(&buf);
        }
        let layout = cur.layout().clone();
        for j in 0..cur.n_tx() {
            let row = cur.data_mut().row_mut(j);
            for &k in layout.guard() {
                removed += row[k].norm_sqr();
                row[k] = C64::default();
            }
        }
        let res = (removed.sqrt(), dist(cur.data(), &prev));
        trace.primal.push(res.0);
        trace.dual.push(res.1);
        on_iter(it, &cur, res);
    }
    Ok((cur, trace))
}

/// ICF behind the common solver interface. `primal` records the out-of-band
/// energy removed by the filter, `dual` the step between iterates.
pub(crate) fn run_traced(
    x0: &ResourceGrid,
    cfg: &SolverConfig,
    mut observer: Option<&mut Observer<'_>>,
) -> Result<SolveOutput> {
    cfg.validate()?;
    let mut snapshots = Vec::new();
    let every = cfg.snapshot_every;
    let (out, mut trace) = icf_iterate(x0, cfg.gamma_par_db, cfg.max_iters, &mut |it, g, _| {
        if let Some(obs) = observer.as_deref_mut() {
            if every > 0 && (it % every == 0 || it == cfg.max_iters) {
                if let Some(s) = obs(it, g.data()) {
                    snapshots.push(s);
                }
            }
        }
    })?;
    trace.snapshots = snapshots;
    let n = x0.n_tx();
    let papr_spec = papr_radii(out.data(), &vec![cfg.gamma_par_db; n])?;
    let aclr_spec = aclr_radii(out.data(), out.layout(), &vec![cfg.psi_aclr_db; n])?;
    let zero = ResourceGrid::zeros(out.layout().clone(), n);
    Ok(SolveOutput {
        solution: out.clone(),
        state: SolverState {
            xbar: out.clone(),
            zbar: out,
            lambda: zero,
            iter: cfg.max_iters,
            residuals: trace,
        },
        papr_spec,
        aclr_spec,
        warnings: Vec::new(),
        stopped_early: false,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::numerics::ComplexMatrix;
    use crate::waveform::{to_time, SubcarrierLayout};

    #[test]
    fn low_peak_signal_unchanged() {
        let layout = Arc::new(SubcarrierLayout::centered(32, 1).unwrap());
        let mut g = ResourceGrid::zeros(layout, 1);
        g.data_mut()[(0, 0)] = C64::new(1.0, 0.0);
        let out = icf_run(&g, 4.0, 3).unwrap();
        assert!(out.data().distance(g.data()) < 1e-14);
    }

    #[test]
    fn clip_level_caps_large_sample() {
        let mut s = vec![C64::new(0.1, 0.0); 64];
        let a0 = icf_clip_level(&s, 0.0);
        s[5] = C64::new(0.0, 2.0 * a0);
        let a = icf_clip_level(&s, 0.0);
        let mut c = s.clone();
        proj_linf_ball_in_place(&mut c, a);
        assert!((c[5].norm() - a).abs() < 1e-15);
        assert!((c[5].arg() - s[5].arg()).abs() < 1e-15);
        assert!(icf_run(&ResourceGrid::zeros(Arc::new(SubcarrierLayout::centered(8, 2).unwrap()), 1), 4.0, 0).is_err());
    }

    #[test]
    fn guard_bins_exactly_zero() {
        let layout = Arc::new(SubcarrierLayout::centered(64, 20).unwrap());
        let data = ComplexMatrix::from_fn(2, 64, |j, k| {
            if layout.is_active(k) {
                C64::from_polar(1.0, (j * 7 + k * k) as f64)
            } else {
                C64::default()
            }
        });
        let g = ResourceGrid::new(layout.clone(), data).unwrap();
        let out = icf_run(&g, 3.0, 5).unwrap();
        for j in 0..2 {
            for &k in layout.guard() {
                assert_eq!(out.data()[(j, k)], C64::default());
            }
        }
        let _ = to_time(&out).unwrap();
    }
}
