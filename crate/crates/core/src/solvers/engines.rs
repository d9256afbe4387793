use super::problem::{dist, Problem};
use super::{Observer, ResidualTrace, SolveOutput, SolverConfig, SolverState};
use crate::channel::MitigationWeights;
use crate::error::Result;
use crate::numerics::{ComplexMatrix, C64};
use crate::waveform::ResourceGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    Topadmm,
    Badmm,
    Dys,
}

/// Three-operator splitting with scaled dual `u`:
/// `X+ = P_U(Z - u)`, `Z+ = P_P(X+ - tau grad(Z) + u)`, `u += X+ - Z+`.
pub fn topadmm_run(
    x0: &ResourceGrid,
    q: &MitigationWeights,
    cfg: &SolverConfig,
) -> Result<(ResourceGrid, ResidualTrace)> {
    run(Kind::Topadmm, x0, q, cfg, None).map(|o| (o.solution, o.state.residuals))
}

/// Bregman ADMM with linearised gradient steps on both blocks.
pub fn badmm_run(
    x0: &ResourceGrid,
    q: &MitigationWeights,
    cfg: &SolverConfig,
) -> Result<(ResourceGrid, ResidualTrace)> {
    run(Kind::Badmm, x0, q, cfg, None).map(|o| (o.solution, o.state.residuals))
}

/// Davis-Yin splitting: `X+ = P_U(L)`, `Z+ = P_P(2X+ - L - tau grad(X+))`,
/// `L += mu (Z+ - X+)`.
pub fn dys_run(
    x0: &ResourceGrid,
    q: &MitigationWeights,
    cfg: &SolverConfig,
) -> Result<(ResourceGrid, ResidualTrace)> {
    run(Kind::Dys, x0, q, cfg, None).map(|o| (o.solution, o.state.residuals))
}

pub(crate) fn run(
    kind: Kind,
    x0: &ResourceGrid,
    q: &MitigationWeights,
    cfg: &SolverConfig,
    mut observer: Option<&mut Observer<'_>>,
) -> Result<SolveOutput> {
    let mut p = Problem::new(x0, q, cfg)?;
    let mut warnings = Vec::new();
    if kind == Kind::Dys {
        let l = q.lambda_max() + cfg.zeta;
        if l > 0.0 && cfg.tau >= 2.0 / l {
            warnings.push(format!(
                "tau = {} is outside (0, 2/L) with L = {l:.6}; convergence is not guaranteed",
                cfg.tau
            ));
        }
    }
    let mut xbar = x0.data().clone();
    let mut zbar = x0.data().clone();
    // DYS iterates on its governing sequence, which must start at x0 for the
    // warm start to be a fixed point
    let mut lam = if kind == Kind::Dys { x0.data().clone() } else { p.zeros() };
    let mut x_next = p.zeros();
    let mut z_next = p.zeros();
    let mut g = p.zeros();
    let mut g2 = p.zeros();
    let mut trace = ResidualTrace::default();
    let mut stopped_early = false;
    let mut iter = 0;

    while iter < cfg.max_iters {
        p.refresh_radii(&xbar, &zbar)?;
        let (primal, dual) = match kind {
            Kind::Topadmm => {
                step_topadmm(&mut p, &xbar, &zbar, &mut lam, &mut x_next, &mut z_next, &mut g)
            }
            Kind::Badmm => step_badmm(
                &mut p, &xbar, &zbar, &mut lam, &mut x_next, &mut z_next, &mut g, &mut g2,
            ),
            Kind::Dys => step_dys(&mut p, &mut lam, &mut x_next, &mut z_next, &mut g),
        };
        std::mem::swap(&mut xbar, &mut x_next);
        std::mem::swap(&mut zbar, &mut z_next);
        iter += 1;
        trace.primal.push(primal);
        trace.dual.push(dual);
        p.check_divergence(iter, primal, dual)?;
        if let Some(obs) = observer.as_deref_mut() {
            if cfg.snapshot_every > 0 && (iter % cfg.snapshot_every == 0 || iter == cfg.max_iters) {
                if let Some(s) = obs(iter, &zbar) {
                    trace.snapshots.push(s);
                }
            }
        }
        if p.converged(primal, dual) {
            stopped_early = iter < cfg.max_iters;
            break;
        }
    }
    if let Some(obs) = observer {
        if cfg.snapshot_every > 0 && trace.snapshots.last().map(|s| s.iter) != Some(iter) {
            if let Some(s) = obs(iter, &zbar) {
                trace.snapshots.push(s);
            }
        }
    }
    let state = SolverState {
        xbar: p.grid(xbar),
        zbar: p.grid(zbar.clone()),
        lambda: p.grid(lam),
        iter,
        residuals: trace,
    };
    Ok(SolveOutput {
        solution: p.grid(zbar),
        state,
        papr_spec: p.papr.clone(),
        aclr_spec: p.aclr.clone(),
        warnings,
        stopped_early,
    })
}

fn step_topadmm(
    p: &mut Problem<'_>,
    xbar: &ComplexMatrix,
    zbar: &ComplexMatrix,
    u: &mut ComplexMatrix,
    x_next: &mut ComplexMatrix,
    z_next: &mut ComplexMatrix,
    g: &mut ComplexMatrix,
) -> (f64, f64) {
    let tau = p.cfg.tau;
    for ((o, z), l) in x_next.as_mut_slice().iter_mut().zip(zbar.as_slice()).zip(u.as_slice()) {
        *o = z - l;
    }
    p.proj_u(x_next);
    p.grad(zbar, g);
    for (((o, x), gr), l) in z_next
        .as_mut_slice()
        .iter_mut()
        .zip(x_next.as_slice())
        .zip(g.as_slice())
        .zip(u.as_slice())
    {
        *o = x - gr * tau + l;
    }
    p.proj_p(z_next);
    for ((l, x), z) in u.as_mut_slice().iter_mut().zip(x_next.as_slice()).zip(z_next.as_slice()) {
        *l += x - z;
    }
    (dist(x_next, z_next), dist(x_next, xbar))
}

#[allow(clippy::too_many_arguments)]
fn step_badmm(
    p: &mut Problem<'_>,
    xbar: &ComplexMatrix,
    zbar: &ComplexMatrix,
    lam: &mut ComplexMatrix,
    x_next: &mut ComplexMatrix,
    z_next: &mut ComplexMatrix,
    gx: &mut ComplexMatrix,
    gz: &mut ComplexMatrix,
) -> (f64, f64) {
    let cfg = p.cfg;
    let (rho, rx, rz) = (cfg.rho, cfg.badmm_rho_x, cfg.badmm_rho_z);
    p.grad(xbar, gx);
    // normalising by rho_x + rho keeps the warm start a fixed point
    let cx = 1.0 / (rx + rho);
    for ((((o, x), g), z), l) in x_next
        .as_mut_slice()
        .iter_mut()
        .zip(xbar.as_slice())
        .zip(gx.as_slice())
        .zip(zbar.as_slice())
        .zip(lam.as_slice())
    {
        *o = (x * rx - g + z * rho - l) * cx;
    }
    p.proj_u(x_next);
    p.grad(zbar, gz);
    let cz = 1.0 / (rz + rho);
    for ((((o, z), g), x), l) in z_next
        .as_mut_slice()
        .iter_mut()
        .zip(zbar.as_slice())
        .zip(gz.as_slice())
        .zip(x_next.as_slice())
        .zip(lam.as_slice())
    {
        *o = (z * rz - g + x * rho + l) * cz;
    }
    p.proj_p(z_next);
    let t = cfg.badmm_tau;
    for ((l, x), z) in lam.as_mut_slice().iter_mut().zip(x_next.as_slice()).zip(z_next.as_slice()) {
        *l += (x - z) * t;
    }
    (dist(x_next, z_next), dist(x_next, xbar))
}

fn step_dys(
    p: &mut Problem<'_>,
    lam: &mut ComplexMatrix,
    x_next: &mut ComplexMatrix,
    z_next: &mut ComplexMatrix,
    g: &mut ComplexMatrix,
) -> (f64, f64) {
    let (tau, mu) = (p.cfg.tau, p.cfg.dys_mu);
    x_next.as_mut_slice().copy_from_slice(lam.as_slice());
    p.proj_u(x_next);
    p.grad(x_next, g);
    for (((o, x), l), gr) in z_next
        .as_mut_slice()
        .iter_mut()
        .zip(x_next.as_slice())
        .zip(lam.as_slice())
        .zip(g.as_slice())
    {
        *o = x * 2.0 - l - gr * tau;
    }
    p.proj_p(z_next);
    let mut step = 0.0;
    for ((l, x), z) in lam.as_mut_slice().iter_mut().zip(x_next.as_slice()).zip(z_next.as_slice()) {
        let d: C64 = (z - x) * mu;
        step += d.norm_sqr();
        *l += d;
    }
    (dist(x_next, z_next), step.sqrt())
}
