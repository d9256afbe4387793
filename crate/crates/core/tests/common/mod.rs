//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use mimo_papr::channel::MitigationWeights;
use mimo_papr::numerics::{complex_gaussian, ComplexMatrix, RngStream, C64};
use mimo_papr::waveform::{ResourceGrid, SubcarrierLayout};

/// Nearest point to `y` in the disc of radius `r`, by a polar grid search
/// refined around the best cell. The squared distance is flat at the optimum,
/// so the location is only resolved to about sqrt(eps) relative.
pub fn nearest_in_disc(y: C64, r: f64) -> C64 {
    let n = 32;
    let (mut rho_lo, mut rho_hi) = (0.0, r);
    let (mut th_lo, mut th_hi) = (-PI, PI);
    let mut best = C64::default();
    for _ in 0..60 {
        let mut best_d = f64::INFINITY;
        let (mut bi, mut bj) = (0, 0);
        for i in 0..=n {
            let rho = rho_lo + (rho_hi - rho_lo) * i as f64 / n as f64;
            for j in 0..=n {
                let th = th_lo + (th_hi - th_lo) * j as f64 / n as f64;
                let c = C64::from_polar(rho, th);
                let d = (c - y).norm_sqr();
                if d < best_d {
                    best_d = d;
                    best = c;
                    bi = i;
                    bj = j;
                }
            }
        }
        let drho = (rho_hi - rho_lo) / n as f64;
        let dth = (th_hi - th_lo) / n as f64;
        let rho_c = rho_lo + drho * bi as f64;
        let th_c = th_lo + dth * bj as f64;
        rho_lo = (rho_c - 2.0 * drho).max(0.0);
        rho_hi = (rho_c + 2.0 * drho).min(r);
        th_lo = th_c - 2.0 * dth;
        th_hi = th_c + 2.0 * dth;
        if drho < 1e-13 && dth * r < 1e-13 {
            break;
        }
    }
    best
}

/// Boundary point of the ball `||z - c|| <= r` on the segment from `c` to
/// `x`, found by bisection on the scaling factor; `x` itself if inside.
pub fn l2_ball_by_bisection(x: &[C64], c: &[C64], r: f64) -> Vec<C64> {
    let dist = |t: f64| -> f64 {
        x.iter()
            .zip(c)
            .map(|(a, b)| ((a - b) * t).norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    if dist(1.0) <= r {
        return x.to_vec();
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dist(mid) > r {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    x.iter().zip(c).map(|(a, b)| b + (a - b) * lo).collect()
}

/// `sum_k d_k^H Q_k d_k + zeta ||d||^2` written out entry by entry.
pub fn objective_by_loops(
    xbar: &ComplexMatrix,
    x: &ComplexMatrix,
    layout: &SubcarrierLayout,
    q: &MitigationWeights,
    zeta: f64,
) -> f64 {
    let n_tx = x.rows();
    let mut total = 0.0;
    for j in 0..n_tx {
        for k in 0..x.cols() {
            total += zeta * (xbar[(j, k)] - x[(j, k)]).norm_sqr();
        }
    }
    for (i, &k) in layout.active().iter().enumerate() {
        let qk = q.q(i);
        let mut acc = C64::default();
        for a in 0..n_tx {
            for b in 0..n_tx {
                let da = xbar[(a, k)] - x[(a, k)];
                let db = xbar[(b, k)] - x[(b, k)];
                acc += da.conj() * qk[(a, b)] * db;
            }
        }
        total += acc.re;
    }
    total
}

pub fn random_matrix(rng: &mut RngStream, rows: usize, cols: usize, var: f64) -> ComplexMatrix {
    ComplexMatrix::from_vec(rows, cols, complex_gaussian(rng, rows * cols, var).unwrap()).unwrap()
}

/// Random Hermitian PSD weights `A^H A` per subcarrier.
pub fn random_weights(rng: &mut RngStream, n_tx: usize, n_active: usize) -> MitigationWeights {
    let h: Vec<ComplexMatrix> = (0..n_active)
        .map(|_| random_matrix(rng, n_tx + 1, n_tx, 1.0))
        .collect();
    let ch = mimo_papr::channel::ChannelRealization::new(h, Default::default()).unwrap();
    mimo_papr::channel::build_q(&ch, 0.01, &vec![1.0; n_active]).unwrap()
}

/// Random grid with data on active bins and, optionally, guard leakage.
pub fn random_grid(
    rng: &mut RngStream,
    n_tx: usize,
    bins: usize,
    active: usize,
    guard_var: f64,
) -> ResourceGrid {
    let layout = Arc::new(SubcarrierLayout::centered(bins, active).unwrap());
    let mut g = ResourceGrid::zeros(layout.clone(), n_tx);
    for j in 0..n_tx {
        let a = complex_gaussian(rng, active, 1.0).unwrap();
        for (i, &k) in layout.active().iter().enumerate() {
            g.data_mut()[(j, k)] = a[i];
        }
        if guard_var > 0.0 {
            let gv = complex_gaussian(rng, layout.guard().len(), guard_var).unwrap();
            for (i, &k) in layout.guard().iter().enumerate() {
                g.data_mut()[(j, k)] = gv[i];
            }
        }
    }
    g
}

pub fn inner_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x.conj() * y).re)
        .sum()
}

/// Largest relative error of `2 Re<grad, D>` against central differences of
/// the loop objective over `trials` random instances.
pub fn gradient_fd_worst(seed: u64, trials: usize) -> f64 {
    let mut rng = RngStream::new(seed, 0);
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let n_tx = 1 + t % 4;
        let x0 = random_grid(&mut rng, n_tx, 32, 12, 0.0);
        let q = random_weights(&mut rng, n_tx, 12);
        let zeta = if t % 2 == 0 { 0.0 } else { 0.05 };
        let xbar = x0.with_data(x0.data().add(&random_matrix(&mut rng, n_tx, 32, 0.3)).unwrap()).unwrap();
        let d = random_matrix(&mut rng, n_tx, 32, 1.0);
        let g = mimo_papr::prox::grad_h(&xbar, &x0, &q, zeta).unwrap();
        let analytic = 2.0 * inner_re(g.data(), &d);
        let eps = 1e-4;
        let plus = xbar.data().add(&d.scale_real(eps)).unwrap();
        let minus = xbar.data().sub(&d.scale_real(eps)).unwrap();
        let fd = (objective_by_loops(&plus, x0.data(), x0.layout(), &q, zeta)
            - objective_by_loops(&minus, x0.data(), x0.layout(), &q, zeta))
            / (2.0 * eps);
        worst = worst.max((fd - analytic).abs() / analytic.abs().max(1e-12));
    }
    worst
}

fn vdist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Oracle agreement, idempotence and nonexpansiveness of every projection
/// over `cases` random draws. Returns the first violation.
pub fn projection_suite(seed: u64, cases: usize) -> Result<(), String> {
    use mimo_papr::prox::{
        aclr_radii, papr_radii, proj_aclr_set, proj_l2_ball, proj_linf_ball, proj_papr_set,
    };
    let mut rng = RngStream::new(seed, 0);
    for case in 0..cases {
        let n = 1 + case % 6;
        let scale = [0.01, 1.0, 100.0][case % 3];
        let x = complex_gaussian(&mut rng, n, scale).unwrap();
        let y = complex_gaussian(&mut rng, n, scale).unwrap();
        let c = complex_gaussian(&mut rng, n, scale).unwrap();
        let r = rng.uniform() * scale.sqrt() * 1.5;

        let px = proj_linf_ball(&x, r);
        for (p, z) in px.iter().zip(&x) {
            let o = nearest_in_disc(*z, r);
            if (p - o).norm() > 1e-6 * (1.0 + r) {
                return Err(format!("case {case}: linf {p} vs oracle {o}"));
            }
        }
        if vdist(&proj_linf_ball(&px, r), &px) > 1e-12 * (1.0 + r) {
            return Err(format!("case {case}: linf not idempotent"));
        }
        if vdist(&px, &proj_linf_ball(&y, r)) > vdist(&x, &y) * (1.0 + 1e-12) {
            return Err(format!("case {case}: linf expansive"));
        }

        let pl = proj_l2_ball(&x, &c, r).unwrap();
        let ol = l2_ball_by_bisection(&x, &c, r);
        if vdist(&pl, &ol) > 1e-6 * (1.0 + r) {
            return Err(format!("case {case}: l2 differs from bisection"));
        }
        // no sampled feasible point is closer than the projection
        let d_proj = vdist(&pl, &x);
        for _ in 0..8 {
            let dir = complex_gaussian(&mut rng, n, 1.0).unwrap();
            let nd = dir.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let s = r * rng.uniform() / nd;
            let cand: Vec<C64> = c.iter().zip(&dir).map(|(a, b)| a + b * s).collect();
            if vdist(&cand, &x) < d_proj - 1e-9 * (1.0 + d_proj) {
                return Err(format!("case {case}: l2 projection not nearest"));
            }
        }
        if vdist(&proj_l2_ball(&pl, &c, r).unwrap(), &pl) > 1e-12 * (1.0 + scale) {
            return Err(format!("case {case}: l2 not idempotent"));
        }
        let py = proj_l2_ball(&y, &c, r).unwrap();
        if vdist(&pl, &py) > vdist(&x, &y) * (1.0 + 1e-12) + 1e-15 {
            return Err(format!("case {case}: l2 expansive"));
        }

        // set projections on grids, with radii frozen from a third grid
        if case % 4 == 0 {
            let n_tx = 1 + case % 3;
            let g1 = random_grid(&mut rng, n_tx, 32, 10, 0.2);
            let g2 = random_grid(&mut rng, n_tx, 32, 10, 0.2);
            let rf = random_grid(&mut rng, n_tx, 32, 10, 0.0);
            let ps = papr_radii(rf.data(), &vec![2.0; n_tx]).unwrap();
            let asp = aclr_radii(rf.data(), rf.layout(), &vec![-20.0; n_tx]).unwrap();
            let d12 = g1.data().distance(g2.data());
            for (name, p1, p2, pp) in [
                (
                    "papr",
                    proj_papr_set(&g1, &ps).unwrap(),
                    proj_papr_set(&g2, &ps).unwrap(),
                    proj_papr_set(&proj_papr_set(&g1, &ps).unwrap(), &ps).unwrap(),
                ),
                (
                    "aclr",
                    proj_aclr_set(&g1, &asp).unwrap(),
                    proj_aclr_set(&g2, &asp).unwrap(),
                    proj_aclr_set(&proj_aclr_set(&g1, &asp).unwrap(), &asp).unwrap(),
                ),
            ] {
                if pp.data().distance(p1.data()) > 1e-12 * (1.0 + p1.data().frobenius_norm()) {
                    return Err(format!("case {case}: {name} set not idempotent"));
                }
                if p1.data().distance(p2.data()) > d12 * (1.0 + 1e-12) {
                    return Err(format!("case {case}: {name} set expansive"));
                }
            }
        }
    }
    Ok(())
}
