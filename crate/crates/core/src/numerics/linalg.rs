use nalgebra::DMatrix;

use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Tolerance on Hermitian symmetry and on negative eigenvalues, relative to
/// the matrix scale (floored at 1).
pub const PSD_TOLERANCE: f64 = 1e-10;

fn scale_of(a: &ComplexMatrix) -> f64 {
    a.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max)
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::Validation(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let defect = a.hermitian_defect();
    if defect > PSD_TOLERANCE * scale_of(a) {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_hermitian(a)?;
    let n = a.rows();
    // symmetrize so round-off in the input cannot leak into the solver
    let sym = DMatrix::from_fn(n, n, |r, c| (a[(r, c)] + a[(c, r)].conj()) * 0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Principal square root `B` of a Hermitian PSD matrix, with `B B^H = A`.
///
/// Eigenvalues down to `-1e-10` (relative) are clamped to zero; anything more
/// negative is rejected.
pub fn hermitian_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eigen(a)?;
    let tol = PSD_TOLERANCE * scale_of(a);
    let mut roots = Vec::with_capacity(values.len());
    for v in values {
        if v < -tol {
            return Err(Error::Validation(format!(
                "matrix is not positive semidefinite (eigenvalue {v:.3e})"
            )));
        }
        roots.push(C64::new(v.max(0.0).sqrt(), 0.0));
    }
    let scaled = vectors.matmul(&ComplexMatrix::from_diagonal(&roots))?;
    scaled.matmul(&vectors.adjoint())
}

/// Solves `A X = B` for square `A` by LU with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != a.cols() || a.rows() != b.rows() {
        return Err(Error::Sizing(format!(
            "cannot solve {}x{} system with {}x{} right-hand side",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let lu = a.to_nalgebra().lu();
    let x = lu
        .solve(&b.to_nalgebra())
        .ok_or_else(|| Error::SolverFailure("singular linear system".into()))?;
    let out = ComplexMatrix::from_nalgebra(&x);
    if !out.is_finite() {
        return Err(Error::SolverFailure("non-finite solution".into()));
    }
    Ok(out)
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}

/// Largest eigenvalue of a Hermitian PSD matrix by power iteration.
pub fn lambda_max_psd(a: &ComplexMatrix, iters: usize) -> f64 {
    let n = a.rows();
    if n == 0 {
        return 0.0;
    }
    // deterministic start with no special alignment to the standard basis
    let mut v: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + 0.1 * i as f64, 0.05 * i as f64))
        .collect();
    let mut w = vec![C64::default(); n];
    let mut estimate = 0.0;
    for _ in 0..iters.max(1) {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        a.matvec_into(&v, &mut w);
        let rayleigh: f64 = v.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum();
        let converged = (rayleigh - estimate).abs() <= 1e-12 * rayleigh.abs().max(1e-300);
        estimate = rayleigh;
        std::mem::swap(&mut v, &mut w);
        if converged {
            break;
        }
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{complex_gaussian, RngStream};

    fn random_matrix(seed: u64, r: usize, c: usize) -> ComplexMatrix {
        let mut rng = RngStream::new(seed, 0);
        ComplexMatrix::from_vec(r, c, complex_gaussian(&mut rng, r * c, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn sqrt_identity_and_diagonal() {
        let i = ComplexMatrix::identity(3);
        assert!(hermitian_sqrt(&i).unwrap().distance(&i) < 1e-12);
        let d = ComplexMatrix::from_diagonal(&[C64::new(4.0, 0.0), C64::new(9.0, 0.0)]);
        let want = ComplexMatrix::from_diagonal(&[C64::new(2.0, 0.0), C64::new(3.0, 0.0)]);
        assert!(hermitian_sqrt(&d).unwrap().distance(&want) < 1e-12);
    }

    #[test]
    fn sqrt_of_random_gram() {
        for seed in 0..10 {
            let m = random_matrix(seed, 4, 4);
            let a = m.adjoint().matmul(&m).unwrap();
            let b = hermitian_sqrt(&a).unwrap();
            let back = b.matmul(&b.adjoint()).unwrap();
            assert!(back.distance(&a) / a.frobenius_norm() < 1e-8);
            assert!(b.hermitian_defect() < 1e-10 * a.frobenius_norm());
            let (vals, _) = hermitian_eigen(&b).unwrap();
            assert!(vals[0] > -1e-10);
        }
    }

    #[test]
    fn sqrt_rank_deficient_clamps() {
        let m = random_matrix(3, 1, 4);
        let a = m.adjoint().matmul(&m).unwrap();
        let b = hermitian_sqrt(&a).unwrap();
        assert!(b.matmul(&b.adjoint()).unwrap().distance(&a) / a.frobenius_norm() < 1e-8);
    }

    #[test]
    fn sqrt_rejects_non_hermitian_and_indefinite() {
        let mut a = ComplexMatrix::identity(2);
        a[(0, 1)] = C64::new(0.5, 0.0);
        assert!(matches!(hermitian_sqrt(&a), Err(Error::Validation(_))));
        let neg = ComplexMatrix::from_diagonal(&[C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
        assert!(matches!(hermitian_sqrt(&neg), Err(Error::Validation(_))));
    }

    #[test]
    fn solve_and_inverse() {
        let a = random_matrix(11, 3, 3);
        let inv = inverse(&a).unwrap();
        assert!(a.matmul(&inv).unwrap().distance(&ComplexMatrix::identity(3)) < 1e-10);
        assert!(matches!(
            inverse(&ComplexMatrix::zeros(2, 2)),
            Err(Error::SolverFailure(_))
        ));
    }

    #[test]
    fn power_iteration_matches_eigen() {
        let m = random_matrix(5, 2, 6);
        let a = m.adjoint().matmul(&m).unwrap();
        let (vals, _) = hermitian_eigen(&a).unwrap();
        let top = *vals.last().unwrap();
        assert!((lambda_max_psd(&a, 500) - top).abs() < 1e-8 * top);
    }
}
