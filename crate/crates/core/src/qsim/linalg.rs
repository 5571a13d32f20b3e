//! Hermitian eigenvalues via nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Convergence threshold handed to the symmetric eigen-solver.
pub const EIGEN_EPS: f64 = 1e-14;

/// Eigenvalues of a row-major Hermitian `dim x dim` matrix, ascending.
pub fn hermitian_eigenvalues(data: &[C64], dim: usize) -> Vec<f64> {
    assert_eq!(data.len(), dim * dim);
    if dim == 1 {
        return vec![data[0].re];
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        // symmetrize so tiny round-off asymmetry cannot bias the solver
        (data[i * dim + j] + data[j * dim + i].conj()) * 0.5
    });
    let eig = nalgebra::SymmetricEigen::try_new(m, EIGEN_EPS, 0)
        .expect("symmetric eigen-solver failed to converge");
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Sum of absolute eigenvalues (the Schatten 1-norm) of a Hermitian matrix.
pub fn hermitian_trace_norm(data: &[C64], dim: usize) -> f64 {
    hermitian_eigenvalues(data, dim).iter().map(|l| l.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_y_eigenvalues() {
        let z = C64::new(0.0, 0.0);
        let y = [z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z];
        let e = hermitian_eigenvalues(&y, 2);
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        assert!((hermitian_trace_norm(&y, 2) - 2.0).abs() < 1e-14);
    }
}
