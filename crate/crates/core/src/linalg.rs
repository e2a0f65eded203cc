//! Dense complex linear algebra shared by the quantum types.
//!
//! Matrices index computational basis states big-endian: qubit 0 is the most
//! significant bit of a row/column index.

use alloc::vec::Vec;

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::error::{arg_err, Result};

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type Matrix = DMatrix<C64>;
pub type Vector = DVector<C64>;

/// Absolute tolerance for every validity check.
pub const TOL: f64 = 1e-9;

/// Largest register simulated densely.
pub const MAX_QUBITS: usize = 14;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(dim: usize) -> Matrix {
    Matrix::identity(dim, dim)
}

pub fn hadamard() -> Matrix {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    Matrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)])
}

/// Number of qubits spanned by a dimension, if it is a power of two.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}

pub fn check_qubits(qubits: usize) -> Result<()> {
    if qubits > MAX_QUBITS {
        return Err(crate::Error::Capacity(alloc::format!(
            "{qubits} qubits requested, dense simulation is capped at {MAX_QUBITS}"
        )));
    }
    Ok(())
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &Vector, b: &Vector) -> Vector {
    a.kronecker(b)
}

/// Outer product `|v><v|`.
pub fn projector(v: &Vector) -> Matrix {
    v * v.adjoint()
}

pub fn trace(m: &Matrix) -> C64 {
    m.trace()
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).modulus()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &Matrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
///
/// Column `k` of the returned matrix is the eigenvector of eigenvalue `k`.
pub fn hermitian_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let sym = (m + m.adjoint()) * c(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(m.nrows(), order.len(), |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &Matrix) -> f64 {
    hermitian_eigen(m).0.last().copied().unwrap_or(0.0)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let (values, vectors) = hermitian_eigen(m);
    let scaled = Matrix::from_fn(vectors.nrows(), vectors.ncols(), |r, k| vectors[(r, k)] * f(values[k]));
    scaled * vectors.adjoint()
}

/// Unitary factor of the polar decomposition `g = U |g|`.
///
/// `U` maximises `Re Tr[g^dagger U]` over unitaries; for rank-deficient `g`
/// any completion of the singular vectors is returned.
pub fn polar_unitary(g: &Matrix) -> Matrix {
    let svd = g.clone().svd(true, true);
    let u = svd.u.expect("svd u requested");
    let v_t = svd.v_t.expect("svd v_t requested");
    u * v_t
}

/// Orthonormalises the columns of `m` (modified Gram-Schmidt).
///
/// Columns that become numerically dependent are replaced by the next
/// standard basis vector that is independent of the ones kept so far.
pub fn orthonormalize_columns(m: &Matrix) -> Matrix {
    let rows = m.nrows();
    let mut out: Vec<Vector> = Vec::with_capacity(m.ncols());
    let mut fallback = 0usize;
    for k in 0..m.ncols() {
        let mut v: Vector = m.column(k).into_owned();
        loop {
            for u in &out {
                let p = u.dotc(&v);
                v -= u * p;
            }
            let norm = v.norm();
            if norm > 1e-10 {
                out.push(v / c(norm));
                break;
            }
            assert!(fallback < rows, "cannot complete orthonormal basis");
            v = Vector::from_fn(rows, |i, _| if i == fallback { ONE } else { ZERO });
            fallback += 1;
        }
    }
    Matrix::from_columns(&out)
}

/// Reduces a matrix on `qubits` qubits to the qubits in `keep` (in the given
/// order) by tracing out the rest.
pub fn partial_trace_qubits(m: &Matrix, qubits: usize, keep: &[usize]) -> Result<Matrix> {
    if m.nrows() != 1 << qubits || m.ncols() != 1 << qubits {
        return Err(arg_err!("matrix is not on {qubits} qubits"));
    }
    let mut seen = alloc::vec![false; qubits];
    for &k in keep {
        if k >= qubits {
            return Err(arg_err!("qubit index {k} out of range for {qubits} qubits"));
        }
        if seen[k] {
            return Err(arg_err!("qubit index {k} listed twice"));
        }
        seen[k] = true;
    }
    let traced: Vec<usize> = (0..qubits).filter(|q| !seen[*q]).collect();
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();
    let compose = |kept: usize, tr: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            if (kept >> (keep.len() - 1 - pos)) & 1 == 1 {
                idx |= 1 << (qubits - 1 - q);
            }
        }
        for (pos, &q) in traced.iter().enumerate() {
            if (tr >> (traced.len() - 1 - pos)) & 1 == 1 {
                idx |= 1 << (qubits - 1 - q);
            }
        }
        idx
    };
    let mut out = Matrix::zeros(kd, kd);
    for t in 0..td {
        for i in 0..kd {
            let ri = compose(i, t);
            for j in 0..kd {
                out[(i, j)] += m[(ri, compose(j, t))];
            }
        }
    }
    Ok(out)
}

/// Index map for reordering qubits: output qubit `p` is input qubit
/// `order[p]`.
pub fn permutation_indices(qubits: usize, order: &[usize]) -> Vec<usize> {
    (0..1usize << qubits)
        .map(|out| {
            let mut inp = 0usize;
            for (p, &q) in order.iter().enumerate() {
                if (out >> (qubits - 1 - p)) & 1 == 1 {
                    inp |= 1 << (qubits - 1 - q);
                }
            }
            inp
        })
        .collect()
}

/// Reorders the qubits of the row space of `m` (`order` as in
/// [`permutation_indices`]).
pub fn permute_rows(m: &Matrix, qubits: usize, order: &[usize]) -> Matrix {
    let idx = permutation_indices(qubits, order);
    Matrix::from_fn(m.nrows(), m.ncols(), |r, k| m[(idx[r], k)])
}

/// `Tr[(B (x) C) |phi><phi|]` without forming the Kronecker product.
pub fn bipartite_expectation(phi: &Vector, b: &Matrix, cm: &Matrix) -> f64 {
    let db = b.nrows();
    let dc = cm.nrows();
    debug_assert_eq!(phi.len(), db * dc);
    // phi reshaped to db x dc, row-major in the B index.
    let reshaped = Matrix::from_fn(db, dc, |i, j| phi[i * dc + j]);
    let left = b * &reshaped * cm.transpose();
    reshaped.iter().zip(left.iter()).map(|(p, l)| (p.conj() * l).re).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_trace_of_product_keeps_factor() {
        let a = Matrix::from_row_slice(2, 2, &[c(0.7), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.3)]);
        let b = Matrix::from_row_slice(2, 2, &[c(0.5), c(0.5), c(0.5), c(0.5)]);
        let ab = kron(&a, &b);
        assert!(max_abs_diff(&partial_trace_qubits(&ab, 2, &[0]).unwrap(), &a) < TOL);
        assert!(max_abs_diff(&partial_trace_qubits(&ab, 2, &[1]).unwrap(), &b) < TOL);
        let swapped = partial_trace_qubits(&ab, 2, &[1, 0]).unwrap();
        assert!(max_abs_diff(&swapped, &kron(&b, &a)) < TOL);
    }

    #[test]
    fn partial_trace_rejects_bad_indices() {
        let m = identity(4);
        assert!(partial_trace_qubits(&m, 2, &[2]).is_err());
        assert!(partial_trace_qubits(&m, 2, &[0, 0]).is_err());
        assert!(partial_trace_qubits(&m, 3, &[0]).is_err());
    }

    #[test]
    fn eigen_is_sorted_descending() {
        let m = Matrix::from_row_slice(2, 2, &[c(1.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), c(1.0)]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 2.0).abs() < TOL && vals[1].abs() < TOL);
        let v0 = vecs.column(0).into_owned();
        assert!(((&m * &v0) - v0 * c(2.0)).norm() < 1e-9);
    }

    #[test]
    fn polar_factor_is_unitary_and_optimal_for_psd() {
        let g = Matrix::from_row_slice(2, 2, &[c(2.0), c(0.0), c(0.0), c(0.0)]);
        let u = polar_unitary(&g);
        assert!(max_abs_diff(&(u.adjoint() * &u), &identity(2)) < 1e-9);
        assert!(((g.adjoint() * &u).trace().re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn bipartite_expectation_matches_kron() {
        let phi = Vector::from_vec(alloc::vec![c(0.5), C64::new(0.0, 0.5), c(-0.5), c(0.5)]);
        let b = Matrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let cm = Matrix::from_row_slice(2, 2, &[c(0.5), c(0.5), c(0.5), c(0.5)]);
        let direct = (phi.adjoint() * kron(&b, &cm) * &phi)[(0, 0)].re;
        assert!((bipartite_expectation(&phi, &b, &cm) - direct).abs() < 1e-12);
    }

    #[test]
    fn orthonormalize_completes_rank_deficient_input() {
        let m = Matrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(0.0)]);
        let q = orthonormalize_columns(&m);
        assert!(max_abs_diff(&(q.adjoint() * &q), &identity(2)) < 1e-9);
    }
}
