//! Small dense linear-algebra helpers shared by the algebraic modules.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative singular-value threshold for rank decisions.
pub const RANK_REL_TOL: f64 = 1e-8;

/// Lower Cholesky factor `L` of a symmetric positive-definite gram matrix,
/// `gram = L L^T`.
pub fn spd_factor(gram: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = gram.nrows();
    if gram.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: gram.ncols() });
    }
    let scale = gram.amax().max(1.0);
    let asym = (gram - gram.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::GramNotSpd { min_eig: f64::NAN });
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let min_eig = SymmetricEigen::new(gram.clone()).eigenvalues.min();
    if !(min_eig > 0.0) {
        return Err(Error::GramNotSpd { min_eig });
    }
    let chol = gram
        .clone()
        .cholesky()
        .ok_or(Error::GramNotSpd { min_eig })?;
    Ok(chol.l())
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn spectral_norm_c(m: &DMatrix<Complex<f64>>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

fn square_up<T: nalgebra::ComplexField>(m: &DMatrix<T>) -> DMatrix<T> {
    let (r, c) = m.shape();
    if r >= c {
        return m.clone();
    }
    let mut out = DMatrix::zeros(c, c);
    out.view_mut((0, 0), (r, c)).copy_from(m);
    out
}

/// Orthonormal (Euclidean) basis of the null space of `m`, as columns.
pub fn kernel(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let sq = square_up(m);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return DMatrix::identity(n, n);
    }
    let thr = RANK_REL_TOL * smax;
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= thr)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal (Hermitian) basis of the null space of a complex matrix.
pub fn kernel_c(m: &DMatrix<Complex<f64>>) -> DMatrix<Complex<f64>> {
    let n = m.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let sq = square_up(m);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return DMatrix::identity(n, n);
    }
    let thr = RANK_REL_TOL * smax;
    let cols: Vec<DVector<Complex<f64>>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= thr)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal (Euclidean) basis of the column space of `m`.
pub fn range_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return DMatrix::zeros(r, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.max();
    if smax <= f64::MIN_POSITIVE {
        return DMatrix::zeros(r, 0);
    }
    let thr = RANK_REL_TOL * smax;
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > thr)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(r, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

pub fn rank(m: &DMatrix<f64>) -> usize {
    range_basis(m).ncols()
}

/// Embed a real matrix into the complex numbers.
pub fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    m.map(|x| Complex::new(x, 0.0))
}

/// Sub-matrix with the given rows and columns.
pub fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let k = kernel(&m);
        assert_eq!(k.ncols(), 1);
        assert!((&m * &k).amax() < 1e-12);
    }

    #[test]
    fn wide_matrix_kernel() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        assert_eq!(kernel(&m).ncols(), 2);
    }

    #[test]
    fn spd_rejects_indefinite() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(spd_factor(&g), Err(Error::GramNotSpd { .. })));
    }
}
