//! Metric Lie algebras given by structure constants.
//!
//! Basis `e_0 .. e_{n-1}`, bracket `[e_i, e_j] = sum_k c[i][j][k] e_k`, and an
//! inner product given by a symmetric positive-definite gram matrix. Vectors
//! are coordinate columns in that basis.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// A finite-dimensional real Lie algebra with an inner product.
///
/// Antisymmetry of the structure constants is enforced at construction; the
/// Jacobi identity is *not*, so that broken algebras can still be inspected
/// through [`MetricLieAlgebra::jacobi_residual`].
#[derive(Debug, Clone, PartialEq)]
pub struct MetricLieAlgebra {
    dim: usize,
    c: Vec<f64>,
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    chol_l: DMatrix<f64>,
    labels: Vec<String>,
}

/// Largest Jacobi defect over basis triples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiResidual {
    pub max_residual: f64,
    pub worst_triple: (usize, usize, usize),
}

fn default_labels(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("e{i}")).collect()
}

impl MetricLieAlgebra {
    /// Builds an algebra from bracket entries `(i, j, k, value)` meaning
    /// `[e_i, e_j]` has `value` along `e_k`. Entries are expected with
    /// `i < j`; an entry with `i > j` is stored as `(j, i, k, -value)`.
    pub fn new(
        dim: usize,
        entries: &[(usize, usize, usize, f64)],
        gram: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        let mut c = vec![0.0; dim * dim * dim];
        let mut seen = vec![false; dim * dim * dim];
        for &(i, j, k, value) in entries {
            for idx in [i, j, k] {
                if idx >= dim {
                    return Err(Error::IndexOutOfRange { index: idx, dim });
                }
            }
            if i == j {
                if value != 0.0 {
                    return Err(Error::SelfBracket { i });
                }
                continue;
            }
            let (i, j, value) = if i < j { (i, j, value) } else { (j, i, -value) };
            let pos = (i * dim + j) * dim + k;
            if seen[pos] && c[pos] != value {
                return Err(Error::DuplicateEntry { i, j, k });
            }
            seen[pos] = true;
            c[pos] = value;
            c[(j * dim + i) * dim + k] = -value;
        }
        let gram = gram.unwrap_or_else(|| DMatrix::identity(dim, dim));
        Self::from_tensor(dim, c, gram, default_labels(dim))
    }

    /// Builds an algebra from a full `dim^3` tensor in `[i][j][k]` order.
    pub fn from_tensor(
        dim: usize,
        c: Vec<f64>,
        gram: DMatrix<f64>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim * dim, got: c.len() });
        }
        if gram.nrows() != dim || gram.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: gram.nrows() });
        }
        if labels.len() != dim {
            return Err(Error::LabelCount { expected: dim, got: labels.len() });
        }
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let a = c[(i * dim + j) * dim + k];
                    let b = c[(j * dim + i) * dim + k];
                    if a != -b {
                        return Err(Error::DuplicateEntry { i, j, k });
                    }
                }
            }
        }
        let chol_l = linalg::spd_factor(&gram)?;
        let gram_inv = gram
            .clone()
            .try_inverse()
            .ok_or(Error::GramNotSpd { min_eig: 0.0 })?;
        Ok(Self { dim, c, gram, gram_inv, chol_l, labels })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(Error::LabelCount { expected: self.dim, got: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &DMatrix<f64> {
        &self.gram_inv
    }

    /// Lower Cholesky factor of the gram matrix.
    pub fn gram_factor(&self) -> &DMatrix<f64> {
        &self.chol_l
    }

    /// Flat structure-constant tensor, `[i][j][k]` order.
    pub fn tensor(&self) -> &[f64] {
        &self.c
    }

    #[inline]
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn basis_vector(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    pub fn is_gram_identity(&self) -> bool {
        self.gram == DMatrix::identity(self.dim, self.dim)
    }

    fn check_len(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(())
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.gram * y)[(0, 0)]
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// `[e_i, e_j]` as a coordinate vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> DVector<f64> {
        let n = self.dim;
        DVector::from_column_slice(&self.c[(i * n + j) * n..(i * n + j + 1) * n])
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.bracket_unchecked(x.as_slice(), y.as_slice()))
    }

    pub(crate) fn bracket_unchecked(&self, x: &[f64], y: &[f64]) -> DVector<f64> {
        let n = self.dim;
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let row = &self.c[(i * n + j) * n..(i * n + j + 1) * n];
                for (o, cv) in out.iter_mut().zip(row) {
                    *o += w * cv;
                }
            }
        }
        out
    }

    /// Matrix of `ad_x`, so that `ad(x) * v == bracket(x, v)`.
    pub fn ad(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_len(x)?;
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    m[(k, j)] += x[i] * self.c[(i * n + j) * n + k];
                }
            }
        }
        Ok(m)
    }

    /// `ad_x`, or with `adjoint` its transpose with respect to the metric.
    pub fn ad_operator(&self, x: &DVector<f64>, adjoint: bool) -> Result<DMatrix<f64>> {
        let m = self.ad(x)?;
        Ok(if adjoint { self.metric_transpose(&m) } else { m })
    }

    /// `G^{-1} M^T G`: the adjoint of `M` with respect to the inner product.
    pub fn metric_transpose(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        &self.gram_inv * m.transpose() * &self.gram
    }

    pub fn trace_ad(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_len(x)?;
        let n = self.dim;
        let mut t = 0.0;
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                t += x[i] * self.c[(i * n + j) * n + j];
            }
        }
        Ok(t)
    }

    /// Components of `[e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]`.
    pub fn jacobiator(&self, i: usize, j: usize, k: usize) -> DVector<f64> {
        let n = self.dim;
        let c = |a: usize, b: usize, d: usize| self.c[(a * n + b) * n + d];
        DVector::from_fn(n, |l, _| {
            (0..n)
                .map(|m| c(j, k, m) * c(i, m, l) + c(k, i, m) * c(j, m, l) + c(i, j, m) * c(k, m, l))
                .sum()
        })
    }

    pub fn jacobi_residual(&self) -> JacobiResidual {
        let n = self.dim;
        let mut worst = JacobiResidual { max_residual: 0.0, worst_triple: (0, 1.min(n), 2.min(n)) };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let r = self.jacobiator(i, j, k).norm();
                    if r > worst.max_residual {
                        worst = JacobiResidual { max_residual: r, worst_triple: (i, j, k) };
                    }
                }
            }
        }
        worst
    }

    /// Gram-orthonormal basis of `[g, g]`.
    pub fn derived_subalgebra(&self) -> Subspace {
        let n = self.dim;
        let mut vecs = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
        for i in 0..n {
            for j in i + 1..n {
                vecs.push(self.bracket_basis(i, j));
            }
        }
        Subspace::span(self, &vecs)
    }

    /// Same algebra expressed in the basis given by the columns of `p`.
    pub fn change_basis(&self, p: &DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        let n = self.dim;
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.ncols() });
        }
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::BadDecomposition("singular change of basis".into()))?;
        let cols: Vec<DVector<f64>> = (0..n).map(|i| p.column(i).into_owned()).collect();
        let mut c = vec![0.0; n * n * n];
        for i in 0..n {
            for j in i + 1..n {
                let b = &p_inv * self.bracket_unchecked(cols[i].as_slice(), cols[j].as_slice());
                for k in 0..n {
                    c[(i * n + j) * n + k] = b[k];
                    c[(j * n + i) * n + k] = -b[k];
                }
            }
        }
        let gram = p.transpose() * &self.gram * p;
        let gram = (&gram + gram.transpose()) * 0.5;
        Self::from_tensor(n, c, gram, labels)
    }
}

/// A subspace with a gram-orthonormal basis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Subspace {
    pub basis: Vec<DVector<f64>>,
}

impl Subspace {
    /// Orthonormal basis of the span of `vectors` (rank decided by SVD).
    pub fn span(alg: &MetricLieAlgebra, vectors: &[DVector<f64>]) -> Self {
        let n = alg.dim();
        if vectors.is_empty() || n == 0 {
            return Self::default();
        }
        let b = DMatrix::from_columns(vectors);
        let l = alg.gram_factor();
        let y = l.transpose() * b;
        let u = linalg::range_basis(&y);
        let x = l
            .transpose()
            .solve_upper_triangular(&u)
            .expect("cholesky factor is invertible");
        Self { basis: (0..x.ncols()).map(|i| x.column(i).into_owned()).collect() }
    }

    /// Gram–Schmidt orthonormalization of the coordinate axes `idx`, in order.
    pub fn from_indices(alg: &MetricLieAlgebra, idx: &[usize]) -> Self {
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(idx.len());
        for &i in idx {
            let mut v = alg.basis_vector(i);
            for _ in 0..2 {
                for b in &basis {
                    let p = alg.inner(&v, b);
                    v -= b * p;
                }
            }
            let nv = alg.norm(&v);
            if nv > 1e-12 {
                basis.push(v / nv);
            }
        }
        Self { basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Max deviation of the basis gram matrix from the identity.
    pub fn orthonormality_residual(&self, alg: &MetricLieAlgebra) -> f64 {
        let mut r: f64 = 0.0;
        for (i, u) in self.basis.iter().enumerate() {
            for (j, v) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                r = r.max((alg.inner(u, v) - target).abs());
            }
        }
        r
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, alg: &MetricLieAlgebra, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(v.len());
        for b in &self.basis {
            out += b * alg.inner(v, b);
        }
        out
    }

    /// Orthogonal complement of `self` inside `ambient`.
    pub fn complement_in(&self, alg: &MetricLieAlgebra, ambient: &Subspace) -> Subspace {
        let residuals: Vec<DVector<f64>> = ambient
            .basis
            .iter()
            .map(|v| v - self.project(alg, v))
            .collect();
        Subspace::span(alg, &residuals)
    }

    /// Basis vectors as the columns of a matrix.
    pub fn matrix(&self, dim: usize) -> DMatrix<f64> {
        if self.basis.is_empty() {
            DMatrix::zeros(dim, 0)
        } else {
            DMatrix::from_columns(&self.basis)
        }
    }
}

/// Orthogonal splitting `g = a + k + m` along coordinate axes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Decomposition {
    pub a: Vec<usize>,
    pub k: Vec<usize>,
    pub m: Vec<usize>,
}

impl Decomposition {
    pub fn new(a: Vec<usize>, k: Vec<usize>, m: Vec<usize>) -> Self {
        Self { a, k, m }
    }

    /// `n = k + m`.
    pub fn n(&self) -> Vec<usize> {
        self.k.iter().chain(&self.m).copied().collect()
    }

    /// Checks that the blocks partition the basis and are pairwise
    /// gram-orthogonal within `tol`.
    pub fn validate(&self, alg: &MetricLieAlgebra, tol: f64) -> Result<()> {
        let dim = alg.dim();
        let mut owner = vec![None; dim];
        for (b, block) in [&self.a, &self.k, &self.m].into_iter().enumerate() {
            for &i in block {
                if i >= dim {
                    return Err(Error::BadDecomposition(format!("index {i} out of range")));
                }
                if owner[i].is_some() {
                    return Err(Error::BadDecomposition(format!("index {i} listed twice")));
                }
                owner[i] = Some(b);
            }
        }
        if let Some(i) = owner.iter().position(Option::is_none) {
            return Err(Error::BadDecomposition(format!("index {i} not covered")));
        }
        let g = alg.gram();
        for i in 0..dim {
            for j in 0..dim {
                if owner[i] != owner[j] && g[(i, j)].abs() > tol {
                    return Err(Error::BadDecomposition(format!(
                        "blocks not orthogonal: <e{i}, e{j}> = {}",
                        g[(i, j)]
                    )));
                }
            }
        }
        Ok(())
    }
}
