//! The existence criteria for harmonic morphisms `G -> R^m` and for
//! conformal foliations producing harmonic morphisms, evaluated on a
//! coordinate-axis decomposition `g = a + k + m`.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::algebra::{Decomposition, MetricLieAlgebra, Subspace};
use crate::error::{Error, Result};
use crate::geometry::ConnectionCoeffs;
use crate::linalg;
use crate::report::{CheckReport, Witness};
use crate::UNSOUND_JACOBI;

/// `L = lambda I + skew + remainder`, where `skew = (L - L^t)/2` and the
/// remainder is the trace-free part of `(L + L^t)/2`.
///
/// `residual` is the operator norm of the remainder; it vanishes exactly
/// when `L` is conformal, i.e. `L = lambda I + (L - L^t)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalSplit {
    pub lambda: f64,
    pub skew: DMatrix<f64>,
    pub remainder: DMatrix<f64>,
    pub residual: f64,
    /// Unit orthogonal `(Z, W)` maximizing `|<LZ,Z> - <LW,W>|`.
    pub witness: Option<(DVector<f64>, DVector<f64>)>,
}

pub fn conformal_decompose(l: &DMatrix<f64>, gram: &DMatrix<f64>) -> Result<ConformalSplit> {
    let m = l.nrows();
    if l.ncols() != m {
        return Err(Error::DimensionMismatch { expected: m, got: l.ncols() });
    }
    if gram.nrows() != m || gram.ncols() != m {
        return Err(Error::DimensionMismatch { expected: m, got: gram.nrows() });
    }
    if m == 0 {
        return Err(Error::TooSmall { m });
    }
    let chol = linalg::spd_factor(gram)?;
    let gram_inv = gram.clone().try_inverse().ok_or(Error::GramNotSpd { min_eig: 0.0 })?;
    let lt = &gram_inv * l.transpose() * gram;
    let lambda = l.trace() / m as f64;
    let skew = (l - &lt) * 0.5;
    let remainder = (l + &lt) * 0.5 - DMatrix::identity(m, m) * lambda;

    // In orthonormal coordinates y = L^T x the remainder is symmetric.
    let chol_t = chol.transpose();
    let chol_t_inv = chol_t.clone().try_inverse().expect("cholesky factor is invertible");
    let sym = &chol_t * &remainder * &chol_t_inv;
    let sym = (&sym + sym.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let (mut imin, mut imax) = (0, 0);
    for i in 0..m {
        if eig.eigenvalues[i] < eig.eigenvalues[imin] {
            imin = i;
        }
        if eig.eigenvalues[i] > eig.eigenvalues[imax] {
            imax = i;
        }
    }
    let residual = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let witness = (m >= 2 && imin != imax).then(|| {
        let z = &chol_t_inv * eig.eigenvectors.column(imin);
        let w = &chol_t_inv * eig.eigenvectors.column(imax);
        (z, w)
    });
    Ok(ConformalSplit { lambda, skew, remainder, residual, witness })
}

/// Maximal isotropic family for the complex-bilinear extension of the
/// standard form on `C^m`: `v_j = e_{2j} + i e_{2j+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicFrame {
    pub vectors: Vec<DVector<Complex<f64>>>,
}

impl IsotropicFrame {
    /// `(u, v) = Σ u_k v_k`, no conjugation.
    pub fn bilinear(u: &DVector<Complex<f64>>, v: &DVector<Complex<f64>>) -> Complex<f64> {
        u.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn max_product(&self) -> f64 {
        let mut r: f64 = 0.0;
        for u in &self.vectors {
            for v in &self.vectors {
                r = r.max(Self::bilinear(u, v).norm());
            }
        }
        r
    }
}

pub fn isotropic_frame(m: usize) -> Result<IsotropicFrame> {
    if m < 2 {
        return Err(Error::TooSmall { m });
    }
    let vectors = (0..m / 2)
        .map(|j| {
            let mut v = DVector::from_element(m, Complex::new(0.0, 0.0));
            v[2 * j] = Complex::new(1.0, 0.0);
            v[2 * j + 1] = Complex::new(0.0, 1.0);
            v
        })
        .collect();
    Ok(IsotropicFrame { vectors })
}

/// Largest component of `[e_i, e_j]` (i in `left`, j in `right`) along the
/// axes in `forbidden`, with the offending `(i, j, k)`.
fn inclusion_defect(
    alg: &MetricLieAlgebra,
    left: &[usize],
    right: &[usize],
    forbidden: &[usize],
) -> (f64, Option<Witness>) {
    let mut worst = 0.0;
    let mut witness = None;
    for &i in left {
        for &j in right {
            if i == j {
                continue;
            }
            for &k in forbidden {
                let v = alg.structure_constant(i, j, k).abs();
                if v > worst {
                    worst = v;
                    witness = Some(Witness::indices(vec![i, j, k]));
                }
            }
        }
    }
    (worst, witness)
}

fn complement(dim: usize, keep: &[&[usize]]) -> Vec<usize> {
    (0..dim).filter(|i| !keep.iter().any(|b| b.contains(i))).collect()
}

fn trace_defect(alg: &MetricLieAlgebra, m: &[usize]) -> (f64, Option<Witness>) {
    let mut worst = 0.0;
    let mut witness = None;
    for &z in m {
        let t = alg.trace_ad(&alg.basis_vector(z)).expect("basis vector has the right length");
        if t.abs() > worst {
            worst = t.abs();
            witness = Some(Witness::indices(vec![z]));
        }
    }
    (worst, witness)
}

/// Conformal split of the m-compression of `ad_H` for each `H` in `a`.
/// Returns the largest residual (with witness) and `lambda` on the a-basis.
fn conformal_defect(
    alg: &MetricLieAlgebra,
    a: &[usize],
    m: &[usize],
) -> Result<(f64, Option<Witness>, Vec<f64>)> {
    let mut lambdas = Vec::with_capacity(a.len());
    let mut worst = 0.0;
    let mut witness = None;
    if m.is_empty() {
        return Ok((0.0, None, vec![0.0; a.len()]));
    }
    let gram_m = linalg::submatrix(alg.gram(), m, m);
    for &h in a {
        let ad = alg.ad(&alg.basis_vector(h))?;
        let block = linalg::submatrix(&ad, m, m);
        let split = conformal_decompose(&block, &gram_m)?;
        lambdas.push(split.lambda);
        if split.residual > worst {
            worst = split.residual;
            let mut w = Witness::indices(vec![h]);
            if let Some((z, wv)) = &split.witness {
                let embed = |v: &DVector<f64>| {
                    let mut full = vec![0.0; alg.dim()];
                    for (p, &i) in m.iter().enumerate() {
                        full[i] = v[p];
                    }
                    full
                };
                w.vectors = vec![embed(z), embed(wv)];
            }
            witness = Some(w);
        }
    }
    Ok((worst, witness, lambdas))
}

fn jacobi_item(alg: &MetricLieAlgebra, report: &mut CheckReport, tol: f64) -> bool {
    let jr = alg.jacobi_residual();
    let (i, j, k) = jr.worst_triple;
    report.push(
        "0",
        "Jacobi identity",
        jr.max_residual,
        tol,
        Some(Witness::indices(vec![i, j, k])),
    );
    if jr.max_residual > UNSOUND_JACOBI {
        report.sound = false;
        report
            .notes
            .push("bracket is not a Lie bracket; remaining conditions not evaluated".into());
        report.refresh();
        return false;
    }
    true
}

/// Conditions (i)–(v) for a harmonic morphism `G -> R^{dim m}` with
/// fibres tangent to `a + k`.
///
/// Item `v` checks conformality of the m-compression of each `ad_H`;
/// the conformal factor is reported under `quantities["lambda"]` as its
/// values on the a-basis.
pub fn check_morphism(alg: &MetricLieAlgebra, d: &Decomposition, tol: f64) -> Result<CheckReport> {
    d.validate(alg, tol)?;
    let mut report = CheckReport::new();
    if !jacobi_item(alg, &mut report, tol) {
        return Ok(report);
    }
    let dim = alg.dim();
    let n = d.n();

    let (r, w) = inclusion_defect(alg, &d.a, &d.k, &complement(dim, &[&d.k]));
    report.push("i", "[a,k] ⊂ k", r, tol, w);
    let (r, w) = inclusion_defect(alg, &d.a, &d.m, &complement(dim, &[&d.m]));
    report.push("ii", "[a,m] ⊂ m", r, tol, w);
    let (r, w) = inclusion_defect(alg, &n, &n, &complement(dim, &[&d.k]));
    report.push("iii", "[k+m, k+m] ⊂ k", r, tol, w);
    let (r, w) = trace_defect(alg, &d.m);
    report.push("iv", "trace ad_Z = 0 for Z in m", r, tol, w);
    let (r, w, lambdas) = conformal_defect(alg, &d.a, &d.m)?;
    report.push("v", "(ad_H + ad_H^t) Z = 2 lambda(H) Z on m", r, tol, w);
    report.quantities.insert("lambda".into(), lambdas);
    Ok(report)
}

/// The left-invariant 1-form used for conformal foliations with
/// `dim m = n`, evaluated on the basis, and the largest `|ω([e_i,e_j])|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaForm {
    pub omega: Vec<f64>,
    pub closedness_residual: f64,
    pub worst_pair: (usize, usize),
}

/// `ω(E) = (n-2)/n Σ_k <V ∇_{Z_k} Z_k, E> - Σ_r <H ∇_{A_r} A_r, E>
///        - Σ_s <H ∇_{X_s} X_s, E>`, with `V`, `H` the projections onto
/// `a + k` and `m`, and `{A_r}`, `{X_s}`, `{Z_k}` orthonormal bases.
pub fn omega_form(alg: &MetricLieAlgebra, d: &Decomposition, tol: f64) -> Result<OmegaForm> {
    d.validate(alg, tol)?;
    if d.m.is_empty() {
        return Err(Error::BadDecomposition("omega needs dim m >= 1".into()));
    }
    let dim = alg.dim();
    let conn = ConnectionCoeffs::koszul(alg);
    let nm = d.m.len() as f64;
    let zs = Subspace::from_indices(alg, &d.m);
    let vertical_frames: Vec<DVector<f64>> = Subspace::from_indices(alg, &d.a)
        .basis
        .into_iter()
        .chain(Subspace::from_indices(alg, &d.k).basis)
        .collect();
    let mut sum_z = DVector::zeros(dim);
    for z in &zs.basis {
        sum_z += conn.covariant(z, z);
    }
    let mut sum_v = DVector::zeros(dim);
    for v in &vertical_frames {
        sum_v += conn.covariant(v, v);
    }
    // Blocks are gram-orthogonal coordinate axes, so the projections are
    // coordinate masks.
    let mut vert = sum_z.clone();
    for &i in &d.m {
        vert[i] = 0.0;
    }
    let mut horiz = DVector::zeros(dim);
    for &i in &d.m {
        horiz[i] = sum_v[i];
    }
    let weight = (nm - 2.0) / nm;
    let covector = alg.gram() * (vert * weight - horiz);
    let omega: Vec<f64> = covector.iter().copied().collect();

    let mut closedness_residual = 0.0;
    let mut worst_pair = (0, 0);
    for i in 0..dim {
        for j in i + 1..dim {
            let b = alg.bracket_basis(i, j);
            let v: f64 = b.iter().zip(&omega).map(|(x, w)| x * w).sum();
            if v.abs() > closedness_residual {
                closedness_residual = v.abs();
                worst_pair = (i, j);
            }
        }
    }
    Ok(OmegaForm { omega, closedness_residual, worst_pair })
}

/// Conditions (i)–(vi) for a left-invariant conformal foliation with
/// minimal leaves tangent to `a + k`, plus closedness of ω as item `vii`.
///
/// Items `iv+v` use the m-compression `P_m ad_H |_m`, ignoring any
/// k-component of `[H, Z]`.
pub fn check_foliation(alg: &MetricLieAlgebra, d: &Decomposition, tol: f64) -> Result<CheckReport> {
    d.validate(alg, tol)?;
    let mut report = CheckReport::new();
    if !jacobi_item(alg, &mut report, tol) {
        return Ok(report);
    }
    let dim = alg.dim();
    let ak: Vec<usize> = d.a.iter().chain(&d.k).copied().collect();
    let n = d.n();

    let (r, w) = inclusion_defect(alg, &ak, &ak, &d.m);
    report.push("i", "a+k is a subalgebra", r, tol, w);
    let (r, w) = inclusion_defect(alg, &d.a, &d.m, &complement(dim, &[&d.k, &d.m]));
    report.push("ii", "[a,m] ⊂ k+m", r, tol, w);
    let (r, w) = inclusion_defect(alg, &n, &n, &complement(dim, &[&d.k]));
    report.push("iii", "[k+m, k+m] ⊂ k", r, tol, w);
    let (r, w, lambdas) = conformal_defect(alg, &d.a, &d.m)?;
    report.push("iv+v", "P_m ad_H |_m is conformal", r, tol, w);
    report.quantities.insert("lambda".into(), lambdas);
    let (r, w) = trace_defect(alg, &d.m);
    report.push("vi", "trace ad_Z = 0 for Z in m", r, tol, w);
    if !d.m.is_empty() {
        let om = omega_form(alg, d, tol)?;
        let (i, j) = om.worst_pair;
        report.push("vii", "ω vanishes on [g,g]", om.closedness_residual, tol, Some(Witness::indices(vec![i, j])));
        report.quantities.insert("omega".into(), om.omega);
    }
    Ok(report)
}
