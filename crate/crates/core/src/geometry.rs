//! Left-invariant Riemannian geometry computed from structure constants.
//!
//! Curvature convention:
//!
//! ```text
//! R(X,Y)Z = ∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_[X,Y] Z
//! K(X,Y)  = <R(X,Y)Y, X> / (|X|^2 |Y|^2 - <X,Y>^2)
//! ```
//!
//! so that the hyperbolic plane `[A,X] = X` has `K = -1` and a bi-invariant
//! metric has `K(X,Y) = |[X,Y]|^2 / 4` for orthonormal `X, Y`.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{MetricLieAlgebra, Subspace};
use crate::error::{Error, Result};
use crate::DEFAULT_TOL;

/// Levi-Civita connection on left-invariant fields.
///
/// `gamma(i, j, k) = <∇_{e_i} e_j, e_k>` (lowered with the gram matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoeffs {
    dim: usize,
    lowered: Vec<f64>,
    raised: Vec<f64>,
}

impl ConnectionCoeffs {
    /// Koszul formula, without checking the Jacobi identity.
    pub fn koszul(alg: &MetricLieAlgebra) -> Self {
        let n = alg.dim();
        let g = alg.gram();
        // lowered bracket <[e_a, e_b], e_d>
        let mut cl = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    cl[(a * n + b) * n + d] =
                        (0..n).map(|l| alg.structure_constant(a, b, l) * g[(l, d)]).sum();
                }
            }
        }
        let at = |a: usize, b: usize, d: usize| cl[(a * n + b) * n + d];
        let mut lowered = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    lowered[(i * n + j) * n + k] = 0.5 * (at(i, j, k) - at(j, k, i) + at(k, i, j));
                }
            }
        }
        let ginv = alg.gram_inv();
        let mut raised = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    raised[(i * n + j) * n + k] =
                        (0..n).map(|l| lowered[(i * n + j) * n + l] * ginv[(l, k)]).sum();
                }
            }
        }
        Self { dim: n, lowered, raised }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> f64 {
        self.lowered[(i * self.dim + j) * self.dim + k]
    }

    /// `∇_u v` as a coordinate vector.
    pub fn covariant(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let mut out = vec![0.0; self.dim];
        nabla_into(self.dim, &self.raised, u.as_slice(), v.as_slice(), &mut out);
        DVector::from_vec(out)
    }

    /// `<∇_u v, w>` for arbitrary vectors.
    pub fn lowered_form(&self, u: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let uv = u[i] * v[j];
                if uv == 0.0 {
                    continue;
                }
                for k in 0..n {
                    s += uv * w[k] * self.lowered[(i * n + j) * n + k];
                }
            }
        }
        s
    }

    /// Max of `|Γ(i,j,k) + Γ(i,k,j)|`; zero for a metric connection.
    pub fn metric_compatibility_residual(&self) -> f64 {
        let n = self.dim;
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    r = r.max((self.gamma(i, j, k) + self.gamma(i, k, j)).abs());
                }
            }
        }
        r
    }

    /// Max of `|Γ(i,j,k) - Γ(j,i,k) - <[e_i,e_j], e_k>|`.
    pub fn torsion_residual(&self, alg: &MetricLieAlgebra) -> f64 {
        let n = self.dim;
        let g = alg.gram();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let br: f64 = (0..n).map(|l| alg.structure_constant(i, j, l) * g[(l, k)]).sum();
                    r = r.max((self.gamma(i, j, k) - self.gamma(j, i, k) - br).abs());
                }
            }
        }
        r
    }
}

fn nabla_into(n: usize, raised: &[f64], u: &[f64], v: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for i in 0..n {
        if u[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            let w = u[i] * v[j];
            if w == 0.0 {
                continue;
            }
            let row = &raised[(i * n + j) * n..(i * n + j + 1) * n];
            for (o, g) in out.iter_mut().zip(row) {
                *o += w * g;
            }
        }
    }
}

/// Levi-Civita connection, refusing non-Lie brackets.
pub fn connection_coeffs(alg: &MetricLieAlgebra, tol: f64) -> Result<ConnectionCoeffs> {
    let jr = alg.jacobi_residual();
    if jr.max_residual > tol {
        return Err(Error::NotALieAlgebra { residual: jr.max_residual });
    }
    Ok(ConnectionCoeffs::koszul(alg))
}

/// Cached curvature evaluation on raw coordinate slices.
pub struct CurvatureEvaluator<'a> {
    alg: &'a MetricLieAlgebra,
    conn: ConnectionCoeffs,
}

impl<'a> CurvatureEvaluator<'a> {
    pub fn new(alg: &'a MetricLieAlgebra) -> Self {
        Self { alg, conn: ConnectionCoeffs::koszul(alg) }
    }

    pub fn connection(&self) -> &ConnectionCoeffs {
        &self.conn
    }

    fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let g = self.alg.gram();
        let n = x.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += x[i] * g[(i, j)] * y[j];
            }
        }
        s
    }

    /// `R(x,y)z`.
    pub fn riemann(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.conn.dim;
        let r = &self.conn.raised;
        let mut t1 = vec![0.0; n];
        let mut t2 = vec![0.0; n];
        let mut out = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        nabla_into(n, r, y, z, &mut t1);
        nabla_into(n, r, x, &t1, &mut out);
        nabla_into(n, r, x, z, &mut t2);
        nabla_into(n, r, y, &t2, &mut tmp);
        for (o, t) in out.iter_mut().zip(&tmp) {
            *o -= t;
        }
        let br = self.alg.bracket_unchecked(x, y);
        nabla_into(n, r, br.as_slice(), z, &mut tmp);
        for (o, t) in out.iter_mut().zip(&tmp) {
            *o -= t;
        }
        out
    }

    /// Numerator and denominator of the sectional curvature.
    pub fn sectional_parts(&self, x: &[f64], y: &[f64]) -> (f64, f64) {
        let ryy = self.riemann(x, y, y);
        let num = self.inner(&ryy, x);
        let xy = self.inner(x, y);
        let den = self.inner(x, x) * self.inner(y, y) - xy * xy;
        (num, den)
    }

    pub fn sectional(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let (num, den) = self.sectional_parts(x, y);
        let scale = self.inner(x, x) * self.inner(y, y);
        if !(den > DEFAULT_TOL * scale) {
            return Err(Error::DegeneratePlane { denominator: den });
        }
        Ok(num / den)
    }

    /// Gram-orthonormalizes the pair, or `None` if it is degenerate.
    fn orthonormalize(&self, x: &[f64], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        let nx = self.inner(x, x).sqrt();
        if !(nx > 1e-12) {
            return None;
        }
        let x: Vec<f64> = x.iter().map(|v| v / nx).collect();
        let mut y = y.to_vec();
        for _ in 0..2 {
            let p = self.inner(&y, &x);
            for (yv, xv) in y.iter_mut().zip(&x) {
                *yv -= p * xv;
            }
        }
        let ny = self.inner(&y, &y).sqrt();
        if !(ny > 1e-8) {
            return None;
        }
        y.iter_mut().for_each(|v| *v /= ny);
        Some((x, y))
    }

    fn k_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let (num, den) = self.sectional_parts(x, y);
        num / den
    }

    fn numeric_gradient(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        const H: f64 = 1e-5;
        let n = x.len();
        let mut gx = vec![0.0; n];
        let mut gy = vec![0.0; n];
        let mut xp = x.to_vec();
        let mut yp = y.to_vec();
        for i in 0..n {
            let orig = xp[i];
            xp[i] = orig + H;
            let fp = self.k_unchecked(&xp, y);
            xp[i] = orig - H;
            let fm = self.k_unchecked(&xp, y);
            xp[i] = orig;
            gx[i] = (fp - fm) / (2.0 * H);

            let orig = yp[i];
            yp[i] = orig + H;
            let fp = self.k_unchecked(x, &yp);
            yp[i] = orig - H;
            let fm = self.k_unchecked(x, &yp);
            yp[i] = orig;
            gy[i] = (fp - fm) / (2.0 * H);
        }
        (gx, gy)
    }

    /// Projected gradient ascent of `K` from an orthonormal frame.
    fn ascend(&self, x: Vec<f64>, y: Vec<f64>) -> (f64, Vec<f64>, Vec<f64>) {
        const MAX_ITERS: usize = 150;
        let (mut x, mut y) = (x, y);
        let mut f = self.k_unchecked(&x, &y);
        let mut step = 0.5;
        for _ in 0..MAX_ITERS {
            let (gx, gy) = self.numeric_gradient(&x, &y);
            let g2: f64 = gx.iter().chain(&gy).map(|v| v * v).sum();
            if !(g2 > 1e-24) {
                break;
            }
            let mut t = step;
            let mut accepted = None;
            for _ in 0..40 {
                let xs: Vec<f64> = x.iter().zip(&gx).map(|(a, b)| a + t * b).collect();
                let ys: Vec<f64> = y.iter().zip(&gy).map(|(a, b)| a + t * b).collect();
                if let Some((xn, yn)) = self.orthonormalize(&xs, &ys) {
                    let fnew = self.k_unchecked(&xn, &yn);
                    if fnew >= f + 1e-4 * t * g2 {
                        accepted = Some((fnew, xn, yn));
                        break;
                    }
                }
                t *= 0.5;
            }
            match accepted {
                Some((fnew, xn, yn)) => {
                    let gain = fnew - f;
                    f = fnew;
                    x = xn;
                    y = yn;
                    step = (t * 2.0).min(16.0);
                    if gain < 1e-15 {
                        break;
                    }
                }
                None => break,
            }
        }
        (f, x, y)
    }
}

/// Sectional curvature of the plane spanned by `x` and `y`.
pub fn sectional_curvature(alg: &MetricLieAlgebra, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    for v in [x, y] {
        if v.len() != alg.dim() {
            return Err(Error::DimensionMismatch { expected: alg.dim(), got: v.len() });
        }
    }
    CurvatureEvaluator::new(alg).sectional(x.as_slice(), y.as_slice())
}

/// Largest sectional curvature found by a seeded scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub max_k: f64,
    pub witness: (Vec<f64>, Vec<f64>),
    pub samples_used: usize,
    pub starts: usize,
}

/// Number of best samples refined by local ascent.
pub const SCAN_STARTS: usize = 8;

/// Random plane sampling followed by local maximization of `K` over the
/// Grassmannian of 2-planes.
///
/// Samples are drawn from a ChaCha stream seeded with `seed` before any
/// parallel work, so the result depends only on `(alg, budget, seed)`.
/// This is evidence of non-positivity, not a certificate.
pub fn curvature_scan(alg: &MetricLieAlgebra, budget: usize, seed: u64, tol: f64) -> Result<ScanResult> {
    let n = alg.dim();
    if n < 2 {
        return Err(Error::TooSmall { m: n });
    }
    if budget == 0 {
        return Err(Error::TooSmall { m: 0 });
    }
    let jr = alg.jacobi_residual();
    if jr.max_residual > tol {
        return Err(Error::NotALieAlgebra { residual: jr.max_residual });
    }
    let eval = CurvatureEvaluator::new(alg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frames = Vec::with_capacity(budget);
    while frames.len() < budget {
        let x: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Some(f) = eval.orthonormalize(&x, &y) {
            frames.push(f);
        }
    }
    let values: Vec<f64> = frames.par_iter().map(|(x, y)| eval.k_unchecked(x, y)).collect();
    let mut order: Vec<usize> = (0..budget).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let starts = SCAN_STARTS.min(budget);
    let refined: Vec<(f64, Vec<f64>, Vec<f64>)> = order[..starts]
        .par_iter()
        .map(|&i| {
            let (x, y) = frames[i].clone();
            eval.ascend(x, y)
        })
        .collect();
    let mut best = 0;
    for (i, r) in refined.iter().enumerate() {
        if r.0 > refined[best].0 {
            best = i;
        }
    }
    let (_, x, y) = refined[best].clone();
    let max_k = eval.k_unchecked(&x, &y);
    Ok(ScanResult { max_k, witness: (x, y), samples_used: budget, starts })
}

fn check_orthonormal(alg: &MetricLieAlgebra, v: &Subspace, tol: f64) -> Result<()> {
    let r = v.orthonormality_residual(alg);
    if r > tol.max(1e-12) {
        return Err(Error::NotOrthonormal { residual: r });
    }
    for b in &v.basis {
        if b.len() != alg.dim() {
            return Err(Error::DimensionMismatch { expected: alg.dim(), got: b.len() });
        }
    }
    Ok(())
}

/// Mean curvature vector `Σ ∇_{f_i} f_i` of the left-invariant distribution
/// spanned by `v`, projected onto its orthogonal complement.
pub fn mean_curvature(alg: &MetricLieAlgebra, v: &Subspace, tol: f64) -> Result<DVector<f64>> {
    check_orthonormal(alg, v, tol)?;
    let conn = ConnectionCoeffs::koszul(alg);
    let mut mu = DVector::zeros(alg.dim());
    for f in &v.basis {
        mu += conn.covariant(f, f);
    }
    let tangential = v.project(alg, &mu);
    Ok(mu - tangential)
}

/// Largest norm of the second fundamental form `B(f_i, f_j)` of the
/// distribution spanned by `v`; zero iff it is totally geodesic.
pub fn second_fundamental_norm(alg: &MetricLieAlgebra, v: &Subspace, tol: f64) -> Result<f64> {
    check_orthonormal(alg, v, tol)?;
    let conn = ConnectionCoeffs::koszul(alg);
    let mut worst: f64 = 0.0;
    for (i, fi) in v.basis.iter().enumerate() {
        for fj in &v.basis[i..] {
            let s = (conn.covariant(fi, fj) + conn.covariant(fj, fi)) * 0.5;
            let normal = &s - v.project(alg, &s);
            worst = worst.max(alg.norm(&normal));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbolic_plane() -> MetricLieAlgebra {
        MetricLieAlgebra::new(2, &[(0, 1, 1, 1.0)], None).unwrap()
    }

    fn so3() -> MetricLieAlgebra {
        MetricLieAlgebra::new(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)], None).unwrap()
    }

    #[test]
    fn abelian_is_flat() {
        let g = MetricLieAlgebra::new(3, &[], None).unwrap();
        let conn = connection_coeffs(&g, DEFAULT_TOL).unwrap();
        assert!(conn.lowered.iter().all(|&v| v == 0.0));
        let x = DVector::from_vec(vec![1.0, 2.0, 0.0]);
        let y = DVector::from_vec(vec![0.0, 1.0, 3.0]);
        assert_eq!(sectional_curvature(&g, &x, &y).unwrap(), 0.0);
        assert_eq!(curvature_scan(&g, 50, 0, DEFAULT_TOL).unwrap().max_k, 0.0);
        let v = Subspace::from_indices(&g, &[0, 2]);
        assert_eq!(mean_curvature(&g, &v, DEFAULT_TOL).unwrap(), DVector::zeros(3));
    }

    #[test]
    fn hyperbolic_plane_connection_and_curvature() {
        let g = hyperbolic_plane();
        let conn = connection_coeffs(&g, DEFAULT_TOL).unwrap();
        // <∇_X X, A> = <[A,X], X> = 1 and ∇_A A = 0
        assert!((conn.gamma(1, 1, 0) - 1.0).abs() < 1e-15);
        assert_eq!(conn.gamma(0, 0, 0), 0.0);
        assert_eq!(conn.gamma(0, 0, 1), 0.0);
        let k = sectional_curvature(&g, &g.basis_vector(0), &g.basis_vector(1)).unwrap();
        assert!((k + 1.0).abs() < 1e-12);
    }

    #[test]
    fn bi_invariant_so3() {
        let g = so3();
        let conn = connection_coeffs(&g, DEFAULT_TOL).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let half = g.bracket_basis(i, j) * 0.5;
                let nab = conn.covariant(&g.basis_vector(i), &g.basis_vector(j));
                assert!((nab - half).amax() < 1e-15);
            }
        }
        let k = sectional_curvature(&g, &g.basis_vector(0), &g.basis_vector(1)).unwrap();
        assert!((k - 0.25).abs() < 1e-12);
    }

    #[test]
    fn degenerate_plane_rejected() {
        let g = hyperbolic_plane();
        let x = g.basis_vector(0);
        let y = &x * 2.0;
        assert!(matches!(sectional_curvature(&g, &x, &y), Err(Error::DegeneratePlane { .. })));
    }

    #[test]
    fn mean_curvature_of_k_line() {
        // X, Z, W with [Z, X] = X
        let g = MetricLieAlgebra::new(3, &[(1, 0, 0, 1.0)], None).unwrap();
        let v = Subspace::from_indices(&g, &[0]);
        let mu = mean_curvature(&g, &v, DEFAULT_TOL).unwrap();
        assert!((mu[1] - 1.0).abs() < 1e-15);
        assert!(mu[2].abs() < 1e-15);
        assert!(mu[0].abs() < 1e-15);
    }

    #[test]
    fn not_orthonormal_rejected() {
        let g = hyperbolic_plane();
        let v = Subspace { basis: vec![g.basis_vector(0) * 2.0] };
        assert!(matches!(mean_curvature(&g, &v, DEFAULT_TOL), Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn scan_is_deterministic_and_sound() {
        let g = so3();
        let a = curvature_scan(&g, 200, 7, DEFAULT_TOL).unwrap();
        let b = curvature_scan(&g, 200, 7, DEFAULT_TOL).unwrap();
        assert_eq!(a, b);
        let k = sectional_curvature(
            &g,
            &DVector::from_vec(a.witness.0.clone()),
            &DVector::from_vec(a.witness.1.clone()),
        )
        .unwrap();
        assert!((k - a.max_k).abs() < 1e-12);
        // every plane of the round 3-sphere of radius 2 has K = 1/4
        assert!((a.max_k - 0.25).abs() < 1e-10);
    }

    #[test]
    fn scan_refuses_broken_bracket() {
        let g = MetricLieAlgebra::new(
            4,
            &[(0, 1, 1, 1.0), (0, 2, 2, 0.6), (0, 3, 3, 0.6), (2, 3, 1, 1.0)],
            None,
        )
        .unwrap();
        assert!(matches!(curvature_scan(&g, 10, 0, DEFAULT_TOL), Err(Error::NotALieAlgebra { .. })));
    }
}
