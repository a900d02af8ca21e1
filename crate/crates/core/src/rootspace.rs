//! Generalized root spaces of an abelian action `ad(a)` on an invariant
//! subspace `n`, normality tests, and Carnot algebras.

use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Decomposition, MetricLieAlgebra, Subspace};
use crate::conditions::check_morphism;
use crate::error::{Error, Result};
use crate::linalg::{self, complexify, kernel, kernel_c, spectral_norm, spectral_norm_c};
use crate::report::{CheckReport, Witness};

/// Seed of the generic element used to separate root spaces.
const GENERIC_SEED: u64 = 0x5eed_0a11;
/// Seed of the random combinations used by the sampled normality check.
const NORMALITY_SEED: u64 = 0x0a0a_2024;
/// Random elements of `a` tested for normality besides the basis.
pub const NORMALITY_SAMPLES: usize = 20;
const CLUSTER_TOL: f64 = 1e-4;
const MAX_ATTEMPTS: usize = 5;

/// A real generalized root space `n_{α,β}`, the real part of
/// `n^C_λ + n^C_{λ̄}` with `λ = α + iβ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSpace {
    /// Values of `α` on the a-basis.
    pub alpha: Vec<f64>,
    /// Values of `β` on the a-basis; first non-zero entry is positive.
    pub beta: Vec<f64>,
    /// Euclidean-orthonormal (in coordinates) vectors spanning the space.
    pub basis: Vec<Vec<f64>>,
    /// Largest nilpotency order of `(ad_H - α(H))^2 + β(H)^2` (or of
    /// `ad_H - α(H)` when `β = 0`) over the a-basis.
    pub generalized_order: usize,
}

impl RootSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_complex(&self) -> bool {
        self.beta.iter().any(|b| *b != 0.0)
    }

    pub fn vectors(&self) -> Vec<DVector<f64>> {
        self.basis.iter().map(|v| DVector::from_column_slice(v)).collect()
    }
}

fn check_blocks(alg: &MetricLieAlgebra, a_idx: &[usize], n_idx: &[usize]) -> Result<()> {
    let dim = alg.dim();
    for &i in a_idx.iter().chain(n_idx) {
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
    }
    for i in a_idx {
        if n_idx.contains(i) {
            return Err(Error::BadDecomposition(format!("index {i} in both a and n")));
        }
    }
    Ok(())
}

/// Matrices of `ad_H |_n` in n-coordinates, one per a-basis vector.
pub fn restricted_action(
    alg: &MetricLieAlgebra,
    a_idx: &[usize],
    n_idx: &[usize],
    tol: f64,
) -> Result<Vec<DMatrix<f64>>> {
    check_blocks(alg, a_idx, n_idx)?;
    let outside: Vec<usize> = (0..alg.dim()).filter(|i| !n_idx.contains(i)).collect();
    let mut ops = Vec::with_capacity(a_idx.len());
    for &h in a_idx {
        let ad = alg.ad(&alg.basis_vector(h))?;
        let leak = linalg::submatrix(&ad, &outside, n_idx).amax();
        if leak > tol {
            return Err(Error::NotInvariant { residual: leak });
        }
        ops.push(linalg::submatrix(&ad, n_idx, n_idx));
    }
    for (i, p) in ops.iter().enumerate() {
        for q in &ops[i + 1..] {
            let c = spectral_norm(&(p * q - q * p));
            if c > tol {
                return Err(Error::NotAbelianAction { residual: c });
            }
        }
    }
    Ok(ops)
}

struct Cluster {
    re: f64,
    im: f64,
    mult: usize,
}

fn clusters(eigs: &[Complex<f64>]) -> Vec<Cluster> {
    let scale = 1.0 + eigs.iter().fold(0.0f64, |a, e| a.max(e.norm()));
    let tol = CLUSTER_TOL * scale;
    let mut out: Vec<(Complex<f64>, usize)> = Vec::new();
    for e in eigs {
        // conjugate partners are folded into the upper half plane
        let e = if e.im < 0.0 { e.conj() } else { *e };
        match out.iter_mut().find(|(c, _)| (*c - e).norm() <= tol) {
            Some((c, k)) => {
                *c = (*c * *k as f64 + e) / (*k as f64 + 1.0);
                *k += 1;
            }
            None => out.push((e, 1)),
        }
    }
    out.into_iter()
        .map(|(c, k)| {
            let im = if c.im.abs() <= tol { 0.0 } else { c.im };
            // a genuine complex pair was counted twice (λ and λ̄)
            let mult = if im == 0.0 { k } else { k / 2 };
            Cluster { re: c.re, im, mult }
        })
        .collect()
}

/// Eigenvalues via a bounded Schur iteration; a shifted retry covers the
/// rare non-convergent cases (the unbounded variant can spin forever).
fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let n = m.nrows();
    if m.iter().all(|x| *x == 0.0) {
        return vec![Complex::new(0.0, 0.0); n];
    }
    for shift in [0.0, 0.123_456_7, -0.765_432_1] {
        let shifted = m + DMatrix::identity(n, n) * shift;
        if let Some(schur) = Schur::try_new(shifted, f64::EPSILON, 1000 * n.max(1)) {
            return schur.complex_eigenvalues().iter().map(|e| e - shift).collect();
        }
    }
    panic!("Schur iteration failed to converge");
}

fn mat_pow(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// Splits the invariant space spanned by the orthonormal columns of `b`
/// into generalized eigenspaces of `op`. `None` signals a rank mismatch.
fn split_by(b: &DMatrix<f64>, op: &DMatrix<f64>) -> Option<Vec<DMatrix<f64>>> {
    let d = b.ncols();
    if d == 0 {
        return Some(vec![]);
    }
    let r = b.transpose() * op * b;
    let eigs = eigenvalues(&r);
    let cl = clusters(&eigs);
    if cl.len() == 1 {
        return Some(vec![b.clone()]);
    }
    let eye = DMatrix::identity(d, d);
    let mut parts = Vec::with_capacity(cl.len());
    let mut total = 0;
    for c in &cl {
        let shifted = &r - &eye * c.re;
        let (p, expected) = if c.im == 0.0 {
            (mat_pow(&shifted, c.mult), c.mult)
        } else {
            (mat_pow(&(&shifted * &shifted + &eye * (c.im * c.im)), c.mult), 2 * c.mult)
        };
        let k = kernel(&p);
        if k.ncols() != expected {
            return None;
        }
        total += expected;
        parts.push(b * k);
    }
    (total == d).then_some(parts)
}

fn decompose(ops: &[DMatrix<f64>], n: usize, attempt: u64) -> Option<Vec<DMatrix<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(GENERIC_SEED + attempt);
    let mut spaces = vec![DMatrix::identity(n, n)];
    if !ops.is_empty() {
        let mut generic = DMatrix::zeros(n, n);
        for op in ops {
            generic += op * rng.gen_range(0.5..1.5);
        }
        spaces = split_by(&spaces[0], &generic)?;
    }
    for op in ops {
        let mut next = Vec::with_capacity(spaces.len());
        for s in &spaces {
            next.extend(split_by(s, op)?);
        }
        spaces = next;
    }
    Some(spaces)
}

fn nilpotency_order(m: &DMatrix<f64>, max: usize) -> usize {
    let scale = 1.0 + spectral_norm(m);
    let mut p = DMatrix::identity(m.nrows(), m.ncols());
    for k in 1..=max {
        p = &p * m;
        if spectral_norm(&p) <= 1e-7 * scale.powi(k as i32) {
            return k;
        }
    }
    max
}

fn root_of(ops: &[DMatrix<f64>], b: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>, usize) {
    let d = b.ncols();
    let restricted: Vec<DMatrix<f64>> = ops.iter().map(|op| b.transpose() * op * b).collect();
    let alpha: Vec<f64> = restricted.iter().map(|r| r.trace() / d as f64).collect();
    let mut generic = DMatrix::zeros(d, d);
    for (i, r) in restricted.iter().enumerate() {
        generic += r * (1.0 + 0.37 * i as f64);
    }
    let eigs: Vec<Complex<f64>> = if d > 0 {
        eigenvalues(&generic)
    } else {
        vec![]
    };
    let cl = clusters(&eigs);
    let mut beta = vec![0.0; ops.len()];
    if let Some(c) = cl.first().filter(|c| c.im != 0.0 && d.is_multiple_of(2)) {
        let lam = Complex::new(c.re, c.im);
        let half = d / 2;
        let shifted = complexify(&generic) - DMatrix::identity(d, d) * lam;
        let mut p = DMatrix::identity(d, d);
        for _ in 0..half {
            p = &p * &shifted;
        }
        let v = kernel_c(&p);
        if v.ncols() == half {
            for (i, r) in restricted.iter().enumerate() {
                let rv = v.adjoint() * complexify(r) * &v;
                beta[i] = rv.trace().im / half as f64;
            }
        }
        if let Some(first) = beta.iter().copied().find(|x| x.abs() > 1e-12) {
            if first < 0.0 {
                beta.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
    let eye = DMatrix::identity(d, d);
    let complex = beta.iter().any(|x| *x != 0.0);
    let mut order = if d == 0 { 0 } else { 1 };
    for (i, r) in restricted.iter().enumerate() {
        let shifted = r - &eye * alpha[i];
        let o = if complex {
            nilpotency_order(&(&shifted * &shifted + &eye * (beta[i] * beta[i])), d)
        } else {
            nilpotency_order(&shifted, d)
        };
        order = order.max(o);
    }
    (alpha, beta, order)
}

/// Generalized root-space decomposition of `n` under `ad(a)`.
///
/// A generic combination of the a-basis separates the roots; each piece is
/// then split further by every basis operator. On a rank mismatch the
/// generic element is redrawn (up to five times).
pub fn root_decomposition(
    alg: &MetricLieAlgebra,
    a_idx: &[usize],
    n_idx: &[usize],
    tol: f64,
) -> Result<Vec<RootSpace>> {
    let ops = restricted_action(alg, a_idx, n_idx, tol)?;
    let n = n_idx.len();
    let spaces = (0..MAX_ATTEMPTS as u64)
        .find_map(|attempt| decompose(&ops, n, attempt))
        .ok_or_else(|| Error::RootSpaceMismatch("generalized eigenspaces could not be separated".into()))?;
    let mut roots: Vec<RootSpace> = spaces
        .iter()
        .filter(|b| b.ncols() > 0)
        .map(|b| {
            let (alpha, beta, generalized_order) = root_of(&ops, b);
            let basis = (0..b.ncols())
                .map(|c| {
                    let mut full = vec![0.0; alg.dim()];
                    for (p, &i) in n_idx.iter().enumerate() {
                        full[i] = b[(p, c)];
                    }
                    full
                })
                .collect();
            RootSpace { alpha, beta, basis, generalized_order }
        })
        .collect();
    roots.sort_by(|x, y| {
        let key = |r: &RootSpace| r.alpha.iter().chain(&r.beta).copied().collect::<Vec<f64>>();
        key(x)
            .iter()
            .zip(key(y).iter())
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(roots)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub is_normal: bool,
    pub is_almost_normal: bool,
    /// `‖L L* - L* L‖` (operator norm).
    pub commutator_norm: f64,
    /// Smallest eigenvalue of `N(L) = ((L+L*)^2 + [L+L*, L-L*]) / 4`.
    pub min_eig_n: f64,
}

/// `N(L)` for a complex square matrix with the standard Hermitian product.
pub fn almost_normal_operator(l: &DMatrix<Complex<f64>>) -> DMatrix<Complex<f64>> {
    let ls = l.adjoint();
    let s = l + &ls;
    let k = l - &ls;
    (&s * &s + &s * &k - &k * &s) * Complex::new(0.25, 0.0)
}

pub fn normality_report(l: &DMatrix<Complex<f64>>, tol: f64) -> Result<NormalityReport> {
    if l.nrows() != l.ncols() {
        return Err(Error::DimensionMismatch { expected: l.nrows(), got: l.ncols() });
    }
    if l.is_empty() {
        return Ok(NormalityReport { is_normal: true, is_almost_normal: true, commutator_norm: 0.0, min_eig_n: 0.0 });
    }
    let ls = l.adjoint();
    let commutator_norm = spectral_norm_c(&(l * &ls - &ls * l));
    let n = almost_normal_operator(l);
    let herm_defect = (&n - n.adjoint()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
    debug_assert!(herm_defect <= 1e-12 * (1.0 + n.iter().fold(0.0f64, |a, z| a.max(z.norm()))));
    let n = (&n + n.adjoint()) * Complex::new(0.5, 0.0);
    let min_eig_n = SymmetricEigen::new(n).eigenvalues.min();
    Ok(NormalityReport {
        is_normal: commutator_norm <= tol,
        is_almost_normal: min_eig_n >= -tol,
        commutator_norm,
        min_eig_n,
    })
}

/// Matrix of `ad_h` on the invariant subspace `q` in its orthonormal basis.
fn compress(alg: &MetricLieAlgebra, h: &DVector<f64>, q: &Subspace) -> Result<DMatrix<f64>> {
    let ad = alg.ad(h)?;
    let qm = q.matrix(alg.dim());
    Ok(qm.transpose() * alg.gram() * ad * qm)
}

/// Checks the root-space criterion for a harmonic morphism `S -> R^m` on a
/// solvable metric algebra `s = a + n`, with `m` the given root space.
///
/// Item `i` tests normality of `ad_H` on the root space for the a-basis and
/// for [`NORMALITY_SAMPLES`] seeded random elements of `a` (normality is not
/// linear in `H`, so this part is sampled). Item `i-lemma` checks the exact,
/// linear consequence `(ad_H + ad_H^t)|_root = 2α(H) I` on the basis. When
/// everything passes, the algebra is rewritten in an adapted orthonormal
/// basis `a | root⊥∩n | root` and [`check_morphism`] is run as item
/// `theorem`.
pub fn check_hadamard_morphism(
    alg: &MetricLieAlgebra,
    a_idx: &[usize],
    n_idx: &[usize],
    root: &RootSpace,
    tol: f64,
) -> Result<CheckReport> {
    check_blocks(alg, a_idx, n_idx)?;
    if a_idx.len() + n_idx.len() != alg.dim() {
        return Err(Error::BadDecomposition("a and n must cover the basis".into()));
    }
    let dim = alg.dim();
    if root.dim() < 2 {
        return Err(Error::RootSpaceMismatch(format!("root space has dimension {} < 2", root.dim())));
    }
    if root.alpha.len() != a_idx.len() || root.beta.len() != a_idx.len() {
        return Err(Error::RootSpaceMismatch("root covectors do not match a".into()));
    }
    let vecs = root.vectors();
    if vecs.iter().any(|v| v.len() != dim) {
        return Err(Error::RootSpaceMismatch("basis vectors have the wrong length".into()));
    }
    let outside: Vec<usize> = (0..dim).filter(|i| !n_idx.contains(i)).collect();
    for v in &vecs {
        if outside.iter().any(|&i| v[i].abs() > tol) {
            return Err(Error::RootSpaceMismatch("root space is not inside n".into()));
        }
    }
    let q = Subspace::span(alg, &vecs);
    if q.dim() != root.dim() {
        return Err(Error::RootSpaceMismatch("root basis is linearly dependent".into()));
    }
    for &h in a_idx {
        let ad = alg.ad(&alg.basis_vector(h))?;
        for v in &q.basis {
            let image = &ad * v;
            let leak = alg.norm(&(&image - q.project(alg, &image)));
            if leak > tol {
                return Err(Error::RootSpaceMismatch(format!("root space not invariant under ad_{h}")));
            }
        }
    }
    let n_space = Subspace::from_indices(alg, n_idx);
    let perp = q.complement_in(alg, &n_space);

    let mut report = CheckReport::new();

    // (i) normality on the basis and on sampled combinations
    let mut rng = ChaCha8Rng::seed_from_u64(NORMALITY_SEED);
    let mut probes: Vec<(DVector<f64>, Witness)> =
        a_idx.iter().map(|&h| (alg.basis_vector(h), Witness::indices(vec![h]))).collect();
    if a_idx.len() > 1 {
        for _ in 0..NORMALITY_SAMPLES {
            let mut h = DVector::zeros(dim);
            for &i in a_idx {
                h[i] = rng.gen_range(-1.0..1.0);
            }
            let w = Witness { indices: vec![], vectors: vec![h.iter().copied().collect()] };
            probes.push((h, w));
        }
    }
    let mut worst = 0.0;
    let mut witness = None;
    for (h, w) in &probes {
        let r = compress(alg, h, &q)?;
        let c = spectral_norm(&(&r * r.transpose() - r.transpose() * &r));
        if c > worst {
            worst = c;
            witness = Some(w.clone());
        }
    }
    report.push("i", "ad_H normal on the root space", worst, tol, witness);

    let mut worst = 0.0;
    let mut witness = None;
    for (p, &h) in a_idx.iter().enumerate() {
        let r = compress(alg, &alg.basis_vector(h), &q)?;
        let d = r.nrows();
        let defect = spectral_norm(&(&r + r.transpose() - DMatrix::identity(d, d) * (2.0 * root.alpha[p])));
        if defect > worst {
            worst = defect;
            witness = Some(Witness::indices(vec![h]));
        }
    }
    report.push("i-lemma", "(ad_H + ad_H^t) = 2 α(H) I on the root space", worst, tol, witness);

    // (ii) [n, n] ⊥ root
    let mut worst = 0.0;
    let mut witness = None;
    for (p, &i) in n_idx.iter().enumerate() {
        for &j in &n_idx[p + 1..] {
            let b = alg.bracket_basis(i, j);
            let r = alg.norm(&q.project(alg, &b));
            if r > worst {
                worst = r;
                witness = Some(Witness::indices(vec![i, j]));
            }
        }
    }
    report.push("ii", "[n,n] ⊂ root⊥ ∩ n", worst, tol, witness);

    // (iii) ad_H preserves root⊥ ∩ n
    let mut worst = 0.0;
    let mut witness = None;
    for &h in a_idx {
        let ad = alg.ad(&alg.basis_vector(h))?;
        for u in &perp.basis {
            let image = &ad * u;
            let r = alg.norm(&(&image - perp.project(alg, &image)));
            if r > worst {
                worst = r;
                witness = Some(Witness { indices: vec![h], vectors: vec![u.iter().copied().collect()] });
            }
        }
    }
    report.push("iii", "ad_H(root⊥ ∩ n) ⊂ root⊥ ∩ n", worst, tol, witness);

    if report.passed() {
        let (adapted, d) = adapted_algebra(alg, a_idx, &perp, &q)?;
        let inner = check_morphism(&adapted, &d, tol)?;
        let worst = inner.items.iter().fold(0.0f64, |a, i| a.max(i.residual));
        report.push("theorem", "induced a + k + m satisfies the morphism conditions", worst, tol, None);
        if !inner.passed() {
            let last = report.items.last_mut().expect("just pushed");
            last.passed = false;
            report.notes.push(format!("induced decomposition failed {:?}", inner.failed_ids()));
            report.refresh();
        }
        if let Some(l) = inner.quantities.get("lambda") {
            report.quantities.insert("lambda".into(), l.clone());
        }
    }
    Ok(report)
}

/// The algebra in the basis `a | k | m` with `k = perp`, `m = q`.
pub fn adapted_algebra(
    alg: &MetricLieAlgebra,
    a_idx: &[usize],
    perp: &Subspace,
    q: &Subspace,
) -> Result<(MetricLieAlgebra, Decomposition)> {
    let dim = alg.dim();
    let mut cols: Vec<DVector<f64>> = a_idx.iter().map(|&h| alg.basis_vector(h)).collect();
    cols.extend(perp.basis.iter().cloned());
    cols.extend(q.basis.iter().cloned());
    if cols.len() != dim {
        return Err(Error::BadDecomposition("adapted basis does not span the algebra".into()));
    }
    let mut labels: Vec<String> = a_idx.iter().map(|&h| alg.labels()[h].clone()).collect();
    labels.extend((1..=perp.dim()).map(|i| format!("k{i}")));
    labels.extend((1..=q.dim()).map(|i| format!("m{i}")));
    let p = DMatrix::from_columns(&cols);
    let adapted = alg.change_basis(&p, labels)?;
    let na = a_idx.len();
    let nk = perp.dim();
    let d = Decomposition::new((0..na).collect(), (na..na + nk).collect(), (na + nk..dim).collect());
    Ok((adapted, d))
}

/// One graded bracket `[X_{r,i}, X_{s,j}] = Σ target_t X_{r+s,t}`.
/// Layers `r`, `s` are 1-based; `i`, `j` index within their layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarnotBracket {
    pub r: usize,
    pub s: usize,
    pub i: usize,
    pub j: usize,
    pub target: Vec<f64>,
}

/// Carnot algebra `a + n_1 + ... + n_k` with `ad_H = r` on `n_r`, together
/// with the decomposition `m = n_1`, `k = n_2 + ... + n_k`.
pub fn build_carnot(
    layer_dims: &[usize],
    brackets: &[CarnotBracket],
    tol: f64,
) -> Result<(MetricLieAlgebra, Decomposition)> {
    if layer_dims.is_empty() || layer_dims.contains(&0) {
        return Err(Error::GradingViolation("layers must be non-empty".into()));
    }
    let depth = layer_dims.len();
    let mut offsets = Vec::with_capacity(depth);
    let mut next = 1;
    for &d in layer_dims {
        offsets.push(next);
        next += d;
    }
    let dim = next;
    let mut labels = vec!["H".to_string()];
    for (r, &d) in layer_dims.iter().enumerate() {
        labels.extend((1..=d).map(|i| format!("X{}_{}", r + 1, i)));
    }
    let mut entries = Vec::new();
    for (r, &d) in layer_dims.iter().enumerate() {
        for i in 0..d {
            let x = offsets[r] + i;
            entries.push((0, x, x, (r + 1) as f64));
        }
    }
    for b in brackets {
        if b.r == 0 || b.s == 0 || b.r > depth || b.s > depth {
            return Err(Error::GradingViolation(format!("layer ({}, {}) out of range", b.r, b.s)));
        }
        if b.i >= layer_dims[b.r - 1] || b.j >= layer_dims[b.s - 1] {
            return Err(Error::GradingViolation("element index outside its layer".into()));
        }
        let x = offsets[b.r - 1] + b.i;
        let y = offsets[b.s - 1] + b.j;
        if x == y {
            return Err(Error::GradingViolation("self-bracket".into()));
        }
        let t = b.r + b.s;
        if t > depth {
            if b.target.iter().any(|v| *v != 0.0) {
                return Err(Error::GradingViolation(format!(
                    "[n_{}, n_{}] must vanish: layer {t} does not exist",
                    b.r, b.s
                )));
            }
            continue;
        }
        if b.target.len() != layer_dims[t - 1] {
            return Err(Error::GradingViolation(format!(
                "target of [n_{}, n_{}] must have length {}",
                b.r,
                b.s,
                layer_dims[t - 1]
            )));
        }
        for (p, &v) in b.target.iter().enumerate() {
            if v != 0.0 {
                entries.push((x, y, offsets[t - 1] + p, v));
            }
        }
    }
    let alg = MetricLieAlgebra::new(dim, &entries, None)?.with_labels(labels)?;
    let jr = alg.jacobi_residual();
    if jr.max_residual > tol {
        return Err(Error::JacobiViolation { residual: jr.max_residual, triple: jr.worst_triple });
    }
    let m: Vec<usize> = (offsets[0]..offsets[0] + layer_dims[0]).collect();
    let k: Vec<usize> = (offsets[0] + layer_dims[0]..dim).collect();
    Ok((alg, Decomposition::new(vec![0], k, m)))
}
