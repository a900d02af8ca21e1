//! Exact parametric structure constants and the polynomial systems the
//! Jacobi identity imposes on them.

mod poly;
mod variety;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::MetricLieAlgebra;
use crate::error::{Error, Result};

pub use poly::{parse_rational, PolyDisplay, PolyExpr};
pub use variety::{verify_family_constraints, verify_with_seed, Branch, Step, Verification, VarietySampler, VERIFY_POINTS};

/// Structure constants whose entries are polynomials in named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricAlgebra {
    dim: usize,
    params: Vec<String>,
    c: Vec<PolyExpr>,
    labels: Vec<String>,
    gram: Option<DMatrix<f64>>,
}

/// One non-vanishing coordinate of a Jacobi cycle over basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiComponent {
    pub triple: (usize, usize, usize),
    pub component: usize,
    pub poly: PolyExpr,
}

impl ParametricAlgebra {
    /// The abelian algebra over the given parameters.
    pub fn new(dim: usize, params: Vec<String>) -> Self {
        let n = params.len();
        Self {
            dim,
            c: vec![PolyExpr::zero(n); dim * dim * dim],
            labels: (1..=dim).map(|i| format!("e{i}")).collect(),
            params,
            gram: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(Error::LabelCount { expected: self.dim, got: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_gram(mut self, gram: DMatrix<f64>) -> Result<Self> {
        if gram.nrows() != self.dim || gram.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: gram.nrows() });
        }
        self.gram = Some(gram);
        Ok(self)
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    /// Sets `c^k_{ij}` and, antisymmetrically, `c^k_{ji}`.
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: PolyExpr) -> Result<()> {
        for x in [i, j, k] {
            if x >= self.dim {
                return Err(Error::IndexOutOfRange { index: x, dim: self.dim });
            }
        }
        if value.nvars() != self.params.len() {
            return Err(Error::DimensionMismatch { expected: self.params.len(), got: value.nvars() });
        }
        if i == j {
            if value.is_zero() {
                return Ok(());
            }
            return Err(Error::SelfBracket { i });
        }
        let (a, b) = (self.idx(i, j, k), self.idx(j, i, k));
        self.c[b] = -&value;
        self.c[a] = value;
        Ok(())
    }

    /// Parses `value` in the polynomial grammar and sets `c^k_{ij}`.
    pub fn set_str(&mut self, i: usize, j: usize, k: usize, value: &str) -> Result<()> {
        let p = self.parse(value)?;
        self.set(i, j, k, p)
    }

    pub fn parse(&self, s: &str) -> Result<PolyExpr> {
        PolyExpr::parse(s, &self.params)
    }

    pub fn format(&self, p: &PolyExpr) -> String {
        p.to_string_with(&self.params)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram(&self) -> Option<&DMatrix<f64>> {
        self.gram.as_ref()
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &PolyExpr {
        &self.c[self.idx(i, j, k)]
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p == name)
    }

    /// Every non-zero coordinate of `[e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] +
    /// [e_k,[e_i,e_j]]` for `i < j < k`.
    pub fn jacobi_components(&self) -> Vec<JacobiComponent> {
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    for l in 0..d {
                        let mut acc = PolyExpr::zero(self.params.len());
                        for m in 0..d {
                            for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
                                let inner = self.c(y, z, m);
                                if inner.is_zero() {
                                    continue;
                                }
                                let outer = self.c(x, m, l);
                                if !outer.is_zero() {
                                    acc = &acc + &(inner * outer);
                                }
                            }
                        }
                        if !acc.is_zero() {
                            out.push(JacobiComponent { triple: (i, j, k), component: l, poly: acc });
                        }
                    }
                }
            }
        }
        out
    }

    /// Distinct normalized Jacobi equations: exact duplicates and scalar
    /// multiples collapse, linear combinations do not.
    pub fn jacobi_system(&self) -> Vec<PolyExpr> {
        let mut out: Vec<PolyExpr> = Vec::new();
        for c in self.jacobi_components() {
            let p = c.poly.normalize();
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    fn point<T: Clone>(&self, values: &BTreeMap<String, T>) -> Result<Vec<T>> {
        if let Some(extra) = values.keys().find(|k| self.param_index(k).is_none()) {
            return Err(Error::UnknownParameter(extra.clone()));
        }
        self.params
            .iter()
            .map(|p| values.get(p).cloned().ok_or_else(|| Error::MissingParameter(p.clone())))
            .collect()
    }

    /// Exact structure constants at a rational point.
    pub fn evaluate(&self, values: &BTreeMap<String, BigRational>) -> Result<Vec<BigRational>> {
        let x = self.point(values)?;
        Ok(self.c.iter().map(|p| if p.is_zero() { BigRational::zero() } else { p.eval(&x) }).collect())
    }

    /// Numeric algebra at a rational point; the constants are evaluated
    /// exactly and rounded once.
    pub fn substitute(&self, values: &BTreeMap<String, BigRational>) -> Result<MetricLieAlgebra> {
        let c = self.evaluate(values)?;
        let c: Vec<f64> = c.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
        self.build(c)
    }

    /// Numeric algebra at a real point.
    pub fn substitute_f64(&self, values: &BTreeMap<String, f64>) -> Result<MetricLieAlgebra> {
        let x = self.point(values)?;
        let c = self.c.iter().map(|p| if p.is_zero() { 0.0 } else { p.eval_f64(&x) }).collect();
        self.build(c)
    }

    fn build(&self, c: Vec<f64>) -> Result<MetricLieAlgebra> {
        let gram = self.gram.clone().unwrap_or_else(|| DMatrix::identity(self.dim, self.dim));
        MetricLieAlgebra::from_tensor(self.dim, c, gram, self.labels.clone())
    }
}

/// Dimension of the linear span of `polys` (exact row reduction over the
/// rationals, monomials as coordinates).
pub fn span_dimension(polys: &[PolyExpr]) -> usize {
    let mut monomials: Vec<Vec<u32>> = polys.iter().flat_map(|p| p.terms().map(|(e, _)| e.to_vec())).collect();
    monomials.sort();
    monomials.dedup();
    let mut rows: Vec<Vec<BigRational>> = polys
        .iter()
        .map(|p| {
            let mut r = vec![BigRational::zero(); monomials.len()];
            for (e, c) in p.terms() {
                let col = monomials.binary_search_by(|m| m.as_slice().cmp(e)).expect("collected above");
                r[col] = c.clone();
            }
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..monomials.len() {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = &rows[r][col] / &p[col];
                for (x, y) in rows[r].iter_mut().zip(&p) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// A, X, Z, W with [A,X]=λX, [A,Z]=αZ+βW, [A,W]=-βZ+αW, [Z,W]=θX.
    fn one_one_two() -> ParametricAlgebra {
        let mut p = ParametricAlgebra::new(4, names(&["lambda", "alpha", "beta", "theta"]));
        p.set_str(0, 1, 1, "lambda").unwrap();
        p.set_str(0, 2, 2, "alpha").unwrap();
        p.set_str(0, 2, 3, "beta").unwrap();
        p.set_str(0, 3, 2, "-beta").unwrap();
        p.set_str(0, 3, 3, "alpha").unwrap();
        p.set_str(2, 3, 1, "theta").unwrap();
        p
    }

    fn vals(pairs: &[(&str, BigRational)]) -> BTreeMap<String, BigRational> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn abelian_has_no_equations() {
        let p = ParametricAlgebra::new(4, names(&["a"]));
        assert!(p.jacobi_system().is_empty());
    }

    #[test]
    fn single_constraint_of_one_one_two() {
        let p = one_one_two();
        let sys = p.jacobi_system();
        assert_eq!(sys.len(), 1);
        assert_eq!(p.format(&sys[0]), "lambda*theta - 2*alpha*theta");
    }

    #[test]
    fn substitute_matches_hand_evaluation() {
        let p = one_one_two();
        let good = vals(&[("theta", q(0, 1)), ("lambda", q(3, 1)), ("alpha", q(1, 1)), ("beta", q(2, 1))]);
        assert_eq!(p.substitute(&good).unwrap().jacobi_residual().max_residual, 0.0);
        let bad = vals(&[("theta", q(1, 1)), ("lambda", q(3, 1)), ("alpha", q(1, 1)), ("beta", q(0, 1))]);
        assert_eq!(p.substitute(&bad).unwrap().jacobi_residual().max_residual, 1.0);
        let zero = vals(&[("theta", q(0, 1)), ("lambda", q(0, 1)), ("alpha", q(0, 1)), ("beta", q(0, 1))]);
        let g = p.substitute(&zero).unwrap();
        assert!(g.tensor().iter().all(|c| *c == 0.0));
    }

    #[test]
    fn missing_and_unknown_parameters() {
        let p = one_one_two();
        let partial = vals(&[("theta", q(0, 1))]);
        assert!(matches!(p.substitute(&partial), Err(Error::MissingParameter(_))));
        let mut extra = vals(&[("theta", q(0, 1)), ("lambda", q(0, 1)), ("alpha", q(0, 1)), ("beta", q(0, 1))]);
        extra.insert("nu".into(), BigRational::one());
        assert!(matches!(p.substitute(&extra), Err(Error::UnknownParameter(_))));
    }

    #[test]
    fn antisymmetry_is_exact() {
        let p = one_one_two();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert_eq!(p.c(i, j, k), &-p.c(j, i, k));
                }
            }
        }
        let mut p = one_one_two();
        assert!(matches!(p.set_str(1, 1, 0, "theta"), Err(Error::SelfBracket { i: 1 })));
    }

    #[test]
    fn span_dimension_counts_independent_rows() {
        let n = names(&["a", "b"]);
        let ps: Vec<PolyExpr> = ["a*b", "a + b", "2*a*b + a + b", "b"]
            .iter()
            .map(|s| PolyExpr::parse(s, &n).unwrap())
            .collect();
        assert_eq!(span_dimension(&ps), 3);
        assert_eq!(span_dimension(&[]), 0);
    }
}
