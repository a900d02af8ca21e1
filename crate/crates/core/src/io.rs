//! JSON formats.
//!
//! Algebra file:
//!
//! ```json
//! { "dim": 3, "labels": ["A", "X", "Y"], "gram": [[1,0,0],[0,1,0],[0,0,1]],
//!   "brackets": [ {"i": 0, "j": 1, "coeffs": {"1": 1.0}} ],
//!   "decomposition": {"a": [0], "k": [], "m": [1, 2]} }
//! ```
//!
//! `labels`, `gram` and `decomposition` are optional and each bracket entry
//! needs `i < j`. The ansatz format adds `"params": [names]` and allows the
//! coefficients to be strings in the polynomial grammar of
//! [`PolyExpr::parse`](crate::symbolic::PolyExpr::parse).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{Decomposition, MetricLieAlgebra};
use crate::error::{Error, Result};
use crate::symbolic::{ParametricAlgebra, PolyExpr};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry<T> {
    pub i: usize,
    pub j: usize,
    pub coeffs: BTreeMap<String, T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<f64>>>,
    pub brackets: Vec<BracketEntry<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Decomposition>,
}

/// A coefficient in an ansatz file: a number or a polynomial string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Number(f64),
    Expr(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzFile {
    pub dim: usize,
    pub params: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<f64>>>,
    pub brackets: Vec<BracketEntry<Coefficient>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Decomposition>,
}

/// A list of constraint polynomials over an ansatz's parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintsFile {
    pub constraints: Vec<String>,
}

fn gram_matrix(dim: usize, gram: &Option<Vec<Vec<f64>>>) -> Result<Option<DMatrix<f64>>> {
    let Some(rows) = gram else { return Ok(None) };
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: rows.len() });
    }
    Ok(Some(DMatrix::from_fn(dim, dim, |i, j| rows[i][j])))
}

fn gram_rows(g: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..g.nrows()).map(|i| g.row(i).iter().copied().collect()).collect()
}

fn target(key: &str, dim: usize) -> Result<usize> {
    let k: usize = key.trim().parse().map_err(|_| Error::Parse(format!("bracket target `{key}` is not an index")))?;
    if k >= dim {
        return Err(Error::IndexOutOfRange { index: k, dim });
    }
    Ok(k)
}

fn check_pair(i: usize, j: usize, dim: usize) -> Result<()> {
    if i >= dim || j >= dim {
        return Err(Error::IndexOutOfRange { index: i.max(j), dim });
    }
    if i >= j {
        return Err(Error::Parse(format!("bracket entry ({i},{j}) must have i < j")));
    }
    Ok(())
}

impl AlgebraFile {
    pub fn from_algebra(alg: &MetricLieAlgebra, decomposition: Option<&Decomposition>) -> Self {
        let dim = alg.dim();
        let mut brackets = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                let coeffs: BTreeMap<String, f64> = (0..dim)
                    .filter_map(|k| {
                        let c = alg.structure_constant(i, j, k);
                        (c != 0.0).then(|| (k.to_string(), c))
                    })
                    .collect();
                if !coeffs.is_empty() {
                    brackets.push(BracketEntry { i, j, coeffs });
                }
            }
        }
        Self {
            dim,
            labels: Some(alg.labels().to_vec()),
            gram: (!alg.is_gram_identity()).then(|| gram_rows(alg.gram())),
            brackets,
            decomposition: decomposition.cloned(),
        }
    }

    pub fn to_algebra(&self) -> Result<(MetricLieAlgebra, Option<Decomposition>)> {
        let mut entries = Vec::new();
        for b in &self.brackets {
            check_pair(b.i, b.j, self.dim)?;
            for (k, v) in &b.coeffs {
                if !v.is_finite() {
                    return Err(Error::Parse(format!("non-finite coefficient in bracket ({},{})", b.i, b.j)));
                }
                entries.push((b.i, b.j, target(k, self.dim)?, *v));
            }
        }
        let mut alg = MetricLieAlgebra::new(self.dim, &entries, gram_matrix(self.dim, &self.gram)?)?;
        if let Some(l) = &self.labels {
            alg = alg.with_labels(l.clone())?;
        }
        if let Some(d) = &self.decomposition {
            d.validate(&alg, crate::DEFAULT_TOL)?;
        }
        Ok((alg, self.decomposition.clone()))
    }
}

impl AnsatzFile {
    pub fn from_parametric(p: &ParametricAlgebra, decomposition: Option<&Decomposition>) -> Self {
        let dim = p.dim();
        let mut brackets = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                let coeffs: BTreeMap<String, Coefficient> = (0..dim)
                    .filter(|&k| !p.c(i, j, k).is_zero())
                    .map(|k| (k.to_string(), Coefficient::Expr(p.format(p.c(i, j, k)))))
                    .collect();
                if !coeffs.is_empty() {
                    brackets.push(BracketEntry { i, j, coeffs });
                }
            }
        }
        Self {
            dim,
            params: p.params().to_vec(),
            labels: Some(p.labels().to_vec()),
            gram: p.gram().map(gram_rows),
            brackets,
            decomposition: decomposition.cloned(),
        }
    }

    pub fn to_parametric(&self) -> Result<(ParametricAlgebra, Option<Decomposition>)> {
        let mut seen = self.params.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.params.len() {
            return Err(Error::Parse("duplicate parameter names".into()));
        }
        let mut p = ParametricAlgebra::new(self.dim, self.params.clone());
        if let Some(l) = &self.labels {
            p = p.with_labels(l.clone())?;
        }
        if let Some(g) = gram_matrix(self.dim, &self.gram)? {
            p = p.with_gram(g)?;
        }
        for b in &self.brackets {
            check_pair(b.i, b.j, self.dim)?;
            for (k, v) in &b.coeffs {
                let k = target(k, self.dim)?;
                let value = match v {
                    Coefficient::Expr(s) => p.parse(s)?,
                    Coefficient::Number(x) => {
                        let r = num_rational::BigRational::from_float(*x)
                            .ok_or_else(|| Error::Parse(format!("non-finite coefficient {x}")))?;
                        PolyExpr::constant(self.params.len(), r)
                    }
                };
                if !p.c(b.i, b.j, k).is_zero() {
                    return Err(Error::DuplicateEntry { i: b.i, j: b.j, k });
                }
                p.set(b.i, b.j, k, value)?;
            }
        }
        Ok((p, self.decomposition.clone()))
    }
}

pub fn read_algebra(json: &str) -> Result<(MetricLieAlgebra, Option<Decomposition>)> {
    serde_json::from_str::<AlgebraFile>(json)?.to_algebra()
}

pub fn write_algebra(alg: &MetricLieAlgebra, decomposition: Option<&Decomposition>) -> String {
    serde_json::to_string_pretty(&AlgebraFile::from_algebra(alg, decomposition)).expect("plain data serializes")
}

pub fn read_ansatz(json: &str) -> Result<(ParametricAlgebra, Option<Decomposition>)> {
    serde_json::from_str::<AnsatzFile>(json)?.to_parametric()
}

pub fn write_ansatz(p: &ParametricAlgebra, decomposition: Option<&Decomposition>) -> String {
    serde_json::to_string_pretty(&AnsatzFile::from_parametric(p, decomposition)).expect("plain data serializes")
}

/// Reads `{"constraints": [...]}` or a bare array of polynomial strings.
pub fn read_constraints(json: &str, p: &ParametricAlgebra) -> Result<Vec<PolyExpr>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        File(ConstraintsFile),
        List(Vec<String>),
    }
    let list = match serde_json::from_str::<Either>(json)? {
        Either::File(f) => f.constraints,
        Either::List(l) => l,
    };
    list.iter().map(|s| p.parse(s)).collect()
}
