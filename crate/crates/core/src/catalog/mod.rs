//! Parametrised example families, each with its adapted decomposition,
//! the polynomial constraints its parameters satisfy and, where known, an
//! inequality predicate on the parameters ensuring non-positive curvature.
//!
//! Parameters that a family eliminates (e.g. `lambda = -b*mu/a`) are
//! computed from the free ones. They may still be passed, in which case
//! they must agree with the computed value.

mod families;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Decomposition, MetricLieAlgebra};
use crate::error::{Error, Result};
use crate::symbolic::{ParametricAlgebra, PolyExpr};
use families::{Ansatz, Constraints, Def, Free, Rule, FAMILIES};

/// Tolerance for constraint checks on real (non-rational) input.
pub const REAL_CONSTRAINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamRole {
    Free,
    Derived,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub role: ParamRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateSpec {
    /// Strict inequalities `lhs < rhs`.
    pub inequalities: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub id: String,
    pub title: String,
    /// `(dim a, dim k, dim m)` at `n` (for the families that take one).
    pub dims: (usize, usize, usize),
    /// Whether the family takes the size parameter `n`.
    pub takes_n: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub params: Vec<ParamSpec>,
    pub constraints: Vec<String>,
    /// Denominators that must not vanish.
    pub denominators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<PredicateSpec>,
    /// A documented parameter point at which the family instantiates.
    pub sample_point: BTreeMap<String, String>,
}

/// A family member: numeric algebra, decomposition and every parameter.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub n: Option<usize>,
    pub algebra: MetricLieAlgebra,
    pub decomposition: Decomposition,
    pub values: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateResult {
    pub satisfied: bool,
    /// `(inequality, rhs - lhs)`.
    pub margins: Vec<(String, f64)>,
}

fn def(id: &str) -> Result<&'static Def> {
    FAMILIES.iter().find(|d| d.id == id).ok_or_else(|| Error::UnknownFamily(id.to_string()))
}

fn takes_n(d: &Def) -> bool {
    matches!(d.ansatz, Ansatz::DiagonalAction | Ansatz::UnitAction | Ansatz::Carnot)
}

fn resolve_n(d: &Def, n: Option<usize>) -> Result<Option<usize>> {
    match (takes_n(d), n) {
        (false, _) => Ok(None),
        (true, Some(0)) => Err(Error::TooSmall { m: 0 }),
        (true, Some(n)) => Ok(Some(n)),
        (true, None) if d.ansatz == Ansatz::Carnot => Ok(Some(1)),
        (true, None) => Err(Error::MissingParameter("n".into())),
    }
}

pub fn list_families() -> Vec<FamilySpec> {
    FAMILIES.iter().map(|d| spec_of(d, d.sample_n).expect("catalog tables are well formed")).collect()
}

pub fn family_spec(id: &str, n: Option<usize>) -> Result<FamilySpec> {
    let d = def(id)?;
    spec_of(d, n.or(d.sample_n))
}

/// The parametric ansatz a family specialises, and its decomposition.
pub fn ansatz(id: &str, n: Option<usize>) -> Result<(ParametricAlgebra, Decomposition)> {
    let d = def(id)?;
    families::build(d.ansatz, resolve_n(d, n)?.unwrap_or(1))
}

/// The family's constraint polynomials over the ansatz parameters.
pub fn constraints(id: &str, n: Option<usize>) -> Result<Vec<PolyExpr>> {
    let d = def(id)?;
    let (p, _) = families::build(d.ansatz, resolve_n(d, n)?.unwrap_or(1))?;
    constraint_polys(d, &p)
}

fn constraint_polys(d: &Def, p: &ParametricAlgebra) -> Result<Vec<PolyExpr>> {
    match d.constraints {
        Constraints::Displayed(list) => list.iter().map(|s| p.parse(s)).collect(),
        Constraints::Jacobi => Ok(p.jacobi_system()),
    }
}

fn free_names(d: &Def, p: &ParametricAlgebra) -> Vec<String> {
    match d.free {
        Free::All => p.params().to_vec(),
        Free::List(l) => l.iter().map(|s| s.to_string()).collect(),
    }
}

struct ParsedRule {
    target: usize,
    num: PolyExpr,
    den: PolyExpr,
    text: String,
}

fn parse_rules(p: &ParametricAlgebra, rules: &[Rule]) -> Result<Vec<ParsedRule>> {
    rules
        .iter()
        .map(|&(t, n, dn)| {
            let target = p.param_index(t).ok_or_else(|| Error::UnknownParameter(t.into()))?;
            let num = p.parse(n)?;
            let den = p.parse(dn)?;
            let text = if den.is_constant() && p.format(&den) == "1" {
                p.format(&num)
            } else {
                format!("({}) / ({})", p.format(&num), p.format(&den))
            };
            Ok(ParsedRule { target, num, den, text })
        })
        .collect()
}

fn spec_of(d: &Def, n: Option<usize>) -> Result<FamilySpec> {
    let n = resolve_n(d, n)?;
    let (p, dec) = families::build(d.ansatz, n.unwrap_or(1))?;
    let free = free_names(d, &p);
    let rules = parse_rules(&p, d.rules)?;
    let params = p
        .params()
        .iter()
        .enumerate()
        .map(|(i, name)| {
            if free.contains(name) {
                ParamSpec { name: name.clone(), role: ParamRole::Free, expression: None }
            } else if let Some(r) = rules.iter().find(|r| r.target == i) {
                ParamSpec { name: name.clone(), role: ParamRole::Derived, expression: Some(r.text.clone()) }
            } else {
                ParamSpec { name: name.clone(), role: ParamRole::Zero, expression: None }
            }
        })
        .collect();
    let mut denominators: Vec<String> =
        rules.iter().filter(|r| !r.den.is_constant()).map(|r| p.format(&r.den)).collect();
    denominators.dedup();
    let predicate = d.predicate.map(|ineqs| PredicateSpec {
        inequalities: ineqs.iter().map(|(l, r)| format!("{l} < {r}")).collect(),
        note: d.predicate_note.map(str::to_string),
    });
    Ok(FamilySpec {
        id: d.id.to_string(),
        title: d.title.to_string(),
        dims: (dec.a.len(), dec.k.len(), dec.m.len()),
        takes_n: takes_n(d),
        n,
        params,
        constraints: constraint_polys(d, &p)?.iter().map(|c| p.format(c)).collect(),
        denominators,
        predicate,
        sample_point: sample_point(d, &p, n),
    })
}

fn sample_point(d: &Def, p: &ParametricAlgebra, n: Option<usize>) -> BTreeMap<String, String> {
    let mut out: BTreeMap<String, String> = d.sample.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    // for the size-dependent tables, unspecified entries default to 0
    if n.is_some() {
        for name in free_names(d, p) {
            out.entry(name).or_insert_with(|| "0".into());
        }
    }
    out
}

/// Arithmetic shared by the exact and the real instantiation paths.
trait Scalar: Clone {
    fn eval(p: &PolyExpr, x: &[Self]) -> Self;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn div(&self, other: &Self) -> Self;
    fn residual(&self, other: &Self) -> f64;
    fn negligible(residual: f64) -> bool;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn eval(p: &PolyExpr, x: &[Self]) -> Self {
        p.eval_f64(x)
    }
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn residual(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
    fn negligible(residual: f64) -> bool {
        residual <= REAL_CONSTRAINT_TOL
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn eval(p: &PolyExpr, x: &[Self]) -> Self {
        p.eval(x)
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn residual(&self, other: &Self) -> f64 {
        ToPrimitive::to_f64(&(self - other).abs()).unwrap_or(f64::INFINITY)
    }
    fn negligible(residual: f64) -> bool {
        residual == 0.0
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Complete parameter vector from user values: free parameters are
/// required, derived ones computed, the rest are zero; then the family
/// constraints are checked.
fn resolve<T: Scalar>(d: &Def, p: &ParametricAlgebra, given: &BTreeMap<String, T>) -> Result<Vec<T>> {
    if let Some(k) = given.keys().find(|k| p.param_index(k).is_none()) {
        return Err(Error::UnknownParameter(k.clone()));
    }
    let free = free_names(d, p);
    let rules = parse_rules(p, d.rules)?;
    let mut x = Vec::with_capacity(p.params().len());
    for (i, name) in p.params().iter().enumerate() {
        if free.contains(name) {
            x.push(given.get(name).cloned().ok_or_else(|| Error::MissingParameter(name.clone()))?);
        } else if rules.iter().any(|r| r.target == i) {
            x.push(T::zero());
        } else {
            if let Some(v) = given.get(name) {
                let r = v.residual(&T::zero());
                if !T::negligible(r) {
                    return Err(Error::ConstraintViolated { constraint: format!("{name} = 0"), residual: r });
                }
            }
            x.push(T::zero());
        }
    }
    for r in &rules {
        let den = T::eval(&r.den, &x);
        if den.is_zero() {
            return Err(Error::DegenerateBranch { denominator: p.format(&r.den) });
        }
        let value = T::eval(&r.num, &x).div(&den);
        let name = &p.params()[r.target];
        if let Some(v) = given.get(name) {
            let res = v.residual(&value);
            if !T::negligible(res) {
                return Err(Error::ConstraintViolated { constraint: format!("{name} = {}", r.text), residual: res });
            }
        }
        x[r.target] = value;
    }
    for c in constraint_polys(d, p)? {
        let res = T::eval(&c, &x).residual(&T::zero());
        if !T::negligible(res) {
            return Err(Error::ConstraintViolated { constraint: p.format(&c), residual: res });
        }
    }
    Ok(x)
}

fn finish(d: &Def, n: Option<usize>, p: &ParametricAlgebra, dec: Decomposition, x: Vec<f64>) -> Result<Instance> {
    let values: BTreeMap<String, f64> = p.params().iter().cloned().zip(x).collect();
    let algebra = p.substitute_f64(&values)?;
    Ok(Instance { id: d.id.to_string(), n, algebra, decomposition: dec, values })
}

/// Instantiates a family at real parameter values. Constraints are checked
/// within [`REAL_CONSTRAINT_TOL`].
pub fn instantiate(id: &str, values: &BTreeMap<String, f64>, n: Option<usize>) -> Result<Instance> {
    let d = def(id)?;
    let n = resolve_n(d, n)?;
    let (p, dec) = families::build(d.ansatz, n.unwrap_or(1))?;
    let x = resolve(d, &p, values)?;
    finish(d, n, &p, dec, x)
}

/// Instantiates a family at rational parameter values. Constraints and
/// derived parameters are computed exactly; the structure constants are
/// rounded once at the end.
pub fn instantiate_exact(id: &str, values: &BTreeMap<String, BigRational>, n: Option<usize>) -> Result<Instance> {
    let d = def(id)?;
    let n = resolve_n(d, n)?;
    let (p, dec) = families::build(d.ansatz, n.unwrap_or(1))?;
    let x = resolve(d, &p, values)?;
    finish(d, n, &p, dec, x.iter().map(Scalar::to_f64).collect())
}

/// Instantiates at the documented sample point.
pub fn instantiate_sample(id: &str) -> Result<Instance> {
    let spec = family_spec(id, None)?;
    let values = spec
        .sample_point
        .iter()
        .map(|(k, v)| Ok((k.clone(), crate::symbolic::parse_rational(v)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    instantiate_exact(id, &values, spec.n)
}

/// Evaluates the family's non-positive-curvature predicate. Only the
/// parameters the inequalities mention (after computing derived ones where
/// possible) are required.
pub fn hadamard_predicate(id: &str, values: &BTreeMap<String, f64>, n: Option<usize>) -> Result<PredicateResult> {
    let d = def(id)?;
    let ineqs = d.predicate.ok_or_else(|| Error::NoPredicate(id.to_string()))?;
    let (p, _) = families::build(d.ansatz, resolve_n(d, n.or(d.sample_n))?.unwrap_or(1))?;
    if let Some(k) = values.keys().find(|k| p.param_index(k).is_none()) {
        return Err(Error::UnknownParameter(k.clone()));
    }
    let free = free_names(d, &p);
    let rules = parse_rules(&p, d.rules)?;
    let mut known: Vec<Option<f64>> = p
        .params()
        .iter()
        .enumerate()
        .map(|(i, name)| match values.get(name) {
            Some(v) => Some(*v),
            None if !free.contains(name) && !rules.iter().any(|r| r.target == i) => Some(0.0),
            None => None,
        })
        .collect();
    for r in &rules {
        if known[r.target].is_some() {
            continue;
        }
        let vars: Vec<usize> = r.num.variables().into_iter().chain(r.den.variables()).collect();
        if vars.iter().all(|&v| known[v].is_some()) {
            let x: Vec<f64> = known.iter().map(|v| v.unwrap_or(0.0)).collect();
            let den = r.den.eval_f64(&x);
            if den == 0.0 {
                return Err(Error::DegenerateBranch { denominator: p.format(&r.den) });
            }
            known[r.target] = Some(r.num.eval_f64(&x) / den);
        }
    }
    let mut margins = Vec::with_capacity(ineqs.len());
    for (l, r) in ineqs {
        let lhs = p.parse(l)?;
        let rhs = p.parse(r)?;
        for v in lhs.variables().into_iter().chain(rhs.variables()) {
            if known[v].is_none() {
                return Err(Error::MissingParameter(p.params()[v].clone()));
            }
        }
        let x: Vec<f64> = known.iter().map(|v| v.unwrap_or(0.0)).collect();
        margins.push((format!("{l} < {r}"), rhs.eval_f64(&x) - lhs.eval_f64(&x)));
    }
    Ok(PredicateResult { satisfied: margins.iter().all(|(_, s)| *s > 0.0), margins })
}

fn draw(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let v = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// A random constraint-satisfying assignment of the free parameters.
///
/// Free values have magnitude in `[0.5, 2]`, so that derived values stay
/// bounded. Families whose free parameters are themselves constrained are
/// solved along one of their branches; `branch` selects it (modulo the
/// number of branches).
pub fn sample_values(id: &str, n: Option<usize>, branch: usize, rng: &mut impl Rng) -> Result<BTreeMap<String, f64>> {
    let d = def(id)?;
    let (p, _) = families::build(d.ansatz, resolve_n(d, n.or(d.sample_n))?.unwrap_or(1))?;
    let mut x: BTreeMap<String, f64> = free_names(d, &p).into_iter().map(|k| (k, draw(rng, 0.5, 2.0))).collect();
    if !d.branches.is_empty() {
        let rules = parse_rules(&p, d.branches[branch % d.branches.len()])?;
        let mut full: Vec<f64> = p.params().iter().map(|k| x.get(k).copied().unwrap_or(0.0)).collect();
        for r in &rules {
            full[r.target] = r.num.eval_f64(&full) / r.den.eval_f64(&full);
            x.insert(p.params()[r.target].clone(), full[r.target]);
        }
    }
    Ok(x)
}

/// Rejection-samples free values in `[-3, 3]` until every predicate slack
/// is at least `min_slack` (and derived denominators are at least 0.25 in
/// magnitude). Returns `None` after `max_tries` rejections.
pub fn sample_hadamard(
    id: &str,
    n: Option<usize>,
    min_slack: f64,
    max_tries: usize,
    rng: &mut impl Rng,
) -> Result<Option<BTreeMap<String, f64>>> {
    let d = def(id)?;
    if d.predicate.is_none() {
        return Err(Error::NoPredicate(id.to_string()));
    }
    let n = n.or(d.sample_n);
    let (p, _) = families::build(d.ansatz, resolve_n(d, n)?.unwrap_or(1))?;
    let free = free_names(d, &p);
    let rules = parse_rules(&p, d.rules)?;
    for _ in 0..max_tries {
        let x: BTreeMap<String, f64> = free.iter().map(|k| (k.clone(), rng.gen_range(-3.0..3.0))).collect();
        let full: Vec<f64> = p.params().iter().map(|k| x.get(k).copied().unwrap_or(0.0)).collect();
        if rules.iter().any(|r| r.den.eval_f64(&full).abs() < 0.25) {
            continue;
        }
        let res = hadamard_predicate(id, &x, n)?;
        if res.margins.iter().all(|(_, s)| *s >= min_slack) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// Whether a family carries a curvature predicate.
pub fn has_predicate(id: &str) -> Result<bool> {
    Ok(def(id)?.predicate.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::check_morphism;
    use crate::DEFAULT_TOL;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vals(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn listing() {
        let all = list_families();
        assert_eq!(all.len(), 22);
        let mut ids: Vec<&str> = all.iter().map(|f| f.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 22);
        assert_eq!(all.iter().filter(|f| f.id != "carnot").count(), 21);
    }

    #[test]
    fn every_sample_point_instantiates_and_passes() {
        for f in list_families() {
            let inst = instantiate_sample(&f.id).unwrap_or_else(|e| panic!("{}: {e}", f.id));
            assert!(inst.algebra.jacobi_residual().max_residual <= 1e-12, "{}", f.id);
            let rep = check_morphism(&inst.algebra, &inst.decomposition, DEFAULT_TOL).unwrap();
            assert!(rep.passed(), "{}: {:?}", f.id, rep.failed_ids());
            if let Some(pred) = &f.predicate {
                let r = hadamard_predicate(&f.id, &inst.values, inst.n).unwrap();
                assert!(r.satisfied, "{}: {:?}", f.id, r);
                assert_eq!(r.margins.len(), pred.inequalities.len());
            }
        }
    }

    #[test]
    fn one_one_two_at_documented_point() {
        let inst = instantiate("case-1-1-2", &vals(&[("theta", 1.0), ("lambda", 1.0), ("alpha", 0.5), ("beta", 0.0)]), None)
            .unwrap();
        assert_eq!(inst.algebra.dim(), 4);
        assert!(check_morphism(&inst.algebra, &inst.decomposition, DEFAULT_TOL).unwrap().passed());
        let err = instantiate("case-1-1-2", &vals(&[("theta", 1.0), ("lambda", 1.0), ("alpha", 1.0), ("beta", 0.0)]), None);
        assert!(matches!(err, Err(Error::ConstraintViolated { .. })));
    }

    #[test]
    fn unit_action_forces_alpha() {
        let inst = instantiate("case-1-n-2/ex2", &vals(&[("beta", 0.3)]), Some(2)).unwrap();
        assert_eq!(inst.values["alpha"], 0.5);
        assert_eq!(inst.algebra.dim(), 5);
        assert!(check_morphism(&inst.algebra, &inst.decomposition, DEFAULT_TOL).unwrap().passed());
        assert!(matches!(
            instantiate("case-1-n-2/ex2", &vals(&[("beta", 0.3)]), None),
            Err(Error::MissingParameter(_))
        ));
        assert!(matches!(
            instantiate("case-1-n-2/ex2", &vals(&[("beta", 0.3), ("alpha", 0.6)]), Some(1)),
            Err(Error::ConstraintViolated { .. })
        ));
    }

    #[test]
    fn derived_parameters_are_computed() {
        let inst =
            instantiate("case-2-1-2/ex1", &vals(&[("a", 1.0), ("b", 1.0), ("mu", 1.0), ("x", 1.0), ("y", 0.0)]), None)
                .unwrap();
        assert_eq!(inst.values["lambda"], -1.0);
        assert_eq!(inst.values["alpha"], -1.0);
        assert!(check_morphism(&inst.algebra, &inst.decomposition, DEFAULT_TOL).unwrap().passed());
    }

    #[test]
    fn degenerate_and_unknown() {
        let r = instantiate("case-2-1-2/ex1", &vals(&[("a", 0.0), ("b", 1.0), ("mu", 1.0), ("x", 1.0), ("y", 0.0)]), None);
        assert!(matches!(r, Err(Error::DegenerateBranch { ref denominator }) if denominator == "a"));
        let r = instantiate("case-0-2-2/ex4", &vals(&[("s", 0.0), ("t", 1.0), ("sigma", 1.0), ("theta", 1.0)]), None);
        assert!(matches!(r, Err(Error::DegenerateBranch { .. })));
        assert!(matches!(instantiate("case-9", &BTreeMap::new(), None), Err(Error::UnknownFamily(_))));
        assert!(matches!(
            instantiate("case-0-2-2/ex6", &vals(&[("t", 1.0), ("tau", 1.0), ("theta", 1.0), ("nu", 1.0)]), None),
            Err(Error::UnknownParameter(_))
        ));
    }

    #[test]
    fn predicate_margins() {
        let r = hadamard_predicate("case-2-1-2/ex3", &vals(&[("theta", 1.0), ("x", 1.0), ("alpha", 1.0)]), None).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.margins[0].1, 15.0);
        let r = hadamard_predicate("case-2-1-2/ex3", &vals(&[("theta", 5.0), ("x", 1.0), ("alpha", 1.0)]), None).unwrap();
        assert!(!r.satisfied);
        assert_eq!(r.margins[0].1, -9.0);
        let r = hadamard_predicate("case-1-n-2/ex2", &vals(&[("beta", 7.0)]), Some(3)).unwrap();
        assert!(r.satisfied && r.margins.is_empty());
        assert!(matches!(hadamard_predicate("case-1-2-2/ex1", &BTreeMap::new(), None), Err(Error::NoPredicate(_))));
        assert!(matches!(
            hadamard_predicate("case-2-1-2/ex3", &vals(&[("x", 1.0)]), None),
            Err(Error::MissingParameter(_))
        ));
    }

    #[test]
    fn sampled_values_satisfy_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in list_families() {
            for branch in 0..4 {
                let v = sample_values(&f.id, f.n, branch, &mut rng).unwrap();
                let inst = instantiate(&f.id, &v, f.n).unwrap_or_else(|e| panic!("{}: {e}", f.id));
                assert!(inst.algebra.jacobi_residual().max_residual <= 1e-12, "{}", f.id);
            }
        }
    }

    #[test]
    fn hadamard_draws_meet_slack() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for f in list_families().into_iter().filter(|f| f.predicate.is_some()) {
            let v = sample_hadamard(&f.id, f.n, 0.1, 100_000, &mut rng).unwrap().expect(&f.id);
            let r = hadamard_predicate(&f.id, &v, f.n).unwrap();
            assert!(r.margins.iter().all(|(_, s)| *s >= 0.1));
            instantiate(&f.id, &v, f.n).unwrap();
        }
    }
}
