//! Rational points on constraint varieties by successive elimination.
//!
//! Each branch is a chain of steps that either set a variable to zero (a
//! monomial factor of some constraint) or solve a constraint linearly for
//! one variable, substituting the solution into the rest. A solve for
//! `x_v = -b/a` also spawns the stratum `a = b = 0`, so components hidden
//! behind a vanishing leading coefficient are reached too.

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ParametricAlgebra, PolyExpr};
use crate::error::{Error, Result};

/// Points drawn by [`verify_family_constraints`].
pub const VERIFY_POINTS: usize = 200;
const VERIFY_SEED: u64 = 0x7a1e_0c0d;
const MAX_BRANCHES: usize = 64;
const MAX_NODES: usize = 20_000;
const MAX_RETRIES: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Zero(usize),
    /// `x_var = num / den`.
    Solve { var: usize, num: PolyExpr, den: PolyExpr },
}

/// One elimination chain. Variables without a step are free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone)]
pub struct VarietySampler {
    nvars: usize,
    constraints: Vec<PolyExpr>,
    branches: Vec<Branch>,
}

impl VarietySampler {
    /// Enumerates elimination branches (at most 64, spread evenly over the
    /// full tree when there are more).
    pub fn new(constraints: &[PolyExpr], nvars: usize) -> Result<Self> {
        if let Some(c) = constraints.iter().find(|c| c.nvars() != nvars) {
            return Err(Error::DimensionMismatch { expected: nvars, got: c.nvars() });
        }
        let constraints: Vec<PolyExpr> = constraints.iter().filter(|c| !c.is_zero()).cloned().collect();
        let mut leaves = Vec::new();
        let mut nodes = 0;
        explore(constraints.clone(), Vec::new(), &mut leaves, &mut nodes);
        if leaves.is_empty() {
            return Err(Error::BranchUnsolvable);
        }
        let branches = if leaves.len() > MAX_BRANCHES {
            (0..MAX_BRANCHES).map(|i| leaves[i * leaves.len() / MAX_BRANCHES].clone()).collect()
        } else {
            leaves
        };
        Ok(Self { nvars, constraints, branches })
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// One point on `branch`: free variables are small non-zero rationals,
    /// eliminated ones are recovered in reverse order. `None` when a
    /// denominator vanishes at the drawn values.
    pub fn sample(&self, branch: usize, rng: &mut impl Rng) -> Option<Vec<BigRational>> {
        let mut x: Vec<BigRational> = (0..self.nvars).map(|_| random_rational(rng)).collect();
        for step in self.branches[branch].steps.iter().rev() {
            match step {
                Step::Zero(v) => x[*v] = BigRational::zero(),
                Step::Solve { var, num, den } => {
                    let d = den.eval(&x);
                    if d.is_zero() {
                        return None;
                    }
                    x[*var] = num.eval(&x) / d;
                }
            }
        }
        self.constraints.iter().all(|c| c.eval(&x).is_zero()).then_some(x)
    }

    /// `count` points spread round-robin over the branches; branches whose
    /// denominators keep vanishing are skipped.
    pub fn points(&self, count: usize, seed: u64) -> Result<Vec<Vec<BigRational>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut live: Vec<usize> = (0..self.branches.len()).collect();
        let mut out = Vec::with_capacity(count);
        let mut turn = 0;
        while out.len() < count {
            if live.is_empty() {
                return Err(Error::BranchUnsolvable);
            }
            let slot = turn % live.len();
            match (0..MAX_RETRIES).find_map(|_| self.sample(live[slot], &mut rng)) {
                Some(p) => {
                    out.push(p);
                    turn += 1;
                }
                None => {
                    live.remove(slot);
                }
            }
        }
        Ok(out)
    }
}

fn random_rational(rng: &mut impl Rng) -> BigRational {
    let mut n: i64 = rng.gen_range(1..=9);
    if rng.gen_bool(0.5) {
        n = -n;
    }
    BigRational::new(n.into(), rng.gen_range(1i64..=4).into())
}

/// Normal forms, deduplicated, zeros dropped. `None` on a non-zero constant.
fn simplify(system: Vec<PolyExpr>) -> Option<Vec<PolyExpr>> {
    let mut out: Vec<PolyExpr> = Vec::with_capacity(system.len());
    for p in system {
        if p.is_zero() {
            continue;
        }
        if p.is_constant() {
            return None;
        }
        let p = p.normalize();
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out.sort_by_key(|p| (p.degree(), p.len()));
    Some(out)
}

fn substitute_all(system: &[PolyExpr], v: usize, num: &PolyExpr, den: &PolyExpr) -> Vec<PolyExpr> {
    system.iter().map(|p| p.substitute_fraction(v, num, den)).collect()
}

fn explore(system: Vec<PolyExpr>, steps: Vec<Step>, leaves: &mut Vec<Branch>, nodes: &mut usize) {
    *nodes += 1;
    if *nodes > MAX_NODES {
        return;
    }
    let Some(system) = simplify(system) else {
        return;
    };
    let Some((p, rest)) = system.split_first() else {
        leaves.push(Branch { steps });
        return;
    };
    let nvars = p.nvars();
    let content = p.monomial_content();
    let q = p.div_monomial(&content);
    if !q.is_constant() {
        // solve the cofactor for its simplest linear variable
        let best = (0..nvars)
            .filter_map(|v| q.split_linear(v).map(|(a, b)| (v, a, b)))
            .min_by_key(|(_, a, _)| (!a.is_constant(), a.len(), a.degree()));
        if let Some((v, a, b)) = best {
            let num = -&b;
            let mut next = substitute_all(rest, v, &num, &a);
            next.retain(|r| !r.is_zero());
            let mut s = steps.clone();
            s.push(Step::Solve { var: v, num, den: a.clone() });
            explore(next, s, leaves, nodes);
            if !a.is_constant() {
                let mut stratum = rest.to_vec();
                stratum.push(a);
                stratum.push(b);
                explore(stratum, steps.clone(), leaves, nodes);
            }
        }
    }
    let zero = PolyExpr::zero(nvars);
    let one = PolyExpr::integer(nvars, 1);
    for v in (0..nvars).filter(|&v| content[v] > 0) {
        let mut s = steps.clone();
        s.push(Step::Zero(v));
        explore(substitute_all(rest, v, &zero, &one), s, leaves, nodes);
    }
}

/// Outcome of checking that a constraint set implies the Jacobi system.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub implied: bool,
    /// A Jacobi equation that does not vanish on the variety.
    pub witness: Option<PolyExpr>,
    pub points: usize,
    pub branches: usize,
}

/// Evaluates the Jacobi system of `p` at [`VERIFY_POINTS`] seeded rational
/// points of the constraint variety (exact arithmetic).
pub fn verify_family_constraints(p: &ParametricAlgebra, constraints: &[PolyExpr]) -> Result<Verification> {
    verify_with_seed(p, constraints, VERIFY_POINTS, VERIFY_SEED)
}

pub fn verify_with_seed(p: &ParametricAlgebra, constraints: &[PolyExpr], count: usize, seed: u64) -> Result<Verification> {
    let sampler = VarietySampler::new(constraints, p.params().len())?;
    let system = p.jacobi_system();
    let points = sampler.points(count, seed)?;
    let witness = system.iter().find(|eq| points.iter().any(|x| !eq.eval(x).is_zero())).cloned();
    Ok(Verification {
        implied: witness.is_none(),
        witness,
        points: points.len(),
        branches: sampler.branches().len(),
    })
}
