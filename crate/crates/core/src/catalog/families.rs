//! Bracket tables of the ansätze and the example families built on them.

use crate::algebra::Decomposition;
use crate::error::Result;
use crate::symbolic::ParametricAlgebra;

/// `(target, numerator, denominator)`: the parameter `target` equals
/// `numerator / denominator`.
pub(crate) type Rule = (&'static str, &'static str, &'static str);
/// `(lhs, rhs)` of a strict inequality `lhs < rhs`.
pub(crate) type Ineq = (&'static str, &'static str);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Ansatz {
    TwoZeroTwo,
    OneOneTwo,
    ZeroTwoTwo,
    TwoOneTwo,
    OneTwoTwo,
    DiagonalAction,
    UnitAction,
    Carnot,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Free {
    List(&'static [&'static str]),
    All,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Constraints {
    Displayed(&'static [&'static str]),
    /// The full Jacobi system of the ansatz.
    Jacobi,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Def {
    pub id: &'static str,
    pub title: &'static str,
    pub ansatz: Ansatz,
    pub free: Free,
    pub rules: &'static [Rule],
    /// Alternative solve orders for sampling when the free parameters are
    /// themselves constrained.
    pub branches: &'static [&'static [Rule]],
    pub constraints: Constraints,
    pub predicate: Option<&'static [Ineq]>,
    pub predicate_note: Option<&'static str>,
    pub sample: &'static [(&'static str, &'static str)],
    pub sample_n: Option<usize>,
}

const ROT_DIL: &[&str] = &["a*alpha + b*x", "a*beta + b*y"];
const TWO_ONE_TWO: &[&str] = &[
    "theta*lambda - 2*theta*alpha",
    "theta*mu - 2*theta*x",
    "a*alpha + b*x",
    "a*beta + b*y",
    "a*lambda + b*mu",
];

const BASE: Def = Def {
    id: "",
    title: "",
    ansatz: Ansatz::TwoZeroTwo,
    free: Free::All,
    rules: &[],
    branches: &[],
    constraints: Constraints::Displayed(&[]),
    predicate: None,
    predicate_note: None,
    sample: &[],
    sample_n: None,
};

pub(crate) const FAMILIES: &[Def] = &[
    Def {
        id: "case-2-0-2",
        title: "dim (a,k,m) = (2,0,2): two commuting rotation-dilations",
        ansatz: Ansatz::TwoZeroTwo,
        branches: &[&[("alpha", "-b*x", "a"), ("beta", "-b*y", "a")], &[("x", "-a*alpha", "b"), ("y", "-a*beta", "b")]],
        constraints: Constraints::Displayed(ROT_DIL),
        sample: &[("a", "1"), ("b", "1"), ("alpha", "1"), ("beta", "1"), ("x", "-1"), ("y", "-1")],
        ..BASE
    },
    Def {
        id: "case-1-1-2",
        title: "dim (a,k,m) = (1,1,2): Heisenberg-type extension",
        ansatz: Ansatz::OneOneTwo,
        branches: &[&[("lambda", "2*alpha", "1")], &[("theta", "0", "1")]],
        constraints: Constraints::Displayed(&["theta*lambda - 2*theta*alpha"]),
        sample: &[("theta", "1"), ("lambda", "1"), ("alpha", "1/2"), ("beta", "0")],
        ..BASE
    },
    Def {
        id: "case-0-2-2/ex1",
        title: "dim (a,k,m) = (0,2,2), first example",
        ansatz: Ansatz::ZeroTwoTwo,
        free: Free::List(&["z", "w", "t", "tau"]),
        rules: &[("r", "-w*t", "z"), ("s", "-w^2*t", "z^2"), ("rho", "-w*tau", "z"), ("sigma", "-w^2*tau", "z^2")],
        constraints: Constraints::Jacobi,
        sample: &[("z", "1"), ("w", "1"), ("t", "1"), ("tau", "1")],
        ..BASE
    },
    Def {
        id: "case-0-2-2/ex2",
        title: "dim (a,k,m) = (0,2,2), second example",
        ansatz: Ansatz::ZeroTwoTwo,
        free: Free::List(&["w", "s", "sigma"]),
        constraints: Constraints::Jacobi,
        sample: &[("w", "1"), ("s", "1"), ("sigma", "1")],
        ..BASE
    },
    Def {
        id: "case-0-2-2/ex3",
        title: "dim (a,k,m) = (0,2,2), third example",
        ansatz: Ansatz::ZeroTwoTwo,
        free: Free::List(&["r", "s", "t", "rho", "theta"]),
        rules: &[("sigma", "s*rho", "r"), ("tau", "t*rho", "r")],
        constraints: Constraints::Jacobi,
        sample: &[("r", "1"), ("s", "1"), ("t", "1"), ("rho", "1"), ("theta", "1")],
        ..BASE
    },
    Def {
        id: "case-0-2-2/ex4",
        title: "dim (a,k,m) = (0,2,2), fourth example",
        ansatz: Ansatz::ZeroTwoTwo,
        free: Free::List(&["s", "t", "sigma", "theta"]),
        rules: &[("tau", "t*sigma", "s")],
        constraints: Constraints::Jacobi,
        sample: &[("s", "1"), ("t", "1"), ("sigma", "1"), ("theta", "1")],
        ..BASE
    },
    Def {
        id: "case-0-2-2/ex5",
        title: "dim (a,k,m) = (0,2,2), fifth example",
        ansatz: Ansatz::ZeroTwoTwo,
        free: Free::List(&["rho", "sigma", "tau", "theta"]),
        constraints: Constraints::Jacobi,
        sample: &[("rho", "1"), ("sigma", "1"), ("tau", "1"), ("theta", "1")],
        ..BASE
    },
    Def {
        id: "case-0-2-2/ex6",
        title: "dim (a,k,m) = (0,2,2), sixth example",
        ansatz: Ansatz::ZeroTwoTwo,
        free: Free::List(&["t", "tau", "theta"]),
        constraints: Constraints::Jacobi,
        sample: &[("t", "1"), ("tau", "1"), ("theta", "1")],
        ..BASE
    },
    Def {
        id: "case-2-1-2/ex1",
        title: "dim (a,k,m) = (2,1,2), first example",
        ansatz: Ansatz::TwoOneTwo,
        free: Free::List(&["a", "b", "mu", "x", "y"]),
        rules: &[("lambda", "-b*mu", "a"), ("alpha", "-b*x", "a"), ("beta", "-b*y", "a")],
        constraints: Constraints::Displayed(TWO_ONE_TWO),
        predicate: Some(&[
            ("a^3", "b^2*mu"),
            ("a^3", "b^2*x"),
            ("b^2", "a*mu"),
            ("b^2", "a*x"),
            ("0", "a"),
            ("0", "mu"),
            ("0", "x"),
        ]),
        sample: &[("a", "1"), ("b", "3/2"), ("mu", "3"), ("x", "3"), ("y", "1")],
        ..BASE
    },
    Def {
        id: "case-2-1-2/ex2",
        title: "dim (a,k,m) = (2,1,2), second example",
        ansatz: Ansatz::TwoOneTwo,
        free: Free::List(&["a", "b", "x", "y", "theta"]),
        rules: &[("mu", "2*x", "1"), ("lambda", "-2*b*x", "a"), ("alpha", "-b*x", "a"), ("beta", "-b*y", "a")],
        constraints: Constraints::Displayed(TWO_ONE_TWO),
        predicate: Some(&[
            ("theta^2*a^2", "8*x^2*a^2 + 8*x^2*b^2"),
            ("a^3", "b^2*x"),
            ("b^2", "a*x"),
            ("0", "a"),
            ("0", "x"),
        ]),
        sample: &[("a", "1"), ("b", "3/2"), ("x", "3"), ("y", "1"), ("theta", "1")],
        ..BASE
    },
    Def {
        id: "case-2-1-2/ex3",
        title: "dim (a,k,m) = (2,1,2), third example",
        ansatz: Ansatz::TwoOneTwo,
        free: Free::List(&["alpha", "beta", "x", "y", "theta"]),
        rules: &[("lambda", "2*alpha", "1"), ("mu", "2*x", "1")],
        constraints: Constraints::Displayed(TWO_ONE_TWO),
        predicate: Some(&[("theta^2", "8*x^2 + 8*alpha^2")]),
        predicate_note: Some("stated as theta^2 < 8(x^2 + a^2); a vanishes identically in this family, so alpha is read for a"),
        sample: &[("alpha", "1"), ("beta", "1"), ("x", "1"), ("y", "1"), ("theta", "1")],
        ..BASE
    },
    Def {
        id: "case-2-1-2/ex4",
        title: "dim (a,k,m) = (2,1,2), fourth example",
        ansatz: Ansatz::TwoOneTwo,
        free: Free::List(&["b", "alpha", "beta", "theta"]),
        rules: &[("lambda", "2*alpha", "1")],
        constraints: Constraints::Displayed(TWO_ONE_TWO),
        predicate: Some(&[("0", "alpha*b"), ("theta^2", "8*alpha^2")]),
        sample: &[("b", "1"), ("alpha", "1"), ("beta", "1"), ("theta", "1")],
        ..BASE
    },
    Def {
        id: "case-2-1-2/ex5",
        title: "dim (a,k,m) = (2,1,2), fifth example",
        ansatz: Ansatz::TwoOneTwo,
        free: Free::List(&["lambda", "mu", "alpha", "beta", "x", "y"]),
        constraints: Constraints::Displayed(TWO_ONE_TWO),
        predicate: Some(&[("0", "mu*x + lambda*alpha")]),
        sample: &[("lambda", "1"), ("mu", "1"), ("alpha", "1"), ("beta", "1"), ("x", "1"), ("y", "1")],
        ..BASE
    },
    Def {
        id: "case-2-1-2/ex6",
        title: "dim (a,k,m) = (2,1,2), sixth example",
        ansatz: Ansatz::TwoOneTwo,
        free: Free::List(&["b", "lambda", "alpha", "beta"]),
        constraints: Constraints::Displayed(TWO_ONE_TWO),
        predicate: Some(&[("0", "alpha*b"), ("0", "alpha*lambda"), ("0", "b*lambda")]),
        sample: &[("b", "1"), ("lambda", "1"), ("alpha", "1"), ("beta", "1")],
        ..BASE
    },
    Def {
        id: "case-1-2-2/ex1",
        title: "dim (a,k,m) = (1,2,2), first example",
        ansatz: Ansatz::OneTwoTwo,
        free: Free::List(&["d", "r", "rho", "theta"]),
        constraints: Constraints::Jacobi,
        sample: &[("d", "1"), ("r", "1"), ("rho", "1"), ("theta", "1")],
        ..BASE
    },
    Def {
        id: "case-1-2-2/ex2",
        title: "dim (a,k,m) = (1,2,2), second example",
        ansatz: Ansatz::OneTwoTwo,
        free: Free::List(&["alpha", "r", "rho", "theta"]),
        rules: &[
            ("gamma", "2*alpha", "1"),
            ("c", "alpha", "1"),
            ("d", "3*alpha", "1"),
            ("s", "r", "1"),
            ("t", "-r", "1"),
            ("sigma", "rho", "1"),
            ("tau", "-rho", "1"),
        ],
        constraints: Constraints::Jacobi,
        predicate: Some(&[
            ("4*rho^2 + 4*r^2", "23*alpha^2"),
            ("theta^2", "8*alpha^2 + 4*r^2"),
            ("theta^2", "8*alpha^2 + 4*rho^2"),
        ]),
        sample: &[("alpha", "1"), ("r", "1/2"), ("rho", "1/2"), ("theta", "1")],
        ..BASE
    },
    Def {
        id: "case-1-2-2/ex3",
        title: "dim (a,k,m) = (1,2,2), third example",
        ansatz: Ansatz::OneTwoTwo,
        free: Free::List(&["alpha", "c", "t", "tau", "theta"]),
        rules: &[("gamma", "2*alpha", "1"), ("d", "alpha", "1")],
        constraints: Constraints::Jacobi,
        predicate: Some(&[
            ("c^2", "16*alpha^2"),
            ("theta^2 + tau^2", "8*alpha^2"),
            ("theta^2 + t^2", "8*alpha^2"),
            ("t^2 + tau^2 + c^2", "8*alpha^2"),
        ]),
        predicate_note: Some("the third inequality carries a stray accent after 8 alpha^2, read as 8 alpha^2"),
        sample: &[("alpha", "1"), ("c", "1"), ("t", "1"), ("tau", "1"), ("theta", "1")],
        ..BASE
    },
    Def {
        id: "case-1-2-2/ex4",
        title: "dim (a,k,m) = (1,2,2), fourth example",
        ansatz: Ansatz::OneTwoTwo,
        free: Free::List(&["alpha", "s", "sigma", "theta"]),
        rules: &[("gamma", "2*alpha", "1"), ("d", "3*alpha", "1")],
        constraints: Constraints::Jacobi,
        predicate: Some(&[
            ("s^2", "12*alpha^2"),
            ("sigma^2", "12*alpha^2"),
            ("theta^2", "3*s^2 + 8*alpha^2"),
            ("theta^2", "3*sigma^2 + 8*alpha^2"),
        ]),
        sample: &[("alpha", "1"), ("s", "1"), ("sigma", "1"), ("theta", "1")],
        ..BASE
    },
    Def {
        id: "case-1-2-2/ex5",
        title: "dim (a,k,m) = (1,2,2), fifth example",
        ansatz: Ansatz::OneTwoTwo,
        free: Free::List(&["alpha", "r", "s", "theta"]),
        rules: &[("gamma", "2*alpha", "1"), ("c", "alpha*r", "s"), ("d", "3*alpha", "1"), ("t", "-r^2", "s")],
        constraints: Constraints::Jacobi,
        predicate: Some(&[
            ("r^2", "16*s^2"),
            ("theta^2", "8*alpha^2"),
            ("2*r^2*s^2 + r^4 + alpha^2*r^2 + s^4", "24*alpha^2*s^2"),
            ("theta^2*s^2 + r^4", "3*s^4 + 2*r^2*s^2 + 8*alpha^2*s^2"),
            ("s^4", "12*alpha^2*s^2 + 2*r^2*s^2 + 3*r^4"),
        ]),
        sample: &[("alpha", "1"), ("r", "1"), ("s", "1"), ("theta", "1")],
        ..BASE
    },
    Def {
        id: "case-1-n-2/ex1",
        title: "dim (a,k,m) = (1,n,2): arbitrary action on k",
        ansatz: Ansatz::DiagonalAction,
        free: Free::All,
        sample: &[
            ("alpha", "1"),
            ("beta", "1/2"),
            ("c_1_1", "1"),
            ("c_1_2", "0"),
            ("c_2_1", "1/2"),
            ("c_2_2", "1"),
        ],
        sample_n: Some(2),
        ..BASE
    },
    Def {
        id: "case-1-n-2/ex2",
        title: "dim (a,k,m) = (1,n,2): non-integrable horizontal distribution",
        ansatz: Ansatz::UnitAction,
        free: Free::List(&["beta"]),
        rules: &[("alpha", "1/2", "1")],
        constraints: Constraints::Displayed(&["2*alpha - 1"]),
        predicate: Some(&[]),
        sample: &[("beta", "3/10")],
        sample_n: Some(2),
        ..BASE
    },
    Def {
        id: "carnot",
        title: "Carnot (Heisenberg-type) extension with m = first layer",
        ansatz: Ansatz::Carnot,
        free: Free::List(&["t"]),
        sample: &[("t", "1")],
        sample_n: Some(1),
        ..BASE
    },
];

/// `[X, Y] += expr * Z` by label.
type Entry<'a> = (&'a str, &'a str, &'a str, &'a str);

fn table(labels: &[String], params: Vec<String>, entries: &[Entry]) -> Result<ParametricAlgebra> {
    let pos = |l: &str| labels.iter().position(|x| x == l).expect("label in table");
    let mut p = ParametricAlgebra::new(labels.len(), params).with_labels(labels.to_vec())?;
    for &(x, y, z, e) in entries {
        p.set_str(pos(x), pos(y), pos(z), e)?;
    }
    Ok(p)
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

const ROT_A: [Entry; 4] = [("A", "Z", "Z", "alpha"), ("A", "Z", "W", "beta"), ("A", "W", "Z", "-beta"), ("A", "W", "W", "alpha")];
const ROT_B: [Entry; 4] = [("B", "Z", "Z", "x"), ("B", "Z", "W", "y"), ("B", "W", "Z", "-y"), ("B", "W", "W", "x")];
const K_ACTION: [Entry; 10] = [
    ("X", "Y", "X", "z"),
    ("X", "Y", "Y", "w"),
    ("Z", "X", "X", "r"),
    ("Z", "X", "Y", "s"),
    ("Z", "Y", "X", "t"),
    ("Z", "Y", "Y", "-r"),
    ("W", "X", "X", "rho"),
    ("W", "X", "Y", "sigma"),
    ("W", "Y", "X", "tau"),
    ("W", "Y", "Y", "-rho"),
];

/// Parametric algebra and adapted decomposition of an ansatz.
pub(crate) fn build(ansatz: Ansatz, n: usize) -> Result<(ParametricAlgebra, Decomposition)> {
    let d = |a: &[usize], k: &[usize], m: &[usize]| Decomposition::new(a.to_vec(), k.to_vec(), m.to_vec());
    Ok(match ansatz {
        Ansatz::TwoZeroTwo => {
            let mut e = vec![("A", "B", "A", "a"), ("A", "B", "B", "b")];
            e.extend(ROT_A);
            e.extend(ROT_B);
            let p = table(&strings(&["A", "B", "Z", "W"]), strings(&["a", "b", "alpha", "beta", "x", "y"]), &e)?;
            (p, d(&[0, 1], &[], &[2, 3]))
        }
        Ansatz::OneOneTwo => {
            let mut e = vec![("A", "X", "X", "lambda"), ("Z", "W", "X", "theta")];
            e.extend(ROT_A);
            let p = table(&strings(&["A", "X", "Z", "W"]), strings(&["lambda", "alpha", "beta", "theta"]), &e)?;
            (p, d(&[0], &[1], &[2, 3]))
        }
        Ansatz::ZeroTwoTwo => {
            let mut e = K_ACTION.to_vec();
            e.push(("Z", "W", "X", "theta"));
            let params = strings(&["z", "w", "r", "s", "t", "rho", "sigma", "tau", "theta"]);
            let p = table(&strings(&["X", "Y", "Z", "W"]), params, &e)?;
            (p, d(&[], &[0, 1], &[2, 3]))
        }
        Ansatz::TwoOneTwo => {
            let mut e = vec![
                ("A", "B", "A", "a"),
                ("A", "B", "B", "b"),
                ("A", "X", "X", "lambda"),
                ("B", "X", "X", "mu"),
                ("Z", "W", "X", "theta"),
            ];
            e.extend(ROT_A);
            e.extend(ROT_B);
            let params = strings(&["a", "b", "lambda", "mu", "alpha", "beta", "x", "y", "theta"]);
            let p = table(&strings(&["A", "B", "X", "Z", "W"]), params, &e)?;
            (p, d(&[0, 1], &[2], &[3, 4]))
        }
        Ansatz::OneTwoTwo => {
            let mut e = vec![
                ("A", "X", "X", "gamma"),
                ("A", "X", "Y", "delta"),
                ("A", "Y", "X", "c"),
                ("A", "Y", "Y", "d"),
                ("Z", "W", "X", "theta"),
            ];
            e.extend(ROT_A);
            e.extend(K_ACTION);
            let params = strings(&[
                "gamma", "delta", "c", "d", "alpha", "beta", "z", "w", "r", "s", "t", "rho", "sigma", "tau", "theta",
            ]);
            let p = table(&strings(&["A", "X", "Y", "Z", "W"]), params, &e)?;
            (p, d(&[0], &[1, 2], &[3, 4]))
        }
        Ansatz::DiagonalAction | Ansatz::UnitAction => {
            let xs: Vec<String> = (1..=n).map(|k| format!("X{k}")).collect();
            let mut labels = vec!["A".to_string()];
            labels.extend(xs.iter().cloned());
            labels.extend(strings(&["Z", "W"]));
            let mut params = strings(&["alpha", "beta"]);
            let mut e: Vec<(String, String, String, String)> = Vec::new();
            if ansatz == Ansatz::DiagonalAction {
                for k in 1..=n {
                    for j in 1..=n {
                        let c = format!("c_{k}_{j}");
                        e.push(("A".into(), xs[k - 1].clone(), xs[j - 1].clone(), c.clone()));
                        params.push(c);
                    }
                }
            } else {
                for x in &xs {
                    e.push(("A".into(), x.clone(), x.clone(), "1".into()));
                }
                e.push(("Z".into(), "W".into(), xs[0].clone(), "1".into()));
            }
            let mut borrowed: Vec<Entry> = e.iter().map(|(a, b, c, v)| (a.as_str(), b.as_str(), c.as_str(), v.as_str())).collect();
            borrowed.extend(ROT_A);
            let p = table(&labels, params, &borrowed)?;
            (p, d(&[0], &(1..=n).collect::<Vec<_>>(), &[n + 1, n + 2]))
        }
        Ansatz::Carnot => {
            let mut labels = vec!["H".to_string()];
            labels.extend((1..=n).map(|i| format!("Z{i}")));
            labels.extend((1..=n).map(|i| format!("W{i}")));
            labels.push("X".into());
            let mut e: Vec<(String, String, String, String)> = Vec::new();
            for i in 1..=n {
                for l in [format!("Z{i}"), format!("W{i}")] {
                    e.push(("H".into(), l.clone(), l, "1".into()));
                }
                e.push((format!("Z{i}"), format!("W{i}"), "X".into(), "t".into()));
            }
            e.push(("H".into(), "X".into(), "X".into(), "2".into()));
            let borrowed: Vec<Entry> = e.iter().map(|(a, b, c, v)| (a.as_str(), b.as_str(), c.as_str(), v.as_str())).collect();
            let p = table(&labels, strings(&["t"]), &borrowed)?;
            (p, d(&[0], &[2 * n + 1], &(1..=2 * n).collect::<Vec<_>>()))
        }
    })
}
