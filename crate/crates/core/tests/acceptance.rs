//! Acceptance suite: one PASS/FAIL line per criterion, with timings.
//! Runs as a plain binary (`harness = false`); exits non-zero on any FAIL.

use std::collections::BTreeMap;
use std::time::Instant;

use liemorph_core::catalog::{self, Instance};
use liemorph_core::conditions::{check_foliation, check_morphism, conformal_decompose, omega_form};
use liemorph_core::geometry::{connection_coeffs, curvature_scan, mean_curvature, sectional_curvature, CurvatureEvaluator};
use liemorph_core::linalg::submatrix;
use liemorph_core::rootspace::{normality_report, root_decomposition};
use liemorph_core::symbolic::{verify_family_constraints, VERIFY_POINTS};
use liemorph_core::{Decomposition, MetricLieAlgebra, Subspace};
use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;
const DRAWS: usize = 50;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

/// The 50 seeded constraint-satisfying draws per family used by several
/// criteria. Branched families cycle through their branches.
fn catalog_draws() -> Vec<Instance> {
    let mut out = Vec::new();
    for spec in catalog::list_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000);
        for i in 0..DRAWS {
            let values = catalog::sample_values(&spec.id, spec.n, i, &mut rng).unwrap();
            match catalog::instantiate(&spec.id, &values, spec.n) {
                Ok(inst) => out.push(inst),
                Err(e) => panic!("{} at {values:?}: {e}", spec.id),
            }
        }
    }
    out
}

fn perturbed_residual(id: &str, n: Option<usize>, values: &BTreeMap<String, f64>, key: &str) -> f64 {
    let (p, _) = catalog::ansatz(id, n).unwrap();
    let mut v = values.clone();
    *v.get_mut(key).unwrap() += 0.1;
    p.substitute_f64(&v).unwrap().jacobi_residual().max_residual
}

fn full_values(inst: &Instance) -> BTreeMap<String, f64> {
    inst.values.clone()
}

fn criterion_1(draws: &[Instance]) -> Outcome {
    let families = catalog::list_families().len();
    let worst = draws.iter().map(|d| d.algebra.jacobi_residual().max_residual).fold(0.0, f64::max);
    let mut min_pert = f64::INFINITY;
    for d in draws.iter().filter(|d| d.id == "case-1-1-2") {
        // branch 0 solves lambda = 2 alpha; theta stays free
        if (d.values["lambda"] - 2.0 * d.values["alpha"]).abs() < 1e-12 && d.values["theta"] != 0.0 {
            min_pert = min_pert.min(perturbed_residual(&d.id, d.n, &full_values(d), "lambda"));
        }
    }
    for d in draws.iter().filter(|d| d.id == "case-1-n-2/ex2") {
        min_pert = min_pert.min(perturbed_residual(&d.id, d.n, &full_values(d), "alpha"));
    }
    outcome(
        worst <= 1e-12 && min_pert >= 0.05,
        format!(
            "{families} families x {DRAWS} draws, max Jacobi residual {worst:.1e} (<= 1e-12); \
             min perturbed residual {min_pert:.3} (>= 0.05)"
        ),
    )
}

fn alg(dim: usize, entries: &[(usize, usize, usize, f64)]) -> MetricLieAlgebra {
    MetricLieAlgebra::new(dim, entries, None).unwrap()
}

fn criterion_2(draws: &[Instance]) -> Outcome {
    let failing: Vec<String> = draws
        .iter()
        .filter(|d| !check_morphism(&d.algebra, &d.decomposition, TOL).unwrap().passed())
        .map(|d| d.id.clone())
        .collect();
    // X, Z, W with k = {X}, m = {Z, W}
    let dec3 = Decomposition::new(vec![], vec![0], vec![1, 2]);
    // [Z,W] = W added; [Z,X] = -X keeps trace ad_Z = 0
    let m_iii = alg(3, &[(1, 2, 2, 1.0), (1, 0, 0, -1.0)]);
    let m_iv = alg(3, &[(1, 0, 0, 1.0)]);
    // A, X, Z, W with ad_A|_m = diag(1, 2)
    let m_v = alg(4, &[(0, 2, 2, 1.0), (0, 3, 3, 2.0)]);
    let dec4 = Decomposition::new(vec![0], vec![1], vec![2, 3]);
    let mut ok = failing.is_empty();
    let mut notes = Vec::new();
    for (name, a, d, want) in [("iii", &m_iii, &dec3, "iii"), ("iv", &m_iv, &dec3, "iv"), ("v", &m_v, &dec4, "v")] {
        let r = check_morphism(a, d, TOL).unwrap();
        let failed = r.failed_ids();
        let has_witness = r.item(want).map(|i| i.witness.is_some()).unwrap_or(false);
        ok &= failed == vec![want] && has_witness;
        notes.push(format!("mutant {name} fails {failed:?}"));
    }
    outcome(ok, format!("{} catalog instances, {} failing; {}", draws.len(), failing.len(), notes.join(", ")))
}

fn criterion_3(draws: &[Instance]) -> Outcome {
    let (mut mu, mut conf, mut lam) = (0.0f64, 0.0f64, 0.0f64);
    for d in draws {
        let a = &d.algebra;
        let dec = &d.decomposition;
        let mut vert = dec.a.clone();
        vert.extend(&dec.k);
        if !vert.is_empty() && vert.len() < a.dim() {
            let v = Subspace::from_indices(a, &vert);
            mu = mu.max(mean_curvature(a, &v, TOL).unwrap().norm());
        }
        let report = check_morphism(a, dec, TOL).unwrap();
        let reported = report.quantities.get("lambda").cloned().unwrap_or_default();
        for (r, &h) in dec.a.iter().enumerate() {
            let ad = a.ad(&a.basis_vector(h)).unwrap();
            let block = submatrix(&ad, &dec.m, &dec.m);
            let gram = submatrix(a.gram(), &dec.m, &dec.m);
            conf = conf.max(conformal_decompose(&block, &gram).unwrap().residual);
            let expected = block.trace() / dec.m.len() as f64;
            lam = lam.max((reported[r] - expected).abs());
        }
    }
    outcome(
        mu <= 1e-9 && conf <= 1e-9 && lam <= 1e-12,
        format!("max |mean curvature| {mu:.1e}, max conformal residual {conf:.1e}, max lambda error {lam:.1e}"),
    )
}

fn random_orthonormal_pair(rng: &mut ChaCha8Rng, m: usize) -> (DVector<f64>, DVector<f64>) {
    let z = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0)).normalize();
    let mut w = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0));
    w -= &z * z.dot(&w);
    (z, w.normalize())
}

fn criterion_4() -> Outcome {
    let tol = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let (mut disagreements, mut conformal) = (0, 0);
    for trial in 0..1000 {
        let m = rng.gen_range(2..=6);
        let lambda = rng.gen_range(-2.0..2.0);
        let s = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0));
        let skew = (&s - s.transpose()) * 0.5;
        let mut l = DMatrix::identity(m, m) * lambda + skew;
        match trial % 3 {
            0 => {}
            1 => l += DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1e-3..1e-3)),
            _ => l = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0)),
        }
        let p1 = conformal_decompose(&l, &DMatrix::identity(m, m)).unwrap().residual <= tol;
        let mut p2 = true;
        let mut p3 = true;
        for _ in 0..100 {
            let r = rng.gen_range(0.5..2.0);
            let z = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0)).normalize() * r;
            let w = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0)).normalize() * r;
            p2 &= ((&l * &z).dot(&z) - (&l * &w).dot(&w)).abs() <= tol;
            let (z, w) = random_orthonormal_pair(&mut rng, m);
            p3 &= ((&l * &z).dot(&z) - (&l * &w).dot(&w)).abs() <= tol;
            p3 &= ((&l * &z).dot(&w) + (&l * &w).dot(&z)).abs() <= tol;
        }
        conformal += p1 as usize;
        if p1 != p2 || p2 != p3 {
            disagreements += 1;
        }
    }
    outcome(disagreements == 0, format!("1000 operators ({conformal} conformal), {disagreements} disagreements"))
}

const PREDICATE_FAMILIES: &[&str] = &[
    "case-2-1-2/ex1",
    "case-2-1-2/ex2",
    "case-2-1-2/ex3",
    "case-2-1-2/ex4",
    "case-2-1-2/ex5",
    "case-2-1-2/ex6",
    "case-1-2-2/ex2",
    "case-1-2-2/ex3",
    "case-1-2-2/ex4",
    "case-1-2-2/ex5",
    "case-1-n-2/ex2",
];

/// Largest sectional curvature over coordinate planes of the basis.
fn coordinate_max(a: &MetricLieAlgebra) -> f64 {
    let n = a.dim();
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            best = best.max(sectional_curvature(a, &a.basis_vector(i), &a.basis_vector(j)).unwrap());
        }
    }
    best
}

fn criterion_5() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut draws = 0;
    let mut spots = Vec::new();
    for id in PREDICATE_FAMILIES {
        let spec = catalog::family_spec(id, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (mut worst, mut coord, mut positive) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0);
        let mut witness = String::new();
        for i in 0..20 {
            let Some(values) = catalog::sample_hadamard(id, spec.n, 0.1, 200_000, &mut rng).unwrap() else {
                lines.push(format!("{id}: no admissible draw"));
                ok = false;
                break;
            };
            let inst = catalog::instantiate(id, &values, spec.n).unwrap();
            draws += 1;
            let k = (0..3).map(|seed| curvature_scan(&inst.algebra, 10_000, seed, TOL).unwrap().max_k).fold(f64::NEG_INFINITY, f64::max);
            if k > 1e-9 {
                positive += 1;
            }
            if k > worst {
                worst = k;
                witness = format!("{values:?}");
            }
            coord = coord.max(coordinate_max(&inst.algebra));
            if i == 0 && matches!(*id, "case-2-1-2/ex3" | "case-2-1-2/ex5" | "case-1-n-2/ex2") {
                spots.push((id.to_string(), curvature_scan(&inst.algebra, 100_000, 0, TOL).unwrap().max_k, k));
            }
        }
        ok &= positive == 0;
        let mut line = format!("{id}: {positive}/20 draws with K > 1e-9, max K {worst:.2e}, coordinate planes max {coord:.2e}");
        if positive > 0 {
            line.push_str(&format!(", worst draw {witness}"));
        }
        lines.push(line);
    }
    for (id, big, small) in &spots {
        let stable = *big <= 1e-9 && (big - small).abs() <= 1e-9;
        ok &= stable;
        lines.push(format!("spot {id}: budget 1e5 max K {big:.2e} vs 1e4 {small:.2e}"));
    }
    // case-1-n-2/ex2 without any predicate, over several n
    let mut free_worst = f64::NEG_INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(92);
    for i in 0..20 {
        let n = 1 + i % 3;
        let values = catalog::sample_values("case-1-n-2/ex2", Some(n), 0, &mut rng).unwrap();
        let inst = catalog::instantiate("case-1-n-2/ex2", &values, Some(n)).unwrap();
        free_worst = free_worst.max(curvature_scan(&inst.algebra, 10_000, 0, TOL).unwrap().max_k);
    }
    ok &= free_worst <= 1e-9;
    lines.push(format!("case-1-n-2/ex2 unconstrained, n = 1..3: max K {free_worst:.2e}"));
    let summary = format!("{draws} predicate draws x 3 seeds at budget 1e4");
    outcome(ok, format!("{summary}\n    {}", lines.join("\n    ")))
}

fn criterion_6() -> Outcome {
    let (p6, _) = catalog::ansatz("case-0-2-2/ex1", None).unwrap();
    let (p8, _) = catalog::ansatz("case-1-2-2/ex1", None).unwrap();
    let raw = |p: &liemorph_core::symbolic::ParametricAlgebra| {
        p.jacobi_components().iter().filter(|c| !c.poly.is_zero()).count()
    };
    let (n6, n8) = (p6.jacobi_system().len(), p8.jacobi_system().len());
    let mut ok = true;
    let mut notes = vec![format!(
        "(0,2,2) ansatz: {n6} equations (raw {}), (1,2,2) ansatz: {n8} equations (raw {}), expected 8 and 20",
        raw(&p6),
        raw(&p8)
    )];
    let mut cases: Vec<(&str, Option<usize>)> = vec![("case-2-0-2", None), ("case-1-1-2", None)];
    for i in 1..=6 {
        cases.push((["case-2-1-2/ex1", "case-2-1-2/ex2", "case-2-1-2/ex3", "case-2-1-2/ex4", "case-2-1-2/ex5", "case-2-1-2/ex6"][i - 1], None));
    }
    cases.extend([("case-1-n-2/ex2", Some(1)), ("case-1-n-2/ex2", Some(3))]);
    let mut verified = 0;
    for (id, n) in cases {
        let (p, _) = catalog::ansatz(id, n).unwrap();
        let given = catalog::constraints(id, n).unwrap();
        let v = verify_family_constraints(&p, &given).unwrap();
        if v.implied && v.points == VERIFY_POINTS {
            verified += 1;
        } else {
            ok = false;
            notes.push(format!("{id}: not implied, witness {:?}", v.witness.map(|w| p.format(&w))));
        }
    }
    notes.push(format!("{verified} displayed constraint sets imply Jacobi at {VERIFY_POINTS} exact points each"));
    outcome(ok, notes.join("; "))
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 1..=3 {
        let beta = 0.7;
        let values = BTreeMap::from([("beta".to_string(), beta)]);
        let inst = catalog::instantiate("case-1-n-2/ex2", &values, Some(n)).unwrap();
        let d = &inst.decomposition;
        let roots = root_decomposition(&inst.algebra, &d.a, &d.n(), TOL).unwrap();
        let got: Vec<(f64, f64, usize)> = roots.iter().map(|r| (r.alpha[0], r.beta[0], r.dim())).collect();
        let want = [(0.5, beta, 2), (1.0, 0.0, n)];
        let matches = got.len() == 2
            && got.iter().zip(want).all(|(g, w)| (g.0 - w.0).abs() < 1e-9 && (g.1 - w.1).abs() < 1e-9 && g.2 == w.2);
        ok &= matches;
        if !matches {
            notes.push(format!("n={n}: roots {got:?}"));
        }
    }
    notes.push("case-1-n-2/ex2 roots recovered for n = 1..3".into());
    let jordan = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]).map(|x| Complex::new(x, 0.0));
    let nr = normality_report(&jordan, TOL).unwrap();
    let expected_min = (10.0 - 80f64.sqrt()) / 8.0;
    let jordan_ok = !nr.is_normal && nr.is_almost_normal && (nr.min_eig_n - expected_min).abs() < 1e-12;
    ok &= jordan_ok;
    notes.push(format!("Jordan: normal={}, almost normal={}, min eig N {:.6}", nr.is_normal, nr.is_almost_normal, nr.min_eig_n));

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut lemma = 0.0f64;
    for _ in 0..100 {
        let pairs = rng.gen_range(1..=2);
        let m = 2 * pairs;
        let (alpha, beta) = (rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0));
        let mut l = DMatrix::zeros(m, m);
        for p in 0..pairs {
            let i = 2 * p;
            l[(i, i)] = alpha;
            l[(i + 1, i + 1)] = alpha;
            l[(i + 1, i)] = beta;
            l[(i, i + 1)] = -beta;
        }
        let q = DMatrix::from_fn(m, m, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
        let l = &q * l * q.transpose();
        // extra real root 3 + alpha on one more axis
        let dim = m + 2;
        let mut entries = Vec::new();
        for j in 0..m {
            for k in 0..m {
                entries.push((0, 1 + j, 1 + k, l[(k, j)]));
            }
        }
        entries.push((0, dim - 1, dim - 1, alpha + 3.0));
        let a = alg(dim, &entries);
        let roots = root_decomposition(&a, &[0], &(1..dim).collect::<Vec<_>>(), TOL).unwrap();
        let Some(root) = roots.iter().find(|r| r.is_complex()) else {
            ok = false;
            continue;
        };
        let b = DMatrix::from_columns(&root.vectors());
        let ad = a.ad(&a.basis_vector(0)).unwrap();
        let r = b.transpose() * ad * &b;
        let dev = (&r + r.transpose() - DMatrix::identity(root.dim(), root.dim()) * (2.0 * root.alpha[0])).norm();
        lemma = lemma.max(dev);
    }
    ok &= lemma <= 1e-9;
    notes.push(format!("normal-root lemma on 100 constructions, max deviation {lemma:.1e}"));
    outcome(ok, notes.join("; "))
}

fn criterion_8(draws: &[Instance]) -> Outcome {
    let mut ok = true;
    let (mut implication_failures, mut omega_worst, mut omega_checked) = (0, 0.0f64, 0);
    for d in draws {
        let m = check_morphism(&d.algebra, &d.decomposition, TOL).unwrap();
        let f = check_foliation(&d.algebra, &d.decomposition, TOL).unwrap();
        if m.passed() && !f.passed() {
            implication_failures += 1;
        }
        let structural = ["i", "ii", "iii", "iv+v", "vi"].iter().all(|id| f.item(id).map(|i| i.passed).unwrap_or(false));
        if structural {
            omega_worst = omega_worst.max(omega_form(&d.algebra, &d.decomposition, TOL).unwrap().closedness_residual);
            omega_checked += 1;
        }
    }
    ok &= implication_failures == 0 && omega_worst <= 1e-10;
    // A, Z1, Z2, Z3 with [A, Z_i] = alpha Z_i
    let alpha = 0.7;
    let fixture = alg(4, &[(0, 1, 1, alpha), (0, 2, 2, alpha), (0, 3, 3, alpha)]);
    let dec = Decomposition::new(vec![0], vec![], vec![1, 2, 3]);
    let om = omega_form(&fixture, &dec, TOL).unwrap();
    let fixture_ok = (om.omega[0] - alpha).abs() <= 1e-12 && om.closedness_residual <= 1e-10;
    ok &= fixture_ok;
    outcome(
        ok,
        format!(
            "{implication_failures} implication failures over {} instances; omega residual max {omega_worst:.1e} \
             over {omega_checked}; dim m = 3 fixture omega(A) = {:.3} (alpha = {alpha})",
            draws.len(),
            om.omega[0]
        ),
    )
}

/// Random Lie algebra: R^2 acting on R^(dim-2) by commuting `D` and
/// `D^2 + c`, then a random change of basis and a random metric.
fn random_algebra(rng: &mut ChaCha8Rng) -> MetricLieAlgebra {
    let dim = rng.gen_range(3..=6);
    let n = dim - 2;
    let d1 = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let c = rng.gen_range(-1.0..1.0);
    let d2 = &d1 * &d1 + DMatrix::identity(n, n) * c;
    let mut entries = Vec::new();
    for (h, d) in [(0, &d1), (1, &d2)] {
        for j in 0..n {
            for k in 0..n {
                entries.push((h, 2 + j, 2 + k, d[(k, j)]));
            }
        }
    }
    let s = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-0.5..0.5));
    let gram = &s * s.transpose() + DMatrix::identity(dim, dim);
    let base = MetricLieAlgebra::new(dim, &entries, Some(gram)).unwrap();
    let p = DMatrix::identity(dim, dim) + DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-0.3..0.3));
    base.change_basis(&p, (1..=dim).map(|i| format!("f{i}")).collect()).unwrap()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut torsion, mut metric, mut bianchi) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let a = random_algebra(&mut rng);
        let conn = connection_coeffs(&a, 1e-9).unwrap();
        torsion = torsion.max(conn.torsion_residual(&a));
        metric = metric.max(conn.metric_compatibility_residual());
        let ev = CurvatureEvaluator::new(&a);
        let n = a.dim();
        for _ in 0..5 {
            let v: Vec<Vec<f64>> = (0..3).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let r1 = ev.riemann(&v[0], &v[1], &v[2]);
            let r2 = ev.riemann(&v[1], &v[2], &v[0]);
            let r3 = ev.riemann(&v[2], &v[0], &v[1]);
            let s: f64 = (0..n).map(|i| (r1[i] + r2[i] + r3[i]).powi(2)).sum::<f64>().sqrt();
            bianchi = bianchi.max(s);
        }
    }
    let hyp = alg(2, &[(0, 1, 1, 1.0)]);
    let k_hyp = sectional_curvature(&hyp, &hyp.basis_vector(0), &hyp.basis_vector(1)).unwrap();
    let so3 = alg(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)]);
    let k_so3 = sectional_curvature(&so3, &so3.basis_vector(0), &so3.basis_vector(1)).unwrap();
    outcome(
        torsion <= 1e-10 && metric <= 1e-10 && bianchi <= 1e-10 && (k_hyp + 1.0).abs() <= 1e-10 && (k_so3 - 0.25).abs() <= 1e-10,
        format!(
            "100 random algebras: torsion {torsion:.1e}, metric {metric:.1e}, Bianchi {bianchi:.1e}; \
             K(hyperbolic) = {k_hyp}, K(so3) = {k_so3}"
        ),
    )
}

fn main() {
    // libtest passes flags such as --nocapture; this harness ignores them.
    let start = Instant::now();
    let draws = catalog_draws();
    let draw_time = start.elapsed();
    let mut runs: Vec<(usize, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(|| criterion_1(&draws))),
        (2, Box::new(|| criterion_2(&draws))),
        (3, Box::new(|| criterion_3(&draws))),
        (4, Box::new(criterion_4)),
        (5, Box::new(criterion_5)),
        (6, Box::new(criterion_6)),
        (7, Box::new(criterion_7)),
        (8, Box::new(|| criterion_8(&draws))),
        (9, Box::new(criterion_9)),
    ];
    println!("catalog draws built in {:.2?}", draw_time);
    let mut failures = 0;
    for (n, run) in runs.drain(..) {
        let t = Instant::now();
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        failures += usize::from(!o.passed);
        println!("criterion {n}: {status} ({:.2?}) {}", t.elapsed(), o.detail);
    }
    println!("criterion 10: see the liemorph-cli acceptance target");
    if failures > 0 {
        std::process::exit(1);
    }
}
