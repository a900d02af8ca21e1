//! The `liemorph` command line. [`run`] is the whole program minus process
//! plumbing, so tests can drive it in-process.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use liemorph_core::catalog::{self, FamilySpec};
use liemorph_core::symbolic::{parse_rational, verify_with_seed, VERIFY_POINTS};
use liemorph_core::{conditions, geometry, io, rootspace, CheckReport, Decomposition, Error, MetricLieAlgebra};
use nalgebra::DVector;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Map, Value};

/// Version of the `--json` layout.
pub const SCHEMA: u32 = 1;
pub const DEFAULT_TOL: f64 = 1e-9;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "liemorph", version, about = "Harmonic morphisms and curvature on metric Lie algebras")]
struct Cli {
    /// Numerical tolerance for every pass/fail decision.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Algebraic checks on an algebra file (`-` reads stdin).
    #[command(subcommand)]
    Check(CheckCmd),
    /// Sectional curvature.
    #[command(subcommand)]
    Curvature(CurvatureCmd),
    /// Generalized root spaces of n under ad(a).
    Rootspaces(BlockArgs),
    /// Built-in families.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Jacobi equations of an ansatz file.
    Constraints(ConstraintsArgs),
}

#[derive(Subcommand, Debug)]
enum CheckCmd {
    /// Jacobi identity residual.
    Jacobi { file: String },
    /// Harmonic morphism conditions for the file's decomposition.
    Morphism { file: String },
    /// Conformal foliation conditions for the file's decomposition.
    Foliation { file: String },
    /// Root-space criterion for the morphism onto one root space.
    Hadamard {
        #[command(flatten)]
        blocks: BlockArgs,
        /// Index into the list printed by `rootspaces`.
        #[arg(long)]
        root: usize,
    },
}

#[derive(Args, Debug)]
struct BlockArgs {
    file: String,
    /// Basis indices of a (default: the file's decomposition).
    #[arg(long, value_delimiter = ',')]
    a: Option<Vec<usize>>,
    /// Basis indices of n (default: k + m of the file's decomposition).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
}

#[derive(Subcommand, Debug)]
enum CurvatureCmd {
    /// Seeded search for the largest sectional curvature.
    Scan {
        file: String,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fail when a plane with K > tol is found.
        #[arg(long)]
        assert_nonpositive: bool,
    },
    /// Sectional curvature of the plane spanned by two vectors.
    Plane {
        file: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y: Vec<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    /// Every family with its dimensions and parameters.
    List,
    /// Builds a family member; writes the algebra JSON to stdout unless
    /// `--out FILE` is given.
    Instantiate {
        id: String,
        /// Parameter value, `name=value`; rationals such as `3/2` stay exact.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Writes the family's parametric ansatz JSON to stdout.
    Ansatz {
        id: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Writes the family's displayed constraints JSON to stdout.
    Constraints {
        id: String,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Evaluates the family's curvature predicate.
    Predicate {
        id: String,
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct ConstraintsArgs {
    #[command(subcommand)]
    verify: Option<ConstraintsCmd>,
    /// Ansatz file.
    file: Option<String>,
    /// Print the deduplicated system instead of every component.
    #[arg(long)]
    reduce: bool,
}

#[derive(Subcommand, Debug)]
enum ConstraintsCmd {
    /// Checks that a constraint list implies the Jacobi system.
    Verify {
        file: String,
        #[arg(long)]
        given: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = VERIFY_POINTS)]
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Outcome {
    Pass,
    Fail,
    Info,
}

impl Outcome {
    fn of(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    fn code(self) -> i32 {
        match self {
            Outcome::Fail => EXIT_FAIL,
            _ => EXIT_PASS,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Info => "INFO",
        }
    }
}

/// What a subcommand produced, before formatting.
struct Report {
    command: String,
    outcome: Outcome,
    seed: Option<u64>,
    body: Map<String, Value>,
    text: String,
}

impl Report {
    fn new(command: &str, outcome: Outcome, body: Value, text: String) -> Self {
        let body = match body {
            Value::Object(m) => m,
            other => Map::from_iter([("result".to_string(), other)]),
        };
        Self { command: command.to_string(), outcome, seed: None, body, text }
    }

    fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

enum Produced {
    Report(Report),
    /// Raw document on stdout (the algebra from `catalog instantiate`).
    Document(String),
}

#[derive(Debug)]
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

type Res<T> = std::result::Result<T, InputError>;

/// Runs the program on `argv` (including the program name). `stdin` is
/// read only when a file argument is `-`.
pub fn run<I, S>(argv: I, stdin: &mut dyn std::io::Read) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code, stdout: String::new(), stderr: text }
            } else {
                Output { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let mut reader = Reader { stdin, used: false };
    match execute(&cli, &mut reader) {
        Ok(Produced::Document(mut doc)) => {
            if !doc.ends_with('\n') {
                doc.push('\n');
            }
            Output { code: EXIT_PASS, stdout: doc, stderr: String::new() }
        }
        Ok(Produced::Report(r)) => Output { code: r.outcome.code(), stdout: render(&cli, r), stderr: String::new() },
        Err(InputError(msg)) => {
            let stdout = if cli.json {
                let mut v = serde_json::to_string_pretty(&json!({
                    "schema": SCHEMA,
                    "verdict": "error",
                    "error": msg,
                }))
                .expect("json value");
                v.push('\n');
                v
            } else {
                String::new()
            };
            Output { code: EXIT_INPUT, stdout, stderr: format!("error: {msg}\n") }
        }
    }
}

fn render(cli: &Cli, r: Report) -> String {
    if cli.json {
        let mut m = Map::new();
        m.insert("schema".into(), json!(SCHEMA));
        m.insert("command".into(), json!(r.command));
        m.insert("verdict".into(), json!(r.outcome));
        m.insert("tol".into(), json!(cli.tol));
        if let Some(s) = r.seed {
            m.insert("seed".into(), json!(s));
        }
        for (k, v) in r.body {
            m.insert(k, v);
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json value");
        s.push('\n');
        s
    } else {
        let mut s = format!("{}: {}  (tol {:e}", r.command, r.outcome.label(), cli.tol);
        if let Some(seed) = r.seed {
            let _ = write!(s, ", seed {seed}");
        }
        s.push_str(")\n");
        s.push_str(&r.text);
        s
    }
}

struct Reader<'a> {
    stdin: &'a mut dyn std::io::Read,
    used: bool,
}

impl Reader<'_> {
    fn read(&mut self, path: &str) -> Res<String> {
        if path == "-" {
            if self.used {
                return Err(InputError("stdin can only be read once".into()));
            }
            self.used = true;
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| InputError(format!("stdin: {e}")))?;
            Ok(s)
        } else {
            std::fs::read_to_string(path).map_err(|e| InputError(format!("{path}: {e}")))
        }
    }

    fn algebra(&mut self, path: &str) -> Res<(MetricLieAlgebra, Option<Decomposition>)> {
        Ok(io::read_algebra(&self.read(path)?)?)
    }

    fn decomposed(&mut self, path: &str) -> Res<(MetricLieAlgebra, Decomposition)> {
        match self.algebra(path)? {
            (alg, Some(d)) => Ok((alg, d)),
            (_, None) => Err(InputError(format!("{path}: no decomposition given"))),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn execute(cli: &Cli, input: &mut Reader) -> Res<Produced> {
    let tol = cli.tol;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(InputError(format!("tolerance must be finite and non-negative, got {tol}")));
    }
    let report = match &cli.command {
        Command::Check(CheckCmd::Jacobi { file }) => {
            let (alg, _) = input.algebra(file)?;
            let r = alg.jacobi_residual();
            let (i, j, k) = r.worst_triple;
            let text = format!("  max residual {:.3e} at triple ({i},{j},{k})\n", r.max_residual);
            Report::new(
                "check jacobi",
                Outcome::of(r.max_residual <= tol),
                json!({ "max_residual": r.max_residual, "worst_triple": [i, j, k] }),
                text,
            )
        }
        Command::Check(CheckCmd::Morphism { file }) => {
            let (alg, d) = input.decomposed(file)?;
            check_report("check morphism", conditions::check_morphism(&alg, &d, tol)?, json!({}))
        }
        Command::Check(CheckCmd::Foliation { file }) => {
            let (alg, d) = input.decomposed(file)?;
            check_report("check foliation", conditions::check_foliation(&alg, &d, tol)?, json!({}))
        }
        Command::Check(CheckCmd::Hadamard { blocks, root }) => {
            let (alg, a, n) = blocks.load(input)?;
            let roots = rootspace::root_decomposition(&alg, &a, &n, tol)?;
            let space = roots.get(*root).ok_or_else(|| {
                InputError(format!("root index {root} out of range ({} root spaces)", roots.len()))
            })?;
            let r = rootspace::check_hadamard_morphism(&alg, &a, &n, space, tol)?;
            check_report("check hadamard", r, json!({ "root": *root, "root_space": to_value(space) }))
        }
        Command::Curvature(CurvatureCmd::Scan { file, budget, seed, assert_nonpositive }) => {
            let (alg, _) = input.algebra(file)?;
            let s = geometry::curvature_scan(&alg, *budget, *seed, tol)?;
            let outcome = if *assert_nonpositive { Outcome::of(s.max_k <= tol) } else { Outcome::Info };
            let text = format!(
                "  max K {:.6e} over {} planes ({} refined)\n  x = {}\n  y = {}\n",
                s.max_k,
                s.samples_used,
                s.starts,
                vector(&s.witness.0),
                vector(&s.witness.1)
            );
            let mut body = to_value(&s);
            body["budget"] = json!(budget);
            Report::new("curvature scan", outcome, body, text).seeded(*seed)
        }
        Command::Curvature(CurvatureCmd::Plane { file, x, y }) => {
            let (alg, _) = input.algebra(file)?;
            for v in [x, y] {
                if v.len() != alg.dim() {
                    return Err(Error::DimensionMismatch { expected: alg.dim(), got: v.len() }.into());
                }
            }
            let k = geometry::sectional_curvature(&alg, &DVector::from_column_slice(x), &DVector::from_column_slice(y))?;
            Report::new("curvature plane", Outcome::Info, json!({ "k": k }), format!("  K = {k:.12e}\n"))
        }
        Command::Rootspaces(blocks) => {
            let (alg, a, n) = blocks.load(input)?;
            let roots = rootspace::root_decomposition(&alg, &a, &n, tol)?;
            let mut text = String::new();
            for (i, r) in roots.iter().enumerate() {
                let _ = writeln!(
                    text,
                    "  [{i}] dim {}  alpha {}  beta {}  order {}",
                    r.dim(),
                    vector(&r.alpha),
                    vector(&r.beta),
                    r.generalized_order
                );
            }
            Report::new("rootspaces", Outcome::Info, json!({ "roots": to_value(&roots) }), text)
        }
        Command::Catalog(CatalogCmd::List) => {
            let families = catalog::list_families();
            Report::new("catalog list", Outcome::Info, json!({ "families": to_value(&families) }), family_table(&families))
        }
        Command::Catalog(CatalogCmd::Instantiate { id, set, n, out }) => {
            let inst = instantiate(id, set, *n)?;
            let doc = io::write_algebra(&inst.algebra, Some(&inst.decomposition));
            match out.as_deref() {
                None | Some("-") => return Ok(Produced::Document(doc)),
                Some(path) => {
                    std::fs::write(path, &doc).map_err(|e| InputError(format!("{path}: {e}")))?;
                    let text = format!("  wrote {path} (dim {})\n", inst.algebra.dim());
                    Report::new(
                        "catalog instantiate",
                        Outcome::Info,
                        json!({ "id": id, "n": inst.n, "values": inst.values, "out": path }),
                        text,
                    )
                }
            }
        }
        Command::Catalog(CatalogCmd::Ansatz { id, n }) => {
            let (p, d) = catalog::ansatz(id, *n)?;
            return Ok(Produced::Document(io::write_ansatz(&p, Some(&d))));
        }
        Command::Catalog(CatalogCmd::Constraints { id, n }) => {
            let spec = catalog::family_spec(id, *n)?;
            let mut doc = serde_json::to_string_pretty(&json!({ "constraints": spec.constraints })).expect("json value");
            doc.push('\n');
            return Ok(Produced::Document(doc));
        }
        Command::Catalog(CatalogCmd::Predicate { id, set, n }) => {
            let values: BTreeMap<String, f64> =
                assignments(set)?.into_iter().map(|(k, v)| (k, v.as_f64())).collect();
            let r = catalog::hadamard_predicate(id, &values, *n)?;
            let mut text = String::new();
            for (ineq, slack) in &r.margins {
                let _ = writeln!(text, "  {:<4} {ineq}  (slack {slack:.3e})", if *slack > 0.0 { "ok" } else { "no" });
            }
            Report::new("catalog predicate", Outcome::of(r.satisfied), to_value(&r), text)
        }
        Command::Constraints(args) => constraints(args, input)?,
    };
    Ok(Produced::Report(report))
}

impl BlockArgs {
    fn load(&self, input: &mut Reader) -> Res<(MetricLieAlgebra, Vec<usize>, Vec<usize>)> {
        let (alg, d) = input.algebra(&self.file)?;
        let a = match (&self.a, &d) {
            (Some(a), _) => a.clone(),
            (None, Some(d)) => d.a.clone(),
            (None, None) => return Err(InputError(format!("{}: no decomposition given, pass --a", self.file))),
        };
        let n = match (&self.n, &d) {
            (Some(n), _) => n.clone(),
            (None, Some(d)) => d.n(),
            (None, None) => return Err(InputError(format!("{}: no decomposition given, pass --n", self.file))),
        };
        Ok((alg, a, n))
    }
}

fn check_report(command: &str, r: CheckReport, extra: Value) -> Report {
    let mut text = String::new();
    let width = r.items.iter().map(|i| i.id.len()).max().unwrap_or(2).max(2);
    let _ = writeln!(text, "  {:<width$}  {:<4}  {:>10}  description", "id", "", "residual");
    for i in &r.items {
        let _ = writeln!(
            text,
            "  {:<width$}  {:<4}  {:>10.3e}  {}",
            i.id,
            if i.passed { "pass" } else { "FAIL" },
            i.residual,
            i.description
        );
    }
    for (name, v) in &r.quantities {
        let _ = writeln!(text, "  {name} = {}", vector(v));
    }
    if !r.sound {
        text.push_str("  unsound: a precondition failed, later items were not evaluated\n");
    }
    for n in &r.notes {
        let _ = writeln!(text, "  note: {n}");
    }
    let outcome = Outcome::of(r.passed());
    let mut body = to_value(&r);
    if let (Value::Object(b), Value::Object(e)) = (&mut body, extra) {
        b.remove("verdict");
        b.extend(e);
    }
    Report::new(command, outcome, body, text)
}

fn constraints(args: &ConstraintsArgs, input: &mut Reader) -> Res<Report> {
    if let Some(ConstraintsCmd::Verify { file, given, seed, points }) = &args.verify {
        let (p, _) = io::read_ansatz(&input.read(file)?)?;
        let cs = io::read_constraints(&input.read(given)?, &p)?;
        let v = verify_with_seed(&p, &cs, *points, *seed)?;
        let witness = v.witness.as_ref().map(|w| p.format(w));
        let mut text = format!("  {} points on {} branches\n", v.points, v.branches);
        if let Some(w) = &witness {
            let _ = writeln!(text, "  not implied: {w} = 0");
        }
        let body = json!({
            "implied": v.implied,
            "witness": witness,
            "points": v.points,
            "branches": v.branches,
        });
        return Ok(Report::new("constraints verify", Outcome::of(v.implied), body, text).seeded(*seed));
    }
    let Some(file) = &args.file else {
        return Err(InputError("constraints: missing ansatz file".into()));
    };
    let (p, _) = io::read_ansatz(&input.read(file)?)?;
    let raw = p.jacobi_components();
    let mut text = String::new();
    let body = if args.reduce {
        let eqs: Vec<String> = p.jacobi_system().iter().map(|e| p.format(e)).collect();
        for e in &eqs {
            let _ = writeln!(text, "  {e} = 0");
        }
        let _ = writeln!(text, "  {} equations ({} raw components)", eqs.len(), raw.len());
        json!({ "reduced": true, "count": eqs.len(), "raw_count": raw.len(), "equations": eqs })
    } else {
        let labels = p.labels();
        let comps: Vec<Value> = raw
            .iter()
            .map(|c| {
                let (i, j, k) = c.triple;
                let poly = p.format(&c.poly);
                let _ = writeln!(text, "  ({},{},{}) [{}]  {poly} = 0", labels[i], labels[j], labels[k], labels[c.component]);
                json!({ "triple": [i, j, k], "component": c.component, "equation": poly })
            })
            .collect();
        let _ = writeln!(text, "  {} components", comps.len());
        json!({ "reduced": false, "count": comps.len(), "components": comps })
    };
    Ok(Report::new("constraints", Outcome::Info, body, text))
}

#[derive(Debug, Clone)]
enum Number {
    Exact(BigRational),
    Real(f64),
}

impl Number {
    fn as_f64(&self) -> f64 {
        match self {
            Number::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Number::Real(x) => *x,
        }
    }
}

fn assignments(set: &[String]) -> Res<BTreeMap<String, Number>> {
    let mut out = BTreeMap::new();
    for s in set {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| InputError(format!("--set expects NAME=VALUE, got `{s}`")))?;
        let k = k.trim().to_string();
        let value = match parse_rational(v) {
            Ok(q) => Number::Exact(q),
            Err(_) => Number::Real(
                v.trim().parse::<f64>().map_err(|_| InputError(format!("invalid value for `{k}`: `{v}`")))?,
            ),
        };
        if out.insert(k.clone(), value).is_some() {
            return Err(InputError(format!("parameter `{k}` set twice")));
        }
    }
    Ok(out)
}

fn instantiate(id: &str, set: &[String], n: Option<usize>) -> Res<catalog::Instance> {
    let values = assignments(set)?;
    let exact: Option<BTreeMap<String, BigRational>> = values
        .iter()
        .map(|(k, v)| match v {
            Number::Exact(q) => Some((k.clone(), q.clone())),
            Number::Real(_) => None,
        })
        .collect();
    Ok(match exact {
        Some(q) => catalog::instantiate_exact(id, &q, n)?,
        None => {
            let f = values.into_iter().map(|(k, v)| (k, v.as_f64())).collect();
            catalog::instantiate(id, &f, n)?
        }
    })
}

fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

fn family_table(families: &[FamilySpec]) -> String {
    let width = families.iter().map(|f| f.id.len()).max().unwrap_or(2);
    let mut s = String::new();
    let _ = writeln!(s, "  {:<width$}  {:>9}  {:<9}  params", "id", "a/k/m", "predicate");
    for f in families {
        let (a, k, m) = f.dims;
        let params: Vec<&str> = f.params.iter().map(|p| p.name.as_str()).collect();
        let dims = format!("{a}/{k}/{m}{}", if f.takes_n { "*" } else { "" });
        let _ = writeln!(
            s,
            "  {:<width$}  {:>9}  {:<9}  {}",
            f.id,
            dims,
            if f.predicate.is_some() { "yes" } else { "-" },
            params.join(" ")
        );
    }
    s.push_str("  (* scales with --n)\n");
    s
}
