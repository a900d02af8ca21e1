//! Byte-level determinism of `--json` output over the whole command set.

mod common;

use common::{emit, instantiate, liemorph, scratch, write};

const RUNS: usize = 3;

fn main() {
    let dir = scratch("acceptance");
    let ex2 = instantiate(&dir, "ex2.json", &["case-1-n-2/ex2", "--n", "2", "--set", "beta=1/3"]);
    let ex3 = instantiate(
        &dir,
        "ex3.json",
        &["case-2-1-2/ex3", "--set", "theta=5", "--set", "x=1", "--set", "alpha=1", "--set", "beta=0", "--set", "y=0"],
    );
    let two = instantiate(&dir, "two.json", &["case-1-1-2", "--set", "lambda=1", "--set", "alpha=1/2", "--set", "beta=0", "--set", "theta=1"]);
    let ansatz = emit(&dir, "ansatz.json", &["catalog", "ansatz", "case-2-1-2/ex1"]);
    let given = emit(&dir, "given.json", &["catalog", "constraints", "case-2-1-2/ex1"]);
    let partial = write(&dir, "partial.json", r#"["a*alpha + b*x"]"#);
    let written = dir.join("written.json").to_string_lossy().into_owned();

    let matrix: Vec<Vec<&str>> = vec![
        vec!["check", "jacobi", &ex2],
        vec!["check", "morphism", &ex2],
        vec!["check", "foliation", &two],
        vec!["check", "hadamard", &ex2, "--root", "0"],
        vec!["curvature", "scan", &ex2, "--budget", "3000", "--seed", "0"],
        vec!["curvature", "scan", &ex3, "--budget", "3000", "--seed", "11", "--assert-nonpositive"],
        vec!["curvature", "plane", &ex3, "--x", "1,0,0,0,0", "--y", "0,0,0.3,-1,0"],
        vec!["rootspaces", &ex2],
        vec!["rootspaces", &ex3, "--a", "0,1", "--n", "2,3,4"],
        vec!["catalog", "list"],
        vec![
            "catalog", "instantiate", "case-2-1-2/ex5", "--set", "alpha=1", "--set", "beta=1", "--set", "lambda=1",
            "--set", "mu=1", "--set", "x=1", "--set", "y=1", "--out", &written,
        ],
        vec![
            "catalog", "instantiate", "case-1-2-2/ex3", "--set", "alpha=1", "--set", "c=0.5", "--set", "t=1",
            "--set", "tau=1", "--set", "theta=-2",
        ],
        vec!["catalog", "ansatz", "case-0-2-2/ex2"],
        vec!["catalog", "constraints", "case-1-2-2/ex2"],
        vec!["catalog", "predicate", "case-2-1-2/ex3", "--set", "theta=5", "--set", "x=1", "--set", "alpha=1"],
        vec!["constraints", &ansatz],
        vec!["constraints", &ansatz, "--reduce"],
        vec!["constraints", "verify", &ansatz, "--given", &given, "--seed", "3"],
        vec!["constraints", "verify", &ansatz, "--given", &partial],
        vec!["check", "jacobi", "/no/such/file.json"],
    ];

    let mut bad = Vec::new();
    let mut codes = [0usize; 3];
    for args in &matrix {
        let mut full = vec!["--json"];
        full.extend(args.iter().copied());
        let first = liemorph(&full, None);
        if let Some(c) = codes.get_mut(first.code as usize) {
            *c += 1;
        }
        let stable = (1..RUNS).all(|_| {
            let again = liemorph(&full, None);
            again.stdout == first.stdout && again.code == first.code
        });
        if first.stdout.is_empty() || !stable {
            bad.push(args[..2.min(args.len())].join(" "));
        }
    }
    let pass = bad.is_empty();
    println!(
        "criterion 10: {}  {} invocations x {RUNS} runs, exit codes 0/1/2 = {}/{}/{}{}",
        if pass { "PASS" } else { "FAIL" },
        matrix.len(),
        codes[0],
        codes[1],
        codes[2],
        if pass { String::new() } else { format!("; differing: {}", bad.join(", ")) }
    );
    if !pass {
        std::process::exit(1);
    }
}
