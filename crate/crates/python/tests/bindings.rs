use std::ffi::CString;

use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module(body: &str) {
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(liemorph::liemorph)(py);
        let globals = PyDict::new(py);
        globals.set_item("lm", module).unwrap();
        let code = CString::new(body).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn morphism_report_is_a_dict() {
    with_module(
        r#"
alg = lm.instantiate("case-1-n-2/ex2", {"beta": 0.0}, n=2)
r = alg.check_morphism()
assert r["verdict"] == "pass", r
assert [i["id"] for i in r["items"]] == ["0", "i", "ii", "iii", "iv", "v"]
assert abs(r["quantities"]["lambda"][0] - 0.5) < 1e-12
"#,
    );
}

#[test]
fn errors_become_value_errors() {
    with_module(
        r#"
try:
    lm.Algebra.from_json('{"dim": 2, "brackets": [{"i": 1, "j": 0, "coeffs": {"0": 1}}]}')
    raise AssertionError("accepted")
except ValueError:
    pass
a = lm.Algebra.from_json('{"dim": 3, "brackets": []}')
assert a.decomposition is None
try:
    a.check_morphism()
    raise AssertionError("accepted")
except ValueError as e:
    assert "decomposition" in str(e)
"#,
    );
}

#[test]
fn scans_are_reproducible() {
    with_module(
        r#"
a = lm.Algebra.from_json('{"dim": 2, "brackets": [{"i": 0, "j": 1, "coeffs": {"1": 1}}]}')
s = a.curvature_scan(budget=300, seed=4)
assert s == a.curvature_scan(budget=300, seed=4)
assert abs(s["max_k"] + 1.0) < 1e-10
"#,
    );
}
