use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &str) {
    Python::initialize();
    Python::attach(|py| {
        let globals = PyDict::new(py);
        globals.set_item("bw", branchwork_py::make_module(py).unwrap()).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn words_and_orders() {
    run(r#"
eng = bw.Engine()
k5 = bw.GroupSpec("K5")
w = bw.Word.directed(k5) * bw.Word.rooted(k5, "s[0]")
assert str(w) == "D s[0]"
assert eng.order(w) == 4
assert eng.is_trivial(w * w * w * w) is True
assert eng.equal(w, w.inverse()) is False
assert bw.Word.from_json(w.to_json(), k5) == w
"#);
}

#[test]
fn errors_map_to_exceptions() {
    run(r#"
eng = bw.Engine(word_letters=8)
k1 = bw.GroupSpec.kr(1)
try:
    eng.order(bw.Word(k1, "D s[0]"))
    raise SystemExit("no error")
except bw.BudgetExceeded:
    pass
for bad in [lambda: bw.GroupSpec("K0"), lambda: bw.Word(k1, "s[4]"), lambda: eng.check("nope")]:
    try:
        bad()
        raise SystemExit("accepted")
    except ValueError:
        pass
"#);
}

#[test]
fn tables_and_reports() {
    run(r#"
eng = bw.Engine()
k3 = bw.GroupSpec("K3")
ball = eng.ball(k3, 1, gens="E")
assert [n for n, _ in ball] == [0, 1, 1, 1, 1]
rows = eng.period_growth(bw.GroupSpec("K5"), 2)
assert [r["pi"] for r in rows] == [1, 2, 8] and all(r["exact"] for r in rows)
assert eng.min_length(bw.Word(k3, "D s[0] D"), 4) == 3
rep = eng.check("check_commutator_sections", r=6)
assert rep["passed"] and rep["instances"] > 0
assert eng.chi(bw.GroupSpec("K5"), "xx", 1) is None
"#);
}
