//! Python bindings. The Python package `branchwork` re-exports these from
//! `branchwork._native`.

use branchwork::order::{self, OrderResult, PeriodOptions};
use branchwork::verify::{self, AbstractWord, ChiResult, SuiteOptions};
use branchwork::{Budgets, Error, F2Vector, GenKind, Letter, Triviality};
use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(_native, BudgetExceeded, PyException, "A resource budget ran out before the answer was decided.");

fn py_err(e: Error) -> PyErr {
    if e.is_budget() {
        BudgetExceeded::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn gen_kind(s: &str) -> PyResult<GenKind> {
    s.parse().map_err(py_err)
}

fn json_loads<'py>(py: Python<'py>, s: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (s,))
}

/// A group: `GroupSpec("K5")`, `GroupSpec("G127")`, `GroupSpec("G3+1")` or the JSON form.
#[pyclass(frozen, eq, hash, skip_from_py_object, module = "branchwork")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct GroupSpec(branchwork::GroupSpec);

#[pymethods]
impl GroupSpec {
    #[new]
    fn new(s: &str) -> PyResult<Self> {
        s.parse().map(GroupSpec).map_err(py_err)
    }

    #[staticmethod]
    fn kr(r: u64) -> PyResult<Self> {
        branchwork::GroupSpec::kr(r).map(GroupSpec).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (f0, base = 0))]
    fn growing(f0: u64, base: u64) -> PyResult<Self> {
        branchwork::GroupSpec::growing(f0, base).map(GroupSpec).map_err(py_err)
    }

    /// Rank of the level, as a decimal string (it can be astronomically large).
    fn rank(&self, level: u64) -> String {
        self.0.rank(level).to_string()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("spec serializes")
    }

    fn __repr__(&self) -> String {
        format!("GroupSpec({:?})", self.to_json())
    }

    fn __str__(&self) -> String {
        self.0.name()
    }
}

/// A word in rooted letters and the directed generator. `==` compares letters;
/// use `Engine.equal` for equality in the group.
#[pyclass(frozen, eq, hash, skip_from_py_object, module = "branchwork")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Word(branchwork::Word);

#[pymethods]
impl Word {
    /// Parses the text form, e.g. `"D s[0] D c[1,2]"` or `"1"`.
    #[new]
    #[pyo3(signature = (spec, text, level = 0))]
    fn new(spec: &GroupSpec, text: &str, level: u64) -> PyResult<Self> {
        branchwork::Word::parse_text(spec.0, level, text).map(Word).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (spec, level = 0))]
    fn identity(spec: &GroupSpec, level: u64) -> Self {
        Word(branchwork::Word::identity(spec.0, level))
    }

    #[staticmethod]
    #[pyo3(signature = (spec, level = 0))]
    fn directed(spec: &GroupSpec, level: u64) -> Self {
        Word(branchwork::Word::directed(spec.0, level))
    }

    /// A rooted letter from vector text such as `"s[0,3]"` or `"c[1]"`.
    #[staticmethod]
    #[pyo3(signature = (spec, vector, level = 0))]
    fn rooted(spec: &GroupSpec, vector: &str, level: u64) -> PyResult<Self> {
        let v: F2Vector = vector.parse().map_err(py_err)?;
        branchwork::Word::from_letters(spec.0, level, vec![Letter::Rooted(v)])
            .map(Word)
            .map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (json, spec = None))]
    fn from_json(json: &str, spec: Option<&GroupSpec>) -> PyResult<Self> {
        branchwork::Word::parse_json(spec.map(|s| s.0), json).map(Word).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json_string()
    }

    #[getter]
    fn spec(&self) -> GroupSpec {
        GroupSpec(*self.0.spec())
    }

    #[getter]
    fn level(&self) -> u64 {
        self.0.level()
    }

    fn __mul__(&self, other: &Word) -> PyResult<Self> {
        self.0.try_mul(&other.0).map(Word).map_err(py_err)
    }

    fn inverse(&self) -> Self {
        Word(self.0.inverse())
    }

    /// `h⁻¹ w h`.
    fn conj(&self, h: &Word) -> PyResult<Self> {
        self.0.same_group(&h.0).map_err(py_err)?;
        Ok(Word(self.0.conj(&h.0)))
    }

    /// `w⁻¹ h⁻¹ w h`.
    fn commutator(&self, h: &Word) -> PyResult<Self> {
        self.0.same_group(&h.0).map_err(py_err)?;
        Ok(Word(self.0.commutator(&h.0)))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Word({:?})", self.0.to_string())
    }
}

/// A vertex below the root of the subtree at `start_level`, e.g. `"[s[0], c[]]"`.
#[pyclass(frozen, eq, hash, skip_from_py_object, module = "branchwork")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Vertex(branchwork::VertexPath);

#[pymethods]
impl Vertex {
    #[new]
    #[pyo3(signature = (spec, text, start_level = 0))]
    fn new(spec: &GroupSpec, text: &str, start_level: u64) -> PyResult<Self> {
        branchwork::VertexPath::parse_text(spec.0, start_level, text)
            .map(Vertex)
            .map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json_string()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Vertex({:?})", self.0.to_string())
    }
}

/// Exact computations under resource budgets. Budget overruns raise
/// `BudgetExceeded`; answers are never truncated.
#[pyclass(frozen, module = "branchwork")]
struct Engine(branchwork::Engine);

#[pymethods]
impl Engine {
    #[new]
    #[pyo3(signature = (*, support = None, recursion = None, ball = None, vertices = None, bits = None, word_letters = None))]
    fn new(
        support: Option<usize>,
        recursion: Option<usize>,
        ball: Option<usize>,
        vertices: Option<u64>,
        bits: Option<u64>,
        word_letters: Option<usize>,
    ) -> Self {
        let d = Budgets::default();
        Engine(branchwork::Engine::new(Budgets {
            support: support.unwrap_or(d.support),
            recursion: recursion.unwrap_or(d.recursion),
            ball: ball.unwrap_or(d.ball),
            vertices: vertices.unwrap_or(d.vertices),
            bits: bits.unwrap_or(d.bits),
            word_letters: word_letters.unwrap_or(d.word_letters),
        }))
    }

    fn section(&self, w: &Word, v: &Vertex) -> PyResult<Word> {
        self.0.section(&w.0, &v.0).map(Word).map_err(py_err)
    }

    fn act(&self, w: &Word, v: &Vertex) -> PyResult<Vertex> {
        self.0.act(&w.0, &v.0).map(Vertex).map_err(py_err)
    }

    /// `True`, `False`, or `None` when the recursion budget ran out.
    fn is_trivial(&self, py: Python<'_>, w: &Word) -> Option<bool> {
        py.detach(|| self.0.is_trivial(&w.0).decided())
    }

    fn equal(&self, py: Python<'_>, a: &Word, b: &Word) -> PyResult<Option<bool>> {
        a.0.same_group(&b.0).map_err(py_err)?;
        Ok(py.detach(|| match self.0.equal(&a.0, &b.0) {
            Triviality::Unknown => None,
            t => Some(t.is_trivial()),
        }))
    }

    /// The order of `w`; raises `BudgetExceeded` (mentioning a proof of
    /// infinite order when one was found) if it is not decided.
    fn order(&self, py: Python<'_>, w: &Word) -> PyResult<BigUint> {
        match py.detach(|| order::order(&self.0, &w.0)) {
            r @ OrderResult::Finite { .. } => Ok(r.order().expect("finite")),
            r => Err(BudgetExceeded::new_err(r.to_string())),
        }
    }

    /// Elements of the Cayley ball as `(length, word)` pairs in canonical order.
    #[pyo3(signature = (spec, radius, gens = "S", level = 0, fingerprint_depth = 4))]
    fn ball(
        &self,
        py: Python<'_>,
        spec: &GroupSpec,
        radius: u32,
        gens: &str,
        level: u64,
        fingerprint_depth: u32,
    ) -> PyResult<Vec<(u32, Word)>> {
        let kind = gen_kind(gens)?;
        let ball = py
            .detach(|| order::ball_enumerate(&self.0, spec.0, level, kind, radius, fingerprint_depth))
            .map_err(py_err)?;
        Ok(ball.canonical().into_iter().map(|e| (e.length, Word(e.word))).collect())
    }

    /// Word length, or `None` if longer than `radius_limit`.
    #[pyo3(signature = (w, radius_limit, gens = "S", fingerprint_depth = 4))]
    fn min_length(
        &self,
        py: Python<'_>,
        w: &Word,
        radius_limit: u32,
        gens: &str,
        fingerprint_depth: u32,
    ) -> PyResult<Option<u32>> {
        let kind = gen_kind(gens)?;
        py.detach(|| order::min_length(&self.0, &w.0, kind, radius_limit, fingerprint_depth))
            .map_err(py_err)
    }

    /// Rows `{"n", "ball_size", "pi", "witness", "exact"}` for `n = 0..=n`.
    #[pyo3(signature = (spec, n, gens = "S", level = 0, ball_radius = 2, covering_radius = 5, samples = 0, seed = 0))]
    #[allow(clippy::too_many_arguments)]
    fn period_growth<'py>(
        &self,
        py: Python<'py>,
        spec: &GroupSpec,
        n: u32,
        gens: &str,
        level: u64,
        ball_radius: u32,
        covering_radius: u32,
        samples: u64,
        seed: u64,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let kind = gen_kind(gens)?;
        let opts = PeriodOptions {
            ball_radius,
            covering_radius,
            samples,
            seed,
            ..PeriodOptions::default()
        };
        let table = py
            .detach(|| order::period_growth(&self.0, spec.0, level, kind, n, &opts))
            .map_err(py_err)?;
        table
            .rows
            .into_iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("n", r.n)?;
                d.set_item("ball_size", r.ball_size)?;
                d.set_item("pi", r.pi())?;
                d.set_item("exact", r.is_exact())?;
                d.set_item("witness", Word(r.witness))?;
                Ok(d)
            })
            .collect()
    }

    /// Least total length of a tuple on which `law` (e.g. `"xyXY"`) is not
    /// the identity, with the tuple; `None` if nothing up to `radius` works.
    #[pyo3(signature = (spec, law, radius, gens = "S", level = 0))]
    fn chi(
        &self,
        py: Python<'_>,
        spec: &GroupSpec,
        law: &str,
        radius: u32,
        gens: &str,
        level: u64,
    ) -> PyResult<Option<(u32, Vec<Word>)>> {
        let kind = gen_kind(gens)?;
        let w: AbstractWord = law.parse().map_err(py_err)?;
        match py
            .detach(|| verify::chi_complexity(&self.0, spec.0, level, kind, &w, radius))
            .map_err(py_err)?
        {
            ChiResult::Found { total, witness } => Ok(Some((total, witness.into_iter().map(Word).collect()))),
            ChiResult::NotFound { .. } => Ok(None),
        }
    }

    /// Runs a named check and returns its report as a dict.
    #[pyo3(signature = (name, r = None, radius = None, seed = 0))]
    fn check<'py>(
        &self,
        py: Python<'py>,
        name: &str,
        r: Option<u64>,
        radius: Option<u32>,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mut opts = SuiteOptions {
            seed,
            ..SuiteOptions::default()
        };
        if let Some(r) = r {
            opts.two_layer_r = r;
            opts.commutator_r = r;
        }
        if let Some(radius) = radius {
            opts.two_layer_radius = radius;
            opts.growing_radius = radius;
        }
        let rep = py.detach(|| verify::run_check(&self.0, name, &opts)).map_err(py_err)?;
        json_loads(py, &rep.to_json_string())
    }
}

/// Names accepted by `Engine.check`.
#[pyfunction]
fn check_names() -> Vec<&'static str> {
    verify::CHECK_NAMES.to_vec()
}

/// Builds the module outside an import, for embedding.
pub fn make_module(py: Python<'_>) -> PyResult<Bound<'_, PyModule>> {
    let m = PyModule::new(py, "_native")?;
    _native(&m)?;
    Ok(m)
}

#[pymodule]
fn _native(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<GroupSpec>()?;
    m.add_class::<Word>()?;
    m.add_class::<Vertex>()?;
    m.add_class::<Engine>()?;
    m.add_function(wrap_pyfunction!(check_names, m)?)?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    Ok(())
}
