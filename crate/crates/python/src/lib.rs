//! Python bindings. Reports and what-if results come back as canonical JSON
//! text; `json.loads` turns them into dictionaries.

use pyo3::create_exception;
use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cdaimo_core::dsl::{bind, parse_expr, render_expr};
use cdaimo_core::reasoner::{explain, holds, SaturationResult};
use cdaimo_core::report::{to_canonical_json, write_report, Format};
use cdaimo_core::scenario::{dump_kb, load_doc, parse_directive, parse_scenario, LoadResult, Override, ScenarioDoc, ScenarioError};
use cdaimo_core::seed::{builtin_bound_axioms, seed_kb};
use cdaimo_core::{assess_loaded, Error as CoreError};

create_exception!(cdaimo, ScenarioSyntaxError, PyValueError, "Scenario text that does not load; carries `line` and `column`.");

fn scenario_err(py: Python<'_>, e: &ScenarioError) -> PyErr {
    let err = ScenarioSyntaxError::new_err(e.to_string());
    let value = err.value(py);
    let _ = value.setattr("line", e.line);
    let _ = value.setattr("column", e.column);
    let _ = value.setattr("code", e.kind.code());
    err
}

fn core_err(py: Python<'_>, e: CoreError) -> PyErr {
    match e {
        CoreError::Scenario(s) => scenario_err(py, &s),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn format_of(name: &str) -> PyResult<Format> {
    match name {
        "json" => Ok(Format::Machine),
        "text" => Ok(Format::Text),
        other => Err(PyValueError::new_err(format!("unknown format `{other}`, expected `json` or `text`"))),
    }
}

/// A loaded scenario. Directives can be added one line at a time; every
/// query reasons over the current state.
#[pyclass(module = "cdaimo")]
struct Scenario {
    doc: ScenarioDoc,
    load: LoadResult,
    saturated: Option<SaturationResult>,
}

impl Scenario {
    fn saturation(&mut self, py: Python<'_>) -> PyResult<&SaturationResult> {
        if self.saturated.is_none() {
            let a = assess_loaded(self.load.clone(), false).map_err(|e| core_err(py, e))?;
            self.saturated = Some(a.result);
        }
        Ok(self.saturated.as_ref().expect("just set"))
    }
}

#[pymethods]
impl Scenario {
    #[new]
    fn new(py: Python<'_>, text: &str) -> PyResult<Self> {
        let doc = parse_scenario(text).map_err(|e| scenario_err(py, &e))?;
        let load = load_doc(&doc).map_err(|e| scenario_err(py, &e))?;
        Ok(Scenario { doc, load, saturated: None })
    }

    #[getter]
    fn id(&self) -> String {
        self.load.id.clone()
    }

    /// Validation warnings as `(line, message)` pairs.
    #[getter]
    fn warnings(&self) -> Vec<(Option<u32>, String)> {
        self.load.warnings.iter().map(|w| (w.line, w.violation.message.clone())).collect()
    }

    fn individuals(&self) -> Vec<String> {
        self.load.kb.individuals().map(|i| i.name.to_string()).collect()
    }

    /// Adds one directive line. The scenario is unchanged if it fails.
    fn add(&mut self, py: Python<'_>, line: &str) -> PyResult<()> {
        let directive = parse_directive(line, self.doc.last_line() + 1).map_err(|e| scenario_err(py, &e))?;
        let mut doc = self.doc.clone();
        doc.directives.push(directive);
        self.load = load_doc(&doc).map_err(|e| scenario_err(py, &e))?;
        self.doc = doc;
        self.saturated = None;
        Ok(())
    }

    #[pyo3(signature = (trace = false, format = "json"))]
    fn reason(&self, py: Python<'_>, trace: bool, format: &str) -> PyResult<String> {
        let format = format_of(format)?;
        let a = assess_loaded(self.load.clone(), trace).map_err(|e| core_err(py, e))?;
        Ok(write_report(&a.report, format, false))
    }

    /// Whether `individual` is an instance of the class expression after
    /// saturation.
    fn holds(&mut self, py: Python<'_>, individual: &str, expr: &str) -> PyResult<bool> {
        let parsed = parse_expr(expr).map_err(|e| PyValueError::new_err(format!("{e:?}")))?;
        let result = self.saturation(py)?;
        let bound = bind(&result.kb_after, &parsed).map_err(|errs| {
            PyValueError::new_err(errs.iter().map(|e| e.message.clone()).collect::<Vec<_>>().join("; "))
        })?;
        holds(&result.kb_after, individual, &bound).map_err(|e| PyKeyError::new_err(e.to_string()))
    }

    /// Rendered proof tree for a fact spelled `x : C`, `s p o` or `s p value`.
    fn explain(&mut self, py: Python<'_>, fact: &str) -> PyResult<String> {
        let result = self.saturation(py)?;
        let found = result.kb_after.find_fact(fact).ok_or_else(|| PyKeyError::new_err(format!("`{fact}` does not hold")))?;
        let tree = explain(result, &found).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok(tree.render())
    }

    /// Reports before and after `subject.property=value` overrides, with
    /// their differences, as JSON.
    #[pyo3(signature = (overrides, trace = false))]
    fn whatif(&self, py: Python<'_>, overrides: Vec<String>, trace: bool) -> PyResult<String> {
        let parsed = overrides
            .iter()
            .map(|o| o.parse::<Override>().map_err(|e| scenario_err(py, &e)))
            .collect::<PyResult<Vec<_>>>()?;
        let w = cdaimo_core::whatif(&self.doc, &parsed, trace).map_err(|e| core_err(py, e))?;
        Ok(to_canonical_json(&w))
    }

    #[pyo3(signature = (saturated = false))]
    fn dump(&mut self, py: Python<'_>, saturated: bool) -> PyResult<String> {
        let (id, axioms) = (self.load.id.clone(), self.load.axioms.clone());
        if saturated {
            let result = self.saturation(py)?;
            Ok(dump_kb(&result.kb_after, &id, &axioms))
        } else {
            Ok(dump_kb(&self.load.kb, &id, &axioms))
        }
    }

    fn __repr__(&self) -> String {
        format!("Scenario({:?}, {} individuals)", self.load.id, self.load.kb.individuals().count())
    }
}

/// Machine (`json`) or text report for scenario text.
#[pyfunction]
#[pyo3(signature = (text, trace = false, format = "json"))]
fn reason(py: Python<'_>, text: &str, trace: bool, format: &str) -> PyResult<String> {
    let format = format_of(format)?;
    let a = cdaimo_core::assess(text, trace).map_err(|e| core_err(py, e))?;
    Ok(write_report(&a.report, format, false))
}

/// Canonical rendering of a class expression.
#[pyfunction]
fn normalize_expr(text: &str) -> PyResult<String> {
    parse_expr(text).map(|e| render_expr(&e)).map_err(|e| PyValueError::new_err(format!("{e:?}")))
}

/// The seed ontology in scenario syntax.
#[pyfunction]
fn seed_dump() -> String {
    let axioms: Vec<_> = builtin_bound_axioms().iter().map(|(id, ax)| (id.to_string(), ax.clone())).collect();
    dump_kb(&seed_kb(), "seed", &axioms)
}

#[pymodule]
fn cdaimo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scenario>()?;
    m.add_function(wrap_pyfunction!(reason, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_expr, m)?)?;
    m.add_function(wrap_pyfunction!(seed_dump, m)?)?;
    m.add("ScenarioSyntaxError", m.py().get_type::<ScenarioSyntaxError>())?;
    Ok(())
}
