//! Python bindings for `pxlt_core`.
//!
//! Solutions cross the boundary as bit strings such as `"0110"`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pxlt_core::dependency::{self, CheckKind};
use pxlt_core::harness::level_by_rule;
use pxlt_core::noise::NoiseConfig;
use pxlt_core::optimizers::{self, RunOptions, Variant};
use pxlt_core::oracle::{self, EndpointMode, HybridTarget};
use pxlt_core::{pxlt as px, sll, Objective, RngStream, Solution};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_bits(s: &str) -> PyResult<Solution> {
    Solution::from_str_bits(s).ok_or_else(|| PyValueError::new_err(format!("not a bit string: '{s}'")))
}

/// A benchmark function, optionally noised.
#[pyclass(name = "Problem", module = "pxlt", frozen, from_py_object)]
#[derive(Clone)]
struct PyProblem {
    inner: pxlt_core::ProblemInstance,
}

#[pymethods]
impl PyProblem {
    /// Named example function: fe1, fe3, fe4, fe6, onemax[:n], dec3-ring, dec4-ring.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        Ok(PyProblem {
            inner: pxlt_core::ProblemInstance::fixture(name).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn trap_concat(order: usize, blocks: usize) -> PyResult<Self> {
        Ok(PyProblem {
            inner: pxlt_core::ProblemInstance::trap_concat(order, blocks).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn cyclic_trap(order: usize, overlap: usize, blocks: usize) -> PyResult<Self> {
        let inner = pxlt_core::ProblemInstance::cyclic_trap(order, overlap, blocks).map_err(value_err)?;
        Ok(PyProblem { inner })
    }

    #[staticmethod]
    fn bimodal_concat(order: usize, blocks: usize) -> PyResult<Self> {
        Ok(PyProblem {
            inner: pxlt_core::ProblemInstance::bimodal_concat(order, blocks).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn bimodal_cyclic(order: usize, overlap: usize, blocks: usize) -> PyResult<Self> {
        let inner = pxlt_core::ProblemInstance::bimodal_cyclic(order, overlap, blocks).map_err(value_err)?;
        Ok(PyProblem { inner })
    }

    #[staticmethod]
    fn nk(n: usize, k: usize, seed: u64) -> PyResult<Self> {
        Ok(PyProblem {
            inner: pxlt_core::problems::generate_nk(n, k, seed).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn planted_max3sat(n: usize, clause_ratio: f64, seed: u64) -> PyResult<Self> {
        let inner = pxlt_core::ProblemInstance::planted_max3sat(n, clause_ratio, seed).map_err(value_err)?;
        Ok(PyProblem { inner })
    }

    /// Returns a noised copy. `level` is a number, "midpoint" or "random-mean".
    #[pyo3(signature = (size_percent, level = None, modulus = 2, seed = 0))]
    fn with_noise(
        &self,
        size_percent: f64,
        level: Option<Bound<'_, PyAny>>,
        modulus: u32,
        seed: u64,
    ) -> PyResult<Self> {
        let base = self.inner.without_noise();
        let level = match level {
            None => level_by_rule(&base, pxlt_core::harness::DEFAULT_LEVEL_RULE, seed).map_err(value_err)?,
            Some(v) => match v.extract::<f64>() {
                Ok(x) => x,
                Err(_) => level_by_rule(&base, &v.extract::<String>()?, seed).map_err(value_err)?,
            },
        };
        let cfg = NoiseConfig::draw(base.n(), size_percent, level, modulus, seed).map_err(value_err)?;
        Ok(PyProblem {
            inner: base.with_noise(cfg),
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn known_optimum(&self) -> Option<f64> {
        self.inner.known_optimum()
    }

    #[getter]
    fn noise_level(&self) -> Option<f64> {
        self.inner.noise().map(|c| c.level())
    }

    fn evaluate(&self, bits: &str) -> PyResult<f64> {
        let s = self.checked(bits)?;
        Ok(self.inner.value(s.bits()))
    }

    /// Value without the noise term.
    fn true_value(&self, bits: &str) -> PyResult<f64> {
        let s = self.checked(bits)?;
        Ok(self.inner.true_value(s.bits()))
    }

    fn ground_truth_vig(&self) -> Option<PyVig> {
        self.inner.ground_truth_vig().map(|v| PyVig { inner: v.clone() })
    }

    fn __repr__(&self) -> String {
        format!("Problem('{}', n={})", self.inner.name(), self.inner.n())
    }
}

impl PyProblem {
    fn checked(&self, bits: &str) -> PyResult<Solution> {
        let s = parse_bits(bits)?;
        if s.len() != self.inner.n() {
            return Err(PyValueError::new_err(format!(
                "expected {} bits, got {}",
                self.inner.n(),
                s.len()
            )));
        }
        Ok(s)
    }
}

/// Variable interaction graph.
#[pyclass(name = "Vig", module = "pxlt", frozen, from_py_object)]
#[derive(Clone)]
struct PyVig {
    inner: pxlt_core::Vig,
}

#[pymethods]
impl PyVig {
    #[new]
    #[pyo3(signature = (n, edges = Vec::new()))]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= n || b >= n || a == b) {
            return Err(PyValueError::new_err(format!("bad edge ({a}, {b})")));
        }
        Ok(PyVig {
            inner: pxlt_core::Vig::from_edges(n, &edges),
        })
    }

    #[staticmethod]
    fn from_cliques(n: usize, groups: Vec<Vec<usize>>) -> PyResult<Self> {
        if groups.iter().flatten().any(|&v| v >= n) {
            return Err(PyValueError::new_err("variable index out of range"));
        }
        Ok(PyVig {
            inner: pxlt_core::Vig::from_cliques(n, &groups),
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.inner.n() && b < self.inner.n() && a != b && self.inner.has_edge(a, b)
    }

    fn __len__(&self) -> usize {
        self.inner.edge_count()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Vig(n={}, edges={})", self.inner.n(), self.inner.edge_count())
    }
}

/// Dependency structure matrix.
#[pyclass(name = "Dsm", module = "pxlt", from_py_object)]
#[derive(Clone)]
struct PyDsm {
    inner: sll::Dsm,
}

#[pymethods]
impl PyDsm {
    #[new]
    fn new(n: usize) -> Self {
        PyDsm {
            inner: sll::Dsm::new(n),
        }
    }

    /// Builds a matrix from its strict upper triangle, row by row.
    #[staticmethod]
    fn from_upper(n: usize, values: Vec<f64>) -> PyResult<Self> {
        Ok(PyDsm {
            inner: sll::Dsm::from_upper(n, &values).map_err(value_err)?,
        })
    }

    /// The example matrix for fe1 used in the documentation.
    #[staticmethod]
    fn fe1_example() -> Self {
        PyDsm {
            inner: sll::fe1_perfect_dsm(),
        }
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn get(&self, a: usize, b: usize) -> PyResult<f64> {
        self.check(a, b)?;
        Ok(self.inner.get(a, b))
    }

    fn set(&mut self, a: usize, b: usize, value: f64) -> PyResult<()> {
        self.check(a, b)?;
        if a == b || !value.is_finite() {
            return Err(PyValueError::new_err("only finite off-diagonal entries can be set"));
        }
        self.inner.set(a, b, value);
        Ok(())
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }
}

impl PyDsm {
    fn check(&self, a: usize, b: usize) -> PyResult<()> {
        if a >= self.inner.n() || b >= self.inner.n() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(())
    }
}

/// A linkage tree; nodes are listed leaves first, root last.
#[pyclass(name = "LinkageTree", module = "pxlt", frozen)]
struct PyTree {
    inner: sll::LinkageTree,
}

#[pymethods]
impl PyTree {
    /// `(members, strength)` per node; leaves have no strength.
    fn nodes(&self) -> Vec<(Vec<usize>, Option<f64>)> {
        self.inner
            .nodes()
            .iter()
            .map(|n| (n.members.clone(), n.strength))
            .collect()
    }

    fn contains(&self, mut members: Vec<usize>) -> bool {
        members.sort_unstable();
        members.dedup();
        self.inner.contains(&members)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }
}

fn masks_out(masks: Vec<px::Mask>) -> Vec<Vec<usize>> {
    masks.into_iter().map(|m| m.indices().to_vec()).collect()
}

/// Exhaustive VIG of a problem with at most 20 variables.
#[pyfunction]
#[pyo3(signature = (problem, check = "nonmonotonic"))]
fn exhaustive_vig(problem: &PyProblem, check: &str) -> PyResult<PyVig> {
    let kind = match check {
        "nonlinear" => CheckKind::NonLinear,
        "nonmonotonic" => CheckKind::NonMonotonic,
        other => return Err(PyValueError::new_err(format!("unknown check '{other}'"))),
    };
    let inner = dependency::exhaustive_vig(&problem.inner, kind).map_err(value_err)?;
    Ok(PyVig { inner })
}

fn same_length(a: &Solution, b: &Solution, n: usize) -> PyResult<()> {
    if a.len() != b.len() || a.len() != n {
        return Err(PyValueError::new_err(
            "parents must have the same length as the structure",
        ));
    }
    Ok(())
}

/// Connected components of the graph restricted to the genes where the
/// parents differ.
#[pyfunction]
fn px_masks(vig: &PyVig, p1: &str, p2: &str) -> PyResult<Vec<Vec<usize>>> {
    let (a, b) = (parse_bits(p1)?, parse_bits(p2)?);
    same_length(&a, &b, vig.inner.n())?;
    Ok(masks_out(px::px_masks(&vig.inner, &a, &b)))
}

#[pyfunction]
fn build_lt(dsm: &PyDsm) -> PyTree {
    PyTree {
        inner: sll::build_lt(&dsm.inner),
    }
}

/// Max-linkage tree over the genes where the parents differ; `None` when
/// they are identical.
#[pyfunction]
fn build_px_lt(dsm: &PyDsm, p1: &str, p2: &str) -> PyResult<Option<PyTree>> {
    let (a, b) = (parse_bits(p1)?, parse_bits(p2)?);
    same_length(&a, &b, dsm.inner.n())?;
    Ok(px::build_px_lt(&dsm.inner, &a, &b).map(|inner| PyTree { inner }))
}

#[pyfunction]
fn ltop_ws(tree: &PyTree, diff_count: usize) -> Vec<Vec<usize>> {
    masks_out(px::ltop_ws(&tree.inner, diff_count))
}

#[pyfunction]
fn estimate_dsm(population: Vec<String>) -> PyResult<PyDsm> {
    let sols: Vec<Solution> = population.iter().map(|s| parse_bits(s)).collect::<PyResult<_>>()?;
    if sols.is_empty() || sols.iter().any(|s| s.len() != sols[0].len()) {
        return Err(PyValueError::new_err("population must be non-empty with equal lengths"));
    }
    Ok(PyDsm {
        inner: sll::estimate_dsm(&sols),
    })
}

/// Runs one optimizer to success or budget exhaustion.
#[pyfunction]
#[pyo3(signature = (problem, variant, budget = 1_000_000, seed = 0, pairs_per_flip = None))]
fn optimize<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    variant: &str,
    budget: u64,
    seed: u64,
    pairs_per_flip: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let variant: Variant = variant.parse().map_err(value_err)?;
    let options = RunOptions {
        pairs_per_flip,
        injected_dsm: None,
        track_px_share: true,
    };
    let inner = &problem.inner;
    let r = py.detach(|| optimizers::optimize(inner, variant, budget, seed, &options));
    let d = PyDict::new(py);
    d.set_item("variant", r.variant.to_string())?;
    d.set_item("seed", r.seed)?;
    d.set_item("best", r.best.as_ref().map(|s| s.to_string()))?;
    d.set_item("best_fitness", r.best_fitness)?;
    d.set_item("evaluations", r.evaluations)?;
    d.set_item("solved", r.solved())?;
    d.set_item("solved_at", r.solved_at)?;
    d.set_item("px_share", r.px_share())?;
    d.set_item("trace", r.trace.clone())?;
    Ok(d)
}

#[pyfunction]
fn variants() -> Vec<String> {
    Variant::ALL.iter().map(|v| v.to_string()).collect()
}

#[pyfunction]
fn local_optima(problem: &PyProblem) -> PyResult<Vec<String>> {
    let optima = oracle::enumerate_local_optima(&problem.inner).map_err(value_err)?;
    Ok(optima.iter().map(|s| s.to_string()).collect())
}

/// FIHC endpoint probabilities; exact when `samples` is `None`.
#[pyfunction]
#[pyo3(signature = (problem, samples = None, seed = 0))]
fn endpoint_distribution(problem: &PyProblem, samples: Option<u64>, seed: u64) -> PyResult<Vec<(String, f64)>> {
    let mode = samples.map_or(EndpointMode::Exhaustive, |samples| EndpointMode::MonteCarlo { samples });
    let dist = oracle::fihc_endpoint_distribution(&problem.inner, mode, &RngStream::new(seed)).map_err(value_err)?;
    Ok(dist.endpoints().map(|(s, p)| (s.to_string(), p)).collect())
}

/// DSM implied by the FIHC endpoint distribution.
#[pyfunction]
#[pyo3(signature = (problem, samples = None, seed = 0))]
fn theoretical_dsm(problem: &PyProblem, samples: Option<u64>, seed: u64) -> PyResult<PyDsm> {
    let mode = samples.map_or(EndpointMode::Exhaustive, |samples| EndpointMode::MonteCarlo { samples });
    let dist = oracle::fihc_endpoint_distribution(&problem.inner, mode, &RngStream::new(seed)).map_err(value_err)?;
    Ok(PyDsm {
        inner: oracle::theoretical_dsm(&dist),
    })
}

/// Smallest population holding `targets` (1, 2 or 3) given hybrids with
/// the stated confidence.
#[pyfunction]
fn hybrid_population_size(ph: f64, confidence: f64, targets: u32) -> PyResult<u64> {
    let target = match targets {
        1 => HybridTarget::One,
        2 => HybridTarget::Two,
        3 => HybridTarget::AllThree,
        _ => return Err(PyValueError::new_err("targets must be 1, 2 or 3")),
    };
    oracle::hybrid_presence_population_size(ph, confidence, target).map_err(value_err)
}

#[pymodule]
fn pxlt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PyVig>()?;
    m.add_class::<PyDsm>()?;
    m.add_class::<PyTree>()?;
    m.add_function(wrap_pyfunction!(exhaustive_vig, m)?)?;
    m.add_function(wrap_pyfunction!(px_masks, m)?)?;
    m.add_function(wrap_pyfunction!(build_lt, m)?)?;
    m.add_function(wrap_pyfunction!(build_px_lt, m)?)?;
    m.add_function(wrap_pyfunction!(ltop_ws, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_dsm, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(variants, m)?)?;
    m.add_function(wrap_pyfunction!(local_optima, m)?)?;
    m.add_function(wrap_pyfunction!(endpoint_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_dsm, m)?)?;
    m.add_function(wrap_pyfunction!(hybrid_population_size, m)?)?;
    Ok(())
}
