//! Python bindings: `import hypspec`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use hypspec_core::analysis::{Analysis as CoreAnalysis, AnalysisOptions};
use hypspec_core::config::{parse_json, parse_toml, Config};
use hypspec_core::semigroup::Method;
use hypspec_core::{
    classify, enumerate_modes, hx_closed_form_p, hx_eigenvalues, hx_kappa_threshold, hx_report, hx_to_system,
    mode_function, simulate_original, validate_system, x_norm, CVector, CoefficientProfile, Field, HeatExchangerSpec,
    HypspecError, ModeIndex, C64,
};

create_exception!(hypspec, NumericalError, PyException);

fn to_py(e: HypspecError) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn field_to_rows(f: &Field) -> Vec<Vec<C64>> {
    (0..f.nodes()).map(|i| f.node(i).to_vec()).collect()
}

fn rows_to_field(rows: Vec<Vec<C64>>, n: usize, nodes: usize) -> PyResult<Field> {
    if rows.len() != nodes || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err(format!(
            "initial state must be {nodes} rows of {n} components (one row per master-grid node)"
        )));
    }
    Ok(Field::from_node_fn(nodes, n, |i| CVector::from_column_slice(&rows[i])))
}

fn scalar_profile(value: f64) -> CoefficientProfile {
    CoefficientProfile::constant(value)
}

/// A system read from a JSON or TOML configuration.
#[pyclass(module = "hypspec", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct System {
    config: Config,
}

#[pymethods]
impl System {
    /// Parses configuration text; `fmt` is "json" or "toml".
    #[staticmethod]
    #[pyo3(signature = (text, fmt = "json"))]
    fn parse(text: &str, fmt: &str) -> PyResult<Self> {
        let config = match fmt {
            "json" => parse_json(text),
            "toml" => parse_toml(text),
            other => return Err(PyValueError::new_err(format!("unknown format {other:?}"))),
        }
        .map_err(to_py)?;
        Ok(System { config })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let config = hypspec_core::load_config(&path).map_err(to_py)?;
        Ok(System { config })
    }

    /// Co-current heat exchanger with constant coefficients.
    #[staticmethod]
    #[pyo3(signature = (kappa, alpha1 = 1.0, alpha2 = 1.0, v = 1.0))]
    fn heat_exchanger(kappa: f64, alpha1: f64, alpha2: f64, v: f64) -> PyResult<Self> {
        let hx = HeatExchangerSpec::new(scalar_profile(alpha1), scalar_profile(alpha2), scalar_profile(v), kappa)
            .map_err(to_py)?;
        Ok(System {
            config: Config {
                system: hx_to_system(&hx),
                singular_tol: hypspec_core::systems::DEFAULT_SINGULAR_TOL,
                heat_exchanger: Some(hx),
            },
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.config.system.n
    }

    /// Classification tag: RieszSpectralGroup, SemigroupOnly or NotWellPosed.
    fn classify(&self) -> PyResult<String> {
        let sys = validate_system(self.config.system.clone()).map_err(to_py)?;
        Ok(classify(&sys, self.config.singular_tol).tag.to_string())
    }

    fn __repr__(&self) -> String {
        format!(
            "System(n={}, lambda0={}, heat_exchanger={})",
            self.config.system.n,
            self.config.system.lambda0.kind(),
            self.config.heat_exchanger.is_some()
        )
    }
}

/// Geometry, fundamental matrix and spectrum of one system.
#[pyclass(module = "hypspec", frozen)]
pub struct Analysis {
    inner: CoreAnalysis,
}

#[pymethods]
impl Analysis {
    #[new]
    #[pyo3(signature = (system, grid_n = 2048))]
    fn new(system: &System, grid_n: usize) -> PyResult<Self> {
        let opts = AnalysisOptions {
            grid_n,
            singular_tol: system.config.singular_tol,
            ..AnalysisOptions::default()
        };
        let inner = CoreAnalysis::new(system.config.system.clone(), opts).map_err(to_py)?;
        Ok(Analysis { inner })
    }

    #[getter]
    fn classification(&self) -> String {
        self.inner.classification.tag.to_string()
    }

    #[getter]
    fn eta1(&self) -> f64 {
        self.inner.geometry.eta1()
    }

    #[getter]
    fn growth_bound(&self) -> f64 {
        self.inner.spectrum.growth_bound
    }

    #[getter]
    fn stable(&self) -> bool {
        self.inner.spectrum.stable
    }

    /// Master-grid nodes.
    fn grid(&self) -> Vec<f64> {
        self.inner.geometry.grid().nodes()
    }

    /// Distinct eigenvalues of A_d, by decreasing modulus.
    fn boundary_eigenvalues(&self) -> Vec<C64> {
        self.inner.spectrum.eigenstructure.eigenvalues().iter().map(|e| e.value).collect()
    }

    /// Boundary matrix A_d as nested lists.
    fn boundary_matrix(&self) -> Vec<Vec<C64>> {
        let a = self.inner.a_d();
        (0..a.nrows()).map(|r| (0..a.ncols()).map(|c| a[(r, c)]).collect()).collect()
    }

    /// mu_kl for distinct eigenvalue k (1-based) and lattice index l.
    fn eigenvalue(&self, k: usize, l: i64) -> PyResult<C64> {
        self.inner.spectrum.lattice(k, l).map_err(to_py)
    }

    /// `(k, l, mu)` for |l| <= lmax, by decreasing real part.
    fn spectrum(&self, lmax: usize) -> PyResult<Vec<(usize, i64, C64)>> {
        Ok(enumerate_modes(&self.inner.spectrum, lmax)
            .map_err(to_py)?
            .into_iter()
            .map(|(m, mu)| (m.k, m.l, mu))
            .collect())
    }

    /// (Generalized) eigenfunction at the master-grid nodes, one row per node.
    #[pyo3(signature = (k, l, j = 1, chain = 1))]
    fn mode(&self, k: usize, l: i64, j: usize, chain: usize) -> PyResult<Vec<Vec<C64>>> {
        let mf = mode_function(&self.inner.spectrum.eigenstructure, &self.inner.geometry, ModeIndex { k, chain, l, j })
            .map_err(to_py)?;
        Ok(field_to_rows(&mf.sample(&self.inner.geometry)))
    }

    /// Evolves original-variable data given at the master-grid nodes.
    ///
    /// `method` is "oracle" or "modal"; returns one state per time.
    #[pyo3(signature = (z0, times, method = "oracle", lmax = 32))]
    fn simulate(&self, z0: Vec<Vec<C64>>, times: Vec<f64>, method: &str, lmax: usize) -> PyResult<Vec<Vec<Vec<C64>>>> {
        let method = match method {
            "oracle" => Method::Oracle,
            "modal" => Method::Modal { l_max: lmax },
            other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
        };
        let geom = &self.inner.geometry;
        let z0 = rows_to_field(z0, self.inner.system.n(), geom.len())?;
        let result = simulate_original(
            &self.inner.spectrum.eigenstructure,
            &self.inner.similarity,
            geom,
            &z0,
            &times,
            method,
        )
        .map_err(to_py)?;
        Ok(result.states.iter().map(field_to_rows).collect())
    }

    /// lambda0-weighted L2 norm of a state given at the master-grid nodes.
    fn norm(&self, state: Vec<Vec<C64>>) -> PyResult<f64> {
        let geom = &self.inner.geometry;
        let f = rows_to_field(state, self.inner.system.n(), geom.len())?;
        Ok(x_norm(&f, geom))
    }

    /// max |P P^-1 - I| over the grid.
    fn inverse_defect(&self) -> f64 {
        self.inner.similarity.inverse_defect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Analysis(classification={}, eta1={:.6}, growth_bound={:.6}, stable={})",
            self.inner.classification.tag,
            self.inner.geometry.eta1(),
            self.inner.spectrum.growth_bound,
            self.inner.spectrum.stable
        )
    }
}

/// Closed-form heat-exchanger quantities cross-checked against the generic
/// pipeline, as a dict.
#[pyfunction]
#[pyo3(signature = (kappa, alpha1 = 1.0, alpha2 = 1.0, v = 1.0, grid_n = 2048))]
fn heat_exchanger_report<'py>(
    py: Python<'py>,
    kappa: f64,
    alpha1: f64,
    alpha2: f64,
    v: f64,
    grid_n: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let hx = HeatExchangerSpec::new(scalar_profile(alpha1), scalar_profile(alpha2), scalar_profile(v), kappa)
        .map_err(to_py)?;
    let report = hx_report(
        &hx,
        AnalysisOptions {
            grid_n,
            ..AnalysisOptions::default()
        },
    )
    .map_err(to_py)?;
    let text = serde_json::to_string(&report).expect("report serializes");
    py.import("json")?.call_method1("loads", (text,))
}

/// `(lambda1, lambda2, kappa_star)` from the closed forms alone.
#[pyfunction]
#[pyo3(signature = (kappa, alpha1 = 1.0, alpha2 = 1.0, v = 1.0))]
fn heat_exchanger_eigenvalues(kappa: f64, alpha1: f64, alpha2: f64, v: f64) -> PyResult<(f64, f64, f64)> {
    let hx = HeatExchangerSpec::new(scalar_profile(alpha1), scalar_profile(alpha2), scalar_profile(v), kappa)
        .map_err(to_py)?;
    let (l1, l2) = hx_eigenvalues(&hx);
    Ok((l1, l2, hx_kappa_threshold(&hx)))
}

/// Closed-form fundamental matrix P(zeta) of the heat exchanger.
#[pyfunction]
#[pyo3(signature = (zeta, alpha1 = 1.0, alpha2 = 1.0, v = 1.0))]
fn heat_exchanger_p(zeta: f64, alpha1: f64, alpha2: f64, v: f64) -> PyResult<Vec<Vec<f64>>> {
    let hx = HeatExchangerSpec::new(scalar_profile(alpha1), scalar_profile(alpha2), scalar_profile(v), 1.0)
        .map_err(to_py)?;
    let p = hx_closed_form_p(&hx, zeta);
    Ok((0..2).map(|r| (0..2).map(|c| p[(r, c)].re).collect()).collect())
}

#[pymodule]
fn hypspec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<System>()?;
    m.add_class::<Analysis>()?;
    m.add_function(wrap_pyfunction!(heat_exchanger_report, m)?)?;
    m.add_function(wrap_pyfunction!(heat_exchanger_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(heat_exchanger_p, m)?)?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
