//! Python module `falc`. Matrices cross the boundary as lists of rows;
//! solver settings and problem specs as JSON strings in the same schema the
//! CLI uses.

use falc::problems::{generate_instance as gen, presets, InstanceParams, NoiseModel};
use falc::{solve, DenseMatrix, DenseVector, FalcError, ProblemSpec, SolveReport, SolverParams};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: FalcError) -> PyErr {
    match e {
        FalcError::SvdNoConvergence { .. } | FalcError::LeastNormFailed { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DenseMatrix> {
    DenseMatrix::from_rows(&rows).map_err(py_err)
}

/// Preset settings with an optional JSON object of overrides on top.
pub fn params_with(base: SolverParams, overrides: Option<&str>) -> Result<SolverParams, FalcError> {
    let Some(text) = overrides else {
        return Ok(base);
    };
    let mut v = serde_json::to_value(base)?;
    let o: serde_json::Map<String, serde_json::Value> = serde_json::from_str(text)?;
    let obj = v.as_object_mut().expect("params serialize to an object");
    for (k, val) in o {
        if !obj.contains_key(&k) {
            return Err(FalcError::InvalidArgument(format!("unknown solver setting '{k}'")));
        }
        obj.insert(k, val);
    }
    let p: SolverParams = serde_json::from_value(v)?;
    p.validate()?;
    Ok(p)
}

fn summary<'py>(py: Python<'py>, r: &SolveReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("x", r.x.to_rows())?;
    d.set_item("objective", r.objective)?;
    d.set_item("residual", r.residual_2)?;
    d.set_item("outer_iterations", r.outer_iterations)?;
    d.set_item("inner_iterations", r.total_inner_iterations)?;
    d.set_item("svd_count", r.svd_count)?;
    d.set_item("wall_time", r.wall_time)?;
    d.set_item("termination", format!("{:?}", r.termination).to_lowercase())?;
    Ok(d)
}

fn decomposition<'py>(py: Python<'py>, spec: &ProblemSpec, params: &SolverParams) -> PyResult<Bound<'py, PyDict>> {
    let r = py.detach(|| solve(spec, params)).map_err(py_err)?;
    let d = summary(py, &r)?;
    let s = r
        .block_s(spec, 0)
        .expect("decomposition presets carry a slack")
        .to_matrix(spec.m, spec.n)
        .map_err(py_err)?;
    d.set_item("s", s.to_rows())?;
    Ok(d)
}

fn default_mu2(d: &DenseMatrix, mu2: Option<f64>) -> f64 {
    mu2.unwrap_or_else(|| 1.0 / (d.rows().max(d.cols()) as f64).sqrt())
}

/// D = X₀ + S₀ + Y₀ with rank ⌊rank_frac·n⌋ and ⌊sparse_frac·n²⌋ corruptions.
#[pyfunction]
#[pyo3(signature = (n, seed, rank_frac=0.05, sparse_frac=0.05, rho=0.0, gaussian_noise=false))]
fn generate_instance<'py>(
    py: Python<'py>,
    n: usize,
    seed: u64,
    rank_frac: f64,
    sparse_frac: f64,
    rho: f64,
    gaussian_noise: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let p = InstanceParams {
        n,
        rank_frac,
        sparse_frac,
        rho_noise: rho,
        seed,
        noise: if gaussian_noise { NoiseModel::Gaussian } else { NoiseModel::Uniform },
    };
    let (t, d) = gen(&p).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("d", d.to_rows())?;
    out.set_item("x0", t.x0.to_rows())?;
    out.set_item("s0", t.s0.to_rows())?;
    out.set_item("y0", t.y0.to_rows())?;
    out.set_item("support", t.support)?;
    out.set_item("rank", t.rank_true)?;
    Ok(out)
}

/// min ‖X‖_* + μ2‖S‖₁ s.t. X + S = D.
#[pyfunction]
#[pyo3(signature = (d, mu2=None, params=None))]
fn robust_pca<'py>(
    py: Python<'py>,
    d: Vec<Vec<f64>>,
    mu2: Option<f64>,
    params: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let d = matrix(d)?;
    let spec = presets::robust_pca(&d, default_mu2(&d, mu2)).map_err(py_err)?;
    let p = params_with(SolverParams::robust_pca(), params).map_err(py_err)?;
    decomposition(py, &spec, &p)
}

/// min ‖X‖_* + μ2‖S‖₁ s.t. ‖X + S − D‖∞ ≤ ρ.
#[pyfunction]
#[pyo3(signature = (d, rho, mu2=None, params=None))]
fn stable_pcp<'py>(
    py: Python<'py>,
    d: Vec<Vec<f64>>,
    rho: f64,
    mu2: Option<f64>,
    params: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let d = matrix(d)?;
    let spec = presets::stable_pcp(&d, default_mu2(&d, mu2), rho).map_err(py_err)?;
    let p = params_with(SolverParams::stable_pcp(), params).map_err(py_err)?;
    decomposition(py, &spec, &p)
}

/// min ‖x‖₁ s.t. Ax = b; the result's "x" is a flat list.
#[pyfunction]
#[pyo3(signature = (a, b, params=None))]
fn basis_pursuit<'py>(
    py: Python<'py>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    params: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let a = matrix(a)?;
    let b = DenseVector::from_vec(b).map_err(py_err)?;
    let spec = presets::basis_pursuit(&a, &b).map_err(py_err)?;
    let p = params_with(SolverParams::basis_pursuit(), params).map_err(py_err)?;
    let r = py.detach(|| solve(&spec, &p)).map_err(py_err)?;
    let d = summary(py, &r)?;
    let x = r.basis_pursuit_estimate(&spec).expect("basis pursuit carries a slack");
    d.set_item("x", x.into_vec())?;
    Ok(d)
}

/// Solves a JSON problem spec and returns the full report as JSON.
#[pyfunction]
#[pyo3(signature = (spec, params=None))]
fn solve_json(py: Python<'_>, spec: &str, params: Option<&str>) -> PyResult<String> {
    let spec: ProblemSpec = serde_json::from_str(spec).map_err(|e| py_err(e.into()))?;
    let p = params_with(SolverParams::default(), params).map_err(py_err)?;
    let r = py.detach(|| solve(&spec, &p)).map_err(py_err)?;
    serde_json::to_string(&r).map_err(|e| py_err(e.into()))
}

#[pymodule]
#[pyo3(name = "falc")]
fn falc_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(generate_instance, m)?)?;
    m.add_function(wrap_pyfunction!(robust_pca, m)?)?;
    m.add_function(wrap_pyfunction!(stable_pcp, m)?)?;
    m.add_function(wrap_pyfunction!(basis_pursuit, m)?)?;
    m.add_function(wrap_pyfunction!(solve_json, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let p = params_with(SolverParams::default(), Some(r#"{"max_outer": 7}"#)).unwrap();
        assert_eq!(p.max_outer, 7);
        assert!(params_with(SolverParams::default(), Some(r#"{"max_outr": 7}"#)).is_err());
        assert!(params_with(SolverParams::default(), Some(r#"{"c_lambda": 2.0}"#)).is_err());
        assert_eq!(params_with(SolverParams::stable_pcp(), None).unwrap(), SolverParams::stable_pcp());
    }
}
