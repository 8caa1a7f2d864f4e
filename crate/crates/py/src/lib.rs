//! Python bindings: concentration indices, commuting-zone delineation,
//! fixed-effects estimation, elasticity arithmetic, and the oligopsony
//! model.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use monopsono::concentration;
use monopsono::data_model;
use monopsono::delineation;
use monopsono::econometrics::{
    fit_ols, fit_tsls, Column, Factor, FitResult, RegressionFrame,
};
use monopsono::minwage;
use monopsono::oligopsony::{EquilibriumPoint, OligopsonyEconomy};

fn err(e: monopsono::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn shares(values: Vec<f64>) -> PyResult<concentration::ShareVector> {
    concentration::ShareVector::new(values).map_err(err)
}

#[pyfunction]
fn hhi(share_values: Vec<f64>) -> PyResult<f64> {
    Ok(concentration::hhi(&shares(share_values)?))
}

#[pyfunction]
fn rosenbluth(share_values: Vec<f64>) -> PyResult<f64> {
    Ok(concentration::rosenbluth(&shares(share_values)?))
}

#[pyfunction]
fn concentration_ratio(share_values: Vec<f64>, k: usize) -> PyResult<f64> {
    concentration::concentration_ratio(&shares(share_values)?, k).map_err(err)
}

#[pyfunction]
fn inverse_number(j: usize) -> PyResult<f64> {
    concentration::inverse_number(j).map_err(err)
}

#[pyfunction]
fn exponential_index(share_values: Vec<f64>) -> PyResult<f64> {
    Ok(concentration::exponential_index(&shares(share_values)?))
}

#[pyfunction]
fn equivalent_number(index: f64) -> PyResult<f64> {
    concentration::equivalent_number(index).map_err(err)
}

#[pyfunction]
fn classify_band(hhi: f64) -> PyResult<&'static str> {
    Ok(concentration::classify_band(hhi).map_err(err)?.as_str())
}

#[pyfunction]
fn weighted_summary<'py>(
    py: Python<'py>,
    values: Vec<f64>,
    weights: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let s = concentration::weighted_summary(&values, &weights).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("mean", s.mean)?;
    dict.set_item("p25", s.p25)?;
    dict.set_item("p50", s.p50)?;
    dict.set_item("p75", s.p75)?;
    dict.set_item("share_medium", s.share_medium)?;
    dict.set_item("share_high", s.share_high)?;
    Ok(dict)
}

#[pyfunction]
fn kaitz_index(minwage_hourly: f64, median_daily_wage: f64) -> PyResult<f64> {
    data_model::kaitz_index(minwage_hourly, median_daily_wage).map_err(err)
}

#[pyfunction]
fn modularity(
    regions: Vec<String>,
    flows: Vec<Vec<f64>>,
    assignment: Vec<usize>,
) -> PyResult<f64> {
    let fm = delineation::FlowMatrix::new(regions, flows).map_err(err)?;
    let p = delineation::Partition::new(assignment).map_err(err)?;
    delineation::modularity(&fm, &p).map_err(err)
}

#[pyfunction]
fn sweep_thresholds<'py>(
    py: Python<'py>,
    regions: Vec<String>,
    flows: Vec<Vec<f64>>,
    grid: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let fm = delineation::FlowMatrix::new(regions.clone(), flows).map_err(err)?;
    let sweep = delineation::sweep_thresholds(&fm, &grid).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("tau_star", sweep.tau_star)?;
    dict.set_item("q_star", sweep.q_star)?;
    dict.set_item("cross_zone_share", sweep.cross_zone_share)?;
    let zones = PyDict::new(py);
    for (i, region) in regions.iter().enumerate() {
        zones.set_item(region, sweep.partition.zone_of(i))?;
    }
    dict.set_item("zones", zones)?;
    dict.set_item("zone_count", sweep.partition.zone_count())?;
    Ok(dict)
}

/// Linear-supply, linear-MRPL Cournot oligopsony.
#[pyclass(name = "OligopsonyEconomy")]
struct PyEconomy {
    inner: OligopsonyEconomy,
}

fn equilibrium_dict<'py>(py: Python<'py>, eq: &EquilibriumPoint) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("wage", eq.wage)?;
    dict.set_item("employment_total", eq.employment_total)?;
    dict.set_item("employment_per_firm", eq.employment_per_firm)?;
    dict.set_item("regime", eq.regime.as_str())?;
    Ok(dict)
}

#[pymethods]
impl PyEconomy {
    #[new]
    fn new(
        supply_intercept: f64,
        supply_slope: f64,
        mrpl_intercept: f64,
        mrpl_slope: f64,
        firms: u32,
    ) -> PyResult<Self> {
        Ok(PyEconomy {
            inner: OligopsonyEconomy::new(
                supply_intercept,
                supply_slope,
                mrpl_intercept,
                mrpl_slope,
                firms,
            )
            .map_err(err)?,
        })
    }

    fn cournot<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        equilibrium_dict(py, &self.inner.cournot())
    }

    fn competitive<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        equilibrium_dict(py, &self.inner.competitive())
    }

    fn minwage_response<'py>(&self, py: Python<'py>, wmin: f64) -> PyResult<Bound<'py, PyDict>> {
        equilibrium_dict(py, &self.inner.minwage_response(wmin).map_err(err)?)
    }

    fn markdown(&self) -> f64 {
        self.inner.markdown()
    }

    fn supply_elasticity(&self) -> f64 {
        self.inner.supply_elasticity()
    }

    fn response_curve<'py>(
        &self,
        py: Python<'py>,
        wmin_grid: Vec<f64>,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .response_curve(&wmin_grid)
            .map_err(err)?
            .iter()
            .map(|p| {
                let dict = PyDict::new(py);
                dict.set_item("wmin", p.wmin)?;
                dict.set_item("wage_delta", p.wage_delta)?;
                dict.set_item("employment_delta", p.employment_delta)?;
                dict.set_item("regime", p.regime.as_str())?;
                Ok(dict)
            })
            .collect()
    }
}

fn columns(named: Vec<(String, Vec<f64>)>) -> Vec<Column> {
    named
        .into_iter()
        .map(|(name, values)| Column::new(name, values))
        .collect()
}

fn factors(named: Vec<(String, Vec<String>)>) -> Vec<Factor> {
    named
        .into_iter()
        .map(|(name, keys)| Factor::from_keys(name, keys))
        .collect()
}

fn fit_dict<'py>(py: Python<'py>, fit: &FitResult) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("terms", fit.terms.clone())?;
    dict.set_item("beta", fit.beta.iter().copied().collect::<Vec<f64>>())?;
    dict.set_item(
        "se",
        (0..fit.beta.len()).map(|i| fit.se(i)).collect::<Vec<f64>>(),
    )?;
    dict.set_item("n", fit.n)?;
    dict.set_item("g", fit.g)?;
    dict.set_item("r2_within", fit.r2_within)?;
    dict.set_item("dof", fit.dof)?;
    if let Some(f) = fit.first_stage_f {
        dict.set_item("first_stage_f", f)?;
    }
    Ok(dict)
}

/// OLS with absorbed fixed effects and cluster-robust standard errors.
#[pyfunction]
#[pyo3(signature = (y, exog, fixed_effects, cluster))]
fn fe_ols<'py>(
    py: Python<'py>,
    y: Vec<f64>,
    exog: Vec<(String, Vec<f64>)>,
    fixed_effects: Vec<(String, Vec<String>)>,
    cluster: Vec<String>,
) -> PyResult<Bound<'py, PyDict>> {
    let frame = RegressionFrame {
        y: Column::new("y", y),
        exog: columns(exog),
        endog: vec![],
        instruments: vec![],
        fixed_effects: factors(fixed_effects),
        cluster: Factor::from_keys("cluster", cluster),
        weights: None,
    };
    fit_dict(py, &fit_ols(&frame).map_err(err)?)
}

/// 2SLS with absorbed fixed effects; endogenous coefficients come first.
#[pyfunction]
#[pyo3(signature = (y, endog, instruments, fixed_effects, cluster, exog=vec![]))]
fn fe_tsls<'py>(
    py: Python<'py>,
    y: Vec<f64>,
    endog: Vec<(String, Vec<f64>)>,
    instruments: Vec<(String, Vec<f64>)>,
    fixed_effects: Vec<(String, Vec<String>)>,
    cluster: Vec<String>,
    exog: Vec<(String, Vec<f64>)>,
) -> PyResult<Bound<'py, PyDict>> {
    let frame = RegressionFrame {
        y: Column::new("y", y),
        exog: columns(exog),
        endog: columns(endog),
        instruments: columns(instruments),
        fixed_effects: factors(fixed_effects),
        cluster: Factor::from_keys("cluster", cluster),
        weights: None,
    };
    fit_dict(py, &fit_tsls(&frame).map_err(err)?)
}

/// Evaluate `alpha + beta * hhi` with a delta-method standard error from
/// the 2x2 coefficient covariance (row-major pairs).
#[pyfunction]
#[pyo3(signature = (alpha, beta, hhi, vcov=None))]
fn elasticity_at(
    alpha: f64,
    beta: f64,
    hhi: f64,
    vcov: Option<[[f64; 2]; 2]>,
) -> PyResult<(f64, f64)> {
    let curve = match vcov {
        Some(v) => minwage::ElasticityCurve::new(alpha, beta, v).map_err(err)?,
        None => minwage::ElasticityCurve::from_points(alpha, beta),
    };
    let e = minwage::elasticity_at(&curve, hhi).map_err(err)?;
    Ok((e.eta, e.se))
}

/// Own-wage elasticity of labor demand from two elasticity curves.
#[pyfunction]
fn ratio_elasticity(
    alpha_employment: f64,
    beta_employment: f64,
    alpha_wage: f64,
    beta_wage: f64,
    hhi: f64,
) -> PyResult<f64> {
    minwage::ratio_elasticity(
        &minwage::ElasticityCurve::from_points(alpha_employment, beta_employment),
        &minwage::ElasticityCurve::from_points(alpha_wage, beta_wage),
        hhi,
    )
    .map_err(err)
}

#[pyfunction]
fn labor_supply_elasticity(emp_elast: f64, wage_elast: f64) -> PyResult<f64> {
    minwage::labor_supply_elasticity(emp_elast, wage_elast).map_err(err)
}

#[pyfunction]
fn delta_method_ratio(a: f64, b: f64, var_a: f64, var_b: f64) -> PyResult<f64> {
    minwage::delta_method_ratio(a, b, var_a, var_b).map_err(err)
}

#[pymodule]
fn monopsono_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEconomy>()?;
    m.add_function(wrap_pyfunction!(hhi, m)?)?;
    m.add_function(wrap_pyfunction!(rosenbluth, m)?)?;
    m.add_function(wrap_pyfunction!(concentration_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_number, m)?)?;
    m.add_function(wrap_pyfunction!(exponential_index, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent_number, m)?)?;
    m.add_function(wrap_pyfunction!(classify_band, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_summary, m)?)?;
    m.add_function(wrap_pyfunction!(kaitz_index, m)?)?;
    m.add_function(wrap_pyfunction!(modularity, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(fe_ols, m)?)?;
    m.add_function(wrap_pyfunction!(fe_tsls, m)?)?;
    m.add_function(wrap_pyfunction!(elasticity_at, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_elasticity, m)?)?;
    m.add_function(wrap_pyfunction!(labor_supply_elasticity, m)?)?;
    m.add_function(wrap_pyfunction!(delta_method_ratio, m)?)?;
    Ok(())
}
