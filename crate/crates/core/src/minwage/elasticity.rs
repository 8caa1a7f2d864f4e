//! Elasticity objects derived from fitted minimum-wage regressions: the
//! linear elasticity curve in HHI, ratio elasticities, and normalizations.

use rayon::prelude::*;

use crate::econometrics::{
    fit_ols, replicate_rng, resample_cluster_rows, FitResult, RegressionFrame,
};
use crate::error::{Error, Result};

/// Minimum admissible magnitude for a wage-elasticity denominator.
const DENOMINATOR_FLOOR: f64 = 1e-6;

/// Linear minimum-wage elasticity in concentration:
/// `eta(hhi) = alpha + beta * hhi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticityCurve {
    pub alpha: f64,
    pub beta: f64,
    /// Covariance of (alpha, beta).
    pub vcov: [[f64; 2]; 2],
}

impl ElasticityCurve {
    pub fn new(alpha: f64, beta: f64, vcov: [[f64; 2]; 2]) -> Result<Self> {
        if (vcov[0][1] - vcov[1][0]).abs() > 1e-8 {
            return Err(Error::domain("elasticity covariance must be symmetric"));
        }
        if vcov[0][0] < 0.0 || vcov[1][1] < 0.0 {
            return Err(Error::domain(
                "elasticity covariance needs non-negative variances",
            ));
        }
        Ok(ElasticityCurve { alpha, beta, vcov })
    }

    /// Point estimates with no sampling uncertainty (reported-coefficient
    /// arithmetic).
    pub fn from_points(alpha: f64, beta: f64) -> Self {
        ElasticityCurve {
            alpha,
            beta,
            vcov: [[0.0; 2]; 2],
        }
    }

    /// Extract the curve from a fitted specification. A missing
    /// interaction term yields a constant curve (`beta = 0`).
    pub fn from_fit(
        fit: &FitResult,
        main_term: &str,
        interaction_term: Option<&str>,
    ) -> Result<Self> {
        let i = fit
            .term_index(main_term)
            .ok_or_else(|| Error::domain(format!("fit has no term `{main_term}`")))?;
        match interaction_term {
            None => Ok(ElasticityCurve {
                alpha: fit.beta[i],
                beta: 0.0,
                vcov: [[fit.vcov[(i, i)], 0.0], [0.0, 0.0]],
            }),
            Some(term) => {
                let j = fit
                    .term_index(term)
                    .ok_or_else(|| Error::domain(format!("fit has no term `{term}`")))?;
                Ok(ElasticityCurve {
                    alpha: fit.beta[i],
                    beta: fit.beta[j],
                    vcov: fit.vcov_pair(i, j),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Elasticity {
    pub eta: f64,
    pub se: f64,
}

/// Evaluate the curve at one concentration level; the standard error comes
/// from the delta method on the linear combination `[1, hhi]`.
pub fn elasticity_at(curve: &ElasticityCurve, hhi: f64) -> Result<Elasticity> {
    if !(0.0..=1.0).contains(&hhi) {
        return Err(Error::domain(format!("HHI {hhi} outside [0, 1]")));
    }
    let eta = curve.alpha + curve.beta * hhi;
    let var = curve.vcov[0][0]
        + 2.0 * hhi * curve.vcov[0][1]
        + hhi * hhi * curve.vcov[1][1];
    Ok(Elasticity {
        eta,
        se: var.max(0.0).sqrt(),
    })
}

/// Own-wage elasticity of labor demand: employment elasticity divided by
/// the wage elasticity at the same concentration level.
pub fn ratio_elasticity(
    curve_emp: &ElasticityCurve,
    curve_wage: &ElasticityCurve,
    hhi: f64,
) -> Result<f64> {
    let emp = elasticity_at(curve_emp, hhi)?.eta;
    let wage = elasticity_at(curve_wage, hhi)?.eta;
    if wage.abs() < DENOMINATOR_FLOOR {
        return Err(Error::estimation(format!(
            "wage elasticity {wage} at HHI {hhi} is near zero: minimum wage is not binding"
        )));
    }
    Ok(emp / wage)
}

#[derive(Debug, Clone, Copy)]
pub struct RatioElasticity {
    pub value: f64,
    pub se: f64,
    pub replicates: usize,
    pub failures: usize,
}

/// Ratio elasticity with a cluster-bootstrap standard error: one cluster
/// resample per replicate drives the re-estimation of both the employment
/// and the wage fit. The two frames must share the cluster structure.
#[allow(clippy::too_many_arguments)]
pub fn ratio_elasticity_bootstrap(
    frame_emp: &RegressionFrame,
    frame_wage: &RegressionFrame,
    main_term: &str,
    interaction_term: Option<&str>,
    hhi: f64,
    b: usize,
    seed: u64,
) -> Result<RatioElasticity> {
    if b < 2 {
        return Err(Error::domain("bootstrap needs at least 2 replications"));
    }
    if frame_emp.cluster.codes != frame_wage.cluster.codes {
        return Err(Error::domain(
            "employment and wage frames must share the cluster structure",
        ));
    }

    let curve_of = |frame: &RegressionFrame| -> Result<ElasticityCurve> {
        ElasticityCurve::from_fit(&fit_ols(frame)?, main_term, interaction_term)
    };
    let value = ratio_elasticity(&curve_of(frame_emp)?, &curve_of(frame_wage)?, hhi)?;

    let draws: Vec<Option<f64>> = (0..b as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replicate_rng(seed, rep);
            let (rows, cluster) = resample_cluster_rows(&frame_emp.cluster, &mut rng);
            let emp = frame_emp.select_rows(&rows, cluster.clone());
            let wage = frame_wage.select_rows(&rows, cluster);
            let compute = || -> Result<f64> {
                ratio_elasticity(&curve_of(&emp)?, &curve_of(&wage)?, hhi)
            };
            compute().ok()
        })
        .collect();

    let values: Vec<f64> = draws.iter().filter_map(|v| *v).collect();
    let failures = b - values.len();
    if failures * 5 > b {
        return Err(Error::estimation(format!(
            "{failures} of {b} bootstrap replicates failed"
        )));
    }
    if values.len() < 2 {
        return Err(Error::estimation("fewer than 2 successful replicates"));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len() - 1) as f64;

    Ok(RatioElasticity {
        value,
        se: var.sqrt(),
        replicates: values.len(),
        failures,
    })
}

/// Wage elasticity of labor supply implied by a pair of concentration
/// elasticities (employment over earnings).
pub fn labor_supply_elasticity(emp_elast: f64, wage_elast: f64) -> Result<f64> {
    if wage_elast == 0.0 {
        return Err(Error::domain("wage elasticity must be non-zero"));
    }
    Ok(emp_elast / wage_elast)
}

/// Delta-method standard error of `a / b` under zero covariance.
pub fn delta_method_ratio(a: f64, b: f64, var_a: f64, var_b: f64) -> Result<f64> {
    if b == 0.0 {
        return Err(Error::domain("denominator must be non-zero"));
    }
    if var_a < 0.0 || var_b < 0.0 {
        return Err(Error::domain("variances must be non-negative"));
    }
    Ok((var_a / (b * b) + a * a * var_b / (b * b * b * b)).sqrt())
}

/// Closure-probability effect per 1 percent effective wage increase:
/// the closure coefficients evaluated at `hhi`, normalized by the wage
/// elasticity at the same concentration.
pub fn normalize_closure_effect(
    closure_coef: f64,
    closure_interact: f64,
    wage_curve: &ElasticityCurve,
    hhi: f64,
) -> Result<f64> {
    let wage = elasticity_at(wage_curve, hhi)?.eta;
    if wage.abs() < DENOMINATOR_FLOOR {
        return Err(Error::estimation(
            "wage elasticity near zero: closure effect cannot be normalized",
        ));
    }
    Ok((closure_coef + closure_interact * hhi) / wage)
}
