//! Plausibly-exogenous bounds for an instrumented effect.
//!
//! The instrument is allowed a direct effect `phi` on the outcome. For each
//! `phi` on a grid, the outcome is adjusted to `y - phi * z` and the model
//! re-estimated by 2SLS; the reported bounds are the envelope of the
//! per-phi confidence intervals (the union-of-confidence-intervals method).

use crate::error::{Error, Result};

use super::absorb::absorb_fixed_effects;
use super::frame::RegressionFrame;
use super::tsls::tsls;

#[derive(Debug, Clone, Copy)]
pub struct ConleyPoint {
    pub phi: f64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone)]
pub struct ConleyBounds {
    /// Lower envelope of the per-phi confidence intervals.
    pub theta_lo: f64,
    /// Upper envelope of the per-phi confidence intervals.
    pub theta_hi: f64,
    pub level: f64,
    /// The direct effect of largest magnitude on the grid for which the
    /// interval upper bound still lies below zero, scanning outward from
    /// `phi = 0` (None if it fails already at the grid point nearest zero).
    pub negativity_threshold: Option<f64>,
    pub grid: Vec<ConleyPoint>,
}

/// Bounds for the instrumented coefficient when the single instrument may
/// carry a direct effect in `[phi_min, phi_max]`. Requires exactly one
/// endogenous column and one instrument.
pub fn conley_bounds(
    frame: &RegressionFrame,
    phi_min: f64,
    phi_max: f64,
    grid_points: usize,
    level: f64,
    tol: f64,
    max_iter: usize,
) -> Result<ConleyBounds> {
    if phi_min > phi_max {
        return Err(Error::domain(format!(
            "phi_min {phi_min} exceeds phi_max {phi_max}"
        )));
    }
    if grid_points == 0 {
        return Err(Error::domain("grid must have at least one point"));
    }
    if frame.endog.len() != 1 || frame.instruments.len() != 1 {
        return Err(Error::domain(
            "bounds require exactly one endogenous column and one instrument",
        ));
    }

    let phis: Vec<f64> = if grid_points == 1 || phi_min == phi_max {
        vec![phi_min]
    } else {
        let step = (phi_max - phi_min) / (grid_points - 1) as f64;
        (0..grid_points).map(|i| phi_min + step * i as f64).collect()
    };

    let instrument = &frame.instruments[0].values;
    let mut grid = Vec::with_capacity(phis.len());
    for &phi in &phis {
        let mut adjusted = frame.clone();
        for (y, z) in adjusted.y.values.iter_mut().zip(instrument) {
            *y -= phi * z;
        }
        let fit = if adjusted.fixed_effects.is_empty() {
            tsls(&super::absorb::demean_none(&adjusted)?)?
        } else {
            tsls(&absorb_fixed_effects(&adjusted, tol, max_iter)?)?
        };
        let (ci_lo, ci_hi) = fit.confidence_interval(0, level)?;
        grid.push(ConleyPoint {
            phi,
            estimate: fit.beta[0],
            ci_lo,
            ci_hi,
        });
    }

    let theta_lo = grid.iter().map(|p| p.ci_lo).fold(f64::INFINITY, f64::min);
    let theta_hi = grid
        .iter()
        .map(|p| p.ci_hi)
        .fold(f64::NEG_INFINITY, f64::max);

    let mut by_magnitude: Vec<&ConleyPoint> = grid.iter().collect();
    by_magnitude.sort_by(|a, b| a.phi.abs().partial_cmp(&b.phi.abs()).unwrap());
    let mut negativity_threshold = None;
    for p in by_magnitude {
        if p.ci_hi < 0.0 {
            negativity_threshold = Some(p.phi);
        } else {
            break;
        }
    }

    Ok(ConleyBounds {
        theta_lo,
        theta_hi,
        level,
        negativity_threshold,
        grid,
    })
}
