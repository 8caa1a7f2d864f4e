//! Panel estimation: fixed-effect absorption, OLS, 2SLS, cluster-robust
//! covariance, plausibly-exogenous bounds, and the cluster bootstrap.

mod absorb;
mod bootstrap;
mod conley;
mod fit;
mod frame;
mod ols;
mod tsls;
mod vcov;

pub use absorb::{absorb_fixed_effects, demean_none, Demeaned, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use bootstrap::{
    cluster_bootstrap, replicate_rng, resample_cluster_rows, BootstrapSe,
};
pub use conley::{conley_bounds, ConleyBounds, ConleyPoint};
pub use fit::{t_critical, FitResult};
pub use frame::{Column, Factor, RegressionFrame};
pub use ols::{ols, ols_with};
pub use tsls::{tsls, tsls_with};
pub use vcov::{cluster_vcov, SmallSample};

use crate::error::Result;

/// Absorb the frame's fixed effects (if any) and run OLS.
pub fn fit_ols(frame: &RegressionFrame) -> Result<FitResult> {
    let demeaned = if frame.fixed_effects.is_empty() {
        demean_none(frame)?
    } else {
        absorb_fixed_effects(frame, DEFAULT_TOL, DEFAULT_MAX_ITER)?
    };
    ols(&demeaned)
}

/// Absorb the frame's fixed effects (if any) and run 2SLS.
pub fn fit_tsls(frame: &RegressionFrame) -> Result<FitResult> {
    let demeaned = if frame.fixed_effects.is_empty() {
        demean_none(frame)?
    } else {
        absorb_fixed_effects(frame, DEFAULT_TOL, DEFAULT_MAX_ITER)?
    };
    tsls(&demeaned)
}
