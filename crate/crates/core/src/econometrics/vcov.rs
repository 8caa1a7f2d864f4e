//! Cluster-robust sandwich covariance.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::frame::Factor;

/// Small-sample adjustment for the clustered sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmallSample {
    /// No correction (CR0).
    Unadjusted,
    /// `G/(G-1) * (N-1)/(N-K)` (CR1), the common default for
    /// market-level clustering.
    #[default]
    Cr1,
}

/// Liang-Zeger sandwich `bread * (sum_g s_g s_g') * bread` with cluster
/// scores `s_g = X_g' u_g`. `bread` is `(X'X)^{-1}` for OLS or
/// `(Xhat'Xhat)^{-1}` for 2SLS. The result is symmetrized and tiny negative
/// diagonal entries (within 1e-10) are clamped to zero.
pub fn cluster_vcov(
    design: &DMatrix<f64>,
    residuals: &DVector<f64>,
    bread: &DMatrix<f64>,
    cluster: &Factor,
    adjust: SmallSample,
) -> Result<DMatrix<f64>> {
    let n = design.nrows();
    let k = design.ncols();
    if residuals.len() != n || cluster.len() != n {
        return Err(Error::domain(
            "design, residuals, and cluster lengths must agree",
        ));
    }
    let g = cluster.n_levels as usize;
    if g < 2 {
        return Err(Error::domain(
            "cluster-robust covariance requires at least 2 clusters",
        ));
    }

    let mut meat = DMatrix::zeros(k, k);
    let mut score = vec![0.0; k];
    for rows in cluster.groups() {
        score.iter_mut().for_each(|s| *s = 0.0);
        for &r in &rows {
            let u = residuals[r as usize];
            for j in 0..k {
                score[j] += design[(r as usize, j)] * u;
            }
        }
        for a in 0..k {
            for b in 0..k {
                meat[(a, b)] += score[a] * score[b];
            }
        }
    }

    let factor = match adjust {
        SmallSample::Unadjusted => 1.0,
        SmallSample::Cr1 => {
            let (nf, kf, gf) = (n as f64, k as f64, g as f64);
            if nf > kf {
                (gf / (gf - 1.0)) * ((nf - 1.0) / (nf - kf))
            } else {
                gf / (gf - 1.0)
            }
        }
    };

    let mut vcov = bread * meat * bread * factor;
    // symmetrize and clamp round-off on the diagonal
    for i in 0..k {
        for j in (i + 1)..k {
            let avg = 0.5 * (vcov[(i, j)] + vcov[(j, i)]);
            vcov[(i, j)] = avg;
            vcov[(j, i)] = avg;
        }
        if vcov[(i, i)] < 0.0 {
            if vcov[(i, i)] < -1e-10 {
                return Err(Error::estimation(format!(
                    "sandwich covariance has negative diagonal entry {}",
                    vcov[(i, i)]
                )));
            }
            vcov[(i, i)] = 0.0;
        }
    }
    Ok(vcov)
}
