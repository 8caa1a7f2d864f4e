//! Fit results and shared linear-algebra helpers.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Estimation output: coefficients, cluster-robust covariance, and
/// diagnostics. Inference uses a Student t reference distribution with
/// `G - 1` degrees of freedom (G = cluster count).
#[derive(Debug, Clone)]
pub struct FitResult {
    pub terms: Vec<String>,
    pub beta: DVector<f64>,
    pub vcov: DMatrix<f64>,
    /// Observations.
    pub n: usize,
    /// Estimated slope parameters (absorbed fixed effects not counted).
    pub k: usize,
    /// Clusters.
    pub g: usize,
    pub r2_within: f64,
    /// Joint F statistic of the excluded instruments in the first stage
    /// (absent for OLS). With several endogenous columns this is the
    /// smallest of the per-column statistics.
    pub first_stage_f: Option<f64>,
    /// Degrees of freedom for t statistics and confidence intervals.
    pub dof: usize,
}

impl FitResult {
    pub fn term_index(&self, name: &str) -> Option<usize> {
        self.terms.iter().position(|t| t == name)
    }

    pub fn coef(&self, name: &str) -> Option<f64> {
        self.term_index(name).map(|i| self.beta[i])
    }

    pub fn se(&self, index: usize) -> f64 {
        self.vcov[(index, index)].max(0.0).sqrt()
    }

    pub fn t_stat(&self, index: usize) -> f64 {
        self.beta[index] / self.se(index)
    }

    pub fn p_value(&self, index: usize) -> f64 {
        let t = self.t_stat(index).abs();
        if !t.is_finite() {
            return 0.0;
        }
        let dist = StudentsT::new(0.0, 1.0, self.dof as f64)
            .expect("dof >= 1 guaranteed by construction");
        2.0 * (1.0 - dist.cdf(t))
    }

    /// Two-sided confidence interval at the given level (e.g. 0.90).
    pub fn confidence_interval(&self, index: usize, level: f64) -> Result<(f64, f64)> {
        let crit = t_critical(self.dof, level)?;
        let half = crit * self.se(index);
        Ok((self.beta[index] - half, self.beta[index] + half))
    }

    /// 2x2 covariance block for a pair of terms.
    pub fn vcov_pair(&self, i: usize, j: usize) -> [[f64; 2]; 2] {
        [
            [self.vcov[(i, i)], self.vcov[(i, j)]],
            [self.vcov[(j, i)], self.vcov[(j, j)]],
        ]
    }
}

/// Two-sided Student-t critical value.
pub fn t_critical(dof: usize, level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("level {level} must lie in (0, 1)")));
    }
    if dof == 0 {
        return Err(Error::domain("degrees of freedom must be positive"));
    }
    let dist = StudentsT::new(0.0, 1.0, dof as f64)
        .map_err(|e| Error::estimation(format!("t distribution: {e}")))?;
    Ok(dist.inverse_cdf(1.0 - (1.0 - level) / 2.0))
}

/// Cholesky of `X'X`, with a collinearity diagnosis naming the offending
/// column when the factorization fails.
pub fn cholesky_or_collinear(
    x: &DMatrix<f64>,
    names: &[String],
) -> Result<Cholesky<f64, Dyn>> {
    let xtx = x.transpose() * x;
    match Cholesky::new(xtx) {
        Some(chol) => Ok(chol),
        None => Err(Error::RankDeficient(
            detect_collinear(x, names).unwrap_or_else(|| "<unknown>".to_owned()),
        )),
    }
}

/// First column (in input order) that is numerically in the span of the
/// preceding columns, found by modified Gram-Schmidt.
pub fn detect_collinear(x: &DMatrix<f64>, names: &[String]) -> Option<String> {
    let n = x.nrows();
    let k = x.ncols();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for j in 0..k {
        let mut v = DVector::from_fn(n, |i, _| x[(i, j)]);
        let orig_norm = v.norm();
        for b in &basis {
            let proj = b.dot(&v);
            v.axpy(-proj, b, 1.0);
        }
        let threshold = orig_norm.max(1e-300) * 1e-7;
        if v.norm() <= threshold {
            return Some(names.get(j).cloned().unwrap_or_else(|| format!("col{j}")));
        }
        let norm = v.norm();
        basis.push(v / norm);
    }
    None
}

/// Centered total sum of squares.
pub fn centered_tss(y: &DVector<f64>) -> f64 {
    let mean = y.mean();
    y.iter().map(|v| (v - mean) * (v - mean)).sum()
}
