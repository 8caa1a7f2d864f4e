//! Least squares on a demeaned frame with cluster-robust inference.

use crate::error::{Error, Result};

use super::absorb::Demeaned;
use super::fit::{centered_tss, cholesky_or_collinear, FitResult};
use super::vcov::{cluster_vcov, SmallSample};

/// OLS of the demeaned outcome on the demeaned exogenous regressors.
/// Endogenous columns are not allowed here; use `tsls`.
pub fn ols(demeaned: &Demeaned) -> Result<FitResult> {
    ols_with(demeaned, SmallSample::Cr1)
}

pub fn ols_with(demeaned: &Demeaned, adjust: SmallSample) -> Result<FitResult> {
    if demeaned.endog.ncols() > 0 {
        return Err(Error::domain(
            "frame has endogenous columns; use tsls for instrumented designs",
        ));
    }
    let x = &demeaned.exog;
    let k = x.ncols();
    if k == 0 {
        return Err(Error::domain("no regressors"));
    }
    let n = demeaned.n_rows();
    if n <= k {
        return Err(Error::estimation(format!(
            "{n} rows cannot identify {k} coefficients"
        )));
    }

    let chol = cholesky_or_collinear(x, &demeaned.exog_names)?;
    let beta = chol.solve(&(x.transpose() * &demeaned.y));
    let bread = chol.inverse();

    let residuals = &demeaned.y - x * &beta;
    let rss: f64 = residuals.iter().map(|u| u * u).sum();
    let tss = centered_tss(&demeaned.y);
    let r2_within = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };

    let vcov = cluster_vcov(x, &residuals, &bread, &demeaned.cluster, adjust)?;
    let g = demeaned.cluster.n_levels as usize;

    Ok(FitResult {
        terms: demeaned.exog_names.clone(),
        beta,
        vcov,
        n,
        k,
        g,
        r2_within,
        first_stage_f: None,
        dof: g - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::absorb::{absorb_fixed_effects, demean_none};
    use crate::econometrics::frame::{Column, Factor, RegressionFrame};
    use nalgebra::{DMatrix, DVector};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn plain_frame(y: Vec<f64>, cols: Vec<(&str, Vec<f64>)>) -> RegressionFrame {
        let n = y.len();
        RegressionFrame {
            y: Column::new("y", y),
            exog: cols
                .into_iter()
                .map(|(name, v)| Column::new(name, v))
                .collect(),
            endog: vec![],
            instruments: vec![],
            fixed_effects: vec![],
            cluster: Factor::from_keys("c", (0..n).map(|i| (i / 2).to_string())),
            weights: None,
        }
    }

    #[test]
    fn exact_proportionality() {
        let x: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let frame = plain_frame(y, vec![("x", x)]);
        let fit = ols(&demean_none(&frame).unwrap()).unwrap();
        assert!((fit.beta[0] - 2.0).abs() < 1e-12);
        assert!(fit.r2_within > 0.9999);
    }

    #[test]
    fn orthogonal_regressor_gets_zero() {
        let x = vec![1.0, -1.0, 1.0, -1.0];
        let y = vec![1.0, 1.0, -1.0, -1.0];
        let frame = plain_frame(y, vec![("x", x)]);
        let fit = ols(&demean_none(&frame).unwrap()).unwrap();
        assert!(fit.beta[0].abs() < 1e-12);
    }

    #[test]
    fn matches_normal_equations_oracle() {
        let mut rng = StdRng::seed_from_u64(42);
        let n = 50;
        let k = 3;
        let mut xs = vec![vec![0.0; n]; k];
        let mut y = vec![0.0; n];
        for i in 0..n {
            for x in xs.iter_mut() {
                x[i] = rng.random_range(-2.0..2.0);
            }
            y[i] = 1.5 * xs[0][i] - 0.7 * xs[1][i] + 0.2 * xs[2][i]
                + rng.random_range(-0.5..0.5);
        }
        let frame = plain_frame(
            y.clone(),
            vec![
                ("x1", xs[0].clone()),
                ("x2", xs[1].clone()),
                ("x3", xs[2].clone()),
            ],
        );
        let fit = ols(&demean_none(&frame).unwrap()).unwrap();

        // explicit (X'X)^{-1} X'y
        let mut x_mat = DMatrix::zeros(n, k);
        for i in 0..n {
            for j in 0..k {
                x_mat[(i, j)] = xs[j][i];
            }
        }
        let y_vec = DVector::from_vec(y);
        let oracle = (x_mat.transpose() * &x_mat)
            .try_inverse()
            .unwrap()
            * (x_mat.transpose() * y_vec);
        for j in 0..k {
            assert!((fit.beta[j] - oracle[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn names_collinear_column() {
        let x1 = vec![1.0, 2.0, 3.0, 4.0];
        let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v).collect();
        let y = vec![1.0, 2.0, 3.0, 4.0];
        let frame = plain_frame(y, vec![("x1", x1), ("x_dup", x2)]);
        match ols(&demean_none(&frame).unwrap()) {
            Err(Error::RankDeficient(name)) => assert_eq!(name, "x_dup"),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn fixed_effect_absorption_matches_within_slope() {
        // entity-varying intercepts, common slope 2
        let g = Factor::from_keys("g", ["a", "a", "a", "b", "b", "b"]);
        let x = vec![1.0, 2.0, 3.0, 10.0, 20.0, 30.0];
        let y = vec![7.0, 9.0, 11.0, 120.0, 140.0, 160.0];
        let frame = RegressionFrame {
            y: Column::new("y", y),
            exog: vec![Column::new("x", x)],
            endog: vec![],
            instruments: vec![],
            fixed_effects: vec![g],
            cluster: Factor::from_keys("c", ["a", "a", "a", "b", "b", "b"]),
            weights: None,
        };
        let fit = ols(&absorb_fixed_effects(&frame, 1e-10, 100).unwrap()).unwrap();
        assert!((fit.beta[0] - 2.0).abs() < 1e-10);
    }
}
