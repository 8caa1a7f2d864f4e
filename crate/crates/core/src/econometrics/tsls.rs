//! Two-stage least squares with cluster-robust inference and a first-stage
//! relevance diagnostic.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::absorb::Demeaned;
use super::fit::{centered_tss, cholesky_or_collinear, FitResult};
use super::vcov::{cluster_vcov, SmallSample};

/// 2SLS of the demeaned outcome on `[endogenous | exogenous]`, with the
/// endogenous columns instrumented by `[exogenous | instruments]`.
/// Coefficients are ordered endogenous first. The first-stage F statistic
/// tests the excluded instruments jointly, using the same cluster-robust
/// covariance as the main fit.
pub fn tsls(demeaned: &Demeaned) -> Result<FitResult> {
    tsls_with(demeaned, SmallSample::Cr1)
}

pub fn tsls_with(demeaned: &Demeaned, adjust: SmallSample) -> Result<FitResult> {
    let n_endog = demeaned.endog.ncols();
    let n_instr = demeaned.instruments.ncols();
    if n_endog == 0 {
        return Err(Error::domain(
            "no endogenous columns; use ols for uninstrumented designs",
        ));
    }
    if n_instr < n_endog {
        return Err(Error::domain(format!(
            "{n_endog} endogenous columns but only {n_instr} instruments"
        )));
    }
    let n = demeaned.n_rows();
    let p = demeaned.exog.ncols();
    let k = n_endog + p;
    if n <= k {
        return Err(Error::estimation(format!(
            "{n} rows cannot identify {k} coefficients"
        )));
    }

    // first stage: each endogenous column on [exog | instruments]
    let mut w = DMatrix::zeros(n, p + n_instr);
    w.view_mut((0, 0), (n, p)).copy_from(&demeaned.exog);
    w.view_mut((0, p), (n, n_instr))
        .copy_from(&demeaned.instruments);
    let w_names: Vec<String> = demeaned
        .exog_names
        .iter()
        .chain(&demeaned.instrument_names)
        .cloned()
        .collect();
    let w_chol = cholesky_or_collinear(&w, &w_names)?;
    let w_bread = w_chol.inverse();

    let mut fitted = DMatrix::zeros(n, n_endog);
    let mut min_f = f64::INFINITY;
    for j in 0..n_endog {
        let d = demeaned.endog.column(j);
        let gamma = w_chol.solve(&(w.transpose() * d));
        let d_hat = &w * &gamma;
        let resid = d - &d_hat;
        let fs_vcov = cluster_vcov(&w, &resid.into(), &w_bread, &demeaned.cluster, adjust)?;

        // Wald statistic on the instrument block, divided by its size. A
        // numerically perfect first stage (zero residuals) yields an
        // unbounded statistic.
        let gz = gamma.rows(p, n_instr).into_owned();
        let vz = fs_vcov.view((p, p), (n_instr, n_instr)).into_owned();
        let f = match vz.clone().try_inverse() {
            Some(vz_inv) => (gz.transpose() * vz_inv * &gz)[(0, 0)] / n_instr as f64,
            None => f64::INFINITY,
        };
        if f < min_f {
            min_f = f;
        }
        fitted.set_column(j, &d_hat.column(0));
    }

    // second stage on [fitted endogenous | exog]
    let mut x_hat = DMatrix::zeros(n, k);
    x_hat.view_mut((0, 0), (n, n_endog)).copy_from(&fitted);
    x_hat.view_mut((0, n_endog), (n, p)).copy_from(&demeaned.exog);
    let terms: Vec<String> = demeaned
        .endog_names
        .iter()
        .chain(&demeaned.exog_names)
        .cloned()
        .collect();
    let chol = match cholesky_or_collinear(&x_hat, &terms) {
        Ok(c) => c,
        Err(Error::RankDeficient(name)) => {
            return Err(Error::estimation(format!(
                "weak or rank-deficient first stage: fitted column `{name}` is collinear"
            )))
        }
        Err(e) => return Err(e),
    };
    let beta = chol.solve(&(x_hat.transpose() * &demeaned.y));
    let bread = chol.inverse();

    // structural residuals use the actual endogenous columns
    let mut x_actual = DMatrix::zeros(n, k);
    x_actual
        .view_mut((0, 0), (n, n_endog))
        .copy_from(&demeaned.endog);
    x_actual
        .view_mut((0, n_endog), (n, p))
        .copy_from(&demeaned.exog);
    let residuals = &demeaned.y - &x_actual * &beta;
    let rss: f64 = residuals.iter().map(|u| u * u).sum();
    let tss = centered_tss(&demeaned.y);
    let r2_within = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };

    let vcov = cluster_vcov(&x_hat, &residuals, &bread, &demeaned.cluster, adjust)?;
    let g = demeaned.cluster.n_levels as usize;

    Ok(FitResult {
        terms,
        beta,
        vcov,
        n,
        k,
        g,
        r2_within,
        first_stage_f: Some(min_f),
        dof: g - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::absorb::absorb_fixed_effects;
    use crate::econometrics::frame::{Column, Factor, RegressionFrame};
    use crate::econometrics::ols::ols;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Frame with a single constant fixed effect so that demeaning centers
    /// every column.
    fn iv_frame(y: Vec<f64>, d: Vec<f64>, z: Vec<f64>) -> RegressionFrame {
        let n = y.len();
        RegressionFrame {
            y: Column::new("y", y),
            exog: vec![],
            endog: vec![Column::new("d", d)],
            instruments: vec![Column::new("z", z)],
            fixed_effects: vec![Factor::from_keys("const", (0..n).map(|_| "all"))],
            cluster: Factor::from_keys("c", (0..n).map(|i| (i % 7).to_string())),
            weights: None,
        }
    }

    fn cov(a: &[f64], b: &[f64]) -> f64 {
        let ma = a.iter().sum::<f64>() / a.len() as f64;
        let mb = b.iter().sum::<f64>() / b.len() as f64;
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - ma) * (y - mb))
            .sum::<f64>()
            / a.len() as f64
    }

    #[test]
    fn just_identified_matches_covariance_ratio() {
        let mut rng = StdRng::seed_from_u64(7);
        let n = 60;
        let mut z = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        for i in 0..n {
            z[i] = rng.random_range(-1.0..1.0);
            d[i] = 0.8 * z[i] + rng.random_range(-0.3..0.3);
            y[i] = -0.5 * d[i] + rng.random_range(-0.2..0.2);
        }
        let frame = iv_frame(y.clone(), d.clone(), z.clone());
        let fit = tsls(&absorb_fixed_effects(&frame, 1e-10, 10).unwrap()).unwrap();
        let oracle = cov(&z, &y) / cov(&z, &d);
        assert!((fit.beta[0] - oracle).abs() < 1e-10);
        assert!(fit.first_stage_f.unwrap() > 10.0);
    }

    #[test]
    fn identity_instrument_reproduces_ols() {
        let mut rng = StdRng::seed_from_u64(3);
        let n = 40;
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| 1.2 * v + rng.random_range(-0.1..0.1))
            .collect();

        let iv = iv_frame(y.clone(), x.clone(), x.clone());
        let iv_fit = tsls(&absorb_fixed_effects(&iv, 1e-10, 10).unwrap()).unwrap();

        let ols_frame = RegressionFrame {
            y: Column::new("y", y),
            exog: vec![Column::new("d", x)],
            endog: vec![],
            instruments: vec![],
            fixed_effects: vec![Factor::from_keys("const", (0..n).map(|_| "all"))],
            cluster: Factor::from_keys("c", (0..n).map(|i| (i % 7).to_string())),
            weights: None,
        };
        let ols_fit = ols(&absorb_fixed_effects(&ols_frame, 1e-10, 10).unwrap()).unwrap();
        assert!((iv_fit.beta[0] - ols_fit.beta[0]).abs() < 1e-12);
    }

    #[test]
    fn first_stage_sign_is_recovered() {
        let mut rng = StdRng::seed_from_u64(11);
        let n = 200;
        let mut z = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut y = vec![0.0; n];
        for i in 0..n {
            z[i] = rng.random_range(-1.0..1.0);
            d[i] = 0.8 * z[i] + rng.random_range(-0.2..0.2);
            y[i] = 0.3 * d[i] + rng.random_range(-0.2..0.2);
        }
        let frame = iv_frame(y, d.clone(), z.clone());
        let demeaned = absorb_fixed_effects(&frame, 1e-10, 10).unwrap();
        // the first-stage slope is cov(z, d)/var(z) after centering
        let slope = cov(&z, &d) / cov(&z, &z);
        assert!(slope > 0.5 && slope < 1.1);
        let fit = tsls(&demeaned).unwrap();
        assert!(fit.first_stage_f.unwrap() > 10.0);
    }

    #[test]
    fn irrelevant_instrument_is_detected() {
        // instrument constant within the absorbed fixed effect: the fitted
        // endogenous column collapses and the second stage cannot solve
        let n = 30;
        let mut rng = StdRng::seed_from_u64(5);
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = d.iter().map(|v| 2.0 * v).collect();
        let z = vec![1.0; n];
        let frame = iv_frame(y, d, z);
        let demeaned = absorb_fixed_effects(&frame, 1e-10, 10).unwrap();
        assert!(tsls(&demeaned).is_err());
    }

    #[test]
    fn requires_enough_instruments() {
        let frame = RegressionFrame {
            y: Column::new("y", vec![1.0, 2.0, 3.0]),
            exog: vec![],
            endog: vec![Column::new("d", vec![1.0, 2.0, 3.0])],
            instruments: vec![],
            fixed_effects: vec![],
            cluster: Factor::from_keys("c", ["a", "b", "c"]),
            weights: None,
        };
        assert!(frame.validate().is_err());
    }
}
