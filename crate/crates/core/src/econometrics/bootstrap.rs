//! Pairs cluster bootstrap: resample whole clusters with replacement and
//! recompute a statistic. Replicates are seeded independently from the
//! master seed, so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::frame::{Factor, RegressionFrame};

#[derive(Debug, Clone, Copy)]
pub struct BootstrapSe {
    pub se: f64,
    /// Successful replicates entering the standard deviation.
    pub replicates: usize,
    /// Replicates dropped because the estimator failed.
    pub failures: usize,
}

/// RNG for one replicate: same master seed, replicate index as the stream.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Draw clusters with replacement and return row indices plus the relabeled
/// cluster factor (each draw is a distinct cluster, so a cluster drawn
/// twice enters inference twice).
pub fn resample_cluster_rows(
    cluster: &Factor,
    rng: &mut impl Rng,
) -> (Vec<usize>, Factor) {
    let groups = cluster.groups();
    let g = groups.len();
    let mut rows = Vec::new();
    let mut codes = Vec::new();
    for draw in 0..g {
        let pick = rng.random_range(0..g);
        for &r in &groups[pick] {
            rows.push(r as usize);
            codes.push(draw as u32);
        }
    }
    let factor = Factor::from_codes(cluster.name.clone(), codes)
        .expect("draw indices are dense by construction");
    (rows, factor)
}

/// Bootstrap standard error of `estimator` over `b` cluster resamples.
/// Failed replicates are dropped; more than 20% failures is an error.
pub fn cluster_bootstrap<F>(
    estimator: F,
    frame: &RegressionFrame,
    b: usize,
    seed: u64,
) -> Result<BootstrapSe>
where
    F: Fn(&RegressionFrame) -> Result<f64> + Sync,
{
    if b < 2 {
        return Err(Error::domain("bootstrap needs at least 2 replications"));
    }
    frame.validate()?;
    if frame.cluster.n_levels < 2 {
        return Err(Error::domain("bootstrap needs at least 2 clusters"));
    }

    let draws: Vec<Option<f64>> = (0..b as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replicate_rng(seed, rep);
            let (rows, cluster) = resample_cluster_rows(&frame.cluster, &mut rng);
            let resampled = frame.select_rows(&rows, cluster);
            estimator(&resampled).ok()
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
    let var = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (values.len() - 1) as f64;

    Ok(BootstrapSe {
        se: var.sqrt(),
        replicates: values.len(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::frame::Column;

    fn mean_estimator(frame: &RegressionFrame) -> Result<f64> {
        Ok(frame.y.values.iter().sum::<f64>() / frame.y.values.len() as f64)
    }

    fn cluster_frame(values_per_cluster: &[f64], cluster_size: usize) -> RegressionFrame {
        let mut y = Vec::new();
        let mut keys = Vec::new();
        for (g, &v) in values_per_cluster.iter().enumerate() {
            for _ in 0..cluster_size {
                y.push(v);
                keys.push(g.to_string());
            }
        }
        RegressionFrame {
            y: Column::new("y", y),
            exog: vec![Column::new("x", vec![0.0; values_per_cluster.len() * cluster_size])],
            endog: vec![],
            instruments: vec![],
            fixed_effects: vec![],
            cluster: Factor::from_keys("g", keys.iter()),
            weights: None,
        }
    }

    #[test]
    fn se_of_mean_matches_analytic() {
        use rand::rngs::StdRng;
        use rand::SeedableRng;
        let g = 200;
        let mut rng = StdRng::seed_from_u64(99);
        let cluster_values: Vec<f64> = (0..g)
            .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
            .collect();
        let frame = cluster_frame(&cluster_values, 5);

        let boot = cluster_bootstrap(mean_estimator, &frame, 500, 17).unwrap();

        let mean = cluster_values.iter().sum::<f64>() / g as f64;
        let sd = (cluster_values
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / (g - 1) as f64)
            .sqrt();
        let analytic = sd / (g as f64).sqrt();
        assert!(
            (boot.se - analytic).abs() / analytic < 0.15,
            "bootstrap se {} vs analytic {analytic}",
            boot.se
        );
    }

    #[test]
    fn identical_clusters_give_zero_se() {
        let frame = cluster_frame(&[3.5; 20], 4);
        let boot = cluster_bootstrap(mean_estimator, &frame, 50, 1).unwrap();
        assert_eq!(boot.se, 0.0);
    }

    #[test]
    fn same_seed_is_deterministic() {
        let values: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        let frame = cluster_frame(&values, 3);
        let a = cluster_bootstrap(mean_estimator, &frame, 50, 123).unwrap();
        let b = cluster_bootstrap(mean_estimator, &frame, 50, 123).unwrap();
        assert_eq!(a.se, b.se);
        let c = cluster_bootstrap(mean_estimator, &frame, 50, 124).unwrap();
        assert_ne!(a.se, c.se);
    }

    #[test]
    fn excessive_failures_error_out() {
        let frame = cluster_frame(&[1.0, 2.0, 3.0], 2);
        let failing = |_: &RegressionFrame| -> Result<f64> {
            Err(Error::estimation("always fails"))
        };
        assert!(cluster_bootstrap(failing, &frame, 10, 5).is_err());
        assert!(cluster_bootstrap(mean_estimator, &frame, 1, 5).is_err());
    }
}
