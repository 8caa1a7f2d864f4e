//! Fixed-effect absorption by alternating projections.
//!
//! Each sweep subtracts group means for every factor in turn; sweeps repeat
//! until the largest adjustment falls below the tolerance. A single factor
//! is exact after one sweep. With weights, group means are weighted and the
//! returned matrices are pre-scaled by `sqrt(w)` so that downstream solvers
//! and sandwich estimators see an ordinary least-squares problem.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::frame::{Factor, RegressionFrame};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Frame contents after demeaning, laid out as dense matrices.
#[derive(Debug, Clone)]
pub struct Demeaned {
    pub y: DVector<f64>,
    pub exog: DMatrix<f64>,
    pub exog_names: Vec<String>,
    pub endog: DMatrix<f64>,
    pub endog_names: Vec<String>,
    pub instruments: DMatrix<f64>,
    pub instrument_names: Vec<String>,
    pub cluster: Factor,
    /// Number of sweeps performed (0 when no fixed effects were absorbed).
    pub iterations: usize,
}

impl Demeaned {
    pub fn n_rows(&self) -> usize {
        self.y.len()
    }
}

/// Demean `y`, regressors, and instruments over every fixed-effect factor.
pub fn absorb_fixed_effects(
    frame: &RegressionFrame,
    tol: f64,
    max_iter: usize,
) -> Result<Demeaned> {
    frame.validate()?;
    if frame.fixed_effects.is_empty() {
        return Err(Error::domain(
            "no fixed effects to absorb; use `demean_none` for raw frames",
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    demean(frame, tol, max_iter, true)
}

/// Pack a frame without demeaning (for models estimated without fixed
/// effects; no intercept is added).
pub fn demean_none(frame: &RegressionFrame) -> Result<Demeaned> {
    frame.validate()?;
    demean(frame, DEFAULT_TOL, 0, false)
}

fn demean(
    frame: &RegressionFrame,
    tol: f64,
    max_iter: usize,
    absorb: bool,
) -> Result<Demeaned> {
    let n = frame.n_rows();
    let columns: Vec<&[f64]> = std::iter::once(frame.y.values.as_slice())
        .chain(frame.exog.iter().map(|c| c.values.as_slice()))
        .chain(frame.endog.iter().map(|c| c.values.as_slice()))
        .chain(frame.instruments.iter().map(|c| c.values.as_slice()))
        .collect();
    let mut data: Vec<Vec<f64>> = columns.iter().map(|c| c.to_vec()).collect();

    let mut iterations = 0;
    if absorb {
        let groups: Vec<Vec<Vec<u32>>> = frame
            .fixed_effects
            .iter()
            .map(|f| f.groups())
            .collect();
        let group_weights: Vec<Vec<f64>> = groups
            .iter()
            .map(|factor_groups| {
                factor_groups
                    .iter()
                    .map(|rows| match &frame.weights {
                        Some(w) => rows.iter().map(|&r| w[r as usize]).sum(),
                        None => rows.len() as f64,
                    })
                    .collect()
            })
            .collect();

        let single_factor = frame.fixed_effects.len() == 1;
        loop {
            iterations += 1;
            let mut max_change: f64 = 0.0;
            for (factor_groups, totals) in groups.iter().zip(&group_weights) {
                for col in data.iter_mut() {
                    for (rows, &total) in factor_groups.iter().zip(totals) {
                        if total <= 0.0 {
                            continue;
                        }
                        let sum: f64 = match &frame.weights {
                            Some(w) => rows
                                .iter()
                                .map(|&r| w[r as usize] * col[r as usize])
                                .sum(),
                            None => rows.iter().map(|&r| col[r as usize]).sum(),
                        };
                        let mean = sum / total;
                        let change = mean.abs();
                        if change > max_change {
                            max_change = change;
                        }
                        for &r in rows {
                            col[r as usize] -= mean;
                        }
                    }
                }
            }
            if single_factor || max_change < tol {
                break;
            }
            if iterations >= max_iter {
                return Err(Error::NonConvergence {
                    iterations,
                    residual: max_change,
                });
            }
        }
    }

    // weighted problems are solved in sqrt(w)-scaled space
    if let Some(w) = &frame.weights {
        for col in data.iter_mut() {
            for (v, wi) in col.iter_mut().zip(w) {
                *v *= wi.sqrt();
            }
        }
    }

    let mut it = data.into_iter();
    let y = DVector::from_vec(it.next().unwrap());
    let take_matrix = |it: &mut dyn Iterator<Item = Vec<f64>>, k: usize| -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, k);
        for j in 0..k {
            let col = it.next().unwrap();
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    };
    let exog = take_matrix(&mut it, frame.exog.len());
    let endog = take_matrix(&mut it, frame.endog.len());
    let instruments = take_matrix(&mut it, frame.instruments.len());

    Ok(Demeaned {
        y,
        exog,
        exog_names: frame.exog.iter().map(|c| c.name.clone()).collect(),
        endog,
        endog_names: frame.endog.iter().map(|c| c.name.clone()).collect(),
        instruments,
        instrument_names: frame.instruments.iter().map(|c| c.name.clone()).collect(),
        cluster: frame.cluster.clone(),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::frame::Column;

    fn frame_with(
        y: Vec<f64>,
        x: Vec<f64>,
        factors: Vec<Factor>,
    ) -> RegressionFrame {
        let n = y.len();
        RegressionFrame {
            y: Column::new("y", y),
            exog: vec![Column::new("x", x)],
            endog: vec![],
            instruments: vec![],
            fixed_effects: factors,
            cluster: Factor::from_keys("c", (0..n).map(|i| i.to_string())),
            weights: None,
        }
    }

    #[test]
    fn single_factor_group_demeaning() {
        let frame = frame_with(
            vec![1.0, 3.0, 5.0, 9.0],
            vec![0.0; 4],
            vec![Factor::from_keys("g", ["a", "a", "b", "b"])],
        );
        let d = absorb_fixed_effects(&frame, 1e-8, 100).unwrap();
        assert_eq!(d.iterations, 1);
        let got: Vec<f64> = d.y.iter().copied().collect();
        assert_eq!(got, vec![-1.0, 1.0, -2.0, 2.0]);
    }

    #[test]
    fn constant_within_levels_annihilates() {
        let frame = frame_with(
            vec![7.0, 7.0, 3.0, 3.0],
            vec![1.0, 1.0, 1.0, 1.0],
            vec![Factor::from_keys("g", ["a", "a", "b", "b"])],
        );
        let d = absorb_fixed_effects(&frame, 1e-8, 100).unwrap();
        assert!(d.y.iter().all(|v| v.abs() < 1e-15));
        assert!(d.exog.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn two_factors_orthogonal_to_both() {
        // small two-way layout
        let g1 = Factor::from_keys("g1", ["a", "a", "b", "b", "a", "b"]);
        let g2 = Factor::from_keys("g2", ["u", "v", "u", "v", "u", "v"]);
        let frame = frame_with(
            vec![1.0, 4.0, 2.0, 8.0, 3.0, 5.0],
            vec![0.5, 1.5, -1.0, 2.0, 0.0, 1.0],
            vec![g1.clone(), g2.clone()],
        );
        let d = absorb_fixed_effects(&frame, 1e-10, 1000).unwrap();
        for f in [&g1, &g2] {
            for rows in f.groups() {
                let mean: f64 =
                    rows.iter().map(|&r| d.y[r as usize]).sum::<f64>() / rows.len() as f64;
                assert!(mean.abs() < 1e-9, "group mean {mean} not annihilated");
            }
        }
    }

    #[test]
    fn weighted_demeaning_uses_weighted_means() {
        let mut frame = frame_with(
            vec![1.0, 4.0],
            vec![0.0, 0.0],
            vec![Factor::from_keys("g", ["a", "a"])],
        );
        frame.weights = Some(vec![3.0, 1.0]);
        let d = absorb_fixed_effects(&frame, 1e-8, 100).unwrap();
        // weighted mean = (3*1 + 1*4)/4 = 1.75; then scaled by sqrt(w)
        assert!((d.y[0] - (1.0 - 1.75) * 3f64.sqrt()).abs() < 1e-12);
        assert!((d.y[1] - (4.0 - 1.75) * 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_fixed_effects_is_rejected() {
        let frame = frame_with(vec![1.0, 2.0], vec![1.0, 2.0], vec![]);
        assert!(absorb_fixed_effects(&frame, 1e-8, 100).is_err());
        assert!(demean_none(&frame).is_ok());
    }
}
