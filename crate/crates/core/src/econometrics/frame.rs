//! Regression data containers: named columns, categorical factors, and the
//! assembled frame fed to the estimators.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// A named column of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

impl Column {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            values,
        }
    }
}

/// A categorical column encoded as dense level codes `0..n_levels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub name: String,
    pub codes: Vec<u32>,
    pub n_levels: u32,
}

impl Factor {
    /// Encode string keys into dense codes in order of first appearance.
    pub fn from_keys<S: AsRef<str>>(
        name: impl Into<String>,
        keys: impl IntoIterator<Item = S>,
    ) -> Factor {
        let mut index: HashMap<String, u32> = HashMap::new();
        let mut codes = Vec::new();
        for key in keys {
            let next = index.len() as u32;
            let code = *index.entry(key.as_ref().to_owned()).or_insert(next);
            codes.push(code);
        }
        Factor {
            name: name.into(),
            codes,
            n_levels: index.len() as u32,
        }
    }

    pub fn from_codes(name: impl Into<String>, codes: Vec<u32>) -> Result<Factor> {
        let n_levels = codes.iter().copied().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; n_levels as usize];
        for &c in &codes {
            seen[c as usize] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::domain("factor codes must be dense 0..n_levels"));
        }
        Ok(Factor {
            name: name.into(),
            codes,
            n_levels,
        })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Row indices grouped by level.
    pub fn groups(&self) -> Vec<Vec<u32>> {
        let mut groups = vec![Vec::new(); self.n_levels as usize];
        for (row, &code) in self.codes.iter().enumerate() {
            groups[code as usize].push(row as u32);
        }
        groups
    }
}

/// Outcome, regressors, instruments, fixed-effect factors, cluster, and
/// optional weights for one estimation problem.
#[derive(Debug, Clone)]
pub struct RegressionFrame {
    pub y: Column,
    pub exog: Vec<Column>,
    pub endog: Vec<Column>,
    pub instruments: Vec<Column>,
    pub fixed_effects: Vec<Factor>,
    pub cluster: Factor,
    pub weights: Option<Vec<f64>>,
}

impl RegressionFrame {
    pub fn n_rows(&self) -> usize {
        self.y.values.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_rows();
        if n == 0 {
            return Err(Error::domain("regression frame has no rows"));
        }
        let check_col = |col: &Column| -> Result<()> {
            if col.values.len() != n {
                return Err(Error::domain(format!(
                    "column `{}` has {} rows, expected {n}",
                    col.name,
                    col.values.len()
                )));
            }
            if let Some(i) = col.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::domain(format!(
                    "column `{}` has a non-finite value at row {i}",
                    col.name
                )));
            }
            Ok(())
        };
        check_col(&self.y)?;
        for c in self.exog.iter().chain(&self.endog).chain(&self.instruments) {
            check_col(c)?;
        }
        for f in &self.fixed_effects {
            if f.len() != n {
                return Err(Error::domain(format!(
                    "factor `{}` has {} rows, expected {n}",
                    f.name,
                    f.len()
                )));
            }
        }
        if self.cluster.len() != n {
            return Err(Error::domain(format!(
                "cluster column has {} rows, expected {n}",
                self.cluster.len()
            )));
        }
        if let Some(w) = &self.weights {
            if w.len() != n {
                return Err(Error::domain(format!(
                    "weights column has {} rows, expected {n}",
                    w.len()
                )));
            }
            if let Some(i) = w.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::domain(format!(
                    "weight at row {i} is not a non-negative number"
                )));
            }
        }
        if !self.endog.is_empty() && self.instruments.len() < self.endog.len() {
            return Err(Error::domain(format!(
                "{} endogenous columns but only {} instruments",
                self.endog.len(),
                self.instruments.len()
            )));
        }
        Ok(())
    }

    /// Copy the listed rows into a new frame, replacing the cluster factor
    /// (used by the cluster bootstrap, where each draw is a fresh cluster).
    pub fn select_rows(&self, rows: &[usize], cluster: Factor) -> RegressionFrame {
        let take = |col: &Column| Column {
            name: col.name.clone(),
            values: rows.iter().map(|&r| col.values[r]).collect(),
        };
        let take_factor = |f: &Factor| {
            Factor::from_keys(
                f.name.clone(),
                rows.iter().map(|&r| f.codes[r].to_string()),
            )
        };
        RegressionFrame {
            y: take(&self.y),
            exog: self.exog.iter().map(take).collect(),
            endog: self.endog.iter().map(take).collect(),
            instruments: self.instruments.iter().map(take).collect(),
            fixed_effects: self.fixed_effects.iter().map(take_factor).collect(),
            cluster,
            weights: self
                .weights
                .as_ref()
                .map(|w| rows.iter().map(|&r| w[r]).collect()),
        }
    }
}
