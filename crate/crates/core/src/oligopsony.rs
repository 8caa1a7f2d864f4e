//! Closed-form Cournot oligopsony with linear labor supply and linear
//! marginal revenue product, plus minimum-wage comparative statics.
//!
//! The market labor supply curve is `w = a + b L` and each of the `J`
//! symmetric firms faces a marginal revenue product `c - d l` in its own
//! employment `l`. All equilibrium objects have closed forms, which makes
//! the model usable both as an illustration of the three minimum-wage
//! regimes and as the ground-truth generator for synthetic panels.

use crate::error::{Error, Result};

/// Linear-supply / linear-MRPL economy with `firms` symmetric employers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OligopsonyEconomy {
    /// Labor supply intercept `a` (wage at zero employment).
    pub supply_intercept: f64,
    /// Labor supply slope `b > 0`.
    pub supply_slope: f64,
    /// Per-firm MRPL intercept `c > a`.
    pub mrpl_intercept: f64,
    /// Per-firm MRPL slope `d >= 0` (0 means constant marginal product).
    pub mrpl_slope: f64,
    /// Number of firms `J >= 1`.
    pub firms: u32,
}

/// Which side of the market pins down employment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// No minimum wage in force.
    Free,
    /// Minimum wage at or below the oligopsony wage: nothing changes.
    Unconstrained,
    /// Minimum wage between the oligopsony and competitive wage:
    /// employment tracks the labor supply curve upward.
    SupplyDetermined,
    /// Minimum wage above the competitive wage: employment tracks the
    /// labor demand curve downward.
    DemandDetermined,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Free => "free",
            Regime::Unconstrained => "unconstrained",
            Regime::SupplyDetermined => "supply_determined",
            Regime::DemandDetermined => "demand_determined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPoint {
    pub wage: f64,
    pub employment_total: f64,
    pub employment_per_firm: f64,
    pub regime: Regime,
}

/// One point of a minimum-wage response curve: outcomes relative to the
/// free-market Cournot equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponsePoint {
    pub wmin: f64,
    pub wage_delta: f64,
    pub employment_delta: f64,
    pub regime: Regime,
}

impl OligopsonyEconomy {
    pub fn new(
        supply_intercept: f64,
        supply_slope: f64,
        mrpl_intercept: f64,
        mrpl_slope: f64,
        firms: u32,
    ) -> Result<Self> {
        let econ = OligopsonyEconomy {
            supply_intercept,
            supply_slope,
            mrpl_intercept,
            mrpl_slope,
            firms,
        };
        econ.validate()?;
        Ok(econ)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.supply_slope > 0.0) {
            return Err(Error::domain("supply slope must be positive"));
        }
        if self.mrpl_slope < 0.0 {
            return Err(Error::domain("MRPL slope must be non-negative"));
        }
        if !(self.mrpl_intercept > self.supply_intercept) {
            return Err(Error::domain(
                "MRPL intercept must exceed the supply intercept",
            ));
        }
        if self.firms == 0 {
            return Err(Error::domain("firm count must be at least 1"));
        }
        Ok(())
    }

    fn j(&self) -> f64 {
        f64::from(self.firms)
    }

    /// Symmetric Cournot equilibrium. Each firm's first-order condition
    /// `c - d l = a + b J l + b l` yields `l = (c - a) / (d + b (J + 1))`;
    /// the market wage is read off the supply curve. `J = 1` reproduces the
    /// textbook monopsony.
    pub fn cournot(&self) -> EquilibriumPoint {
        let j = self.j();
        let l = (self.mrpl_intercept - self.supply_intercept)
            / (self.mrpl_slope + self.supply_slope * (j + 1.0));
        let total = j * l;
        EquilibriumPoint {
            wage: self.supply_intercept + self.supply_slope * total,
            employment_total: total,
            employment_per_firm: l,
            regime: Regime::Free,
        }
    }

    /// Wage-taking equilibrium: `c - d l = w` per firm and `w = a + b J l`
    /// on the supply side.
    pub fn competitive(&self) -> EquilibriumPoint {
        let j = self.j();
        let l = (self.mrpl_intercept - self.supply_intercept)
            / (self.mrpl_slope + self.supply_slope * j);
        let total = j * l;
        EquilibriumPoint {
            wage: self.supply_intercept + self.supply_slope * total,
            employment_total: total,
            employment_per_firm: l,
            regime: Regime::Free,
        }
    }

    /// Outcome under a minimum wage `wmin`. Boundaries are closed on the
    /// left: `wmin = w^O` is still unconstrained and `wmin = w^C` still
    /// supply-determined.
    pub fn minwage_response(&self, wmin: f64) -> Result<EquilibriumPoint> {
        if !wmin.is_finite() || wmin < 0.0 {
            return Err(Error::domain(format!(
                "minimum wage {wmin} must be non-negative"
            )));
        }
        let free = self.cournot();
        if wmin <= free.wage {
            return Ok(EquilibriumPoint {
                regime: Regime::Unconstrained,
                ..free
            });
        }
        let competitive = self.competitive();
        let j = self.j();
        if wmin <= competitive.wage {
            // Marginal cost is flat at wmin, so firms expand along the
            // market supply curve until it binds.
            let total = (wmin - self.supply_intercept) / self.supply_slope;
            return Ok(EquilibriumPoint {
                wage: wmin,
                employment_total: total,
                employment_per_firm: total / j,
                regime: Regime::SupplyDetermined,
            });
        }
        // Above the competitive wage, employment follows aggregate
        // wage-taking demand J (c - wmin) / d. A flat MRPL (d = 0) supports
        // no employment at any wage above c.
        let per_firm = if self.mrpl_slope > 0.0 {
            ((self.mrpl_intercept - wmin) / self.mrpl_slope).max(0.0)
        } else {
            0.0
        };
        Ok(EquilibriumPoint {
            wage: wmin,
            employment_total: j * per_firm,
            employment_per_firm: per_firm,
            regime: Regime::DemandDetermined,
        })
    }

    /// Proportional wage suppression at the Cournot equilibrium,
    /// `(MRPL - w) / w`.
    pub fn markdown(&self) -> f64 {
        let eq = self.cournot();
        let mrpl = self.mrpl_intercept - self.mrpl_slope * eq.employment_per_firm;
        (mrpl - eq.wage) / eq.wage
    }

    /// Wage elasticity of market labor supply at the Cournot equilibrium,
    /// `mu = w / (b L)`. For a single firm `markdown * mu = 1`.
    pub fn supply_elasticity(&self) -> f64 {
        let eq = self.cournot();
        eq.wage / (self.supply_slope * eq.employment_total)
    }

    /// Wage and employment deltas relative to the free-market Cournot
    /// outcome over an ascending grid of minimum wages.
    pub fn response_curve(&self, wmin_grid: &[f64]) -> Result<Vec<ResponsePoint>> {
        if wmin_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain("minimum wage grid must be sorted ascending"));
        }
        let free = self.cournot();
        wmin_grid
            .iter()
            .map(|&wmin| {
                let point = self.minwage_response(wmin)?;
                Ok(ResponsePoint {
                    wmin,
                    wage_delta: point.wage - free.wage,
                    employment_delta: point.employment_total - free.employment_total,
                    regime: point.regime,
                })
            })
            .collect()
    }
}
