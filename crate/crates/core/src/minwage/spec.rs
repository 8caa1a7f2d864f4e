//! Regression specification configs and the assembly of establishment
//! panels into regression frames.

use std::collections::BTreeMap;

use crate::data_model::{kaitz_quintile, EstabPanel, EstabRow, MarketKey, KAITZ_QUINTILE_CUTS};
use crate::econometrics::{Column, Factor, RegressionFrame};
use crate::error::{Error, Result};

/// Default HHI band boundaries for the categorical interaction
/// (very low / low / medium / high / very high).
pub const HHI_BAND_CUTS: [f64; 4] = [0.05, 0.10, 0.20, 0.40];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Design {
    /// Outcomes on log HHI, pre-regulation sample.
    ConcentrationEq2,
    /// Outcomes on log minimum wage and its HHI interaction.
    MinwageEq4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeScheme {
    Estab,
    EstabYear,
    EstabYearZone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interaction {
    None,
    LinearHhi,
    HhiBands,
    KaitzQuintilesTriple,
    AkmExtra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HhiSource {
    Avg,
    Predetermined,
    Current,
}

#[derive(Debug, Clone)]
pub struct SpecConfig {
    pub outcome: String,
    pub design: Design,
    pub fe_scheme: FeScheme,
    pub iv: bool,
    pub interaction: Interaction,
    pub controls_on: bool,
    pub time_trends_on: bool,
    pub implicit_minwage_on: bool,
    pub hhi_source: HhiSource,
    pub kaitz_cuts: [f64; 4],
    pub hhi_band_cuts: [f64; 4],
}

impl SpecConfig {
    pub fn eq2(outcome: &str, fe_scheme: FeScheme, iv: bool) -> SpecConfig {
        SpecConfig {
            outcome: outcome.to_owned(),
            design: Design::ConcentrationEq2,
            fe_scheme,
            iv,
            interaction: Interaction::None,
            controls_on: false,
            time_trends_on: false,
            implicit_minwage_on: false,
            hhi_source: HhiSource::Current,
            kaitz_cuts: KAITZ_QUINTILE_CUTS,
            hhi_band_cuts: HHI_BAND_CUTS,
        }
    }

    pub fn eq4(outcome: &str, interaction: Interaction) -> SpecConfig {
        SpecConfig {
            outcome: outcome.to_owned(),
            design: Design::MinwageEq4,
            fe_scheme: FeScheme::EstabYearZone,
            iv: false,
            interaction,
            controls_on: true,
            time_trends_on: true,
            implicit_minwage_on: false,
            hhi_source: HhiSource::Avg,
            kaitz_cuts: KAITZ_QUINTILE_CUTS,
            hhi_band_cuts: HHI_BAND_CUTS,
        }
    }

    /// Named presets mirroring the baseline specification table columns.
    pub fn preset(name: &str) -> Result<SpecConfig> {
        Ok(match name {
            "eq2_fe" => SpecConfig::eq2("mean_wage", FeScheme::Estab, false),
            "eq2_fe_year" => SpecConfig::eq2("mean_wage", FeScheme::EstabYear, false),
            "eq2_fe_yearzone" => SpecConfig::eq2("mean_wage", FeScheme::EstabYearZone, false),
            "eq2_iv" => SpecConfig::eq2("mean_wage", FeScheme::EstabYearZone, true),
            "eq2_iv_employment" => SpecConfig::eq2("emp_ft", FeScheme::EstabYearZone, true),
            "eq4_linear" => SpecConfig::eq4("emp_ft", Interaction::LinearHhi),
            "eq4_wage" => SpecConfig::eq4("mean_wage", Interaction::LinearHhi),
            "eq4_none" => SpecConfig::eq4("emp_ft", Interaction::None),
            "eq4_bands" => SpecConfig::eq4("emp_ft", Interaction::HhiBands),
            "eq4_quintiles" => SpecConfig::eq4("emp_ft", Interaction::KaitzQuintilesTriple),
            "eq4_akm" => SpecConfig::eq4("emp_ft", Interaction::AkmExtra),
            "eq4_implicit" => {
                let mut cfg = SpecConfig::eq4("emp_ft", Interaction::LinearHhi);
                cfg.implicit_minwage_on = true;
                cfg
            }
            "eq4_predetermined" => {
                let mut cfg = SpecConfig::eq4("emp_ft", Interaction::LinearHhi);
                cfg.hhi_source = HhiSource::Predetermined;
                cfg
            }
            "closure_lpm" => SpecConfig::eq4("closure", Interaction::LinearHhi),
            other => return Err(Error::domain(format!("unknown spec preset `{other}`"))),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.iv && self.design != Design::ConcentrationEq2 {
            return Err(Error::domain(
                "instrumented estimation applies to the concentration design only",
            ));
        }
        if self.design == Design::ConcentrationEq2 && self.interaction != Interaction::None {
            return Err(Error::domain(
                "interactions apply to the minimum-wage design only",
            ));
        }
        if self.interaction == Interaction::KaitzQuintilesTriple
            && self.design != Design::MinwageEq4
        {
            return Err(Error::domain(
                "Kaitz quintile interactions require the minimum-wage design",
            ));
        }
        Ok(())
    }

    /// Parse from flat `key = value` text.
    pub fn from_key_values(text: &str) -> Result<SpecConfig> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('[') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                row: i + 1,
                column: "line".into(),
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            map.insert(key.trim(), value.trim());
        }
        SpecConfig::from_map(&map)
    }

    pub fn from_map(map: &BTreeMap<&str, &str>) -> Result<SpecConfig> {
        let get = |key: &str| -> Option<&str> { map.get(key).copied() };
        let design = match get("design").unwrap_or("minwage_eq4") {
            "concentration_eq2" => Design::ConcentrationEq2,
            "minwage_eq4" => Design::MinwageEq4,
            other => return Err(Error::domain(format!("unknown design `{other}`"))),
        };
        let fe_scheme = match get("fe").unwrap_or("estab+year_zone") {
            "estab" => FeScheme::Estab,
            "estab+year" => FeScheme::EstabYear,
            "estab+year_zone" => FeScheme::EstabYearZone,
            other => return Err(Error::domain(format!("unknown fe scheme `{other}`"))),
        };
        let interaction = match get("interaction").unwrap_or(if design == Design::MinwageEq4 {
            "linear_hhi"
        } else {
            "none"
        }) {
            "none" => Interaction::None,
            "linear_hhi" => Interaction::LinearHhi,
            "hhi_bands" => Interaction::HhiBands,
            "kaitz_quintiles_triple" => Interaction::KaitzQuintilesTriple,
            "akm_extra" => Interaction::AkmExtra,
            other => return Err(Error::domain(format!("unknown interaction `{other}`"))),
        };
        let hhi_source = match get("hhi_source").unwrap_or("avg") {
            "avg" => HhiSource::Avg,
            "predetermined" => HhiSource::Predetermined,
            "current" => HhiSource::Current,
            other => return Err(Error::domain(format!("unknown hhi source `{other}`"))),
        };
        let parse_bool = |key: &str, default: bool| -> Result<bool> {
            match get(key) {
                None => Ok(default),
                Some("true") => Ok(true),
                Some("false") => Ok(false),
                Some(other) => Err(Error::domain(format!("{key} must be true/false, got `{other}`"))),
            }
        };
        let parse_cuts = |key: &str, default: [f64; 4]| -> Result<[f64; 4]> {
            match get(key) {
                None => Ok(default),
                Some(text) => {
                    let parts: Vec<f64> = text
                        .split(',')
                        .map(|p| p.trim().parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::domain(format!("{key}: invalid cut list `{text}`")))?;
                    let arr: [f64; 4] = parts.try_into().map_err(|_| {
                        Error::domain(format!("{key} must list exactly 4 cut points"))
                    })?;
                    Ok(arr)
                }
            }
        };

        let cfg = SpecConfig {
            outcome: get("outcome").unwrap_or("mean_wage").to_owned(),
            design,
            fe_scheme,
            iv: parse_bool("iv", false)?,
            interaction,
            controls_on: parse_bool("controls", design == Design::MinwageEq4)?,
            time_trends_on: parse_bool("trends", false)?,
            implicit_minwage_on: parse_bool("implicit_minwage", false)?,
            hhi_source,
            kaitz_cuts: parse_cuts("kaitz_cuts", KAITZ_QUINTILE_CUTS)?,
            hhi_band_cuts: parse_cuts("hhi_band_cuts", HHI_BAND_CUTS)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_key_values(&self) -> String {
        let design = match self.design {
            Design::ConcentrationEq2 => "concentration_eq2",
            Design::MinwageEq4 => "minwage_eq4",
        };
        let fe = match self.fe_scheme {
            FeScheme::Estab => "estab",
            FeScheme::EstabYear => "estab+year",
            FeScheme::EstabYearZone => "estab+year_zone",
        };
        let interaction = match self.interaction {
            Interaction::None => "none",
            Interaction::LinearHhi => "linear_hhi",
            Interaction::HhiBands => "hhi_bands",
            Interaction::KaitzQuintilesTriple => "kaitz_quintiles_triple",
            Interaction::AkmExtra => "akm_extra",
        };
        let hhi_source = match self.hhi_source {
            HhiSource::Avg => "avg",
            HhiSource::Predetermined => "predetermined",
            HhiSource::Current => "current",
        };
        let cuts = |c: &[f64; 4]| {
            c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
        };
        format!(
            "outcome = {}\ndesign = {design}\nfe = {fe}\niv = {}\ninteraction = {interaction}\n\
             controls = {}\ntrends = {}\nimplicit_minwage = {}\nhhi_source = {hhi_source}\n\
             kaitz_cuts = {}\nhhi_band_cuts = {}\n",
            self.outcome,
            self.iv,
            self.controls_on,
            self.time_trends_on,
            self.implicit_minwage_on,
            cuts(&self.kaitz_cuts),
            cuts(&self.hhi_band_cuts),
        )
    }
}

/// Term name of the minimum-wage (or HHI) main effect.
pub const TERM_MAIN_MW: &str = "ln_minwage";
pub const TERM_MAIN_HHI: &str = "ln_hhi";
pub const TERM_MW_X_HHI: &str = "ln_minwage_x_hhi";

/// Frame plus term bookkeeping produced by `assemble_spec`.
#[derive(Debug, Clone)]
pub struct AssembledSpec {
    pub frame: RegressionFrame,
    /// Main regressor term name.
    pub main_term: String,
    /// Linear interaction term, when the design has one.
    pub interaction_term: Option<String>,
    /// Rows dropped per reason, then rows kept, in assembly order.
    pub filter_trace: Vec<(String, usize)>,
}

fn outcome_value(row: &EstabRow, name: &str) -> Result<Option<f64>> {
    Ok(match name {
        "mean_wage" => row.mean_wage,
        "p25_wage" => row.p25_wage,
        "p50_wage" => row.p50_wage,
        "p75_wage" => row.p75_wage,
        "emp_ft" => Some(f64::from(row.emp_ft)),
        "emp_pt" => Some(f64::from(row.emp_pt)),
        "emp_marginal" => Some(f64::from(row.emp_marginal)),
        "emp_overall" => Some(f64::from(row.emp_overall)),
        "closure" => Some(if row.closure { 1.0 } else { 0.0 }),
        other => return Err(Error::domain(format!("unknown outcome column `{other}`"))),
    })
}

fn hhi_value(row: &EstabRow, source: HhiSource) -> Option<f64> {
    match source {
        HhiSource::Avg => row.hhi_avg,
        HhiSource::Predetermined => row.hhi_predetermined,
        HhiSource::Current => row.hhi_current,
    }
}

/// HHI band index under left-closed cuts (matching the E.U. band rule).
fn hhi_band(h: f64, cuts: &[f64; 4]) -> usize {
    cuts.iter().position(|&c| h < c).unwrap_or(4)
}

/// Build the regression frame for a specification.
///
/// The concentration design restricts the sample to establishment-years
/// before the sector's first observed regulation and regresses the log
/// outcome on log current HHI (optionally instrumented). The minimum-wage
/// design regresses the log outcome (closure stays untransformed) on the
/// log minimum wage and its concentration interactions. Rows missing any
/// required ingredient are dropped and accounted for in the filter trace.
pub fn assemble_spec(
    panel: &EstabPanel,
    instrument: Option<&BTreeMap<MarketKey, f64>>,
    config: &SpecConfig,
) -> Result<AssembledSpec> {
    config.validate()?;
    if config.iv && instrument.is_none() {
        return Err(Error::domain("instrumented spec needs instrument values"));
    }
    let log_outcome = config.outcome != "closure";

    // first regulated year per (sector, territory), observed from the panel
    let mut first_regulated: BTreeMap<(&str, &str), i32> = BTreeMap::new();
    if config.design == Design::ConcentrationEq2 {
        for row in &panel.rows {
            if row.minwage.is_some() {
                let key = (row.sector.as_str(), row.territory.as_str());
                first_regulated
                    .entry(key)
                    .and_modify(|y| *y = (*y).min(row.year))
                    .or_insert(row.year);
            }
        }
    }

    let mut trace: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut kept_rows: Vec<&EstabRow> = Vec::new();
    let mut y = Vec::new();

    struct Ingredients {
        ln_mw: f64,
        hhi: f64,
        kaitz_q: usize,
        ln_akm: f64,
        controls: (f64, f64),
    }
    let mut parts: Vec<Ingredients> = Vec::new();
    let mut ln_hhi_current = Vec::new();
    let mut instrument_col = Vec::new();

    for row in &panel.rows {
        let Some(outcome) = outcome_value(row, &config.outcome)? else {
            *trace.entry("missing outcome").or_insert(0) += 1;
            continue;
        };
        let y_val = if log_outcome {
            if outcome <= 0.0 {
                *trace.entry("outcome not positive").or_insert(0) += 1;
                continue;
            }
            outcome.ln()
        } else {
            outcome
        };

        let controls = if config.controls_on {
            match (row.cba_share, row.log_sector_employment) {
                (Some(cba), Some(log_emp)) => (cba, log_emp),
                _ => {
                    *trace.entry("missing controls").or_insert(0) += 1;
                    continue;
                }
            }
        } else {
            (0.0, 0.0)
        };

        match config.design {
            Design::ConcentrationEq2 => {
                if let Some(&t0) =
                    first_regulated.get(&(row.sector.as_str(), row.territory.as_str()))
                {
                    if row.year >= t0 {
                        *trace.entry("regulated period").or_insert(0) += 1;
                        continue;
                    }
                }
                let Some(h) = row.hhi_current.filter(|h| *h > 0.0) else {
                    *trace.entry("missing hhi").or_insert(0) += 1;
                    continue;
                };
                if config.iv {
                    let Some(&z) = instrument.unwrap().get(&row.market_key()) else {
                        *trace.entry("missing instrument").or_insert(0) += 1;
                        continue;
                    };
                    instrument_col.push(z);
                }
                ln_hhi_current.push(h.ln());
                y.push(y_val);
                kept_rows.push(row);
                parts.push(Ingredients {
                    ln_mw: 0.0,
                    hhi: 0.0,
                    kaitz_q: 0,
                    ln_akm: 0.0,
                    controls,
                });
            }
            Design::MinwageEq4 => {
                let mw = match (row.minwage, config.implicit_minwage_on) {
                    (Some(mw), _) => mw,
                    (None, true) => match row.implicit_minwage {
                        Some(mw) => mw,
                        None => {
                            *trace.entry("no minimum wage in force").or_insert(0) += 1;
                            continue;
                        }
                    },
                    (None, false) => {
                        *trace.entry("no minimum wage in force").or_insert(0) += 1;
                        continue;
                    }
                };
                if mw <= 0.0 {
                    *trace.entry("no minimum wage in force").or_insert(0) += 1;
                    continue;
                }
                let needs_hhi = config.interaction != Interaction::None;
                let h = match hhi_value(row, config.hhi_source) {
                    Some(h) => h,
                    None if needs_hhi => {
                        *trace.entry("missing hhi").or_insert(0) += 1;
                        continue;
                    }
                    None => 0.0,
                };
                let kaitz_q = if config.interaction == Interaction::KaitzQuintilesTriple {
                    match row.kaitz_avg {
                        Some(k) => kaitz_quintile(k, &config.kaitz_cuts),
                        None => {
                            *trace.entry("missing kaitz").or_insert(0) += 1;
                            continue;
                        }
                    }
                } else {
                    0
                };
                let ln_akm = if config.interaction == Interaction::AkmExtra {
                    match row.akm_premium.filter(|a| *a > 0.0) {
                        Some(a) => a.ln(),
                        None => {
                            *trace.entry("missing akm premium").or_insert(0) += 1;
                            continue;
                        }
                    }
                } else {
                    0.0
                };
                y.push(y_val);
                kept_rows.push(row);
                parts.push(Ingredients {
                    ln_mw: mw.ln(),
                    hhi: h,
                    kaitz_q,
                    ln_akm,
                    controls,
                });
            }
        }
    }

    let mut filter_trace: Vec<(String, usize)> = trace
        .into_iter()
        .map(|(k, v)| (k.to_owned(), v))
        .collect();
    filter_trace.push(("rows kept".to_owned(), kept_rows.len()));

    if kept_rows.is_empty() {
        let detail = filter_trace
            .iter()
            .map(|(k, v)| format!("{k}: {v}"))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::domain(format!(
            "specification `{}` has an empty sample ({detail})",
            config.outcome
        )));
    }

    let n = kept_rows.len();
    let mut exog: Vec<Column> = Vec::new();
    let mut endog: Vec<Column> = Vec::new();
    let mut instruments: Vec<Column> = Vec::new();
    let main_term;
    let mut interaction_term = None;

    match config.design {
        Design::ConcentrationEq2 => {
            main_term = TERM_MAIN_HHI.to_owned();
            if config.iv {
                endog.push(Column::new(TERM_MAIN_HHI, ln_hhi_current));
                instruments.push(Column::new("loo_ln_ins", instrument_col));
            } else {
                exog.push(Column::new(TERM_MAIN_HHI, ln_hhi_current));
            }
        }
        Design::MinwageEq4 => {
            main_term = TERM_MAIN_MW.to_owned();
            exog.push(Column::new(
                TERM_MAIN_MW,
                parts.iter().map(|p| p.ln_mw).collect(),
            ));
            match config.interaction {
                Interaction::None => {}
                Interaction::LinearHhi => {
                    interaction_term = Some(TERM_MW_X_HHI.to_owned());
                    exog.push(Column::new(
                        TERM_MW_X_HHI,
                        parts.iter().map(|p| p.ln_mw * p.hhi).collect(),
                    ));
                }
                Interaction::HhiBands => {
                    for band in 1..5 {
                        exog.push(Column::new(
                            format!("ln_minwage_x_hhi_band{band}"),
                            parts
                                .iter()
                                .map(|p| {
                                    if hhi_band(p.hhi, &config.hhi_band_cuts) == band {
                                        p.ln_mw
                                    } else {
                                        0.0
                                    }
                                })
                                .collect(),
                        ));
                    }
                }
                Interaction::KaitzQuintilesTriple => {
                    interaction_term = Some(TERM_MW_X_HHI.to_owned());
                    exog.push(Column::new(
                        TERM_MW_X_HHI,
                        parts.iter().map(|p| p.ln_mw * p.hhi).collect(),
                    ));
                    for q in 1..5 {
                        exog.push(Column::new(
                            format!("ln_minwage_x_kaitz_q{q}"),
                            parts
                                .iter()
                                .map(|p| if p.kaitz_q == q { p.ln_mw } else { 0.0 })
                                .collect(),
                        ));
                        exog.push(Column::new(
                            format!("ln_minwage_x_hhi_x_kaitz_q{q}"),
                            parts
                                .iter()
                                .map(|p| if p.kaitz_q == q { p.ln_mw * p.hhi } else { 0.0 })
                                .collect(),
                        ));
                    }
                }
                Interaction::AkmExtra => {
                    interaction_term = Some(TERM_MW_X_HHI.to_owned());
                    exog.push(Column::new(
                        TERM_MW_X_HHI,
                        parts.iter().map(|p| p.ln_mw * p.hhi).collect(),
                    ));
                    exog.push(Column::new(
                        "ln_minwage_x_ln_akm",
                        parts.iter().map(|p| p.ln_mw * p.ln_akm).collect(),
                    ));
                }
            }
        }
    }

    if config.controls_on {
        exog.push(Column::new(
            "cba_share",
            parts.iter().map(|p| p.controls.0).collect(),
        ));
        exog.push(Column::new(
            "log_sector_employment",
            parts.iter().map(|p| p.controls.1).collect(),
        ));
    }

    if config.time_trends_on {
        let base_year = kept_rows.iter().map(|r| r.year).min().unwrap();
        let sectors: Vec<&str> = {
            let set: std::collections::BTreeSet<&str> =
                kept_rows.iter().map(|r| r.sector.as_str()).collect();
            set.into_iter().collect()
        };
        // first sector is the reference; its trend is collinear with the
        // year fixed effects once all others are included
        for sector in sectors.iter().skip(1) {
            exog.push(Column::new(
                format!("trend_{sector}"),
                kept_rows
                    .iter()
                    .map(|r| {
                        if r.sector == *sector {
                            f64::from(r.year - base_year)
                        } else {
                            0.0
                        }
                    })
                    .collect(),
            ));
        }
    }

    let mut fixed_effects = vec![Factor::from_keys(
        "estab",
        kept_rows.iter().map(|r| r.estab_id.as_str()),
    )];
    match config.fe_scheme {
        FeScheme::Estab => {}
        FeScheme::EstabYear => fixed_effects.push(Factor::from_keys(
            "year",
            kept_rows.iter().map(|r| r.year.to_string()),
        )),
        FeScheme::EstabYearZone => fixed_effects.push(Factor::from_keys(
            "year_zone",
            kept_rows.iter().map(|r| format!("{}|{}", r.year, r.zone)),
        )),
    }

    let cluster = Factor::from_keys("market", kept_rows.iter().map(|r| r.market_id()));

    let frame = RegressionFrame {
        y: Column::new(config.outcome.clone(), y),
        exog,
        endog,
        instruments,
        fixed_effects,
        cluster,
        weights: None,
    };
    let _ = n;

    Ok(AssembledSpec {
        frame,
        main_term,
        interaction_term,
        filter_trace,
    })
}
