//! Establishment-year panel: wage moments, employment by contract type,
//! closure flags, HHI joins, minimum-wage joins, and sectoral controls.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;

use crate::error::{Error, Result};

use super::market::{truncate_industry, Delineation, MarketKey, MarketPanel};
use super::records::{main_jobs, Contract, SnapshotRecord};

pub const DEFAULT_DAYS_PER_WEEK: f64 = 7.0;
pub const DEFAULT_HOURS_PER_WEEK: f64 = 40.0;

/// Kaitz quintile boundaries for grouping establishments by minimum-wage
/// bindingness.
pub const KAITZ_QUINTILE_CUTS: [f64; 4] = [0.68, 0.79, 0.92, 1.15];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Territory {
    West,
    East,
    Berlin,
}

impl Territory {
    pub fn as_str(&self) -> &'static str {
        match self {
            Territory::West => "west",
            Territory::East => "east",
            Territory::Berlin => "berlin",
        }
    }
}

impl std::str::FromStr for Territory {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "west" => Ok(Territory::West),
            "east" => Ok(Territory::East),
            "berlin" => Ok(Territory::Berlin),
            other => Err(Error::domain(format!("unknown territory `{other}`"))),
        }
    }
}

/// District-to-territory classification. Defaults to the German district
/// code convention (prefix 11 = Berlin, 12-16 = East, otherwise West) with
/// optional longest-prefix overrides.
#[derive(Debug, Clone, Default)]
pub struct TerritoryRule {
    pub overrides: Vec<(String, Territory)>,
}

impl TerritoryRule {
    pub fn classify(&self, district: &str) -> Territory {
        let mut best: Option<(&str, Territory)> = None;
        for (prefix, terr) in &self.overrides {
            if district.starts_with(prefix.as_str())
                && best.map_or(true, |(b, _)| prefix.len() > b.len())
            {
                best = Some((prefix, *terr));
            }
        }
        if let Some((_, terr)) = best {
            return terr;
        }
        if district.starts_with("11") {
            Territory::Berlin
        } else if ("12"..="16").contains(&&district[..district.len().min(2)]) {
            Territory::East
        } else {
            Territory::West
        }
    }
}

/// Longest-prefix industry-to-sector assignment.
#[derive(Debug, Clone, Default)]
pub struct SectorMap {
    entries: Vec<(String, String)>,
}

impl SectorMap {
    pub fn new(entries: impl IntoIterator<Item = (String, String)>) -> Self {
        let mut entries: Vec<(String, String)> = entries.into_iter().collect();
        // longest prefix first, ties alphabetical for determinism
        entries.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        SectorMap { entries }
    }

    pub fn sector_of(&self, industry: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(prefix, _)| industry.starts_with(prefix.as_str()))
            .map(|(_, sector)| sector.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

/// One minimum-wage regulation interval. An open `valid_to` means the
/// regulation is still in force.
#[derive(Debug, Clone, PartialEq)]
pub struct MinwageEntry {
    pub sector: String,
    pub territory: Territory,
    pub valid_from: NaiveDate,
    pub valid_to: Option<NaiveDate>,
    pub hourly_wage: f64,
}

#[derive(Debug, Clone, Default)]
pub struct MinwageSchedule {
    pub entries: Vec<MinwageEntry>,
}

impl MinwageSchedule {
    pub fn new(entries: Vec<MinwageEntry>) -> Self {
        MinwageSchedule { entries }
    }

    /// Hourly minimum in force for a sector and territory on a date; gaps
    /// mean no regulation.
    pub fn rate_on(&self, sector: &str, territory: Territory, date: NaiveDate) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| {
                e.sector == sector
                    && e.territory == territory
                    && e.valid_from <= date
                    && e.valid_to.map_or(true, |to| date <= to)
            })
            .map(|e| e.hourly_wage)
    }

    /// First year a regulation takes effect for (sector, territory),
    /// falling back to the sector-wide earliest year.
    pub fn first_regulated_year(&self, sector: &str, territory: Territory) -> Option<i32> {
        use chrono::Datelike;
        let territory_min = self
            .entries
            .iter()
            .filter(|e| e.sector == sector && e.territory == territory)
            .map(|e| e.valid_from.year())
            .min();
        territory_min.or_else(|| {
            self.entries
                .iter()
                .filter(|e| e.sector == sector)
                .map(|e| e.valid_from.year())
                .min()
        })
    }
}

/// Sector-by-territory-by-year controls plus optional establishment-level
/// wage premia.
#[derive(Debug, Clone, Default)]
pub struct Controls {
    pub sector: BTreeMap<(String, Territory, i32), (f64, f64)>,
    pub akm: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct PanelOptions {
    pub territory_rule: TerritoryRule,
    /// Territory whose minimum wage applies to Berlin establishments when
    /// no explicit Berlin schedule entry exists for the sector.
    pub berlin_default: Territory,
    pub berlin_by_sector: BTreeMap<String, Territory>,
    pub days_per_week: f64,
    pub hours_per_week: f64,
}

impl Default for PanelOptions {
    fn default() -> Self {
        PanelOptions {
            territory_rule: TerritoryRule::default(),
            berlin_default: Territory::West,
            berlin_by_sector: BTreeMap::new(),
            days_per_week: DEFAULT_DAYS_PER_WEEK,
            hours_per_week: DEFAULT_HOURS_PER_WEEK,
        }
    }
}

/// Daily-to-hourly wage conversion: a daily wage covers the whole calendar
/// week, which is then spread over the weekly working hours.
pub fn hourly_from_daily(daily: f64, days_per_week: f64, hours_per_week: f64) -> f64 {
    daily * days_per_week / hours_per_week
}

/// Minimum wage relative to the median hourly wage (default 7-day,
/// 40-hour conversion).
pub fn kaitz_index(minwage_hourly: f64, median_daily_wage: f64) -> Result<f64> {
    kaitz_index_with(
        minwage_hourly,
        median_daily_wage,
        DEFAULT_DAYS_PER_WEEK,
        DEFAULT_HOURS_PER_WEEK,
    )
}

pub fn kaitz_index_with(
    minwage_hourly: f64,
    median_daily_wage: f64,
    days_per_week: f64,
    hours_per_week: f64,
) -> Result<f64> {
    if !(minwage_hourly > 0.0) || !(median_daily_wage > 0.0) {
        return Err(Error::domain(
            "Kaitz index requires positive minimum wage and median wage",
        ));
    }
    Ok(minwage_hourly / hourly_from_daily(median_daily_wage, days_per_week, hours_per_week))
}

/// Kaitz quintile group (0-based, lowest bindingness first).
pub fn kaitz_quintile(kaitz: f64, cuts: &[f64; 4]) -> usize {
    cuts.iter().position(|&c| kaitz <= c).unwrap_or(4)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstabRow {
    pub estab_id: String,
    pub year: i32,
    /// Truncated industry code of the establishment's market.
    pub market_industry: String,
    pub zone: String,
    pub sector: String,
    pub territory: Territory,
    pub mean_wage: Option<f64>,
    pub p25_wage: Option<f64>,
    pub p50_wage: Option<f64>,
    pub p75_wage: Option<f64>,
    pub emp_ft: u32,
    pub emp_pt: u32,
    pub emp_marginal: u32,
    pub emp_overall: u32,
    pub closure: bool,
    pub hhi_avg: Option<f64>,
    pub hhi_predetermined: Option<f64>,
    pub hhi_current: Option<f64>,
    pub kaitz_avg: Option<f64>,
    /// Hourly minimum wage in force on June 30, absent when unregulated.
    pub minwage: Option<f64>,
    /// Implicit minimum wage: 5th percentile of sector-territory hourly
    /// wages in the year before the sector's first regulation.
    pub implicit_minwage: Option<f64>,
    pub log_sector_employment: Option<f64>,
    pub cba_share: Option<f64>,
    pub akm_premium: Option<f64>,
}

impl EstabRow {
    pub fn market_key(&self) -> MarketKey {
        MarketKey {
            industry: self.market_industry.clone(),
            zone: self.zone.clone(),
            year: self.year,
        }
    }

    pub fn market_id(&self) -> String {
        format!("{}|{}", self.market_industry, self.zone)
    }
}

#[derive(Debug, Clone, Default)]
pub struct EstabSkipReport {
    /// Establishments excluded because no sector prefix matched.
    pub no_sector_estabs: usize,
    pub no_sector_rows: usize,
}

#[derive(Debug, Clone)]
pub struct EstabPanel {
    pub rows: Vec<EstabRow>,
    pub skipped: EstabSkipReport,
}

/// Lower-interpolation percentile of a sorted slice.
fn percentile_lower(sorted: &[f64], q: f64) -> f64 {
    let target = q * sorted.len() as f64;
    let mut cum = 0.0;
    for &v in sorted {
        cum += 1.0;
        if cum >= target {
            return v;
        }
    }
    *sorted.last().unwrap()
}

/// Most frequent value; ties go to the lexicographically smallest.
fn modal<'a>(values: impl Iterator<Item = &'a str>) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(a.0)))
        .map(|(v, _)| v.to_owned())
        .unwrap_or_default()
}

pub fn june_30(year: i32) -> NaiveDate {
    NaiveDate::from_ymd_opt(year, 6, 30).expect("June 30 exists in every year")
}

/// Build the establishment-year panel from main-job records.
///
/// `market_panel` supplies the market HHI joins and must have been built
/// with the same delineation. Establishments whose industry maps to no
/// sector are excluded and counted in the skip report.
pub fn build_estab_panel(
    records: &[SnapshotRecord],
    delineation: &Delineation,
    market_panel: &MarketPanel,
    sector_map: &SectorMap,
    schedule: &MinwageSchedule,
    controls: Option<&Controls>,
    opts: &PanelOptions,
) -> Result<EstabPanel> {
    let jobs = main_jobs(records);
    let digits = market_panel.industry_digits;

    // records per establishment-year
    struct Cell<'a> {
        ft_wages: Vec<f64>,
        emp_ft: u32,
        emp_pt: u32,
        emp_marginal: u32,
        industries: Vec<&'a str>,
        regions: Vec<&'a str>,
    }
    let mut cells: BTreeMap<(&str, i32), Cell> = BTreeMap::new();
    for job in &jobs {
        let cell = cells
            .entry((job.estab_id.as_str(), job.year))
            .or_insert_with(|| Cell {
                ft_wages: Vec::new(),
                emp_ft: 0,
                emp_pt: 0,
                emp_marginal: 0,
                industries: Vec::new(),
                regions: Vec::new(),
            });
        match job.contract {
            Contract::RegularFt => {
                cell.emp_ft += 1;
                if let Some(w) = job.daily_wage {
                    cell.ft_wages.push(w);
                }
            }
            Contract::RegularPt => cell.emp_pt += 1,
            Contract::Marginal => cell.emp_marginal += 1,
            Contract::Apprentice => unreachable!("main_jobs excludes apprentices"),
        }
        cell.industries.push(&job.industry);
        cell.regions.push(&job.region);
    }

    let mut last_year: HashMap<&str, i32> = HashMap::new();
    for &(estab, year) in cells.keys() {
        last_year
            .entry(estab)
            .and_modify(|y| *y = (*y).max(year))
            .or_insert(year);
    }

    let hhi_series = market_panel.hhi_series();
    let hhi_lookup: BTreeMap<(&str, &str), &BTreeMap<i32, f64>> = hhi_series
        .iter()
        .map(|((i, z), s)| ((i.as_str(), z.as_str()), s))
        .collect();
    let mut skipped = EstabSkipReport::default();
    let mut skipped_estabs: BTreeSet<&str> = BTreeSet::new();

    // first pass: per-row facts
    struct Draft {
        row: EstabRow,
        effective_territory: Territory,
    }
    let mut drafts: Vec<Draft> = Vec::with_capacity(cells.len());
    for ((estab_id, year), cell) in &cells {
        let industry = modal(cell.industries.iter().copied());
        let region = modal(cell.regions.iter().copied());
        let Some(sector) = sector_map.sector_of(&industry) else {
            skipped.no_sector_rows += 1;
            skipped_estabs.insert(estab_id);
            continue;
        };
        let territory = opts.territory_rule.classify(&region);
        let effective_territory = if territory == Territory::Berlin {
            opts.berlin_by_sector
                .get(sector)
                .copied()
                .unwrap_or(opts.berlin_default)
        } else {
            territory
        };

        let mut ft_wages = cell.ft_wages.clone();
        ft_wages.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (mean_wage, p25, p50, p75) = if ft_wages.is_empty() {
            (None, None, None, None)
        } else {
            let mean = ft_wages.iter().sum::<f64>() / ft_wages.len() as f64;
            (
                Some(mean),
                Some(percentile_lower(&ft_wages, 0.25)),
                Some(percentile_lower(&ft_wages, 0.50)),
                Some(percentile_lower(&ft_wages, 0.75)),
            )
        };

        let minwage = schedule.rate_on(sector, effective_territory, june_30(*year));
        let zone = delineation.zone_of(&region)?.to_owned();
        let market_industry = truncate_industry(&industry, digits).to_owned();
        let hhi_current = hhi_lookup
            .get(&(market_industry.as_str(), zone.as_str()))
            .and_then(|series| series.get(year))
            .copied();

        let (log_sector_employment, cba_share) = match controls {
            Some(c) => match c.sector.get(&(sector.to_owned(), territory, *year)) {
                Some(&(log_emp, cba)) => (Some(log_emp), Some(cba)),
                None => (None, None),
            },
            None => (None, None),
        };
        let akm_premium = controls.and_then(|c| c.akm.get(*estab_id).copied());

        drafts.push(Draft {
            row: EstabRow {
                estab_id: (*estab_id).to_owned(),
                year: *year,
                market_industry,
                zone,
                sector: sector.to_owned(),
                territory,
                mean_wage,
                p25_wage: p25,
                p50_wage: p50,
                p75_wage: p75,
                emp_ft: cell.emp_ft,
                emp_pt: cell.emp_pt,
                emp_marginal: cell.emp_marginal,
                emp_overall: cell.emp_ft + cell.emp_pt + cell.emp_marginal,
                closure: last_year[estab_id] == *year,
                hhi_avg: None,
                hhi_predetermined: None,
                hhi_current,
                kaitz_avg: None,
                minwage,
                implicit_minwage: None,
                log_sector_employment,
                cba_share,
                akm_premium,
            },
            effective_territory,
        });
    }
    skipped.no_sector_estabs = skipped_estabs.len();

    // implicit minimum wages: 5th percentile of hourly wages per
    // (sector, effective territory) in the year before first regulation
    let mut pre_intro_wages: BTreeMap<(String, Territory), Vec<f64>> = BTreeMap::new();
    {
        let mut estab_info: HashMap<&str, (&str, Territory)> = HashMap::new();
        for d in &drafts {
            estab_info.insert(&d.row.estab_id, (&d.row.sector, d.effective_territory));
        }
        for job in &jobs {
            if job.contract != Contract::RegularFt {
                continue;
            }
            let Some(wage) = job.daily_wage else { continue };
            let Some(&(sector, terr)) = estab_info.get(job.estab_id.as_str()) else {
                continue;
            };
            let Some(t0) = schedule.first_regulated_year(sector, terr) else {
                continue;
            };
            if job.year == t0 - 1 {
                pre_intro_wages
                    .entry((sector.to_owned(), terr))
                    .or_default()
                    .push(hourly_from_daily(wage, opts.days_per_week, opts.hours_per_week));
            }
        }
    }
    let implicit: BTreeMap<(String, Territory), f64> = pre_intro_wages
        .into_iter()
        .map(|(key, mut wages)| {
            wages.sort_by(|a, b| a.partial_cmp(b).unwrap());
            (key, percentile_lower(&wages, 0.05))
        })
        .collect();

    // second pass: per-establishment aggregates over years
    let mut per_estab: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, d) in drafts.iter().enumerate() {
        per_estab.entry(&d.row.estab_id).or_default().push(i);
    }
    let mut hhi_avg_by_idx: Vec<Option<f64>> = vec![None; drafts.len()];
    let mut hhi_pre_by_idx: Vec<Option<f64>> = vec![None; drafts.len()];
    let mut kaitz_by_idx: Vec<Option<f64>> = vec![None; drafts.len()];
    for indices in per_estab.values() {
        let hhis: Vec<f64> = indices
            .iter()
            .filter_map(|&i| drafts[i].row.hhi_current)
            .collect();
        let hhi_avg = if hhis.is_empty() {
            None
        } else {
            Some(hhis.iter().sum::<f64>() / hhis.len() as f64)
        };

        let first = &drafts[indices[0]];
        let series = hhi_lookup
            .get(&(first.row.market_industry.as_str(), first.row.zone.as_str()))
            .copied();
        let hhi_pre = series.and_then(|series| {
            let target = schedule
                .first_regulated_year(&first.row.sector, first.effective_territory)
                .map(|t0| t0 - 1);
            target
                .and_then(|t| series.get(&t).copied())
                .or_else(|| series.values().next().copied())
        });

        let kaitzes: Vec<f64> = indices
            .iter()
            .filter_map(|&i| {
                let row = &drafts[i].row;
                match (row.minwage, row.p50_wage) {
                    (Some(mw), Some(p50)) if p50 > 0.0 => kaitz_index_with(
                        mw,
                        p50,
                        opts.days_per_week,
                        opts.hours_per_week,
                    )
                    .ok(),
                    _ => None,
                }
            })
            .collect();
        let kaitz_avg = if kaitzes.is_empty() {
            None
        } else {
            Some(kaitzes.iter().sum::<f64>() / kaitzes.len() as f64)
        };

        for &i in indices {
            hhi_avg_by_idx[i] = hhi_avg;
            hhi_pre_by_idx[i] = hhi_pre;
            kaitz_by_idx[i] = kaitz_avg;
        }
    }

    let mut rows: Vec<EstabRow> = Vec::with_capacity(drafts.len());
    for (i, mut d) in drafts.into_iter().enumerate() {
        d.row.hhi_avg = hhi_avg_by_idx[i];
        d.row.hhi_predetermined = hhi_pre_by_idx[i];
        d.row.kaitz_avg = kaitz_by_idx[i];
        d.row.implicit_minwage = implicit
            .get(&(d.row.sector.clone(), d.effective_territory))
            .copied();
        rows.push(d.row);
    }
    rows.sort_by(|a, b| (&a.estab_id, a.year).cmp(&(&b.estab_id, b.year)));

    Ok(EstabPanel { rows, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::market::{build_market_panel, ObjectKind};

    fn rec(
        worker: &str,
        estab: &str,
        year: i32,
        wage: f64,
        contract: Contract,
    ) -> SnapshotRecord {
        SnapshotRecord {
            worker_id: worker.into(),
            estab_id: estab.into(),
            industry: "41201".into(),
            region: "09162".into(),
            year,
            daily_wage: Some(wage),
            contract,
        }
    }

    fn setup(records: &[SnapshotRecord], schedule: MinwageSchedule) -> EstabPanel {
        let delineation = Delineation::identity(["09162".to_owned()]);
        let market = build_market_panel(records, &delineation, 4, ObjectKind::Employment).unwrap();
        let sectors = SectorMap::new([("412".to_owned(), "construction".to_owned())]);
        build_estab_panel(
            records,
            &delineation,
            &market,
            &sectors,
            &schedule,
            None,
            &PanelOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn wage_moments_over_ft_workers() {
        let records = vec![
            rec("w1", "e1", 2005, 80.0, Contract::RegularFt),
            rec("w2", "e1", 2005, 100.0, Contract::RegularFt),
            rec("w3", "e1", 2005, 120.0, Contract::RegularFt),
            rec("w4", "e1", 2005, 50.0, Contract::RegularPt),
            rec("w5", "e1", 2005, 20.0, Contract::Marginal),
        ];
        let panel = setup(&records, MinwageSchedule::default());
        assert_eq!(panel.rows.len(), 1);
        let row = &panel.rows[0];
        assert_eq!(row.mean_wage, Some(100.0));
        assert_eq!(row.p50_wage, Some(100.0));
        assert_eq!(row.p25_wage, Some(80.0));
        assert_eq!(row.p75_wage, Some(120.0));
        assert_eq!(
            (row.emp_ft, row.emp_pt, row.emp_marginal, row.emp_overall),
            (3, 1, 1, 5)
        );
        assert_eq!(row.sector, "construction");
        assert_eq!(row.hhi_current, Some(1.0));
    }

    #[test]
    fn closure_only_in_last_observed_year() {
        let records = vec![
            rec("w1", "e1", 2008, 90.0, Contract::RegularFt),
            rec("w1", "e1", 2009, 91.0, Contract::RegularFt),
            rec("w1", "e1", 2010, 92.0, Contract::RegularFt),
            // another establishment keeps the data alive through 2017
            rec("w2", "e2", 2017, 80.0, Contract::RegularFt),
        ];
        let panel = setup(&records, MinwageSchedule::default());
        let e1: Vec<&EstabRow> = panel.rows.iter().filter(|r| r.estab_id == "e1").collect();
        assert_eq!(
            e1.iter().map(|r| (r.year, r.closure)).collect::<Vec<_>>(),
            vec![(2008, false), (2009, false), (2010, true)]
        );
    }

    #[test]
    fn predetermined_hhi_uses_year_before_regulation() {
        // e1 observed 2003-2007 with a second firm entering 2005, so the
        // market HHI changes over time
        let mut records = Vec::new();
        for year in 2003..=2007 {
            records.push(rec("w1", "e1", year, 90.0, Contract::RegularFt));
            records.push(rec("w2", "e1", year, 95.0, Contract::RegularFt));
            if year >= 2005 {
                records.push(rec("w3", "e2", year, 85.0, Contract::RegularFt));
            }
        }
        let schedule = MinwageSchedule::new(vec![MinwageEntry {
            sector: "construction".into(),
            territory: Territory::West,
            valid_from: NaiveDate::from_ymd_opt(2005, 1, 1).unwrap(),
            valid_to: None,
            hourly_wage: 8.5,
        }]);
        let panel = setup(&records, schedule);
        let row = panel
            .rows
            .iter()
            .find(|r| r.estab_id == "e1" && r.year == 2006)
            .unwrap();
        // 2004 market HHI is 1.0 (single firm before e2 entered)
        assert_eq!(row.hhi_predetermined, Some(1.0));
        assert!(row.hhi_current.unwrap() < 1.0);
        // fallback when the pre-regulation year is unavailable: with the
        // regulation starting 2003, the earliest year (2003) is used
        let early = MinwageSchedule::new(vec![MinwageEntry {
            sector: "construction".into(),
            territory: Territory::West,
            valid_from: NaiveDate::from_ymd_opt(2003, 1, 1).unwrap(),
            valid_to: None,
            hourly_wage: 8.5,
        }]);
        let panel = setup(&records, early);
        let row = panel
            .rows
            .iter()
            .find(|r| r.estab_id == "e1" && r.year == 2006)
            .unwrap();
        assert_eq!(row.hhi_predetermined, Some(1.0));
    }

    #[test]
    fn minwage_joined_by_june_30() {
        let records = vec![
            rec("w1", "e1", 2004, 90.0, Contract::RegularFt),
            rec("w1", "e1", 2005, 90.0, Contract::RegularFt),
        ];
        let schedule = MinwageSchedule::new(vec![MinwageEntry {
            sector: "construction".into(),
            territory: Territory::West,
            valid_from: NaiveDate::from_ymd_opt(2004, 7, 1).unwrap(),
            valid_to: None,
            hourly_wage: 8.5,
        }]);
        let panel = setup(&records, schedule);
        // in force on 2005-06-30 but not 2004-06-30
        assert_eq!(panel.rows[0].minwage, None);
        assert_eq!(panel.rows[1].minwage, Some(8.5));

        // Kaitz: 8.5 / (90 * 7 / 40) = 8.5 / 15.75
        let expected = 8.5 / 15.75;
        assert!((panel.rows[1].kaitz_avg.unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn unmapped_sector_is_skipped_and_counted() {
        let records = vec![SnapshotRecord {
            industry: "99999".into(),
            ..rec("w1", "e1", 2005, 90.0, Contract::RegularFt)
        }];
        let panel = setup(&records, MinwageSchedule::default());
        assert!(panel.rows.is_empty());
        assert_eq!(panel.skipped.no_sector_estabs, 1);
        assert_eq!(panel.skipped.no_sector_rows, 1);
    }

    #[test]
    fn kaitz_examples() {
        let k = kaitz_index(8.5, 85.7142857).unwrap();
        assert!((k - 0.5667).abs() < 1e-4);
        // hourly = daily * 7 / 40 = 15.0
        assert!((hourly_from_daily(85.7142857, 7.0, 40.0) - 15.0).abs() < 1e-6);
        // minwage equal to the computed hourly wage
        assert!((kaitz_index(15.0, 85.7142857).unwrap() - 1.0).abs() < 1e-6);
        assert!(kaitz_index(0.0, 85.0).is_err());
        assert!(kaitz_index(8.5, 0.0).is_err());
    }

    #[test]
    fn kaitz_quintiles_use_paper_cuts() {
        assert_eq!(kaitz_quintile(0.5, &KAITZ_QUINTILE_CUTS), 0);
        assert_eq!(kaitz_quintile(0.68, &KAITZ_QUINTILE_CUTS), 0);
        assert_eq!(kaitz_quintile(0.70, &KAITZ_QUINTILE_CUTS), 1);
        assert_eq!(kaitz_quintile(0.85, &KAITZ_QUINTILE_CUTS), 2);
        assert_eq!(kaitz_quintile(1.0, &KAITZ_QUINTILE_CUTS), 3);
        assert_eq!(kaitz_quintile(1.2, &KAITZ_QUINTILE_CUTS), 4);
    }

    #[test]
    fn territory_rule_defaults() {
        let rule = TerritoryRule::default();
        assert_eq!(rule.classify("09162"), Territory::West);
        assert_eq!(rule.classify("11000"), Territory::Berlin);
        assert_eq!(rule.classify("14612"), Territory::East);
        let custom = TerritoryRule {
            overrides: vec![("301".into(), Territory::East)],
        };
        assert_eq!(custom.classify("30100"), Territory::East);
        assert_eq!(custom.classify("30200"), Territory::West);
    }

    #[test]
    fn sector_map_longest_prefix_wins() {
        let map = SectorMap::new([
            ("41".to_owned(), "broad".to_owned()),
            ("4120".to_owned(), "narrow".to_owned()),
        ]);
        assert_eq!(map.sector_of("41201"), Some("narrow"));
        assert_eq!(map.sector_of("41900"), Some("broad"));
        assert_eq!(map.sector_of("55100"), None);
    }
}
