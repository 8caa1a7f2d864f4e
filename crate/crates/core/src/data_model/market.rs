//! Market-level aggregation: snapshot records to (industry, zone, year)
//! cells with firm-level object counts and shares.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::concentration::ShareVector;
use crate::error::{Error, Result};

use super::records::{main_jobs, SnapshotRecord};

/// One labor-market-year cell: a truncated industry code, a zone, a year.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarketKey {
    pub industry: String,
    pub zone: String,
    pub year: i32,
}

/// Time-invariant market id `industry x zone`, used for clustering.
impl MarketKey {
    pub fn market_id(&self) -> String {
        format!("{}|{}", self.industry, self.zone)
    }
}

/// District-to-zone assignment.
#[derive(Debug, Clone, Default)]
pub struct Delineation {
    map: BTreeMap<String, String>,
}

impl Delineation {
    pub fn new(pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        Delineation {
            map: pairs.into_iter().collect(),
        }
    }

    /// Every district is its own zone.
    pub fn identity(districts: impl IntoIterator<Item = String>) -> Self {
        Delineation {
            map: districts.into_iter().map(|d| (d.clone(), d)).collect(),
        }
    }

    pub fn zone_of(&self, district: &str) -> Result<&str> {
        self.map
            .get(district)
            .map(String::as_str)
            .ok_or_else(|| Error::domain(format!("district `{district}` not in delineation")))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(d, z)| (d.as_str(), z.as_str()))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Prefix-take truncation of an industry code.
pub fn truncate_industry(code: &str, digits: u8) -> &str {
    let d = digits as usize;
    if code.len() <= d {
        code
    } else {
        &code[..d]
    }
}

/// What a cell counts: employment stocks or yearly hires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectKind {
    Employment,
    Hires,
}

impl ObjectKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectKind::Employment => "employment",
            ObjectKind::Hires => "hires",
        }
    }
}

impl std::str::FromStr for ObjectKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "employment" => Ok(ObjectKind::Employment),
            "hires" => Ok(ObjectKind::Hires),
            other => Err(Error::domain(format!("unknown object kind `{other}`"))),
        }
    }
}

/// Firm-level object counts within one cell, sorted by establishment id.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketCell {
    pub firms: Vec<(String, f64)>,
    pub total: f64,
}

impl MarketCell {
    pub fn firm_count(&self) -> usize {
        self.firms.len()
    }

    pub fn shares(&self) -> Result<ShareVector> {
        ShareVector::from_counts(
            &self.firms.iter().map(|(_, c)| *c).collect::<Vec<_>>(),
        )
    }

    pub fn hhi(&self) -> f64 {
        self.firms
            .iter()
            .map(|(_, c)| {
                let s = c / self.total;
                s * s
            })
            .sum()
    }
}

#[derive(Debug, Clone, Default)]
pub struct MarketSkipReport {
    /// Years dropped from a hires panel because the preceding year is not
    /// in the data.
    pub hires_years_without_predecessor: Vec<i32>,
}

#[derive(Debug, Clone)]
pub struct MarketPanel {
    pub object_kind: ObjectKind,
    pub industry_digits: u8,
    pub cells: BTreeMap<MarketKey, MarketCell>,
    pub skipped: MarketSkipReport,
}

impl MarketPanel {
    pub fn hhi_of(&self, key: &MarketKey) -> Option<f64> {
        self.cells.get(key).map(MarketCell::hhi)
    }

    pub fn firm_count_of(&self, key: &MarketKey) -> Option<usize> {
        self.cells.get(key).map(MarketCell::firm_count)
    }

    /// Distinct zones appearing in the panel.
    pub fn zones(&self) -> BTreeSet<&str> {
        self.cells.keys().map(|k| k.zone.as_str()).collect()
    }

    /// Per-market HHI series keyed by (industry, zone).
    pub fn hhi_series(&self) -> BTreeMap<(String, String), BTreeMap<i32, f64>> {
        let mut out: BTreeMap<(String, String), BTreeMap<i32, f64>> = BTreeMap::new();
        for (key, cell) in &self.cells {
            out.entry((key.industry.clone(), key.zone.clone()))
                .or_default()
                .insert(key.year, cell.hhi());
        }
        out
    }
}

/// Aggregate main-job records into market cells. For `Employment` a worker
/// counts where they stand on June 30; for `Hires` only workers not at the
/// same establishment one year earlier count, and years with no predecessor
/// in the data are omitted.
pub fn build_market_panel(
    records: &[SnapshotRecord],
    delineation: &Delineation,
    industry_digits: u8,
    object_kind: ObjectKind,
) -> Result<MarketPanel> {
    if !matches!(industry_digits, 3..=5) {
        return Err(Error::domain(format!(
            "industry digits {industry_digits} must be 3, 4, or 5"
        )));
    }
    let jobs = main_jobs(records);
    let mut skipped = MarketSkipReport::default();

    let counted: Vec<&&SnapshotRecord> = match object_kind {
        ObjectKind::Employment => jobs.iter().collect(),
        ObjectKind::Hires => {
            let years: BTreeSet<i32> = jobs.iter().map(|r| r.year).collect();
            let mut at: HashMap<(&str, i32), &str> = HashMap::with_capacity(jobs.len());
            for job in &jobs {
                at.insert((job.worker_id.as_str(), job.year), job.estab_id.as_str());
            }
            skipped.hires_years_without_predecessor = years
                .iter()
                .filter(|&&y| !years.contains(&(y - 1)))
                .copied()
                .collect();
            jobs.iter()
                .filter(|r| {
                    years.contains(&(r.year - 1))
                        && at.get(&(r.worker_id.as_str(), r.year - 1))
                            != Some(&r.estab_id.as_str())
                })
                .collect()
        }
    };

    // group with borrowed keys; owned keys materialize once per cell
    let mut cells: BTreeMap<(&str, &str, i32), HashMap<&str, f64>> = BTreeMap::new();
    for rec in counted {
        let zone = delineation.zone_of(&rec.region)?;
        let key = (
            truncate_industry(&rec.industry, industry_digits),
            zone,
            rec.year,
        );
        *cells.entry(key).or_default().entry(&rec.estab_id).or_insert(0.0) += 1.0;
    }

    let cells = cells
        .into_iter()
        .map(|((industry, zone, year), firms)| {
            let mut firms: Vec<(String, f64)> = firms
                .into_iter()
                .map(|(id, c)| (id.to_owned(), c))
                .collect();
            firms.sort_by(|a, b| a.0.cmp(&b.0));
            let total = firms.iter().map(|(_, c)| c).sum();
            (
                MarketKey {
                    industry: industry.to_owned(),
                    zone: zone.to_owned(),
                    year,
                },
                MarketCell { firms, total },
            )
        })
        .collect();

    Ok(MarketPanel {
        object_kind,
        industry_digits,
        cells,
        skipped,
    })
}

/// Share of job switchers per market-year who move to a different market.
/// A switcher leaves establishment `e` in market `m` in year `t` and works
/// at another establishment in `t + 1`; the share is keyed by `(m, t)`.
/// Market-years with no switchers are absent.
pub fn outward_mobility(
    records: &[SnapshotRecord],
    delineation: &Delineation,
    industry_digits: u8,
) -> Result<BTreeMap<MarketKey, f64>> {
    let jobs = main_jobs(records);
    let mut by_worker_year: HashMap<(&str, i32), &SnapshotRecord> =
        HashMap::with_capacity(jobs.len());
    for job in &jobs {
        by_worker_year.insert((job.worker_id.as_str(), job.year), job);
    }

    let mut movers: BTreeMap<MarketKey, (f64, f64)> = BTreeMap::new();
    for job in &jobs {
        let Some(next) = by_worker_year.get(&(job.worker_id.as_str(), job.year + 1)) else {
            continue;
        };
        if next.estab_id == job.estab_id {
            continue;
        }
        let origin = MarketKey {
            industry: truncate_industry(&job.industry, industry_digits).to_owned(),
            zone: delineation.zone_of(&job.region)?.to_owned(),
            year: job.year,
        };
        let dest_market = (
            truncate_industry(&next.industry, industry_digits),
            delineation.zone_of(&next.region)?,
        );
        let entry = movers.entry(origin.clone()).or_insert((0.0, 0.0));
        if (origin.industry.as_str(), origin.zone.as_str()) == dest_market {
            entry.0 += 1.0; // stayer: new job within the same market
        } else {
            entry.1 += 1.0; // mover: new job in another market
        }
    }

    Ok(movers
        .into_iter()
        .map(|(key, (stay, mv))| (key, mv / (stay + mv)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::records::Contract;

    fn rec(worker: &str, estab: &str, industry: &str, region: &str, year: i32) -> SnapshotRecord {
        SnapshotRecord {
            worker_id: worker.into(),
            estab_id: estab.into(),
            industry: industry.into(),
            region: region.into(),
            year,
            daily_wage: Some(100.0),
            contract: Contract::RegularFt,
        }
    }

    fn ident() -> Delineation {
        Delineation::identity(["r1".to_owned(), "r2".to_owned()])
    }

    #[test]
    fn employment_shares_by_heads() {
        let records = vec![
            rec("w1", "e1", "41201", "r1", 2005),
            rec("w2", "e1", "41201", "r1", 2005),
            rec("w3", "e1", "41201", "r1", 2005),
            rec("w4", "e2", "41201", "r1", 2005),
        ];
        let panel =
            build_market_panel(&records, &ident(), 4, ObjectKind::Employment).unwrap();
        assert_eq!(panel.cells.len(), 1);
        let cell = panel.cells.values().next().unwrap();
        assert_eq!(cell.firm_count(), 2);
        assert_eq!(cell.firms, vec![("e1".into(), 3.0), ("e2".into(), 1.0)]);
        let shares = cell.shares().unwrap();
        assert_eq!(shares.as_slice(), &[0.75, 0.25]);
    }

    #[test]
    fn incumbent_is_not_a_hire() {
        let records = vec![
            rec("w1", "e1", "41201", "r1", 2004),
            rec("w1", "e1", "41201", "r1", 2005),
            rec("w2", "e1", "41201", "r1", 2005),
        ];
        let emp = build_market_panel(&records, &ident(), 4, ObjectKind::Employment).unwrap();
        let hires = build_market_panel(&records, &ident(), 4, ObjectKind::Hires).unwrap();

        let key = MarketKey {
            industry: "4120".into(),
            zone: "r1".into(),
            year: 2005,
        };
        assert_eq!(emp.cells[&key].total, 2.0);
        assert_eq!(hires.cells[&key].total, 1.0);
        assert_eq!(hires.cells[&key].firms, vec![("e1".into(), 1.0)]);
        // 2004 has no predecessor year in the data
        assert!(hires
            .cells
            .keys()
            .all(|k| k.year != 2004));
        assert_eq!(hires.skipped.hires_years_without_predecessor, vec![2004]);
    }

    #[test]
    fn single_firm_cell() {
        let records = vec![rec("w1", "e1", "41201", "r1", 2005)];
        let panel =
            build_market_panel(&records, &ident(), 4, ObjectKind::Employment).unwrap();
        let cell = panel.cells.values().next().unwrap();
        assert_eq!(cell.firm_count(), 1);
        assert_eq!(cell.shares().unwrap().as_slice(), &[1.0]);
        assert_eq!(cell.hhi(), 1.0);
    }

    #[test]
    fn unmapped_district_is_an_error() {
        let records = vec![rec("w1", "e1", "41201", "nowhere", 2005)];
        assert!(build_market_panel(&records, &ident(), 4, ObjectKind::Employment).is_err());
    }

    #[test]
    fn coarser_digits_union_finer_markets() {
        let records = vec![
            rec("w1", "e1", "41201", "r1", 2005),
            rec("w2", "e2", "41209", "r1", 2005),
            rec("w3", "e3", "41300", "r1", 2005),
        ];
        let p5 = build_market_panel(&records, &ident(), 5, ObjectKind::Employment).unwrap();
        let p4 = build_market_panel(&records, &ident(), 4, ObjectKind::Employment).unwrap();
        let total5: f64 = p5
            .cells
            .iter()
            .filter(|(k, _)| k.industry.starts_with("4120"))
            .map(|(_, c)| c.total)
            .sum();
        let key4 = MarketKey {
            industry: "4120".into(),
            zone: "r1".into(),
            year: 2005,
        };
        assert_eq!(p4.cells[&key4].total, total5);
    }

    #[test]
    fn outward_mobility_definition() {
        // market A (industry 41201, r1): three within-market switchers,
        // two cross-market movers
        let mut records = Vec::new();
        for (i, dest) in [
            ("e2", "41201", "r1"), // stayer
            ("e2", "41201", "r1"), // stayer
            ("e3", "41201", "r1"), // stayer
            ("e9", "41201", "r2"), // mover: other zone
            ("e9", "55100", "r1"), // mover: other industry
        ]
        .iter()
        .enumerate()
        {
            let w = format!("w{i}");
            records.push(rec(&w, "e1", "41201", "r1", 2005));
            records.push(rec(&w, dest.0, dest.1, dest.2, 2006));
        }
        let mobility = outward_mobility(&records, &ident(), 4).unwrap();
        let key = MarketKey {
            industry: "4120".into(),
            zone: "r1".into(),
            year: 2005,
        };
        assert!((mobility[&key] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn all_leavers_give_one_no_switchers_absent() {
        let records = vec![
            rec("w1", "e1", "41201", "r1", 2005),
            rec("w1", "e9", "55100", "r2", 2006),
        ];
        let mobility = outward_mobility(&records, &ident(), 4).unwrap();
        assert_eq!(mobility.len(), 1);
        assert_eq!(*mobility.values().next().unwrap(), 1.0);

        // staying at the same establishment is not a switch
        let records = vec![
            rec("w1", "e1", "41201", "r1", 2005),
            rec("w1", "e1", "41201", "r1", 2006),
        ];
        assert!(outward_mobility(&records, &ident(), 4).unwrap().is_empty());
    }
}
