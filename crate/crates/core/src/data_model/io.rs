//! Readers and writers for the pipeline's CSV interfaces.
//!
//! Numeric fields use Rust's shortest round-trip float formatting, so
//! writing and re-reading a panel is lossless and re-running a pipeline
//! stage with identical inputs is byte-identical.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::error::{Error, Result};

use super::estab::{
    Controls, EstabPanel, EstabRow, EstabSkipReport, MinwageEntry, MinwageSchedule,
    SectorMap, Territory,
};
use super::market::{Delineation, MarketCell, MarketKey, MarketPanel, MarketSkipReport, ObjectKind};
use super::records::{SnapshotRecord, SNAPSHOT_HEADER};

pub const MARKET_PANEL_HEADER: &str = "industry,zone,year,estab_id,object_kind,count,share";
pub const ESTAB_PANEL_HEADER: &str = "estab_id,year,market_industry,zone,sector,territory,\
mean_wage,p25_wage,p50_wage,p75_wage,emp_ft,emp_pt,emp_marginal,emp_overall,closure,\
hhi_avg,hhi_predetermined,hhi_current,kaitz_avg,minwage,implicit_minwage,\
log_sector_employment,cba_share,akm_premium";

fn open(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

fn check_header(rdr: &mut csv::Reader<std::fs::File>, expected: &[&str]) -> Result<()> {
    let headers = rdr.headers()?.clone();
    if headers.len() != expected.len()
        || headers.iter().zip(expected).any(|(got, want)| got != *want)
    {
        return Err(Error::Parse {
            row: 0,
            column: "header".into(),
            message: format!(
                "expected `{}`, found `{}`",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(())
}

fn parse_field<T: FromStr>(value: &str, row: usize, column: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        row,
        column: column.into(),
        message: format!("invalid value `{value}`"),
    })
}

fn parse_opt_f64(value: &str, row: usize, column: &str) -> Result<Option<f64>> {
    if value.is_empty() {
        Ok(None)
    } else {
        parse_field(value, row, column).map(Some)
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_snapshots<W: Write>(mut w: W, records: &[SnapshotRecord]) -> Result<()> {
    writeln!(w, "{}", SNAPSHOT_HEADER.join(","))?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.worker_id,
            r.estab_id,
            r.industry,
            r.region,
            r.year,
            fmt_opt(r.daily_wage),
            r.contract.as_str(),
        )?;
    }
    Ok(())
}

pub fn write_sectors<W: Write>(mut w: W, pairs: &[(String, String)]) -> Result<()> {
    writeln!(w, "industry_prefix,sector")?;
    for (prefix, sector) in pairs {
        writeln!(w, "{prefix},{sector}")?;
    }
    Ok(())
}

pub fn write_minwage_schedule<W: Write>(mut w: W, schedule: &MinwageSchedule) -> Result<()> {
    writeln!(w, "sector,territory,valid_from,valid_to,hourly_wage")?;
    for e in &schedule.entries {
        writeln!(
            w,
            "{},{},{},{},{}",
            e.sector,
            e.territory.as_str(),
            e.valid_from,
            e.valid_to.map(|d| d.to_string()).unwrap_or_default(),
            e.hourly_wage,
        )?;
    }
    Ok(())
}

pub fn write_controls<W: Write>(mut w: W, controls: &Controls) -> Result<()> {
    writeln!(
        w,
        "sector,territory,year,log_employment,cba_share,estab_id,akm_premium"
    )?;
    for ((sector, territory, year), (log_emp, cba)) in &controls.sector {
        writeln!(w, "{sector},{},{year},{log_emp},{cba},,", territory.as_str())?;
    }
    for (estab, premium) in &controls.akm {
        writeln!(w, ",,,,,{estab},{premium}")?;
    }
    Ok(())
}

pub fn write_flows<W: Write>(mut w: W, edges: &[(String, String, f64)]) -> Result<()> {
    writeln!(w, "origin,destination,commuters")?;
    for (origin, destination, commuters) in edges {
        writeln!(w, "{origin},{destination},{commuters}")?;
    }
    Ok(())
}

/// `industry_prefix,sector` with longest-prefix-match semantics.
pub fn read_sector_map(path: &Path) -> Result<SectorMap> {
    let mut rdr = open(path)?;
    check_header(&mut rdr, &["industry_prefix", "sector"])?;
    let mut entries = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let prefix = rec.get(0).unwrap_or("").to_owned();
        let sector = rec.get(1).unwrap_or("").to_owned();
        if prefix.is_empty() || sector.is_empty() {
            return Err(Error::Parse {
                row: i + 1,
                column: "industry_prefix".into(),
                message: "empty prefix or sector".into(),
            });
        }
        entries.push((prefix, sector));
    }
    Ok(SectorMap::new(entries))
}

/// `sector,territory,valid_from,valid_to,hourly_wage`; empty `valid_to`
/// means the regulation is still in force.
pub fn read_minwage_schedule(path: &Path) -> Result<MinwageSchedule> {
    let mut rdr = open(path)?;
    check_header(
        &mut rdr,
        &["sector", "territory", "valid_from", "valid_to", "hourly_wage"],
    )?;
    let mut entries = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let territory = Territory::from_str(field(1)).map_err(|e| Error::Parse {
            row,
            column: "territory".into(),
            message: e.to_string(),
        })?;
        let valid_from = NaiveDate::parse_from_str(field(2), "%Y-%m-%d").map_err(|_| {
            Error::Parse {
                row,
                column: "valid_from".into(),
                message: format!("invalid ISO date `{}`", field(2)),
            }
        })?;
        let valid_to = if field(3).is_empty() {
            None
        } else {
            Some(
                NaiveDate::parse_from_str(field(3), "%Y-%m-%d").map_err(|_| Error::Parse {
                    row,
                    column: "valid_to".into(),
                    message: format!("invalid ISO date `{}`", field(3)),
                })?,
            )
        };
        entries.push(MinwageEntry {
            sector: field(0).to_owned(),
            territory,
            valid_from,
            valid_to,
            hourly_wage: parse_field(field(4), row, "hourly_wage")?,
        });
    }
    Ok(MinwageSchedule::new(entries))
}

/// `sector,territory,year,log_employment,cba_share,estab_id,akm_premium`.
/// Rows with a non-empty `estab_id` carry establishment AKM premia and
/// leave the sector fields empty; all other rows are sector controls.
pub fn read_controls(path: &Path) -> Result<Controls> {
    let mut rdr = open(path)?;
    check_header(
        &mut rdr,
        &[
            "sector",
            "territory",
            "year",
            "log_employment",
            "cba_share",
            "estab_id",
            "akm_premium",
        ],
    )?;
    let mut controls = Controls::default();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        if !field(5).is_empty() {
            controls.akm.insert(
                field(5).to_owned(),
                parse_field(field(6), row, "akm_premium")?,
            );
        } else {
            let territory = Territory::from_str(field(1)).map_err(|e| Error::Parse {
                row,
                column: "territory".into(),
                message: e.to_string(),
            })?;
            controls.sector.insert(
                (field(0).to_owned(), territory, parse_field(field(2), row, "year")?),
                (
                    parse_field(field(3), row, "log_employment")?,
                    parse_field(field(4), row, "cba_share")?,
                ),
            );
        }
    }
    Ok(controls)
}

/// `origin,destination,commuters` edges.
pub fn read_flows(path: &Path) -> Result<Vec<(String, String, f64)>> {
    let mut rdr = open(path)?;
    check_header(&mut rdr, &["origin", "destination", "commuters"])?;
    let mut edges = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        edges.push((
            field(0).to_owned(),
            field(1).to_owned(),
            parse_field(field(2), i + 1, "commuters")?,
        ));
    }
    Ok(edges)
}

/// `district,zone`.
pub fn read_delineation(path: &Path) -> Result<Delineation> {
    let mut rdr = open(path)?;
    check_header(&mut rdr, &["district", "zone"])?;
    let mut pairs = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        pairs.push((
            rec.get(0).unwrap_or("").to_owned(),
            rec.get(1).unwrap_or("").to_owned(),
        ));
    }
    Ok(Delineation::new(pairs))
}

pub fn write_delineation<W: Write>(mut w: W, delineation: &Delineation) -> Result<()> {
    writeln!(w, "district,zone")?;
    for (district, zone) in delineation.pairs() {
        writeln!(w, "{district},{zone}")?;
    }
    Ok(())
}

pub fn write_market_panel<W: Write>(mut w: W, panel: &MarketPanel) -> Result<()> {
    writeln!(w, "{MARKET_PANEL_HEADER}")?;
    let kind = panel.object_kind.as_str();
    for (key, cell) in &panel.cells {
        for (estab, count) in &cell.firms {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                key.industry,
                key.zone,
                key.year,
                estab,
                kind,
                count,
                count / cell.total
            )?;
        }
    }
    Ok(())
}

pub fn read_market_panel(path: &Path) -> Result<MarketPanel> {
    let mut rdr = open(path)?;
    check_header(
        &mut rdr,
        &["industry", "zone", "year", "estab_id", "object_kind", "count", "share"],
    )?;
    let mut cells: BTreeMap<MarketKey, Vec<(String, f64)>> = BTreeMap::new();
    let mut object_kind: Option<ObjectKind> = None;
    let mut digits = 0usize;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let kind = ObjectKind::from_str(field(4)).map_err(|e| Error::Parse {
            row,
            column: "object_kind".into(),
            message: e.to_string(),
        })?;
        match object_kind {
            None => object_kind = Some(kind),
            Some(k) if k == kind => {}
            Some(k) => {
                return Err(Error::Parse {
                    row,
                    column: "object_kind".into(),
                    message: format!("mixed object kinds `{}` and `{}`", k.as_str(), kind.as_str()),
                })
            }
        }
        digits = digits.max(field(0).len());
        let key = MarketKey {
            industry: field(0).to_owned(),
            zone: field(1).to_owned(),
            year: parse_field(field(2), row, "year")?,
        };
        cells
            .entry(key)
            .or_default()
            .push((field(3).to_owned(), parse_field(field(5), row, "count")?));
    }
    let cells = cells
        .into_iter()
        .map(|(key, mut firms)| {
            firms.sort_by(|a, b| a.0.cmp(&b.0));
            let total = firms.iter().map(|(_, c)| c).sum();
            (key, MarketCell { firms, total })
        })
        .collect();
    Ok(MarketPanel {
        object_kind: object_kind
            .ok_or_else(|| Error::domain("market panel file has no rows"))?,
        industry_digits: digits.min(5) as u8,
        cells,
        skipped: MarketSkipReport::default(),
    })
}

pub fn write_estab_panel<W: Write>(mut w: W, panel: &EstabPanel) -> Result<()> {
    writeln!(w, "{ESTAB_PANEL_HEADER}")?;
    for r in &panel.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.estab_id,
            r.year,
            r.market_industry,
            r.zone,
            r.sector,
            r.territory.as_str(),
            fmt_opt(r.mean_wage),
            fmt_opt(r.p25_wage),
            fmt_opt(r.p50_wage),
            fmt_opt(r.p75_wage),
            r.emp_ft,
            r.emp_pt,
            r.emp_marginal,
            r.emp_overall,
            r.closure,
            fmt_opt(r.hhi_avg),
            fmt_opt(r.hhi_predetermined),
            fmt_opt(r.hhi_current),
            fmt_opt(r.kaitz_avg),
            fmt_opt(r.minwage),
            fmt_opt(r.implicit_minwage),
            fmt_opt(r.log_sector_employment),
            fmt_opt(r.cba_share),
            fmt_opt(r.akm_premium),
        )?;
    }
    Ok(())
}

pub fn read_estab_panel(path: &Path) -> Result<EstabPanel> {
    let file = std::fs::File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    read_estab_panel_reader(file)
}

pub fn read_estab_panel_reader<R: Read>(reader: R) -> Result<EstabPanel> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let expected: Vec<&str> = ESTAB_PANEL_HEADER.split(',').collect();
    let headers = rdr.headers()?.clone();
    if headers.len() != expected.len()
        || headers.iter().zip(&expected).any(|(got, want)| got != *want)
    {
        return Err(Error::Parse {
            row: 0,
            column: "header".into(),
            message: format!("expected `{ESTAB_PANEL_HEADER}`"),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        rows.push(EstabRow {
            estab_id: field(0).to_owned(),
            year: parse_field(field(1), row, "year")?,
            market_industry: field(2).to_owned(),
            zone: field(3).to_owned(),
            sector: field(4).to_owned(),
            territory: Territory::from_str(field(5)).map_err(|e| Error::Parse {
                row,
                column: "territory".into(),
                message: e.to_string(),
            })?,
            mean_wage: parse_opt_f64(field(6), row, "mean_wage")?,
            p25_wage: parse_opt_f64(field(7), row, "p25_wage")?,
            p50_wage: parse_opt_f64(field(8), row, "p50_wage")?,
            p75_wage: parse_opt_f64(field(9), row, "p75_wage")?,
            emp_ft: parse_field(field(10), row, "emp_ft")?,
            emp_pt: parse_field(field(11), row, "emp_pt")?,
            emp_marginal: parse_field(field(12), row, "emp_marginal")?,
            emp_overall: parse_field(field(13), row, "emp_overall")?,
            closure: parse_field(field(14), row, "closure")?,
            hhi_avg: parse_opt_f64(field(15), row, "hhi_avg")?,
            hhi_predetermined: parse_opt_f64(field(16), row, "hhi_predetermined")?,
            hhi_current: parse_opt_f64(field(17), row, "hhi_current")?,
            kaitz_avg: parse_opt_f64(field(18), row, "kaitz_avg")?,
            minwage: parse_opt_f64(field(19), row, "minwage")?,
            implicit_minwage: parse_opt_f64(field(20), row, "implicit_minwage")?,
            log_sector_employment: parse_opt_f64(field(21), row, "log_sector_employment")?,
            cba_share: parse_opt_f64(field(22), row, "cba_share")?,
            akm_premium: parse_opt_f64(field(23), row, "akm_premium")?,
        });
    }
    Ok(EstabPanel {
        rows,
        skipped: EstabSkipReport::default(),
    })
}
