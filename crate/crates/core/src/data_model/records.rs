//! Worker snapshot records and the CSV reader for them.
//!
//! One record is one worker-establishment-year employment spell valid on
//! the June-30 reference date. Aggregations work on main jobs only:
//! at most one record per worker and year, chosen by highest daily wage
//! with ties broken by the lexicographically smallest establishment id.
//! Apprentices are parsed and retained but excluded from every
//! aggregation.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

pub const SNAPSHOT_HEADER: [&str; 7] = [
    "worker_id",
    "estab_id",
    "industry",
    "region",
    "year",
    "daily_wage",
    "contract",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Contract {
    RegularFt,
    RegularPt,
    Marginal,
    Apprentice,
}

impl Contract {
    pub fn as_str(&self) -> &'static str {
        match self {
            Contract::RegularFt => "regular_ft",
            Contract::RegularPt => "regular_pt",
            Contract::Marginal => "marginal",
            Contract::Apprentice => "apprentice",
        }
    }

    fn parse(s: &str) -> Option<Contract> {
        match s {
            "regular_ft" => Some(Contract::RegularFt),
            "regular_pt" => Some(Contract::RegularPt),
            "marginal" => Some(Contract::Marginal),
            "apprentice" => Some(Contract::Apprentice),
            _ => None,
        }
    }

    /// Wage may legitimately be missing only for these contract types.
    fn wage_optional(&self) -> bool {
        matches!(self, Contract::Marginal | Contract::Apprentice)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRecord {
    pub worker_id: String,
    pub estab_id: String,
    /// 5-digit industry code; market definitions truncate it by prefix.
    pub industry: String,
    /// District code of the workplace.
    pub region: String,
    pub year: i32,
    pub daily_wage: Option<f64>,
    pub contract: Contract,
}

pub fn parse_snapshot_file(path: &Path) -> Result<Vec<SnapshotRecord>> {
    let file = std::fs::File::open(path)?;
    parse_snapshot_reader(file)
}

pub fn parse_snapshot_reader<R: Read>(reader: R) -> Result<Vec<SnapshotRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    if headers.len() != SNAPSHOT_HEADER.len()
        || headers.iter().zip(SNAPSHOT_HEADER).any(|(got, want)| got != want)
    {
        return Err(Error::Parse {
            row: 0,
            column: "header".into(),
            message: format!(
                "expected header `{}`, found `{}`",
                SNAPSHOT_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let parse_err = |row: usize, column: &str, message: String| Error::Parse {
        row,
        column: column.into(),
        message,
    };

    let mut records = Vec::new();
    for (i, result) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = result?;
        if rec.len() != SNAPSHOT_HEADER.len() {
            return Err(parse_err(
                row,
                "row",
                format!("expected {} fields, found {}", SNAPSHOT_HEADER.len(), rec.len()),
            ));
        }
        let field = |j: usize| rec.get(j).unwrap_or("");

        let contract = Contract::parse(field(6)).ok_or_else(|| {
            parse_err(row, "contract", format!("unknown contract `{}`", field(6)))
        })?;

        let year: i32 = field(4)
            .parse()
            .map_err(|_| parse_err(row, "year", format!("invalid year `{}`", field(4))))?;

        let wage_field = field(5);
        let daily_wage = if wage_field.is_empty() {
            if !contract.wage_optional() {
                return Err(parse_err(
                    row,
                    "daily_wage",
                    format!("wage required for contract `{}`", contract.as_str()),
                ));
            }
            None
        } else {
            let w: f64 = wage_field.parse().map_err(|_| {
                parse_err(row, "daily_wage", format!("non-numeric wage `{wage_field}`"))
            })?;
            if !w.is_finite() || w < 0.0 {
                return Err(parse_err(
                    row,
                    "daily_wage",
                    format!("wage `{w}` must be non-negative"),
                ));
            }
            Some(w)
        };

        let industry = field(2).to_owned();
        if industry.len() < 5 {
            return Err(parse_err(
                row,
                "industry",
                format!("industry code `{industry}` shorter than 5 characters"),
            ));
        }
        for (j, name) in [(0usize, "worker_id"), (1, "estab_id"), (3, "region")] {
            if field(j).is_empty() {
                return Err(parse_err(row, name, "missing value".into()));
            }
        }

        records.push(SnapshotRecord {
            worker_id: field(0).to_owned(),
            estab_id: field(1).to_owned(),
            industry,
            region: field(3).to_owned(),
            year,
            daily_wage,
            contract,
        });
    }
    Ok(records)
}

/// Rank records of the same worker and year: higher wage wins, missing
/// wages lose to present ones, remaining ties go to the smaller estab id.
fn main_job_preferred<'a>(
    a: &'a SnapshotRecord,
    b: &'a SnapshotRecord,
) -> &'a SnapshotRecord {
    let wa = a.daily_wage.unwrap_or(f64::NEG_INFINITY);
    let wb = b.daily_wage.unwrap_or(f64::NEG_INFINITY);
    if wa > wb {
        a
    } else if wb > wa {
        b
    } else if a.estab_id <= b.estab_id {
        a
    } else {
        b
    }
}

/// One main-job record per worker and year, apprentices excluded.
pub fn main_jobs(records: &[SnapshotRecord]) -> Vec<&SnapshotRecord> {
    let mut best: HashMap<(&str, i32), &SnapshotRecord> = HashMap::new();
    for rec in records {
        if rec.contract == Contract::Apprentice {
            continue;
        }
        best.entry((rec.worker_id.as_str(), rec.year))
            .and_modify(|cur| *cur = main_job_preferred(cur, rec))
            .or_insert(rec);
    }
    let mut jobs: Vec<&SnapshotRecord> = best.into_values().collect();
    jobs.sort_by(|a, b| {
        (a.year, &a.worker_id, &a.estab_id).cmp(&(b.year, &b.worker_id, &b.estab_id))
    });
    jobs
}
