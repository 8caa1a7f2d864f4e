//! `report`: presentation layer over previously produced artifacts. Reads
//! whatever exists in the output directory and formats summary tables; it
//! never re-runs estimation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use monopsono::concentration::weighted_summary;
use monopsono::data_model::read_market_panel;
use monopsono::{Error, Result};

use crate::manifest::{write_atomic, RunManifest};

use super::{log_info, Ctx};

struct ConcentrationRow {
    year: i32,
    hhi: f64,
    object_kind: String,
    key: (String, String, i32),
}

fn read_concentration(path: &Path) -> Result<Vec<ConcentrationRow>> {
    let file = std::fs::File::open(path)?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let parse = |v: &str, col: &str| -> Result<f64> {
            v.parse().map_err(|_| Error::Parse {
                row: i + 1,
                column: col.into(),
                message: format!("invalid value `{v}`"),
            })
        };
        let year = parse(field(2), "year")? as i32;
        rows.push(ConcentrationRow {
            year,
            hhi: parse(field(4), "hhi")?,
            object_kind: field(10).to_owned(),
            key: (field(0).to_owned(), field(1).to_owned(), year),
        });
    }
    Ok(rows)
}

pub fn run(ctx: &Ctx) -> Result<()> {
    let section = ctx.section("report");
    let mut manifest = RunManifest::new("report");
    manifest.parameters(&section.entries());
    let mut text = String::new();

    let concentration_path = ctx.input_path(&section, "concentration", "concentration.csv");
    let market_path = ctx.input_path(&section, "market_panel", "market_panel.csv");
    if concentration_path.exists() {
        manifest.input(&concentration_path)?;
        let rows = read_concentration(&concentration_path)?;

        // employment weights per market-year, when the panel is available
        let weights: Option<BTreeMap<(String, String, i32), f64>> = if market_path.exists() {
            manifest.input(&market_path)?;
            let panel = read_market_panel(&market_path)?;
            Some(
                panel
                    .cells
                    .iter()
                    .map(|(k, c)| ((k.industry.clone(), k.zone.clone(), k.year), c.total))
                    .collect(),
            )
        } else {
            None
        };

        let mut years: Vec<i32> = rows.iter().map(|r| r.year).collect();
        years.sort_unstable();
        years.dedup();
        let object_kind = rows
            .first()
            .map(|r| r.object_kind.clone())
            .unwrap_or_default();

        let table1_path = ctx.out_path("table1.csv");
        write_atomic(&table1_path, |buf| {
            writeln!(
                buf,
                "object_kind,year,markets,mean_hhi,p25_hhi,p50_hhi,p75_hhi,\
                 share_medium,share_high,weighted_mean_hhi,weighted_p50_hhi,\
                 weighted_share_medium,weighted_share_high"
            )?;
            let mut groups: Vec<(String, Vec<&ConcentrationRow>)> = years
                .iter()
                .map(|y| {
                    (y.to_string(), rows.iter().filter(|r| r.year == *y).collect())
                })
                .collect();
            groups.push(("all".to_owned(), rows.iter().collect()));
            for (label, group) in groups {
                let values: Vec<f64> = group.iter().map(|r| r.hhi).collect();
                let unit = vec![1.0; values.len()];
                let plain = weighted_summary(&values, &unit)?;
                let weighted = weights.as_ref().map(|w| {
                    let wv: Vec<f64> = group
                        .iter()
                        .map(|r| w.get(&r.key).copied().unwrap_or(0.0))
                        .collect();
                    weighted_summary(&values, &wv)
                });
                let (wm, wp50, wsm, wsh) = match weighted {
                    Some(Ok(s)) => (
                        s.mean.to_string(),
                        s.p50.to_string(),
                        s.share_medium.to_string(),
                        s.share_high.to_string(),
                    ),
                    _ => Default::default(),
                };
                writeln!(
                    buf,
                    "{object_kind},{label},{},{},{},{},{},{},{},{wm},{wp50},{wsm},{wsh}",
                    group.len(),
                    plain.mean,
                    plain.p25,
                    plain.p50,
                    plain.p75,
                    plain.share_medium,
                    plain.share_high,
                )?;
            }
            Ok(())
        })?;
        manifest.output(&table1_path);

        let all: Vec<f64> = rows.iter().map(|r| r.hhi).collect();
        let summary = weighted_summary(&all, &vec![1.0; all.len()])?;
        writeln!(text, "Concentration ({object_kind}, {} market-years)", all.len()).unwrap();
        writeln!(
            text,
            "  mean HHI {:.4}, quartiles {:.4}/{:.4}/{:.4}, medium share {:.3}, high share {:.3}",
            summary.mean, summary.p25, summary.p50, summary.p75,
            summary.share_medium, summary.share_high
        )
        .unwrap();
        writeln!(
            text,
            "  equivalent number of employers at the mean: {:.2}",
            1.0 / summary.mean
        )
        .unwrap();
        writeln!(text).unwrap();
    }

    let sweep_path = ctx.input_path(&section, "sweep", "sweep.csv");
    if sweep_path.exists() {
        manifest.input(&sweep_path)?;
        let content = std::fs::read_to_string(&sweep_path)?;
        let best = content
            .lines()
            .skip(1)
            .filter_map(|line| {
                let parts: Vec<&str> = line.split(',').collect();
                let q: f64 = parts.get(1)?.parse().ok()?;
                Some((q, line.to_owned()))
            })
            .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if let Some((q, line)) = best {
            writeln!(text, "Delineation sweep").unwrap();
            writeln!(text, "  best threshold row (tau,Q,zones,cross): {line} (Q = {q:.4})")
                .unwrap();
            writeln!(text).unwrap();
        }
    }

    for name in ["fit_result.csv", "fit_wage.csv", "fit_employment.csv"] {
        let path = ctx.out_path(name);
        if path.exists() {
            manifest.input(&path)?;
            writeln!(text, "Fit: {name}").unwrap();
            for line in std::fs::read_to_string(&path)?.lines().skip(1) {
                writeln!(text, "  {line}").unwrap();
            }
            writeln!(text).unwrap();
        }
    }

    for name in ["elasticities.csv", "ratio_elasticities.csv", "bounds_summary.csv", "ground_truth.csv"] {
        let path = ctx.out_path(name);
        if path.exists() {
            manifest.input(&path)?;
            writeln!(text, "{name}").unwrap();
            for line in std::fs::read_to_string(&path)?.lines() {
                writeln!(text, "  {line}").unwrap();
            }
            writeln!(text).unwrap();
        }
    }

    if text.is_empty() {
        return Err(Error::domain(format!(
            "no artifacts to report in {}",
            ctx.out_dir.display()
        )));
    }

    let report_path = ctx.out_path("report.txt");
    write_atomic(&report_path, |buf| {
        buf.extend_from_slice(text.as_bytes());
        Ok(())
    })?;
    manifest.output(&report_path);
    manifest.write(&ctx.out_dir)?;
    log_info(format!("report written to {}", report_path.display()));
    Ok(())
}
