//! `instrument`: leave-one-out log inverse firm counts per market-year.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use monopsono::data_model::{read_market_panel, MarketKey};
use monopsono::minwage::leave_one_out_instrument;
use monopsono::{Error, Result};

use crate::manifest::{write_atomic, RunManifest};

use super::{log_info, Ctx};

pub fn run(ctx: &Ctx) -> Result<()> {
    let section = ctx.section("instrument");
    let market_path = ctx.input_path(&section, "market_panel", "market_panel.csv");
    let strict_zones: Option<usize> = section.parse("strict_zones")?;

    let panel = read_market_panel(&market_path)?;
    let values = leave_one_out_instrument(&panel, strict_zones);
    log_info(format!(
        "instrument for {} of {} cells",
        values.len(),
        panel.cells.len()
    ));

    let mut manifest = RunManifest::new("instrument");
    manifest.parameters(&section.entries());
    manifest.input(&market_path)?;
    manifest.parameter("cells_with_instrument", values.len());

    let out_path = ctx.out_path("instrument.csv");
    write_atomic(&out_path, |buf| write_instrument(buf, &values))?;
    manifest.output(&out_path);
    manifest.write(&ctx.out_dir)?;
    Ok(())
}

pub fn write_instrument<W: Write>(
    mut w: W,
    values: &BTreeMap<MarketKey, f64>,
) -> Result<()> {
    writeln!(w, "industry,zone,year,instrument")?;
    for (key, value) in values {
        writeln!(w, "{},{},{},{}", key.industry, key.zone, key.year, value)?;
    }
    Ok(())
}

pub fn read_instrument(path: &Path) -> Result<BTreeMap<MarketKey, f64>> {
    let file = std::fs::File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = rdr.headers()?.clone();
    let expected = ["industry", "zone", "year", "instrument"];
    if headers.iter().zip(expected).any(|(got, want)| got != want) || headers.len() != 4 {
        return Err(Error::Parse {
            row: 0,
            column: "header".into(),
            message: format!("expected `{}`", expected.join(",")),
        });
    }
    let mut out = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let parse_num = |v: &str, col: &str| -> Result<f64> {
            v.parse().map_err(|_| Error::Parse {
                row: i + 1,
                column: col.into(),
                message: format!("invalid value `{v}`"),
            })
        };
        out.insert(
            MarketKey {
                industry: field(0).to_owned(),
                zone: field(1).to_owned(),
                year: parse_num(field(2), "year")? as i32,
            },
            parse_num(field(3), "instrument")?,
        );
    }
    Ok(out)
}
