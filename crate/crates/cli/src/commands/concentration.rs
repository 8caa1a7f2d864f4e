//! `concentration`: one row of indices per market-year.

use std::io::Write;

use monopsono::concentration::index_set;
use monopsono::data_model::{
    build_market_panel, parse_snapshot_file, read_delineation,
};
use monopsono::Result;

use crate::manifest::{write_atomic, RunManifest};

use super::{log_info, Ctx};

pub fn run(ctx: &Ctx) -> Result<()> {
    let section = ctx.section("concentration");
    let digits = ctx.digits(&section)?;
    let object = ctx.object(&section)?;
    let snapshots_path = ctx.input_path(&section, "snapshots", "snapshots.csv");
    let delineation_path = ctx.input_path(&section, "delineation", "delineation.csv");

    let records = parse_snapshot_file(&snapshots_path)?;
    let delineation = read_delineation(&delineation_path)?;
    let panel = build_market_panel(&records, &delineation, digits, object)?;
    log_info(format!(
        "{} market cells at {digits} digits ({})",
        panel.cells.len(),
        object.as_str()
    ));

    let mut manifest = RunManifest::new("concentration");
    manifest.parameters(&section.entries());
    manifest.parameter("digits", digits);
    manifest.parameter("object", object.as_str());
    manifest.input(&snapshots_path)?;
    manifest.input(&delineation_path)?;

    let out_path = ctx.out_path("concentration.csv");
    write_atomic(&out_path, |buf| {
        writeln!(buf, "industry,zone,year,j,hhi,rbi,cr1,ins,exp,band,object_kind")?;
        for (key, cell) in &panel.cells {
            let shares = cell.shares()?;
            let set = index_set(&shares)?;
            writeln!(
                buf,
                "{},{},{},{},{},{},{},{},{},{},{}",
                key.industry,
                key.zone,
                key.year,
                set.j,
                set.hhi,
                set.rbi,
                set.cr1,
                set.ins,
                set.exp,
                set.band.as_str(),
                panel.object_kind.as_str(),
            )?;
        }
        Ok(())
    })?;
    manifest.output(&out_path);
    manifest.write(&ctx.out_dir)?;
    Ok(())
}
