//! `ingest`: snapshots plus lookup files to market and establishment
//! panels, with the outward-mobility measure as a side artifact.

use std::io::Write;

use monopsono::data_model::{
    build_estab_panel, build_market_panel, outward_mobility, parse_snapshot_file,
    read_controls, read_delineation, read_minwage_schedule, read_sector_map,
    write_estab_panel, write_market_panel, PanelOptions, Territory,
};
use monopsono::{Error, Result};

use crate::manifest::{write_atomic, RunManifest};

use super::{log_info, Ctx};

pub fn run(ctx: &Ctx) -> Result<()> {
    let section = ctx.section("ingest");
    let digits = ctx.digits(&section)?;
    let object = ctx.object(&section)?;

    let snapshots_path = ctx.input_path(&section, "snapshots", "snapshots.csv");
    let sectors_path = ctx.input_path(&section, "sectors", "sectors.csv");
    let minwage_path = ctx.input_path(&section, "minwage", "minwage.csv");
    let delineation_path = ctx.input_path(&section, "delineation", "delineation.csv");
    let controls_path = ctx.input_path(&section, "controls", "controls.csv");

    let records = parse_snapshot_file(&snapshots_path)?;
    let sector_map = read_sector_map(&sectors_path)?;
    let schedule = read_minwage_schedule(&minwage_path)?;
    let delineation = read_delineation(&delineation_path)?;
    let controls = if controls_path.exists() {
        Some(read_controls(&controls_path)?)
    } else {
        None
    };

    let mut opts = PanelOptions::default();
    if let Some(raw) = section.get("berlin_default") {
        opts.berlin_default = raw.parse::<Territory>()?;
    }
    opts.days_per_week = section.parse_or("days_per_week", opts.days_per_week)?;
    opts.hours_per_week = section.parse_or("hours_per_week", opts.hours_per_week)?;
    if !(opts.days_per_week > 0.0 && opts.hours_per_week > 0.0) {
        return Err(Error::domain("wage conversion factors must be positive"));
    }

    log_info(format!(
        "ingesting {} records at {digits} digits ({})",
        records.len(),
        object.as_str()
    ));
    let market = build_market_panel(&records, &delineation, digits, object)?;
    let estab = build_estab_panel(
        &records,
        &delineation,
        &market,
        &sector_map,
        &schedule,
        controls.as_ref(),
        &opts,
    )?;
    let mobility = outward_mobility(&records, &delineation, digits)?;
    log_info(format!(
        "{} market cells, {} establishment-years ({} establishments without sector)",
        market.cells.len(),
        estab.rows.len(),
        estab.skipped.no_sector_estabs
    ));

    let mut manifest = RunManifest::new("ingest");
    manifest.parameters(&section.entries());
    manifest.parameter("digits", digits);
    manifest.parameter("object", object.as_str());
    for path in [&snapshots_path, &sectors_path, &minwage_path, &delineation_path] {
        manifest.input(path)?;
    }
    if controls.is_some() {
        manifest.input(&controls_path)?;
    }
    manifest.parameter("skipped_no_sector_estabs", estab.skipped.no_sector_estabs);
    manifest.parameter("skipped_no_sector_rows", estab.skipped.no_sector_rows);
    if !market.skipped.hires_years_without_predecessor.is_empty() {
        manifest.parameter(
            "hires_years_omitted",
            market
                .skipped
                .hires_years_without_predecessor
                .iter()
                .map(i32::to_string)
                .collect::<Vec<_>>()
                .join(";"),
        );
    }

    let market_path = ctx.out_path("market_panel.csv");
    write_atomic(&market_path, |buf| write_market_panel(buf, &market))?;
    manifest.output(&market_path);

    let estab_path = ctx.out_path("estab_panel.csv");
    write_atomic(&estab_path, |buf| write_estab_panel(buf, &estab))?;
    manifest.output(&estab_path);

    let mobility_path = ctx.out_path("mobility.csv");
    write_atomic(&mobility_path, |buf| {
        writeln!(buf, "industry,zone,year,outward_mobility")?;
        for (key, share) in &mobility {
            writeln!(buf, "{},{},{},{}", key.industry, key.zone, key.year, share)?;
        }
        Ok(())
    })?;
    manifest.output(&mobility_path);

    manifest.write(&ctx.out_dir)?;
    Ok(())
}
