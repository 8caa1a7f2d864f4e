//! `delineate`: dominant-flow merging with a modularity threshold sweep.

use std::io::Write;

use monopsono::data_model::read_flows;
use monopsono::delineation::{sweep_thresholds, FlowMatrix};
use monopsono::Result;

use crate::manifest::{write_atomic, RunManifest};

use super::{log_info, Ctx};

pub fn run(ctx: &Ctx) -> Result<()> {
    let section = ctx.section("delineate");
    let flows_path = ctx.input_path(&section, "flows", "flows.csv");
    let grid = section.parse_list("grid")?.unwrap_or_else(|| {
        // 1% to 30% in 1% steps
        (1..=30).map(|i| f64::from(i) / 100.0).collect()
    });

    let edges = read_flows(&flows_path)?;
    let fm = FlowMatrix::from_edges(&edges)?;
    log_info(format!(
        "sweeping {} thresholds over {} regions",
        grid.len(),
        fm.len()
    ));
    let sweep = sweep_thresholds(&fm, &grid)?;
    log_info(format!(
        "tau* = {} -> {} zones, Q = {:.4}, cross-zone share {:.4}",
        sweep.tau_star,
        sweep.partition.zone_count(),
        sweep.q_star,
        sweep.cross_zone_share
    ));

    let mut manifest = RunManifest::new("delineate");
    manifest.parameters(&section.entries());
    manifest.input(&flows_path)?;
    manifest.parameter("tau_star", sweep.tau_star);
    manifest.parameter("q_star", sweep.q_star);
    manifest.parameter("zones", sweep.partition.zone_count());

    let delineation_path = ctx.out_path("delineation.csv");
    write_atomic(&delineation_path, |buf| {
        writeln!(buf, "district,zone")?;
        for (i, region) in fm.regions().iter().enumerate() {
            writeln!(buf, "{region},z{:04}", sweep.partition.zone_of(i))?;
        }
        Ok(())
    })?;
    manifest.output(&delineation_path);

    let sweep_path = ctx.out_path("sweep.csv");
    write_atomic(&sweep_path, |buf| {
        writeln!(buf, "tau,modularity,zones,cross_zone_share")?;
        for eval in &sweep.evaluations {
            writeln!(
                buf,
                "{},{},{},{}",
                eval.tau, eval.modularity, eval.zone_count, eval.cross_zone_share
            )?;
        }
        Ok(())
    })?;
    manifest.output(&sweep_path);

    manifest.write(&ctx.out_dir)?;
    Ok(())
}
