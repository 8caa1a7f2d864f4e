//! `synth`: generate a synthetic snapshot panel and its companion files.

use std::io::Write;

use monopsono::data_model::{
    write_controls, write_delineation, write_flows, write_minwage_schedule, write_sectors,
    write_snapshots,
};
use monopsono::oligopsony::OligopsonyEconomy;
use monopsono::synth::{synth_panel, SynthConfig};
use monopsono::Result;

use crate::manifest::{write_atomic, RunManifest};

use super::{log_info, Ctx};

pub fn run(ctx: &Ctx) -> Result<()> {
    let section = ctx.section("synth");
    let defaults = SynthConfig::default();
    let economy = OligopsonyEconomy::new(
        section.parse_or("supply_intercept", defaults.economy.supply_intercept)?,
        section.parse_or("supply_slope", defaults.economy.supply_slope)?,
        section.parse_or("mrpl_intercept", defaults.economy.mrpl_intercept)?,
        section.parse_or("mrpl_slope", defaults.economy.mrpl_slope)?,
        defaults.economy.firms,
    )?;
    let cfg = SynthConfig {
        economy,
        n_industries: section.parse_or("n_industries", defaults.n_industries)?,
        n_zones: section.parse_or("n_zones", defaults.n_zones)?,
        n_years: section.parse_or("n_years", defaults.n_years)?,
        start_year: section.parse_or("start_year", defaults.start_year)?,
        theta_wage: section.parse_or("theta_wage", defaults.theta_wage)?,
        theta_emp: section.parse_or("theta_emp", defaults.theta_emp)?,
        wage_scale: section.parse_or("wage_scale", defaults.wage_scale)?,
        size_scale: section.parse_or("size_scale", defaults.size_scale)?,
        noise_wage: section.parse_or("noise_wage", defaults.noise_wage)?,
        noise_emp: section.parse_or("noise_emp", defaults.noise_emp)?,
        estab_effect_sd: section.parse_or("estab_effect_sd", defaults.estab_effect_sd)?,
        zone_year_effect_sd: section
            .parse_or("zone_year_effect_sd", defaults.zone_year_effect_sd)?,
        firm_count_log_mean: section
            .parse_or("firm_count_log_mean", defaults.firm_count_log_mean)?,
        firm_count_industry_sd: section
            .parse_or("firm_count_industry_sd", defaults.firm_count_industry_sd)?,
        firm_count_year_sd: section
            .parse_or("firm_count_year_sd", defaults.firm_count_year_sd)?,
        firm_count_local_sd: section
            .parse_or("firm_count_local_sd", defaults.firm_count_local_sd)?,
        pt_share: section.parse_or("pt_share", defaults.pt_share)?,
        marginal_share: section.parse_or("marginal_share", defaults.marginal_share)?,
        apprentice_share: section.parse_or("apprentice_share", defaults.apprentice_share)?,
        industries_per_sector: section
            .parse_or("industries_per_sector", defaults.industries_per_sector)?,
        districts_per_zone: section
            .parse_or("districts_per_zone", defaults.districts_per_zone)?,
        with_minwage: section.parse_or("with_minwage", defaults.with_minwage)?,
        seed: ctx.seed(&section)?,
    };

    log_info(format!(
        "generating {} industries x {} zones x {} years (seed {})",
        cfg.n_industries, cfg.n_zones, cfg.n_years, cfg.seed
    ));
    let out = synth_panel(&cfg);
    log_info(format!("{} snapshot records", out.records.len()));

    let mut manifest = RunManifest::new("synth");
    manifest.parameters(&section.entries());
    manifest.parameter("seed", cfg.seed);
    manifest.parameter("records", out.records.len());

    let files: Vec<(&str, Box<dyn Fn(&mut Vec<u8>) -> Result<()> + '_>)> = vec![
        (
            "snapshots.csv",
            Box::new(|buf: &mut Vec<u8>| write_snapshots(buf, &out.records)),
        ),
        (
            "sectors.csv",
            Box::new(|buf: &mut Vec<u8>| write_sectors(buf, &out.sector_pairs)),
        ),
        (
            "minwage.csv",
            Box::new(|buf: &mut Vec<u8>| write_minwage_schedule(buf, &out.minwage)),
        ),
        (
            "controls.csv",
            Box::new(|buf: &mut Vec<u8>| write_controls(buf, &out.controls)),
        ),
        (
            "flows.csv",
            Box::new(|buf: &mut Vec<u8>| write_flows(buf, &out.flows)),
        ),
        (
            "delineation.csv",
            Box::new(|buf: &mut Vec<u8>| write_delineation(buf, &out.delineation)),
        ),
        (
            "ground_truth.csv",
            Box::new(|buf: &mut Vec<u8>| {
                writeln!(buf, "key,value")?;
                for (k, v) in &out.ground_truth {
                    writeln!(buf, "{k},{v}")?;
                }
                Ok(())
            }),
        ),
    ];
    for (name, writer) in files {
        let path = ctx.out_path(name);
        write_atomic(&path, writer)?;
        manifest.output(&path);
    }
    manifest.write(&ctx.out_dir)?;
    Ok(())
}
