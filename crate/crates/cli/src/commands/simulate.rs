//! `simulate`: minimum-wage response curves by market structure.

use std::io::Write;

use monopsono::oligopsony::OligopsonyEconomy;
use monopsono::{Error, Result};

use crate::manifest::{write_atomic, RunManifest};

use super::{log_info, Ctx};

pub fn run(ctx: &Ctx) -> Result<()> {
    let section = ctx.section("simulate");
    let supply_intercept: f64 = section.parse_or("supply_intercept", 0.0)?;
    let supply_slope: f64 = section.parse_or("supply_slope", 1.0)?;
    let mrpl_intercept: f64 = section.parse_or("mrpl_intercept", 10.0)?;
    let mrpl_slope: f64 = section.parse_or("mrpl_slope", 0.0)?;
    let firms: Vec<u32> = match section.parse_list("firms")? {
        Some(list) => list
            .into_iter()
            .map(|f| {
                if f >= 1.0 && f.fract() == 0.0 {
                    Ok(f as u32)
                } else {
                    Err(Error::domain(format!("firm count {f} must be a positive integer")))
                }
            })
            .collect::<Result<_>>()?,
        None => vec![1, 2, 5, 20],
    };
    let wmin_grid: Vec<f64> = section.parse_list("wmin_grid")?.unwrap_or_else(|| {
        let top = mrpl_intercept * 1.25;
        (0..=125).map(|i| top * f64::from(i) / 125.0).collect()
    });

    let mut manifest = RunManifest::new("simulate");
    manifest.parameters(&section.entries());

    let out_path = ctx.out_path("curves.csv");
    write_atomic(&out_path, |buf| {
        writeln!(buf, "j,wmin,d_wage,d_employment,regime")?;
        for &j in &firms {
            let econ = OligopsonyEconomy::new(
                supply_intercept,
                supply_slope,
                mrpl_intercept,
                mrpl_slope,
                j,
            )?;
            log_info(format!(
                "J={j}: Cournot wage {:.4}, competitive wage {:.4}, markdown {:.4}",
                econ.cournot().wage,
                econ.competitive().wage,
                econ.markdown()
            ));
            for point in econ.response_curve(&wmin_grid)? {
                writeln!(
                    buf,
                    "{j},{},{},{},{}",
                    point.wmin,
                    point.wage_delta,
                    point.employment_delta,
                    point.regime.as_str()
                )?;
            }
        }
        Ok(())
    })?;
    manifest.output(&out_path);
    manifest.write(&ctx.out_dir)?;
    Ok(())
}
