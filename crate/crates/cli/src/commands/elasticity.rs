//! `elasticity`: minimum-wage elasticities over an HHI grid, optionally
//! with the ratio elasticity (employment over earnings) and its cluster
//! bootstrap standard error.

use std::io::Write;

use monopsono::data_model::read_estab_panel;
use monopsono::econometrics::{fit_ols, t_critical};
use monopsono::minwage::{
    assemble_spec, elasticity_at, ratio_elasticity_bootstrap, ElasticityCurve,
};
use monopsono::{Error, Result};

use crate::manifest::{write_atomic, RunManifest};

use super::{log_debug, log_info, Ctx};

pub fn run(ctx: &Ctx, grid_flag: Option<&str>) -> Result<()> {
    let section = ctx.section("elasticity");
    let spec_name = ctx.spec_name(&section)?;
    let spec = ctx.spec_config(&spec_name)?;
    if spec.iv {
        return Err(Error::domain(
            "elasticity curves come from the minimum-wage design, not the instrumented one",
        ));
    }
    let estab_path = ctx.input_path(&section, "estab_panel", "estab_panel.csv");
    let level: f64 = section.parse_or("level", 0.90)?;

    let grid: Vec<f64> = match grid_flag {
        Some(raw) => raw
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::domain(format!("invalid grid `{raw}`")))?,
        None => section
            .parse_list("grid")?
            .unwrap_or_else(|| (0..=20).map(|i| f64::from(i) / 20.0).collect()),
    };

    let panel = read_estab_panel(&estab_path)?;
    let assembled = assemble_spec(&panel, None, &spec)?;
    let fit = fit_ols(&assembled.frame)?;
    let curve = ElasticityCurve::from_fit(
        &fit,
        &assembled.main_term,
        assembled.interaction_term.as_deref(),
    )?;
    log_info(format!(
        "{spec_name}: alpha={:.4} beta={:.4} (n={}, g={})",
        curve.alpha, curve.beta, fit.n, fit.g
    ));
    let crit = t_critical(fit.dof, level)?;

    let mut manifest = RunManifest::new("elasticity");
    manifest.parameters(&section.entries());
    manifest.parameter("spec", &spec_name);
    manifest.parameter("level", level);
    manifest.input(&estab_path)?;

    let out_path = ctx.out_path("elasticities.csv");
    write_atomic(&out_path, |buf| {
        writeln!(buf, "hhi,eta,se,lo90,hi90")?;
        for &h in &grid {
            let e = elasticity_at(&curve, h)?;
            writeln!(
                buf,
                "{h},{},{},{},{}",
                e.eta,
                e.se,
                e.eta - crit * e.se,
                e.eta + crit * e.se
            )?;
        }
        Ok(())
    })?;
    manifest.output(&out_path);

    if section.parse_or("ratio", false)? {
        let wage_spec_name = section
            .get("wage_spec")
            .ok_or_else(|| Error::domain("ratio elasticities need `wage_spec`"))?
            .to_owned();
        let wage_spec = ctx.spec_config(&wage_spec_name)?;
        let reps: usize = section.parse_or("bootstrap_reps", 50)?;
        let seed = ctx.seed(&section)?;
        let wage_assembled = assemble_spec(&panel, None, &wage_spec)?;
        manifest.parameter("wage_spec", &wage_spec_name);
        manifest.parameter("bootstrap_reps", reps);
        manifest.parameter("seed", seed);

        let ratio_path = ctx.out_path("ratio_elasticities.csv");
        let mut skipped = 0usize;
        write_atomic(&ratio_path, |buf| {
            writeln!(buf, "hhi,ratio,se_bootstrap,replicates,failures")?;
            for &h in &grid {
                match ratio_elasticity_bootstrap(
                    &assembled.frame,
                    &wage_assembled.frame,
                    &assembled.main_term,
                    assembled.interaction_term.as_deref(),
                    h,
                    reps,
                    seed,
                ) {
                    Ok(r) => writeln!(
                        buf,
                        "{h},{},{},{},{}",
                        r.value, r.se, r.replicates, r.failures
                    )?,
                    Err(e) => {
                        log_debug(format!("ratio at HHI {h} skipped: {e}"));
                        skipped += 1;
                    }
                }
            }
            Ok(())
        })?;
        manifest.parameter("ratio_points_skipped", skipped);
        manifest.output(&ratio_path);
    }

    manifest.write(&ctx.out_dir)?;
    Ok(())
}
