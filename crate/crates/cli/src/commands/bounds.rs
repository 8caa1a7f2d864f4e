//! `bounds`: plausibly-exogenous interval for the instrumented effect.
//!
//! When no direct-effect range is configured, the range runs from zero to
//! the reduced-form coefficient of the outcome on the instrument.

use std::io::Write;

use monopsono::data_model::read_estab_panel;
use monopsono::econometrics::{conley_bounds, fit_ols, RegressionFrame};
use monopsono::minwage::assemble_spec;
use monopsono::{Error, Result};

use crate::manifest::{write_atomic, RunManifest};

use super::instrument::read_instrument;
use super::{log_info, Ctx};

pub fn run(ctx: &Ctx) -> Result<()> {
    let section = ctx.section("bounds");
    let spec_name = ctx.spec_name(&section)?;
    let spec = ctx.spec_config(&spec_name)?;
    if !spec.iv {
        return Err(Error::domain("bounds require an instrumented specification"));
    }
    let estab_path = ctx.input_path(&section, "estab_panel", "estab_panel.csv");
    let instrument_path = ctx.input_path(&section, "instrument", "instrument.csv");
    let grid_points: usize = section.parse_or("grid_points", 101)?;
    let level: f64 = section.parse_or("level", 0.90)?;

    let panel = read_estab_panel(&estab_path)?;
    let instrument = read_instrument(&instrument_path)?;
    let assembled = assemble_spec(&panel, Some(&instrument), &spec)?;

    let (phi_min, phi_max) = match (section.parse("phi_min")?, section.parse("phi_max")?) {
        (Some(lo), Some(hi)) => (lo, hi),
        (None, None) => {
            let phi = reduced_form_coefficient(&assembled.frame)?;
            log_info(format!("reduced-form coefficient {phi:.5}"));
            (phi.min(0.0), phi.max(0.0))
        }
        _ => {
            return Err(Error::domain(
                "set both phi_min and phi_max, or neither for the reduced-form range",
            ))
        }
    };

    let bounds = conley_bounds(
        &assembled.frame,
        phi_min,
        phi_max,
        grid_points,
        level,
        1e-8,
        10_000,
    )?;
    log_info(format!(
        "theta in [{:.5}, {:.5}] at level {level} over phi in [{phi_min:.5}, {phi_max:.5}]",
        bounds.theta_lo, bounds.theta_hi
    ));

    let mut manifest = RunManifest::new("bounds");
    manifest.parameters(&section.entries());
    manifest.parameter("spec", &spec_name);
    manifest.parameter("phi_min", phi_min);
    manifest.parameter("phi_max", phi_max);
    manifest.input(&estab_path)?;
    manifest.input(&instrument_path)?;

    let grid_path = ctx.out_path("bounds.csv");
    write_atomic(&grid_path, |buf| {
        writeln!(buf, "phi,theta,ci_lo,ci_hi")?;
        for p in &bounds.grid {
            writeln!(buf, "{},{},{},{}", p.phi, p.estimate, p.ci_lo, p.ci_hi)?;
        }
        Ok(())
    })?;
    manifest.output(&grid_path);

    let summary_path = ctx.out_path("bounds_summary.csv");
    write_atomic(&summary_path, |buf| {
        writeln!(
            buf,
            "level,phi_min,phi_max,theta_lo,theta_hi,negativity_threshold"
        )?;
        writeln!(
            buf,
            "{level},{phi_min},{phi_max},{},{},{}",
            bounds.theta_lo,
            bounds.theta_hi,
            bounds
                .negativity_threshold
                .map(|v| v.to_string())
                .unwrap_or_default()
        )?;
        Ok(())
    })?;
    manifest.output(&summary_path);

    manifest.write(&ctx.out_dir)?;
    Ok(())
}

/// Coefficient of the outcome on the instrument with the frame's fixed
/// effects (the instrument moved into the exogenous slot).
fn reduced_form_coefficient(frame: &RegressionFrame) -> Result<f64> {
    let mut reduced = frame.clone();
    reduced.exog = frame.instruments.clone();
    reduced.endog.clear();
    reduced.instruments.clear();
    Ok(fit_ols(&reduced)?.beta[0])
}
