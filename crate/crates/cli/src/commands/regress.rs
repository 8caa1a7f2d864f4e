//! `regress`: estimate one specification and write the coefficient table.

use std::io::Write;

use monopsono::data_model::read_estab_panel;
use monopsono::econometrics::{fit_ols, fit_tsls, FitResult};
use monopsono::minwage::assemble_spec;
use monopsono::Result;

use crate::manifest::{write_atomic, RunManifest};

use super::instrument::read_instrument;
use super::{log_info, Ctx};

pub fn run(ctx: &Ctx) -> Result<()> {
    let section = ctx.section("regress");
    let spec_name = ctx.spec_name(&section)?;
    let spec = ctx.spec_config(&spec_name)?;
    let estab_path = ctx.input_path(&section, "estab_panel", "estab_panel.csv");
    let output_name = section.get("output").unwrap_or("fit_result.csv").to_owned();

    let panel = read_estab_panel(&estab_path)?;

    let mut manifest = RunManifest::new("regress");
    manifest.parameters(&section.entries());
    manifest.parameter("spec", &spec_name);
    manifest.input(&estab_path)?;

    let instrument = if spec.iv {
        let instrument_path = ctx.input_path(&section, "instrument", "instrument.csv");
        manifest.input(&instrument_path)?;
        Some(read_instrument(&instrument_path)?)
    } else {
        None
    };

    let assembled = assemble_spec(&panel, instrument.as_ref(), &spec)?;
    for (reason, count) in &assembled.filter_trace {
        manifest.parameter(&format!("filter: {reason}"), count);
    }
    let fit = if spec.iv {
        fit_tsls(&assembled.frame)?
    } else {
        fit_ols(&assembled.frame)?
    };
    log_info(format!(
        "{spec_name}: n={} g={} k={} r2_within={:.4}{}",
        fit.n,
        fit.g,
        fit.k,
        fit.r2_within,
        fit.first_stage_f
            .map(|f| format!(" F={f:.1}"))
            .unwrap_or_default()
    ));
    let main_idx = fit.term_index(&assembled.main_term).unwrap();
    log_info(format!(
        "  {} = {:.5} (se {:.5})",
        assembled.main_term,
        fit.beta[main_idx],
        fit.se(main_idx)
    ));

    let out_path = ctx.out_path(&output_name);
    write_atomic(&out_path, |buf| write_fit_result(buf, &fit))?;
    manifest.output(&out_path);
    manifest.write(&ctx.out_dir)?;
    Ok(())
}

/// Coefficient rows followed by a diagnostics block (one value per row).
pub fn write_fit_result<W: Write>(mut w: W, fit: &FitResult) -> Result<()> {
    writeln!(w, "term,coefficient,se,t,p")?;
    for (i, term) in fit.terms.iter().enumerate() {
        writeln!(
            w,
            "{term},{},{},{},{}",
            fit.beta[i],
            fit.se(i),
            fit.t_stat(i),
            fit.p_value(i)
        )?;
    }
    writeln!(w, "n,{},,,", fit.n)?;
    writeln!(w, "g,{},,,", fit.g)?;
    writeln!(w, "k,{},,,", fit.k)?;
    writeln!(w, "dof,{},,,", fit.dof)?;
    writeln!(w, "r2_within,{},,,", fit.r2_within)?;
    if let Some(f) = fit.first_stage_f {
        writeln!(w, "first_stage_f,{f},,,")?;
    }
    Ok(())
}
