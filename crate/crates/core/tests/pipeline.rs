//! End-to-end pipeline test on synthetic data: records to market panel to
//! establishment panel to instrumented regression, recovering the planted
//! concentration-wage elasticity.

use monopsono::data_model::{
    build_estab_panel, build_market_panel, ObjectKind, PanelOptions,
};
use monopsono::econometrics::fit_tsls;
use monopsono::minwage::{assemble_spec, leave_one_out_instrument, FeScheme, SpecConfig};
use monopsono::synth::{synth_panel, SynthConfig};

#[test]
fn iv_pipeline_recovers_planted_elasticity() {
    let t0 = std::time::Instant::now();
    let cfg = SynthConfig {
        seed: 42,
        ..SynthConfig::default()
    };
    let out = synth_panel(&cfg);
    let generated = t0.elapsed();

    let market =
        build_market_panel(&out.records, &out.delineation, 4, ObjectKind::Employment).unwrap();
    let estab = build_estab_panel(
        &out.records,
        &out.delineation,
        &market,
        &out.sector_map(),
        &out.minwage,
        Some(&out.controls),
        &PanelOptions::default(),
    )
    .unwrap();
    let aggregated = t0.elapsed();

    let instrument = leave_one_out_instrument(&market, None);
    let spec = SpecConfig::eq2("mean_wage", FeScheme::EstabYearZone, true);
    let assembled = assemble_spec(&estab, Some(&instrument), &spec).unwrap();
    let fit = fit_tsls(&assembled.frame).unwrap();
    let total = t0.elapsed();

    let theta_hat = fit.beta[0];
    let se = fit.se(0);
    let f = fit.first_stage_f.unwrap();
    eprintln!(
        "n={} g={} theta_hat={theta_hat:.5} se={se:.5} F={f:.1} \
         gen={generated:?} agg={aggregated:?} total={total:?}",
        fit.n, fit.g
    );

    assert!(fit.n > 50_000, "expected a large panel, got {}", fit.n);
    assert!(f > 10.0, "first-stage F {f} too weak");
    assert!(
        (theta_hat - cfg.theta_wage).abs() < 3.0 * se,
        "theta_hat {theta_hat} not within 3 se ({se}) of {}",
        cfg.theta_wage
    );
}
