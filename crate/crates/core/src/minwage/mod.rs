//! Minimum-wage analysis: specification assembly, the leave-one-out
//! concentration instrument, and elasticity arithmetic.

mod elasticity;
mod instrument;
mod spec;

pub use elasticity::{
    delta_method_ratio, elasticity_at, labor_supply_elasticity, normalize_closure_effect,
    ratio_elasticity, ratio_elasticity_bootstrap, Elasticity, ElasticityCurve,
    RatioElasticity,
};
pub use instrument::leave_one_out_instrument;
pub use spec::{
    assemble_spec, AssembledSpec, Design, FeScheme, HhiSource, Interaction, SpecConfig,
    HHI_BAND_CUTS, TERM_MAIN_HHI, TERM_MAIN_MW, TERM_MW_X_HHI,
};
