//! Leave-one-out instrument for labor market concentration: the average of
//! log inverse firm counts in the same industry and year across all other
//! zones.

use std::collections::BTreeMap;

use crate::data_model::{MarketKey, MarketPanel};

/// Instrument values keyed by the focal market-year cell.
///
/// By default the divisor is the number of zones where the industry
/// actually exists in that year; `strict_zone_count = Some(Z)` forces the
/// fixed divisor `Z - 1` instead. Cells whose industry appears in no other
/// zone get no instrument.
pub fn leave_one_out_instrument(
    panel: &MarketPanel,
    strict_zone_count: Option<usize>,
) -> BTreeMap<MarketKey, f64> {
    // (industry, year) -> [(zone, ln(1/J))]
    let mut by_industry_year: BTreeMap<(&str, i32), Vec<(&str, f64)>> = BTreeMap::new();
    for (key, cell) in &panel.cells {
        let ln_ins = -((cell.firm_count() as f64).ln());
        by_industry_year
            .entry((key.industry.as_str(), key.year))
            .or_default()
            .push((key.zone.as_str(), ln_ins));
    }

    let mut out = BTreeMap::new();
    for ((industry, year), zones) in &by_industry_year {
        if zones.len() < 2 {
            continue;
        }
        let divisor = match strict_zone_count {
            Some(z) => (z - 1) as f64,
            None => (zones.len() - 1) as f64,
        };
        for (i, (focal, _)) in zones.iter().enumerate() {
            // summed directly over the other zones, so the focal cell's
            // own firm count cannot perturb the value even in round-off
            let sum: f64 = zones
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, (_, v))| v)
                .sum();
            out.insert(
                MarketKey {
                    industry: (*industry).to_owned(),
                    zone: (*focal).to_owned(),
                    year: *year,
                },
                sum / divisor,
            );
        }
    }
    out
}
