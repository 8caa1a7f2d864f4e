//! Synthetic worker-level panels with a planted concentration-wage
//! elasticity, used to exercise the full pipeline against a known answer.
//!
//! Markets are industry-by-zone cells with heterogeneous firm counts driven
//! by national industry-year shocks (which is what gives the leave-one-out
//! instrument its power) plus local noise. Firm sizes follow the Cournot
//! closed form of the scaffold economy; establishment wages are
//! `wage_scale * w^C * HHI^theta_wage` times log-normal noise, with the HHI
//! taken from volition of the realized head counts, so the planted
//! elasticity is exact with respect to what the pipeline measures.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data_model::{
    Contract, Controls, Delineation, MinwageEntry, MinwageSchedule, SectorMap,
    SnapshotRecord, Territory, TerritoryRule,
};
use crate::econometrics::replicate_rng;
use crate::oligopsony::OligopsonyEconomy;

const MAX_FIRMS_PER_MARKET: usize = 40;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_industries: usize,
    pub n_zones: usize,
    pub n_years: usize,
    pub start_year: i32,
    /// Scaffold economy: supplies the competitive wage level and the
    /// Cournot firm-size profile.
    pub economy: OligopsonyEconomy,
    /// Planted elasticity of establishment wages with respect to the
    /// realized market HHI.
    pub theta_wage: f64,
    /// Planted elasticity of firm size with respect to the equal-share
    /// HHI `1/J` (0 leaves sizes on the Cournot profile).
    pub theta_emp: f64,
    /// Daily-wage multiple of the competitive wage.
    pub wage_scale: f64,
    /// Head-count multiple of the Cournot per-firm employment.
    pub size_scale: f64,
    pub noise_wage: f64,
    pub noise_emp: f64,
    pub estab_effect_sd: f64,
    pub zone_year_effect_sd: f64,
    pub firm_count_log_mean: f64,
    pub firm_count_industry_sd: f64,
    /// Industry-year (national) shocks to log firm counts.
    pub firm_count_year_sd: f64,
    pub firm_count_local_sd: f64,
    pub pt_share: f64,
    pub marginal_share: f64,
    pub apprentice_share: f64,
    pub industries_per_sector: usize,
    pub districts_per_zone: usize,
    pub with_minwage: bool,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_industries: 40,
            n_zones: 50,
            n_years: 10,
            start_year: 2000,
            economy: OligopsonyEconomy {
                supply_intercept: 0.0,
                supply_slope: 1.0,
                mrpl_intercept: 10.0,
                mrpl_slope: 0.0,
                firms: 1,
            },
            theta_wage: -0.05,
            theta_emp: 0.0,
            wage_scale: 10.0,
            size_scale: 3.0,
            noise_wage: 0.05,
            noise_emp: 0.15,
            estab_effect_sd: 0.2,
            zone_year_effect_sd: 0.1,
            firm_count_log_mean: 4.0f64.ln(),
            firm_count_industry_sd: 0.4,
            firm_count_year_sd: 0.3,
            firm_count_local_sd: 0.15,
            pt_share: 0.05,
            marginal_share: 0.05,
            apprentice_share: 0.02,
            industries_per_sector: 5,
            districts_per_zone: 1,
            with_minwage: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub records: Vec<SnapshotRecord>,
    pub delineation: Delineation,
    pub sector_pairs: Vec<(String, String)>,
    pub minwage: MinwageSchedule,
    pub controls: Controls,
    pub flows: Vec<(String, String, f64)>,
    /// Planted parameters as key-value rows.
    pub ground_truth: Vec<(String, String)>,
}

impl SynthOutput {
    pub fn sector_map(&self) -> SectorMap {
        SectorMap::new(self.sector_pairs.iter().cloned())
    }
}

/// 5-digit codes whose 4-digit prefixes stay distinct, so markets remain
/// separate under the baseline 4-digit truncation.
fn industry_code(i: usize) -> String {
    format!("{:04}0", 1000 + i)
}

fn district_code(z: usize, sub: usize, per_zone: usize) -> String {
    format!("{:05}", 30000 + z * per_zone + sub)
}

fn zone_label(z: usize, per_zone: usize) -> String {
    if per_zone == 1 {
        district_code(z, 0, 1)
    } else {
        format!("Z{z:03}")
    }
}

fn sector_label(industry_idx: usize, per_sector: usize) -> String {
    format!("s{:02}", industry_idx / per_sector)
}

/// Generate a synthetic snapshot panel plus all companion input files.
pub fn synth_panel(cfg: &SynthConfig) -> SynthOutput {
    let normal = |sd: f64| Normal::new(0.0, sd.max(1e-300)).unwrap();
    let per_zone = cfg.districts_per_zone.max(1);
    let competitive_wage = cfg.economy.competitive().wage;

    // global stream: industry means, national industry-year shocks,
    // zone-year wage effects, bargaining-coverage shares
    let mut global = replicate_rng(cfg.seed, 0);
    let industry_mean: Vec<f64> = (0..cfg.n_industries)
        .map(|_| cfg.firm_count_log_mean + normal(cfg.firm_count_industry_sd).sample(&mut global))
        .collect();
    let industry_year_shock: Vec<Vec<f64>> = (0..cfg.n_industries)
        .map(|_| {
            (0..cfg.n_years)
                .map(|_| normal(cfg.firm_count_year_sd).sample(&mut global))
                .collect()
        })
        .collect();
    let zone_year_effect: Vec<Vec<f64>> = (0..cfg.n_zones)
        .map(|_| {
            (0..cfg.n_years)
                .map(|_| normal(cfg.zone_year_effect_sd).sample(&mut global))
                .collect()
        })
        .collect();
    let n_sectors = cfg.n_industries.div_ceil(cfg.industries_per_sector);
    let cba_share: Vec<Vec<f64>> = (0..n_sectors)
        .map(|_| {
            (0..cfg.n_years)
                .map(|_| global.random_range(0.2..0.8))
                .collect()
        })
        .collect();

    // minimum wage schedule (optional): staggered introductions with
    // irregular year-to-year raises, so the log rate is neither constant
    // within establishments nor linear in time
    let mut minwage_entries = Vec::new();
    if cfg.with_minwage {
        let typical_hourly = cfg.wage_scale * competitive_wage * 7.0 / 40.0;
        let end_year = cfg.start_year + cfg.n_years as i32 - 1;
        for s in 0..n_sectors {
            let intro_year = (cfg.start_year + (cfg.n_years as i32) / 2 + (s as i32 % 3) - 1)
                .min(end_year);
            let mut rate_west = typical_hourly * (0.75 + 0.02 * s as f64);
            for year in intro_year..=end_year {
                if year > intro_year {
                    let u: f64 = global.random_range(0.0..1.0);
                    let raise = if u < 0.3 { 0.0 } else { 0.08 * u };
                    rate_west *= 1.0 + raise;
                }
                for (territory, rate) in
                    [(Territory::West, rate_west), (Territory::East, 0.9 * rate_west)]
                {
                    minwage_entries.push(MinwageEntry {
                        sector: sector_label(
                            s * cfg.industries_per_sector,
                            cfg.industries_per_sector,
                        ),
                        territory,
                        valid_from: chrono::NaiveDate::from_ymd_opt(year, 1, 1).unwrap(),
                        valid_to: chrono::NaiveDate::from_ymd_opt(year, 12, 31),
                        hourly_wage: rate,
                    });
                }
            }
        }
    }
    let schedule = MinwageSchedule::new(minwage_entries);
    let territory_rule = TerritoryRule::default();

    struct YearData {
        /// head counts per firm slot (non-apprentice)
        heads: Vec<u32>,
        /// daily full-time wage per firm slot
        wages: Vec<f64>,
    }
    struct MarketBlock {
        industry: usize,
        estab_ids: Vec<String>,
        estab_effects: Vec<f64>,
        districts: Vec<String>,
        years: Vec<YearData>,
    }

    // market streams: deterministic per (industry, zone), independent of
    // evaluation order
    let mut markets: Vec<MarketBlock> = Vec::with_capacity(cfg.n_industries * cfg.n_zones);
    for industry in 0..cfg.n_industries {
        for zone in 0..cfg.n_zones {
            let market_idx = (industry * cfg.n_zones + zone) as u64;
            let mut rng: ChaCha8Rng = replicate_rng(cfg.seed, 1 + market_idx);

            let estab_effects: Vec<f64> = (0..MAX_FIRMS_PER_MARKET)
                .map(|_| normal(cfg.estab_effect_sd).sample(&mut rng))
                .collect();
            let local_shock: Vec<f64> = (0..cfg.n_years)
                .map(|_| normal(cfg.firm_count_local_sd).sample(&mut rng))
                .collect();

            let mut years = Vec::with_capacity(cfg.n_years);
            for year_idx in 0..cfg.n_years {
                let log_j = industry_mean[industry]
                    + industry_year_shock[industry][year_idx]
                    + local_shock[year_idx];
                let firms = (log_j.exp().round() as usize).clamp(1, MAX_FIRMS_PER_MARKET);

                // draw noise for every potential slot to keep the stream
                // position independent of the realized firm count
                let mut emp_noise = [0.0f64; MAX_FIRMS_PER_MARKET];
                let mut wage_noise = [0.0f64; MAX_FIRMS_PER_MARKET];
                for k in 0..MAX_FIRMS_PER_MARKET {
                    emp_noise[k] = normal(cfg.noise_emp).sample(&mut rng);
                    wage_noise[k] = normal(cfg.noise_wage).sample(&mut rng);
                }

                let mut econ_j = cfg.economy;
                econ_j.firms = firms as u32;
                let per_firm = econ_j.cournot().employment_per_firm;
                let equal_share_hhi = 1.0 / firms as f64;

                let heads: Vec<u32> = (0..firms)
                    .map(|k| {
                        let base = cfg.size_scale
                            * per_firm
                            * equal_share_hhi.powf(cfg.theta_emp)
                            * emp_noise[k].exp();
                        (base.round() as u32).max(1)
                    })
                    .collect();
                let total: f64 = heads.iter().map(|&h| f64::from(h)).sum();
                let hhi_real: f64 = heads
                    .iter()
                    .map(|&h| {
                        let s = f64::from(h) / total;
                        s * s
                    })
                    .sum();

                let wages: Vec<f64> = (0..firms)
                    .map(|k| {
                        cfg.wage_scale
                            * competitive_wage
                            * hhi_real.powf(cfg.theta_wage)
                            * (estab_effects[k]
                                + zone_year_effect[zone][year_idx]
                                + wage_noise[k])
                                .exp()
                    })
                    .collect();

                years.push(YearData { heads, wages });
            }

            let industry_str = industry_code(industry);
            let zone_str = zone_label(zone, per_zone);
            let estab_ids: Vec<String> = (0..MAX_FIRMS_PER_MARKET)
                .map(|slot| format!("E{industry_str}-{zone_str}-{slot:02}"))
                .collect();
            let districts: Vec<String> = (0..MAX_FIRMS_PER_MARKET)
                .map(|slot| district_code(zone, (industry + slot) % per_zone, per_zone))
                .collect();
            markets.push(MarketBlock {
                industry,
                estab_ids,
                estab_effects,
                districts,
                years,
            });
        }
    }

    // expand into worker records; worker ids are stable per (estab, slot)
    let mut records = Vec::new();
    let mut sector_terr_year_heads: BTreeMap<(String, Territory, i32), u64> = BTreeMap::new();
    let mut akm: BTreeMap<String, f64> = BTreeMap::new();

    for market in &markets {
        let industry = industry_code(market.industry);
        let sector = sector_label(market.industry, cfg.industries_per_sector);
        for (year_idx, data) in market.years.iter().enumerate() {
            let year = cfg.start_year + year_idx as i32;
            for (slot, (&heads, &wage)) in data.heads.iter().zip(&data.wages).enumerate() {
                let district = &market.districts[slot];
                let estab_id = &market.estab_ids[slot];
                let territory = territory_rule.classify(district);

                let daily = match schedule.rate_on(
                    &sector,
                    territory,
                    crate::data_model::june_30(year),
                ) {
                    Some(hourly_min) => wage.max(hourly_min * 40.0 / 7.0),
                    None => wage,
                };

                akm.entry(estab_id.clone())
                    .or_insert_with(|| market.estab_effects[slot].exp());

                let n = heads as usize;
                let n_pt = (n as f64 * cfg.pt_share).floor() as usize;
                let n_marginal = (n as f64 * cfg.marginal_share).floor() as usize;
                let n_ft = n - n_pt - n_marginal;
                let n_apprentice = (n as f64 * cfg.apprentice_share).floor() as usize;

                *sector_terr_year_heads
                    .entry((sector.clone(), territory, year))
                    .or_insert(0) += heads as u64;

                for k in 0..n + n_apprentice {
                    let apprentice = k >= n;
                    let (contract, daily_wage) = if apprentice {
                        (Contract::Apprentice, None)
                    } else if k < n_ft {
                        (Contract::RegularFt, Some(daily))
                    } else if k < n_ft + n_pt {
                        (Contract::RegularPt, Some(daily * 0.6))
                    } else {
                        (Contract::Marginal, None)
                    };
                    let prefix = if apprentice { 'A' } else { 'W' };
                    let slot_in_kind = if apprentice { k - n } else { k };
                    let mut worker_id = String::with_capacity(estab_id.len() + 5);
                    worker_id.push(prefix);
                    worker_id.push_str(estab_id);
                    worker_id.push('-');
                    worker_id.push_str(&format!("{slot_in_kind:03}"));
                    records.push(SnapshotRecord {
                        worker_id,
                        estab_id: estab_id.clone(),
                        industry: industry.clone(),
                        region: district.clone(),
                        year,
                        daily_wage,
                        contract,
                    });
                }
            }
        }
    }

    // delineation: every district of a zone maps to the zone label
    let mut delineation_pairs = Vec::new();
    for z in 0..cfg.n_zones {
        for sub in 0..per_zone {
            delineation_pairs.push((district_code(z, sub, per_zone), zone_label(z, per_zone)));
        }
    }

    // commuting flows: dense diagonal, strong within-zone links, weak
    // cross-zone links to the next district
    let mut flows = Vec::new();
    let all_districts: Vec<String> = delineation_pairs.iter().map(|(d, _)| d.clone()).collect();
    for z in 0..cfg.n_zones {
        for sub in 0..per_zone {
            let from = district_code(z, sub, per_zone);
            flows.push((from.clone(), from.clone(), 100.0));
            for other in 0..per_zone {
                if other != sub {
                    flows.push((from.clone(), district_code(z, other, per_zone), 30.0));
                }
            }
            let idx = z * per_zone + sub;
            let next = &all_districts[(idx + 1) % all_districts.len()];
            if next != &from {
                flows.push((from.clone(), next.clone(), 0.5));
            }
        }
    }

    let sector_pairs: Vec<(String, String)> = (0..cfg.n_industries)
        .map(|i| (industry_code(i), sector_label(i, cfg.industries_per_sector)))
        .collect();

    let mut controls = Controls {
        sector: BTreeMap::new(),
        akm,
    };
    for ((sector, territory, year), heads) in &sector_terr_year_heads {
        let s_idx: usize = sector[1..].parse().unwrap();
        let year_idx = (*year - cfg.start_year) as usize;
        controls.sector.insert(
            (sector.clone(), *territory, *year),
            ((*heads as f64).ln(), cba_share[s_idx][year_idx]),
        );
    }

    let ground_truth = vec![
        ("theta_wage".to_owned(), cfg.theta_wage.to_string()),
        ("theta_emp".to_owned(), cfg.theta_emp.to_string()),
        ("n_industries".to_owned(), cfg.n_industries.to_string()),
        ("n_zones".to_owned(), cfg.n_zones.to_string()),
        ("n_years".to_owned(), cfg.n_years.to_string()),
        ("start_year".to_owned(), cfg.start_year.to_string()),
        ("seed".to_owned(), cfg.seed.to_string()),
        ("wage_scale".to_owned(), cfg.wage_scale.to_string()),
        ("size_scale".to_owned(), cfg.size_scale.to_string()),
        ("with_minwage".to_owned(), cfg.with_minwage.to_string()),
        (
            "competitive_wage".to_owned(),
            competitive_wage.to_string(),
        ),
    ];

    SynthOutput {
        records,
        delineation: Delineation::new(delineation_pairs),
        sector_pairs,
        minwage: schedule,
        controls,
        flows,
        ground_truth,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::{build_market_panel, ObjectKind};

    fn small_config(seed: u64) -> SynthConfig {
        SynthConfig {
            n_industries: 4,
            n_zones: 5,
            n_years: 4,
            seed,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let a = synth_panel(&small_config(7));
        let b = synth_panel(&small_config(7));
        assert_eq!(a.records, b.records);
        assert_eq!(a.flows, b.flows);
        let c = synth_panel(&small_config(8));
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn zero_noise_recovers_planted_relation_exactly() {
        let cfg = SynthConfig {
            noise_wage: 0.0,
            noise_emp: 0.0,
            estab_effect_sd: 0.0,
            zone_year_effect_sd: 0.0,
            pt_share: 0.0,
            marginal_share: 0.0,
            apprentice_share: 0.0,
            ..small_config(3)
        };
        let out = synth_panel(&cfg);
        let panel =
            build_market_panel(&out.records, &out.delineation, 4, ObjectKind::Employment)
                .unwrap();

        // every establishment-year wage sits exactly on the planted line
        let base = (cfg.wage_scale * cfg.economy.competitive().wage).ln();
        let mut by_estab_year: BTreeMap<(&str, i32), (&SnapshotRecord, f64)> = BTreeMap::new();
        for rec in &out.records {
            if let Some(w) = rec.daily_wage {
                by_estab_year.insert((rec.estab_id.as_str(), rec.year), (rec, w));
            }
        }
        for ((_, year), (rec, wage)) in by_estab_year {
            let key = crate::data_model::MarketKey {
                industry: crate::data_model::truncate_industry(&rec.industry, 4).to_owned(),
                zone: rec.region.clone(),
                year,
            };
            let hhi = panel.hhi_of(&key).unwrap();
            let predicted = base + cfg.theta_wage * hhi.ln();
            assert!(
                (wage.ln() - predicted).abs() < 1e-9,
                "wage {} off the planted line {predicted}",
                wage.ln()
            );
        }
    }

    #[test]
    fn firm_counts_are_heterogeneous() {
        let out = synth_panel(&small_config(1));
        let panel =
            build_market_panel(&out.records, &out.delineation, 4, ObjectKind::Employment)
                .unwrap();
        let counts: std::collections::BTreeSet<usize> = panel
            .cells
            .values()
            .map(|c| c.firm_count())
            .collect();
        assert!(counts.len() > 2, "expected varied firm counts, got {counts:?}");
    }

    #[test]
    fn minwage_mode_emits_schedule_and_lifts_wages() {
        let cfg = SynthConfig {
            with_minwage: true,
            ..small_config(5)
        };
        let out = synth_panel(&cfg);
        assert!(!out.minwage.entries.is_empty());
        // post-regulation full-time wages respect the implied daily floor
        for rec in &out.records {
            if rec.contract != Contract::RegularFt {
                continue;
            }
            let sector = out.sector_map().sector_of(&rec.industry).unwrap().to_owned();
            if let Some(rate) = out.minwage.rate_on(
                &sector,
                Territory::West,
                crate::data_model::june_30(rec.year),
            ) {
                assert!(rec.daily_wage.unwrap() >= rate * 40.0 / 7.0 - 1e-9);
            }
        }
    }

    #[test]
    fn companion_files_are_consistent() {
        let cfg = SynthConfig {
            districts_per_zone: 2,
            ..small_config(2)
        };
        let out = synth_panel(&cfg);
        assert_eq!(out.delineation.len(), cfg.n_zones * 2);
        for rec in &out.records {
            assert!(out.delineation.zone_of(&rec.region).is_ok());
            assert!(out.sector_map().sector_of(&rec.industry).is_some());
        }
        assert_eq!(out.sector_pairs.len(), cfg.n_industries);
        assert!(!out.controls.sector.is_empty());
        assert!(!out.controls.akm.is_empty());
        assert!(out
            .ground_truth
            .iter()
            .any(|(k, v)| k == "theta_wage" && v == &cfg.theta_wage.to_string()));
    }
}
