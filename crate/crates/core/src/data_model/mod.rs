//! Domain records, input-file parsing, and aggregation of worker snapshots
//! into market-level and establishment-level panels.

mod estab;
mod io;
mod market;
mod records;

pub use estab::{
    build_estab_panel, hourly_from_daily, june_30, kaitz_index, kaitz_index_with,
    kaitz_quintile, Controls, EstabPanel, EstabRow, EstabSkipReport, MinwageEntry,
    MinwageSchedule, PanelOptions, SectorMap, Territory, TerritoryRule,
    DEFAULT_DAYS_PER_WEEK, DEFAULT_HOURS_PER_WEEK, KAITZ_QUINTILE_CUTS,
};
pub use io::{
    read_controls, read_delineation, read_estab_panel, read_flows, read_market_panel,
    read_minwage_schedule, read_sector_map, write_controls, write_delineation,
    write_estab_panel, write_flows, write_market_panel, write_minwage_schedule,
    write_sectors, write_snapshots, ESTAB_PANEL_HEADER, MARKET_PANEL_HEADER,
};
pub use market::{
    build_market_panel, outward_mobility, truncate_industry, Delineation, MarketCell,
    MarketKey, MarketPanel, MarketSkipReport, ObjectKind,
};
pub use records::{
    main_jobs, parse_snapshot_file, parse_snapshot_reader, Contract, SnapshotRecord,
    SNAPSHOT_HEADER,
};
