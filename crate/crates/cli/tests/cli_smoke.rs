//! Behavioral tests for the command-line surface: exit codes, failure
//! classes, logging control, and spec-file resolution.

use std::path::Path;
use std::process::{Command, Output};

fn monopsono(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monopsono"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary should run")
}

#[test]
fn unknown_subcommand_exits_2_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = monopsono(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Usage"), "expected usage text, got: {stderr}");
}

#[test]
fn parse_failure_exits_1_with_class() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("snapshots.csv"),
        "worker_id,estab_id,industry,region,year,daily_wage,contract\n\
         w1,e1,41201,r1,2005,92.5,freelancer\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("delineation.csv"), "district,zone\nr1,r1\n").unwrap();
    let out = monopsono(&["concentration"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.lines().any(|l| l.starts_with("error[parse]")),
        "expected a one-line parse diagnostic, got: {stderr}"
    );
    assert!(stderr.contains("row 1") && stderr.contains("contract"));
}

#[test]
fn domain_failure_exits_1_with_class() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("snapshots.csv"),
        "worker_id,estab_id,industry,region,year,daily_wage,contract\n\
         w1,e1,41201,unmapped,2005,92.5,regular_ft\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("delineation.csv"), "district,zone\nr1,r1\n").unwrap();
    let out = monopsono(&["concentration"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.lines().any(|l| l.starts_with("error[domain]")));
}

#[test]
fn log_env_var_controls_verbosity() {
    let dir = tempfile::tempdir().unwrap();
    let run = |level: &str| {
        Command::new(env!("CARGO_BIN_EXE_monopsono"))
            .args(["simulate", "--out"])
            .arg(dir.path())
            .env("MONOPSONO_LOG", level)
            .output()
            .unwrap()
    };
    let quiet = run("error");
    assert!(quiet.status.success());
    assert!(String::from_utf8_lossy(&quiet.stderr).is_empty());
    let chatty = run("info");
    assert!(String::from_utf8_lossy(&chatty.stderr).contains("[info]"));
}

#[test]
fn simulate_emits_curve_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = monopsono(&["simulate"], dir.path());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    assert!(csv.starts_with("j,wmin,d_wage,d_employment,regime\n"));
    assert!(csv.contains("supply_determined"));
    assert!(dir.path().join("manifest_simulate.json").exists());
}

#[test]
fn spec_resolves_from_key_value_file() {
    let dir = tempfile::tempdir().unwrap();
    // tiny deterministic panel: enough establishments for a regression
    let mut snapshots =
        String::from("worker_id,estab_id,industry,region,year,daily_wage,contract\n");
    for estab in 0..6 {
        for year in 2004..2008 {
            for worker in 0..3 {
                let wage = 80.0 + f64::from(estab) * 3.0 + f64::from(year - 2004) * (1.0 + f64::from(estab % 3));
                snapshots.push_str(&format!(
                    "w{estab}_{worker},e{estab},4120{},r{},{year},{wage},regular_ft\n",
                    estab % 2,
                    estab % 2,
                ));
            }
        }
    }
    std::fs::write(dir.path().join("snapshots.csv"), snapshots).unwrap();
    std::fs::write(
        dir.path().join("delineation.csv"),
        "district,zone\nr0,r0\nr1,r1\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("sectors.csv"),
        "industry_prefix,sector\n4120,roofing\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("minwage.csv"),
        "sector,territory,valid_from,valid_to,hourly_wage\n\
         roofing,west,2005-01-01,2005-12-31,8.5\n\
         roofing,west,2006-01-01,,9.1\n",
    )
    .unwrap();
    assert!(monopsono(&["ingest"], dir.path()).status.success());

    let spec_path = dir.path().join("my_spec.txt");
    std::fs::write(
        &spec_path,
        "design = minwage_eq4\noutcome = mean_wage\nfe = estab\n\
         interaction = none\ncontrols = false\ntrends = false\n",
    )
    .unwrap();
    let out = monopsono(&["regress", "--spec", spec_path.to_str().unwrap()], dir.path());
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let fit = std::fs::read_to_string(dir.path().join("fit_result.csv")).unwrap();
    assert!(fit.starts_with("term,coefficient,se,t,p\nln_minwage,"));
}

#[test]
fn ingest_then_instrument_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    // two zones sharing an industry so the instrument exists
    let mut snapshots =
        String::from("worker_id,estab_id,industry,region,year,daily_wage,contract\n");
    for zone in ["r0", "r1"] {
        for estab in 0..3 {
            for worker in 0..2 {
                snapshots.push_str(&format!(
                    "w{zone}{estab}{worker},e{zone}{estab},41201,{zone},2005,90,regular_ft\n"
                ));
            }
        }
    }
    std::fs::write(dir.path().join("snapshots.csv"), snapshots).unwrap();
    std::fs::write(
        dir.path().join("delineation.csv"),
        "district,zone\nr0,r0\nr1,r1\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("sectors.csv"),
        "industry_prefix,sector\n4120,roofing\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("minwage.csv"),
        "sector,territory,valid_from,valid_to,hourly_wage\n",
    )
    .unwrap();
    assert!(monopsono(&["ingest"], dir.path()).status.success());
    assert!(monopsono(&["instrument"], dir.path()).status.success());
    let instrument = std::fs::read_to_string(dir.path().join("instrument.csv")).unwrap();
    // each zone sees the other zone's ln(1/3)
    let expected = (1.0f64 / 3.0).ln();
    assert!(instrument.contains(&format!("4120,r0,2005,{expected}")));
    assert!(instrument.contains(&format!("4120,r1,2005,{expected}")));
}
