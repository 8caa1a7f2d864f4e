pub mod bounds;
pub mod concentration;
pub mod delineate;
pub mod elasticity;
pub mod ingest;
pub mod instrument;
pub mod regress;
pub mod report;
pub mod simulate;
pub mod synth;

use std::path::{Path, PathBuf};

use monopsono::data_model::ObjectKind;
use monopsono::{Error, Result};

use crate::config::{IniConfig, Section};

/// Resolved global options shared by every subcommand. Flag values beat
/// config-section values, which beat defaults.
pub struct Ctx {
    pub config: IniConfig,
    pub out_dir: PathBuf,
    seed_flag: Option<u64>,
    digits_flag: Option<u8>,
    object_flag: Option<ObjectKind>,
    spec_flag: Option<String>,
}

impl Ctx {
    pub fn new(
        config: Option<&Path>,
        out_dir: &Path,
        seed: Option<u64>,
        digits: Option<u8>,
        object: Option<&str>,
        spec: Option<&str>,
    ) -> Result<Ctx> {
        let config = match config {
            Some(path) => IniConfig::load(path)?,
            None => IniConfig::default(),
        };
        let object_flag = object.map(str::parse).transpose()?;
        std::fs::create_dir_all(out_dir)?;
        Ok(Ctx {
            config,
            out_dir: out_dir.to_owned(),
            seed_flag: seed,
            digits_flag: digits,
            object_flag,
            spec_flag: spec.map(str::to_owned),
        })
    }

    pub fn section(&self, name: &str) -> Section<'_> {
        self.config.section(name)
    }

    pub fn seed(&self, section: &Section<'_>) -> Result<u64> {
        Ok(match self.seed_flag {
            Some(s) => s,
            None => section.parse_or("seed", 0)?,
        })
    }

    pub fn digits(&self, section: &Section<'_>) -> Result<u8> {
        let digits = match self.digits_flag {
            Some(d) => d,
            None => section.parse_or("digits", 4)?,
        };
        if !(3..=5).contains(&digits) {
            return Err(Error::domain(format!("digits {digits} must be 3, 4, or 5")));
        }
        Ok(digits)
    }

    pub fn object(&self, section: &Section<'_>) -> Result<ObjectKind> {
        Ok(match self.object_flag {
            Some(o) => o,
            None => section
                .get("object")
                .map(str::parse)
                .transpose()?
                .unwrap_or(ObjectKind::Employment),
        })
    }

    pub fn spec_name(&self, section: &Section<'_>) -> Result<String> {
        self.spec_flag
            .clone()
            .or_else(|| section.get("spec").map(str::to_owned))
            .ok_or_else(|| Error::domain("no specification: pass --spec or set `spec` in the config"))
    }

    /// Specification resolution: a `[spec.NAME]` config section wins, then
    /// a plain-text key-value file at the given path, then the preset.
    pub fn spec_config(&self, name: &str) -> Result<monopsono::minwage::SpecConfig> {
        let section_name = format!("spec.{name}");
        if self.config.has_section(&section_name) {
            let entries = self.section(&section_name).entries();
            let map: std::collections::BTreeMap<&str, &str> = entries
                .iter()
                .map(|(k, v)| (k.as_str(), v.as_str()))
                .collect();
            return monopsono::minwage::SpecConfig::from_map(&map);
        }
        let as_path = Path::new(name);
        if as_path.is_file() {
            let text = std::fs::read_to_string(as_path)?;
            return monopsono::minwage::SpecConfig::from_key_values(&text);
        }
        monopsono::minwage::SpecConfig::preset(name)
    }

    /// Input path: config override or the default file in the out dir.
    pub fn input_path(&self, section: &Section<'_>, key: &str, default_name: &str) -> PathBuf {
        section
            .get_path(key)
            .unwrap_or_else(|| self.out_dir.join(default_name))
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

/// Log level from `MONOPSONO_LOG` (error, info, debug); default info.
fn log_level() -> u8 {
    match std::env::var("MONOPSONO_LOG").as_deref() {
        Ok("error") => 0,
        Ok("debug") => 2,
        _ => 1,
    }
}

pub fn log_info(msg: impl AsRef<str>) {
    if log_level() >= 1 {
        eprintln!("[info] {}", msg.as_ref());
    }
}

pub fn log_debug(msg: impl AsRef<str>) {
    if log_level() >= 2 {
        eprintln!("[debug] {}", msg.as_ref());
    }
}
