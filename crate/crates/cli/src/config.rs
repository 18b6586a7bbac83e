use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_ENV: &str = "LIQUILENS_CONFIG";

pub const DEFAULT_DIAMETER: f64 = 2.0;
pub const DEFAULT_INDEX: f64 = 1.33;
pub const DEFAULT_F_NUMBER: f64 = 2.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

/// Resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub diameter: f64,
    pub index: f64,
    pub f_number: f64,
    pub output_format: OutputFormat,
    pub plot_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            diameter: DEFAULT_DIAMETER,
            index: DEFAULT_INDEX,
            f_number: DEFAULT_F_NUMBER,
            output_format: OutputFormat::Table,
            plot_path: None,
        }
    }
}

/// Every setting as optional, for layering.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub diameter: Option<f64>,
    pub index: Option<f64>,
    pub f_number: Option<f64>,
    pub format: Option<OutputFormat>,
    pub plot: Option<PathBuf>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Settings from the file named by `LIQUILENS_CONFIG`, if set.
    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) if !path.is_empty() => Self::from_file(Path::new(&path)),
            _ => Ok(PartialConfig::default()),
        }
    }

    /// `self` wins over `lower`.
    pub fn over(self, lower: PartialConfig) -> PartialConfig {
        PartialConfig {
            diameter: self.diameter.or(lower.diameter),
            index: self.index.or(lower.index),
            f_number: self.f_number.or(lower.f_number),
            format: self.format.or(lower.format),
            plot: self.plot.or(lower.plot),
        }
    }

    pub fn resolve(self) -> RunConfig {
        let d = RunConfig::default();
        RunConfig {
            diameter: self.diameter.unwrap_or(d.diameter),
            index: self.index.unwrap_or(d.index),
            f_number: self.f_number.unwrap_or(d.f_number),
            output_format: self.format.unwrap_or(d.output_format),
            plot_path: self.plot.or(d.plot_path),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = PartialConfig::default().resolve();
        assert_eq!(c.diameter, 2.0);
        assert_eq!(c.index, 1.33);
        assert_eq!(c.f_number, 2.8);
        assert_eq!(c.output_format, OutputFormat::Table);
        assert!(c.plot_path.is_none());
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file: PartialConfig = toml::from_str("diameter = 3.0\nindex = 1.41\nformat = \"csv\"").unwrap();
        let flags = PartialConfig {
            index: Some(1.5),
            ..Default::default()
        };
        let c = flags.over(file).resolve();
        assert_eq!(c.diameter, 3.0);
        assert_eq!(c.index, 1.5);
        assert_eq!(c.f_number, 2.8);
        assert_eq!(c.output_format, OutputFormat::Csv);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<PartialConfig>("diametre = 3.0").is_err());
    }
}
