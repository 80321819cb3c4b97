//! Tool configuration file.
//!
//! TOML with one table per stage; every key is optional and falls back to
//! the documented default:
//!
//! ```toml
//! packet_us = 10000
//!
//! [filter]
//! s = 4
//! dt_ba_us = 1500
//! dt_refr_us = 10
//! dt_pol_us = 5000
//! order = ["first_event", "refractory", "hot_pixel", "background_activity"]
//! strict_hotpixel = false
//!
//! [tbr]
//! bin_us = 4166
//! bit_order = "msb"
//! zero_fill_partial = false
//!
//! [roi]
//! interval_us = 30000
//! activity_threshold = 3
//! min_events = 10
//! ```

use serde::{Deserialize, Serialize};

use crate::filter::{ConfigError, FilterConfig, FilterConfigRepr};
use crate::roi::RoiConfig;
use crate::tbr::TbrConfig;

pub const DEFAULT_PACKET_US: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolConfig {
    pub packet_us: u64,
    pub filter: FilterConfig,
    pub tbr: TbrConfig,
    pub roi: RoiConfig,
}

impl Default for ToolConfig {
    fn default() -> Self {
        ToolConfig {
            packet_us: DEFAULT_PACKET_US,
            filter: FilterConfig::default(),
            tbr: TbrConfig::default(),
            roi: RoiConfig::default(),
        }
    }
}

/// Parsed but unvalidated, so range errors surface as themselves rather
/// than as TOML syntax errors.
#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ToolConfigFile {
    packet_us: u64,
    filter: FilterConfigRepr,
    tbr: TbrConfig,
    roi: RoiConfig,
}

impl Default for ToolConfigFile {
    fn default() -> Self {
        let d = ToolConfig::default();
        ToolConfigFile {
            packet_us: d.packet_us,
            filter: d.filter.into(),
            tbr: d.tbr,
            roi: d.roi,
        }
    }
}

impl ToolConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let file: ToolConfigFile =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let cfg = ToolConfig {
            packet_us: file.packet_us,
            filter: file.filter.try_into()?,
            tbr: file.tbr,
            roi: file.roi,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.packet_us == 0 {
            return Err(ConfigError::Invalid("packet_us must be positive".into()));
        }
        self.filter.validate()?;
        self.tbr
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.roi
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}
