//! Engine configuration loaded from TOML.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bspca::DEFAULT_MAX_RESTARTS;
use crate::rng::RNG_ALGORITHM;
use crate::sizing::SizingConstants;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported rng {0:?}; this build uses {RNG_ALGORITHM}")]
    UnsupportedRng(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneDefaults {
    pub grid_height_m: f64,
    pub grid_levels: u32,
}

impl Default for SceneDefaults {
    fn default() -> Self {
        SceneDefaults { grid_height_m: 3.0, grid_levels: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BspDefaults {
    pub footprint_w: i32,
    pub footprint_d: i32,
    pub room_min: i32,
    pub room_max: i32,
    pub corridor_min: i32,
    pub corridor_max: i32,
    pub max_restarts: u32,
}

impl Default for BspDefaults {
    fn default() -> Self {
        BspDefaults {
            footprint_w: 48,
            footprint_d: 48,
            room_min: 3,
            room_max: 8,
            corridor_min: 1,
            corridor_max: 2,
            max_restarts: DEFAULT_MAX_RESTARTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub rng: String,
    pub sizing: SizingConstants,
    pub scene: SceneDefaults,
    pub bsp: BspDefaults,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            rng: RNG_ALGORITHM.to_string(),
            sizing: SizingConstants::default(),
            scene: SceneDefaults::default(),
            bsp: BspDefaults::default(),
        }
    }
}

impl EngineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: EngineConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rng != RNG_ALGORITHM {
            return Err(ConfigError::UnsupportedRng(self.rng.clone()));
        }
        self.sizing.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(self.scene.grid_height_m.is_finite() && self.scene.grid_height_m > 0.0) || self.scene.grid_levels == 0 {
            return Err(ConfigError::Invalid("scene grid must have positive height and at least one level".into()));
        }
        Ok(())
    }
}
