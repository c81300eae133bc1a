use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_KELVIN: f64 = 1000.0;
pub const MAX_KELVIN: f64 = 12000.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LightingError {
    #[error("temperature {0} K is outside [1000, 12000]")]
    OutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

/// Tanner Helland's piecewise fit of blackbody colour.
pub fn kelvin_to_color(temperature_k: f64) -> Result<Rgb, LightingError> {
    if !(MIN_KELVIN..=MAX_KELVIN).contains(&temperature_k) {
        return Err(LightingError::OutOfRange(temperature_k));
    }
    let t = temperature_k / 100.0;
    let r = if t <= 66.0 {
        255.0
    } else {
        329.698727446 * (t - 60.0).powf(-0.1332047592)
    };
    let g = if t <= 66.0 {
        99.4708025861 * t.ln() - 161.1195681661
    } else {
        288.1221695283 * (t - 60.0).powf(-0.0755148492)
    };
    let b = if t >= 66.0 {
        255.0
    } else if t <= 19.0 {
        0.0
    } else {
        138.5177312231 * (t - 10.0).ln() - 305.0447927307
    };
    let channel = |v: f64| v.round().clamp(0.0, 255.0) as u8;
    Ok(Rgb { r: channel(r), g: channel(g), b: channel(b) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightingSettings {
    pub sun_on: bool,
    pub ceiling_on: bool,
    pub spot_on: bool,
    temperature_k: f64,
}

impl Default for LightingSettings {
    fn default() -> Self {
        LightingSettings { sun_on: true, ceiling_on: true, spot_on: false, temperature_k: 4000.0 }
    }
}

impl LightingSettings {
    pub fn temperature_k(&self) -> f64 {
        self.temperature_k
    }

    /// Stores the temperature clamped to the supported range.
    pub fn set_temperature_k(&mut self, k: f64) {
        self.temperature_k = if k.is_nan() { 4000.0 } else { k.clamp(MIN_KELVIN, MAX_KELVIN) };
    }

    pub fn color(&self) -> Rgb {
        kelvin_to_color(self.temperature_k).expect("temperature is kept in range")
    }

    pub(crate) fn is_valid(&self) -> bool {
        (MIN_KELVIN..=MAX_KELVIN).contains(&self.temperature_k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pivots() {
        assert_eq!(kelvin_to_color(6600.0).unwrap(), Rgb { r: 255, g: 255, b: 255 });
        assert_eq!(kelvin_to_color(1000.0).unwrap(), Rgb { r: 255, g: 68, b: 0 });
        assert_eq!(kelvin_to_color(13000.0), Err(LightingError::OutOfRange(13000.0)));
        assert!(kelvin_to_color(999.0).is_err());
    }

    #[test]
    fn clamps_stored_temperature() {
        let mut l = LightingSettings::default();
        l.set_temperature_k(50_000.0);
        assert_eq!(l.temperature_k(), MAX_KELVIN);
        l.set_temperature_k(10.0);
        assert_eq!(l.temperature_k(), MIN_KELVIN);
        assert_eq!(l.color().r, 255);
    }
}
