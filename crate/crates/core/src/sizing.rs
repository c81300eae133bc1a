//! Room count and room envelope sizing from grouped artifacts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{group_by, ArtifactGroup, ArtifactKind, ArtifactRecord, Catalog, CatalogError, GroupKeyKind};

/// Entrance allowance per wall; applied to two parallel walls.
pub const ENTRANCE_WALL_M: f64 = 2.0;
/// X extent used for paintings and sculptures that carry no size.
pub const DEFAULT_ARTIFACT_M: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SizingConstants {
    pub label_width_m: f64,
    pub interspace_m: f64,
    pub video_holder_m: f64,
    pub sound_holder_m: f64,
    pub text_holder_m: f64,
    pub min_side_m: f64,
}

impl Default for SizingConstants {
    fn default() -> Self {
        SizingConstants {
            label_width_m: 0.5,
            interspace_m: 0.5,
            video_holder_m: 2.0,
            sound_holder_m: 1.0,
            text_holder_m: 1.0,
            min_side_m: 2.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("sizing constant {name} must be a positive finite number, got {value}")]
pub struct InvalidConstant {
    pub name: &'static str,
    pub value: f64,
}

impl SizingConstants {
    pub fn validate(&self) -> Result<(), InvalidConstant> {
        let fields = [
            ("label_width_m", self.label_width_m),
            ("interspace_m", self.interspace_m),
            ("video_holder_m", self.video_holder_m),
            ("sound_holder_m", self.sound_holder_m),
            ("text_holder_m", self.text_holder_m),
            ("min_side_m", self.min_side_m),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(InvalidConstant { name, value });
            }
        }
        Ok(())
    }

    /// Fixed holder width for media kinds; `None` for paintings and sculptures.
    pub fn holder_width(&self, kind: ArtifactKind) -> Option<f64> {
        match kind {
            ArtifactKind::Video => Some(self.video_holder_m),
            ArtifactKind::Sound => Some(self.sound_holder_m),
            ArtifactKind::Text => Some(self.text_holder_m),
            ArtifactKind::Painting | ArtifactKind::Sculpture => None,
        }
    }
}

/// Room envelope for one group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoomSpec {
    pub group: ArtifactGroup,
    pub width_m: f64,
    pub depth_m: f64,
    /// Length of two perpendicular walls before the minimum-side clamp.
    pub wall_sum_m: f64,
}

/// Width the artifact occupies along the wall.
pub fn artifact_extent(record: &ArtifactRecord, c: &SizingConstants) -> f64 {
    c.holder_width(record.kind)
        .or(record.size.map(|s| s.width_m))
        .unwrap_or(DEFAULT_ARTIFACT_M)
}

pub fn room_dimensions(group: &ArtifactGroup, c: &SizingConstants) -> RoomSpec {
    let mut sum = 0.0;
    for record in &group.records {
        let extent = artifact_extent(record, c);
        sum += extent;
        sum += c.label_width_m + c.interspace_m;
        sum += extent / 4.0;
    }
    sum += 2.0 * ENTRANCE_WALL_M;
    let wall_sum_m = sum / 2.0;
    // square split of the perpendicular pair
    let side = (wall_sum_m / 2.0).max(c.min_side_m);
    RoomSpec {
        group: group.clone(),
        width_m: side,
        depth_m: side,
        wall_sum_m,
    }
}

pub fn plan_rooms(catalog: &Catalog, key: GroupKeyKind, c: &SizingConstants) -> Result<Vec<RoomSpec>, CatalogError> {
    Ok(group_by(catalog, key)?
        .iter()
        .map(|g| room_dimensions(g, c))
        .collect())
}
