use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ObjectKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub rgba: [u8; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub texture_slot: Option<String>,
}

/// Maps opaque material ids to display colours.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsManifest {
    pub materials: BTreeMap<String, Material>,
}

impl Default for MaterialsManifest {
    fn default() -> Self {
        let mut materials = BTreeMap::new();
        for kind in ObjectKind::ALL {
            let rgba = match kind {
                ObjectKind::Floor => [168, 140, 110, 255],
                ObjectKind::Roof => [220, 220, 215, 255],
                ObjectKind::Wall | ObjectKind::CornerWall => [236, 232, 224, 255],
                ObjectKind::Door => [120, 82, 50, 255],
                ObjectKind::Window => [170, 205, 230, 128],
                ObjectKind::Stairs => [150, 150, 150, 255],
                ObjectKind::Landscape => [96, 140, 80, 255],
                ObjectKind::Furniture => [90, 70, 60, 255],
                ObjectKind::ArtifactHolder => [40, 40, 40, 255],
            };
            materials.insert(kind.as_str().to_string(), Material { rgba, texture_slot: None });
        }
        MaterialsManifest { materials }
    }
}

impl MaterialsManifest {
    pub fn get(&self, id: &str) -> Option<&Material> {
        self.materials.get(id)
    }

    /// Adjusts a material's colour, creating the entry if needed.
    pub fn set_rgb(&mut self, id: &str, r: u8, g: u8, b: u8) {
        let m = self
            .materials
            .entry(id.to_string())
            .or_insert(Material { rgba: [255, 255, 255, 255], texture_slot: None });
        m.rgba = [r, g, b, m.rgba[3]];
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
