//! Versioned layout JSON with canonical byte output.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{
    Generation, LightingSettings, PlacedObject, ScaleMode, SceneError, TileScene, TileSize,
};

pub const LAYOUT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("schema version {found} is not supported (expected {expected})")]
    SchemaVersionMismatch { found: u64, expected: u32 },
    #[error("schema violation at {path}: {reason}")]
    SchemaViolation { path: String, reason: String },
}

impl LayoutError {
    fn at(path: impl Into<String>, reason: impl ToString) -> Self {
        LayoutError::SchemaViolation { path: path.into(), reason: reason.to_string() }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneSettings {
    grid_levels: u32,
    grid_height_m: f64,
    tile_size: TileSize,
    scale_mode: ScaleMode,
    lighting: LightingSettings,
    next_object_id: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutDocument {
    schema_version: u32,
    generator: Option<String>,
    params: Value,
    layout: Value,
    scene: SceneSettings,
    objects: Vec<PlacedObject>,
}

pub(super) fn export(scene: &TileScene) -> String {
    let (generator, params, layout) = match &scene.generation {
        Some(g) => (Some(g.generator.clone()), g.params.clone(), g.layout.clone()),
        None => (None, Value::Null, Value::Null),
    };
    let doc = LayoutDocument {
        schema_version: LAYOUT_SCHEMA_VERSION,
        generator,
        params,
        layout,
        scene: SceneSettings {
            grid_levels: scene.grid_levels,
            grid_height_m: scene.grid_height_m,
            tile_size: scene.tile_size,
            scale_mode: scene.scale_mode,
            lighting: scene.lighting,
            next_object_id: scene.next_id,
        },
        objects: scene.objects.clone(),
    };
    canonical_json(&serde_json::to_value(&doc).expect("layout serializes"))
}

/// Canonical text of any JSON value, newline-terminated.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, 0, &mut out);
    out.push('\n');
    out
}

/// Pretty JSON with keys sorted at every level, independent of how the
/// map type orders its entries.
fn write_canonical(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize, out: &mut String| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Array(items) if !items.is_empty() => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(indent + 2, out);
                write_canonical(item, indent + 2, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(indent + 2, out);
                out.push_str(&serde_json::to_string(k).expect("string"));
                out.push_str(": ");
                write_canonical(&map[*k], indent + 2, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
        other => out.push_str(&serde_json::to_string(other).expect("scalar")),
    }
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

pub(super) fn import(document: &str) -> Result<TileScene, LayoutError> {
    let value: Value = serde_json::from_str(document).map_err(|e| LayoutError::at("/", e))?;
    let version = value
        .get("schema_version")
        .ok_or_else(|| LayoutError::at("/schema_version", "missing field"))?;
    let found = version
        .as_u64()
        .ok_or_else(|| LayoutError::at("/schema_version", "expected an integer"))?;
    if found != LAYOUT_SCHEMA_VERSION as u64 {
        return Err(LayoutError::SchemaVersionMismatch { found, expected: LAYOUT_SCHEMA_VERSION });
    }
    let doc: LayoutDocument = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = pointer(e.path());
        LayoutError::at(path, e.into_inner())
    })?;

    let s = doc.scene;
    let mut scene = TileScene::new(s.grid_levels, s.grid_height_m, s.tile_size).map_err(|e| {
        let field = if s.grid_levels == 0 { "grid_levels" } else { "grid_height_m" };
        LayoutError::at(format!("/scene/{field}"), e)
    })?;
    if !s.lighting.is_valid() {
        return Err(LayoutError::at("/scene/lighting/temperature_k", "temperature outside [1000, 12000]"));
    }
    scene.scale_mode = s.scale_mode;
    scene.lighting = s.lighting;
    scene.next_id = s.next_object_id;
    scene.generation = match doc.generator {
        Some(generator) => Some(Generation { generator, params: doc.params, layout: doc.layout }),
        None if doc.params.is_null() && doc.layout.is_null() => None,
        None => return Err(LayoutError::at("/generator", "params and layout require a generator")),
    };
    scene.objects = doc.objects;

    let mut seen = std::collections::HashSet::new();
    for (i, o) in scene.objects.iter().enumerate() {
        if o.id == 0 || !seen.insert(o.id) {
            return Err(LayoutError::at(format!("/objects/{i}/id"), "object ids must be unique and non-zero"));
        }
        if o.id >= scene.next_id {
            return Err(LayoutError::at("/scene/next_object_id", "must exceed every object id"));
        }
        scene
            .check_placement(o, Some(o.id))
            .map_err(|e: SceneError| LayoutError::at(format!("/objects/{i}"), e))?;
    }
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{ObjectKind, Pose};

    #[test]
    fn empty_scene_document() {
        let s = TileScene::new(1, 3.0, TileSize::One).unwrap();
        let doc = s.export_layout();
        let v: Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["objects"], Value::Array(vec![]));
        assert_eq!(v["schema_version"], 1);
        assert_eq!(TileScene::import_layout(&doc).unwrap(), s);
    }

    #[test]
    fn keys_are_sorted() {
        let mut s = TileScene::new(1, 3.0, TileSize::One).unwrap();
        s.insert(PlacedObject::new(ObjectKind::Floor, "floor", Pose::floor(0, 1, 1))).unwrap();
        s.set_generation("manual", serde_json::json!({"z": 1, "a": 2}), Value::Null);
        let doc = s.export_layout();
        assert!(doc.find("\"a\"").unwrap() < doc.find("\"z\"").unwrap());
        assert!(doc.find("\"generator\"").unwrap() < doc.find("\"layout\"").unwrap());
        assert_eq!(TileScene::import_layout(&doc).unwrap().export_layout(), doc);
    }

    #[test]
    fn rejects_unknown_kind() {
        let mut s = TileScene::new(1, 3.0, TileSize::One).unwrap();
        s.insert(PlacedObject::new(ObjectKind::Floor, "floor", Pose::floor(0, 1, 1))).unwrap();
        let doc = s.export_layout().replace("\"kind\": \"floor\"", "\"kind\": \"gazebo\"");
        match TileScene::import_layout(&doc) {
            Err(LayoutError::SchemaViolation { path, .. }) => assert_eq!(path, "/objects/0/kind"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_other_versions() {
        let doc = TileScene::new(1, 3.0, TileSize::One).unwrap().export_layout().replace(
            "\"schema_version\": 1",
            "\"schema_version\": 7",
        );
        assert_eq!(
            TileScene::import_layout(&doc),
            Err(LayoutError::SchemaVersionMismatch { found: 7, expected: 1 })
        );
    }

    #[test]
    fn rejects_dangling_wall() {
        let mut s = TileScene::new(1, 3.0, TileSize::One).unwrap();
        s.insert(PlacedObject::new(ObjectKind::Floor, "floor", Pose::floor(0, 1, 1))).unwrap();
        s.insert(PlacedObject::new(ObjectKind::Wall, "wall", Pose::edge(0, 1, 1, crate::scene::Side::N))).unwrap();
        let doc = s.export_layout().replacen("\"x\": 1", "\"x\": 2", 1);
        assert!(matches!(
            TileScene::import_layout(&doc),
            Err(LayoutError::SchemaViolation { path, .. }) if path.starts_with("/objects/")
        ));
    }
}
