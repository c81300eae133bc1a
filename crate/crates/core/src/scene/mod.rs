//! Tile scenes: the grid/placement system every generator emits into and
//! users edit afterwards.
//!
//! Poses are stored in human-scale meters. The model-scale toggle only
//! changes realized world coordinates (×1/20), so switching modes never
//! touches stored data.

mod layout;
mod lighting;
mod materials;
mod obj;

pub use layout::{canonical_json, LayoutError, LAYOUT_SCHEMA_VERSION};
pub use lighting::{kelvin_to_color, LightingError, LightingSettings, Rgb, MAX_KELVIN, MIN_KELVIN};
pub use materials::{Material, MaterialsManifest};
pub use obj::BoxGeometry;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::ArtifactKind;

pub const MODEL_SCALE_FACTOR: f64 = 1.0 / 20.0;
/// Thickness of wall panels, floor and roof slabs.
pub const SLAB_M: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("cell ({x}, {y}) on level {level} already holds a {kind}")]
    CellOccupied { level: u32, x: i32, y: i32, kind: &'static str },
    #[error("no floor tile within one tile of the requested point")]
    NoAdjacentFloor,
    #[error("level {level} is outside 0..{levels}")]
    LevelOutOfRange { level: u32, levels: u32 },
    #[error("unknown object id {0}")]
    UnknownId(u64),
    #[error("invalid object: {0}")]
    InvalidObject(String),
    #[error("invalid scene settings: {0}")]
    InvalidSettings(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    N,
    E,
    S,
    W,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::N, Side::E, Side::S, Side::W];

    /// Yaw of a vertical element on this edge, degrees clockwise from north.
    pub fn rotation_deg(self) -> f64 {
        match self {
            Side::N => 0.0,
            Side::E => 90.0,
            Side::S => 180.0,
            Side::W => 270.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::N => Side::S,
            Side::E => Side::W,
            Side::S => Side::N,
            Side::W => Side::E,
        }
    }

    /// Grid step toward this side; y grows southward.
    pub fn delta(self) -> (i32, i32) {
        match self {
            Side::N => (0, -1),
            Side::E => (1, 0),
            Side::S => (0, 1),
            Side::W => (-1, 0),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Side::N => 'n',
            Side::E => 'e',
            Side::S => 's',
            Side::W => 'w',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum TileSize {
    One,
    Two,
    Four,
}

impl TileSize {
    pub fn meters(self) -> f64 {
        u8::from(self) as f64
    }
}

impl From<TileSize> for u8 {
    fn from(t: TileSize) -> u8 {
        match t {
            TileSize::One => 1,
            TileSize::Two => 2,
            TileSize::Four => 4,
        }
    }
}

impl TryFrom<u8> for TileSize {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            1 => Ok(TileSize::One),
            2 => Ok(TileSize::Two),
            4 => Ok(TileSize::Four),
            other => Err(format!("tile size must be 1, 2 or 4, got {other}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMode {
    #[default]
    Human,
    Model,
}

impl ScaleMode {
    pub fn factor(self) -> f64 {
        match self {
            ScaleMode::Human => 1.0,
            ScaleMode::Model => MODEL_SCALE_FACTOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Floor,
    Roof,
    Wall,
    CornerWall,
    Door,
    Window,
    Stairs,
    Landscape,
    Furniture,
    ArtifactHolder,
}

impl ObjectKind {
    pub const ALL: [ObjectKind; 10] = [
        ObjectKind::Floor,
        ObjectKind::Roof,
        ObjectKind::Wall,
        ObjectKind::CornerWall,
        ObjectKind::Door,
        ObjectKind::Window,
        ObjectKind::Stairs,
        ObjectKind::Landscape,
        ObjectKind::Furniture,
        ObjectKind::ArtifactHolder,
    ];

    pub fn placement_class(self) -> PlacementClass {
        match self {
            ObjectKind::Floor | ObjectKind::Roof => PlacementClass::FloorBound,
            ObjectKind::Wall | ObjectKind::CornerWall | ObjectKind::Door | ObjectKind::Window => PlacementClass::EdgeBound,
            ObjectKind::Stairs | ObjectKind::Landscape | ObjectKind::Furniture | ObjectKind::ArtifactHolder => {
                PlacementClass::Free
            }
        }
    }

    /// Construction tiles realized as boxes in mesh exports.
    pub fn is_tile(self) -> bool {
        self.placement_class() != PlacementClass::Free
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::Floor => "floor",
            ObjectKind::Roof => "roof",
            ObjectKind::Wall => "wall",
            ObjectKind::CornerWall => "corner_wall",
            ObjectKind::Door => "door",
            ObjectKind::Window => "window",
            ObjectKind::Stairs => "stairs",
            ObjectKind::Landscape => "landscape",
            ObjectKind::Furniture => "furniture",
            ObjectKind::ArtifactHolder => "artifact_holder",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ObjectKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementClass {
    FloorBound,
    EdgeBound,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

/// Non-default extent of an edge-bound element: its length, the offset of
/// its centre along the edge, and its offset away from the attached tile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpan {
    pub length_m: f64,
    pub along_m: f64,
    pub outward_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Pose {
    FloorBound {
        level: u32,
        cell: Cell,
    },
    EdgeBound {
        level: u32,
        cell: Cell,
        side: Side,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        span: Option<EdgeSpan>,
    },
    Free {
        position: [f64; 3],
        rotation_deg: [f64; 3],
        scale: [f64; 3],
    },
}

impl Pose {
    pub fn floor(level: u32, x: i32, y: i32) -> Pose {
        Pose::FloorBound { level, cell: Cell { x, y } }
    }

    pub fn edge(level: u32, x: i32, y: i32, side: Side) -> Pose {
        Pose::EdgeBound { level, cell: Cell { x, y }, side, span: None }
    }

    pub fn edge_span(level: u32, x: i32, y: i32, side: Side, span: EdgeSpan) -> Pose {
        Pose::EdgeBound { level, cell: Cell { x, y }, side, span: Some(span) }
    }

    pub fn free(position: [f64; 3]) -> Pose {
        Pose::Free { position, rotation_deg: [0.0; 3], scale: [1.0; 3] }
    }

    pub fn class(&self) -> PlacementClass {
        match self {
            Pose::FloorBound { .. } => PlacementClass::FloorBound,
            Pose::EdgeBound { .. } => PlacementClass::EdgeBound,
            Pose::Free { .. } => PlacementClass::Free,
        }
    }

    pub fn level(&self) -> Option<u32> {
        match self {
            Pose::FloorBound { level, .. } | Pose::EdgeBound { level, .. } => Some(*level),
            Pose::Free { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtifactRef {
    pub kind: ArtifactKind,
    pub record: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacedObject {
    #[serde(default)]
    pub id: u64,
    pub kind: ObjectKind,
    pub material_id: String,
    pub pose: Pose,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub artifact: Option<ArtifactRef>,
    #[serde(skip)]
    pub ghost: bool,
}

impl PlacedObject {
    pub fn new(kind: ObjectKind, material_id: impl Into<String>, pose: Pose) -> Self {
        PlacedObject {
            id: 0,
            kind,
            material_id: material_id.into(),
            pose,
            artifact: None,
            ghost: false,
        }
    }

    pub fn holder(artifact: ArtifactRef, material_id: impl Into<String>, pose: Pose) -> Self {
        PlacedObject {
            artifact: Some(artifact),
            ..PlacedObject::new(ObjectKind::ArtifactHolder, material_id, pose)
        }
    }

    pub fn placement_class(&self) -> PlacementClass {
        self.kind.placement_class()
    }

    fn check_shape(&self) -> Result<(), SceneError> {
        if self.pose.class() != self.kind.placement_class() {
            return Err(SceneError::InvalidObject(format!(
                "{} must use a {:?} pose",
                self.kind.as_str(),
                self.kind.placement_class()
            )));
        }
        if (self.kind == ObjectKind::ArtifactHolder) != self.artifact.is_some() {
            return Err(SceneError::InvalidObject(
                "artifact reference is required on artifact holders and only there".into(),
            ));
        }
        match &self.pose {
            Pose::Free { position, rotation_deg, scale } => {
                if position.iter().chain(rotation_deg).chain(scale).any(|v| !v.is_finite()) {
                    return Err(SceneError::InvalidObject("free pose must be finite".into()));
                }
                if scale.iter().any(|s| *s <= 0.0) {
                    return Err(SceneError::InvalidObject("scale must be positive".into()));
                }
            }
            Pose::EdgeBound { span: Some(span), .. } => {
                let finite = span.length_m.is_finite() && span.along_m.is_finite() && span.outward_m.is_finite();
                if !finite || span.length_m <= 0.0 {
                    return Err(SceneError::InvalidObject("edge span must be finite with positive length".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Kind and material of an object to be placed; its pose comes from snapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub kind: ObjectKind,
    pub material_id: String,
    #[serde(default)]
    pub artifact: Option<ArtifactRef>,
}

/// A continuous placement request in human-scale meters (y is up).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaceInput {
    #[serde(default)]
    pub level: u32,
    pub position: [f64; 3],
    #[serde(default)]
    pub rotation_deg: [f64; 3],
    #[serde(default = "unit_scale")]
    pub scale: [f64; 3],
}

fn unit_scale() -> [f64; 3] {
    [1.0; 3]
}

impl PlaceInput {
    pub fn at(level: u32, x: f64, z: f64) -> Self {
        PlaceInput { level, position: [x, 0.0, z], rotation_deg: [0.0; 3], scale: [1.0; 3] }
    }
}

/// Provenance of a generated scene, kept so the generation can be replayed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generation {
    pub generator: String,
    pub params: serde_json::Value,
    /// Generator-specific structure (trees, rects, cell grids).
    pub layout: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TileScene {
    grid_levels: u32,
    grid_height_m: f64,
    tile_size: TileSize,
    scale_mode: ScaleMode,
    lighting: LightingSettings,
    objects: Vec<PlacedObject>,
    next_id: u64,
    generation: Option<Generation>,
    preview: Option<PlacedObject>,
}

impl TileScene {
    pub fn new(grid_levels: u32, grid_height_m: f64, tile_size: TileSize) -> Result<Self, SceneError> {
        if grid_levels == 0 {
            return Err(SceneError::InvalidSettings("grid_levels must be at least 1".into()));
        }
        if !(grid_height_m.is_finite() && grid_height_m > 0.0) {
            return Err(SceneError::InvalidSettings("grid_height_m must be positive".into()));
        }
        Ok(TileScene {
            grid_levels,
            grid_height_m,
            tile_size,
            scale_mode: ScaleMode::Human,
            lighting: LightingSettings::default(),
            objects: Vec::new(),
            next_id: 1,
            generation: None,
            preview: None,
        })
    }

    pub fn grid_levels(&self) -> u32 {
        self.grid_levels
    }

    pub fn grid_height_m(&self) -> f64 {
        self.grid_height_m
    }

    pub fn tile_size(&self) -> TileSize {
        self.tile_size
    }

    pub fn scale_mode(&self) -> ScaleMode {
        self.scale_mode
    }

    pub fn set_scale_mode(&mut self, mode: ScaleMode) {
        self.scale_mode = mode;
    }

    pub fn lighting(&self) -> &LightingSettings {
        &self.lighting
    }

    pub fn lighting_mut(&mut self) -> &mut LightingSettings {
        &mut self.lighting
    }

    pub fn objects(&self) -> &[PlacedObject] {
        &self.objects
    }

    pub fn object(&self, id: u64) -> Option<&PlacedObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn generation(&self) -> Option<&Generation> {
        self.generation.as_ref()
    }

    pub fn set_generation(&mut self, generator: &str, params: serde_json::Value, layout: serde_json::Value) {
        self.generation = Some(Generation { generator: generator.to_string(), params, layout });
    }

    pub fn preview(&self) -> Option<&PlacedObject> {
        self.preview.as_ref()
    }

    pub fn count(&self, kind: ObjectKind) -> usize {
        self.objects.iter().filter(|o| o.kind == kind).count()
    }

    fn check_level(&self, level: u32) -> Result<(), SceneError> {
        if level >= self.grid_levels {
            return Err(SceneError::LevelOutOfRange { level, levels: self.grid_levels });
        }
        Ok(())
    }

    fn floor_bound_at(&self, level: u32, cell: Cell, kind: ObjectKind, except: Option<u64>) -> Option<&PlacedObject> {
        self.objects.iter().find(|o| {
            o.kind == kind
                && Some(o.id) != except
                && matches!(o.pose, Pose::FloorBound { level: l, cell: c } if l == level && c == cell)
        })
    }

    pub fn has_floor(&self, level: u32, cell: Cell) -> bool {
        self.floor_bound_at(level, cell, ObjectKind::Floor, None).is_some()
    }

    /// Checks a fully-posed object against the current scene.
    fn check_placement(&self, obj: &PlacedObject, except: Option<u64>) -> Result<(), SceneError> {
        obj.check_shape()?;
        if let Some(level) = obj.pose.level() {
            self.check_level(level)?;
        }
        match obj.pose {
            Pose::FloorBound { level, cell } => {
                if self.floor_bound_at(level, cell, obj.kind, except).is_some() {
                    return Err(SceneError::CellOccupied { level, x: cell.x, y: cell.y, kind: obj.kind.as_str() });
                }
            }
            Pose::EdgeBound { level, cell, .. } => {
                if !self.has_floor(level, cell) {
                    return Err(SceneError::NoAdjacentFloor);
                }
            }
            Pose::Free { .. } => {}
        }
        Ok(())
    }

    /// Adds an object whose pose is already on the grid. Used by generators.
    pub fn insert(&mut self, mut obj: PlacedObject) -> Result<u64, SceneError> {
        self.check_placement(&obj, None)?;
        obj.id = self.next_id;
        obj.ghost = false;
        self.next_id += 1;
        self.objects.push(obj);
        Ok(self.next_id - 1)
    }

    /// Resolves a continuous request into a grid pose for the given kind.
    pub fn snap(&self, kind: ObjectKind, input: &PlaceInput) -> Result<Pose, SceneError> {
        let [x, _, z] = input.position;
        if !(x.is_finite() && z.is_finite()) {
            return Err(SceneError::InvalidObject("position must be finite".into()));
        }
        let t = self.tile_size.meters();
        match kind.placement_class() {
            PlacementClass::FloorBound => {
                self.check_level(input.level)?;
                Ok(Pose::floor(input.level, (x / t).floor() as i32, (z / t).floor() as i32))
            }
            PlacementClass::EdgeBound => {
                self.check_level(input.level)?;
                self.nearest_edge(input.level, x, z).ok_or(SceneError::NoAdjacentFloor)
            }
            PlacementClass::Free => Ok(Pose::Free {
                position: input.position,
                rotation_deg: input.rotation_deg,
                scale: input.scale,
            }),
        }
    }

    /// Nearest edge among floor tiles within one tile of the point. Ties go
    /// to the first cell in row-major order, then to N, E, S, W.
    fn nearest_edge(&self, level: u32, x: f64, z: f64) -> Option<Pose> {
        let t = self.tile_size.meters();
        let mut floors: Vec<Cell> = self
            .objects
            .iter()
            .filter(|o| o.kind == ObjectKind::Floor)
            .filter_map(|o| match o.pose {
                Pose::FloorBound { level: l, cell } if l == level => Some(cell),
                _ => None,
            })
            .collect();
        floors.sort_by_key(|c| (c.y, c.x));
        let mut best: Option<(f64, Cell, Side)> = None;
        for cell in floors {
            let (x0, z0) = (cell.x as f64 * t, cell.y as f64 * t);
            let (x1, z1) = (x0 + t, z0 + t);
            let dx = (x0 - x).max(0.0).max(x - x1);
            let dz = (z0 - z).max(0.0).max(z - z1);
            if dx.hypot(dz) > t {
                continue;
            }
            for side in Side::ALL {
                let ((ax, az), (bx, bz)) = match side {
                    Side::N => ((x0, z0), (x1, z0)),
                    Side::E => ((x1, z0), (x1, z1)),
                    Side::S => ((x0, z1), (x1, z1)),
                    Side::W => ((x0, z0), (x0, z1)),
                };
                let d = point_segment_distance(x, z, ax, az, bx, bz);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, cell, side));
                }
            }
        }
        best.map(|(_, cell, side)| Pose::edge(level, cell.x, cell.y, side))
    }

    /// Snaps and commits an object in one go.
    pub fn place(&mut self, spec: &ObjectSpec, input: &PlaceInput) -> Result<u64, SceneError> {
        let pose = self.snap(spec.kind, input)?;
        let mut obj = PlacedObject::new(spec.kind, spec.material_id.clone(), pose);
        obj.artifact = spec.artifact.clone();
        self.insert(obj)
    }

    /// Computes where an object would land without committing it.
    pub fn set_ghost(&mut self, spec: &ObjectSpec, input: &PlaceInput) -> Result<&PlacedObject, SceneError> {
        let pose = self.snap(spec.kind, input)?;
        let mut obj = PlacedObject::new(spec.kind, spec.material_id.clone(), pose);
        obj.artifact = spec.artifact.clone();
        obj.ghost = true;
        obj.check_shape()?;
        Ok(self.preview.insert(obj))
    }

    pub fn clear_ghost(&mut self) {
        self.preview = None;
    }

    pub fn commit_ghost(&mut self) -> Result<u64, SceneError> {
        let obj = self.preview.clone().ok_or(SceneError::InvalidObject("no ghost object".into()))?;
        let id = self.insert(obj)?;
        self.preview = None;
        Ok(id)
    }

    /// Removes an object. Removing a floor tile also removes every
    /// edge-bound element attached to it. Returns all removed ids.
    pub fn remove(&mut self, id: u64) -> Result<Vec<u64>, SceneError> {
        let target = self.object(id).ok_or(SceneError::UnknownId(id))?.clone();
        let mut removed = vec![id];
        if let (ObjectKind::Floor, Pose::FloorBound { level, cell }) = (target.kind, &target.pose) {
            removed.extend(self.attached_to(*level, *cell));
        }
        self.objects.retain(|o| !removed.contains(&o.id));
        Ok(removed)
    }

    fn attached_to(&self, level: u32, cell: Cell) -> Vec<u64> {
        self.objects
            .iter()
            .filter(|o| matches!(o.pose, Pose::EdgeBound { level: l, cell: c, .. } if l == level && c == cell))
            .map(|o| o.id)
            .collect()
    }

    /// Re-poses an object. Grid-bound objects are re-snapped; a moved floor
    /// tile carries its attached edge elements along.
    pub fn transform(&mut self, id: u64, input: &PlaceInput) -> Result<(), SceneError> {
        let current = self.object(id).ok_or(SceneError::UnknownId(id))?.clone();
        let pose = self.snap(current.kind, input)?;
        let mut moved = current.clone();
        moved.pose = pose.clone();
        self.check_placement(&moved, Some(id))?;

        let carried = match (&current.pose, &pose) {
            (Pose::FloorBound { level: from_level, cell: from }, Pose::FloorBound { level: to_level, cell: to })
                if current.kind == ObjectKind::Floor =>
            {
                let ids = self.attached_to(*from_level, *from);
                Some((ids, *to_level, *to))
            }
            _ => None,
        };
        for o in &mut self.objects {
            if o.id == id {
                o.pose = pose.clone();
            }
        }
        if let Some((ids, to_level, to)) = carried {
            for o in &mut self.objects {
                if let Pose::EdgeBound { level, cell, .. } = &mut o.pose {
                    if ids.contains(&o.id) {
                        *level = to_level;
                        *cell = to;
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks every placement invariant.
    pub fn validate(&self) -> Result<(), SceneError> {
        let mut seen = std::collections::HashSet::new();
        for o in &self.objects {
            if o.id == 0 || o.id >= self.next_id || !seen.insert(o.id) {
                return Err(SceneError::InvalidObject(format!("object id {} is invalid or repeated", o.id)));
            }
            if o.ghost {
                return Err(SceneError::InvalidObject(format!("object {} is a ghost", o.id)));
            }
            self.check_placement(o, Some(o.id))?;
        }
        Ok(())
    }

    /// World-space box of a tile (meters, y up) in the current scale mode.
    pub fn tile_box(&self, obj: &PlacedObject) -> Option<BoxGeometry> {
        obj::tile_box(self, obj).map(|b| b.scaled(self.scale_mode.factor()))
    }

    /// World-space anchor of any object in the current scale mode: cell
    /// centres for floor tiles, edge midpoints for vertical elements.
    pub fn world_position(&self, obj: &PlacedObject) -> [f64; 3] {
        let t = self.tile_size.meters();
        let h = self.grid_height_m;
        let p = match &obj.pose {
            Pose::FloorBound { level, cell } => {
                let y = *level as f64 * h + if obj.kind == ObjectKind::Roof { h } else { 0.0 };
                [(cell.x as f64 + 0.5) * t, y, (cell.y as f64 + 0.5) * t]
            }
            Pose::EdgeBound { level, cell, side, .. } => {
                let (dx, dz) = side.delta();
                [
                    (cell.x as f64 + 0.5 + dx as f64 * 0.5) * t,
                    *level as f64 * h,
                    (cell.y as f64 + 0.5 + dz as f64 * 0.5) * t,
                ]
            }
            Pose::Free { position, .. } => *position,
        };
        let f = self.scale_mode.factor();
        [p[0] * f, p[1] * f, p[2] * f]
    }

    pub fn export_layout(&self) -> String {
        layout::export(self)
    }

    pub fn import_layout(document: &str) -> Result<TileScene, LayoutError> {
        layout::import(document)
    }

    pub fn export_obj(&self) -> String {
        obj::export(self)
    }
}

fn point_segment_distance(px: f64, pz: f64, ax: f64, az: f64, bx: f64, bz: f64) -> f64 {
    let (vx, vz) = (bx - ax, bz - az);
    let len2 = vx * vx + vz * vz;
    let t = (((px - ax) * vx + (pz - az) * vz) / len2).clamp(0.0, 1.0);
    let (cx, cz) = (ax + t * vx, az + t * vz);
    (px - cx).hypot(pz - cz)
}
