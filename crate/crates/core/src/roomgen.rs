//! Single-room generation: a box of floor, roof and wall tiles with some
//! walls swapped for doors and windows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{ArtifactGroup, GroupKeyKind};
use crate::scene::{ObjectKind, PlacedObject, Pose, SceneError, Side, TileScene, TileSize};
use crate::sizing::{room_dimensions, SizingConstants};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoomError {
    #[error("openings exceed the {0} perimeter slots")]
    TooManyOpenings(usize),
    #[error("room dimensions must be at least 2 m, got {width_m} x {depth_m}")]
    DegenerateDims { width_m: f64, depth_m: f64 },
    #[error(transparent)]
    Scene(#[from] SceneError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RoomSource {
    #[default]
    UserPreference,
    DataDriven { key: GroupKeyKind, group: String },
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomRequest {
    pub width_m: f64,
    pub depth_m: f64,
    #[serde(default)]
    pub n_windows: u32,
    #[serde(default = "one")]
    pub n_doors: u32,
    #[serde(default)]
    pub source: RoomSource,
}

impl RoomRequest {
    pub fn new(width_m: f64, depth_m: f64, n_windows: u32, n_doors: u32) -> Self {
        RoomRequest { width_m, depth_m, n_windows, n_doors, source: RoomSource::UserPreference }
    }
}

/// Perimeter wall position: a floor cell and the side its wall sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub x: i32,
    pub y: i32,
    pub side: Side,
}

/// Perimeter slots clockwise from the north-west corner.
pub fn perimeter_slots(w: i32, d: i32) -> Vec<Slot> {
    let mut out = Vec::with_capacity(2 * (w + d) as usize);
    out.extend((0..w).map(|x| Slot { x, y: 0, side: Side::N }));
    out.extend((0..d).map(|y| Slot { x: w - 1, y, side: Side::E }));
    out.extend((0..w).rev().map(|x| Slot { x, y: d - 1, side: Side::S }));
    out.extend((0..d).rev().map(|y| Slot { x: 0, y, side: Side::W }));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomPlan {
    pub width_tiles: i32,
    pub depth_tiles: i32,
    pub doors: Vec<usize>,
    pub windows: Vec<usize>,
}

pub fn tile_dims(width_m: f64, depth_m: f64) -> Result<(i32, i32), RoomError> {
    if !(width_m.is_finite() && depth_m.is_finite() && width_m >= 2.0 && depth_m >= 2.0) {
        return Err(RoomError::DegenerateDims { width_m, depth_m });
    }
    Ok((width_m.round() as i32, depth_m.round() as i32))
}

fn side_full(taken: &[bool], (start, len): (usize, usize)) -> bool {
    taken[start..start + len].iter().all(|t| *t)
}

/// Chooses door and window slots (indices into [`perimeter_slots`]).
pub fn plan_openings(req: &RoomRequest) -> Result<RoomPlan, RoomError> {
    let (w, d) = tile_dims(req.width_m, req.depth_m)?;
    let slots = perimeter_slots(w, d);
    let n = slots.len();
    if req.n_doors as usize + req.n_windows as usize > n {
        return Err(RoomError::TooManyOpenings(n));
    }
    let mut taken = vec![false; n];
    let mut doors = Vec::new();
    // side ranges within the clockwise slot list
    let runs = [(0, w), (w, d), (w + d, w), (2 * w + d, d)].map(|(a, l)| (a as usize, l as usize));
    let mut side = 0;
    for _ in 0..req.n_doors {
        // next side, in N E S W order, that still has a free slot
        while side_full(&taken, runs[side % 4]) {
            side += 1;
        }
        let (start, len) = runs[side % 4];
        let centre = (len as f64 - 1.0) / 2.0;
        let k = (0..len)
            .filter(|k| !taken[start + k])
            .min_by(|a, b| (*a as f64 - centre).abs().total_cmp(&(*b as f64 - centre).abs()))
            .expect("side has a free slot");
        taken[start + k] = true;
        doors.push(start + k);
        side += 1;
    }
    let free: Vec<usize> = (0..n).filter(|i| !taken[*i]).collect();
    let m = free.len();
    let k = req.n_windows as usize;
    let windows = (0..k).map(|j| free[(2 * j + 1) * m / (2 * k)]).collect();
    Ok(RoomPlan { width_tiles: w, depth_tiles: d, doors, windows })
}

pub fn generate_room(req: &RoomRequest, grid_height_m: f64) -> Result<TileScene, RoomError> {
    let plan = plan_openings(req)?;
    let (w, d) = (plan.width_tiles, plan.depth_tiles);
    let mut scene = TileScene::new(1, grid_height_m, TileSize::One)?;
    for y in 0..d {
        for x in 0..w {
            scene.insert(PlacedObject::new(ObjectKind::Floor, ObjectKind::Floor.as_str(), Pose::floor(0, x, y)))?;
            scene.insert(PlacedObject::new(ObjectKind::Roof, ObjectKind::Roof.as_str(), Pose::floor(0, x, y)))?;
        }
    }
    for (i, s) in perimeter_slots(w, d).into_iter().enumerate() {
        let kind = if plan.doors.contains(&i) {
            ObjectKind::Door
        } else if plan.windows.contains(&i) {
            ObjectKind::Window
        } else {
            ObjectKind::Wall
        };
        scene.insert(PlacedObject::new(kind, kind.as_str(), Pose::edge(0, s.x, s.y, s.side)))?;
    }
    let layout = serde_json::json!({
        "width_tiles": w,
        "depth_tiles": d,
        "pre_rounding": { "width_m": req.width_m, "depth_m": req.depth_m },
        "doors": plan.doors,
        "windows": plan.windows,
    });
    scene.set_generation("room", serde_json::to_value(req).expect("request serializes"), layout);
    Ok(scene)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Openings {
    pub n_windows: u32,
    pub n_doors: u32,
}

impl Default for Openings {
    fn default() -> Self {
        Openings { n_windows: 0, n_doors: 1 }
    }
}

/// One room sized from its group's artifacts.
pub fn room_from_group(
    group: &ArtifactGroup,
    c: &SizingConstants,
    openings: Openings,
    grid_height_m: f64,
) -> Result<TileScene, RoomError> {
    let spec = room_dimensions(group, c);
    let req = RoomRequest {
        width_m: spec.width_m,
        depth_m: spec.depth_m,
        n_windows: openings.n_windows,
        n_doors: openings.n_doors,
        source: RoomSource::DataDriven { key: group.key_kind, group: group.key.to_string() },
    };
    generate_room(&req, grid_height_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn census(s: &TileScene) -> [usize; 5] {
        [ObjectKind::Floor, ObjectKind::Roof, ObjectKind::Wall, ObjectKind::Door, ObjectKind::Window].map(|k| s.count(k))
    }

    #[test]
    fn plain_room() {
        let s = generate_room(&RoomRequest::new(4.0, 3.0, 0, 0), 3.0).unwrap();
        assert_eq!(census(&s), [12, 12, 14, 0, 0]);
        s.validate().unwrap();
    }

    #[test]
    fn substitution_keeps_totals() {
        let s = generate_room(&RoomRequest::new(4.0, 3.0, 3, 1), 3.0).unwrap();
        assert_eq!(census(&s), [12, 12, 10, 1, 3]);
    }

    #[test]
    fn over_budget() {
        assert_eq!(
            generate_room(&RoomRequest::new(2.0, 2.0, 9, 1), 3.0).unwrap_err(),
            RoomError::TooManyOpenings(8)
        );
        assert!(matches!(generate_room(&RoomRequest::new(1.5, 4.0, 0, 1), 3.0), Err(RoomError::DegenerateDims { .. })));
    }

    #[test]
    fn doors_at_edge_centres() {
        let plan = plan_openings(&RoomRequest::new(5.0, 3.0, 0, 4)).unwrap();
        let slots = perimeter_slots(5, 3);
        let got: Vec<Slot> = plan.doors.iter().map(|&i| slots[i]).collect();
        assert_eq!(
            got,
            vec![
                Slot { x: 2, y: 0, side: Side::N },
                Slot { x: 4, y: 1, side: Side::E },
                Slot { x: 2, y: 2, side: Side::S },
                Slot { x: 0, y: 1, side: Side::W },
            ]
        );
        // every slot can be filled
        let full = plan_openings(&RoomRequest::new(2.0, 2.0, 3, 5)).unwrap();
        let mut all: Vec<usize> = full.doors.iter().chain(&full.windows).copied().collect();
        all.sort();
        assert_eq!(all, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn rounding() {
        assert_eq!(tile_dims(2.4375, 2.4375).unwrap(), (2, 2));
        assert_eq!(tile_dims(2.5, 3.49).unwrap(), (3, 3));
    }
}
