use std::fmt::Write;

use super::{ObjectKind, PlacedObject, Pose, Side, TileScene, SLAB_M};

/// Axis-aligned box in world meters, y up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGeometry {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl BoxGeometry {
    pub fn scaled(self, f: f64) -> Self {
        BoxGeometry {
            min: self.min.map(|v| v * f),
            max: self.max.map(|v| v * f),
        }
    }

    pub fn size(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.max[i] - self.min[i])
    }

    /// Corner order: bottom ring then top ring, each starting at min x/z
    /// and turning toward +x first.
    pub fn vertices(&self) -> [[f64; 3]; 8] {
        let [x0, y0, z0] = self.min;
        let [x1, y1, z1] = self.max;
        [
            [x0, y0, z0],
            [x1, y0, z0],
            [x1, y0, z1],
            [x0, y0, z1],
            [x0, y1, z0],
            [x1, y1, z0],
            [x1, y1, z1],
            [x0, y1, z1],
        ]
    }
}

/// Triangles with outward counter-clockwise winding, 0-based.
pub const BOX_FACES: [[usize; 3]; 12] = [
    [0, 1, 2],
    [0, 2, 3],
    [4, 6, 5],
    [4, 7, 6],
    [0, 4, 5],
    [0, 5, 1],
    [3, 2, 6],
    [3, 6, 7],
    [0, 3, 7],
    [0, 7, 4],
    [1, 5, 6],
    [1, 6, 2],
];

const GROUP_ORDER: [ObjectKind; 6] = [
    ObjectKind::Floor,
    ObjectKind::Roof,
    ObjectKind::Wall,
    ObjectKind::CornerWall,
    ObjectKind::Door,
    ObjectKind::Window,
];

fn centered(c: [f64; 3], size: [f64; 3]) -> BoxGeometry {
    BoxGeometry {
        min: [0, 1, 2].map(|i| c[i] - size[i] / 2.0),
        max: [0, 1, 2].map(|i| c[i] + size[i] / 2.0),
    }
}

/// Human-scale box of a tile object; `None` for free objects.
pub(super) fn tile_box(scene: &TileScene, obj: &PlacedObject) -> Option<BoxGeometry> {
    let t = scene.tile_size().meters();
    let h = scene.grid_height_m();
    match &obj.pose {
        Pose::FloorBound { level, cell } => {
            let base = *level as f64 * h;
            let (y0, y1) = if obj.kind == ObjectKind::Roof { (base + h, base + h + SLAB_M) } else { (base - SLAB_M, base) };
            let (x0, z0) = (cell.x as f64 * t, cell.y as f64 * t);
            Some(BoxGeometry { min: [x0, y0, z0], max: [x0 + t, y1, z0 + t] })
        }
        Pose::EdgeBound { level, cell, side, span } => {
            let base = *level as f64 * h;
            let (x0, z0) = (cell.x as f64 * t, cell.y as f64 * t);
            if obj.kind == ObjectKind::CornerWall {
                // the edge's side names the corner clockwise from it: N = NW
                let (cx, cz, sx, sz) = match side {
                    Side::N => (x0, z0, -1.0, -1.0),
                    Side::E => (x0 + t, z0, 1.0, -1.0),
                    Side::S => (x0 + t, z0 + t, 1.0, 1.0),
                    Side::W => (x0, z0 + t, -1.0, 1.0),
                };
                // a span sizes the post and pushes it diagonally outward
                let (size, out) = span.map_or((SLAB_M, 0.0), |s| (s.length_m.min(SLAB_M), s.outward_m));
                return Some(centered([cx + sx * out, base + h / 2.0, cz + sz * out], [size, h, size]));
            }
            let (dx, dz) = side.delta();
            let mid = [x0 + t / 2.0 + dx as f64 * t / 2.0, base + h / 2.0, z0 + t / 2.0 + dz as f64 * t / 2.0];
            let (length, along, outward) = match span {
                Some(s) => (s.length_m, s.along_m, s.outward_m),
                None => (t, 0.0, 0.0),
            };
            let c = match side {
                Side::N | Side::S => [mid[0] + along, mid[1], mid[2] + dz as f64 * outward],
                Side::E | Side::W => [mid[0] + dx as f64 * outward, mid[1], mid[2] + along],
            };
            let size = match side {
                Side::N | Side::S => [length, h, SLAB_M],
                Side::E | Side::W => [SLAB_M, h, length],
            };
            Some(centered(c, size))
        }
        Pose::Free { .. } => None,
    }
}

fn fmt_coord(out: &mut String, v: f64) {
    // normalise negative zero so equal geometry prints identically
    let _ = write!(out, " {:.6}", v + 0.0);
}

pub(super) fn export(scene: &TileScene) -> String {
    let mut out = String::new();
    let mut base = 1usize;
    for kind in GROUP_ORDER {
        let mut members: Vec<&PlacedObject> = scene.objects().iter().filter(|o| o.kind == kind).collect();
        if members.is_empty() {
            continue;
        }
        members.sort_by_key(|o| o.id);
        let _ = writeln!(out, "g {}", kind.as_str());
        for obj in members {
            let Some(geometry) = scene.tile_box(obj) else { continue };
            for v in geometry.vertices() {
                out.push('v');
                for c in v {
                    fmt_coord(&mut out, c);
                }
                out.push('\n');
            }
            for [a, b, c] in BOX_FACES {
                let _ = writeln!(out, "f {} {} {}", base + a, base + b, base + c);
            }
            base += 8;
        }
    }
    out
}
