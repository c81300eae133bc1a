//! Constrained growth of rectangular rooms inside a raster footprint.
//!
//! Every room starts as a 1×1 void wrapped in a one-pixel wall ring. Growth
//! runs round-robin over rooms and over their sides in N, E, S, W order; a
//! side advances one pixel when the new wall row lies inside the footprint
//! and touches no pixel owned by another room. A side that fails once is
//! frozen for good, so the process always terminates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::footprint::{Footprint, Pixel, FOOTPRINT_SIZE};
use crate::scene::{EdgeSpan, ObjectKind, PlacedObject, Pose, SceneError, Side, TileScene, TileSize};

#[derive(Debug, Error, PartialEq)]
pub enum GrowthError {
    #[error("seed ({}, {}) is outside the footprint interior", .0.x, .0.y)]
    SeedOutsideInterior(Pixel),
    #[error("region around seed ({}, {}) is not clean: {reason}", .seed.x, .seed.y)]
    RegionNotClean { seed: Pixel, reason: String },
    #[error("no rooms have been placed")]
    NoRooms,
    #[error("growth has not finished")]
    NotTerminal,
    #[error("growth is paused")]
    Paused,
    #[error("seeds cannot be added once growth has started")]
    AlreadyGrowing,
    #[error(transparent)]
    Scene(#[from] SceneError),
}

/// Inclusive pixel bounds of a room's void (floor area).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PixelRect {
    pub min_x: i32,
    pub min_y: i32,
    pub max_x: i32,
    pub max_y: i32,
}

impl PixelRect {
    pub fn width(&self) -> i32 {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> i32 {
        self.max_y - self.min_y + 1
    }

    pub fn area(&self) -> usize {
        (self.width() * self.height()) as usize
    }

    pub fn contains(&self, p: Pixel) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    pub fn grown(&self, side: Side) -> PixelRect {
        let mut r = *self;
        match side {
            Side::N => r.min_y -= 1,
            Side::E => r.max_x += 1,
            Side::S => r.max_y += 1,
            Side::W => r.min_x -= 1,
        }
        r
    }

    /// The rect expanded by the one-pixel wall ring.
    pub fn outer(&self) -> PixelRect {
        PixelRect {
            min_x: self.min_x - 1,
            min_y: self.min_y - 1,
            max_x: self.max_x + 1,
            max_y: self.max_y + 1,
        }
    }

    pub fn pixels(&self) -> impl Iterator<Item = Pixel> + '_ {
        (self.min_y..=self.max_y).flat_map(move |y| (self.min_x..=self.max_x).map(move |x| Pixel::new(x, y)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wall {
    pub side: Side,
    pub growable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRoom {
    pub rect: PixelRect,
    pub walls: [Wall; 4],
}

impl GrowthRoom {
    fn seeded(p: Pixel) -> Self {
        GrowthRoom {
            rect: PixelRect { min_x: p.x, min_y: p.y, max_x: p.x, max_y: p.y },
            walls: Side::ALL.map(|side| Wall { side, growable: true }),
        }
    }

    pub fn growable_walls(&self) -> usize {
        self.walls.iter().filter(|w| w.growable).count()
    }
}

/// Outer wall corners, clockwise (image y axis points down), starting at the
/// top-left corner.
pub fn extract_corners(room: &GrowthRoom) -> [Pixel; 4] {
    let o = room.rect.outer();
    [
        Pixel::new(o.min_x, o.min_y),
        Pixel::new(o.max_x, o.min_y),
        Pixel::new(o.max_x, o.max_y),
        Pixel::new(o.min_x, o.max_y),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "owner", content = "room", rename_all = "snake_case")]
pub enum Owner {
    Exterior,
    Free,
    Wall(usize),
    Void(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthState {
    footprint: Footprint,
    rooms: Vec<GrowthRoom>,
    occupancy: Vec<Owner>,
    paused: bool,
    started: bool,
    passes: usize,
}

impl GrowthState {
    pub fn new(footprint: Footprint) -> Self {
        let occupancy = base_occupancy(&footprint);
        GrowthState {
            footprint,
            rooms: Vec::new(),
            occupancy,
            paused: false,
            started: false,
            passes: 0,
        }
    }

    /// Places seeds in order, stopping at the first failure.
    pub fn with_seeds(footprint: Footprint, seeds: &[Pixel]) -> Result<Self, GrowthError> {
        let mut state = GrowthState::new(footprint);
        for s in seeds {
            state.place_seed(*s)?;
        }
        Ok(state)
    }

    pub fn footprint(&self) -> &Footprint {
        &self.footprint
    }

    pub fn rooms(&self) -> &[GrowthRoom] {
        &self.rooms
    }

    pub fn occupancy(&self) -> &[Owner] {
        &self.occupancy
    }

    pub fn owner(&self, p: Pixel) -> Owner {
        if Footprint::in_bounds(p) {
            self.occupancy[idx(p)]
        } else {
            Owner::Exterior
        }
    }

    pub fn paused(&self) -> bool {
        self.paused
    }

    pub fn pause(&mut self) {
        self.paused = true;
    }

    pub fn resume(&mut self) {
        self.paused = false;
    }

    pub fn passes(&self) -> usize {
        self.passes
    }

    pub fn growable_walls(&self) -> usize {
        self.rooms.iter().map(GrowthRoom::growable_walls).sum()
    }

    pub fn is_terminal(&self) -> bool {
        !self.rooms.is_empty() && self.growable_walls() == 0
    }

    pub fn place_seed(&mut self, seed: Pixel) -> Result<usize, GrowthError> {
        if self.started {
            return Err(GrowthError::AlreadyGrowing);
        }
        if !self.footprint.is_interior(seed) {
            return Err(GrowthError::SeedOutsideInterior(seed));
        }
        let block = GrowthRoom::seeded(seed).rect.outer();
        for p in block.pixels() {
            match self.owner(p) {
                Owner::Free => {}
                Owner::Exterior => {
                    return Err(GrowthError::RegionNotClean {
                        seed,
                        reason: format!("pixel ({}, {}) is outside the footprint", p.x, p.y),
                    })
                }
                Owner::Wall(r) | Owner::Void(r) => {
                    return Err(GrowthError::RegionNotClean {
                        seed,
                        reason: format!("pixel ({}, {}) belongs to room {r}", p.x, p.y),
                    })
                }
            }
        }
        let id = self.rooms.len();
        self.rooms.push(GrowthRoom::seeded(seed));
        self.paint(id);
        Ok(id)
    }

    fn paint(&mut self, id: usize) {
        let rect = self.rooms[id].rect;
        for p in rect.outer().pixels() {
            self.occupancy[idx(p)] = if rect.contains(p) { Owner::Void(id) } else { Owner::Wall(id) };
        }
    }

    /// Pixels of the wall row a side would occupy after advancing.
    fn new_wall_row(rect: PixelRect, side: Side) -> Vec<Pixel> {
        let o = rect.grown(side).outer();
        match side {
            Side::N => (o.min_x..=o.max_x).map(|x| Pixel::new(x, o.min_y)).collect(),
            Side::S => (o.min_x..=o.max_x).map(|x| Pixel::new(x, o.max_y)).collect(),
            Side::E => (o.min_y..=o.max_y).map(|y| Pixel::new(o.max_x, y)).collect(),
            Side::W => (o.min_y..=o.max_y).map(|y| Pixel::new(o.min_x, y)).collect(),
        }
    }

    fn try_advance(&mut self, id: usize, side: Side) -> bool {
        let rect = self.rooms[id].rect;
        let clear = Self::new_wall_row(rect, side)
            .into_iter()
            .all(|p| self.owner(p) == Owner::Free);
        if clear {
            self.rooms[id].rect = rect.grown(side);
            self.paint(id);
        }
        clear
    }

    /// One round-robin pass: every growable wall gets one turn. Returns the
    /// number of walls that advanced.
    pub fn step(&mut self) -> Result<usize, GrowthError> {
        if self.rooms.is_empty() {
            return Err(GrowthError::NoRooms);
        }
        if self.paused {
            return Err(GrowthError::Paused);
        }
        self.started = true;
        let mut advanced = 0;
        for id in 0..self.rooms.len() {
            for k in 0..4 {
                if !self.rooms[id].walls[k].growable {
                    continue;
                }
                let side = self.rooms[id].walls[k].side;
                if self.try_advance(id, side) {
                    advanced += 1;
                } else {
                    self.rooms[id].walls[k].growable = false;
                }
            }
        }
        self.passes += 1;
        Ok(advanced)
    }

    pub fn run(&mut self) -> Result<(), GrowthError> {
        if self.rooms.is_empty() {
            return Err(GrowthError::NoRooms);
        }
        while self.growable_walls() > 0 {
            self.step()?;
        }
        Ok(())
    }

    /// Occupancy rebuilt from the footprint and room rects alone.
    pub fn recompute_occupancy(&self) -> Vec<Owner> {
        let mut occ = base_occupancy(&self.footprint);
        for (id, room) in self.rooms.iter().enumerate() {
            for p in room.rect.outer().pixels() {
                occ[idx(p)] = if room.rect.contains(p) { Owner::Void(id) } else { Owner::Wall(id) };
            }
        }
        occ
    }

    /// Outer corners found by scanning the pixels the room owns, clockwise.
    pub fn scanned_corners(&self, id: usize) -> Option<[Pixel; 4]> {
        let mut bounds: Option<PixelRect> = None;
        for (i, owner) in self.occupancy.iter().enumerate() {
            if matches!(owner, Owner::Wall(r) | Owner::Void(r) if *r == id) {
                let p = Pixel::new((i as u32 % FOOTPRINT_SIZE) as i32, (i as u32 / FOOTPRINT_SIZE) as i32);
                bounds = Some(match bounds {
                    None => PixelRect { min_x: p.x, min_y: p.y, max_x: p.x, max_y: p.y },
                    Some(b) => PixelRect {
                        min_x: b.min_x.min(p.x),
                        min_y: b.min_y.min(p.y),
                        max_x: b.max_x.max(p.x),
                        max_y: b.max_y.max(p.y),
                    },
                });
            }
        }
        bounds.map(|b| {
            [
                Pixel::new(b.min_x, b.min_y),
                Pixel::new(b.max_x, b.min_y),
                Pixel::new(b.max_x, b.max_y),
                Pixel::new(b.min_x, b.max_y),
            ]
        })
    }

    /// Checks disjointness, containment and occupancy consistency.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, room) in self.rooms.iter().enumerate() {
            let r = room.rect;
            if r.min_x > r.max_x || r.min_y > r.max_y {
                return Err(format!("room {i} has an inverted rect"));
            }
            if let Some(p) = r.outer().pixels().find(|p| !self.footprint.is_interior(*p)) {
                return Err(format!("room {i} leaves the footprint at {p:?}"));
            }
            for (j, other) in self.rooms.iter().enumerate().skip(i + 1) {
                let (a, b) = (r.outer(), other.rect.outer());
                let overlap = a.min_x <= b.max_x && b.min_x <= a.max_x && a.min_y <= b.max_y && b.min_y <= a.max_y;
                if overlap {
                    return Err(format!("rooms {i} and {j} overlap"));
                }
            }
        }
        if self.recompute_occupancy() != self.occupancy {
            return Err("occupancy out of sync with rooms".into());
        }
        Ok(())
    }

    /// Serializable per-step snapshot for live previews.
    pub fn snapshot(&self) -> GrowthSnapshot {
        let rows = (0..FOOTPRINT_SIZE as i32)
            .map(|y| {
                (0..FOOTPRINT_SIZE as i32)
                    .map(|x| match self.owner(Pixel::new(x, y)) {
                        Owner::Exterior => '#',
                        Owner::Free => '.',
                        Owner::Wall(_) => 'w',
                        Owner::Void(_) => 'v',
                    })
                    .collect()
            })
            .collect();
        GrowthSnapshot {
            footprint: self.footprint.id().to_string(),
            passes: self.passes,
            paused: self.paused,
            terminal: self.is_terminal(),
            growable_walls: self.growable_walls(),
            rooms: self.rooms.clone(),
            occupancy: rows,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthSnapshot {
    pub footprint: String,
    pub passes: usize,
    pub paused: bool,
    pub terminal: bool,
    pub growable_walls: usize,
    pub rooms: Vec<GrowthRoom>,
    /// One string per row: `#` exterior, `.` free, `w` wall, `v` void.
    pub occupancy: Vec<String>,
}

fn idx(p: Pixel) -> usize {
    (p.y as u32 * FOOTPRINT_SIZE + p.x as u32) as usize
}

fn base_occupancy(fp: &Footprint) -> Vec<Owner> {
    fp.mask()
        .iter()
        .map(|m| if *m { Owner::Free } else { Owner::Exterior })
        .collect()
}

pub const FLOOR_MATERIAL: &str = "floor";
pub const ROOF_MATERIAL: &str = "roof";
pub const WALL_MATERIAL: &str = "wall";

/// Converts a finished growth into tiles: one floor and one roof tile per
/// void pixel, and one wall segment per room side spanning corner to corner.
/// One pixel is one meter.
pub fn growth_to_scene(state: &GrowthState, grid_height_m: f64) -> Result<TileScene, GrowthError> {
    if !state.is_terminal() {
        return Err(GrowthError::NotTerminal);
    }
    let mut scene = TileScene::new(1, grid_height_m, TileSize::One)?;
    for room in &state.rooms {
        let r = room.rect;
        for p in r.pixels() {
            scene.insert(PlacedObject::new(ObjectKind::Floor, FLOOR_MATERIAL, Pose::floor(0, p.x, p.y)))?;
            scene.insert(PlacedObject::new(ObjectKind::Roof, ROOF_MATERIAL, Pose::floor(0, p.x, p.y)))?;
        }
        for side in Side::ALL {
            scene.insert(PlacedObject::new(ObjectKind::Wall, WALL_MATERIAL, wall_segment(r, side)))?;
        }
    }
    Ok(scene)
}

/// Wall segment on the ring row of one side, attached to the void pixel at
/// the middle of that side.
fn wall_segment(r: PixelRect, side: Side) -> Pose {
    let (along_len, along_lo) = match side {
        Side::N | Side::S => (r.width(), r.min_x),
        Side::E | Side::W => (r.height(), r.min_y),
    };
    let mid = along_lo + (along_len - 1) / 2;
    let (cx, cy) = match side {
        Side::N => (mid, r.min_y),
        Side::S => (mid, r.max_y),
        Side::E => (r.max_x, mid),
        Side::W => (r.min_x, mid),
    };
    // segment centre relative to the attached edge's midpoint
    let along_m = (along_lo as f64 + along_len as f64 / 2.0) - (mid as f64 + 0.5);
    Pose::edge_span(
        0,
        cx,
        cy,
        side,
        EdgeSpan {
            length_m: (along_len + 2) as f64,
            along_m,
            outward_m: 0.5,
        },
    )
}
