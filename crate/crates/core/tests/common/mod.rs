#![allow(dead_code)]

use musegen::catalog::{ArtifactKind, ArtifactRecord, Catalog, Size};

/// splitmix64, so test inputs do not depend on the engine's own RNG.
pub struct Mix(pub u64);

impl Mix {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn chance(&mut self, pct: u64) -> bool {
        self.below(100) < pct
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len() as u64) as usize]
    }
}

pub const EXTENSIONS: [(&str, ArtifactKind); 5] = [
    ("png", ArtifactKind::Painting),
    ("obj", ArtifactKind::Sculpture),
    ("mp4", ArtifactKind::Video),
    ("mp3", ArtifactKind::Sound),
    ("txt", ArtifactKind::Text),
];

/// Up to `max` artifacts of mixed kinds with randomly missing fields.
/// Sizes are multiples of 1/8 m so sums are exact in binary floating point.
pub fn random_catalog(seed: u64, max: usize) -> Catalog {
    let mut m = Mix(seed);
    let n = 1 + m.below(max as u64) as usize;
    let styles = ["Baroque", "Cubism", "Dada", "Fauvism"];
    let artists = ["A. Lind", "B. Osei", "C. Park"];
    let places = ["Oslo", "Lagos", "Seoul"];
    let records = (0..n)
        .map(|i| {
            let (ext, kind) = *m.pick(&EXTENSIONS);
            let name = format!("item{i:02}-{}", m.below(1000));
            let text = |m: &mut Mix, xs: &[&str]| if m.chance(25) { String::new() } else { m.pick(xs).to_string() };
            ArtifactRecord {
                artist: text(&mut m, &artists),
                style: text(&mut m, &styles),
                location: text(&mut m, &places),
                time: if m.chance(30) { None } else { Some(1800 + m.below(200) as i64) },
                size: if m.chance(40) {
                    None
                } else {
                    Some(Size { width_m: (1 + m.below(24)) as f64 / 8.0, height_m: (1 + m.below(16)) as f64 / 8.0, depth_m: None })
                },
                description: String::new(),
                kind,
                asset_ref: format!("{name}.{ext}"),
                name,
            }
        })
        .collect();
    Catalog::from_records(records).expect("generated catalog is valid")
}

use musegen::scene::{ObjectKind, ObjectSpec, PlaceInput, PlacedObject, Pose, ScaleMode, TileScene, TileSize};

#[derive(Debug, Clone)]
pub enum Op {
    Place { kind: ObjectKind, level: u32, x: f64, z: f64 },
    Remove(usize),
    Move { pick: usize, x: f64, z: f64 },
    Scale(ScaleMode),
    Kelvin(f64),
    Ghost { kind: ObjectKind, x: f64, z: f64, commit: bool },
}

pub fn random_ops(seed: u64, n: usize) -> Vec<Op> {
    let mut m = Mix(seed);
    let kinds = [
        ObjectKind::Floor,
        ObjectKind::Floor,
        ObjectKind::Floor,
        ObjectKind::Roof,
        ObjectKind::Wall,
        ObjectKind::Wall,
        ObjectKind::CornerWall,
        ObjectKind::Door,
        ObjectKind::Window,
        ObjectKind::Furniture,
        ObjectKind::Stairs,
    ];
    // coordinates on a 1/16 m lattice keep float text exact
    let coord = |m: &mut Mix| m.below(16 * 8) as f64 / 16.0 - 0.5;
    (0..n)
        .map(|_| match m.below(20) {
            0..=10 => Op::Place { kind: *m.pick(&kinds), level: m.below(3) as u32, x: coord(&mut m), z: coord(&mut m) },
            11..=13 => Op::Remove(m.below(1 << 16) as usize),
            14..=16 => Op::Move { pick: m.below(1 << 16) as usize, x: coord(&mut m), z: coord(&mut m) },
            17 => Op::Scale(if m.chance(50) { ScaleMode::Model } else { ScaleMode::Human }),
            18 => Op::Kelvin(500.0 + m.below(14000) as f64),
            _ => Op::Ghost { kind: *m.pick(&kinds), x: coord(&mut m), z: coord(&mut m), commit: m.chance(50) },
        })
        .collect()
}

fn spec(kind: ObjectKind) -> ObjectSpec {
    ObjectSpec { kind, material_id: kind.as_str().to_string(), artifact: None }
}

/// Applies one op; rejected ops leave the scene as it was.
pub fn apply(scene: &mut TileScene, op: &Op) {
    let pick = |scene: &TileScene, i: usize| {
        let objs = scene.objects();
        (!objs.is_empty()).then(|| objs[i % objs.len()].id)
    };
    match op {
        Op::Place { kind, level, x, z } => {
            let _ = scene.place(&spec(*kind), &PlaceInput { level: *level, ..PlaceInput::at(0, *x, *z) });
        }
        Op::Remove(i) => {
            if let Some(id) = pick(scene, *i) {
                scene.remove(id).unwrap();
            }
        }
        Op::Move { pick: i, x, z } => {
            if let Some(id) = pick(scene, *i) {
                let level = scene.object(id).unwrap().pose.level().unwrap_or(0);
                let _ = scene.transform(id, &PlaceInput::at(level, *x, *z));
            }
        }
        Op::Scale(mode) => scene.set_scale_mode(*mode),
        Op::Kelvin(k) => scene.lighting_mut().set_temperature_k(*k),
        Op::Ghost { kind, x, z, commit } => {
            if scene.set_ghost(&spec(*kind), &PlaceInput::at(0, *x, *z)).is_ok() && *commit {
                let _ = scene.commit_ghost();
            }
            scene.clear_ghost();
        }
    }
}

pub fn new_scene(seed: u64) -> TileScene {
    let tile = [TileSize::One, TileSize::Two, TileSize::Four][(seed % 3) as usize];
    TileScene::new(3, 2.5 + (seed % 4) as f64 * 0.5, tile).unwrap()
}

/// Placement invariants checked from scratch, independently of the scene's
/// own validation.
pub fn placement_violations(scene: &TileScene) -> Vec<String> {
    let mut out = Vec::new();
    let objs: &[PlacedObject] = scene.objects();
    for (i, a) in objs.iter().enumerate() {
        if a.ghost {
            out.push(format!("ghost {} is placed", a.id));
        }
        match &a.pose {
            Pose::FloorBound { level, cell } => {
                for b in &objs[i + 1..] {
                    if b.kind == a.kind && matches!(&b.pose, Pose::FloorBound { level: l, cell: c } if l == level && c == cell) {
                        out.push(format!("{} and {} share a cell", a.id, b.id));
                    }
                }
            }
            Pose::EdgeBound { level, cell, .. } => {
                let supported = objs.iter().any(|f| {
                    f.kind == ObjectKind::Floor && matches!(&f.pose, Pose::FloorBound { level: l, cell: c } if l == level && c == cell)
                });
                if !supported {
                    out.push(format!("{} hangs free", a.id));
                }
            }
            Pose::Free { .. } => {}
        }
        if *a.pose.level().as_ref().unwrap_or(&0) >= scene.grid_levels() {
            out.push(format!("{} is above the top level", a.id));
        }
    }
    out
}

/// `(v, f)` record counts in an OBJ document.
pub fn obj_census(obj: &str) -> (usize, usize) {
    let v = obj.lines().filter(|l| l.starts_with("v ")).count();
    let f = obj.lines().filter(|l| l.starts_with("f ")).count();
    (v, f)
}
