//! One line per acceptance criterion. Exits non-zero if any criterion fails.

mod common;

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use tower::ServiceExt;

use musegen::bspca::{generate_layout, generate_scene, rasterize_states, BspError, BspParams, CellGrid, CellState};
use musegen::catalog::{ArtifactKind, ArtifactRecord, Catalog, GroupKeyKind};
use musegen::config::EngineConfig;
use musegen::footprint::{auto_seed_points, bundled, Footprint, Pixel, FOOTPRINT_SIZE};
use musegen::growth::GrowthState;
use musegen::roomgen::{generate_room, perimeter_slots, RoomError, RoomRequest};
use musegen::scene::{kelvin_to_color, ObjectKind, TileScene};
use musegen::service::{router, AppState};
use musegen::sizing::{plan_rooms, SizingConstants};

use common::{apply, new_scene, obj_census, placement_violations, random_catalog, random_ops, Mix};

const SIZING_TOLERANCE_M: f64 = 1e-9;
const SIZING_BUDGET: Duration = Duration::from_secs(1);
const GROWTH_RUN_BUDGET: Duration = Duration::from_millis(100);
const KELVIN_TOLERANCE: i32 = 3;
const E2E_BUDGET: Duration = Duration::from_secs(5);
const DISTINCT_LAYOUTS_MIN: usize = 9;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

// ---------------------------------------------------------------------------
// room sizing

/// The room sizing rule written out step by step with its own constants.
fn algorithm_one(records: &[&ArtifactRecord]) -> (f64, f64) {
    const LABEL: f64 = 0.5;
    const SPACE: f64 = 0.5;
    const ENTRANCE: f64 = 2.0;
    const DEFAULT_X: f64 = 1.0;
    const MIN_SIDE: f64 = 2.0;
    let holder = |k: ArtifactKind| match k {
        ArtifactKind::Video => Some(2.0),
        ArtifactKind::Sound => Some(1.0),
        ArtifactKind::Text => Some(1.0),
        _ => None,
    };
    let mut sum = 0.0;
    for a in records {
        let x = match holder(a.kind) {
            Some(w) => w,
            None => match &a.size {
                Some(s) => s.width_m,
                None => DEFAULT_X,
            },
        };
        sum += x;
        sum += LABEL + SPACE;
        sum += x / 4.0;
    }
    sum += ENTRANCE * 2.0;
    let pair = sum / 2.0;
    (pair, (pair / 2.0).max(MIN_SIDE))
}

fn oracle_groups(c: &Catalog, key: GroupKeyKind) -> BTreeMap<String, Vec<&ArtifactRecord>> {
    let mut out: BTreeMap<String, Vec<&ArtifactRecord>> = BTreeMap::new();
    for r in c.records() {
        let k = match key {
            GroupKeyKind::Artist => r.artist.clone(),
            GroupKeyKind::Style => r.style.clone(),
            GroupKeyKind::Location => r.location.clone(),
            GroupKeyKind::Time => r.time.map(|t| t.to_string()).unwrap_or_default(),
        };
        let k = if k.is_empty() { "unspecified".to_string() } else { k };
        out.entry(k).or_default().push(r);
    }
    out
}

fn sizing_oracle() -> Outcome {
    let catalogs: Vec<Catalog> = (0..200).map(|i| random_catalog(0xA1_0000 + i, 50)).collect();
    let constants = SizingConstants::default();
    let mut elapsed = Duration::ZERO;
    let mut worst = 0.0f64;
    let mut rooms_checked = 0;
    for c in &catalogs {
        for key in GroupKeyKind::ALL {
            let t = Instant::now();
            let rooms = plan_rooms(c, key, &constants).unwrap();
            elapsed += t.elapsed();
            let groups = oracle_groups(c, key);
            if rooms.len() != groups.len() {
                return fail(format!("{} rooms, oracle has {} groups", rooms.len(), groups.len()));
            }
            for room in &rooms {
                let name = room.group.key.to_string();
                let Some(members) = groups.get(&name) else { return fail(format!("unknown group {name}")) };
                let mut got: Vec<&str> = room.group.records.iter().map(|r| r.name.as_str()).collect();
                let mut want: Vec<&str> = members.iter().map(|r| r.name.as_str()).collect();
                got.sort();
                want.sort();
                if got != want {
                    return fail(format!("group {name} membership differs"));
                }
                let (pair, side) = algorithm_one(members);
                worst = worst
                    .max((room.wall_sum_m - pair).abs())
                    .max((room.width_m - side).abs())
                    .max((room.depth_m - side).abs());
                rooms_checked += 1;
            }
        }
    }
    let detail = format!("{rooms_checked} rooms, max error {worst:e} m, {elapsed:?}");
    if worst <= SIZING_TOLERANCE_M && elapsed < SIZING_BUDGET {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------
// growth

fn idx(x: i32, y: i32) -> usize {
    (y * FOOTPRINT_SIZE as i32 + x) as usize
}

/// Independent soundness check on a terminal state.
fn growth_sound(s: &GrowthState) -> Result<(), String> {
    let fp = s.footprint();
    let mut owner = vec![usize::MAX; (FOOTPRINT_SIZE * FOOTPRINT_SIZE) as usize];
    for (id, room) in s.rooms().iter().enumerate() {
        let r = room.rect;
        for y in r.min_y - 1..=r.max_y + 1 {
            for x in r.min_x - 1..=r.max_x + 1 {
                if !fp.is_interior(Pixel::new(x, y)) {
                    return Err(format!("room {id} leaves the footprint at ({x}, {y})"));
                }
                if owner[idx(x, y)] != usize::MAX {
                    return Err(format!("rooms {} and {id} overlap at ({x}, {y})", owner[idx(x, y)]));
                }
                owner[idx(x, y)] = id;
            }
        }
    }
    // rectangular voids: the engine's void pixels are exactly each rect
    for (id, room) in s.rooms().iter().enumerate() {
        let voids = s
            .occupancy()
            .iter()
            .filter(|o| matches!(o, musegen::growth::Owner::Void(r) if *r == id))
            .count();
        if voids != room.rect.area() {
            return Err(format!("room {id} void is not its rect"));
        }
    }
    if s.growable_walls() != 0 {
        return Err("not terminal".into());
    }
    Ok(())
}

fn interior_bbox(fp: &Footprint) -> (i32, i32, i32, i32) {
    let n = FOOTPRINT_SIZE as i32;
    let inside: Vec<(i32, i32)> =
        (0..n).flat_map(|y| (0..n).map(move |x| (x, y))).filter(|&(x, y)| fp.is_interior(Pixel::new(x, y))).collect();
    let xs = inside.iter().map(|p| p.0);
    let ys = inside.iter().map(|p| p.1);
    (xs.clone().min().unwrap(), ys.clone().min().unwrap(), xs.max().unwrap(), ys.max().unwrap())
}

fn growth_soundness() -> Outcome {
    let mut slowest = Duration::ZERO;
    let mut runs = 0;
    for fp in bundled::all() {
        for n in [1usize, 2, 4, 8] {
            let seeds = auto_seed_points(&fp, n).unwrap();
            let t = Instant::now();
            let mut s = GrowthState::with_seeds(fp.clone(), &seeds).unwrap();
            s.run().unwrap();
            slowest = slowest.max(t.elapsed());
            if let Err(e) = growth_sound(&s) {
                return fail(format!("{} with {n} seeds: {e}", fp.id()));
            }
            runs += 1;
        }
    }
    for id in ["fp01-rectangle", "fp02-square"] {
        let fp = bundled::load(id).unwrap();
        let (x0, y0, x1, y1) = interior_bbox(&fp);
        let mut s = GrowthState::with_seeds(fp.clone(), &auto_seed_points(&fp, 1).unwrap()).unwrap();
        s.run().unwrap();
        let r = s.rooms()[0].rect;
        if (r.min_x, r.min_y, r.max_x, r.max_y) != (x0 + 1, y0 + 1, x1 - 1, y1 - 1) {
            return fail(format!("{id}: single room {r:?} does not fill the interior minus its ring"));
        }
    }
    let detail = format!("{runs} runs, slowest {slowest:?}");
    if slowest < GROWTH_RUN_BUDGET {
        pass(detail)
    } else {
        fail(detail)
    }
}

/// Pixel-level round robin: each room owns wall and void pixels on a grid;
/// advancing a side claims the next pixel row when all of it is free
/// interior and turns the old wall row into void.
fn simulate_growth(fp: &Footprint, seeds: &[Pixel]) -> Vec<(i32, i32, i32, i32)> {
    const FREE: i32 = -1;
    const OUTSIDE: i32 = -2;
    let n = FOOTPRINT_SIZE as i32;
    let mut grid: Vec<i32> = (0..n * n).map(|i| if fp.mask()[i as usize] { FREE } else { OUTSIDE }).collect();
    let at = |g: &Vec<i32>, x: i32, y: i32| if x < 0 || y < 0 || x >= n || y >= n { OUTSIDE } else { g[idx(x, y)] };
    // (min_x, min_y, max_x, max_y) of each void, plus four growable flags
    let mut rooms: Vec<([i32; 4], [bool; 4])> = Vec::new();
    for s in seeds {
        let block: Vec<(i32, i32)> = (-1..=1).flat_map(|dy| (-1..=1).map(move |dx| (s.x + dx, s.y + dy))).collect();
        if block.iter().all(|&(x, y)| at(&grid, x, y) == FREE) {
            let id = rooms.len() as i32;
            for (x, y) in block {
                grid[idx(x, y)] = id;
            }
            rooms.push(([s.x, s.y, s.x, s.y], [true; 4]));
        }
    }
    loop {
        let mut any = false;
        for id in 0..rooms.len() {
            for side in 0..4 {
                if !rooms[id].1[side] {
                    continue;
                }
                any = true;
                let [x0, y0, x1, y1] = rooms[id].0;
                let row: Vec<(i32, i32)> = match side {
                    0 => (x0 - 1..=x1 + 1).map(|x| (x, y0 - 2)).collect(),
                    1 => (y0 - 1..=y1 + 1).map(|y| (x1 + 2, y)).collect(),
                    2 => (x0 - 1..=x1 + 1).map(|x| (x, y1 + 2)).collect(),
                    _ => (y0 - 1..=y1 + 1).map(|y| (x0 - 2, y)).collect(),
                };
                if row.iter().all(|&(x, y)| at(&grid, x, y) == FREE) {
                    for (x, y) in row {
                        grid[idx(x, y)] = id as i32;
                    }
                    let r = &mut rooms[id].0;
                    match side {
                        0 => r[1] -= 1,
                        1 => r[2] += 1,
                        2 => r[3] += 1,
                        _ => r[0] -= 1,
                    }
                } else {
                    rooms[id].1[side] = false;
                }
            }
        }
        if !any {
            break;
        }
    }
    rooms.into_iter().map(|(r, _)| (r[0], r[1], r[2], r[3])).collect()
}

fn growth_oracle() -> Outcome {
    let all = bundled::all();
    let mut m = Mix(0x6_0000);
    let mut rooms = 0;
    for case in 0..50 {
        let fp = &all[m.below(all.len() as u64) as usize];
        let count = 1 + m.below(10) as usize;
        let seeds: Vec<Pixel> = (0..count * 4)
            .map(|_| Pixel::new(m.below(128) as i32, m.below(128) as i32))
            .filter(|p| fp.block_inside(*p))
            .take(count)
            .collect();
        let mut s = GrowthState::new(fp.clone());
        for p in &seeds {
            let _ = s.place_seed(*p);
        }
        if s.rooms().is_empty() {
            continue;
        }
        s.run().unwrap();
        let got: Vec<(i32, i32, i32, i32)> =
            s.rooms().iter().map(|r| (r.rect.min_x, r.rect.min_y, r.rect.max_x, r.rect.max_y)).collect();
        let want = simulate_growth(fp, &seeds);
        if got != want {
            return fail(format!("case {case} on {}: {got:?} vs {want:?}", fp.id()));
        }
        rooms += got.len();
    }
    pass(format!("50 cases, {rooms} rooms identical"))
}

// ---------------------------------------------------------------------------
// bsp

fn bsp_params(m: &mut Mix, rooms: u32) -> BspParams {
    let room_min = 3 + m.below(3) as i32;
    let corridor_min = 1 + m.below(2) as i32;
    BspParams {
        footprint_w: 40 + m.below(40) as i32,
        footprint_d: 40 + m.below(40) as i32,
        num_rooms: rooms,
        room_min,
        room_max: room_min + m.below(5) as i32,
        corridor_min,
        corridor_max: corridor_min + m.below(2) as i32,
        seed: m.next(),
        max_restarts: 64,
    }
}

fn bsp_determinism() -> Outcome {
    let mut m = Mix(0xB5_0000);
    for i in 0..20 {
        let n = 1 + m.below(8) as u32;
        let p = bsp_params(&mut m, n);
        let a = generate_scene(&p, 3.0, 1).map(|s| s.2.export_layout());
        let b = generate_scene(&p, 3.0, 1).map(|s| s.2.export_layout());
        if a != b {
            return fail(format!("param set {i} differs between runs"));
        }
    }
    let base = BspParams {
        footprint_w: 48,
        footprint_d: 48,
        num_rooms: 5,
        room_min: 3,
        room_max: 8,
        corridor_min: 1,
        corridor_max: 2,
        seed: 0,
        max_restarts: 64,
    };
    let distinct: HashSet<String> = (0..10)
        .map(|seed| generate_scene(&BspParams { seed, ..base.clone() }, 3.0, 1).unwrap().1.rows().concat())
        .collect();
    let detail = format!("20 param sets repeat byte for byte; {} distinct plans over seeds 0-9", distinct.len());
    if distinct.len() >= DISTINCT_LAYOUTS_MIN {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn bfs_covers_floor(grid: &CellGrid) -> bool {
    let open = |x: i32, y: i32| grid.get(x, y).is_some_and(|c| matches!(c.state, CellState::Floor | CellState::Door));
    let floors: Vec<(i32, i32)> =
        grid.iter().filter(|(_, _, c)| c.state == CellState::Floor).map(|(x, y, _)| (x, y)).collect();
    let Some(&start) = floors.first() else { return true };
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((x, y)) = queue.pop_front() {
        for (dx, dy) in [(0, -1), (1, 0), (0, 1), (-1, 0)] {
            if open(x + dx, y + dy) && seen.insert((x + dx, y + dy)) {
                queue.push_back((x + dx, y + dy));
            }
        }
    }
    floors.iter().all(|f| seen.contains(f))
}

fn bsp_fidelity() -> Outcome {
    let mut m = Mix(0xF1_0000);
    let mut layouts = 0;
    for rooms in 1..=12u32 {
        for _ in 0..5 {
            let mut p = bsp_params(&mut m, rooms);
            p.footprint_w = p.footprint_w.max(64);
            p.footprint_d = p.footprint_d.max(64);
            while p.validate().is_err() {
                p = bsp_params(&mut m, rooms);
                p.footprint_w = p.footprint_w.max(64);
                p.footprint_d = p.footprint_d.max(64);
            }
            let layout = match generate_layout(&p) {
                Ok(l) => l,
                Err(e) => return fail(format!("{rooms} rooms on feasible params {p:?}: {e}")),
            };
            if layout.rooms.len() != rooms as usize {
                return fail(format!("asked for {rooms} rooms, got {}", layout.rooms.len()));
            }
            let grid = rasterize_states(&layout);
            if !bfs_covers_floor(&grid) {
                return fail(format!("{rooms} rooms: floor not connected"));
            }
            layouts += 1;
        }
    }
    // rejection happens before any draw, so even an unbounded restart budget returns at once
    let t = Instant::now();
    let infeasible = BspParams {
        footprint_w: 20,
        footprint_d: 20,
        num_rooms: 12,
        room_min: 5,
        room_max: 6,
        corridor_min: 1,
        corridor_max: 1,
        seed: 1,
        max_restarts: u32::MAX,
    };
    let rejected = matches!(generate_layout(&infeasible), Err(BspError::InfeasibleParams(_)))
        && matches!(infeasible.validate(), Err(BspError::InfeasibleParams(_)));
    let quick = t.elapsed() < Duration::from_millis(50);
    let detail = format!("{layouts} layouts exact and connected; infeasible rejected in {:?}", t.elapsed());
    if rejected && quick {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn rasterization_census() -> Outcome {
    let mut m = Mix(0xCE_0000);
    let mut done = 0;
    while done < 100 {
        let n = 1 + m.below(10) as u32;
        let p = bsp_params(&mut m, n);
        let Ok((layout, grid, scene)) = generate_scene(&p, 3.0, 1) else { continue };
        let regions = layout.rooms.len() + layout.corridors.len();
        let corridor_len = |c: &musegen::bspca::Corridor| match c.direction {
            musegen::scene::Side::E | musegen::scene::Side::W => c.rect.w,
            _ => c.rect.h,
        };
        let perimeter: i64 = layout.rooms.iter().map(|r| 2 * (r.w + r.h) as i64 + 4).sum::<i64>()
            + layout.corridors.iter().map(|c| 2 * corridor_len(c) as i64).sum::<i64>();
        let barriers = [CellState::Wall, CellState::CornerWall, CellState::Door, CellState::Window]
            .iter()
            .map(|s| grid.count(*s))
            .sum::<usize>();
        if barriers as i64 != perimeter {
            return fail(format!("layout {done}: {barriers} barrier cells, formula gives {perimeter}"));
        }
        if grid.count(CellState::CornerWall) != 4 * regions {
            return fail(format!("layout {done}: {} corners for {regions} regions", grid.count(CellState::CornerWall)));
        }
        if scene.count(ObjectKind::Roof) != grid.count(CellState::Floor) {
            return fail(format!("layout {done}: roof count differs from floor cells"));
        }
        done += 1;
    }
    pass("100 layouts match the perimeter formula, 4 corners per region, roofs equal floors")
}

fn room_census() -> Outcome {
    let mut rooms = 0;
    for w in 2..=10 {
        for d in 2..=10 {
            let slots = perimeter_slots(w, d).len() as u32;
            for doors in 0..=slots.min(8) {
                for windows in 0..=slots - doors {
                    let s = match generate_room(&RoomRequest::new(w as f64, d as f64, windows, doors), 3.0) {
                        Ok(s) => s,
                        Err(e) => return fail(format!("{w}x{d} with {doors}+{windows}: {e}")),
                    };
                    let barrier = s.count(ObjectKind::Wall) + s.count(ObjectKind::Door) + s.count(ObjectKind::Window);
                    if barrier != 2 * (w + d) as usize
                        || s.count(ObjectKind::Door) != doors as usize
                        || s.count(ObjectKind::Window) != windows as usize
                        || s.count(ObjectKind::Floor) != (w * d) as usize
                    {
                        return fail(format!("{w}x{d} with {doors}+{windows} breaks conservation"));
                    }
                    rooms += 1;
                }
            }
            let over = generate_room(&RoomRequest::new(w as f64, d as f64, slots, 1), 3.0);
            if over.map(|_| ()) != Err(RoomError::TooManyOpenings(slots as usize)) {
                return fail(format!("{w}x{d}: over-budget openings accepted"));
            }
        }
    }
    pass(format!("{rooms} rooms conserve 2(W+D); over-budget rejected for all 81 sizes"))
}

// ---------------------------------------------------------------------------
// kelvin

/// The published blackbody fit (temperature in hundreds of kelvin).
fn kelvin_reference(k: f64) -> [f64; 3] {
    let t = k / 100.0;
    let r = if t <= 66.0 { 255.0 } else { 329.698727446 * (t - 60.0).powf(-0.1332047592) };
    let g = if t <= 66.0 { 99.4708025861 * t.ln() - 161.1195681661 } else { 288.1221695283 * (t - 60.0).powf(-0.0755148492) };
    let b = if t >= 66.0 {
        255.0
    } else if t <= 19.0 {
        0.0
    } else {
        138.5177312231 * (t - 10.0).ln() - 305.0447927307
    };
    [r, g, b].map(|v| v.clamp(0.0, 255.0))
}

fn kelvin() -> Outcome {
    let mut worst = 0;
    for k in [1000.0, 2700.0, 4000.0, 6600.0, 10000.0] {
        let c = kelvin_to_color(k).unwrap();
        let want = kelvin_reference(k);
        for (got, want) in [c.r, c.g, c.b].iter().zip(want) {
            worst = worst.max((*got as i32 - want.round() as i32).abs());
        }
    }
    let mut prev = kelvin_to_color(1000.0).unwrap();
    for k in 1001..=12000 {
        let c = kelvin_to_color(k as f64).unwrap();
        if c.r > prev.r || c.b < prev.b {
            return fail(format!("monotonicity breaks at {k} K"));
        }
        prev = c;
    }
    let detail = format!("max channel deviation {worst}; 11000 one-kelvin steps monotone");
    if worst <= KELVIN_TOLERANCE {
        pass(detail)
    } else {
        fail(detail)
    }
}

// ---------------------------------------------------------------------------
// scene

fn scene_round_trip() -> Outcome {
    let mut objects = 0;
    for seed in 0..100u64 {
        let mut scene = new_scene(seed);
        for op in random_ops(0x5C_0000 + seed, 150) {
            apply(&mut scene, &op);
            let bad = placement_violations(&scene);
            if !bad.is_empty() {
                return fail(format!("sequence {seed}: {bad:?} after {op:?}"));
            }
        }
        let doc = scene.export_layout();
        let again = match TileScene::import_layout(&doc) {
            Ok(s) => s.export_layout(),
            Err(e) => return fail(format!("sequence {seed}: import failed: {e}")),
        };
        if again != doc {
            return fail(format!("sequence {seed}: export after import differs"));
        }
        let tiles = scene.objects().iter().filter(|o| o.kind.is_tile()).count();
        if obj_census(&scene.export_obj()) != (8 * tiles, 12 * tiles) {
            return fail(format!("sequence {seed}: OBJ census off for {tiles} tiles"));
        }
        objects += scene.objects().len();
    }
    pass(format!("100 sequences ({objects} objects) round trip byte for byte; OBJ 8N/12N"))
}

// ---------------------------------------------------------------------------
// end to end

fn e2e() -> Outcome {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let meta = root.join("samples/metadata.csv");
    let manifest = root.join("samples/manifest.txt");
    let tmp = tempfile::tempdir().unwrap();
    let out = |p: &str| tmp.path().join(p).to_string_lossy().into_owned();
    let (meta_s, manifest_s) = (meta.to_string_lossy().into_owned(), manifest.to_string_lossy().into_owned());
    let cat = ["--metadata", meta_s.as_str(), "--manifest", manifest_s.as_str()];
    let runs: Vec<Vec<String>> = [
        vec!["catalog", "parse"].into_iter().chain(cat).chain(["--out", &out("catalog.json")]).collect::<Vec<_>>(),
        vec!["plan", "--key", "style"].into_iter().chain(cat).chain(["--out", &out("plan.json")]).collect(),
        vec!["gen", "growth", "--footprint", "fp03-l-wing", "--seeds", "data", "--key", "style"]
            .into_iter()
            .chain(cat)
            .chain(["--out", &out("growth")])
            .collect(),
        vec!["gen", "bsp", "--key", "style", "--seed", "7"].into_iter().chain(cat).chain(["--out", &out("bsp")]).collect(),
        vec!["gen", "room", "--key", "style", "--group", "Cubism", "--windows", "2"]
            .into_iter()
            .chain(cat)
            .chain(["--out", &out("room")])
            .collect(),
        vec!["export", "json", &out("bsp/layout.json"), "--out", &out("export/layout.json")],
        vec!["export", "obj", &out("bsp/layout.json"), "--out", &out("export/scene.obj")],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();

    let t = Instant::now();
    for args in &runs {
        let o = Command::new(env!("CARGO_BIN_EXE_musegen")).args(args).output().unwrap();
        if !o.status.success() {
            return fail(format!("`{}` failed: {}", args.join(" "), String::from_utf8_lossy(&o.stderr)));
        }
    }
    let cli_time = t.elapsed();
    let plan: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out("plan.json")).unwrap()).unwrap();
    if plan["room_count"] != 3 {
        return fail("sample plan does not have 3 rooms");
    }

    let rt = tokio::runtime::Runtime::new().unwrap();
    let http = rt.block_on(async {
        let app = router(Arc::new(AppState::new(EngineConfig::default(), None)), None);
        let send = |req: Request<Body>| {
            let app = app.clone();
            async move {
                let resp = app.oneshot(req).await.unwrap();
                (resp.status().as_u16(), resp.into_body().collect().await.unwrap().to_bytes().to_vec())
            }
        };
        let (_, body) = send(Request::post("/sessions").body(Body::empty()).unwrap()).await;
        let id = serde_json::from_slice::<serde_json::Value>(&body).unwrap()["id"].as_str().unwrap().to_string();
        let boundary = "acceptance";
        let mut form = Vec::new();
        for (name, file, text) in [
            ("metadata", "metadata.csv", std::fs::read_to_string(&meta).unwrap()),
            ("manifest", "manifest.txt", std::fs::read_to_string(&manifest).unwrap()),
        ] {
            form.extend(
                format!("--{boundary}\r\nContent-Disposition: form-data; name=\"{name}\"; filename=\"{file}\"\r\n\r\n{text}\r\n").bytes(),
            );
        }
        form.extend(format!("--{boundary}--\r\n").bytes());
        let (status, _) = send(
            Request::post(format!("/sessions/{id}/catalog"))
                .header("content-type", format!("multipart/form-data; boundary={boundary}"))
                .body(Body::from(form))
                .unwrap(),
        )
        .await;
        assert_eq!(status, 200);
        let mut docs = Vec::new();
        for (gen, body) in [
            ("growth", r#"{"footprint":"fp03-l-wing","seeds":"data","key":"style"}"#),
            ("bsp", r#"{"key":"style","seed":7}"#),
            ("room", r#"{"key":"style","group":"Cubism","n_windows":2}"#),
        ] {
            let req = Request::post(format!("/sessions/{id}/generate/{gen}"))
                .header("content-type", "application/json")
                .body(Body::from(body))
                .unwrap();
            let (status, doc) = send(req).await;
            assert_eq!(status, 201, "{gen}: {}", String::from_utf8_lossy(&doc));
            let (_, obj) = send(Request::get(format!("/sessions/{id}/export/obj")).body(Body::empty()).unwrap()).await;
            docs.push((gen, doc, obj));
        }
        docs
    });
    for (gen, doc, obj) in http {
        let dir = tmp.path().join(gen);
        if std::fs::read(dir.join("layout.json")).unwrap() != doc {
            return fail(format!("{gen}: HTTP layout differs from CLI"));
        }
        if std::fs::read(dir.join("scene.obj")).unwrap() != obj {
            return fail(format!("{gen}: HTTP OBJ differs from CLI"));
        }
    }
    if std::fs::read(out("export/layout.json")).unwrap() != std::fs::read(out("bsp/layout.json")).unwrap() {
        return fail("re-exported JSON differs");
    }
    let detail = format!("7 CLI runs in {cli_time:?}; HTTP layouts and OBJ byte-identical for 3 generators");
    if cli_time < E2E_BUDGET {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("room sizing oracle equivalence", sizing_oracle),
        ("growth soundness", growth_soundness),
        ("growth simulator oracle", growth_oracle),
        ("bsp determinism", bsp_determinism),
        ("bsp fidelity and connectivity", bsp_fidelity),
        ("rasterization census", rasterization_census),
        ("room generation census", room_census),
        ("kelvin conversion", kelvin),
        ("scene round trip", scene_round_trip),
        ("end-to-end cli and http", e2e),
    ];
    let build = if cfg!(debug_assertions) { "test profile, opt-level 2, debug assertions on" } else { "release" };
    println!("acceptance ({build})");
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!("{} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
