//! Request handling shared by the CLI and the HTTP service, so identical
//! parameters give byte-identical documents on both surfaces.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bspca::{self, BspError, BspParams};
use crate::catalog::{build_catalog, group_by, parse_metadata, Catalog, CatalogBuild, CatalogError, GroupKeyKind, MetadataFormat};
use crate::config::EngineConfig;
use crate::footprint::{auto_seed_points, bundled, Footprint, FootprintError, Pixel, FOOTPRINT_SIZE};
use crate::growth::{extract_corners, growth_to_scene, GrowthError, GrowthState};
use crate::rng::{Phase, StreamRng};
use crate::roomgen::{generate_room, room_from_group, Openings, RoomError, RoomRequest};
use crate::scene::{canonical_json, TileScene};
use crate::sizing::plan_rooms;

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Footprint(#[from] FootprintError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Bsp(#[from] BspError),
    #[error(transparent)]
    Room(#[from] RoomError),
    #[error("unknown footprint {0:?}")]
    UnknownFootprint(String),
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
    #[error("this request needs a catalog")]
    MissingCatalog,
    #[error("no growth in progress")]
    NoLiveGrowth,
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

impl GenerateError {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            GenerateError::Catalog(e) => match e {
                CatalogError::UnsupportedFormat(_) => "UnsupportedFormat",
                CatalogError::MalformedDocument { .. } => "MalformedDocument",
                CatalogError::UnknownColumn(_) => "UnknownColumn",
                CatalogError::BadSizeSyntax(_) => "BadSizeSyntax",
                CatalogError::DuplicateName(_) => "DuplicateName",
                CatalogError::EmptyCatalog => "EmptyCatalog",
            },
            GenerateError::Footprint(e) => match e {
                FootprintError::TooManySeeds { .. } => "TooManySeeds",
                _ => "InvalidFootprint",
            },
            GenerateError::Growth(e) => match e {
                GrowthError::SeedOutsideInterior(_) => "SeedOutsideInterior",
                GrowthError::RegionNotClean { .. } => "RegionNotClean",
                GrowthError::NoRooms => "NoRooms",
                GrowthError::NotTerminal => "NotTerminal",
                GrowthError::Paused => "Paused",
                GrowthError::AlreadyGrowing => "AlreadyGrowing",
                GrowthError::Scene(_) => "SceneError",
            },
            GenerateError::Bsp(e) => match e {
                BspError::InvalidParams(_) => "InvalidParams",
                BspError::InfeasibleParams(_) => "InfeasibleParams",
                BspError::RestartExhausted(_) => "RestartExhausted",
                BspError::Catalog(CatalogError::EmptyCatalog) => "EmptyCatalog",
                BspError::Catalog(_) => "CatalogError",
                BspError::Scene(_) => "SceneError",
            },
            GenerateError::Room(e) => match e {
                RoomError::TooManyOpenings(_) => "TooManyOpenings",
                RoomError::DegenerateDims { .. } => "DegenerateDims",
                RoomError::Scene(_) => "SceneError",
            },
            GenerateError::UnknownFootprint(_) => "UnknownFootprint",
            GenerateError::UnknownGroup(_) => "UnknownGroup",
            GenerateError::MissingCatalog => "MissingCatalog",
            GenerateError::NoLiveGrowth => "NoLiveGrowth",
            GenerateError::InvalidRequest(_) => "InvalidRequest",
        }
    }
}

/// Reads a metadata document and an asset manifest (one reference per
/// line, `#` comments allowed) into a catalog.
pub fn ingest_catalog(metadata_name: &str, metadata: &str, manifest: &str) -> Result<CatalogBuild, GenerateError> {
    let format = MetadataFormat::from_path(metadata_name)
        .ok_or_else(|| CatalogError::UnsupportedFormat(metadata_name.to_string()))?;
    let fragments = parse_metadata(metadata, format)?;
    let assets: Vec<String> = manifest
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    Ok(build_catalog(fragments, &assets)?)
}

/// Room sizing report for one grouping key.
pub fn plan_report(catalog: &Catalog, key: GroupKeyKind, cfg: &EngineConfig) -> Result<String, GenerateError> {
    let rooms = plan_rooms(catalog, key, &cfg.sizing)?;
    let rooms: Vec<Value> = rooms
        .iter()
        .map(|r| {
            json!({
                "group": r.group.key.to_string(),
                "artifacts": r.group.records.iter().map(|a| a.name.clone()).collect::<Vec<_>>(),
                "wall_sum_m": r.wall_sum_m,
                "width_m": r.width_m,
                "depth_m": r.depth_m,
            })
        })
        .collect();
    Ok(canonical_json(&json!({
        "key": key,
        "constants": cfg.sizing,
        "room_count": rooms.len(),
        "rooms": rooms,
    })))
}

/// How growth seeds are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedSpec {
    /// Farthest-point placement of `n` seeds.
    Auto(usize),
    /// `n` seeds drawn from the seed stream.
    Random(usize),
    Pixels(Vec<Pixel>),
    /// One auto-placed seed per catalog group.
    Data,
}

impl FromStr for SeedSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let count = |n: &str| n.trim().parse::<usize>().map_err(|_| format!("bad seed count {n:?}"));
        if s == "data" {
            return Ok(SeedSpec::Data);
        }
        let (mode, rest) = s.split_once(':').ok_or_else(|| format!("bad seed spec {s:?}"))?;
        match mode {
            "auto" => Ok(SeedSpec::Auto(count(rest)?)),
            "random" => Ok(SeedSpec::Random(count(rest)?)),
            "pixels" => rest
                .split(';')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    let (x, y) = p.split_once(',').ok_or_else(|| format!("bad pixel {p:?}"))?;
                    let parse = |v: &str| v.trim().parse::<i32>().map_err(|_| format!("bad pixel {p:?}"));
                    Ok(Pixel::new(parse(x)?, parse(y)?))
                })
                .collect::<Result<Vec<_>, String>>()
                .map(SeedSpec::Pixels),
            other => Err(format!("unknown seed mode {other:?}")),
        }
    }
}

impl fmt::Display for SeedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedSpec::Auto(n) => write!(f, "auto:{n}"),
            SeedSpec::Random(n) => write!(f, "random:{n}"),
            SeedSpec::Data => f.write_str("data"),
            SeedSpec::Pixels(ps) => {
                let parts: Vec<String> = ps.iter().map(|p| format!("{},{}", p.x, p.y)).collect();
                write!(f, "pixels:{}", parts.join(";"))
            }
        }
    }
}

impl Serialize for SeedSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SeedSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        // a bare list of pixels is shorthand for explicit seeds
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Pixels(Vec<Pixel>),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Pixels(ps) => Ok(SeedSpec::Pixels(ps)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthRequest {
    pub footprint: String,
    pub seeds: SeedSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<GroupKeyKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_height_m: Option<f64>,
}

pub fn bundled_footprint(id: &str) -> Result<Footprint, GenerateError> {
    bundled::load(id).ok_or_else(|| GenerateError::UnknownFootprint(id.to_string()))
}

fn random_seeds(fp: &Footprint, n: usize, seed: u64) -> Result<Vec<Pixel>, GenerateError> {
    let max = fp.max_seeds();
    if n == 0 || n > max {
        return Err(FootprintError::TooManySeeds { requested: n, max }.into());
    }
    let size = FOOTPRINT_SIZE as i32;
    let candidates: Vec<Pixel> = (0..size)
        .flat_map(|y| (0..size).map(move |x| Pixel::new(x, y)))
        .filter(|p| fp.block_inside(*p))
        .collect();
    let mut rng = StreamRng::new(seed, Phase::Seeds);
    let mut chosen: Vec<Pixel> = Vec::with_capacity(n);
    let mut draws = 0;
    while chosen.len() < n {
        draws += 1;
        if draws > 64 * candidates.len() {
            return Err(GenerateError::InvalidRequest(format!("could not scatter {n} seeds in {}", fp.id())));
        }
        let p = candidates[rng.below(candidates.len() as u64) as usize];
        if chosen.iter().all(|q| (p.x - q.x).abs() >= 3 || (p.y - q.y).abs() >= 3) {
            chosen.push(p);
        }
    }
    Ok(chosen)
}

pub fn resolve_seeds(
    fp: &Footprint,
    spec: &SeedSpec,
    seed: u64,
    catalog: Option<&Catalog>,
    key: GroupKeyKind,
) -> Result<Vec<Pixel>, GenerateError> {
    match spec {
        SeedSpec::Auto(n) => Ok(auto_seed_points(fp, *n)?),
        SeedSpec::Random(n) => random_seeds(fp, *n, seed),
        SeedSpec::Pixels(ps) => Ok(ps.clone()),
        SeedSpec::Data => {
            let catalog = catalog.ok_or(GenerateError::MissingCatalog)?;
            let groups = group_by(catalog, key)?;
            Ok(auto_seed_points(fp, groups.len())?)
        }
    }
}

/// A seeded but not yet grown state, for stepping.
pub fn growth_start(
    req: &GrowthRequest,
    fp: Footprint,
    catalog: Option<&Catalog>,
) -> Result<(GrowthState, Vec<Pixel>), GenerateError> {
    let key = req.key.unwrap_or(GroupKeyKind::Style);
    let seeds = resolve_seeds(&fp, &req.seeds, req.seed, catalog, key)?;
    let state = GrowthState::with_seeds(fp, &seeds)?;
    Ok((state, seeds))
}

/// Converts a finished growth into a stamped scene.
pub fn growth_finish(
    req: &GrowthRequest,
    state: &GrowthState,
    seeds: &[Pixel],
    cfg: &EngineConfig,
) -> Result<TileScene, GenerateError> {
    let height = req.grid_height_m.unwrap_or(cfg.scene.grid_height_m);
    let mut scene = growth_to_scene(state, height)?;
    let rooms: Vec<Value> = state
        .rooms()
        .iter()
        .zip(seeds)
        .map(|(r, seed)| json!({ "seed": seed, "rect": r.rect, "corners": extract_corners(r) }))
        .collect();
    let params = {
        let mut v = serde_json::to_value(req).expect("request serializes");
        v["footprint"] = json!(state.footprint().id());
        v
    };
    scene.set_generation(
        "growth",
        params,
        json!({ "seeds": seeds, "passes": state.passes(), "rooms": rooms }),
    );
    Ok(scene)
}

pub fn growth(req: &GrowthRequest, fp: Footprint, catalog: Option<&Catalog>, cfg: &EngineConfig) -> Result<TileScene, GenerateError> {
    let (mut state, seeds) = growth_start(req, fp, catalog)?;
    state.run()?;
    growth_finish(req, &state, &seeds, cfg)
}

/// BSP request. Unset fields come from the data mode (with `key`), the
/// configured defaults (with `rooms`), or the seed.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BspRequest {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rooms: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<GroupKeyKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub footprint_w: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub footprint_d: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub room_min: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub room_max: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corridor_min: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corridor_max: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_restarts: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_levels: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_height_m: Option<f64>,
}

pub fn resolve_bsp_params(req: &BspRequest, catalog: Option<&Catalog>, cfg: &EngineConfig) -> Result<BspParams, GenerateError> {
    let d = &cfg.bsp;
    let dims = (req.footprint_w.unwrap_or(d.footprint_w), req.footprint_d.unwrap_or(d.footprint_d));
    let mut p = if let Some(key) = req.key {
        let catalog = catalog.ok_or(GenerateError::MissingCatalog)?;
        bspca::params_from_data(catalog, key, dims, req.seed, &cfg.sizing)?
    } else if req.rooms.is_some() {
        BspParams {
            footprint_w: dims.0,
            footprint_d: dims.1,
            num_rooms: 1,
            room_min: d.room_min,
            room_max: d.room_max,
            corridor_min: d.corridor_min,
            corridor_max: d.corridor_max,
            seed: req.seed,
            max_restarts: d.max_restarts,
        }
    } else {
        bspca::random_params(req.seed, dims.0, dims.1)
    };
    if let Some(n) = req.rooms {
        p.num_rooms = n;
    }
    p.room_min = req.room_min.unwrap_or(p.room_min);
    p.room_max = req.room_max.unwrap_or(p.room_max.max(p.room_min));
    p.corridor_min = req.corridor_min.unwrap_or(p.corridor_min);
    p.corridor_max = req.corridor_max.unwrap_or(p.corridor_max.max(p.corridor_min));
    p.max_restarts = req.max_restarts.unwrap_or(d.max_restarts);
    p.validate()?;
    Ok(p)
}

pub fn bsp(req: &BspRequest, catalog: Option<&Catalog>, cfg: &EngineConfig) -> Result<TileScene, GenerateError> {
    let params = resolve_bsp_params(req, catalog, cfg)?;
    let height = req.grid_height_m.unwrap_or(cfg.scene.grid_height_m);
    let levels = req.grid_levels.unwrap_or(cfg.scene.grid_levels);
    let (_, _, scene) = bspca::generate_scene(&params, height, levels)?;
    Ok(scene)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomGenRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_m: Option<f64>,
    #[serde(default)]
    pub n_windows: u32,
    #[serde(default = "one")]
    pub n_doors: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<GroupKeyKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_height_m: Option<f64>,
}

fn one() -> u32 {
    1
}

impl Default for RoomGenRequest {
    fn default() -> Self {
        RoomGenRequest {
            width_m: None,
            depth_m: None,
            n_windows: 0,
            n_doors: 1,
            key: None,
            group: None,
            grid_height_m: None,
        }
    }
}

/// One room, either from explicit dimensions or from one catalog group.
pub fn room(req: &RoomGenRequest, catalog: Option<&Catalog>, cfg: &EngineConfig) -> Result<TileScene, GenerateError> {
    let height = req.grid_height_m.unwrap_or(cfg.scene.grid_height_m);
    let openings = Openings { n_windows: req.n_windows, n_doors: req.n_doors };
    if let Some(name) = &req.group {
        let catalog = catalog.ok_or(GenerateError::MissingCatalog)?;
        let key = req.key.unwrap_or(GroupKeyKind::Style);
        let group = group_by(catalog, key)?
            .into_iter()
            .find(|g| g.key.to_string() == *name)
            .ok_or_else(|| GenerateError::UnknownGroup(name.clone()))?;
        return Ok(room_from_group(&group, &cfg.sizing, openings, height)?);
    }
    match (req.width_m, req.depth_m) {
        (Some(w), Some(d)) => Ok(generate_room(&RoomRequest::new(w, d, req.n_windows, req.n_doors), height)?),
        _ => Err(GenerateError::InvalidRequest("room needs width_m and depth_m, or a group".into())),
    }
}

/// One room per group, named by the group key.
pub fn rooms_for_groups(
    catalog: &Catalog,
    key: GroupKeyKind,
    openings: Openings,
    cfg: &EngineConfig,
) -> Result<Vec<(String, TileScene)>, GenerateError> {
    group_by(catalog, key)?
        .iter()
        .map(|g| {
            let scene = room_from_group(g, &cfg.sizing, openings, cfg.scene.grid_height_m)?;
            Ok((g.key.to_string(), scene))
        })
        .collect()
}
