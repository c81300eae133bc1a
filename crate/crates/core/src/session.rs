//! Editing sessions: a catalog, one live scene, and an append-only log of
//! generations.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::{Catalog, CatalogBuild};
use crate::config::EngineConfig;
use crate::footprint::Pixel;
use crate::generate::{self, BspRequest, GenerateError, GrowthRequest, RoomGenRequest};
use crate::growth::{GrowthSnapshot, GrowthState};
use crate::scene::{MaterialsManifest, ObjectSpec, PlaceInput, PlacedObject, ScaleMode, SceneError, TileScene, TileSize};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogEntry {
    pub generator: String,
    pub params: Value,
    pub timestamp_s: u64,
}

/// Growth held between steps.
#[derive(Debug, Clone)]
pub struct LiveGrowth {
    pub request: GrowthRequest,
    pub state: GrowthState,
    pub seeds: Vec<Pixel>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightingPatch {
    pub sun_on: Option<bool>,
    pub ceiling_on: Option<bool>,
    pub spot_on: Option<bool>,
    pub temperature_k: Option<f64>,
}

#[derive(Debug)]
pub struct Session {
    id: String,
    catalog: Option<Catalog>,
    scene: TileScene,
    log: Vec<LogEntry>,
    growth: Option<LiveGrowth>,
    materials: MaterialsManifest,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl Session {
    pub fn new(id: impl Into<String>, cfg: &EngineConfig) -> Self {
        Session {
            id: id.into(),
            catalog: None,
            scene: TileScene::new(cfg.scene.grid_levels, cfg.scene.grid_height_m, TileSize::One)
                .expect("config was validated"),
            log: Vec::new(),
            growth: None,
            materials: MaterialsManifest::default(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn catalog(&self) -> Option<&Catalog> {
        self.catalog.as_ref()
    }

    pub fn scene(&self) -> &TileScene {
        &self.scene
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn growth(&self) -> Option<&LiveGrowth> {
        self.growth.as_ref()
    }

    pub fn materials(&self) -> &MaterialsManifest {
        &self.materials
    }

    pub fn set_material_rgb(&mut self, id: &str, rgb: [u8; 3]) -> &MaterialsManifest {
        self.materials.set_rgb(id, rgb[0], rgb[1], rgb[2]);
        &self.materials
    }

    pub fn set_scale_mode(&mut self, mode: ScaleMode) -> &TileScene {
        self.scene.set_scale_mode(mode);
        &self.scene
    }

    pub fn set_catalog(&mut self, build: CatalogBuild) -> Vec<String> {
        self.catalog = Some(build.catalog);
        build.unmatched_fragments
    }

    fn adopt(&mut self, scene: TileScene) -> &TileScene {
        if let Some(g) = scene.generation() {
            self.log.push(LogEntry { generator: g.generator.clone(), params: g.params.clone(), timestamp_s: now() });
        }
        self.scene = scene;
        &self.scene
    }

    pub fn generate_growth(&mut self, req: &GrowthRequest, cfg: &EngineConfig) -> Result<&TileScene, GenerateError> {
        let fp = generate::bundled_footprint(&req.footprint)?;
        let scene = generate::growth(req, fp, self.catalog.as_ref(), cfg)?;
        self.growth = None;
        Ok(self.adopt(scene))
    }

    /// Seeds a growth without running it; advance with [`Session::growth_step`].
    pub fn start_growth(&mut self, req: &GrowthRequest) -> Result<GrowthSnapshot, GenerateError> {
        let fp = generate::bundled_footprint(&req.footprint)?;
        let (state, seeds) = generate::growth_start(req, fp, self.catalog.as_ref())?;
        let snapshot = state.snapshot();
        self.growth = Some(LiveGrowth { request: req.clone(), state, seeds });
        Ok(snapshot)
    }

    fn live(&mut self) -> Result<&mut LiveGrowth, GenerateError> {
        self.growth
            .as_mut()
            .ok_or(GenerateError::NoLiveGrowth)
    }

    /// Runs up to `passes` round-robin passes; the scene is replaced once
    /// the growth becomes terminal.
    pub fn growth_step(&mut self, passes: usize, cfg: &EngineConfig) -> Result<GrowthSnapshot, GenerateError> {
        let live = self.live()?;
        for _ in 0..passes {
            if live.state.is_terminal() {
                break;
            }
            live.state.step()?;
        }
        let snapshot = live.state.snapshot();
        if live.state.is_terminal() {
            let live = self.growth.take().expect("checked above");
            let scene = generate::growth_finish(&live.request, &live.state, &live.seeds, cfg)?;
            self.adopt(scene);
        }
        Ok(snapshot)
    }

    pub fn growth_pause(&mut self) -> Result<GrowthSnapshot, GenerateError> {
        let live = self.live()?;
        live.state.pause();
        Ok(live.state.snapshot())
    }

    pub fn growth_resume(&mut self) -> Result<GrowthSnapshot, GenerateError> {
        let live = self.live()?;
        live.state.resume();
        Ok(live.state.snapshot())
    }

    pub fn growth_snapshot(&self) -> Option<GrowthSnapshot> {
        self.growth.as_ref().map(|g| g.state.snapshot())
    }

    pub fn generate_bsp(&mut self, req: &BspRequest, cfg: &EngineConfig) -> Result<&TileScene, GenerateError> {
        let scene = generate::bsp(req, self.catalog.as_ref(), cfg)?;
        Ok(self.adopt(scene))
    }

    pub fn generate_room(&mut self, req: &RoomGenRequest, cfg: &EngineConfig) -> Result<&TileScene, GenerateError> {
        let scene = generate::room(req, self.catalog.as_ref(), cfg)?;
        Ok(self.adopt(scene))
    }

    pub fn patch_lighting(&mut self, patch: &LightingPatch) -> &TileScene {
        let l = self.scene.lighting_mut();
        if let Some(v) = patch.sun_on {
            l.sun_on = v;
        }
        if let Some(v) = patch.ceiling_on {
            l.ceiling_on = v;
        }
        if let Some(v) = patch.spot_on {
            l.spot_on = v;
        }
        if let Some(k) = patch.temperature_k {
            l.set_temperature_k(k);
        }
        &self.scene
    }

    pub fn place(&mut self, spec: &ObjectSpec, input: &PlaceInput) -> Result<u64, SceneError> {
        self.scene.place(spec, input)
    }

    /// Snaps a ghost preview without committing it.
    pub fn preview(&mut self, spec: &ObjectSpec, input: &PlaceInput) -> Result<PlacedObject, SceneError> {
        self.scene.set_ghost(spec, input).cloned()
    }

    pub fn remove(&mut self, id: u64) -> Result<Vec<u64>, SceneError> {
        self.scene.remove(id)
    }

    pub fn replace_scene(&mut self, scene: TileScene) {
        self.growth = None;
        self.adopt(scene);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::SeedSpec;

    #[test]
    fn stepping_matches_one_shot() {
        let cfg = EngineConfig::default();
        let req = GrowthRequest {
            footprint: "fp03-l-wing".into(),
            seeds: SeedSpec::Auto(3),
            seed: 0,
            key: None,
            grid_height_m: None,
        };
        let mut a = Session::new("a", &cfg);
        a.generate_growth(&req, &cfg).unwrap();

        let mut b = Session::new("b", &cfg);
        b.start_growth(&req).unwrap();
        b.growth_step(2, &cfg).unwrap();
        b.growth_pause().unwrap();
        assert!(b.growth_step(1, &cfg).is_err());
        b.growth_resume().unwrap();
        while b.growth().is_some() {
            b.growth_step(5, &cfg).unwrap();
        }
        assert_eq!(a.scene().export_layout(), b.scene().export_layout());
        assert_eq!(b.log().len(), 1);
    }

    #[test]
    fn lighting_patch_clamps() {
        let cfg = EngineConfig::default();
        let mut s = Session::new("x", &cfg);
        let scene = s.patch_lighting(&LightingPatch { spot_on: Some(true), temperature_k: Some(20000.0), ..Default::default() });
        assert!(scene.lighting().spot_on);
        assert_eq!(scene.lighting().temperature_k(), 12000.0);
    }
}
