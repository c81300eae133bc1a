//! HTTP service over [`Session`]s.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard, TryLockError};

use axum::body::Bytes;
use axum::extract::{Multipart, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, patch, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use crate::config::EngineConfig;
use crate::footprint::bundled;
use crate::generate::{self, BspRequest, GenerateError, GrowthRequest, RoomGenRequest};
use crate::growth::GrowthError;
use crate::scene::{ObjectSpec, PlaceInput, ScaleMode, SceneError};
use crate::session::{LightingPatch, Session};

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, code: code.to_string(), message: message.into() }
    }

    fn unknown_session(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "UnknownSession", format!("no session {id:?}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "code": self.code, "message": self.message }))).into_response()
    }
}

impl From<GenerateError> for ApiError {
    fn from(e: GenerateError) -> Self {
        let status = match &e {
            GenerateError::UnknownFootprint(_) | GenerateError::UnknownGroup(_) | GenerateError::NoLiveGrowth => {
                StatusCode::NOT_FOUND
            }
            GenerateError::Growth(GrowthError::Paused | GrowthError::NotTerminal | GrowthError::AlreadyGrowing) => {
                StatusCode::CONFLICT
            }
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<SceneError> for ApiError {
    fn from(e: SceneError) -> Self {
        let (status, code) = match &e {
            SceneError::CellOccupied { .. } => (StatusCode::CONFLICT, "CellOccupied"),
            SceneError::UnknownId(_) => (StatusCode::NOT_FOUND, "UnknownId"),
            SceneError::NoAdjacentFloor => (StatusCode::UNPROCESSABLE_ENTITY, "NoAdjacentFloor"),
            SceneError::LevelOutOfRange { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "LevelOutOfRange"),
            SceneError::InvalidObject(_) => (StatusCode::UNPROCESSABLE_ENTITY, "InvalidObject"),
            SceneError::InvalidSettings(_) => (StatusCode::UNPROCESSABLE_ENTITY, "InvalidSettings"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

type ApiResult = Result<Response, ApiError>;

type SharedSession = Arc<RwLock<Session>>;

pub struct AppState {
    cfg: EngineConfig,
    data_dir: Option<PathBuf>,
    sessions: RwLock<HashMap<String, SharedSession>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(cfg: EngineConfig, data_dir: Option<PathBuf>) -> Self {
        AppState { cfg, data_dir, sessions: RwLock::new(HashMap::new()), next_id: AtomicU64::new(1) }
    }

    fn session(&self, id: &str) -> Result<SharedSession, ApiError> {
        let map = self.sessions.read().unwrap_or_else(|e| e.into_inner());
        map.get(id).cloned().ok_or_else(|| ApiError::unknown_session(id))
    }
}

fn read(s: &SharedSession) -> RwLockReadGuard<'_, Session> {
    s.read().unwrap_or_else(|e| e.into_inner())
}

/// One writer per session; a second concurrent writer is turned away.
fn write(s: &SharedSession) -> Result<RwLockWriteGuard<'_, Session>, ApiError> {
    match s.try_write() {
        Ok(g) => Ok(g),
        Err(TryLockError::Poisoned(e)) => Ok(e.into_inner()),
        Err(TryLockError::WouldBlock) => Err(ApiError::new(
            StatusCode::CONFLICT,
            "SessionBusy",
            "another change to this session is in progress",
        )),
    }
}

fn parse_body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    let text: &[u8] = if bytes.iter().all(u8::is_ascii_whitespace) { b"{}" } else { bytes };
    let de = &mut serde_json::Deserializer::from_slice(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "InvalidBody", format!("{path}: {}", e.inner()))
    })
}

fn json_text(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

pub fn router(state: Arc<AppState>, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_summary))
        .route("/sessions/{id}/catalog", post(upload_catalog))
        .route("/sessions/{id}/generate/growth", post(generate_growth).get(growth_state))
        .route("/sessions/{id}/generate/growth/step", post(growth_step))
        .route("/sessions/{id}/generate/growth/pause", post(growth_pause))
        .route("/sessions/{id}/generate/growth/resume", post(growth_resume))
        .route("/sessions/{id}/generate/bsp", post(generate_bsp))
        .route("/sessions/{id}/generate/room", post(generate_room))
        .route("/sessions/{id}/scene", get(get_scene))
        .route("/sessions/{id}/scene/lighting", patch(patch_lighting))
        .route("/sessions/{id}/scene/scale", patch(patch_scale))
        .route("/sessions/{id}/scene/preview", post(preview_object))
        .route("/sessions/{id}/scene/objects", post(place_object))
        .route("/sessions/{id}/scene/objects/{oid}", delete(remove_object))
        .route("/sessions/{id}/materials", get(get_materials))
        .route("/sessions/{id}/materials/{mid}", patch(patch_material))
        .route("/sessions/{id}/export/obj", get(export_obj))
        .route("/sessions/{id}/snapshot", post(snapshot))
        .route("/footprints", get(list_footprints))
        .route("/footprints/{id}", get(footprint_png))
        .with_state(state);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(addr: std::net::SocketAddr, state: Arc<AppState>, ui_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state, ui_dir)).await
}

async fn create_session(State(app): State<Arc<AppState>>) -> ApiResult {
    let id = format!("s{}", app.next_id.fetch_add(1, Ordering::Relaxed));
    let session = Session::new(id.clone(), &app.cfg);
    app.sessions
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .insert(id.clone(), Arc::new(RwLock::new(session)));
    Ok((StatusCode::CREATED, Json(json!({ "id": id })) ).into_response())
}

async fn session_summary(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let s = app.session(&id)?;
    let s = read(&s);
    Ok(Json(json!({
        "id": s.id(),
        "catalog_records": s.catalog().map(|c| c.len()),
        "growing": s.growth().is_some(),
        "log": s.log(),
    }))
    .into_response())
}

async fn upload_catalog(State(app): State<Arc<AppState>>, Path(id): Path<String>, mut form: Multipart) -> ApiResult {
    let s = app.session(&id)?;
    let bad = |m: String| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "InvalidBody", m);
    let (mut metadata, mut manifest) = (None, None);
    while let Some(field) = form.next_field().await.map_err(|e| bad(e.to_string()))? {
        let name = field.name().unwrap_or_default().to_string();
        let file_name = field.file_name().map(str::to_string);
        let text = field.text().await.map_err(|e| bad(e.to_string()))?;
        match name.as_str() {
            "metadata" => metadata = Some((file_name.unwrap_or_else(|| "metadata.csv".into()), text)),
            "manifest" => manifest = Some(text),
            other => return Err(bad(format!("unexpected field {other:?}"))),
        }
    }
    let (meta_name, meta) = metadata.ok_or_else(|| bad("missing field \"metadata\"".into()))?;
    let manifest = manifest.ok_or_else(|| bad("missing field \"manifest\"".into()))?;
    let build = generate::ingest_catalog(&meta_name, &meta, &manifest)?;
    let catalog: Value = serde_json::from_str(&build.catalog.to_json()).expect("catalog json");
    let unmatched = write(&s)?.set_catalog(build);
    Ok(Json(json!({ "catalog": catalog, "unmatched_fragments": unmatched })).into_response())
}

#[derive(Deserialize)]
struct LiveQuery {
    #[serde(default)]
    live: bool,
}

async fn generate_growth(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<LiveQuery>,
    body: Bytes,
) -> ApiResult {
    let s = app.session(&id)?;
    let req: GrowthRequest = parse_body(&body)?;
    let mut s = write(&s)?;
    if q.live {
        let snapshot = s.start_growth(&req)?;
        return Ok((StatusCode::CREATED, Json(snapshot)).into_response());
    }
    let doc = s.generate_growth(&req, &app.cfg)?.export_layout();
    Ok(json_text(StatusCode::CREATED, doc))
}

async fn growth_state(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let s = app.session(&id)?;
    let snapshot = read(&s).growth_snapshot().ok_or(GenerateError::NoLiveGrowth)?;
    Ok(Json(snapshot).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepBody {
    #[serde(default = "one_pass")]
    passes: usize,
}

fn one_pass() -> usize {
    1
}

async fn growth_step(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let s = app.session(&id)?;
    let step: StepBody = parse_body(&body)?;
    let mut s = write(&s)?;
    let snapshot = s.growth_step(step.passes, &app.cfg)?;
    Ok(Json(json!({ "done": snapshot.terminal, "snapshot": snapshot })).into_response())
}

async fn growth_pause(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let s = app.session(&id)?;
    let snapshot = write(&s)?.growth_pause()?;
    Ok(Json(snapshot).into_response())
}

async fn growth_resume(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let s = app.session(&id)?;
    let snapshot = write(&s)?.growth_resume()?;
    Ok(Json(snapshot).into_response())
}

async fn generate_bsp(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let s = app.session(&id)?;
    let req: BspRequest = parse_body(&body)?;
    let doc = write(&s)?.generate_bsp(&req, &app.cfg)?.export_layout();
    Ok(json_text(StatusCode::CREATED, doc))
}

async fn generate_room(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let s = app.session(&id)?;
    let req: RoomGenRequest = parse_body(&body)?;
    let doc = write(&s)?.generate_room(&req, &app.cfg)?.export_layout();
    Ok(json_text(StatusCode::CREATED, doc))
}

async fn get_scene(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let s = app.session(&id)?;
    let doc = read(&s).scene().export_layout();
    Ok(json_text(StatusCode::OK, doc))
}

async fn patch_lighting(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let s = app.session(&id)?;
    let patch: LightingPatch = parse_body(&body)?;
    let mut s = write(&s)?;
    let lighting = *s.patch_lighting(&patch).lighting();
    Ok(Json(json!({ "lighting": lighting, "color": lighting.color() })).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaleBody {
    scale_mode: ScaleMode,
}

async fn patch_scale(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let s = app.session(&id)?;
    let b: ScaleBody = parse_body(&body)?;
    let mode = write(&s)?.set_scale_mode(b.scale_mode).scale_mode();
    Ok(Json(json!({ "scale_mode": mode })).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaceBody {
    spec: ObjectSpec,
    at: PlaceInput,
}

async fn preview_object(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let s = app.session(&id)?;
    let b: PlaceBody = parse_body(&body)?;
    let ghost = write(&s)?.preview(&b.spec, &b.at)?;
    Ok(Json(ghost).into_response())
}

async fn place_object(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let s = app.session(&id)?;
    let b: PlaceBody = parse_body(&body)?;
    let mut s = write(&s)?;
    let oid = s.place(&b.spec, &b.at)?;
    let object = s.scene().object(oid).cloned();
    Ok((StatusCode::CREATED, Json(json!({ "id": oid, "object": object }))).into_response())
}

async fn remove_object(State(app): State<Arc<AppState>>, Path((id, oid)): Path<(String, u64)>) -> ApiResult {
    let s = app.session(&id)?;
    let removed = write(&s)?.remove(oid)?;
    Ok(Json(json!({ "removed": removed })).into_response())
}

async fn get_materials(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let s = app.session(&id)?;
    let manifest = read(&s).materials().clone();
    Ok(Json(manifest).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialBody {
    rgb: [u8; 3],
}

async fn patch_material(State(app): State<Arc<AppState>>, Path((id, mid)): Path<(String, String)>, body: Bytes) -> ApiResult {
    let s = app.session(&id)?;
    let b: MaterialBody = parse_body(&body)?;
    let mut s = write(&s)?;
    let material = s.set_material_rgb(&mid, b.rgb).get(&mid).cloned();
    Ok(Json(material).into_response())
}

async fn export_obj(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let s = app.session(&id)?;
    let obj = read(&s).scene().export_obj();
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], obj).into_response())
}

/// Writes the session's layout document into the data directory.
async fn snapshot(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let s = app.session(&id)?;
    let dir = app
        .data_dir
        .as_ref()
        .ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "NoDataDir", "server was started without --data-dir"))?;
    let doc = read(&s).scene().export_layout();
    let path = dir.join(format!("{id}.layout.json"));
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(&path, doc))
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "IoError", e.to_string()))?;
    Ok((StatusCode::CREATED, Json(json!({ "path": path }))).into_response())
}

async fn list_footprints() -> ApiResult {
    let list: Vec<Value> = bundled::all()
        .iter()
        .map(|f| json!({ "id": f.id(), "interior_pixels": f.interior_count(), "max_seeds": f.max_seeds() }))
        .collect();
    Ok(Json(list).into_response())
}

async fn footprint_png(Path(id): Path<String>) -> ApiResult {
    let png = bundled::png(&id).ok_or(GenerateError::UnknownFootprint(id))?;
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}
