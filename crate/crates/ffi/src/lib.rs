//! C ABI over the musegen engine.
//!
//! Requests are JSON documents with the same fields as the HTTP bodies.
//! Strings returned through out-pointers are owned by the caller and must
//! be released with [`musegen_string_free`]; handles with their `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use musegen::catalog::{Catalog, GroupKeyKind};
use musegen::config::EngineConfig;
use musegen::generate::{self, BspRequest, GenerateError, GrowthRequest, RoomGenRequest};
use musegen::scene::{kelvin_to_color, TileScene};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MusegenStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidRequest = 3,
    CatalogError = 4,
    GenerationFailed = 5,
    LayoutError = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// An immutable artifact catalog.
pub struct MusegenCatalog(Catalog);

/// A generated or imported tile scene.
pub struct MusegenScene(TileScene);

struct Failure {
    status: MusegenStatus,
    code: &'static str,
    message: String,
}

impl Failure {
    fn new(status: MusegenStatus, code: &'static str, message: impl Into<String>) -> Self {
        Failure { status, code, message: message.into() }
    }
}

impl From<GenerateError> for Failure {
    fn from(e: GenerateError) -> Self {
        let status = match e {
            GenerateError::Catalog(_) => MusegenStatus::CatalogError,
            _ => MusegenStatus::GenerationFailed,
        };
        Failure::new(status, e.code(), e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<(CString, CString)>> = const { RefCell::new(None) };
}

fn c_string(s: impl Into<Vec<u8>>) -> CString {
    CString::new(s).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("nul bytes removed")
    })
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MusegenStatus {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        Err(Failure::new(MusegenStatus::Panic, "Panic", "internal panic"))
    });
    match result {
        Ok(()) => {
            LAST_ERROR.with(|l| *l.borrow_mut() = None);
            MusegenStatus::Ok
        }
        Err(f) => {
            LAST_ERROR.with(|l| *l.borrow_mut() = Some((c_string(f.code), c_string(f.message))));
            f.status
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(MusegenStatus::NullArgument, "NullArgument", format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(MusegenStatus::InvalidUtf8, "InvalidUtf8", format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(MusegenStatus::NullArgument, "NullArgument", format!("{what} is null")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(MusegenStatus::NullArgument, "NullArgument", format!("{what} is null")))
}

fn request<T: serde::de::DeserializeOwned>(json: &str) -> Result<T, Failure> {
    let json = if json.trim().is_empty() { "{}" } else { json };
    let de = &mut serde_json::Deserializer::from_str(json);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Failure::new(MusegenStatus::InvalidRequest, "InvalidBody", format!("{}: {}", e.path(), e.inner())))
}

fn give_string(slot: &mut *mut c_char, s: String) {
    *slot = c_string(s).into_raw();
}

fn give_scene(slot: &mut *mut MusegenScene, scene: TileScene) {
    *slot = Box::into_raw(Box::new(MusegenScene(scene)));
}

/// Static version string of the engine.
#[no_mangle]
pub extern "C" fn musegen_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Stable error code of the last failed call on this thread, such as
/// `"InfeasibleParams"`, or null after a success. Valid until the next call.
#[no_mangle]
pub extern "C" fn musegen_last_error_code() -> *const c_char {
    LAST_ERROR.with(|l| l.borrow().as_ref().map_or(ptr::null(), |(c, _)| c.as_ptr()))
}

/// Human-readable message for the last failed call on this thread.
#[no_mangle]
pub extern "C" fn musegen_last_error_message() -> *const c_char {
    LAST_ERROR.with(|l| l.borrow().as_ref().map_or(ptr::null(), |(_, m)| m.as_ptr()))
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn musegen_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a catalog from a metadata document and an asset manifest.
/// `metadata_name` selects the format by extension (`.csv`, `.json`).
///
/// # Safety
/// String arguments must be null or nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn musegen_catalog_parse(
    metadata_name: *const c_char,
    metadata: *const c_char,
    manifest: *const c_char,
    out_catalog: *mut *mut MusegenCatalog,
) -> MusegenStatus {
    guard(|| {
        let slot = out(out_catalog, "out_catalog")?;
        let build = generate::ingest_catalog(
            text(metadata_name, "metadata_name")?,
            text(metadata, "metadata")?,
            text(manifest, "manifest")?,
        )?;
        *slot = Box::into_raw(Box::new(MusegenCatalog(build.catalog)));
        Ok(())
    })
}

/// # Safety
/// `catalog` must be a live handle; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn musegen_catalog_to_json(catalog: *const MusegenCatalog, out_json: *mut *mut c_char) -> MusegenStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        give_string(slot, handle(catalog, "catalog")?.0.to_json());
        Ok(())
    })
}

/// Number of records, or 0 for a null handle.
///
/// # Safety
/// `catalog` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn musegen_catalog_len(catalog: *const MusegenCatalog) -> usize {
    catalog.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `catalog` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn musegen_catalog_free(catalog: *mut MusegenCatalog) {
    if !catalog.is_null() {
        drop(Box::from_raw(catalog));
    }
}

/// Room sizing report as JSON for `key` (`artist`, `style`, `location`, `time`).
///
/// # Safety
/// `catalog` must be a live handle; `key` nul-terminated; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn musegen_plan(
    catalog: *const MusegenCatalog,
    key: *const c_char,
    out_json: *mut *mut c_char,
) -> MusegenStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        let key_text = text(key, "key")?;
        let key = GroupKeyKind::parse(key_text).ok_or_else(|| {
            Failure::new(MusegenStatus::InvalidRequest, "InvalidRequest", format!("unknown grouping key {key_text:?}"))
        })?;
        give_string(slot, generate::plan_report(&handle(catalog, "catalog")?.0, key, &EngineConfig::default())?);
        Ok(())
    })
}

unsafe fn generate_with<R: serde::de::DeserializeOwned>(
    catalog: *const MusegenCatalog,
    request_json: *const c_char,
    out_scene: *mut *mut MusegenScene,
    run: impl FnOnce(&R, Option<&Catalog>, &EngineConfig) -> Result<TileScene, GenerateError>,
) -> MusegenStatus {
    guard(|| {
        let slot = out(out_scene, "out_scene")?;
        let req: R = request(text(request_json, "request_json")?)?;
        let catalog = catalog.as_ref().map(|c| &c.0);
        give_scene(slot, run(&req, catalog, &EngineConfig::default())?);
        Ok(())
    })
}

/// Region growth on a bundled footprint. `catalog` may be null unless the
/// request uses catalog-driven seeds.
///
/// # Safety
/// `catalog` must be a live handle or null; `request_json` nul-terminated;
/// `out_scene` writable.
#[no_mangle]
pub unsafe extern "C" fn musegen_generate_growth(
    catalog: *const MusegenCatalog,
    request_json: *const c_char,
    out_scene: *mut *mut MusegenScene,
) -> MusegenStatus {
    generate_with(catalog, request_json, out_scene, |req: &GrowthRequest, c, cfg| {
        generate::growth(req, generate::bundled_footprint(&req.footprint)?, c, cfg)
    })
}

/// Seeded binary space partitioning.
///
/// # Safety
/// As for [`musegen_generate_growth`].
#[no_mangle]
pub unsafe extern "C" fn musegen_generate_bsp(
    catalog: *const MusegenCatalog,
    request_json: *const c_char,
    out_scene: *mut *mut MusegenScene,
) -> MusegenStatus {
    generate_with(catalog, request_json, out_scene, |req: &BspRequest, c, cfg| generate::bsp(req, c, cfg))
}

/// A single rectangular room.
///
/// # Safety
/// As for [`musegen_generate_growth`].
#[no_mangle]
pub unsafe extern "C" fn musegen_generate_room(
    catalog: *const MusegenCatalog,
    request_json: *const c_char,
    out_scene: *mut *mut MusegenScene,
) -> MusegenStatus {
    generate_with(catalog, request_json, out_scene, |req: &RoomGenRequest, c, cfg| generate::room(req, c, cfg))
}

/// # Safety
/// `layout_json` nul-terminated; `out_scene` writable.
#[no_mangle]
pub unsafe extern "C" fn musegen_scene_import(layout_json: *const c_char, out_scene: *mut *mut MusegenScene) -> MusegenStatus {
    guard(|| {
        let slot = out(out_scene, "out_scene")?;
        let scene = TileScene::import_layout(text(layout_json, "layout_json")?)
            .map_err(|e| Failure::new(MusegenStatus::LayoutError, "InvalidLayout", e.to_string()))?;
        give_scene(slot, scene);
        Ok(())
    })
}

/// Canonical layout JSON.
///
/// # Safety
/// `scene` must be a live handle; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn musegen_scene_export_layout(scene: *const MusegenScene, out_json: *mut *mut c_char) -> MusegenStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        give_string(slot, handle(scene, "scene")?.0.export_layout());
        Ok(())
    })
}

/// Wavefront OBJ text.
///
/// # Safety
/// `scene` must be a live handle; `out_obj` writable.
#[no_mangle]
pub unsafe extern "C" fn musegen_scene_export_obj(scene: *const MusegenScene, out_obj: *mut *mut c_char) -> MusegenStatus {
    guard(|| {
        let slot = out(out_obj, "out_obj")?;
        give_string(slot, handle(scene, "scene")?.0.export_obj());
        Ok(())
    })
}

/// Number of placed objects, or 0 for a null handle.
///
/// # Safety
/// `scene` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn musegen_scene_object_count(scene: *const MusegenScene) -> usize {
    scene.as_ref().map_or(0, |s| s.0.objects().len())
}

/// # Safety
/// `scene` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn musegen_scene_free(scene: *mut MusegenScene) {
    if !scene.is_null() {
        drop(Box::from_raw(scene));
    }
}

/// Light colour for a colour temperature in kelvin; writes r, g, b.
///
/// # Safety
/// `out_rgb` must point to three writable bytes.
#[no_mangle]
pub unsafe extern "C" fn musegen_kelvin_to_rgb(temperature_k: f64, out_rgb: *mut u8) -> MusegenStatus {
    guard(|| {
        if out_rgb.is_null() {
            return Err(Failure::new(MusegenStatus::NullArgument, "NullArgument", "out_rgb is null"));
        }
        let c = kelvin_to_color(temperature_k)
            .map_err(|e| Failure::new(MusegenStatus::OutOfRange, "OutOfRange", e.to_string()))?;
        ptr::copy_nonoverlapping([c.r, c.g, c.b].as_ptr(), out_rgb, 3);
        Ok(())
    })
}
