use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use musegen::catalog::{Catalog, GroupKeyKind};
use musegen::config::EngineConfig;
use musegen::footprint::{bundled, load_footprint, Footprint};
use musegen::generate::{self, BspRequest, GenerateError, GrowthRequest, RoomGenRequest, SeedSpec};
use musegen::roomgen::Openings;
use musegen::scene::TileScene;
use musegen::service::{self, AppState};

#[derive(Parser)]
#[command(name = "musegen", version, about = "Procedural museum layouts from artifact archives")]
struct Cli {
    /// Engine configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Catalog ingestion.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Room sizing report for one grouping key.
    Plan {
        #[command(flatten)]
        catalog: CatalogArgs,
        #[arg(long, value_parser = parse_key, default_value = "style")]
        key: GroupKeyKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a layout.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Re-export an existing layout document.
    #[command(subcommand)]
    Export(ExportCmd),
    /// Bundled footprints.
    #[command(subcommand)]
    Footprints(FootprintCmd),
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Directory of static UI files.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Parse metadata and a manifest into catalog JSON.
    Parse {
        #[command(flatten)]
        catalog: CatalogArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct CatalogArgs {
    /// Metadata document (.csv or .json).
    #[arg(long, requires = "manifest")]
    metadata: Option<PathBuf>,
    /// Asset manifest, one file name per line.
    #[arg(long, requires = "metadata")]
    manifest: Option<PathBuf>,
    /// Catalog JSON written by `catalog parse`.
    #[arg(long, conflicts_with_all = ["metadata", "manifest"])]
    catalog: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Constrained growth inside a footprint.
    Growth {
        /// Bundled footprint id or a 128x128 PNG.
        #[arg(long)]
        footprint: String,
        /// auto:N, random:N, pixels:x,y;x,y or data.
        #[arg(long, default_value = "auto:4")]
        seeds: SeedSpec,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_key)]
        key: Option<GroupKeyKind>,
        #[arg(long)]
        grid_height: Option<f64>,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Binary space partitioning with corridors.
    Bsp {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        rooms: Option<u32>,
        #[arg(long, value_parser = parse_key)]
        key: Option<GroupKeyKind>,
        #[arg(long)]
        width: Option<i32>,
        #[arg(long)]
        depth: Option<i32>,
        #[arg(long)]
        room_min: Option<i32>,
        #[arg(long)]
        room_max: Option<i32>,
        #[arg(long)]
        corridor_min: Option<i32>,
        #[arg(long)]
        corridor_max: Option<i32>,
        #[arg(long)]
        max_restarts: Option<u32>,
        #[arg(long)]
        levels: Option<u32>,
        #[arg(long)]
        grid_height: Option<f64>,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A single room, explicit or one per catalog group.
    Room {
        #[arg(long, requires = "depth")]
        width: Option<f64>,
        #[arg(long, requires = "width")]
        depth: Option<f64>,
        #[arg(long, default_value_t = 0)]
        windows: u32,
        #[arg(long, default_value_t = 1)]
        doors: u32,
        #[arg(long, value_parser = parse_key)]
        key: Option<GroupKeyKind>,
        /// Only this group; without it every group gets a room.
        #[arg(long, requires = "key")]
        group: Option<String>,
        #[arg(long)]
        grid_height: Option<f64>,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExportCmd {
    /// Canonical layout JSON.
    Json {
        layout: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wavefront OBJ.
    Obj {
        layout: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FootprintCmd {
    List,
    /// Write the bundled PNGs into a directory.
    Export {
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_key(s: &str) -> Result<GroupKeyKind, String> {
    GroupKeyKind::parse(s).ok_or_else(|| format!("expected artist, style, location or time, got {s:?}"))
}

enum Failure {
    Usage(String),
    Generation(String),
}

impl From<GenerateError> for Failure {
    fn from(e: GenerateError) -> Self {
        Failure::Generation(format!("{}: {e}", e.code()))
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, data: impl AsRef<[u8]>) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Generation(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, data).map_err(|e| Failure::Generation(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_catalog(args: &CatalogArgs) -> Result<Option<Catalog>, Failure> {
    if let Some(path) = &args.catalog {
        let c = Catalog::from_json(&read_text(path)?).map_err(|e| GenerateError::from(e))?;
        return Ok(Some(c));
    }
    let (Some(meta), Some(manifest)) = (&args.metadata, &args.manifest) else {
        return Ok(None);
    };
    let build = generate::ingest_catalog(&meta.to_string_lossy(), &read_text(meta)?, &read_text(manifest)?)?;
    for name in &build.unmatched_fragments {
        eprintln!("warning: metadata row {name:?} matches no asset");
    }
    Ok(Some(build.catalog))
}

fn require_catalog(args: &CatalogArgs) -> Result<Catalog, Failure> {
    load_catalog(args)?.ok_or_else(|| Failure::Usage("pass --metadata and --manifest, or --catalog".into()))
}

fn load_footprint_arg(arg: &str) -> Result<Footprint, Failure> {
    if let Some(fp) = bundled::load(arg) {
        return Ok(fp);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(Failure::Usage(format!("{arg:?} is neither a bundled footprint nor a file")));
    }
    let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {arg}: {e}")))?;
    let id = path.file_stem().map_or_else(|| arg.to_string(), |s| s.to_string_lossy().into_owned());
    load_footprint(id, &bytes).map_err(|e| GenerateError::from(e).into())
}

/// Writes `layout.json` and `scene.obj` into `out`, or the layout to stdout.
fn write_scene(scene: &TileScene, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            write_file(&dir.join("layout.json"), scene.export_layout())?;
            write_file(&dir.join("scene.obj"), scene.export_obj())
        }
        None => emit(None, &scene.export_layout()),
    }
}

fn slug(s: &str) -> String {
    let mapped: String = s.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' }).collect();
    mapped.trim_matches('-').to_string()
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(p) => EngineConfig::from_toml(&read_text(p)?).map_err(|e| Failure::Usage(e.to_string()))?,
        None => EngineConfig::default(),
    };
    match cli.command {
        Command::Catalog(CatalogCmd::Parse { catalog, out }) => {
            let c = require_catalog(&catalog)?;
            emit(out.as_deref(), &c.to_json())
        }
        Command::Plan { catalog, key, out } => {
            let c = require_catalog(&catalog)?;
            emit(out.as_deref(), &generate::plan_report(&c, key, &cfg)?)
        }
        Command::Gen(GenCmd::Growth { footprint, seeds, seed, key, grid_height, catalog, out }) => {
            let fp = load_footprint_arg(&footprint)?;
            let c = load_catalog(&catalog)?;
            let req = GrowthRequest { footprint: fp.id().to_string(), seeds, seed, key, grid_height_m: grid_height };
            let scene = generate::growth(&req, fp, c.as_ref(), &cfg)?;
            write_scene(&scene, out.as_deref())
        }
        Command::Gen(GenCmd::Bsp {
            seed,
            rooms,
            key,
            width,
            depth,
            room_min,
            room_max,
            corridor_min,
            corridor_max,
            max_restarts,
            levels,
            grid_height,
            catalog,
            out,
        }) => {
            let c = load_catalog(&catalog)?;
            let req = BspRequest {
                seed,
                rooms,
                key,
                footprint_w: width,
                footprint_d: depth,
                room_min,
                room_max,
                corridor_min,
                corridor_max,
                max_restarts,
                grid_levels: levels,
                grid_height_m: grid_height,
            };
            let scene = generate::bsp(&req, c.as_ref(), &cfg)?;
            write_scene(&scene, out.as_deref())
        }
        Command::Gen(GenCmd::Room { width, depth, windows, doors, key, group, grid_height, catalog, out }) => {
            let c = load_catalog(&catalog)?;
            if let (Some(key), None) = (key, &group) {
                let c = c.ok_or_else(|| Failure::Usage("--key without --group needs a catalog".into()))?;
                let mut cfg = cfg.clone();
                if let Some(h) = grid_height {
                    cfg.scene.grid_height_m = h;
                }
                let rooms = generate::rooms_for_groups(&c, key, Openings { n_windows: windows, n_doors: doors }, &cfg)?;
                let dir = out.ok_or_else(|| Failure::Usage("one room per group needs --out".into()))?;
                for (name, scene) in rooms {
                    write_scene(&scene, Some(&dir.join(slug(&name))))?;
                }
                return Ok(());
            }
            let req = RoomGenRequest {
                width_m: width,
                depth_m: depth,
                n_windows: windows,
                n_doors: doors,
                key,
                group,
                grid_height_m: grid_height,
            };
            let scene = generate::room(&req, c.as_ref(), &cfg)?;
            write_scene(&scene, out.as_deref())
        }
        Command::Export(cmd) => {
            let (layout, out, obj) = match cmd {
                ExportCmd::Json { layout, out } => (layout, out, false),
                ExportCmd::Obj { layout, out } => (layout, out, true),
            };
            let scene = TileScene::import_layout(&read_text(&layout)?)
                .map_err(|e| Failure::Generation(format!("{}: {e}", layout.display())))?;
            let text = if obj { scene.export_obj() } else { scene.export_layout() };
            emit(out.as_deref(), &text)
        }
        Command::Footprints(FootprintCmd::List) => {
            for fp in bundled::all() {
                println!("{}\t{}\t{}", fp.id(), fp.interior_count(), fp.max_seeds());
            }
            Ok(())
        }
        Command::Footprints(FootprintCmd::Export { out }) => {
            for id in bundled::ids() {
                write_file(&out.join(format!("{id}.png")), bundled::png(id).expect("listed id"))?;
            }
            Ok(())
        }
        Command::Serve { port, data_dir, ui_dir } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Generation(e.to_string()))?;
            let addr = SocketAddr::from(([127, 0, 0, 1], port));
            let state = Arc::new(AppState::new(cfg, data_dir));
            eprintln!("listening on http://{addr}");
            rt.block_on(service::serve(addr, state, ui_dir)).map_err(|e| Failure::Generation(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Generation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
