//! Universe cache and origin selection.

use crate::config::ExperimentConfig;
use crate::error::CliError;
use curvecx::classify::{is_eventually_nonseparating, Subsurface};
use curvecx::construct::pants_curve;
use curvecx::normal::{enumerate_curves, Coords, CurveUniverse};
use curvecx::surface::{make_surface, standard_triangulation, IdealTriangulation};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::sync::Arc;

pub const CACHE_ENV: &str = "CURVECX_CACHE_DIR";
const CACHE_SCHEMA: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    schema: u32,
    tool_version: String,
    surface: (i64, i64),
    max_weight: u32,
    triangulation: String,
    fingerprint: String,
    curves: Vec<Coords>,
}

pub struct Loaded {
    pub tri: Arc<IdealTriangulation>,
    pub universe: CurveUniverse,
    pub cache: CacheStatus,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CacheStatus {
    Written,
    HitVerified,
}

pub fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".curvecx-cache"))
}

pub fn triangulation(cfg: &ExperimentConfig) -> Result<Arc<IdealTriangulation>, CliError> {
    let (g, n) = cfg.surface;
    Ok(Arc::new(standard_triangulation(make_surface(g, n)?)?))
}

/// Loads the cached universe after re-checking its fingerprint, or enumerates and writes it.
pub fn load(cfg: &ExperimentConfig) -> Result<Loaded, CliError> {
    let tri = triangulation(cfg)?;
    let (g, n) = cfg.surface;
    let dir = cache_dir();
    let path = dir.join(format!("universe-g{g}-n{n}-w{}.json", cfg.max_weight));
    if path.exists() {
        let text = std::fs::read_to_string(&path)?;
        let file: CacheFile =
            serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: unreadable cache: {e}", path.display())))?;
        if file.schema != CACHE_SCHEMA || file.triangulation != tri.fingerprint() {
            return Err(CliError::Io(format!("{}: cache written for a different schema or triangulation", path.display())));
        }
        let universe = CurveUniverse::from_curves(tri.clone(), cfg.max_weight, file.curves);
        if universe.fingerprint() != file.fingerprint {
            return Err(CliError::Io(format!("{}: fingerprint mismatch", path.display())));
        }
        return Ok(Loaded { tri, universe, cache: CacheStatus::HitVerified, path });
    }
    let universe = enumerate_curves(&tri, cfg.max_weight, cfg.ceiling)?;
    let file = CacheFile {
        schema: CACHE_SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        surface: cfg.surface,
        max_weight: cfg.max_weight,
        triangulation: tri.fingerprint(),
        fingerprint: universe.fingerprint(),
        curves: universe.curves.clone(),
    };
    std::fs::create_dir_all(&dir)?;
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, serde_json::to_vec(&file).expect("cache serialises"))?;
    std::fs::rename(&tmp, &path)?;
    Ok(Loaded { tri, universe, cache: CacheStatus::Written, path })
}

pub fn parse_coords(s: &str) -> Result<Coords, CliError> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| CliError::Config(format!("coordinates {s:?}: expected integers"))))
        .collect()
}

pub fn parse_multicurve(s: &str) -> Result<Vec<Coords>, CliError> {
    s.split(';').filter(|x| !x.trim().is_empty()).map(parse_coords).collect()
}

/// The origin curve named by `name`; it must be a curve of the universe.
pub fn origin(t: &IdealTriangulation, u: &CurveUniverse, name: &str) -> Result<usize, CliError> {
    let c: Coords = match name {
        "first-pants" => pants_curve(t, 0, 1).ok_or(curvecx::CoreError::OriginMissing)?,
        "first-nonseparating" => u
            .curves
            .iter()
            .find(|c| is_eventually_nonseparating(t, &[c.to_vec()], &Subsurface::whole()).unwrap_or(false))
            .cloned()
            .ok_or(curvecx::CoreError::OriginMissing)?,
        s if s.starts_with("pants:") => {
            let ij = parse_coords(&s[6..])?;
            let n = t.n_vertices();
            if ij.len() != 2 || ij.iter().any(|&x| x == 0 || x as usize > n) || ij[0] == ij[1] {
                return Err(CliError::Config(format!("origin {s:?}: expected two distinct punctures in 1..={n}")));
            }
            pants_curve(t, ij[0] as usize - 1, ij[1] as usize - 1).ok_or(curvecx::CoreError::OriginMissing)?
        }
        s => parse_coords(s)?,
    };
    u.index_of(&c).ok_or_else(|| CliError::Core(curvecx::CoreError::OriginMissing))
}
