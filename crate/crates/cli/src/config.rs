use crate::error::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use curvecx::complex::EdgeRule;
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "curvecx", version, about = "Curve-complex experiments on punctured surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Enumerate the curve universe and write it to the cache.
    Enumerate,
    /// Export the curve graph as DOT or JSON adjacency.
    Graph,
    /// One sphere around the origin.
    Sphere,
    /// Per-radius sphere census and unions of consecutive spheres.
    Census,
    /// Exhaustive checks relating goodness and the essentially non-separating graph.
    Classify,
    /// Project a curve to a subsurface.
    Project,
    /// Subsurface distances along geodesics, and the disjoint-pair bound.
    Bgit,
    /// Push sampled loops of one sphere outward.
    Push,
    /// Fill a loop of the curve graph by a disk.
    Fill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Dot,
}

/// Every option, usable as a flag or as a `key = value` line of the config file.
#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    /// Flat `key = value` file with the same keys as the long flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Surface signature `g,n`.
    #[arg(long, global = true)]
    pub surface: Option<String>,
    #[arg(long, global = true)]
    pub max_weight: Option<u32>,
    #[arg(long, global = true)]
    pub edge_rule: Option<String>,
    /// `first-pants`, `first-nonseparating`, `pants:i,j` (1-based punctures) or coordinates.
    #[arg(long, global = true)]
    pub origin: Option<String>,
    #[arg(long, global = true)]
    pub radius: Option<u32>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub path_budget: Option<u64>,
    #[arg(long, global = true)]
    pub area_budget: Option<usize>,
    /// Annulus width allowed to the first filling of a pushed loop.
    #[arg(long, global = true)]
    pub width: Option<u32>,
    /// Curve-count ceiling for enumeration.
    #[arg(long, global = true)]
    pub ceiling: Option<usize>,
    /// Report file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// `good-vertices`, `c0-edges`, `c0-cases` or `all`.
    #[arg(long, global = true)]
    pub check: Option<String>,
    /// `complement`, `component` or `both`.
    #[arg(long, global = true)]
    pub reading: Option<String>,
    /// Curve coordinates `w1,w2,...`.
    #[arg(long, global = true)]
    pub curve: Option<String>,
    /// Multicurve `w1,w2,...;w1,w2,...` cutting out the subsurface.
    #[arg(long, global = true)]
    pub subsurface_from: Option<String>,
    /// Side `curve:side` of the cutting multicurve facing the subsurface.
    #[arg(long, global = true)]
    pub side: Option<String>,
    /// Loop of curves `w1,...;w1,...;...`.
    #[arg(long = "loop", global = true)]
    pub loop_: Option<String>,
}

macro_rules! merge_fields {
    ($dst:expr, $src:expr, $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Opts {
    /// Fills unset options from the config file; flags win on conflict.
    pub fn merge_file(&mut self, text: &str) -> Result<(), CliError> {
        let mut argv = vec!["curvecx".to_string(), "enumerate".to_string()];
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", n + 1)))?;
            let k = k.trim();
            if k == "config" {
                return Err(CliError::Config("config files cannot include other config files".into()));
            }
            argv.push(format!("--{k}"));
            argv.push(v.trim().to_string());
        }
        let file = Cli::try_parse_from(argv).map_err(|e| CliError::Config(format!("config file: {}", e.kind())))?.opts;
        merge_fields!(
            self, file, surface, max_weight, edge_rule, origin, radius, samples, seed, jobs, path_budget, area_budget,
            width, ceiling, out, format, check, reading, curve, subsurface_from, side, loop_
        );
        Ok(())
    }
}

/// Resolved configuration, echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub surface: (i64, i64),
    pub max_weight: u32,
    pub edge_rule: EdgeRule,
    pub origin: String,
    pub radius: u32,
    pub samples: usize,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub path_budget: u64,
    pub area_budget: usize,
    pub width: u32,
    pub ceiling: usize,
    pub format: Format,
    pub check: String,
    pub reading: String,
    pub curve: Option<String>,
    pub subsurface_from: Option<String>,
    pub side: Option<String>,
    #[serde(rename = "loop")]
    pub loop_: Option<String>,
    pub out: Option<PathBuf>,
}

fn positive<T: PartialOrd + Default + std::fmt::Display>(name: &str, v: T) -> Result<T, CliError> {
    if v > T::default() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

pub fn parse_surface(s: &str) -> Result<(i64, i64), CliError> {
    let (g, n) = s.split_once(',').ok_or_else(|| CliError::Config(format!("surface {s:?}: expected g,n")))?;
    let p = |x: &str| x.trim().parse::<i64>().map_err(|_| CliError::Config(format!("surface {s:?}: expected integers")));
    Ok((p(g)?, p(n)?))
}

impl ExperimentConfig {
    pub fn resolve(o: &Opts) -> Result<Self, CliError> {
        let surface = parse_surface(o.surface.as_deref().unwrap_or("0,6"))?;
        let edge_rule: EdgeRule = o.edge_rule.as_deref().unwrap_or("disjoint").parse().map_err(CliError::from)?;
        let reading = o.reading.clone().unwrap_or_else(|| "both".into());
        if !["complement", "component", "both"].contains(&reading.as_str()) {
            return Err(CliError::Config(format!("unknown reading {reading:?}")));
        }
        if let Some(j) = o.jobs {
            positive("jobs", j)?;
        }
        Ok(ExperimentConfig {
            surface,
            max_weight: positive("max-weight", o.max_weight.unwrap_or(2))?,
            edge_rule,
            origin: o.origin.clone().unwrap_or_else(|| "first-pants".into()),
            radius: o.radius.unwrap_or(3),
            samples: positive("samples", o.samples.unwrap_or(10))?,
            seed: o.seed.unwrap_or(0),
            jobs: o.jobs,
            path_budget: positive("path-budget", o.path_budget.unwrap_or(10_000))?,
            area_budget: positive("area-budget", o.area_budget.unwrap_or(8))?,
            width: positive("width", o.width.unwrap_or(2))?,
            ceiling: positive("ceiling", o.ceiling.unwrap_or(curvecx::normal::DEFAULT_CURVE_CEILING))?,
            format: o.format.unwrap_or(Format::Json),
            check: o.check.clone().unwrap_or_else(|| "all".into()),
            reading,
            curve: o.curve.clone(),
            subsurface_from: o.subsurface_from.clone(),
            side: o.side.clone(),
            loop_: o.loop_.clone(),
            out: o.out.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_the_file() {
        let mut o = Opts { max_weight: Some(3), ..Default::default() };
        o.merge_file("# comment\nmax-weight = 2\nsurface = 1,3\nseed=7\n").unwrap();
        let c = ExperimentConfig::resolve(&o).unwrap();
        assert_eq!((c.max_weight, c.surface, c.seed), (3, (1, 3), 7));
    }

    #[test]
    fn bad_files_and_values_are_config_errors() {
        let mut o = Opts::default();
        assert!(matches!(o.merge_file("no-such-key = 1"), Err(CliError::Config(_))));
        assert!(matches!(o.merge_file("surface"), Err(CliError::Config(_))));
        let o = Opts { samples: Some(0), ..Default::default() };
        assert!(ExperimentConfig::resolve(&o).is_err());
        assert!(parse_surface("1;2").is_err());
    }
}
