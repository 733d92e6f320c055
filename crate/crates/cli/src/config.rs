//! Run configuration: defaults, `key = value` files and flag overrides.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::report::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Portrait,
    Rotset,
    Localrot,
    Classify,
    Winding,
    Porbit,
    Annular,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Portrait => "portrait",
            Command::Rotset => "rotset",
            Command::Localrot => "localrot",
            Command::Classify => "classify",
            Command::Winding => "winding",
            Command::Porbit => "porbit",
            Command::Annular => "annular",
        }
    }
}

/// Every knob of a run. Unset fields take the command's default when the
/// config is resolved; the resolved config is what reports echo.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub newton_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<[i64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polyline: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<usize>,
}

#[cfg(test)]
pub const KEYS: [&str; 26] = [
    "map", "seed", "out_dir", "prefix", "grid", "horizon", "samples", "resolution", "epsilon", "refine", "orbits", "steps",
    "size", "center", "radius", "region", "target", "newton_iters", "tol", "direction", "polyline", "point", "q", "p", "k",
    "base",
];

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Config(format!("bad value for `{key}`: `{v}`")))
}

fn parse_float(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = parse_num(key, v)?;
    if !x.is_finite() {
        return Err(CliError::Config(format!("`{key}` must be finite")));
    }
    Ok(x)
}

pub fn parse_pair(key: &str, v: &str) -> Result<[f64; 2], CliError> {
    let (a, b) = v.split_once(',').ok_or_else(|| CliError::Config(format!("`{key}` expects `x,y`, got `{v}`")))?;
    Ok([parse_float(key, a.trim())?, parse_float(key, b.trim())?])
}

pub fn parse_int_pair(key: &str, v: &str) -> Result<[i64; 2], CliError> {
    let (a, b) = v.split_once(',').ok_or_else(|| CliError::Config(format!("`{key}` expects `a,b`, got `{v}`")))?;
    Ok([parse_num(key, a.trim())?, parse_num(key, b.trim())?])
}

fn fmt_f(x: f64) -> String {
    format!("{x:?}")
}

impl RunConfig {
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        let v = v.trim();
        match key {
            "map" => self.map = Some(v.to_string()),
            "seed" => self.seed = Some(parse_num(key, v)?),
            "out_dir" => self.out_dir = Some(PathBuf::from(v)),
            "prefix" => self.prefix = Some(v.to_string()),
            "grid" => self.grid = Some(parse_num(key, v)?),
            "horizon" => self.horizon = Some(parse_num(key, v)?),
            "samples" => self.samples = Some(parse_num(key, v)?),
            "resolution" => self.resolution = Some(parse_num(key, v)?),
            "epsilon" => self.epsilon = Some(parse_float(key, v)?),
            "refine" => self.refine = Some(parse_num(key, v)?),
            "orbits" => self.orbits = Some(parse_num(key, v)?),
            "steps" => self.steps = Some(parse_num(key, v)?),
            "size" => self.size = Some(parse_num(key, v)?),
            "center" => self.center = Some(parse_pair(key, v)?),
            "radius" => self.radius = Some(parse_float(key, v)?),
            "region" => self.region = Some(PathBuf::from(v)),
            "target" => self.target = Some(v.to_string()),
            "newton_iters" => self.newton_iters = Some(parse_num(key, v)?),
            "tol" => self.tol = Some(parse_float(key, v)?),
            "direction" => self.direction = Some(parse_int_pair(key, v)?),
            "polyline" => self.polyline = Some(PathBuf::from(v)),
            "point" => self.point = Some(parse_pair(key, v)?),
            "q" => self.q = Some(parse_pair(key, v)?),
            "p" => self.p = Some(parse_pair(key, v)?),
            "k" => self.k = Some(parse_num(key, v)?),
            "base" => self.base = Some(parse_num(key, v)?),
            _ => return Err(CliError::Config(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Read `key = value` lines; `#` starts a comment and later keys win.
    pub fn from_kv_text(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        cfg.apply_kv_text(text)?;
        Ok(cfg)
    }

    pub fn apply_kv_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected `key = value`", n + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn to_kv_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                let _ = writeln!(s, "{k} = {v}");
            }
        };
        let pair = |p: Option<[f64; 2]>| p.map(|[a, b]| format!("{},{}", fmt_f(a), fmt_f(b)));
        put("map", self.map.clone());
        put("seed", self.seed.map(|x| x.to_string()));
        put("out_dir", self.out_dir.as_ref().map(|p| p.display().to_string()));
        put("prefix", self.prefix.clone());
        put("grid", self.grid.map(|x| x.to_string()));
        put("horizon", self.horizon.map(|x| x.to_string()));
        put("samples", self.samples.map(|x| x.to_string()));
        put("resolution", self.resolution.map(|x| x.to_string()));
        put("epsilon", self.epsilon.map(fmt_f));
        put("refine", self.refine.map(|x| x.to_string()));
        put("orbits", self.orbits.map(|x| x.to_string()));
        put("steps", self.steps.map(|x| x.to_string()));
        put("size", self.size.map(|x| x.to_string()));
        put("center", pair(self.center));
        put("radius", self.radius.map(fmt_f));
        put("region", self.region.as_ref().map(|p| p.display().to_string()));
        put("target", self.target.clone());
        put("newton_iters", self.newton_iters.map(|x| x.to_string()));
        put("tol", self.tol.map(fmt_f));
        put("direction", self.direction.map(|[a, b]| format!("{a},{b}")));
        put("polyline", self.polyline.as_ref().map(|p| p.display().to_string()));
        put("point", pair(self.point));
        put("q", pair(self.q));
        put("p", pair(self.p));
        put("k", self.k.map(|x| x.to_string()));
        put("base", self.base.map(|x| x.to_string()));
        s
    }

    /// Overlay the fields that are set in `other`.
    pub fn merge(&mut self, other: RunConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            map, seed, out_dir, prefix, grid, horizon, samples, resolution, epsilon, refine, orbits, steps, size, center,
            radius, region, target, newton_iters, tol, direction, polyline, point, q, p, k, base
        );
    }

    /// Fill in defaults for `cmd`.
    pub fn resolve(mut self, cmd: Command) -> Result<Self, CliError> {
        let map_free = cmd == Command::Winding && self.polyline.is_some();
        if self.map.is_none() && !map_free {
            return Err(CliError::Config("no map given (positional argument or `map` config key)".into()));
        }
        self.seed.get_or_insert(0);
        self.out_dir.get_or_insert_with(|| PathBuf::from("."));
        self.prefix.get_or_insert_with(|| cmd.name().to_string());
        match cmd {
            Command::Portrait => {
                self.orbits.get_or_insert(400);
                self.steps.get_or_insert(3000);
                self.size.get_or_insert(800);
            }
            Command::Rotset => {
                self.grid.get_or_insert(16);
                self.horizon.get_or_insert(1000);
            }
            Command::Localrot => {
                self.samples.get_or_insert(512);
                self.horizon.get_or_insert(2000);
                if self.region.is_none() {
                    self.center.get_or_insert([0.5, 0.5]);
                    self.radius.get_or_insert(0.05);
                }
            }
            Command::Classify => {
                let r = *self.resolution.get_or_insert(128);
                self.horizon.get_or_insert(300);
                self.epsilon.get_or_insert(2.0 / r as f64);
                self.refine.get_or_insert(4);
            }
            Command::Winding => {
                if self.polyline.is_none() {
                    self.k.get_or_insert(1);
                }
            }
            Command::Porbit => {
                if self.target.is_none() {
                    return Err(CliError::Config("porbit needs --target p1,p2,q".into()));
                }
                self.grid.get_or_insert(16);
                self.newton_iters.get_or_insert(50);
                self.tol.get_or_insert(1e-10);
            }
            Command::Annular => {
                self.direction.get_or_insert([1, 0]);
                self.samples.get_or_insert(64);
                self.horizon.get_or_insert(1000);
                self.grid.get_or_insert(16);
            }
        }
        Ok(self)
    }

    pub fn map(&self) -> &str {
        self.map.as_deref().unwrap_or_default()
    }
}
