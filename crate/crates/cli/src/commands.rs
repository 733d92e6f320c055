//! One function per subcommand: run the analysis, write artifacts, and hand
//! back the results payload.

use serde::Serialize;

use toridyn::homology::RegionTag;
use toridyn::hull::{chebyshev_center, hausdorff_distance};
use toridyn::io::{
    classification_raster, deviation_csv, hull_csv, hull_svg, points_csv, portrait, roots_csv, samples_csv,
};
use toridyn::periodic::{
    annularity_probe, find_periodic_realizing, irrotational_verdict, torality_flags, AnnularityProbe, IrrotationalProbe,
    RealizationTarget, RootSearch, ToralityFlags,
};
use toridyn::rotation::{
    estimate_local_rotation_set, estimate_rotation_set, grid_starts, max_step, LocalRegion, RotationSetEstimate,
};
use toridyn::transition::{classify_torus, Classification, Verdict};
use toridyn::winding::{isotopy_path, linking_number_periodic, linking_number_region, winding_index, Polyline, CLOSE_TOL};
use toridyn::{parse_map, GridRegion, IntVec, LiftedMap, TorusPoint, Vec2};

use crate::config::{Command, RunConfig};
use crate::report::{read_text, Artifacts, CliError, Outcome};

fn load_map(cfg: &RunConfig) -> Result<LiftedMap, CliError> {
    Ok(parse_map(cfg.map())?)
}

fn need<T: Copy>(v: Option<T>, key: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing `{key}`")))
}

fn vec2(p: [f64; 2]) -> Vec2 {
    Vec2::new(p[0], p[1])
}

fn load_region(path: &std::path::Path) -> Result<GridRegion, CliError> {
    Ok(GridRegion::from_pbm(&read_text(path)?)?)
}

pub fn run(cmd: Command, cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    match cmd {
        Command::Portrait => cmd_portrait(cfg, out),
        Command::Rotset => cmd_rotset(cfg, out),
        Command::Localrot => cmd_localrot(cfg, out),
        Command::Classify => cmd_classify(cfg, out),
        Command::Winding => cmd_winding(cfg, out),
        Command::Porbit => cmd_porbit(cfg, out),
        Command::Annular => cmd_annular(cfg, out),
    }
}

#[derive(Serialize)]
struct PortraitResult<'a> {
    map: &'a str,
    orbits: usize,
    steps: usize,
    size: usize,
    seed: u64,
    plotted: usize,
}

fn cmd_portrait(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let map = load_map(cfg)?;
    let (orbits, steps, size, seed) = (need(cfg.orbits, "orbits")?, need(cfg.steps, "steps")?, need(cfg.size, "size")?, need(cfg.seed, "seed")?);
    let p = portrait(&map, orbits, steps, size, seed)?;
    out.write(".ppm", p.raster.to_ppm())?;
    Outcome::ok(PortraitResult { map: map.label(), orbits, steps, size, seed, plotted: p.plotted })
}

#[derive(Serialize)]
struct HullReport {
    hull: Vec<[f64; 2]>,
    diffusion_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    inscribed_center: Option<[f64; 2]>,
}

fn hull_report(est: &RotationSetEstimate) -> HullReport {
    HullReport {
        hull: est.hull.vertices().iter().map(|v| [v.x, v.y]).collect(),
        diffusion_rate: est.diffusion_rate(),
        inscribed_center: chebyshev_center(&est.hull).map(|(c, _)| [c.x, c.y]),
    }
}

fn write_estimate(out: &mut Artifacts, est: &RotationSetEstimate) -> Result<(), CliError> {
    out.write("_samples.csv", samples_csv(&est.samples))?;
    out.write("_hull.csv", hull_csv(&est.hull))?;
    out.write("_hull.svg", hull_svg(&est.hull, &est.values(), 600))?;
    Ok(())
}

#[derive(Serialize)]
struct RotsetResult<'a> {
    map: &'a str,
    seed: u64,
    #[serde(rename = "G")]
    grid: usize,
    #[serde(rename = "N")]
    horizon: usize,
    #[serde(flatten)]
    hull: HullReport,
    max_step: f64,
    /// Hausdorff distance to the hull at horizon N/2.
    convergence_gap: f64,
    irrotational: IrrotationalProbe,
}

fn cmd_rotset(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let map = load_map(cfg)?;
    let (g, n) = (need(cfg.grid, "grid")?, need(cfg.horizon, "horizon")?);
    let est = estimate_rotation_set(&map, g, n)?;
    let half = estimate_rotation_set(&map, g, (n / 2).max(1))?;
    let step = max_step(&map, &grid_starts(g));
    write_estimate(out, &est)?;
    Outcome::ok(RotsetResult {
        map: map.label(),
        seed: need(cfg.seed, "seed")?,
        grid: g,
        horizon: n,
        hull: hull_report(&est),
        max_step: step,
        convergence_gap: hausdorff_distance(&half.hull, &est.hull),
        irrotational: irrotational_verdict(&est.hull, n, step),
    })
}

#[derive(Serialize)]
struct GlobalComparison {
    #[serde(rename = "G")]
    grid: usize,
    #[serde(flatten)]
    hull: HullReport,
    hausdorff_distance: f64,
}

#[derive(Serialize)]
struct LocalrotResult<'a> {
    map: &'a str,
    seed: u64,
    #[serde(rename = "S")]
    samples: usize,
    #[serde(rename = "N")]
    horizon: usize,
    region: String,
    #[serde(flatten)]
    hull: HullReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    global: Option<GlobalComparison>,
}

fn cmd_localrot(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let map = load_map(cfg)?;
    let (s, n, seed) = (need(cfg.samples, "samples")?, need(cfg.horizon, "horizon")?, need(cfg.seed, "seed")?);
    let region = match &cfg.region {
        Some(path) => LocalRegion::Cells(load_region(path)?),
        None => {
            let c = need(cfg.center, "center")?;
            LocalRegion::Ball { center: TorusPoint::new(c[0], c[1]), radius: need(cfg.radius, "radius")? }
        }
    };
    let est = estimate_local_rotation_set(&map, &region, s, n, seed)?;
    write_estimate(out, &est)?;
    let global = match cfg.grid {
        Some(g) => {
            let glob = estimate_rotation_set(&map, g, n)?;
            Some(GlobalComparison { grid: g, hull: hull_report(&glob), hausdorff_distance: hausdorff_distance(&est.hull, &glob.hull) })
        }
        None => None,
    };
    Outcome::ok(LocalrotResult { map: map.label(), seed, samples: s, horizon: n, region: region.describe(), hull: hull_report(&est), global })
}

#[derive(Serialize)]
struct ClassifyResult<'a> {
    map: &'a str,
    #[serde(flatten)]
    classification: &'a Classification,
    /// Bounded components of the inessential set.
    islands: usize,
    ess_connected_fully_essential: bool,
}

fn cmd_classify(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let map = load_map(cfg)?;
    let c = classify_torus(
        &map,
        need(cfg.epsilon, "epsilon")?,
        need(cfg.horizon, "horizon")?,
        need(cfg.resolution, "resolution")?,
        need(cfg.refine, "refine")?,
    )?;
    out.write(".ppm", classification_raster(&c).to_ppm())?;
    out.write("_ess.pbm", c.bitmap(Verdict::Essential).to_pbm())?;
    out.write("_ine.pbm", c.bitmap(Verdict::Inessential).to_pbm())?;
    let ess = &c.essential_set;
    Outcome::ok(ClassifyResult {
        map: map.label(),
        classification: &c,
        islands: c.islands().count(),
        ess_connected_fully_essential: ess.components == 1 && ess.class == RegionTag::FullyEssential,
    })
}

#[derive(Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum WindingResult {
    Polyline { closed: bool, point: [f64; 2], index: f64 },
    Periodic { q: [f64; 2], k: usize, p: [f64; 2], index: i64 },
    Region { region: String, k: usize, p: [f64; 2], #[serde(skip_serializing_if = "Option::is_none")] base: Option<usize>, index: i64 },
}

fn cmd_winding(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    if let Some(path) = &cfg.polyline {
        let pts = toridyn::io::parse_points_csv(&read_text(path)?)?;
        let closed = pts.len() > 2 && pts[0].dist(pts[pts.len() - 1]) <= CLOSE_TOL;
        let poly = Polyline::new(pts, closed)?;
        let z = need(cfg.point, "point")?;
        let index = winding_index(&poly, vec2(z))?;
        return Outcome::ok(WindingResult::Polyline { closed, point: z, index });
    }
    let map = load_map(cfg)?;
    let p = need(cfg.p, "p")?;
    let k = need(cfg.k, "k")?;
    if let Some(path) = &cfg.region {
        let region = load_region(path)?;
        let index = linking_number_region(&map, &region, k, vec2(p), cfg.base)?;
        return Outcome::ok(WindingResult::Region { region: path.display().to_string(), k, p, base: cfg.base, index });
    }
    let q = cfg.q.ok_or_else(|| CliError::Config("winding needs --polyline, --q or --region".into()))?;
    let index = linking_number_periodic(&map, vec2(q), k, vec2(p))?;
    let path = isotopy_path(&map, vec2(q), k)?;
    out.write("_loop.csv", points_csv(&path.vertices))?;
    Outcome::ok(WindingResult::Periodic { q, k, p, index })
}

#[derive(Serialize)]
struct PorbitResult<'a> {
    map: &'a str,
    #[serde(flatten)]
    search: RootSearch,
    grid: usize,
    newton_iters: usize,
}

fn cmd_porbit(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let map = load_map(cfg)?;
    let target = RealizationTarget::parse(cfg.target.as_deref().unwrap_or_default())?;
    let (grid, iters, tol) = (need(cfg.grid, "grid")?, need(cfg.newton_iters, "newton_iters")?, need(cfg.tol, "tol")?);
    let search = find_periodic_realizing(&map, &target, grid, iters, tol)?;
    out.write("_roots.csv", roots_csv(&search.roots))?;
    let empty = search.empty;
    let mut outcome = Outcome::ok(PorbitResult { map: map.label(), search, grid, newton_iters: iters })?;
    if empty {
        outcome.empty_result = true;
        outcome.failure = Some(CliError::Numeric(format!(
            "no point realizes ({},{})/{}",
            target.p1, target.p2, target.q
        )));
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct AnnularResult<'a> {
    map: &'a str,
    probe: &'a AnnularityProbe,
    horizontal: &'a AnnularityProbe,
    vertical: &'a AnnularityProbe,
    #[serde(rename = "G")]
    grid: usize,
    torality: ToralityFlags,
}

fn cmd_annular(cfg: &RunConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let map = load_map(cfg)?;
    let d = need(cfg.direction, "direction")?;
    let v = IntVec::new(d[0], d[1]);
    let (s, n, seed, g) = (need(cfg.samples, "samples")?, need(cfg.horizon, "horizon")?, need(cfg.seed, "seed")?, need(cfg.grid, "grid")?);
    let probe = annularity_probe(&map, v, s, n, seed)?;
    let by_axis = |axis: IntVec| -> Result<AnnularityProbe, CliError> {
        if v.primitive_canonical() == axis {
            Ok(probe.clone())
        } else {
            Ok(annularity_probe(&map, axis, s, n, seed)?)
        }
    };
    let horizontal = by_axis(IntVec::E1)?;
    let vertical = by_axis(IntVec::E2)?;
    let hull = estimate_rotation_set(&map, g, n)?;
    let torality = torality_flags(&horizontal, &vertical, hull.diffusion_rate());
    out.write("_deviation.csv", deviation_csv(&probe.curve))?;
    Outcome::ok(AnnularResult { map: map.label(), probe: &probe, horizontal: &horizontal, vertical: &vertical, grid: g, torality })
}
