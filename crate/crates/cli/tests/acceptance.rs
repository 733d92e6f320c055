//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Set `TORIDYN_BLESS=1` to regenerate the golden portrait instead of
//! comparing against it.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use toridyn::homology::{label_components, unfold_oracle};
use toridyn::hull::{diffusion_rate, hausdorff_distance};
use toridyn::rotation::{estimate_rotation_set, grid_starts, max_step};
use toridyn::transition::{essential_point_test, Verdict};
use toridyn::winding::{dense_winding, winding_index, winding_number, Polyline};
use toridyn::{convex_hull, make_map, GridRegion, TorusPoint, Vec2};

const BIN: &str = env!("CARGO_BIN_EXE_toridyn");

fn golden_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/zaslavsky_portrait.ppm")
}

struct Check {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
    secs: f64,
    limit: f64,
}

/// Bytes that must repeat exactly on a second run.
type Fingerprint = Vec<(String, Vec<u8>)>;

struct Run {
    code: i32,
    report: Value,
}

fn strip_wall_time(bytes: &[u8]) -> Vec<u8> {
    let text = String::from_utf8_lossy(bytes);
    text.lines().filter(|l| !l.trim_start().starts_with("\"wall_time_s\"")).collect::<Vec<_>>().join("\n").into_bytes()
}

/// Run the CLI in `dir`, collecting every artifact it lists.
fn cli(dir: &Path, prefix: &str, args: &[&str], fp: &mut Fingerprint) -> Run {
    let out = Command::new(BIN)
        .args(args)
        .args(["--out-dir", dir.to_str().unwrap(), "--prefix", prefix])
        .output()
        .expect("spawn toridyn");
    let code = out.status.code().unwrap_or(-1);
    let report_path = dir.join(format!("{prefix}.json"));
    let report: Value = std::fs::read(&report_path)
        .ok()
        .and_then(|b| serde_json::from_slice(&b).ok())
        .unwrap_or(Value::Null);
    if let Some(names) = report["artifacts"].as_array() {
        for n in names.iter().filter_map(Value::as_str) {
            let bytes = std::fs::read(dir.join(n)).unwrap_or_default();
            let bytes = if n.ends_with(".json") { strip_wall_time(&bytes) } else { bytes };
            fp.push((n.to_string(), bytes));
        }
    }
    fp.push((format!("{prefix} exit"), code.to_le_bytes().to_vec()));
    Run { code, report }
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn timed(
    id: usize,
    name: &'static str,
    limit: f64,
    body: impl FnOnce(&mut Fingerprint) -> (bool, String),
    fp: &mut Fingerprint,
) -> Check {
    let t = Instant::now();
    let (pass, detail) = body(fp);
    let secs = t.elapsed().as_secs_f64();
    Check { id, name, pass: pass && secs < limit, detail, secs, limit }
}

fn c1(dir: &Path, fp: &mut Fingerprint) -> (bool, String) {
    let r = cli(dir, "c1", &["rotset", "translation(0.25,0.125)", "-G", "8", "-N", "1000"], fp);
    let hull = r.report["results"]["hull"].as_array().cloned().unwrap_or_default();
    let err = hull.first().map(|v| (f(&v[0]) - 0.25).abs().max((f(&v[1]) - 0.125).abs())).unwrap_or(f64::NAN);
    (r.code == 0 && hull.len() == 1 && err <= 1e-12, format!("{} vertex, error {err:.1e}", hull.len()))
}

fn c2(fp: &mut Fingerprint) -> (bool, String) {
    let map = make_map("zaslavsky", &[0.19, 1.69]).unwrap();
    let (g, n) = (16, 4000);
    let sq = estimate_rotation_set(&map.power(2), g, n).unwrap();
    let long = estimate_rotation_set(&map, g, 2 * n).unwrap();
    let d = hausdorff_distance(&sq.hull, &long.hull.scaled(2.0));
    let bound = 8.0 * max_step(&map, &grid_starts(g)) / n as f64;
    fp.push(("c2".into(), format!("{d:?} {bound:?}").into_bytes()));
    (d <= bound, format!("Hausdorff {d:.3e} <= {bound:.3e}"))
}

fn c3(dir: &Path, fp: &mut Fingerprint) -> (bool, String) {
    let r = cli(dir, "c3", &["rotset", "standard(6)", "-G", "32", "-N", "2000"], fp);
    let eta = f(&r.report["results"]["diffusion_rate"]);
    let long = estimate_rotation_set(&make_map("standard", &[6.0]).unwrap(), 32, 10_000).unwrap();
    let eta_long = long.diffusion_rate();
    let rel = (eta - eta_long).abs() / eta_long;
    fp.push(("c3 long".into(), format!("{eta_long:?}").into_bytes()));
    (
        r.code == 0 && eta > 0.05,
        format!("diffusion_rate {eta:.4} (> 0.05); N=10000 gives {eta_long:.4}, relative gap {:.0}%", rel * 100.0),
    )
}

fn chaotic_sea_points(count: usize) -> Vec<TorusPoint> {
    let map = make_map("standard", &[6.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut out = Vec::new();
    while out.len() < count {
        let x = TorusPoint::new(rng.gen(), rng.gen());
        let (test, _) = essential_point_test(&map, x, 2.0 / 64.0, 200, 64).unwrap();
        if test.verdict == Verdict::Essential {
            out.push(x);
        }
    }
    out
}

fn c4(dir: &Path, fp: &mut Fingerprint) -> (bool, String) {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (i, x) in chaotic_sea_points(10).into_iter().enumerate() {
        let center = format!("{:?},{:?}", x.x, x.y);
        let r = cli(
            dir,
            &format!("c4_{i}"),
            &["localrot", "standard(6)", "-S", "512", "-N", "2000", "--center", &center, "--radius", "0.05", "-G", "32"],
            fp,
        );
        let d = f(&r.report["results"]["global"]["hausdorff_distance"]);
        ok &= r.code == 0 && d <= 0.1;
        worst = worst.max(d);
    }
    (ok, format!("worst Hausdorff distance {worst:.4} (<= 0.1) over 10 sea points"))
}

fn c5(dir: &Path, fp: &mut Fingerprint) -> (bool, String) {
    let p = cli(dir, "c5_portrait", &["portrait", "zaslavsky(0.19,1.69)"], fp);
    let img = std::fs::read(dir.join("c5_portrait.ppm")).unwrap_or_default();
    let golden = golden_path();
    if std::env::var_os("TORIDYN_BLESS").is_some() {
        std::fs::create_dir_all(golden.parent().unwrap()).unwrap();
        std::fs::write(&golden, &img).unwrap();
    }
    let diff = match (toridyn::io::Raster::from_ppm(&img), std::fs::read(&golden).map(|b| toridyn::io::Raster::from_ppm(&b))) {
        (Ok(a), Ok(Ok(b))) => a.disagreement(&b),
        _ => 1.0,
    };
    let c = cli(dir, "c5_classify", &["classify", "zaslavsky(0.19,1.69)", "-R", "256", "-N", "300"], fp);
    let res = &c.report["results"];
    let census = res["census"].as_array().cloned().unwrap_or_default();
    let bounded_islands = census.iter().filter(|c| c["rank"] == 0 && c["diameter"].is_number()).count();
    let ess = &res["essential_set"];
    let single = ess["components"] == 1 && ess["tag"] == "fully_essential";
    (
        p.code == 0 && c.code == 0 && diff <= 0.02 && bounded_islands >= 1 && single,
        format!(
            "portrait disagreement {:.3}% (<= 2%); {bounded_islands} bounded islands; Ess components {}, {}",
            diff * 100.0,
            ess["components"],
            ess["tag"]
        ),
    )
}

fn random_polyline(rng: &mut ChaCha8Rng, closed: bool) -> Vec<Vec2> {
    let n = rng.gen_range(3..12);
    let mut v: Vec<Vec2> = (0..n).map(|_| Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    if closed {
        v.push(v[0]);
    }
    v
}

fn off_path_point(rng: &mut ChaCha8Rng, polys: &[&Polyline]) -> Vec2 {
    loop {
        let z = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if polys.iter().all(|p| p.distance_to(z) > 1e-3) {
            return z;
        }
    }
}

fn c6(fp: &mut Fingerprint) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = 0;
    let mut nonzero = 0;
    for _ in 0..1000 {
        let poly = Polyline::new(random_polyline(&mut rng, true), true).unwrap();
        let z = off_path_point(&mut rng, &[&poly]);
        let w = winding_number(&poly, z).unwrap();
        let oracle = dense_winding(&poly, z, 10_000).round() as i64;
        mismatches += usize::from(w != oracle);
        nonzero += usize::from(w != 0);
    }
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = Polyline::new(random_polyline(&mut rng, false), false).unwrap();
        let mut tail = random_polyline(&mut rng, false);
        tail[0] = a.end();
        let b = Polyline::new(tail, false).unwrap();
        let ab = a.concat(&b).unwrap();
        let z = off_path_point(&mut rng, &[&a, &b]);
        let defect = winding_index(&ab, z).unwrap() - winding_index(&a, z).unwrap() - winding_index(&b, z).unwrap();
        worst = worst.max(defect.abs());
    }
    fp.push(("c6".into(), format!("{mismatches} {nonzero} {worst:?}").into_bytes()));
    (
        mismatches == 0 && worst <= 1e-9,
        format!("{mismatches} oracle mismatches ({nonzero} nonzero windings); additivity defect {worst:.1e}"),
    )
}

fn c7(fp: &mut Fingerprint) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0;
    let mut essential = 0;
    for r in [16, 32, 64] {
        for _ in 0..200 {
            let density: f64 = rng.gen_range(0.3..0.8);
            let region = GridRegion::from_fn(r, |_, _| rng.gen_bool(density)).unwrap();
            let labeling = label_components(&region);
            let oracle = unfold_oracle(&region);
            let fast: Vec<bool> = (0..r * r)
                .map(|idx| labeling.component_of_index(idx).is_some_and(|c| labeling.components()[c].is_essential()))
                .collect();
            bad += usize::from(fast != oracle);
            essential += usize::from(fast.iter().any(|&e| e));
        }
    }
    fp.push(("c7".into(), format!("{bad} {essential}").into_bytes()));
    (bad == 0, format!("{bad}/600 bitmaps disagree ({essential} contain essential cells)"))
}

fn c8(fp: &mut Fingerprint) -> (bool, String) {
    let tri = convex_hull(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]).unwrap();
    let sq = convex_hull(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)]).unwrap();
    let et = (diffusion_rate(&tri) - (2.0 - 2f64.sqrt()) / 2.0).abs();
    let es = (diffusion_rate(&sq) - 0.5).abs();
    fp.push(("c8".into(), format!("{et:?} {es:?}").into_bytes()));
    (et <= 1e-9 && es <= 1e-12, format!("triangle error {et:.1e}, square error {es:.1e}"))
}

fn c9(dir: &Path, fp: &mut Fingerprint) -> (bool, String) {
    let r = cli(dir, "c9", &["porbit", "standard(1.5)", "--target", "0,0,1"], fp);
    let text = std::fs::read_to_string(dir.join("c9_roots.csv")).unwrap_or_default();
    let roots: Vec<(TorusPoint, f64)> = text
        .lines()
        .skip(1)
        .filter_map(|l| {
            let v: Vec<f64> = l.split(',').filter_map(|s| s.parse().ok()).collect();
            (v.len() == 3).then(|| (TorusPoint::new(v[0], v[1]), v[2]))
        })
        .collect();
    let found = |x: f64, y: f64| roots.iter().any(|(p, res)| p.dist(TorusPoint::new(x, y)) < 1e-8 && *res < 1e-9);
    (
        r.code == 0 && found(0.0, 0.0) && found(0.5, 0.0),
        format!("{} roots; (0,0) {}, (0.5,0) {}", roots.len(), found(0.0, 0.0), found(0.5, 0.0)),
    )
}

fn c10(dir: &Path, fp: &mut Fingerprint) -> (bool, String) {
    let spec = format!("disk_twist(0.5,0.5,0.2,{FRAC_PI_2:?})");
    let periodic = cli(dir, "c10_periodic", &["winding", &spec, "--q", "0.6,0.5", "--p", "0.5,0.5", "-k", "4"], fp);
    let value = periodic.report["results"]["index"].as_i64();
    let r = 128;
    let disk = GridRegion::ball(r, TorusPoint::new(0.6, 0.5), 0.025).unwrap();
    let invariant = toridyn::winding::is_invariant_at_resolution(&make_map("disk_twist", &[0.5, 0.5, 0.2, FRAC_PI_2]).unwrap(), &disk, 4);
    let pbm = dir.join("c10_disk.pbm");
    std::fs::write(&pbm, disk.to_pbm()).unwrap();
    let cells = disk.active_cells();
    let mut region_values = Vec::new();
    for t in 0..10 {
        let (i, j) = cells[t * cells.len() / 10];
        let base = disk.index(i, j).to_string();
        let run = cli(
            dir,
            &format!("c10_region_{t}"),
            &["winding", &spec, "--region", pbm.to_str().unwrap(), "--p", "0.5,0.5", "-k", "4", "--base", &base],
            fp,
        );
        region_values.push(run.report["results"]["index"].as_i64());
    }
    let agree = region_values.iter().all(|v| *v == value);
    (
        periodic.code == 0 && value == Some(1) && invariant && agree,
        format!("periodic linking {value:?}; disk invariant {invariant}; region values over 10 bases {region_values:?}"),
    )
}

fn suite(dir: &Path) -> (Vec<Check>, Fingerprint) {
    let mut fp = Fingerprint::new();
    let checks = vec![
        timed(1, "translation exactness", 1.0, |fp| c1(dir, fp), &mut fp),
        timed(2, "rotation-set equivariance", 30.0, c2, &mut fp),
        timed(3, "nonempty interior", 60.0, |fp| c3(dir, fp), &mut fp),
        timed(4, "local hulls match global hull", 300.0, |fp| c4(dir, fp), &mut fp),
        timed(5, "web-map portrait and classification", 600.0, |fp| c5(dir, fp), &mut fp),
        timed(6, "winding oracle", 10.0, c6, &mut fp),
        timed(7, "essentiality oracle", 30.0, c7, &mut fp),
        timed(8, "diffusion-rate geometry", 1.0, c8, &mut fp),
        timed(9, "periodic realization", 5.0, |fp| c9(dir, fp), &mut fp),
        timed(10, "linking numbers", 5.0, |fp| c10(dir, fp), &mut fp),
    ];
    (checks, fp)
}

fn print(c: &Check) {
    println!(
        "criterion {:>2} {} {:<38} {:>8.2}s (limit {}s)  {}",
        c.id,
        if c.pass { "PASS" } else { "FAIL" },
        c.name,
        c.secs,
        c.limit,
        c.detail
    );
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let (first, fp1) = suite(dir.path());
    for c in &first {
        print(c);
    }
    let t = Instant::now();
    let (_, fp2) = suite(dir.path());
    let differing: Vec<&str> =
        fp1.iter().zip(&fp2).filter(|(a, b)| a != b).map(|(a, _)| a.0.as_str()).collect();
    let same = fp1.len() == fp2.len() && differing.is_empty();
    let det = Check {
        id: 11,
        name: "determinism",
        pass: same,
        detail: format!("{} artifacts compared, differing: {differing:?}", fp1.len()),
        secs: t.elapsed().as_secs_f64(),
        limit: f64::INFINITY,
    };
    print(&det);
    let failed: Vec<usize> = first.iter().chain([&det]).filter(|c| !c.pass).map(|c| c.id).collect();
    println!("acceptance: {}/11 criteria passed; failing: {failed:?}", 11 - failed.len());
}
