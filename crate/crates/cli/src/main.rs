mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{parse_int_pair, parse_pair, Command, RunConfig};
use report::{read_text, write_report, Artifacts, CliError, EXIT_CONFIG, EXIT_OK};

#[derive(Parser)]
#[command(name = "toridyn", version, about = "Rotation sets, essential points and periodic orbits of torus maps")]
struct Cli {
    /// Worker threads (falls back to TORIDYN_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Sub,
}

#[derive(Args)]
struct Common {
    /// Map spec, e.g. `zaslavsky(0.19,1.69)`.
    map: Option<String>,
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Artifact file prefix (default: the command name).
    #[arg(long)]
    prefix: Option<String>,
}

#[derive(Subcommand)]
enum Sub {
    /// Phase portrait as a P6 pixmap.
    Portrait {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        orbits: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        size: Option<usize>,
    },
    /// Global rotation set from a G×G grid of starts.
    Rotset {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'G', long)]
        grid: Option<usize>,
        #[arg(short = 'N', long)]
        horizon: Option<usize>,
    },
    /// Rotation set of orbits starting in a ball or bitmap region.
    Localrot {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'S', long)]
        samples: Option<usize>,
        #[arg(short = 'N', long)]
        horizon: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        center: Option<String>,
        #[arg(long)]
        radius: Option<f64>,
        /// PBM bitmap of the start region.
        #[arg(long)]
        region: Option<PathBuf>,
        /// Also estimate the global hull on a G×G grid and compare.
        #[arg(short = 'G', long)]
        grid: Option<usize>,
    },
    /// Essential/inessential classification of every grid cell.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(short = 'R', long)]
        resolution: Option<usize>,
        #[arg(short = 'N', long)]
        horizon: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        refine: Option<usize>,
    },
    /// Winding of a polyline, or linking of a periodic point or region.
    Winding {
        #[command(flatten)]
        common: Common,
        /// CSV of `x,y` vertices.
        #[arg(long)]
        polyline: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        #[arg(short = 'k', long)]
        k: Option<usize>,
        #[arg(long)]
        region: Option<PathBuf>,
        /// Base cell index for the region path.
        #[arg(long)]
        base: Option<usize>,
    },
    /// Periodic points realizing a rational rotation vector.
    Porbit {
        #[command(flatten)]
        common: Common,
        /// `p1,p2,q`.
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        newton_iters: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Deviation growth along an integer direction.
    Annular {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        #[arg(short = 'S', long)]
        samples: Option<usize>,
        #[arg(short = 'N', long)]
        horizon: Option<usize>,
        #[arg(short = 'G', long)]
        grid: Option<usize>,
    },
}

fn pair(key: &str, v: Option<String>) -> Result<Option<[f64; 2]>, CliError> {
    v.map(|s| parse_pair(key, &s)).transpose()
}

/// Split the parsed flags into the command, the common options and the
/// per-command overrides.
fn flags(sub: Sub) -> Result<(Command, Common, RunConfig), CliError> {
    let mut c = RunConfig::default();
    let (cmd, common) = match sub {
        Sub::Portrait { common, orbits, steps, size } => {
            (c.orbits, c.steps, c.size) = (orbits, steps, size);
            (Command::Portrait, common)
        }
        Sub::Rotset { common, grid, horizon } => {
            (c.grid, c.horizon) = (grid, horizon);
            (Command::Rotset, common)
        }
        Sub::Localrot { common, samples, horizon, center, radius, region, grid } => {
            (c.samples, c.horizon, c.radius, c.region, c.grid) = (samples, horizon, radius, region, grid);
            c.center = pair("center", center)?;
            (Command::Localrot, common)
        }
        Sub::Classify { common, resolution, horizon, epsilon, refine } => {
            (c.resolution, c.horizon, c.epsilon, c.refine) = (resolution, horizon, epsilon, refine);
            (Command::Classify, common)
        }
        Sub::Winding { common, polyline, point, q, p, k, region, base } => {
            (c.polyline, c.k, c.region, c.base) = (polyline, k, region, base);
            c.point = pair("point", point)?;
            c.q = pair("q", q)?;
            c.p = pair("p", p)?;
            (Command::Winding, common)
        }
        Sub::Porbit { common, target, grid, newton_iters, tol } => {
            (c.target, c.grid, c.newton_iters, c.tol) = (target, grid, newton_iters, tol);
            (Command::Porbit, common)
        }
        Sub::Annular { common, direction, samples, horizon, grid } => {
            (c.samples, c.horizon, c.grid) = (samples, horizon, grid);
            c.direction = direction.map(|s| parse_int_pair("direction", &s)).transpose()?;
            (Command::Annular, common)
        }
    };
    c.map = common.map.clone();
    c.seed = common.seed;
    c.out_dir = common.out_dir.clone();
    c.prefix = common.prefix.clone();
    Ok((cmd, common, c))
}

fn setup_threads(flag: Option<usize>) -> Result<(), CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("TORIDYN_THREADS") {
            Ok(s) if !s.trim().is_empty() => Some(
                s.trim().parse().map_err(|_| CliError::Config(format!("TORIDYN_THREADS must be a count, got `{s}`")))?,
            ),
            _ => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Config("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    setup_threads(cli.threads)?;
    let (cmd, common, overrides) = flags(cli.cmd)?;
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_kv_text(&read_text(path)?)?,
        None => RunConfig::default(),
    };
    cfg.merge(overrides);
    let cfg = cfg.resolve(cmd)?;

    let mut artifacts = Artifacts::new(&cfg)?;
    artifacts.write(".cfg", cfg.to_kv_text())?;
    let start = Instant::now();
    let outcome = commands::run(cmd, &cfg, &mut artifacts)?;
    let wall = start.elapsed().as_secs_f64();
    let report = write_report(cmd, &cfg, &outcome, &mut artifacts, wall)?;

    println!("{} {}: wrote {}", cmd.name(), cfg.map(), report.display());
    if outcome.empty_result {
        println!("empty result");
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("toridyn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
