//! Command-line front end: configuration, dispatch, file output and the
//! self-test harness.

pub mod commands;
pub mod config;
pub mod emit;
pub mod error;
pub mod selftest;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::{validate, RunConfig, TailBlock, TestFunction};
use crate::error::{CliError, EXIT_OK, EXIT_SELFTEST};

#[derive(Debug, Parser)]
#[command(name = "selfsim", version, about = "Self-similar Laplacian numerics: tables, envelopes and self-test")]
struct Cli {
    /// JSON run configuration; flags override its scalar fields.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (default: out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    h: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    zeta: Option<f64>,
    /// Centered grid as N,DX.
    #[arg(long, global = true, value_name = "N,DX")]
    grid: Option<String>,
    /// Skip the gnuplot scripts.
    #[arg(long, global = true)]
    no_plot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// ω²(k) in closed form and by quadrature.
    Dispersion(DispersionArgs),
    /// Static Green's function at points.
    GreensStatic(PointsArgs),
    /// Spectral (and optionally pointwise) Laplacian of a test function.
    Laplacian(LaplacianArgs),
    /// Evolve a Gaussian displacement.
    Cauchy(CauchyArgs),
    /// Sampled Q and ∂ₜQ kernels, with series values at points.
    Kernels(KernelsArgs),
    /// Helmholtz Green's function on the grid.
    Helmholtz(HelmholtzArgs),
    /// Diffusion propagator W(x,t), tail fit and moments.
    Diffusion(DiffusionArgs),
    /// Monte Carlo Lévy flight positions and KS distance.
    Mc(McArgs),
    /// Self-similar potentials b_α and compensation integrals.
    Potentials(PotentialsArgs),
    /// Run every acceptance check and report one line per case.
    Selftest,
}

#[derive(Debug, Args)]
struct DispersionArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    k: Option<Vec<f64>>,
    /// Closed form only.
    #[arg(long)]
    no_quadrature: bool,
}

#[derive(Debug, Args)]
struct PointsArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct LaplacianArgs {
    #[arg(long, value_enum)]
    function: Option<TestFunction>,
    #[arg(long, allow_negative_numbers = true)]
    k0: Option<f64>,
    /// Points for the pointwise quadrature.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct CauchyArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t: Option<Vec<f64>>,
    #[arg(long)]
    width: Option<f64>,
}

#[derive(Debug, Args)]
struct KernelsArgs {
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct HelmholtzArgs {
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    #[arg(long)]
    gauged: bool,
}

#[derive(Debug, Args)]
struct DiffusionArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t: Option<Vec<f64>>,
    /// Fit the far-field slope (window from the config, or 1e3σ..1e5σ).
    #[arg(long)]
    tail: bool,
    #[arg(long, value_delimiter = ',')]
    moment_l: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Skip the KS comparison.
    #[arg(long)]
    no_ks: bool,
}

#[derive(Debug, Args)]
struct PotentialsArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<f64>>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dispersion(_) => "dispersion",
            Command::GreensStatic(_) => "greens-static",
            Command::Laplacian(_) => "laplacian",
            Command::Cauchy(_) => "cauchy",
            Command::Kernels(_) => "kernels",
            Command::Helmholtz(_) => "helmholtz",
            Command::Diffusion(_) => "diffusion",
            Command::Mc(_) => "mc",
            Command::Potentials(_) => "potentials",
            Command::Selftest => "selftest",
        }
    }
}

fn parse_grid(text: &str) -> Result<(usize, f64), CliError> {
    let bad = || CliError::Usage(format!("--grid expects N,DX, got {text:?}"));
    let (n, dx) = text.split_once(',').ok_or_else(bad)?;
    Ok((n.trim().parse().map_err(|_| bad())?, dx.trim().parse().map_err(|_| bad())?))
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(d) = cli.delta {
        cfg.params.delta = d;
    }
    if let Some(h) = cli.h {
        cfg.params.h = h;
    }
    if let Some(z) = cli.zeta {
        cfg.params.zeta = z;
    }
    if let Some(g) = &cli.grid {
        let (n, dx) = parse_grid(g)?;
        cfg.grid.n = n;
        cfg.grid.dx = dx;
        cfg.grid.x_min = None;
    }
    if cli.no_plot {
        cfg.output.plot = false;
    }
    match &cli.command {
        Command::Dispersion(a) => {
            set(&mut cfg.dispersion.k, &a.k);
            if a.no_quadrature {
                cfg.dispersion.quadrature = false;
            }
        }
        Command::GreensStatic(a) => set(&mut cfg.greens_static.x, &a.x),
        Command::Laplacian(a) => {
            set(&mut cfg.laplacian.function, &a.function);
            set(&mut cfg.laplacian.k0, &a.k0);
            set(&mut cfg.laplacian.x, &a.x);
        }
        Command::Cauchy(a) => {
            set(&mut cfg.cauchy.times, &a.t);
            set(&mut cfg.cauchy.width, &a.width);
        }
        Command::Kernels(a) => {
            set(&mut cfg.kernels.t, &a.t);
            set(&mut cfg.kernels.x, &a.x);
        }
        Command::Helmholtz(a) => {
            set(&mut cfg.helmholtz.omega, &a.omega);
            set(&mut cfg.helmholtz.eps, &a.eps);
            if a.gauged {
                cfg.helmholtz.gauged = true;
            }
        }
        Command::Diffusion(a) => {
            set(&mut cfg.diffusion.times, &a.t);
            set(&mut cfg.diffusion.moment_l, &a.moment_l);
            if a.tail && cfg.diffusion.tail.is_none() {
                cfg.diffusion.tail = Some(TailBlock::default());
            }
        }
        Command::Mc(a) => {
            set(&mut cfg.mc.t, &a.t);
            set(&mut cfg.mc.samples, &a.samples);
            if a.no_ks {
                cfg.mc.ks = false;
            }
        }
        Command::Potentials(a) => {
            set(&mut cfg.potentials.alphas, &a.alpha);
            set(&mut cfg.potentials.x, &a.x);
            set(&mut cfg.potentials.eps, &a.eps);
            set(&mut cfg.potentials.a, &a.a);
        }
        Command::Selftest => {}
    }
    Ok(cfg)
}

fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
    if let Some(v) = value {
        *slot = v.clone();
    }
}

/// The part of the configuration a command depends on, echoed into the
/// envelope and hashed.
pub fn input_echo(command: &str, cfg: &RunConfig) -> Value {
    let full = serde_json::to_value(cfg).expect("config serializes");
    let mut keep = vec!["params", "quadrature", "series", "seed"];
    if commands::uses_grid(command) {
        keep.push("grid");
    }
    if let Some(b) = commands::block_name(command) {
        keep.push(b);
    }
    let map = full.as_object().unwrap();
    Value::Object(keep.into_iter().map(|k| (k.to_string(), map[k].clone())).collect())
}

pub fn provenance(cfg: &RunConfig) -> Value {
    json!({
        "library": format!("selfsim {}", selfsim::VERSION),
        "seed": cfg.seed,
        "quadrature": cfg.quadrature,
        "series": cfg.series,
    })
}

/// Validates, computes and writes one command; nothing is written unless
/// the whole computation succeeded.
pub fn execute(command: &str, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    validate(cfg, command)?;
    let output = commands::dispatch(command, cfg)?;
    let input = input_echo(command, cfg);
    emit::write_output(&cfg.output.dir, command, &input, provenance(cfg), &output, cfg.output.plot)
}

fn run_selftest(cfg: &RunConfig) -> Result<u8, CliError> {
    let reports = selftest::run_all();
    for r in &reports {
        println!("{}", r.line());
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("selftest: {} passed, {failed} failed", reports.len() - failed);
    let doc = json!({
        "command": "selftest",
        "version": env!("CARGO_PKG_VERSION"),
        "library": format!("selfsim {}", selfsim::VERSION),
        "cases": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        "passed": failed == 0,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    let dir: &Path = &cfg.output.dir;
    fs::create_dir_all(dir)?;
    emit::write_atomic(dir, "selftest.json", text.as_bytes())?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_SELFTEST })
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to standard error as `error[CODE]: message`.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let text = e.to_string();
            let text = text.strip_prefix("error: ").unwrap_or(&text);
            eprint!("error[UsageError]: {text}");
            return CliError::Usage(String::new()).exit_code();
        }
    };
    let started = Instant::now();
    let name = cli.command.name();
    let result = load_config(&cli).and_then(|cfg| {
        if matches!(cli.command, Command::Selftest) {
            run_selftest(&cfg)
        } else {
            for path in execute(name, &cfg)? {
                println!("{}", path.display());
            }
            Ok(EXIT_OK)
        }
    });
    match result {
        Ok(code) => {
            eprintln!("selfsim {name}: wall_time_s={:.3}", started.elapsed().as_secs_f64());
            code
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}
