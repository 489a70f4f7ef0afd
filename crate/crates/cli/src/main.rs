mod commands;
mod config;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use cdlab::harness::MeasureKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{as_set, load_config, output_dir, parse_list, resolve, CommandName, MeasureSource, Preset, RunConfig};

/// Christoffel–Darboux kernel measure laboratory.
///
/// Exit status: 0 when every row passes, 2 on a bound violation or a failed
/// numerical check, 1 on usage or configuration errors.
#[derive(Parser)]
#[command(name = "cdlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Circle moment gap against 2k/(n+1).
    VerifyCircle(RunArgs),
    /// Real-line moment gap and its O(1/n) rate.
    VerifyReal(RunArgs),
    /// Zeros of p_n (with Christoffel weights on the line).
    Zeros(RunArgs),
    /// Prüfer phase identities.
    Prufer(RunArgs),
    /// Moments of the second-kind measure rho_n against those of mu.
    Rho(RunArgs),
    /// Trigonometric moments of the Bernstein–Szegő approximants.
    BernsteinSzego(RunArgs),
    /// Balayage of mu_n and nu_(n+1) onto |z| = R.
    Corollary(RunArgs),
    /// Run the built-in example checks.
    Selftest,
    /// Run a JSON config file (e.g. a previous run.json).
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Circle,
    Real,
}

#[derive(Args)]
struct RunArgs {
    /// Normalized arclength measure on the unit circle.
    #[arg(long, group = "measure")]
    uniform: bool,
    /// Arcsine law on [-1, 1].
    #[arg(long, group = "measure")]
    chebyshev: bool,
    /// Uniform measure on [-1, 1].
    #[arg(long, group = "measure")]
    legendre: bool,
    /// Measure spec as a JSON file.
    #[arg(long, group = "measure", value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Seeded random measure (see --size, --seed).
    #[arg(long, group = "measure")]
    random: Option<KindArg>,
    #[arg(long, requires = "random")]
    size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Degrees, e.g. `5..50`, `10..200:10` or `10,20,50`.
    #[arg(long, value_parser = parse_ints)]
    n: Option<IntList>,
    /// Moment orders (or ℓ for `rho`), same syntax as --n.
    #[arg(long, value_parser = parse_ints)]
    k: Option<IntList>,
    /// Balayage radius for `corollary`.
    #[arg(long)]
    radius: Option<f64>,
    /// Grid size for `prufer`.
    #[arg(long)]
    points: Option<usize>,
    /// Output directory (overrides $CDLAB_OUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// One `--n`/`--k` value; a newtype so clap keeps it a single argument.
#[derive(Clone)]
struct IntList(Vec<usize>);

fn parse_ints(text: &str) -> Result<IntList, String> {
    parse_list(text).map(IntList)
}

impl RunArgs {
    fn into_config(self, command: CommandName) -> Result<(RunConfig, Option<PathBuf>), String> {
        let n = self.n.map_or_else(|| crate::config::NRange::default().values(), |l| l.0);
        let k = self.k.map_or_else(|| vec![1, 2, 3, 4], |l| l.0);
        let measure = if self.uniform {
            MeasureSource::Preset(Preset::Uniform)
        } else if self.chebyshev {
            MeasureSource::Preset(Preset::Chebyshev)
        } else if self.legendre {
            MeasureSource::Preset(Preset::Legendre)
        } else if let Some(path) = self.spec {
            MeasureSource::File(path)
        } else if let Some(kind) = self.random {
            let kind = match kind {
                KindArg::Circle => MeasureKind::Circle,
                KindArg::Real => MeasureKind::Real,
            };
            let n_max = n.iter().max().copied().unwrap_or(0);
            let k_max = k.iter().max().copied().unwrap_or(0);
            let size = self.size.unwrap_or(match kind {
                MeasureKind::Circle => n_max + k_max + 1,
                MeasureKind::Real => 200.max(n_max + 2),
            });
            MeasureSource::Random {
                kind,
                size,
                seed: self.seed.unwrap_or(42),
            }
        } else {
            return Err("no measure given (use --uniform, --chebyshev, --legendre, --spec FILE or --random KIND)".into());
        };
        let mut cfg = RunConfig::new(command, measure);
        cfg.n = as_set(n);
        cfg.k = k;
        cfg.radius = self.radius;
        cfg.seed = self.seed;
        if let Some(p) = self.points {
            cfg.points = p;
        }
        Ok((cfg, self.out))
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("cdlab: {msg}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let parsed = match cli.command {
        Cmd::Selftest => return if selftest::run() { ExitCode::SUCCESS } else { ExitCode::from(2) },
        Cmd::Run { config, out } => load_config(&config).map(|c| (c, out)).map_err(|e| e.to_string()),
        Cmd::VerifyCircle(a) => a.into_config(CommandName::VerifyCircle),
        Cmd::VerifyReal(a) => a.into_config(CommandName::VerifyReal),
        Cmd::Zeros(a) => a.into_config(CommandName::Zeros),
        Cmd::Prufer(a) => a.into_config(CommandName::Prufer),
        Cmd::Rho(a) => a.into_config(CommandName::Rho),
        Cmd::BernsteinSzego(a) => a.into_config(CommandName::BernsteinSzego),
        Cmd::Corollary(a) => a.into_config(CommandName::Corollary),
    };
    let (config, out_flag) = match parsed {
        Ok(p) => p,
        Err(e) => return usage_error(e),
    };
    let out = output_dir(out_flag.as_deref(), config.out_dir.as_deref());
    let resolved = match resolve(config) {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };
    let name = resolved.config.command.as_str();
    match commands::execute(&resolved, &out) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{name}: {line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(commands::RunError::Io { path, source }) => usage_error(format!("writing {}: {source}", path.display())),
        Err(e) => {
            eprintln!("cdlab {name}: {e}");
            ExitCode::from(2)
        }
    }
}
