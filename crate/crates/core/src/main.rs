use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use zeno::cli::{self, Axis, Engine, RunOptions, Spacing, Status, SweepSpec};
use zeno::config::{Config, Resolved};
use zeno::ZenoError;

/// Jump probabilities of a driven system under repeated finite-duration
/// measurements (units with ħ = 1).
#[derive(Parser)]
#[command(name = "zeno", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    config: PathBuf,
    /// Comma-separated subset of perturbative,twolevel_closed,asymptotic,oracle.
    #[arg(long)]
    engines: Option<String>,
    /// Enable the exact oracle.
    #[arg(long)]
    oracle: bool,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario.
    Point {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a scenario along one parameter axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// T, tau, lambda or delta.
        #[arg(long)]
        axis: String,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        /// linear or log.
        #[arg(long, default_value = "linear")]
        spacing: String,
        /// Explicit comma-separated values, instead of from/to/count.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Survival after each of the N scheduled cycles.
    Cycles {
        /// Scenario file (TOML).
        config: PathBuf,
        /// Add the exact sequence.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> zeno::Result<(Config, Resolved)> {
    let (cfg, base) = Config::load(path)?;
    let res = cfg.resolve(&base)?;
    Ok((cfg, res))
}

fn output(path: &Option<PathBuf>) -> zeno::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| ZenoError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn engines(common: &Common, res: &Resolved, opts: &RunOptions) -> zeno::Result<Vec<Engine>> {
    let list = match &common.engines {
        Some(s) => {
            let mut list = cli::parse_engines(s)?;
            if common.oracle && !list.contains(&Engine::Oracle) {
                list.push(Engine::Oracle);
            }
            list
        }
        None => cli::default_engines(res, common.oracle),
    };
    cli::check_engines(&list, opts)?;
    Ok(list)
}

fn run(cli: Cli) -> zeno::Result<Status> {
    let mut opts = RunOptions::from_env()?;
    match cli.command {
        Command::Point { common } => {
            opts.allow_oracle = common.oracle;
            let (cfg, res) = load(&common.config)?;
            let engines = engines(&common, &res, &opts)?;
            let report = cli::run_point(&res, &engines, &opts);
            let mut out = output(&common.out)?;
            cli::write_table(&mut out, &cfg, None, &engines, std::slice::from_ref(&report))?;
            out.flush()?;
            for e in &report.engines {
                if let Err(err) = &e.result {
                    eprintln!("{}: {err}", e.engine);
                }
            }
            Ok(match cli::status_of(std::slice::from_ref(&report)) {
                Status::Ok => Status::Ok,
                _ if report.engines.iter().any(|e| e.result.is_ok()) => Status::Partial,
                s => s,
            })
        }
        Command::Sweep {
            common,
            axis,
            from,
            to,
            count,
            spacing,
            values,
            jobs,
        } => {
            opts.allow_oracle = common.oracle;
            let axis: Axis = axis.parse()?;
            let values = match (values, from, to, count) {
                (Some(v), None, None, None) => v,
                (None, Some(a), Some(b), Some(n)) => {
                    cli::axis_values(a, b, n, spacing.parse::<Spacing>()?)?
                }
                _ => {
                    return Err(ZenoError::config(
                        "sweep",
                        "give either --values or all of --from, --to, --count",
                    ))
                }
            };
            if jobs == 0 {
                return Err(ZenoError::config("jobs", "must be at least 1"));
            }
            let (cfg, res) = load(&common.config)?;
            let engines = engines(&common, &res, &opts)?;
            let spec = SweepSpec::new(axis, values, engines)?;
            let reports = cli::run_sweep(&res, &spec, &opts, jobs)?;
            let mut out = output(&common.out)?;
            cli::write_table(&mut out, &cfg, Some(axis), spec.engines(), &reports)?;
            out.flush()?;
            Ok(cli::status_of(&reports))
        }
        Command::Cycles {
            config,
            oracle,
            out,
        } => {
            opts.allow_oracle = oracle;
            let (cfg, res) = load(&config)?;
            let rows = cli::run_cycles(&res, &opts)?;
            let mut w = output(&out)?;
            cli::write_cycles(&mut w, &cfg, &rows)?;
            w.flush()?;
            Ok(Status::Ok)
        }
    }
}

fn main() -> ExitCode {
    // Usage errors are validation failures (1); clap's own default is 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let status = match run(cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            Status::of_error(&e)
        }
    };
    ExitCode::from(status.code() as u8)
}
