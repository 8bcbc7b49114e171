//! The `optomech-amp` command line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optomech_core::sweep::{Figure, SweepResult, SweepSpec};
use optomech_core::Error;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::parallel::{run_sweep_parallel, threads_from_env};
use crate::plot::gnuplot_script;
use crate::table::{write_csv, write_json};
use crate::{report, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "optomech-amp",
    version,
    about = "Nonreciprocal amplification in a driven two-cavity optomechanical system"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transmission, isolation and stability at one operating point.
    Transmit(PointArgs),
    /// Classical steady state of the pumped system (full-pipeline mode).
    Steady(PointArgs),
    /// Eigenvalues of the fluctuation drift matrix.
    Stability(PointArgs),
    /// Transmission over a 1D or 2D grid.
    Sweep(SweepArgs),
    /// Regenerate a figure preset: fig2a, fig2b, fig2c, fig3a, fig3b, fig4.
    Figure {
        name: String,
        #[command(flatten)]
        table: TableArgs,
    },
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, required_unless_present = "figure", conflicts_with = "figure")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub figure: Option<String>,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write a gnuplot script next to the CSV output.
    #[arg(long)]
    pub plot_script: bool,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if let CliError::Model(Error::NonUniqueSteadyState { branches }) = &err {
                for (k, b) in branches.iter().enumerate() {
                    eprintln!(
                        "  branch {k}: <a1> = {}, <a2> = {}, <b> = {}, Delta'_1 = {}, Delta'_2 = {}",
                        b.a1_avg, b.a2_avg, b.b_avg, b.delta_1_prime, b.delta_2_prime
                    );
                }
            }
            ExitCode::from(err.exit_code())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Transmit(args) => {
            let cfg = RunConfig::load(&args.config)?;
            let rep = report::transmit(&cfg)?;
            warn(&rep.warnings);
            emit_json(&rep, args.out.as_deref())
        }
        Command::Steady(args) => {
            let cfg = RunConfig::load(&args.config)?;
            let rep = report::steady(&cfg)?;
            warn(&rep.warnings);
            emit_json(&rep, args.out.as_deref())
        }
        Command::Stability(args) => {
            let cfg = RunConfig::load(&args.config)?;
            let rep = report::stability(&cfg)?;
            warn(&rep.warnings);
            emit_json(&rep, args.out.as_deref())
        }
        Command::Sweep(args) => match (&args.config, &args.figure) {
            (Some(path), _) => {
                let cfg = RunConfig::load(path)?;
                let spec = cfg.sweep_spec()?;
                let table = TableArgs {
                    out: args.table.out.or(cfg.output.path.clone()),
                    format: args.table.format.or(cfg.output.format),
                    plot_script: args.table.plot_script || cfg.output.plot_script,
                };
                sweep(&spec, cfg.unit_scale, &table)
            }
            (None, Some(name)) => figure(name, &args.table),
            (None, None) => Err(CliError::Config(
                "either --config or --figure is required".into(),
            )),
        },
        Command::Figure { name, table } => figure(&name, &table),
    }
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn figure(name: &str, table: &TableArgs) -> Result<(), CliError> {
    let fig: Figure = name.parse()?;
    sweep(&fig.spec(), 1.0, table)
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(io_error(path)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn infer_format(table: &TableArgs) -> Format {
    table.format.unwrap_or_else(|| match &table.out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => Format::Json,
        _ => Format::Csv,
    })
}

fn sweep(spec: &SweepSpec, unit_scale: f64, table: &TableArgs) -> Result<(), CliError> {
    let format = infer_format(table);
    if table.plot_script && (format != Format::Csv || table.out.is_none()) {
        return Err(CliError::Config(
            "a plot script needs CSV output written to a file (--out)".into(),
        ));
    }
    let result = run_sweep_parallel(spec, threads_from_env()?)?;
    let flagged = result.rows.iter().filter(|r| r.flag.code() != 0).count();
    if flagged > 0 {
        eprintln!("warning: {flagged} of {} points flagged", result.rows.len());
    }

    match &table.out {
        None => write_table(&result, unit_scale, format, io::stdout().lock())
            .map_err(io_error(Path::new("<stdout>"))),
        Some(path) => {
            let file = File::create(path).map_err(io_error(path))?;
            write_table(&result, unit_scale, format, BufWriter::new(file))
                .map_err(io_error(path))?;
            if table.plot_script {
                let csv_name = path.file_name().and_then(|n| n.to_str()).ok_or_else(|| {
                    CliError::Config(format!("unusable output path {}", path.display()))
                })?;
                let script = path.with_extension("gp");
                std::fs::write(&script, gnuplot_script(&result, csv_name))
                    .map_err(io_error(&script))?;
            }
            Ok(())
        }
    }
}

fn write_table<W: Write>(
    result: &SweepResult,
    unit_scale: f64,
    format: Format,
    w: W,
) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(result, unit_scale, w),
        Format::Json => write_json(result, unit_scale, w),
    }
}
