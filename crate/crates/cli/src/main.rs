use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use segstat::ripley::EdgeWeight;
use segstat::EdgeCorrection;
use segstat_cli::commands::{
    run_analysis, run_ripley, run_study, write_curves, AnalysisOptions, RipleyOptions, StudyOptions,
};
use segstat_cli::csv_io::{parse_points_csv, parse_region, ParsedPoints};
use segstat_cli::report::{render_analysis, render_study};
use segstat_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "segstat",
    version,
    about = "Nearest-neighbor contingency table tests of spatial segregation"
)]
struct Cli {
    /// Worker threads (default: SEGSTAT_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Correction {
    None,
    Toroidal,
    InnerBuffer,
    OuterBuffer,
}

#[derive(Clone, Copy, ValueEnum)]
enum Edge {
    None,
    Toroidal,
    OuterBuffer,
}

#[derive(Clone, Copy, ValueEnum)]
enum Weight {
    None,
    Translation,
}

#[derive(Subcommand)]
enum Command {
    /// NNCT, Q/R and segregation tests for a CSV of labeled points.
    Nnct {
        /// CSV with header x,y,class.
        input: PathBuf,
        /// Study region xmin,ymin,xmax,ymax (default: bounding box).
        #[arg(long)]
        region: Option<String>,
        #[arg(long, value_enum, default_value = "none")]
        correction: Correction,
        /// Inner buffer width = mean NN distance + k standard deviations.
        #[arg(long, default_value_t = 1)]
        buffer_k: u32,
        /// Core region xmin,ymin,xmax,ymax for the outer buffer.
        #[arg(long)]
        core_region: Option<String>,
        /// Replace Q and R by 0.63 n and 0.62 n in Dixon's moments.
        #[arg(long)]
        qr_adjust: bool,
        /// Relabelings for Monte Carlo randomization p-values.
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Empirical sizes of the tests under a null model.
    Simulate {
        #[arg(long)]
        null: String,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        nmc: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated test names, e.g. dixon-overall,pielou-overall.
        #[arg(long, value_delimiter = ',', default_value = "dixon-overall")]
        tests: Vec<String>,
        #[arg(long, value_enum, default_value = "none")]
        edge: Edge,
        /// Two tests, A,B: proportion of replications where both reject.
        #[arg(long)]
        agreement: Option<String>,
        /// Fixed locations for --null rl-file.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        region: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Univariate and bivariate L-function curves with CSR envelopes.
    Ripley {
        input: PathBuf,
        #[arg(long)]
        region: Option<String>,
        /// Largest distance (default: a quarter of the shorter region side).
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Simulations for the pointwise 95% envelope; 0 for none.
        #[arg(long, default_value_t = 99)]
        envelope_sims: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "none")]
        edge_weight: Weight,
        /// Directory for the curve CSV files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn read_points(path: &PathBuf, region: Option<&String>) -> CliResult<ParsedPoints> {
    let region = region.map(|r| parse_region(r)).transpose()?;
    let file = File::open(path).map_err(|e| CliError::Validation(format!("cannot open {}: {e}", path.display())))?;
    parse_points_csv(file, region)
}

fn emit<T: serde::Serialize>(format: Format, value: &T, text: impl FnOnce(&T) -> String) -> CliResult<()> {
    let mut out = io::stdout().lock();
    match format {
        Format::Text => out.write_all(text(value).as_bytes())?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, value)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Nnct {
            input,
            region,
            correction,
            buffer_k,
            core_region,
            qr_adjust,
            mc,
            seed,
            format,
        } => {
            let points = read_points(&input, region.as_ref())?;
            let opts = AnalysisOptions {
                correction: match correction {
                    Correction::None => EdgeCorrection::None,
                    Correction::Toroidal => EdgeCorrection::Toroidal,
                    Correction::InnerBuffer => EdgeCorrection::InnerBuffer,
                    Correction::OuterBuffer => EdgeCorrection::OuterBuffer,
                },
                buffer_k,
                core_region: core_region.map(|r| parse_region(&r)).transpose()?,
                qr_adjust,
                mc,
                seed,
            };
            let report = run_analysis(&points, &opts)?;
            emit(format, &report, render_analysis)
        }
        Command::Simulate {
            null,
            n1,
            n2,
            nmc,
            alpha,
            seed,
            tests,
            edge,
            agreement,
            input,
            region,
            format,
        } => {
            let locations = input.map(|p| read_points(&p, region.as_ref())).transpose()?;
            let agreement = match agreement {
                Some(s) => match s.split_once(',') {
                    Some((a, b)) => Some((a.to_string(), b.to_string())),
                    None => return Err(CliError::Validation("--agreement takes A,B".into())),
                },
                None => None,
            };
            let opts = StudyOptions {
                null,
                n1,
                n2,
                n_mc: nmc,
                alpha,
                seed,
                tests,
                edge: match edge {
                    Edge::None => EdgeCorrection::None,
                    Edge::Toroidal => EdgeCorrection::Toroidal,
                    Edge::OuterBuffer => EdgeCorrection::OuterBuffer,
                },
                agreement,
            };
            let report = run_study(&opts, locations.as_ref())?;
            emit(format, &report, render_study)
        }
        Command::Ripley {
            input,
            region,
            tmax,
            steps,
            envelope_sims,
            seed,
            edge_weight,
            out_dir,
        } => {
            let points = read_points(&input, region.as_ref())?;
            let opts = RipleyOptions {
                t_max: tmax,
                steps,
                envelope_sims,
                seed,
                weight: match edge_weight {
                    Weight::None => EdgeWeight::None,
                    Weight::Translation => EdgeWeight::Translation,
                },
            };
            let curves = run_ripley(&points, &opts)?;
            for path in write_curves(&out_dir, &curves)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn thread_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("SEGSTAT_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Validation(format!("SEGSTAT_THREADS='{v}' is not a number"))),
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = thread_count(cli.threads).and_then(|threads| match threads {
        Some(0) => Err(CliError::Validation("thread count must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Runtime(e.to_string()))?
            .install(|| run(cli.command)),
        None => run(cli.command),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
