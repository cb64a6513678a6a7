//! `diffprobe`: probe corpus functions for differentiability at a point and
//! emit evidence-backed reports.
//!
//! Exit codes: 0 consistent / all-match, 2 refuted or mismatch,
//! 3 inconclusive, 64 usage error.

use std::io::Write;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use diffprobe_core::corpus::{block_corpus_list, complex_corpus_list, corpus_list};
use diffprobe_core::report::{
    emit_block_report, emit_report, parse_criteria, run_block_probe, run_corpus, run_probe,
    surface_csv, Combined, ReportFormat,
};
use diffprobe_core::{Error, ProbeConfig, RadialSchedule, Vector};

mod settings;

const EXIT_OK: u8 = 0;
const EXIT_REFUTED: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "diffprobe",
    version,
    about = "Numerical differentiability probes with evidence-backed verdicts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Config file with `key = value` lines (flags override it).
    #[arg(long, value_name = "FILE")]
    config: Option<String>,
    /// Initial probe radius.
    #[arg(long)]
    rho0: Option<f64>,
    /// Geometric decay factor in (0, 1).
    #[arg(long)]
    lambda: Option<f64>,
    /// Number of schedule radii.
    #[arg(long)]
    count: Option<usize>,
    /// Extra random unit directions beyond the signed axes.
    #[arg(long)]
    dirs: Option<usize>,
    /// Seed for direction and tuple sampling (default from DIFFPROBE_SEED).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Probe one function at a point with selected criteria.
    Probe {
        #[arg(long = "fn", value_name = "ID")]
        function: String,
        /// Probe point as comma-separated coordinates (defaults to the origin).
        #[arg(long)]
        point: Option<String>,
        /// Comma-separated criteria: cauchy_like, determinant, geo, relaxed, or `all`.
        #[arg(long, default_value = "all")]
        criteria: String,
        #[arg(long, default_value = "json")]
        format: String,
        /// Omit the timestamp for byte-stable output.
        #[arg(long)]
        no_timestamp: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Probe every corpus entry at the origin and compare against truth labels.
    Corpus {
        /// Also fail on any inconclusive criterion verdict.
        #[arg(long)]
        strict: bool,
        /// Emit the summary as JSON instead of text lines.
        #[arg(long, default_value = "text")]
        format: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Print the corpus catalog.
    List,
    /// Emit a gridded `x,y,f` CSV surface for a 2-dimensional function.
    Surface {
        #[arg(long = "fn", value_name = "ID")]
        function: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 1.0)]
        extent: f64,
    },
    /// Probe a block-structured function.
    BlockProbe {
        #[arg(long = "fn", value_name = "ID")]
        function: String,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        no_timestamp: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn parse_point(spec: &str) -> Result<Vector, Error> {
    let coords: Result<Vec<f64>, _> = spec.split(',').map(|s| f64::from_str(s.trim())).collect();
    let coords = coords.map_err(|e| Error::InvalidArgument(format!("bad point `{spec}`: {e}")))?;
    Vector::new(coords)
}

fn build_config(args: &ConfigArgs) -> Result<ProbeConfig, Error> {
    let mut cfg = ProbeConfig::default();

    if let Ok(seed) = std::env::var("DIFFPROBE_SEED") {
        cfg.seed = seed
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("DIFFPROBE_SEED=`{seed}` is not a u64")))?;
    }
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read config `{path}`: {e}")))?;
        settings::apply_config_text(&mut cfg, &text)?;
    }

    let schedule = RadialSchedule::new(
        args.rho0.unwrap_or(cfg.schedule.rho0),
        args.lambda.unwrap_or(cfg.schedule.lambda),
        args.count.unwrap_or(cfg.schedule.count),
    )?;
    cfg.schedule = schedule;
    if let Some(dirs) = args.dirs {
        cfg.extra_dirs = dirs;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn combined_exit(combined: Combined) -> u8 {
    match combined {
        Combined::Consistent => EXIT_OK,
        Combined::Refuted | Combined::Conflicting => EXIT_REFUTED,
        Combined::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn print(out: &str) {
    // A failed stdout write (closed pipe) must not panic.
    let _ = std::io::stdout().write_all(out.as_bytes());
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Probe {
            function,
            point,
            criteria,
            format,
            no_timestamp,
            config,
        } => {
            let cfg = build_config(&config)?;
            let kinds = parse_criteria(&criteria)?;
            let format = ReportFormat::from_str(&format)?;
            let point = point.as_deref().map(parse_point).transpose()?;
            let run = run_probe(&function, point, &kinds, &cfg, !no_timestamp)?;
            print(&emit_report(&run, format));
            for diag in &run.diagnostics {
                eprintln!("diagnostic: {diag}");
            }
            Ok(combined_exit(run.report.combined))
        }
        Command::Corpus {
            strict,
            format,
            config,
        } => {
            let cfg = build_config(&config)?;
            let summary = run_corpus(&cfg);
            match format.as_str() {
                "json" => {
                    let mut out =
                        serde_json::to_string_pretty(&summary).expect("summary serializes");
                    out.push('\n');
                    print(&out);
                }
                "text" => {
                    let mut out = String::new();
                    for e in &summary.entries {
                        out.push_str(&format!(
                            "{:<12} truth={:<18} combined={:<12} {}\n",
                            e.id,
                            e.truth.to_string(),
                            e.combined.to_string(),
                            if e.matched { "match" } else { "MISMATCH" }
                        ));
                    }
                    out.push_str(&format!("{}/{} matched\n", summary.matched, summary.total));
                    if strict && !summary.inconclusive.is_empty() {
                        out.push_str(&format!(
                            "strict: inconclusive criteria: {}\n",
                            summary.inconclusive.join(", ")
                        ));
                    }
                    print(&out);
                }
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unsupported corpus format `{other}`"
                    )))
                }
            }
            Ok(if summary.passes(strict) {
                EXIT_OK
            } else {
                EXIT_REFUTED
            })
        }
        Command::List => {
            let mut out = String::new();
            out.push_str("scalar corpus:\n");
            for f in corpus_list() {
                out.push_str(&format!(
                    "  {:<12} dim={} truth={:<18} {}\n    {}\n",
                    f.name,
                    f.dim,
                    f.truth.to_string(),
                    f.formula,
                    f.truth_note
                ));
            }
            out.push_str("\nblock corpus (R^2 x R^3 -> R^3):\n");
            for f in block_corpus_list() {
                out.push_str(&format!(
                    "  {:<16} truth={:<18} {}\n    {}\n",
                    f.name,
                    f.truth.to_string(),
                    f.formula,
                    f.truth_note
                ));
            }
            out.push_str("\ncomplex corpus:\n");
            for f in complex_corpus_list() {
                out.push_str(&format!(
                    "  {:<12} n={} {}\n    {}\n",
                    f.name, f.n, f.formula, f.truth_note
                ));
            }
            out.push_str(
                "\nnot implemented: x*y*D(x*y) with D the rational indicator; every \
                 machine float is rational, so numerically D == 1 and the function \
                 collapses to x*y.\n",
            );
            print(&out);
            Ok(EXIT_OK)
        }
        Command::Surface {
            function,
            grid,
            extent,
        } => {
            print(&surface_csv(&function, grid, extent)?);
            Ok(EXIT_OK)
        }
        Command::BlockProbe {
            function,
            format,
            no_timestamp,
            config,
        } => {
            let cfg = build_config(&config)?;
            let format = ReportFormat::from_str(&format)?;
            let run = run_block_probe(&function, &cfg, !no_timestamp)?;
            print(&emit_block_report(&run, format));
            Ok(combined_exit(run.report.combined))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = err.print();
                    return ExitCode::from(EXIT_OK);
                }
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
