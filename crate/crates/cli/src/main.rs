//! `stnet`: density, measure and convergence checks on net-spec documents,
//! and the seeded property suite.
//!
//! Exit codes: 0 accepted or passed, 1 rejected, failed or undetermined,
//! 2 usage, parse or I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stnet_core::index_measure::{density, DirectedSetMeasure, Schedule};
use stnet_core::lattice::Element;
use stnet_core::nets::{
    check_order_conv, check_st_order_conv, exceptional_set, ru_check, witness_search, NetError, SearchOutcome,
    Templates, DEFAULT_HORIZON,
};
use stnet_core::suite::{c0_example_report, run_all, SuiteConfig};
use stnet_core::syntax::{parse_element, parse_measure, parse_netspec, parse_set, parse_templates, NetSpec};
use stnet_core::verdict::Verdict;

#[derive(Parser)]
#[command(name = "stnet", version, about = "Statistical order convergence checks for nets in Riesz spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Claim {
    Order,
    St,
    Ru,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    #[value(alias = "structured")]
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Asymptotic density of a set expression.
    Density {
        set: String,
        /// Largest prefix length for sets without a closed form.
        #[arg(long, conflicts_with = "schedule")]
        horizon: Option<u64>,
        /// Comma-separated prefix lengths at which densities are sampled.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<u64>>,
    },
    /// Value of a named measure on a set expression.
    Measure {
        set: String,
        #[arg(long, default_value = "periodic-density")]
        measure: String,
    },
    /// Checks a convergence claim from a net-spec document.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        claim: Claim,
        /// Overrides the document's `measure`.
        #[arg(long)]
        measure: Option<String>,
        /// Regulator depth for `--claim ru`.
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: u64,
    },
    /// Searches dominating-net templates for a statistical witness.
    WitnessSearch {
        file: PathBuf,
        #[arg(long)]
        measure: Option<String>,
        /// `scales; ratios`, e.g. `1, 2, 4, 8; 1/2`.
        #[arg(long)]
        templates: Option<String>,
        /// Target limit. Defaults to the document's `st_limit`, then
        /// `order_limit`, then 0.
        #[arg(long)]
        limit: Option<String>,
    },
    /// Runs the seeded property suite.
    Suite {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Writes the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduces the interleaved-sequence example in c00.
    C0Report {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// Failure modes, mapped to exit codes.
enum Failure {
    /// Exit 1, message already printed.
    Rejected,
    /// Exit 1 with a message.
    Undetermined(String),
    /// Exit 2 with a message.
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn read_spec(path: &Path) -> Result<NetSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_netspec(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn pick_measure(flag: Option<&str>, spec: &NetSpec) -> Result<DirectedSetMeasure, Failure> {
    match (flag, &spec.measure) {
        (Some(name), _) => parse_measure(name).map_err(|e| usage(format!("--measure: {e}"))),
        (None, Some(m)) => Ok(m.clone()),
        (None, None) => Err(usage("no measure: pass --measure or add a `measure` line")),
    }
}

fn undetermined(e: NetError) -> Failure {
    Failure::Undetermined(e.to_string())
}

fn verdict(v: &Verdict) -> Outcome {
    println!("{v}");
    if v.accepted {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

/// The default schedule cut at `horizon`, which is always included.
fn schedule_up_to(horizon: u64) -> Schedule {
    let mut points: Vec<u64> = Schedule::default().points().iter().copied().filter(|&k| k < horizon).collect();
    points.push(horizon);
    Schedule::new(points)
}

fn cmd_density(set: &str, horizon: Option<u64>, schedule: Option<Vec<u64>>) -> Outcome {
    let s = parse_set(set).map_err(usage)?;
    let schedule = match (horizon, schedule) {
        (Some(0), _) => return Err(usage("--horizon must be at least 1")),
        (Some(h), _) => schedule_up_to(h),
        (None, Some(points)) => Schedule::new(points),
        (None, None) => Schedule::default(),
    };
    let v = density(&s, &schedule).map_err(usage)?;
    println!("{v}");
    Ok(())
}

fn cmd_measure(set: &str, measure: &str) -> Outcome {
    let s = parse_set(set).map_err(usage)?;
    let mu = parse_measure(measure).map_err(|e| usage(format!("--measure: {e}")))?;
    let v = mu.eval(&s).map_err(usage)?;
    println!("{v}");
    Ok(())
}

fn cmd_check(file: &Path, claim: Claim, measure: Option<&str>, horizon: u64) -> Outcome {
    let spec = read_spec(file)?;
    let net = &spec.net;
    match claim {
        Claim::Order => {
            let c = spec.order.as_ref().ok_or_else(|| usage("no order claim: add `order_limit` and `dominating`"))?;
            let v = check_order_conv(net, &c.limit, &c.dominating).map_err(undetermined)?;
            verdict(&v)
        }
        Claim::St => {
            let c = spec
                .st
                .as_ref()
                .ok_or_else(|| usage("no st claim: add `st_limit`, `witness_p` and `witness_delta`"))?;
            let mu = pick_measure(measure, &spec)?;
            println!("measure: {}", mu.name());
            let v = check_st_order_conv(net, &c.limit, &c.witness, &mu).map_err(undetermined)?;
            if !v.accepted {
                if let Ok(e) = exceptional_set(net, &c.limit, &c.witness.p) {
                    let m = mu.eval(&e).map(|m| m.to_string()).unwrap_or_else(|err| format!("error: {err}"));
                    println!("exceptional set against witness_p: {e}");
                    println!("  measure of the exceptional set: {m}");
                }
            }
            verdict(&v)
        }
        Claim::Ru => {
            let c = spec.ru.as_ref().ok_or_else(|| usage("no ru claim: add `ru_limit` and `ru_regulator`"))?;
            let v = ru_check(net, &c.limit, &c.regulator, horizon).map_err(undetermined)?;
            verdict(&v)
        }
    }
}

fn cmd_witness_search(file: &Path, measure: Option<&str>, templates: Option<&str>, limit: Option<&str>) -> Outcome {
    let spec = read_spec(file)?;
    let mu = pick_measure(measure, &spec)?;
    let templates = match templates {
        Some(t) => parse_templates(t).map_err(|e| usage(format!("--templates: {e}")))?,
        None => Templates::default(),
    };
    let space = spec.net.space();
    let x: Element = match limit {
        Some(l) => parse_element(l, space).map_err(|e| usage(format!("--limit: {e}")))?,
        None => spec
            .st
            .as_ref()
            .map(|c| c.limit.clone())
            .or_else(|| spec.order.as_ref().map(|c| c.limit.clone()))
            .unwrap_or_else(|| space.zero()),
    };
    match witness_search(&spec.net, &x, &mu, &templates).map_err(undetermined)? {
        SearchOutcome::Found { witness, .. } => {
            println!("st_limit: {x}");
            println!("witness_p: {}", witness.p);
            println!("witness_delta: {}", witness.delta);
            println!("measure: {}", mu.name());
            Ok(())
        }
        SearchOutcome::NotFound { tried } => {
            println!("NotFound (templates exhausted)");
            println!("  {tried} candidate pairs rejected under {}; this does not refute convergence", mu.name());
            Err(Failure::Rejected)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_suite(seed: u64, trials: usize, format: Format, out: Option<&Path>) -> Outcome {
    let config = SuiteConfig { seed, trials, ..SuiteConfig::default() };
    let report = run_all(&config).map_err(|e| Failure::Undetermined(e.to_string()))?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let text = match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    emit(&text, out)?;
    if report.status == stnet_core::suite::Status::Pass {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn cmd_c0_report(format: Format) -> Outcome {
    let report = c0_example_report(&SuiteConfig::default().measures);
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
    }
    if report.reproduced {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Density { set, horizon, schedule } => cmd_density(&set, horizon, schedule),
        Command::Measure { set, measure } => cmd_measure(&set, &measure),
        Command::Check { file, claim, measure, horizon } => cmd_check(&file, claim, measure.as_deref(), horizon),
        Command::WitnessSearch { file, measure, templates, limit } => {
            cmd_witness_search(&file, measure.as_deref(), templates.as_deref(), limit.as_deref())
        }
        Command::Suite { seed, trials, format, out } => cmd_suite(seed, trials, format, out.as_deref()),
        Command::C0Report { format } => cmd_c0_report(format),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected) => ExitCode::from(1),
        Err(Failure::Undetermined(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
