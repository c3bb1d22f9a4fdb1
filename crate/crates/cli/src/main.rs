//! `bscope`: exact boundary computations on Cayley graphs, with replayable
//! JSON reports.
//!
//! Exit codes: 0 computed (fail verdicts included), 1 `verify` mismatch,
//! 2 usage or input error, 3 resource cap, 4 inconclusive at this horizon.

mod config;
mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use bscope_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use config::{
    parse_operand, parse_sample_arg, parse_samples_file, read_at, RunConfig, SampleInput,
};

#[derive(Parser)]
#[command(
    name = "bscope",
    version,
    about = "Gromov products, horofunctions and boundaries of Cayley graphs, computed exactly"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Group: `free:<k>`, `free:<k>:gens=<w1>,<w2>,..` or `zd:<d>:gens=(..),(..)`.
    #[arg(long, global = true, default_value = "free:2")]
    group: String,
    /// Window radius; chosen automatically from the inputs when omitted.
    #[arg(long, global = true)]
    radius: Option<u32>,
    /// Number of sample points taken from each ray.
    #[arg(long, global = true, default_value_t = 40)]
    horizon: u32,
    /// Divergence threshold M (integer or `p/q`).
    #[arg(long = "M", global = true)]
    threshold: Option<String>,
    #[arg(long, global = true, default_value = "1/2")]
    epsilon: String,
    /// Radius of the probe ball (default: min(radius, 6)).
    #[arg(long, global = true)]
    probe_radius: Option<u32>,
    /// Horofunction stabilization tolerance (integer metrics: exact).
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Recorded in the report; no current computation samples randomly.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Use the double-index Gromov relation `(a_n · b_k)`.
    #[arg(long, global = true)]
    double_index: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Default)]
struct SampleArgs {
    /// `label=<ray>`, `label=@table.json` or `label=points:p1;p2;..`.
    #[arg(long = "sample")]
    sample: Vec<String>,
    /// `@file.json` holding `[{"label", "points" | "ray"}, ..]`.
    #[arg(long = "samples")]
    samples: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// List the ball of radius R with norms.
    Ball,
    /// Minimal hyperbolicity constant of the ball of radius R.
    Delta,
    /// Gromov product (x · y), optionally based elsewhere.
    Product {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        base: Option<String>,
    },
    /// Horofunction φ_z(x) = d(x,e) - d(x,z).
    Horofn {
        #[arg(long)]
        z: String,
        #[arg(long)]
        x: String,
    },
    /// Classify a truncated ray against one clause.
    Classify {
        /// `free:<prefix>|<period>`, `lattice:offset=(..);dir=(..)` or `@table.json`.
        #[arg(long)]
        ray: String,
        #[arg(long, default_value = "geodesic")]
        clause: String,
    },
    /// Gromov equivalence certificate for two samples.
    Equiv(SampleArgs),
    /// Compare horofunction profiles of two samples.
    MetricEquiv(SampleArgs),
    /// Sphere point with a large horofunction along one sample.
    Witness {
        #[command(flatten)]
        samples: SampleArgs,
        #[arg(long = "N")]
        n_bound: String,
    },
    /// Pairwise Gromov certificates, classes and violations.
    Quotient(SampleArgs),
    /// Extended product of two points or samples.
    Extended {
        /// A point, or `label=<ray>` for a sample.
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Profile agreement radius and extended product of each sample with `--omega`.
    Continuity {
        #[command(flatten)]
        samples: SampleArgs,
        #[arg(long)]
        omega: String,
    },
    /// Translation defects of prefix-uniform means.
    MeanScan {
        /// Group elements; defaults to the generators and their inverses.
        #[arg(long = "gen", value_delimiter = ',')]
        gens: Vec<String>,
        #[arg(long = "ray")]
        rays: Vec<String>,
        #[arg(long = "n", value_delimiter = ',')]
        n_values: Vec<u32>,
        /// Use γ(0..n-1) instead of γ(1..n).
        #[arg(long)]
        inclusive: bool,
    },
    /// Recompute a report from its config echo and compare results.
    Verify {
        /// `@report.json` or a path.
        report: String,
    },
}

fn collect_samples(args: &SampleArgs) -> Result<Vec<SampleInput>, String> {
    let mut out = Vec::new();
    for f in &args.samples {
        out.extend(parse_samples_file(f)?);
    }
    for s in &args.sample {
        out.push(parse_sample_arg(s)?);
    }
    Ok(out)
}

fn resolve(common: &Common, command: &Command) -> Result<RunConfig, String> {
    let mut cfg = RunConfig {
        group: common.group.clone(),
        radius: common.radius,
        horizon: common.horizon,
        threshold: common.threshold.clone(),
        epsilon: Some(common.epsilon.clone()),
        probe_radius: common.probe_radius,
        tol: common.tol.clone(),
        seed: common.seed,
        format: match common.format {
            Format::Json => "json".into(),
            Format::Csv => "csv".into(),
        },
        double_index: common.double_index,
        ..RunConfig::default()
    };
    cfg.command = match command {
        Command::Ball => "ball",
        Command::Delta => "delta",
        Command::Product { x, y, base } => {
            cfg.points.insert("x".into(), x.clone());
            cfg.points.insert("y".into(), y.clone());
            if let Some(b) = base {
                cfg.points.insert("base".into(), b.clone());
            }
            "product"
        }
        Command::Horofn { z, x } => {
            cfg.points.insert("z".into(), z.clone());
            cfg.points.insert("x".into(), x.clone());
            "horofn"
        }
        Command::Classify { ray, clause } => {
            let body = ray.strip_prefix("ray=").unwrap_or(ray);
            cfg.ray = Some(parse_sample_arg(&format!("ray={body}"))?);
            cfg.clause = Some(clause.clone());
            "classify"
        }
        Command::Equiv(s) => {
            cfg.samples = collect_samples(s)?;
            "equiv"
        }
        Command::MetricEquiv(s) => {
            cfg.samples = collect_samples(s)?;
            "metric-equiv"
        }
        Command::Witness { samples, n_bound } => {
            cfg.samples = collect_samples(samples)?;
            cfg.n_bound = Some(n_bound.clone());
            "witness"
        }
        Command::Quotient(s) => {
            cfg.samples = collect_samples(s)?;
            "quotient"
        }
        Command::Extended { a, b } => {
            cfg.operands = vec![parse_operand(a)?, parse_operand(b)?];
            "extended"
        }
        Command::Continuity { samples, omega } => {
            cfg.samples = collect_samples(samples)?;
            cfg.omega = Some(parse_sample_arg(omega)?);
            "continuity"
        }
        Command::MeanScan {
            gens,
            rays,
            n_values,
            inclusive,
        } => {
            cfg.gens = gens.clone();
            cfg.rays = rays.clone();
            cfg.n_values = n_values.clone();
            cfg.inclusive = *inclusive;
            "mean-scan"
        }
        Command::Verify { .. } => unreachable!("verify has no run config"),
    }
    .to_string();
    if cfg.horizon == 0 {
        return Err("--horizon must be positive".into());
    }
    Ok(cfg)
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::ResourceCap { .. } => 3,
        Error::Inconclusive(_) => 4,
        _ => 2,
    }
}

fn emit(out: Option<&std::path::Path>, text: &str) -> ExitCode {
    match report::write_output(out, text) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bscope: cannot write output: {e}");
            ExitCode::from(2)
        }
    }
}

fn verify(arg: &str) -> ExitCode {
    let path = arg.strip_prefix('@').unwrap_or(arg);
    let parsed = read_at(&format!("@{path}")).and_then(|t| {
        serde_json::from_str::<serde_json::Value>(&t).map_err(|e| format!("{path}: {e}"))
    });
    let stored = match parsed {
        Ok(v) => v,
        Err(e) => {
            eprintln!("bscope: {e}");
            return ExitCode::from(2);
        }
    };
    if stored["schema"] != report::SCHEMA {
        eprintln!("bscope: {path} is not a {} report", report::SCHEMA);
        return ExitCode::from(2);
    }
    let cfg: RunConfig = match serde_json::from_value(stored["config"].clone()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("bscope: bad config echo in {path}: {e}");
            return ExitCode::from(2);
        }
    };
    let fresh = match run::execute(&cfg) {
        Ok(o) => o.result,
        Err(Error::Inconclusive(msg)) => json!({"inconclusive": msg}),
        Err(e) => {
            eprintln!("bscope: rerun failed: {e}");
            return ExitCode::from(error_code(&e));
        }
    };
    if fresh == stored["result"] && stored["version"] == env!("CARGO_PKG_VERSION") {
        println!("verified: {} report reproduces exactly", cfg.command);
        ExitCode::SUCCESS
    } else {
        println!(
            "mismatch: recomputed {} result differs from {path}",
            cfg.command
        );
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Verify { report } = &cli.command {
        return verify(report);
    }
    let cfg = match resolve(&cli.common, &cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("bscope: {e}");
            return ExitCode::from(2);
        }
    };
    let out = cli.common.out.as_deref();
    match run::execute(&cfg) {
        Ok(outcome) => {
            let text = match (&outcome.csv, cli.common.format) {
                (Some(csv), Format::Csv) => csv.clone(),
                _ => {
                    let status = if outcome.inconclusive {
                        "inconclusive"
                    } else {
                        "computed"
                    };
                    let r = report::envelope(&cfg, outcome.result, status);
                    serde_json::to_string_pretty(&r).expect("reports serialize") + "\n"
                }
            };
            let code = emit(out, &text);
            if code == ExitCode::SUCCESS && outcome.inconclusive {
                ExitCode::from(4)
            } else {
                code
            }
        }
        Err(Error::Inconclusive(msg)) => {
            eprintln!("bscope: inconclusive: {msg}");
            let r = report::envelope(&cfg, json!({"inconclusive": msg}), "inconclusive");
            let code = emit(
                out,
                &(serde_json::to_string_pretty(&r).expect("reports serialize") + "\n"),
            );
            if code == ExitCode::SUCCESS {
                ExitCode::from(4)
            } else {
                code
            }
        }
        Err(e) => {
            eprintln!("bscope: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
