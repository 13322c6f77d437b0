//! `zecast`: rates, codes, confusion graphs, and simulations for
//! broadcast delivery of functions to receivers with side information.
//!
//! Instances come in as JSON files (see `instance`), results go out as
//! JSON on stdout (DOT for graphs). Exit codes: 0 success, 1 failed
//! verification, 2 invalid input, 3 size cap exceeded.

mod instance;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use instance::{load, Instance};
use zecast::codec::{
    binning_simulate, build_index_code, build_zero_error_code, verify_index_code,
    verify_zero_error, Codebook,
};
use zecast::confusion::{index_confusion_graph, is_compatible, n_instance_graph};
use zecast::graphs::to_dot;
use zecast::rates::{index_coding_rate, rate_report};
use zecast::Caps;

#[derive(Parser)]
#[command(
    name = "zecast",
    version,
    about = "Broadcast rates and zero-error codes for function delivery with side information"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    caps: CapArgs,
}

/// Overrides for the library's exact-search size caps. Defaults come
/// from `ZECAST_CAP_*` environment variables, then built-ins; every
/// override is clamped to a hard safety maximum.
#[derive(Args)]
struct CapArgs {
    /// Max vertices in block-graph powers.
    #[arg(long, global = true, value_name = "N")]
    cap_power_vertices: Option<usize>,
    /// Max vertices for maximal-independent-set enumeration.
    #[arg(long, global = true, value_name = "N")]
    cap_mis_vertices: Option<usize>,
    /// Max vertices for the exact minimum-entropy coloring search.
    #[arg(long, global = true, value_name = "N")]
    cap_exact_coloring_vertices: Option<usize>,
    /// Max vertices for the perfection check.
    #[arg(long, global = true, value_name = "N")]
    cap_perfection_vertices: Option<usize>,
    /// Max vertices for exact clique/chromatic searches.
    #[arg(long, global = true, value_name = "N")]
    cap_exact_search_vertices: Option<usize>,
    /// Max deterministic channels enumerated for the inner bound.
    #[arg(long, global = true, value_name = "N")]
    cap_deterministic_channels: Option<usize>,
    /// Max auxiliary codebook size for the covering simulator.
    #[arg(long, global = true, value_name = "N")]
    cap_codebook_sequences: Option<usize>,
}

fn effective_caps(args: &CapArgs) -> Caps {
    let mut caps = Caps::from_env();
    let clamp = |flag: &str, requested: usize, hard: usize| -> usize {
        if requested > hard {
            eprintln!("note: {flag} clamped to the safety maximum {hard}");
            hard
        } else {
            requested
        }
    };
    if let Some(v) = args.cap_power_vertices {
        caps.power_vertices = clamp("--cap-power-vertices", v, 4_000_000);
    }
    if let Some(v) = args.cap_mis_vertices {
        caps.mis_vertices = clamp("--cap-mis-vertices", v, 28);
    }
    if let Some(v) = args.cap_exact_coloring_vertices {
        caps.exact_coloring_vertices = clamp("--cap-exact-coloring-vertices", v, 20);
    }
    if let Some(v) = args.cap_perfection_vertices {
        caps.perfection_vertices = clamp("--cap-perfection-vertices", v, 14);
    }
    if let Some(v) = args.cap_exact_search_vertices {
        caps.exact_search_vertices = clamp("--cap-exact-search-vertices", v, 64);
    }
    if let Some(v) = args.cap_deterministic_channels {
        caps.deterministic_channels = clamp("--cap-deterministic-channels", v, 100_000_000);
    }
    if let Some(v) = args.cap_codebook_sequences {
        caps.codebook_sequences = clamp("--cap-codebook-sequences", v, 1 << 22);
    }
    caps
}

#[derive(Subcommand)]
enum Command {
    /// Print the full rate report for an instance as JSON.
    Rates { instance: PathBuf },
    /// Build a zero-error block code and write it as JSON.
    Code {
        instance: PathBuf,
        /// Block length.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Where to write the codebook JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustively check a codebook against its instance.
    Verify {
        codebook: PathBuf,
        instance: PathBuf,
    },
    /// Monte Carlo of the vanishing-error scheme at a fixed rate.
    Simulate {
        instance: PathBuf,
        #[arg(long, value_parser = ["binning"], default_value = "binning")]
        scheme: String,
        /// Bits per source symbol.
        #[arg(long)]
        rate: f64,
        /// Block length.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
    /// Export the n-instance confusion graph as DOT.
    Graph {
        instance: PathBuf,
        /// Block length.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = effective_caps(&cli.caps);
    match run(cli.command, &caps) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// 3 when a size cap was the problem, 2 (invalid input) otherwise.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(lib) = cause.downcast_ref::<zecast::Error>() {
            if matches!(lib, zecast::Error::CapExceeded { .. }) {
                return 3;
            }
        }
    }
    2
}

fn run(command: Command, caps: &Caps) -> Result<ExitCode> {
    match command {
        Command::Rates { instance } => cmd_rates(&instance, caps)?,
        Command::Code { instance, n, out } => cmd_code(&instance, n, &out, caps)?,
        Command::Verify { codebook, instance } => return cmd_verify(&codebook, &instance),
        Command::Simulate {
            instance,
            scheme: _,
            rate,
            n,
            trials,
            seed,
        } => cmd_simulate(&instance, rate, n, trials, seed, caps)?,
        Command::Graph { instance, n, dot } => cmd_graph(&instance, n, dot.as_deref(), caps)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn as_map(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(map) => map,
        _ => unreachable!("reports serialize as objects"),
    }
}

fn cmd_rates(path: &Path, caps: &Caps) -> Result<()> {
    match load(path)? {
        Instance::Pair { name, pmf, fp } => {
            let report = rate_report(&pmf, &fp, caps)?;
            let compatible = is_compatible(&pmf, &fp)?.is_some();
            let mut out = as_map(serde_json::to_value(&report)?);
            out.insert("kind".into(), json!("function-pair"));
            out.insert("compatible".into(), json!(compatible));
            if let Some(n) = name {
                out.insert("name".into(), json!(n));
            }
            println!("{}", serde_json::to_string_pretty(&Value::Object(out))?);
        }
        Instance::Index { name, inst } => {
            let rate = index_coding_rate(&inst)?;
            let mut out = Map::new();
            out.insert("kind".into(), json!("index-coding"));
            out.insert("optimal_rate".into(), json!(rate));
            out.insert("receivers_hold".into(), json!(inst.receivers()));
            if let Some(n) = name {
                out.insert("name".into(), json!(n));
            }
            println!("{}", serde_json::to_string_pretty(&Value::Object(out))?);
        }
    }
    Ok(())
}

fn cmd_code(path: &Path, n: usize, out: &Path, caps: &Caps) -> Result<()> {
    let cb = match load(path)? {
        Instance::Pair { pmf, fp, .. } => build_zero_error_code(&pmf, &fp, n, caps)?,
        Instance::Index { inst, .. } => build_index_code(&inst, n, caps)?,
    };
    let text = serde_json::to_string_pretty(&cb)?;
    fs::write(out, text + "\n")
        .with_context(|| format!("cannot write codebook to {}", out.display()))?;
    let summary = json!({
        "out": out.display().to_string(),
        "n": cb.n(),
        "blocks": cb.n_blocks(),
        "colors": cb.color_of().color_count(),
        "rate": cb.rate(),
        "kraft_sum": cb.kraft_sum(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn cmd_verify(codebook: &Path, instance: &Path) -> Result<ExitCode> {
    let text = fs::read_to_string(codebook)
        .with_context(|| format!("cannot read codebook file {}", codebook.display()))?;
    let cb: Codebook = serde_json::from_str(&text)
        .with_context(|| format!("{}: not a codebook file", codebook.display()))?;
    let (ok, counterexample) = match load(instance)? {
        Instance::Pair { pmf, fp, .. } => verify_zero_error(&cb, &pmf, &fp)?,
        Instance::Index { inst, .. } => verify_index_code(&cb, &inst)?,
    };
    if ok {
        println!("PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("FAIL {}", serde_json::to_string(&counterexample)?);
        Ok(ExitCode::from(1))
    }
}

fn cmd_simulate(
    path: &Path,
    rate: f64,
    n: usize,
    trials: usize,
    seed: u64,
    caps: &Caps,
) -> Result<()> {
    let Instance::Pair { pmf, fp, .. } = load(path)? else {
        bail!("simulate needs a two-source function-pair instance");
    };
    let outcome = binning_simulate(&pmf, &fp, rate, n, trials, seed, caps)?;
    println!("{}", serde_json::to_string_pretty(&outcome)?);
    Ok(())
}

fn cmd_graph(path: &Path, n: usize, dot: Option<&Path>, caps: &Caps) -> Result<()> {
    let g = match load(path)? {
        Instance::Pair { pmf, fp, .. } => n_instance_graph(&pmf, &fp, n, caps)?,
        Instance::Index { inst, .. } => index_confusion_graph(&inst, n, caps)?,
    };
    let text = to_dot(&g);
    match dot {
        Some(out) => fs::write(out, &text)
            .with_context(|| format!("cannot write DOT to {}", out.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
