//! `crux-subdiv` command-line front end.
//!
//! Every command prints a JSON report to stdout (or `--out FILE`). Exit codes:
//! 0 on success, 1 when a verification fails, 2 on usage or input errors.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crux_subdiv::crux::{crux_bounds, crux_exact, expansion_profile, np_gadget, ProfileOptions};
use crux_subdiv::expansion::{extract_robust_expander, CheckMode, CheckOptions, ExpanderParams};
use crux_subdiv::experiments::{
    experiment_bipartite_obstruction, experiment_dichotomy, experiment_jung, ExperimentReport, ObstructionHost,
};
use crux_subdiv::graph::{generate, parse_graph, serialize_graph};
use crux_subdiv::pipeline::{pipeline_find_subdivision, PipelineConfig};
use crux_subdiv::ratio::{format_rational, parse_rational};
use crux_subdiv::subdivision::{
    greedy_max_subdivision, max_subdivision_bruteforce, verify_subdivision, SubdivisionCertificate,
};
use crux_subdiv::{Graph, GraphSpec, Rational};

#[derive(Parser)]
#[command(name = "crux-subdiv", version, about = "Robust expanders, crux and clique-subdivision search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GraphInput {
    /// Graph recipe as JSON, e.g. '{"kind":"petersen"}'.
    #[arg(long, conflicts_with = "graph")]
    spec: Option<String>,
    /// Graph in edge-list text format.
    #[arg(long)]
    graph: Option<String>,
}

#[derive(Args, Clone)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum CruxModeArg {
    Exact,
    Bounded,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Pipeline,
    Greedy,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum HostArg {
    Random,
    Complete,
}

#[derive(Subcommand)]
enum Command {
    /// Print a generated graph in edge-list format.
    Gen {
        #[arg(long)]
        spec: String,
        #[command(flatten)]
        out: Output,
    },
    /// Basic statistics of a graph.
    Analyze {
        #[command(flatten)]
        input: GraphInput,
        #[command(flatten)]
        out: Output,
    },
    /// Extract a robust-expander subgraph.
    ExtractExpander {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Crux size (exact or bounded).
    Crux {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value = "1/100")]
        alpha: String,
        #[arg(long, value_enum, default_value = "bounded")]
        mode: CruxModeArg,
        #[command(flatten)]
        out: Output,
    },
    /// Small-set expansion profile.
    Profile {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Search for a large clique subdivision and print its certificate.
    FindSubdivision {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_enum, default_value = "pipeline")]
        method: Method,
        /// PipelineConfig JSON file.
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the pipeline trace (JSON lines) here.
        #[arg(long)]
        trace: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Check a subdivision certificate against a graph.
    Verify {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        cert: String,
        #[command(flatten)]
        out: Output,
    },
    /// Build the crux-hardness gadget of a graph.
    Gadget {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "1/2")]
        eps: String,
        /// Also write the gadget graph here.
        #[arg(long)]
        graph_out: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Run an experiment.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Subcommand)]
enum Experiment {
    /// Pipeline t on G(n, p) across p.
    Dichotomy {
        #[arg(long)]
        n: usize,
        /// Comma-separated edge probabilities.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<String>,
        /// Also write per-trial CSV here.
        #[arg(long)]
        csv: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// One copy of K_{a,a} versus many.
    Jung {
        #[arg(long)]
        a: usize,
        #[arg(long, default_value_t = 4)]
        copies: usize,
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        csv: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Dense bipartite t-sets in a sparse random host.
    Obstruction {
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "random")]
        host: HostArg,
        #[arg(long)]
        csv: Option<String>,
        #[command(flatten)]
        out: Output,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

type CmdResult = Result<Value, Failure>;

fn load_graph(input: &GraphInput) -> Result<Graph, Failure> {
    match (&input.spec, &input.graph) {
        (Some(spec), None) => {
            let spec = GraphSpec::from_json(spec).map_err(usage)?;
            generate(&spec).map_err(usage)
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
            parse_graph(&text).map_err(|e| usage(format!("{path}: {e}")))
        }
        _ => Err(usage("exactly one of --spec or --graph is required")),
    }
}

fn load_config(path: &Option<String>) -> Result<PipelineConfig, Failure> {
    match path {
        None => Ok(PipelineConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{p}: {e}")))?;
            PipelineConfig::from_json(&text).map_err(usage)
        }
    }
}

fn rational(text: &str) -> Result<Rational, Failure> {
    parse_rational(text).map_err(usage)
}

fn check_mode(mode: Option<Mode>) -> CheckMode {
    match mode {
        Some(Mode::Exact) => CheckMode::Exact,
        Some(Mode::Sampled) => CheckMode::Sampled,
        None => CheckMode::Auto,
    }
}

fn emit(text: &str, out: &Output) -> Result<(), Failure> {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{path}: {e}"))),
        None => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(usage(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn write_file(path: &Option<String>, text: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        fs::write(p, text).map_err(|e| usage(format!("{p}: {e}")))?;
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn analyze(g: &Graph) -> Value {
    let d = g.average_degree().ok();
    json!({
        "n": g.n(),
        "edges": g.edge_count(),
        "d": d.map(|d| format_rational(&d)),
        "d_approx": d.map(|d| *d.numer() as f64 / *d.denom() as f64),
        "min_degree": g.min_degree(),
        "max_degree": g.max_degree(),
        "components": g.components().len(),
        "regular": g.is_regular(),
    })
}

fn report(r: ExperimentReport, csv: &Option<String>) -> CmdResult {
    write_file(csv, &r.to_csv())?;
    Ok(to_value(&r))
}

fn run(command: Command) -> Result<(Value, Output), Failure> {
    Ok(match command {
        Command::Gen { spec, out } => {
            let spec = GraphSpec::from_json(&spec).map_err(usage)?;
            let g = generate(&spec).map_err(usage)?;
            emit(&serialize_graph(&g), &out)?;
            return Ok((Value::Null, Output { out: None }));
        }
        Command::Analyze { input, out } => (analyze(&load_graph(&input)?), out),
        Command::ExtractExpander { input, eps, k, mode, trials, seed, out } => {
            let g = load_graph(&input)?;
            let params = ExpanderParams::new(eps, k).map_err(usage)?;
            let opts = CheckOptions { mode: check_mode(mode), trials, seed, ..CheckOptions::default() };
            let x = extract_robust_expander(&g, &params, &opts).map_err(usage)?;
            let h = &x.subgraph.graph;
            let value = json!({
                "vertices": x.subgraph.to_parent,
                "n": h.n(),
                "edges": h.edge_count(),
                "d": h.average_degree().ok().map(|d| format_rational(&d)),
                "min_degree": h.min_degree(),
                "iterations": x.iterations,
                "witness": to_value(&x.witness),
            });
            (value, out)
        }
        Command::Crux { input, alpha, mode, out } => {
            let g = load_graph(&input)?;
            let alpha = rational(&alpha)?;
            let r = match mode {
                CruxModeArg::Exact => crux_exact(&g, alpha),
                CruxModeArg::Bounded => crux_bounds(&g, alpha),
            }
            .map_err(usage)?;
            (to_value(&r), out)
        }
        Command::Profile { input, delta, mode, trials, seed, out } => {
            let g = load_graph(&input)?;
            let opts = ProfileOptions { mode: check_mode(mode), trials, seed, ..ProfileOptions::default() };
            (to_value(&expansion_profile(&g, delta, &opts).map_err(usage)?), out)
        }
        Command::FindSubdivision { input, method, config, seed, trace, out } => {
            let g = load_graph(&input)?;
            let (cert, trace_text) = match method {
                Method::Pipeline => {
                    let mut cfg = load_config(&config)?;
                    if let Some(s) = seed {
                        cfg.seed = s;
                    }
                    let r = pipeline_find_subdivision(&g, &cfg).map_err(usage)?;
                    (r.certificate.clone(), Some(r.trace_jsonl()))
                }
                Method::Greedy => {
                    let c = greedy_max_subdivision(&g, usize::MAX, None).ok_or_else(|| usage("graph has no vertices"))?;
                    (c, None)
                }
                Method::Oracle => {
                    let r = max_subdivision_bruteforce(&g, usize::MAX).map_err(usage)?;
                    (r.certificate.ok_or_else(|| usage("graph has no vertices"))?, None)
                }
            };
            if let Some(text) = trace_text {
                write_file(&trace, &text)?;
            }
            let violations = verify_subdivision(&g, &cert);
            if !violations.is_empty() {
                return Err(Failure { code: 1, message: format!("internal error: certificate failed: {violations:?}") });
            }
            (json!({"t": cert.t, "certificate": to_value(&cert)}), out)
        }
        Command::Verify { input, cert, out } => {
            let g = load_graph(&input)?;
            let text = fs::read_to_string(&cert).map_err(|e| usage(format!("{cert}: {e}")))?;
            let c = SubdivisionCertificate::from_json(&text).map_err(usage)?;
            let violations = verify_subdivision(&g, &c);
            let value = json!({
                "valid": violations.is_empty(),
                "t": c.t,
                "violations": violations.iter().map(|v| json!({"detail": to_value(v), "message": v.to_string()})).collect::<Vec<_>>(),
            });
            if !violations.is_empty() {
                emit(&serde_json::to_string_pretty(&value).expect("json"), &out)?;
                let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                return Err(Failure { code: 1, message: format!("certificate invalid:\n{}", lines.join("\n")) });
            }
            (value, out)
        }
        Command::Gadget { input, k, eps, graph_out, out } => {
            let g = load_graph(&input)?;
            let gadget = np_gadget(&g, k, rational(&eps)?).map_err(usage)?;
            write_file(&graph_out, &serialize_graph(&gadget.graph))?;
            (to_value(&gadget.summary()), out)
        }
        Command::Experiment(e) => match e {
            Experiment::Dichotomy { n, p, trials, seed, config, csv, out } => {
                let cfg = load_config(&config)?;
                (report(experiment_dichotomy(n, &p, trials, seed, &cfg).map_err(usage)?, &csv)?, out)
            }
            Experiment::Jung { a, copies, config, csv, out } => {
                let cfg = load_config(&config)?;
                (report(experiment_jung(a, copies, &cfg).map_err(usage)?, &csv)?, out)
            }
            Experiment::Obstruction { t, c, seed, host, csv, out } => {
                let host = match host {
                    HostArg::Random => ObstructionHost::Random,
                    HostArg::Complete => ObstructionHost::Complete,
                };
                (report(experiment_bipartite_obstruction(t, c, seed, host).map_err(usage)?, &csv)?, out)
            }
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((Value::Null, _)) => ExitCode::SUCCESS,
        Ok((value, out)) => match emit(&serde_json::to_string_pretty(&value).expect("json"), &out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(f) => {
                eprintln!("error: {}", f.message);
                ExitCode::from(f.code)
            }
        },
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
