use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use chaingeom::collinearity::{census, classify_code, projection_code, CollinearityError};
use chaingeom::document::PosetDocument;
use chaingeom::metric::{
    collinear_config, dotprod_config, greedy_chains, grid_config, lattice_1p1, pythagoras_config, random_dag,
    sheared_grid_config, simplex_config,
};
use chaingeom::rational::parse_rational;
use chaingeom::verify::{run_suite, SuiteParams, SuiteReport, SUITES};
use chaingeom::ChainId;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "chaingeom", version, about = "Exact geometry read off posets of events")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated poset document.
    Generate(GenerateArgs),
    /// Projection codes of every event against two chains.
    Classify {
        file: PathBuf,
        chain_a: String,
        chain_b: String,
        /// json or csv
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        /// Suite names, or `all`.
        #[arg(required = true)]
        suites: Vec<String>,
        #[arg(long, default_value_t = 20)]
        max_leg: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// json or csv
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Re-emit a poset document as JSON or as a DOT Hasse diagram.
    Export {
        file: PathBuf,
        /// dot or json
        #[arg(long)]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// lattice1p1, simplex, collinear, grid, pythagoras, dotprod or randomdag
    kind: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    width: u32,
    #[arg(long, default_value_t = 40)]
    ticks: u32,
    #[arg(long, default_value_t = 3)]
    chains: usize,
    /// Chain spacing as `p/q`.
    #[arg(long, default_value = "1")]
    spacing: String,
    #[arg(long, default_value_t = 3)]
    rows: usize,
    #[arg(long, default_value_t = 3)]
    cols: usize,
    /// Column spacing of a grid.
    #[arg(long, default_value_t = 1)]
    s: i64,
    /// Row spacing of a grid.
    #[arg(long, default_value_t = 1)]
    r: i64,
    /// Rows at 60 degrees to columns.
    #[arg(long)]
    sheared: bool,
    #[arg(long, default_value_t = 3)]
    a: i64,
    #[arg(long, default_value_t = 4)]
    b: i64,
    #[arg(long, default_value_t = 20)]
    probe_time: i64,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shortest greedy chain kept for random DAGs.
    #[arg(long, default_value_t = 3)]
    min_chain: usize,
}

/// Usage or I/O problem; exit status 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate(&args).map(|_| true),
        Command::Classify { file, chain_a, chain_b, format } => classify(&file, &chain_a, &chain_b, &format),
        Command::Verify { suites, max_leg, seed, trials, format } => {
            verify(&suites, &SuiteParams { max_leg, seed, trials }, &format)
        }
        Command::Export { file, format, out } => export(&file, &format, out.as_deref()).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Usage> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn generate(g: &GenerateArgs) -> Result<(), Usage> {
    let spacing = parse_rational(&g.spacing)?;
    let doc = match g.kind.as_str() {
        "lattice1p1" => PosetDocument::from_layout(&lattice_1p1(g.width, g.ticks)?),
        "simplex" => PosetDocument::from_layout(&simplex_config(g.chains, &spacing, g.ticks)?),
        "collinear" => PosetDocument::from_layout(&collinear_config(g.chains, &spacing, g.ticks)?),
        "grid" if g.sheared => PosetDocument::from_layout(&sheared_grid_config(g.rows, g.cols, g.s, g.r, g.ticks)?),
        "grid" => PosetDocument::from_layout(&grid_config(g.rows, g.cols, g.s, g.r, g.ticks)?),
        "pythagoras" => PosetDocument::from_layout(&pythagoras_config(g.a, g.b, g.ticks)?),
        "dotprod" => PosetDocument::from_layout(&dotprod_config(g.a, g.b, g.ticks, g.probe_time)?),
        "randomdag" => {
            let p = random_dag(g.n, g.p, g.seed)?;
            PosetDocument::from_parts(&p, &greedy_chains(&p, g.min_chain))
        }
        other => return Err(Usage(format!("unknown generator `{other}`"))),
    };
    emit(&(doc.to_json() + "\n"), g.out.as_deref())
}

fn classify(file: &Path, a: &str, b: &str, format: &str) -> Result<bool, Usage> {
    if format != "json" && format != "csv" {
        return Err(Usage(format!("unknown format `{format}`")));
    }
    let start = Instant::now();
    let doc = PosetDocument::load(file)?;
    let inputs = json!({"file": file.display().to_string(), "chain_a": a, "chain_b": b});
    if doc.events.is_empty() {
        let report = json!({"check": "classify", "inputs": inputs, "events": [], "histogram": {},
            "summary": {"legal_codes_only": true}, "wall_time_ms": start.elapsed().as_millis()});
        return emit_classify(&report, "code,count\n", format);
    }
    let (poset, chains) = doc.build()?;
    let find = |id: &str| {
        chains.iter().find(|c| c.id() == &ChainId::new(id)).ok_or_else(|| Usage(format!("unknown chain `{id}`")))
    };
    let (p, q) = (find(a)?, find(b)?);
    if a == b {
        return Err(Usage(format!("identical chains `{a}`")));
    }
    let mut events = Vec::new();
    for &e in poset.events() {
        let row = match projection_code(&poset, e, p, q) {
            Ok(code) => json!({"event": e.0, "code": code.to_string(), "case": format!("{:?}", classify_code(&code))}),
            Err(CollinearityError::MissingProjection { .. }) => json!({"event": e.0, "code": null, "case": "Undefined"}),
            Err(err) => return Err(err.into()),
        };
        events.push(row);
    }
    let c = census(&poset, &[(p, q)]);
    let mut histogram: serde_json::Map<String, Value> =
        c.codes.iter().map(|(code, n)| (code.to_string(), json!(n))).collect();
    if c.missing > 0 {
        histogram.insert("undefined".into(), json!(c.missing));
    }
    let report = json!({
        "check": "classify",
        "inputs": inputs,
        "events": events,
        "histogram": histogram,
        "summary": {"legal_codes_only": c.legal_codes_only()},
        "wall_time_ms": start.elapsed().as_millis(),
    });
    emit_classify(&report, &c.to_csv(), format)
}

fn emit_classify(report: &Value, csv: &str, format: &str) -> Result<bool, Usage> {
    match format {
        "csv" => emit(csv, None)?,
        _ => emit(&(serde_json::to_string_pretty(report)? + "\n"), None)?,
    }
    Ok(true)
}

fn verify(names: &[String], params: &SuiteParams, format: &str) -> Result<bool, Usage> {
    if format != "json" && format != "csv" {
        return Err(Usage(format!("unknown format `{format}`")));
    }
    let start = Instant::now();
    let expanded: Vec<&str> = if names.iter().any(|n| n == "all") {
        SUITES.to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    let reports: Vec<SuiteReport> = expanded.iter().map(|n| run_suite(n, params)).collect::<Result<_, _>>()?;
    let pass = reports.iter().all(SuiteReport::pass);
    if format == "csv" {
        let mut s = String::from("suite,check,value,pass\n");
        for r in &reports {
            for c in &r.checks {
                s.push_str(&format!("{},{},{},{}\n", r.suite, c.check, c.value.as_deref().unwrap_or(""), c.pass));
            }
        }
        emit(&s, None)?;
    } else {
        let report = json!({
            "command": "verify",
            "inputs": {"suites": expanded, "max_leg": params.max_leg, "seed": params.seed, "trials": params.trials},
            "suites": reports,
            "pass": pass,
            "wall_time_ms": start.elapsed().as_millis(),
        });
        emit(&(serde_json::to_string_pretty(&report)? + "\n"), None)?;
    }
    Ok(pass)
}

fn export(file: &Path, format: &str, out: Option<&Path>) -> Result<(), Usage> {
    let doc = PosetDocument::load(file)?;
    let text = match format {
        "dot" => doc.to_dot(),
        "json" => {
            // rebuilding rejects documents that are not partial orders
            let (poset, chains) = doc.build()?;
            PosetDocument::from_parts(&poset, &chains).to_json() + "\n"
        }
        other => return Err(Usage(format!("unknown format `{other}`"))),
    };
    emit(&text, out)
}
