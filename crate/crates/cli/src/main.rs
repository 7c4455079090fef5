//! `specbound`: generate graphs, unravel them, and check spectral bounds.
//!
//! Exit codes: 0 all verdicts pass, 1 a verdict failed or a robustness
//! check was refuted, 2 bad input or unmet precondition, 3 resource cap or
//! numerical failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use specbound::bounds::{
    coro2_trend, verify_alon_boppana, verify_coro1, verify_hoory, verify_jiang, verify_lemma4, verify_norm_ab,
    verify_thm1, verify_thm2, verify_thm3, verify_young, BoundVerdict, TheoremId,
};
use specbound::cover::{unraveled_ball_with, NodeBudget};
use specbound::generate::{generate, generate_weights, GraphSpec, WeightSpec};
use specbound::graph::io::{parse_edge_list, write_edge_list, GraphDocument, SCHEMA_VERSION};
use specbound::prooflab::identity_suite;
use specbound::robustness::{
    check_robust, max_robust_params, BallMetric, RobustMode, RobustOptions, RobustnessCertificate,
};
use specbound::scalar::Rational;
use specbound::spectra::{adjacency_matrix, normalized_laplacian_spectrum, normalized_weights, spectral_radius, spectrum, weighted_adjacency};
use specbound::suite::{run_suite, SuiteSize};
use specbound::{EdgeWeights, Error, Graph, Result, VertexWeighting};

#[derive(Parser)]
#[command(name = "specbound", version, about = "Unraveled-ball spectral bounds, checked on concrete graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and print it
    Gen(GenArgs),
    /// Build the unraveled ball at a vertex
    Unravel(UnravelArgs),
    /// Full spectrum of one of the graph's matrices
    Spectrum(SpectrumArgs),
    /// Check one bound on one graph
    Bounds(BoundsArgs),
    /// Certify or refute robustness
    Robust(RobustArgs),
    /// Check the test-vector identities behind the weighted bound
    Prooflab(ProoflabArgs),
    /// Run the seeded property corpus
    Suite(SuiteArgs),
}

#[derive(Args)]
struct GraphInput {
    /// Generator spec (`cycle:6`, `gnp:10:0.5`, ...) or a path to an edge list or JSON document
    #[arg(long)]
    graph: String,
    /// Seed of random generators
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Condition `gnp` on connectivity
    #[arg(long)]
    connected: bool,
    /// Edge weights `uniform:lo:hi`, overriding any in the input
    #[arg(long)]
    weights: Option<String>,
}

struct Instance {
    graph: Graph,
    weights: Option<EdgeWeights>,
}

impl GraphInput {
    fn load(&self) -> Result<Instance> {
        let (graph, mut weights) = match self.graph.parse::<GraphSpec>() {
            Ok(mut spec) => {
                if let GraphSpec::Gnp { connected, .. } = &mut spec {
                    *connected = self.connected;
                }
                (generate(&spec, self.seed)?, None)
            }
            Err(spec_err) => {
                let path = PathBuf::from(&self.graph);
                if !path.exists() {
                    return Err(spec_err);
                }
                let text = fs::read_to_string(&path)?;
                if text.trim_start().starts_with('{') {
                    GraphDocument::from_json(&text)?.to_graph()?
                } else {
                    parse_edge_list(&text)?
                }
            }
        };
        if let Some(w) = &self.weights {
            weights = Some(generate_weights(&graph, &w.parse::<WeightSpec>()?, self.seed)?);
        }
        Ok(Instance { graph, weights })
    }
}

impl Instance {
    fn weights_or_unit(&self) -> EdgeWeights {
        self.weights.clone().unwrap_or_else(|| EdgeWeights::unit(&self.graph))
    }

    fn document(&self) -> GraphDocument {
        GraphDocument::new(&self.graph, self.weights.as_ref())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFormat {
    Json,
    Edges,
}

#[derive(Args)]
struct Output {
    /// Also write the report to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, value_enum, default_value_t = GenFormat::Json)]
    format: GenFormat,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct UnravelArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    v: usize,
    #[arg(long)]
    r: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixChoice {
    /// 0/1 adjacency
    Adjacency,
    /// Adjacency with the input edge weights
    Weighted,
    /// Adjacency with weights 1/√(d(u)d(v))
    Normalized,
    /// Normalized Laplacian, ascending
    Laplacian,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, value_enum, default_value_t = MatrixChoice::Adjacency)]
    matrix: MatrixChoice,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum VertexChoice {
    Ones,
    Degrees,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    input: GraphInput,
    /// 1, 2, 3, thm1, coro1, coro2-trend, thm3, lemma4, thm2, alon-boppana, jiang, hoory, young, normalized-alon-boppana
    #[arg(long)]
    thm: String,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Number of eigenvalues (lemma4, thm2)
    #[arg(long, default_value_t = 2)]
    s: usize,
    /// Absolute constant of hoory and young
    #[arg(long)]
    c: Option<f64>,
    /// Edge distance parameter of alon-boppana
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Vertex weighting of thm1
    #[arg(long, value_enum, default_value_t = VertexChoice::Ones)]
    g: VertexChoice,
    /// Required average degree (lemma4, thm2); tightest value when omitted
    #[arg(long)]
    d: Option<String>,
    /// Required second order average degree (lemma4, thm2)
    #[arg(long)]
    dtilde: Option<String>,
    /// Sample this many deletion sequences instead of enumerating them
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct RobustArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    r: usize,
    /// Number of ball deletions
    #[arg(long)]
    s: usize,
    /// Required average degree, e.g. `2` or `4/3`
    #[arg(long)]
    d: String,
    #[arg(long)]
    dtilde: String,
    /// Sample this many deletion sequences (seeded by `--seed`)
    #[arg(long)]
    trials: Option<u64>,
    /// Measure every ball in the input graph
    #[arg(long)]
    original_metric: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ProoflabArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long)]
    r: usize,
    #[arg(long, value_enum, default_value_t = VertexChoice::Ones)]
    g: VertexChoice,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum SizeChoice {
    Small,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteFormat {
    Table,
    Json,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = SizeChoice::Small)]
    size: SizeChoice,
    /// Flip the sign of one weight; the run must stop with an input error
    #[arg(long)]
    negative_control: bool,
    #[arg(long, value_enum, default_value_t = SuiteFormat::Table)]
    format: SuiteFormat,
    #[command(flatten)]
    output: Output,
}

/// Successful run: text for stdout and whether every verdict passed.
struct Outcome {
    text: String,
    pass: bool,
}

fn report<T: Serialize>(body: &T) -> String {
    serde_json::to_string_pretty(body).expect("reports always serialize")
}

fn emit(out: &Output, text: &str) -> Result<()> {
    if let Some(path) = &out.out {
        fs::write(path, format!("{text}\n"))?;
    }
    Ok(())
}

fn rational(text: &str, what: &str) -> Result<Rational> {
    text.trim()
        .parse()
        .map_err(|_| Error::Input(format!("{what} must be an integer or a fraction p/q, got {text:?}")))
}

fn vertex_weighting(g: &Graph, choice: VertexChoice) -> Result<VertexWeighting> {
    match choice {
        VertexChoice::Ones => Ok(VertexWeighting::ones(g)),
        VertexChoice::Degrees => VertexWeighting::degrees(g),
    }
}

fn run_gen(a: &GenArgs) -> Result<Outcome> {
    let inst = a.input.load()?;
    let text = match a.format {
        GenFormat::Json => inst.document().to_json(),
        GenFormat::Edges => write_edge_list(&inst.graph, inst.weights.as_ref()).trim_end().to_string(),
    };
    emit(&a.output, &text)?;
    Ok(Outcome { text, pass: true })
}

fn run_unravel(a: &UnravelArgs) -> Result<Outcome> {
    let inst = a.input.load()?;
    let w = inst.weights_or_unit();
    let ball = unraveled_ball_with(&inst.graph, &w, a.v, a.r, NodeBudget::from_env())?;
    let radius = spectral_radius(ball.tree(), ball.lifted_weights())?;
    let text = report(&json!({
        "schema": SCHEMA_VERSION,
        "command": "unravel",
        "v": a.v,
        "r": a.r,
        "spectral_radius": radius,
        "level_sizes": ball.level_sizes(),
        "tree": ball.to_document(),
        "instance": inst.document(),
    }));
    emit(&a.output, &text)?;
    Ok(Outcome { text, pass: true })
}

fn run_spectrum(a: &SpectrumArgs) -> Result<Outcome> {
    let inst = a.input.load()?;
    let g = &inst.graph;
    let spec = match a.matrix {
        MatrixChoice::Adjacency => spectrum(&adjacency_matrix::<f64>(g))?,
        MatrixChoice::Weighted => spectrum(&weighted_adjacency(g, &inst.weights_or_unit())?)?,
        MatrixChoice::Normalized => spectrum(&weighted_adjacency(g, &normalized_weights::<f64>(g))?)?,
        MatrixChoice::Laplacian => normalized_laplacian_spectrum::<f64>(g)?,
    };
    let text = report(&json!({
        "schema": SCHEMA_VERSION,
        "command": "spectrum",
        "spectrum": spec,
        "instance": inst.document(),
    }));
    emit(&a.output, &text)?;
    Ok(Outcome { text, pass: true })
}

fn parse_theorem(text: &str) -> Result<TheoremId> {
    let id = match text.trim() {
        "1" => "thm1",
        "2" => "thm2",
        "3" => "thm3",
        "norm-ab" => "normalized-alon-boppana",
        other => other,
    };
    serde_json::from_value(Value::String(id.to_string()))
        .map_err(|_| Error::Input(format!("unknown theorem {text:?}")))
}

fn certificate(inst: &Instance, a: &BoundsArgs) -> Result<RobustnessCertificate> {
    if a.s < 2 {
        return Err(Error::Input("lemma4 and thm2 need s ≥ 2".into()));
    }
    let g = &inst.graph;
    let (d, dtilde) = match (&a.d, &a.dtilde) {
        (Some(d), Some(dt)) => (rational(d, "--d")?, rational(dt, "--dtilde")?),
        (None, None) => {
            let p = max_robust_params(g, a.r, a.s - 1, RobustOptions::default())?;
            (p.d_max, p.dtilde_min.max(p.d_max))
        }
        _ => return Err(Error::Input("give both --d and --dtilde or neither".into())),
    };
    let mode = match a.trials {
        Some(trials) => RobustMode::Sampled { seed: a.input.seed, trials },
        None => RobustMode::Exhaustive,
    };
    check_robust(g, a.r, d, dtilde, a.s - 1, mode, RobustOptions::default())
}

fn need_c(c: Option<f64>) -> Result<f64> {
    c.ok_or_else(|| Error::Input("hoory and young need an explicit --c".into()))
}

fn run_bounds(a: &BoundsArgs) -> Result<Outcome> {
    let thm = parse_theorem(&a.thm)?;
    let inst = a.input.load()?;
    let g = &inst.graph;
    let mut extra = serde_json::Map::new();
    let verdict: BoundVerdict = match thm {
        TheoremId::Thm1 => {
            let gv = vertex_weighting(g, a.g)?;
            extra.insert("g".into(), json!(gv.values()));
            verify_thm1(g, &inst.weights_or_unit(), &gv, a.r)?
        }
        TheoremId::Coro1 => verify_coro1(g, a.r)?,
        TheoremId::Coro2Trend => {
            let trend = coro2_trend(g, a.r)?;
            extra.insert("points".into(), json!(trend.points));
            extra.insert("limit".into(), json!(trend.limit));
            trend.verdict
        }
        TheoremId::Thm3 => verify_thm3(g, a.r)?,
        TheoremId::Lemma4 | TheoremId::Thm2 => {
            let cert = certificate(&inst, a)?;
            if !cert.is_certified() {
                return Err(Error::Precondition(format!(
                    "the graph is not robust at the requested parameters; worst remainder {:?}",
                    cert.worst_remainder
                )));
            }
            let v = if thm == TheoremId::Lemma4 {
                verify_lemma4(g, a.r, a.s, &cert)?
            } else {
                verify_thm2(g, a.r, a.s, &cert)?
            };
            extra.insert("certificate".into(), serde_json::to_value(&cert)?);
            v
        }
        TheoremId::AlonBoppana => verify_alon_boppana(g, a.k)?,
        TheoremId::Jiang => verify_jiang(g, a.r)?,
        TheoremId::Hoory => verify_hoory(g, a.r, need_c(a.c)?)?,
        TheoremId::Young => verify_young(g, a.r, need_c(a.c)?)?,
        TheoremId::NormalizedAlonBoppana => verify_norm_ab(g)?,
    };
    let mut body = serde_json::Map::new();
    body.insert("schema".into(), json!(SCHEMA_VERSION));
    body.insert("command".into(), json!("bounds"));
    body.insert("verdict".into(), serde_json::to_value(&verdict)?);
    body.extend(extra);
    body.insert("instance".into(), serde_json::to_value(inst.document())?);
    let json_text = report(&body);
    let text = match a.format {
        Format::Json => json_text.clone(),
        Format::Csv => format!("{}\n{}", BoundVerdict::CSV_HEADER, verdict.csv_row()),
    };
    emit(&a.output, &json_text)?;
    Ok(Outcome { text, pass: verdict.gating_pass() })
}

fn run_robust(a: &RobustArgs) -> Result<Outcome> {
    let inst = a.input.load()?;
    let mode = match a.trials {
        Some(trials) => RobustMode::Sampled { seed: a.input.seed, trials },
        None => RobustMode::Exhaustive,
    };
    let opts = RobustOptions {
        metric: if a.original_metric { BallMetric::Original } else { BallMetric::Current },
        ..RobustOptions::default()
    };
    let cert = check_robust(
        &inst.graph,
        a.r,
        rational(&a.d, "--d")?,
        rational(&a.dtilde, "--dtilde")?,
        a.s,
        mode,
        opts,
    )?;
    let text = report(&json!({
        "schema": SCHEMA_VERSION,
        "command": "robust",
        "certificate": cert,
        "instance": inst.document(),
    }));
    emit(&a.output, &text)?;
    Ok(Outcome { text, pass: cert.is_certified() })
}

fn run_prooflab(a: &ProoflabArgs) -> Result<Outcome> {
    let inst = a.input.load()?;
    let gv = vertex_weighting(&inst.graph, a.g)?;
    let rep = identity_suite(&inst.graph, &inst.weights_or_unit(), &gv, a.r)?;
    let text = rep.to_json();
    emit(&a.output, &text)?;
    Ok(Outcome { text, pass: rep.all_pass() })
}

fn run_suite_cmd(a: &SuiteArgs) -> Result<Outcome> {
    let size = match a.size {
        SizeChoice::Small => SuiteSize::Small,
        SizeChoice::Full => SuiteSize::Full,
    };
    let rep = run_suite(a.seed, size, a.negative_control)?;
    let json_text = rep.to_json();
    emit(&a.output, &json_text)?;
    let mut text = match a.format {
        SuiteFormat::Table => rep.table(),
        SuiteFormat::Json => json_text,
    };
    if matches!(a.format, SuiteFormat::Table) {
        for row in rep.failures() {
            text.push_str(&format!("\nfailed {} margin {:e}", row.id, row.margin));
        }
    }
    Ok(Outcome { text, pass: rep.all_pass })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resource(_) | Error::Numeric { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Unravel(a) => run_unravel(a),
        Command::Spectrum(a) => run_spectrum(a),
        Command::Bounds(a) => run_bounds(a),
        Command::Robust(a) => run_robust(a),
        Command::Prooflab(a) => run_prooflab(a),
        Command::Suite(a) => run_suite_cmd(a),
    };
    match result {
        Ok(o) => {
            println!("{}", o.text);
            ExitCode::from(if o.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
