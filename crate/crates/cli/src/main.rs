//! `icnc`: bounds, transforms, classification and code construction for
//! index coding instances given as `.sig` files.
//!
//! Exit codes: 0 success, 1 any other failure (including a code that fails
//! `verify`), 2 unreadable input or bad usage, 3 a search cap was hit.
//!
//! DOT output (`--format dot`) is available for `transform` and `gen`. It
//! is a `digraph G { ... }` block listing every vertex on its own line as
//! `"label";` followed by one `"a" -> "b";` line per edge. Network dumps add
//! attributes: sources are `shape=box`, receivers `shape=doublecircle`,
//! coding edges `style=solid` and forwarding edges `style=dashed`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use icnc::caps::{CapExceeded, Caps};
use icnc::classifier::{classify, generator, ClassReport, ClassifyError, Reduced, Style};
use icnc::duality::dualize_to_index_code;
use icnc::linalg::BinMatrix;
use icnc::netcode::{CodeDump, NetworkCode};
use icnc::sideinfo::{bounds, min_feedback_vertex_sets, BoundsError, BoundsReport, SIGraph};
use icnc::solver::{solve, verify, SolveError, SolveResult, VerifyReport};
use icnc::transform::NCNetwork;

#[derive(Parser, Debug)]
#[command(name = "icnc", version, about = "Index coding via multiple-unicast network codes over GF(2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Path enumeration limit per query.
    #[arg(long, global = true, value_parser = positive)]
    path_limit: Option<usize>,
    /// Cycle enumeration limit.
    #[arg(long, global = true, value_parser = positive)]
    cycle_limit: Option<usize>,
    /// Largest n for the exhaustive minrank search.
    #[arg(long, global = true, value_parser = positive)]
    minrank_max_n: Option<usize>,
    /// Output format. Defaults to json, except `gen` which writes `.sig` text.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// MAIS, feedback vertex number, cycle packing number and binary minrank.
    Bounds { input: PathBuf },
    /// Build the multiple-unicast network for a source set.
    Transform {
        input: PathBuf,
        /// Comma-separated source vertices. Defaults to the lexicographically
        /// first minimum feedback vertex set.
        #[arg(long, value_delimiter = ',')]
        vtau: Option<Vec<usize>>,
    },
    /// Classify a feedback-vertex-number-3 instance.
    Classify { input: PathBuf },
    /// Construct an index code.
    Solve { input: PathBuf },
    /// Check an index code against an instance.
    Verify {
        input: PathBuf,
        /// JSON file: `solve` output, a list of row bitstrings,
        /// `{"cols": n, "rows": [...]}`, or a network code dump.
        code: PathBuf,
    },
    /// Write an instance of a final configuration.
    Gen {
        #[arg(value_parser = parse_style, required_unless_present = "fixture")]
        style: Option<Style>,
        #[arg(value_parser = parse_reduced, required_unless_present = "fixture")]
        reduced: Option<Reduced>,
        /// Random variant from this seed instead of the canonical instance.
        #[arg(long)]
        seed: Option<u64>,
        /// A fixed test instance instead.
        #[arg(long, value_enum, conflicts_with_all = ["style", "reduced", "seed"])]
        fixture: Option<Fixture>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Fixture {
    Decomposable,
    Illegitimate10,
    Illegitimate12,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_style(s: &str) -> Result<Style, String> {
    match s {
        "A" | "a" => Ok(Style::A),
        "B" | "b" => Ok(Style::B),
        _ => Err(format!("unknown style {s:?}, expected A or B")),
    }
}

fn parse_reduced(s: &str) -> Result<Reduced, String> {
    Reduced::parse(s).ok_or_else(|| format!("unknown configuration {s:?}, expected S21..S24"))
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: error.into() }
    }

    fn cap(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 3, error: error.into() }
    }

    fn other(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 1, error: error.into() }
    }
}

impl From<CapExceeded> for Failure {
    fn from(e: CapExceeded) -> Self {
        Failure::cap(e)
    }
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        Failure::cap(e)
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Cap(_) => Failure::cap(e),
            ClassifyError::Transform(_) => Failure::usage(e),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Cap(_) | SolveError::Classify(ClassifyError::Cap(_)) => Failure::cap(e),
            SolveError::Linalg(_) => Failure::usage(e),
            _ => Failure::other(e),
        }
    }
}

type Outcome = Result<(String, u8), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = run(&cli).and_then(|(text, code)| {
        emit(cli.common.output.as_deref(), &text).map_err(Failure::other)?;
        Ok(code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn caps(c: &Common) -> Caps {
    let mut caps = Caps::default();
    if let Some(v) = c.path_limit {
        caps.path_limit = v;
    }
    if let Some(v) = c.cycle_limit {
        caps.cycle_limit = v;
    }
    if let Some(v) = c.minrank_max_n {
        caps.minrank_max_n = v;
    }
    caps
}

fn run(cli: &Cli) -> Outcome {
    let caps = caps(&cli.common);
    let format = cli.common.format;
    match &cli.command {
        Command::Bounds { input } => {
            let report = bounds(&read_sig(input)?, &caps)?;
            Ok((render(format, &report, bounds_text)?, 0))
        }
        Command::Transform { input, vtau } => {
            let g = read_sig(input)?;
            let vtau = match vtau {
                Some(v) => v.clone(),
                None => min_feedback_vertex_sets(&g, &caps)?.sets.swap_remove(0),
            };
            let net = NCNetwork::build(&g, &vtau).map_err(Failure::usage)?;
            let out = match format {
                Some(Format::Dot) => net.to_dot(),
                Some(Format::Text) => transform_text(&net),
                _ => json(&net.dump())?,
            };
            Ok((out, 0))
        }
        Command::Classify { input } => {
            let report = classify(&read_sig(input)?, &caps)?;
            Ok((render(format, &report, classify_text)?, 0))
        }
        Command::Solve { input } => {
            let result = solve(&read_sig(input)?, &caps)?;
            Ok((render(format, &result, solve_text)?, 0))
        }
        Command::Verify { input, code } => {
            let g = read_sig(input)?;
            let b = read_code(&g, code)?;
            let report = verify(&g, &b, &caps)?;
            let status = if report.valid { 0 } else { 1 };
            Ok((render(format, &report, verify_text)?, status))
        }
        Command::Gen { style, reduced, seed, fixture } => {
            let g = match (fixture, style, reduced) {
                (Some(Fixture::Decomposable), _, _) => generator::decomposable_fixture(),
                (Some(Fixture::Illegitimate10), _, _) => generator::illegitimate_fixture(10).expect("fixture 10"),
                (Some(Fixture::Illegitimate12), _, _) => generator::illegitimate_fixture(12).expect("fixture 12"),
                (None, Some(s), Some(r)) => match seed {
                    Some(seed) => generator::variants(*s, *r, 1, *seed).remove(0),
                    None => generator::canonical_instance(*s, *r),
                },
                _ => return Err(Failure::usage(anyhow!("gen needs a style and a configuration"))),
            };
            let out = match format {
                None | Some(Format::Text) => g.to_sig(),
                Some(Format::Dot) => g.digraph().to_dot(),
                Some(Format::Json) => json(&SigJson { n: g.n(), edges: g.edges().map(|(a, b)| [a, b]).collect() })?,
            };
            Ok((out, 0))
        }
    }
}

#[derive(Serialize)]
struct SigJson {
    n: usize,
    /// `[j, i]`: receiver `i` holds message `j`.
    edges: Vec<[usize; 2]>,
}

fn read_sig(path: &Path) -> Result<SIGraph, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::usage)?;
    text.parse::<SIGraph>()
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::usage)
}

/// Reads any of the accepted code shapes and returns the index code matrix.
fn read_code(g: &SIGraph, path: &Path) -> Result<BinMatrix, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::usage)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::usage)?;
    let rows = |v: &serde_json::Value| -> Result<BinMatrix, Failure> {
        let rows: Vec<String> = serde_json::from_value(v.clone()).map_err(Failure::usage)?;
        let rows: Vec<&str> = rows.iter().map(String::as_str).collect();
        BinMatrix::parse_rows(g.n(), &rows).map_err(Failure::usage)
    };
    let b = if value.is_array() {
        rows(&value)?
    } else if let Some(r) = value.get("code_rows") {
        rows(r)?
    } else if value.get("cols").is_some() {
        serde_json::from_value::<BinMatrix>(value).map_err(Failure::usage)?
    } else if value.get("edges").is_some() {
        let dump: CodeDump = serde_json::from_value(value).map_err(Failure::usage)?;
        let net = Arc::new(NCNetwork::build(g, &dump.vtau).map_err(Failure::usage)?);
        let code = NetworkCode::from_dump(net, &dump).map_err(Failure::other)?;
        let a = code.extract_a_matrix().map_err(Failure::other)?;
        dualize_to_index_code(g, &a).map_err(Failure::other)?
    } else {
        return Err(Failure::usage(anyhow!("{}: unrecognized code format", path.display())));
    };
    if b.cols() != g.n() {
        return Err(Failure::usage(anyhow!("code has {} columns, instance has n = {}", b.cols(), g.n())));
    }
    Ok(b)
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(Failure::other)?;
    s.push('\n');
    Ok(s)
}

fn render<T: Serialize>(format: Option<Format>, value: &T, text: fn(&T) -> String) -> Result<String, Failure> {
    match format {
        None | Some(Format::Json) => json(value),
        Some(Format::Text) => Ok(text(value)),
        Some(Format::Dot) => Err(Failure::usage(anyhow!("dot output is only available for graphs"))),
    }
}

/// Writes the whole output at once; files go through a temporary sibling
/// and a rename.
fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
        Some(p) => {
            let mut tmp = p.as_os_str().to_owned();
            tmp.push(".tmp");
            let tmp = PathBuf::from(tmp);
            fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
            fs::rename(&tmp, p).with_context(|| format!("renaming onto {}", p.display()))?;
        }
    }
    Ok(())
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "not computed".into(), |v| v.to_string())
}

fn bounds_text(r: &BoundsReport) -> String {
    let sets: Vec<String> = r.all_min_fvs.iter().map(|s| format!("{s:?}")).collect();
    format!(
        "n = {}\nMAIS = {}\ntau = {}\nnu = {}\nminrank2 = {}\nminimum feedback vertex sets: {}\n",
        r.n,
        r.mais,
        r.tau,
        r.nu,
        opt(r.minrank2),
        sets.join(" ")
    )
}

fn transform_text(net: &NCNetwork) -> String {
    let mut s = format!(
        "n = {}, sources {:?}, {} vertices, {} edges\n",
        net.n(),
        net.sources(),
        net.graph().vertex_count(),
        net.graph().edge_count()
    );
    for ((a, b), kind) in net.edges() {
        s.push_str(&format!("{} -> {} {:?}\n", net.label(a), net.label(b), kind));
    }
    s
}

fn classify_text(r: &ClassReport) -> String {
    let mut s = format!("tau = {}\nverdict: {:?}\n", r.tau, r.verdict);
    if let Some(v) = &r.vtau {
        s.push_str(&format!("sources: {v:?}\n"));
    }
    if let Some(sk) = &r.skeleton {
        s.push_str(&format!("style {:?}, roles {:?}\n", sk.style, sk.roles));
    }
    if let (Some(id), Some(red)) = (r.config_id, r.reduced_id) {
        s.push_str(&format!("configuration {id}, reduces to {red}\n"));
    }
    if r.illegitimate {
        s.push_str(&format!("illegitimate configurations {:?}\n", r.illegitimate_ids));
    }
    for d in &r.diagnostics {
        s.push_str(&format!("note: {d}\n"));
    }
    s
}

fn solve_text(r: &SolveResult) -> String {
    let mut s = format!(
        "n = {}, tau = {}, MAIS = {}\nmethod: {:?}\nlength {} ({}{})\n",
        r.n,
        r.tau,
        r.mais,
        r.method,
        r.length,
        if r.valid { "valid" } else { "INVALID" },
        if r.optimal { ", optimal" } else { "" }
    );
    for row in &r.code_rows {
        s.push_str(row);
        s.push('\n');
    }
    s
}

fn verify_text(r: &VerifyReport) -> String {
    let mut s = format!("length {}, rank {}\n", r.length, r.rank);
    if r.valid {
        s.push_str("valid\n");
    } else {
        s.push_str(&format!("invalid: receivers {:?} cannot decode\n", r.failing_vertices));
    }
    s.push_str(&format!("MAIS = {}, minrank2 = {}\n", opt(r.mais), opt(r.minrank)));
    if let Some(o) = r.optimality {
        s.push_str(&format!("optimality: {o:?}\n"));
    }
    s
}
