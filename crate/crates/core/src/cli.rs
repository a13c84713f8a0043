//! Command-line front end.
//!
//! Exit codes: 0 value or pass, 1 usage or type error, 2 no value, 3
//! disagreement or oracle refusal.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{Corpus, CorpusParams};
use crate::domains::{DomainError, FinModel};
use crate::effsets::text::{parse_file, EffFile, EffValue};
use crate::effsets::{bits_to_string, Rat};
use crate::fineval::EvalError;
use crate::optree::{self, check_equiv, to_dot, to_text, Limits, Model, Outcome, Verdict};
use crate::oracles::OracleTable;
use crate::reductions::{self, Continuity, DirectEmptiness, EvaluatorEmptiness, Measurable};
use crate::syntax::{parse, pretty_with, typecheck, PrettyOptions, Term};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_VALUE: i32 = 2;
pub const EXIT_DISAGREE: i32 = 3;

const DEFAULT_FUEL: u64 = 100_000;
const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "hocomp", version, about = "Evaluate and check higher-order programs with oracles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpaceKind {
    Total,
    Partial,
}

/// `finite:N` or `infinite`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelArg {
    Finite(u32),
    Infinite,
}

impl FromStr for ModelArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "infinite" {
            return Ok(ModelArg::Infinite);
        }
        s.strip_prefix("finite:")
            .and_then(|n| n.parse().ok())
            .map(ModelArg::Finite)
            .ok_or_else(|| format!("expected `finite:N` or `infinite`, found `{s}`"))
    }
}

/// `name.key=value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleSetting {
    pub oracle: String,
    pub key: String,
    pub value: String,
}

impl FromStr for OracleSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lhs, value) = s.split_once('=').ok_or("expected `name.key=value`")?;
        let (oracle, key) = lhs.split_once('.').ok_or("expected `name.key=value`")?;
        Ok(OracleSetting {
            oracle: oracle.trim_start_matches('#').to_string(),
            key: key.to_string(),
            value: value.to_string(),
        })
    }
}

#[derive(clap::Args, Debug, Clone)]
pub struct EvalOpts {
    /// `finite:N` or `infinite`.
    #[arg(long, default_value = "infinite")]
    pub model: ModelArg,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    pub fuel: u64,
    /// Oracle setting `name.key=value`, e.g. `exists2.searchBound=500`.
    #[arg(long = "oracle", value_name = "NAME.KEY=VALUE")]
    pub oracles: Vec<OracleSetting>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a closed program of type 0.
    Run {
        file: PathBuf,
        #[command(flatten)]
        eval: EvalOpts,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the type of a closed program.
    Typecheck {
        file: PathBuf,
        /// Print numerals as digits.
        #[arg(long)]
        numerals: bool,
    },
    /// Build the computation tree and export it.
    Trace {
        file: PathBuf,
        #[command(flatten)]
        eval: EvalOpts,
        #[arg(long, default_value_t = 10_000)]
        max_nodes: usize,
        #[arg(long, default_value_t = 1_000)]
        max_depth: usize,
        /// Write STEM.txt and STEM.dot instead of printing.
        #[arg(long, value_name = "STEM")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Compare denotations with computation trees on a corpus of programs.
    Fincheck {
        #[arg(long, default_value_t = 7)]
        max_size: usize,
        #[arg(long, default_value_t = 1)]
        base_bound: u32,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Above this many terms, sample this many instead.
        #[arg(long, default_value_t = 100_000)]
        threshold: usize,
        #[arg(long = "oracle", value_name = "NAME.KEY=VALUE")]
        oracles: Vec<OracleSetting>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Count (and optionally list) the elements of a finite space.
    Enumerate {
        #[arg(value_name = "TYPE")]
        ty: String,
        #[arg(long, default_value_t = 1)]
        base_bound: u32,
        #[arg(long, value_enum, default_value = "partial")]
        kind: SpaceKind,
        #[arg(long)]
        list: bool,
    },
    /// Run a reduction on objects from an `.eff` file.
    Reduce {
        name: String,
        #[arg(long)]
        input: PathBuf,
        /// Parameter `key=value`.
        #[arg(long = "params", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

fn usage(msg: impl ToString) -> Failure {
    Failure(EXIT_USAGE, msg.to_string())
}

fn io(e: std::io::Error) -> Failure {
    usage(e)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn oracle_table(settings: &[OracleSetting]) -> Result<OracleTable, Failure> {
    let mut t = OracleTable::with_builtins();
    for s in settings {
        t.set_config(&s.oracle, &s.key, &s.value).map_err(usage)?;
    }
    Ok(t)
}

fn model(m: &ModelArg) -> Model {
    match m {
        ModelArg::Finite(n) => Model::Finite(FinModel::new(*n)),
        ModelArg::Infinite => Model::Infinite,
    }
}

/// Parses and typechecks a program, requiring a closed term of type 0.
fn load_program(path: &Path, oracles: &OracleTable) -> Result<Term, Failure> {
    let src = read(path)?;
    let t = parse(&src).map_err(usage)?;
    let ty = typecheck(&t, &oracles.typing_context()).map_err(usage)?;
    if !ty.is_base() {
        return Err(usage(format!("expected a program of type 0, found {ty}")));
    }
    Ok(t)
}

fn exit_for(o: &Outcome) -> i32 {
    match o {
        Outcome::Value(_) => EXIT_OK,
        Outcome::NoValueWithinFuel(_) | Outcome::Overflow => EXIT_NO_VALUE,
        Outcome::OracleRefusal { .. } => EXIT_DISAGREE,
        Outcome::StuckIllTyped(_) => EXIT_USAGE,
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Run { file, eval, format } => {
            let oracles = oracle_table(&eval.oracles)?;
            let t = load_program(&file, &oracles)?;
            let r = optree::eval_op(&t, &model(&eval.model), &oracles, eval.fuel);
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&r).expect("serializable")).map_err(io)?,
                _ => {
                    match &r.outcome {
                        Outcome::Value(v) => writeln!(out, "{v}"),
                        o => writeln!(out, "{o}"),
                    }
                    .map_err(io)?;
                    writeln!(
                        out,
                        "steps {}  max-depth {}  oracle-queries {}",
                        r.steps, r.max_depth, r.oracle_queries
                    )
                    .map_err(io)?;
                    if r.approximate {
                        writeln!(out, "approximate: an oracle answered from a bounded search").map_err(io)?;
                    }
                }
            }
            Ok(exit_for(&r.outcome))
        }
        Command::Typecheck { file, numerals } => {
            let oracles = OracleTable::with_builtins();
            let src = read(&file)?;
            let t = parse(&src).map_err(usage)?;
            let ty = typecheck(&t, &oracles.typing_context()).map_err(usage)?;
            let shown = pretty_with(&t, PrettyOptions { numerals });
            writeln!(out, "{shown} : {ty}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Trace { file, eval, max_nodes, max_depth, out: stem, format } => {
            let oracles = oracle_table(&eval.oracles)?;
            let t = load_program(&file, &oracles)?;
            let limits = Limits { fuel: eval.fuel, max_nodes, max_depth };
            let tree = optree::build_tree(&t, &model(&eval.model), &oracles, limits);
            match stem {
                Some(stem) => {
                    let txt = stem.with_extension("txt");
                    let dot = stem.with_extension("dot");
                    std::fs::write(&txt, to_text(&tree)).map_err(io)?;
                    std::fs::write(&dot, to_dot(&tree)).map_err(io)?;
                    writeln!(out, "{}\n{}", txt.display(), dot.display()).map_err(io)?;
                }
                None => {
                    let s = match format {
                        Format::Text => to_text(&tree),
                        Format::Dot => to_dot(&tree),
                        Format::Json => serde_json::to_string_pretty(&tree).expect("serializable") + "\n",
                    };
                    out.write_all(s.as_bytes()).map_err(io)?;
                }
            }
            Ok(exit_for(&tree.outcome))
        }
        Command::Fincheck { max_size, base_bound, fuel, seed, threshold, oracles, format } => {
            let table = oracle_table(&oracles)?;
            let report = fincheck(max_size, base_bound, fuel, seed, threshold, &table);
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable")),
                _ => write!(out, "{}", report.to_text()),
            }
            .map_err(io)?;
            Ok(if report.disagree > 0 { EXIT_DISAGREE } else { EXIT_OK })
        }
        Command::Enumerate { ty, base_bound, kind, list } => {
            let ty = crate::syntax::parse_type(&ty).map_err(usage)?;
            let m = FinModel::new(base_bound);
            let lines: Vec<String> = match kind {
                SpaceKind::Total => {
                    let s = m.total_space(&ty).map_err(usage)?;
                    writeln!(out, "{}", s.len()).map_err(io)?;
                    if list { s.elems().iter().map(|e| e.to_string()).collect() } else { Vec::new() }
                }
                SpaceKind::Partial => {
                    let s = m.partial_space(&ty).map_err(usage)?;
                    writeln!(out, "{}", s.len()).map_err(io)?;
                    if list { s.elems().iter().map(|e| e.to_string()).collect() } else { Vec::new() }
                }
            };
            for l in lines {
                writeln!(out, "{l}").map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Reduce { name, input, params } => {
            let file = parse_file(&read(&input)?).map_err(usage)?;
            let params = Params::parse(&params)?;
            let text = reduce(&name, &file, &params)?;
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FincheckItem {
    pub term: String,
    pub verdict: String,
    pub denotation: Option<u32>,
    pub operational: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FincheckReport {
    pub mode: &'static str,
    pub max_size: usize,
    pub base_bound: u32,
    pub fuel: u64,
    pub seed: u64,
    pub terms: usize,
    pub agree: usize,
    pub disagree: usize,
    pub inconclusive: usize,
    /// Terms whose spaces exceeded the enumeration budget.
    pub budget: usize,
    /// Every verdict other than agreement, in corpus order.
    pub exceptions: Vec<FincheckItem>,
}

impl FincheckReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "fincheck mode={} max-size={} base-bound={} fuel={} seed={} terms={}",
            self.mode, self.max_size, self.base_bound, self.fuel, self.seed, self.terms
        );
        let _ = writeln!(
            s,
            "AGREE {}  DISAGREE {}  INCONCLUSIVE {}  BUDGET {}",
            self.agree, self.disagree, self.inconclusive, self.budget
        );
        for e in &self.exceptions {
            let d = e.denotation.map_or("bottom".to_string(), |a| a.to_string());
            let _ = writeln!(s, "{}\t{}\tdenotation {}\t{}", e.verdict, e.term, d, e.operational);
        }
        s
    }
}

/// The built-in type-2 oracles, the constants of the standard corpus.
pub fn corpus_oracles(table: &OracleTable) -> Vec<(String, crate::syntax::Type)> {
    ["exists2", "mu"]
        .iter()
        .filter_map(|n| table.lookup(n).ok().map(|p| (n.to_string(), p.signature())))
        .collect()
}

pub fn fincheck(max_size: usize, base_bound: u32, fuel: u64, seed: u64, threshold: usize, table: &OracleTable) -> FincheckReport {
    let mut corpus = Corpus::new(CorpusParams::standard(max_size, corpus_oracles(table)));
    let (terms, exhaustive) = corpus.generate(threshold, seed);
    let m = FinModel::new(base_bound);
    let results: Vec<_> = terms.par_iter().map(|t| check_equiv(t, &m, table, fuel)).collect();
    let mut report = FincheckReport {
        mode: if exhaustive { "exhaustive" } else { "sampled" },
        max_size,
        base_bound,
        fuel,
        seed,
        terms: terms.len(),
        agree: 0,
        disagree: 0,
        inconclusive: 0,
        budget: 0,
        exceptions: Vec::new(),
    };
    for (t, r) in terms.iter().zip(results) {
        let item = |verdict: String, denotation, operational: String| FincheckItem {
            term: t.to_string(),
            verdict,
            denotation,
            operational,
        };
        match r {
            Ok(r) if r.verdict == Verdict::Agree => report.agree += 1,
            Ok(r) => {
                if r.verdict == Verdict::Disagree {
                    report.disagree += 1;
                } else {
                    report.inconclusive += 1;
                }
                report.exceptions.push(item(r.verdict.to_string(), r.denotation, r.operational.to_string()));
            }
            Err(EvalError::Domain(e @ DomainError::BudgetExceeded { .. })) => {
                report.budget += 1;
                report.exceptions.push(item("BUDGET".into(), None, e.to_string()));
            }
            Err(e) => {
                report.disagree += 1;
                report.exceptions.push(item("ERROR".into(), None, e.to_string()));
            }
        }
    }
    report
}

struct Params(Vec<(String, String)>);

impl Params {
    fn parse(raw: &[String]) -> Result<Self, Failure> {
        raw.iter()
            .map(|p| {
                p.split_once('=')
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .ok_or_else(|| usage(format!("expected key=value, found `{p}`")))
            })
            .collect::<Result<_, _>>()
            .map(Params)
    }

    fn get<T: FromStr>(&self, key: &str, default: Option<T>) -> Result<T, Failure> {
        match self.0.iter().rev().find(|(k, _)| k == key) {
            Some((_, v)) => v.parse().map_err(|_| usage(format!("bad value for {key}: `{v}`"))),
            None => default.ok_or_else(|| usage(format!("missing parameter {key}"))),
        }
    }
}

/// The object named by parameter `key`, or else the `i`-th object of one of
/// the given kinds in file order.
fn object<'a>(
    file: &'a EffFile,
    params: &Params,
    key: &str,
    i: usize,
    kinds: &[&str],
) -> Result<&'a EffValue, Failure> {
    match params.0.iter().rev().find(|(k, _)| k == key) {
        Some((_, name)) => file.get(name).ok_or_else(|| usage(format!("no object named `{name}`"))),
        None => file
            .entries
            .iter()
            .map(|(_, v)| v)
            .filter(|v| kinds.contains(&v.kind()))
            .nth(i)
            .ok_or_else(|| usage(format!("input needs at least {} {} object(s)", i + 1, kinds.join(" or ")))),
    }
}

macro_rules! expect_kind {
    ($v:expr, $variant:ident, $what:literal) => {
        match $v {
            EffValue::$variant(x) => x,
            other => return Err(usage(format!("expected {}, found {}", $what, other.kind()))),
        }
    };
}

fn red(e: reductions::ReductionError) -> Failure {
    usage(e)
}

fn point_text(bits: &[bool]) -> String {
    format!("{}+0^w", bits_to_string(bits))
}

/// Runs a reduction and renders its result as `key = value` lines.
pub fn reduce_to_text(name: &str, file: &EffFile, params: &[String]) -> Result<String, String> {
    let params = Params::parse(params).map_err(|f| f.1)?;
    reduce(name, file, &params).map_err(|f| f.1)
}

fn reduce(name: &str, file: &EffFile, params: &Params) -> Result<String, Failure> {
    let mut s = String::new();
    let _ = writeln!(s, "reduction = {name}");
    match name {
        "rm_code_open" => {
            let o = expect_kind!(object(file, params, "set", 0, &["intervals"])?, Intervals, "intervals");
            let d: u64 = params.get("denom", Some(8))?;
            let pairs = reductions::rm_code_open(o, d);
            let _ = writeln!(s, "count = {}", pairs.len());
            for (p, q) in pairs {
                let _ = writeln!(s, "pair = ({p}, {q})");
            }
        }
        "sup_usco" => {
            let f = expect_kind!(object(file, params, "f", 0, &["step"])?, Step, "step");
            let k: u32 = params.get("k", Some(20))?;
            let r = reductions::sup_usco(f, k).map_err(red)?;
            let _ = writeln!(s, "value = {}", r.value);
            for (q, empty) in &r.transcript {
                let _ = writeln!(s, "query = {q} {}", if *empty { "empty" } else { "nonempty" });
            }
        }
        "select_clopen" => {
            let x = expect_kind!(object(file, params, "set", 0, &["clopen"])?, Clopen, "clopen");
            let via: String = params.get("oracle", Some("direct".to_string()))?;
            let sel = match via.as_str() {
                "direct" => reductions::select_clopen(x, &mut DirectEmptiness),
                "evaluator" => reductions::select_clopen(x, &mut EvaluatorEmptiness::default()),
                other => return Err(usage(format!("unknown emptiness oracle `{other}`"))),
            }
            .map_err(red)?;
            let _ = writeln!(s, "point = {}", point_text(&sel.point));
            let _ = writeln!(s, "queries = {}", sel.queries);
        }
        "moreau_env" => {
            let f = expect_kind!(object(file, params, "f", 0, &["step"])?, Step, "step");
            let n: u64 = params.get("n", None)?;
            let x: Rat = params.get("x", None)?;
            let _ = writeln!(s, "value = {}", reductions::moreau_env(f, n, &x));
        }
        "urysohn" => {
            let c0 = expect_kind!(object(file, params, "c0", 0, &["intervals"])?, Intervals, "intervals");
            let c1 = expect_kind!(object(file, params, "c1", 1, &["intervals"])?, Intervals, "intervals");
            let x: Rat = params.get("x", None)?;
            let _ = writeln!(s, "value = {}", reductions::urysohn(c0, c1, &x).map_err(red)?);
        }
        "measure_bisect" => {
            let n: u32 = params.get("n", None)?;
            let l = match object(file, params, "set", 0, &["clopen", "intervals"])? {
                EffValue::Clopen(x) => reductions::measure_bisect(Measurable::Clopen(x), n),
                EffValue::Intervals(u) => reductions::measure_bisect(Measurable::Closed(u), n),
                other => return Err(usage(format!("expected clopen or intervals, found {}", other.kind()))),
            }
            .map_err(red)?;
            let _ = writeln!(s, "value = {l}");
        }
        "cantor_intersection" => {
            let mut chain = Vec::new();
            for (_, v) in &file.entries {
                chain.push(expect_kind!(v, Clopen, "clopen").clone());
            }
            let p = reductions::cantor_intersection(&chain, &mut DirectEmptiness).map_err(red)?;
            let _ = writeln!(s, "point = {}", point_text(&p));
        }
        "decide_continuity" | "decide_continuity_via_osc" => {
            let f = expect_kind!(object(file, params, "f", 0, &["step"])?, Step, "step");
            match reductions::decide_continuity_via_osc(f) {
                Continuity::Continuous => {
                    let _ = writeln!(s, "continuous = true");
                }
                Continuity::Discontinuous { witness, osc, k } => {
                    let _ = writeln!(s, "continuous = false");
                    let _ = writeln!(s, "witness = {witness}");
                    let _ = writeln!(s, "osc = {osc}");
                    let _ = writeln!(s, "k = {k}");
                }
            }
        }
        "variation" => {
            let f = expect_kind!(object(file, params, "f", 0, &["step"])?, Step, "step");
            let _ = writeln!(s, "value = {}", f.variation());
        }
        other => return Err(usage(format!("unknown reduction `{other}`"))),
    }
    Ok(s)
}

/// Entry point of the binary. Runs on a thread with a large stack, since
/// deep terms recurse in substitution and printing.
pub fn main() -> ! {
    let args: Vec<OsString> = std::env::args_os().collect();
    let code = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || {
            let stdout = std::io::stdout();
            let stderr = std::io::stderr();
            run(args, &mut stdout.lock(), &mut stderr.lock())
        })
        .expect("spawn evaluator thread")
        .join()
        .unwrap_or(EXIT_USAGE);
    std::process::exit(code)
}
