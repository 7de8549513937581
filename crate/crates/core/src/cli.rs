//! Command-line front end. [`parse_and_dispatch`] turns an argument vector
//! into an exit code and rendered output so it can be driven from tests and
//! from batch files as well as from `main`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cyclotomic::RationalScalar;
use crate::parabolic::{
    parabolic_degree, s_invariant, MarkedPoint, ParabolicData, ParabolicError, WeightStep,
};
use crate::qh_oracle::{FusionAlgebra, OracleError};
use crate::symfunc::Partition;
use crate::vi_engine::{
    count_maximal, degree_split, evaluate, Convention, EngineError, EvalOptions, InvariantQuery,
    InvariantResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INADMISSIBLE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Paper,
    Dual,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Paper => Convention::Paper,
            ConventionArg::Dual => Convention::Dual,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "vicalc",
    version,
    about = "Exact Grassmannian Gromov-Witten invariants and maximal subbundle counts",
    allow_negative_numbers = true
)]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: OutputFormat,
    #[arg(long, value_enum, default_value = "paper", global = true)]
    convention: ConventionArg,
    /// Worker threads for the root-of-unity sums (0 = VI_WORKERS or all cores).
    #[arg(long, default_value_t = 0, global = true)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gromov-Witten invariant of a monomial in the letters X_1..X_k.
    Vi(ViArgs),
    /// Number of maximal rank-k subbundles.
    CountMax(CountArgs),
    /// Quantum multiplication table of Gr(k, n) at q = 1.
    QhTable(QhArgs),
    /// Parabolic degree of a bundle with weighted flags.
    ParabolicDegree(ParabolicArgs),
    /// s-invariant, optionally refined by equivariant weights.
    SInvariant(SArgs),
    /// Published rank-1 corollary next to the formula's own value.
    CorollaryReport(CorollaryArgs),
    /// Run a file of JSON job specs, one per line ("-" reads stdin).
    Batch(BatchArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct ViArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    g: u32,
    /// Quotient degree e'.
    #[arg(long)]
    e: i64,
    /// Bundle degree.
    #[arg(long, default_value_t = 0)]
    d: i64,
    /// Monomial exponents a_1..a_m, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    monomial: Vec<u32>,
    /// Evaluate the formula with no repairs (always refused: the literal
    /// text is ambiguous).
    #[arg(long)]
    paper_literal: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct CountArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    d: i64,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    g: u32,
}

#[derive(Debug, Args)]
struct QhArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    /// Also evaluate the genus-g correlator of --classes.
    #[arg(long)]
    g: Option<u32>,
    /// Classes for the correlator, `;`-separated partitions such as `1;1,1`.
    #[arg(long)]
    classes: Option<String>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct ParabolicArgs {
    #[arg(long)]
    rank: u32,
    #[arg(long)]
    degree: i64,
    /// One marked point as `weight:multiplicity` pairs, e.g. `1/3:1,2/3:1`.
    #[arg(long = "point")]
    points: Vec<String>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct SArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    g: u32,
    #[arg(long)]
    eps: Option<i64>,
    /// Group order N of the equivariant refinement.
    #[arg(long, default_value_t = 0)]
    order: u32,
    /// Weights mu_i, comma separated rationals.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    mu: Vec<String>,
    /// Node form: rank 2 and epsilon 1.
    #[arg(long)]
    node: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct CorollaryArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    g: u32,
    /// Bundle degree; every residue class is reported when omitted.
    #[arg(long)]
    d: Option<i64>,
}

#[derive(Debug, Args)]
struct BatchArgs {
    file: String,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

/// One line of a batch file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    pub subcommand: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    #[serde(default)]
    pub output_format: OutputFormat,
    #[serde(default)]
    pub convention: Convention,
    #[serde(default)]
    pub parallelism: usize,
}

impl JobSpec {
    /// The equivalent argument vector, without the program name.
    pub fn to_args(&self) -> Result<Vec<String>, String> {
        let mut args = vec![self.subcommand.clone()];
        for (key, value) in &self.parameters {
            let flag = format!("--{}", key.replace('_', "-"));
            match value {
                Value::Bool(true) => args.push(flag),
                Value::Bool(false) | Value::Null => {}
                Value::Number(n) => args.push(format!("{flag}={n}")),
                Value::String(s) => args.push(format!("{flag}={s}")),
                Value::Array(items) => {
                    let parts: Vec<String> = items
                        .iter()
                        .map(|v| match v {
                            Value::String(s) => s.clone(),
                            other => other.to_string(),
                        })
                        .collect();
                    args.push(format!("{flag}={}", parts.join(",")));
                }
                Value::Object(_) => return Err(format!("parameter {key:?} cannot be an object")),
            }
        }
        let format = match self.output_format {
            OutputFormat::Text => "text",
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        };
        args.extend([
            "--format".to_string(),
            format.to_string(),
            "--convention".to_string(),
            self.convention.to_string(),
            "--workers".to_string(),
            self.parallelism.to_string(),
        ]);
        Ok(args)
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn parse_and_dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome::fail(code, text)
            };
        }
    };
    let ctx = Context {
        format: cli.format,
        convention: cli.convention.into(),
        opts: EvalOptions::with_workers(cli.workers),
    };
    match cli.command {
        Command::Vi(a) => run_vi(&ctx, a),
        Command::CountMax(a) => run_count(&ctx, a),
        Command::QhTable(a) => run_qh(&ctx, a),
        Command::ParabolicDegree(a) => run_parabolic(&ctx, a),
        Command::SInvariant(a) => run_s(&ctx, a),
        Command::CorollaryReport(a) => run_corollary(&ctx, a),
        Command::Batch(a) => run_batch(a),
    }
}

struct Context {
    format: OutputFormat,
    convention: Convention,
    opts: EvalOptions,
}

fn engine_failure(e: &EngineError) -> Outcome {
    let code = match e {
        EngineError::DegreeConditionViolated { .. } => EXIT_INADMISSIBLE,
        EngineError::InvalidQuery(_) | EngineError::UnreducedDegree(_) => EXIT_USAGE,
        EngineError::ConventionMiscalibration(_)
        | EngineError::NonIntegralSignExponent(_)
        | EngineError::Arithmetic(_)
        | EngineError::WorkerPool(_) => EXIT_INTERNAL,
    };
    Outcome::fail(code, format!("error: {e}"))
}

fn oracle_failure(e: &OracleError) -> Outcome {
    match e {
        OracleError::Engine(inner) => engine_failure(inner),
        OracleError::Symfunc(_) => Outcome::fail(EXIT_USAGE, format!("error: {e}")),
        _ => Outcome::fail(EXIT_INTERNAL, format!("error: {e}")),
    }
}

fn parabolic_failure(e: &ParabolicError) -> Outcome {
    match e {
        ParabolicError::Engine(inner) => engine_failure(inner),
        _ => Outcome::fail(EXIT_USAGE, format!("error: {e}")),
    }
}

/// One row of vi / count-max output; CSV columns follow field order.
#[derive(Debug, Serialize)]
struct InvariantRow {
    subcommand: &'static str,
    n: u32,
    k: u32,
    g: u32,
    e: Option<i64>,
    d: i64,
    monomial: Vec<u32>,
    convention: Convention,
    value: String,
    integral: bool,
    terms: u64,
}

fn render_invariant(format: OutputFormat, row: &InvariantRow) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string(row).expect("row serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "n",
                "k",
                "g",
                "e",
                "d",
                "monomial",
                "convention",
                "value",
                "integral",
                "terms",
            ])
            .expect("in-memory csv");
            let mono: Vec<String> = row.monomial.iter().map(u32::to_string).collect();
            w.write_record([
                row.n.to_string(),
                row.k.to_string(),
                row.g.to_string(),
                row.e.map(|e| e.to_string()).unwrap_or_default(),
                row.d.to_string(),
                mono.join(" "),
                row.convention.to_string(),
                row.value.clone(),
                row.integral.to_string(),
                row.terms.to_string(),
            ])
            .expect("in-memory csv");
            String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
        }
        OutputFormat::Text => {
            let mut s = String::new();
            let e = row.e.map(|e| e.to_string()).unwrap_or_else(|| "-".into());
            let mono: Vec<String> = row.monomial.iter().map(u32::to_string).collect();
            let _ = writeln!(
                s,
                "{}  n={} k={} g={} e={} d={} monomial=[{}] convention={}",
                row.subcommand,
                row.n,
                row.k,
                row.g,
                e,
                row.d,
                mono.join(","),
                row.convention
            );
            let _ = writeln!(
                s,
                "value    {}\nintegral {}\nterms    {}",
                row.value, row.integral, row.terms
            );
            s
        }
    }
}

const LITERAL_AMBIGUITY: &str = "--paper-literal refused: the published prefactor \"n^{αβ}/k'!\" \
does not say whether αβ is an exponent or β a sign multiplying n^α, and the published \
denominator \"∏_{i=1}^{n}ρ_i\" multiplies n roots while a tuple holds only k'. \
Drop the flag to evaluate with the documented repairs (β·n^α, ∏_{i=1}^{k'}ρ_i).";

fn run_vi(ctx: &Context, a: ViArgs) -> Outcome {
    if a.paper_literal {
        return Outcome::fail(EXIT_USAGE, LITERAL_AMBIGUITY);
    }
    let q = InvariantQuery {
        n: a.n,
        k: a.k,
        g: a.g,
        e_prime: a.e,
        d: a.d,
        monomial: a.monomial,
        convention: ctx.convention,
    };
    match evaluate(&q, &ctx.opts) {
        Ok(r) => Outcome::ok(render_invariant(
            ctx.format,
            &row("vi", &q, Some(q.e_prime), &r),
        )),
        Err(e) => engine_failure(&e),
    }
}

fn row(
    subcommand: &'static str,
    q: &InvariantQuery,
    e: Option<i64>,
    r: &InvariantResult,
) -> InvariantRow {
    InvariantRow {
        subcommand,
        n: q.n,
        k: q.k,
        g: q.g,
        e,
        d: q.d,
        monomial: q.monomial.clone(),
        convention: q.convention,
        value: r.value.to_string(),
        integral: r.integrality,
        terms: r.terms_summed,
    }
}

fn run_count(ctx: &Context, a: CountArgs) -> Outcome {
    match count_maximal(a.n, a.d, a.k, a.g, ctx.convention, &ctx.opts) {
        Ok(r) => {
            let q = InvariantQuery::new(a.n, a.k, a.g, 0, vec![])
                .with_degree(a.d)
                .with_convention(ctx.convention);
            Outcome::ok(render_invariant(
                ctx.format,
                &row("count-max", &q, None, &r),
            ))
        }
        Err(e) => engine_failure(&e),
    }
}

#[derive(Debug, Serialize)]
struct ProductTerm {
    class: String,
    q: u32,
    coeff: i64,
}

#[derive(Debug, Serialize)]
struct ProductEntry {
    lhs: String,
    rhs: String,
    product: String,
    terms: Vec<ProductTerm>,
}

#[derive(Debug, Serialize)]
struct QhTable {
    k: u32,
    n: u32,
    dimension: usize,
    pairing_determinant: String,
    products: Vec<ProductEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    correlator: Option<String>,
}

fn run_qh(ctx: &Context, a: QhArgs) -> Outcome {
    let alg = match FusionAlgebra::shared(a.k, a.n) {
        Ok(alg) => alg,
        Err(e) => return oracle_failure(&e),
    };
    let basis = alg.basis().to_vec();
    let mut products = Vec::new();
    for (i, lhs) in basis.iter().enumerate() {
        for rhs in &basis[i..] {
            let prod = match crate::qh_oracle::quantum_product(lhs, rhs, a.k, a.n) {
                Ok(p) => p,
                Err(e) => return oracle_failure(&e),
            };
            products.push(ProductEntry {
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
                product: prod.to_string(),
                terms: prod
                    .terms()
                    .map(|(p, q, c)| ProductTerm {
                        class: p.to_string(),
                        q,
                        coeff: c,
                    })
                    .collect(),
            });
        }
    }
    let correlator = match (a.g, a.classes.as_deref()) {
        (None, None) => None,
        (g, classes) => {
            let parsed: Result<Vec<Partition>, _> = classes
                .unwrap_or("")
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(str::parse)
                .collect();
            let parsed = match parsed {
                Ok(p) => p,
                Err(e) => return Outcome::fail(EXIT_USAGE, format!("error: {e}")),
            };
            match alg.correlator(&parsed, g.unwrap_or(0)) {
                Ok(v) => Some(v.to_string()),
                Err(e) => return oracle_failure(&e),
            }
        }
    };
    let table = QhTable {
        k: a.k,
        n: a.n,
        dimension: alg.dimension(),
        pairing_determinant: alg.pairing_determinant().to_string(),
        products,
        correlator,
    };
    let out = match ctx.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string(&table).expect("table serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["lhs", "rhs", "class", "q", "coeff"])
                .expect("in-memory csv");
            for p in &table.products {
                for t in &p.terms {
                    w.write_record([
                        p.lhs.clone(),
                        p.rhs.clone(),
                        t.class.clone(),
                        t.q.to_string(),
                        t.coeff.to_string(),
                    ])
                    .expect("in-memory csv");
                }
            }
            String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
        }
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "QH*(Gr({},{})) at q=1: dimension {}, pairing determinant {}",
                table.k, table.n, table.dimension, table.pairing_determinant
            );
            for p in &table.products {
                let _ = writeln!(s, "s{} * s{} = {}", p.lhs, p.rhs, p.product);
            }
            if let Some(c) = &table.correlator {
                let _ = writeln!(s, "correlator {c}");
            }
            s
        }
    };
    Outcome::ok(out)
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad rational {s:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("bad rational {s:?}"))?;
    if den == BigInt::from(0) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

fn parse_point(s: &str) -> Result<MarkedPoint, String> {
    let steps = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (w, m) = t
                .split_once(':')
                .ok_or_else(|| format!("expected weight:multiplicity, got {t:?}"))?;
            let m: u32 = m
                .trim()
                .parse()
                .map_err(|_| format!("bad multiplicity in {t:?}"))?;
            Ok(WeightStep::new(parse_rational(w)?, m))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(MarkedPoint { steps })
}

fn render_scalar(
    format: OutputFormat,
    name: &str,
    fields: &[(&str, String)],
    value: &RationalScalar,
) -> String {
    match format {
        OutputFormat::Json => {
            let mut map = serde_json::Map::new();
            map.insert("subcommand".into(), Value::String(name.into()));
            for (k, v) in fields {
                map.insert((*k).into(), Value::String(v.clone()));
            }
            map.insert("value".into(), Value::String(value.to_string()));
            map.insert("integral".into(), Value::Bool(value.is_integer()));
            let mut s = Value::Object(map).to_string();
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            header.extend(["value", "integral"]);
            w.write_record(&header).expect("in-memory csv");
            let mut rec: Vec<String> = fields.iter().map(|(_, v)| v.clone()).collect();
            rec.push(value.to_string());
            rec.push(value.is_integer().to_string());
            w.write_record(&rec).expect("in-memory csv");
            String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
        }
        OutputFormat::Text => {
            let mut s = String::new();
            let desc: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "{name}  {}", desc.join(" "));
            let _ = writeln!(s, "value    {value}");
            s
        }
    }
}

fn run_parabolic(ctx: &Context, a: ParabolicArgs) -> Outcome {
    let points = match a
        .points
        .iter()
        .map(|p| parse_point(p))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(p) => p,
        Err(e) => return Outcome::fail(EXIT_USAGE, format!("error: {e}")),
    };
    let data = ParabolicData::new(a.rank, a.degree, points);
    match parabolic_degree(&data) {
        Ok(v) => Outcome::ok(render_scalar(
            ctx.format,
            "parabolic-degree",
            &[
                ("rank", a.rank.to_string()),
                ("degree", a.degree.to_string()),
                ("points", a.points.join(" ")),
            ],
            &v,
        )),
        Err(e) => parabolic_failure(&e),
    }
}

fn run_s(ctx: &Context, a: SArgs) -> Outcome {
    let mu = match a
        .mu
        .iter()
        .map(|m| parse_rational(m))
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(mu) => mu,
        Err(e) => return Outcome::fail(EXIT_USAGE, format!("error: {e}")),
    };
    let (n, eps) = if a.node {
        (2, 1)
    } else {
        match (a.n, a.eps) {
            (Some(n), Some(eps)) => (n, eps),
            _ => {
                return Outcome::fail(
                    EXIT_USAGE,
                    "error: s-invariant needs --n and --eps unless --node is given",
                )
            }
        }
    };
    match s_invariant(n, a.k, a.g, eps, a.order, &mu) {
        Ok(v) => Outcome::ok(render_scalar(
            ctx.format,
            "s-invariant",
            &[
                ("n", n.to_string()),
                ("k", a.k.to_string()),
                ("g", a.g.to_string()),
                ("eps", eps.to_string()),
                ("order", a.order.to_string()),
                ("mu", a.mu.join(" ")),
            ],
            &v,
        )),
        Err(e) => parabolic_failure(&e),
    }
}

pub const COROLLARY_CLAIM: &str = "m(n,d,1,g)=n^{ng}, and m(2,d,1,g)=n^{2g}";
pub const COROLLARY_SOURCE: &str =
    "published corollary to the maximal-subbundle count theorem for parabolic bundles";
pub const COROLLARY_DERIVATION: &str = "k'=1: sigma_1(rho)=rho, the pair product is empty and \
beta=1, so m = n^{g-1} * sum_{rho^n=1} rho^{b-g+1} = n^g if n | (b-g+1), else 0, where d = a*n - b, 0 <= b < n";

#[derive(Debug, Serialize)]
struct CorollaryRow {
    n: u32,
    g: u32,
    d: i64,
    b: i64,
    claimed: String,
    formula: String,
    differs: bool,
}

#[derive(Debug, Serialize)]
struct CorollaryReport {
    status: &'static str,
    claim: &'static str,
    source: &'static str,
    derivation: &'static str,
    rows: Vec<CorollaryRow>,
}

fn run_corollary(ctx: &Context, a: CorollaryArgs) -> Outcome {
    if a.n < 2 {
        return Outcome::fail(EXIT_USAGE, "error: corollary-report needs n >= 2");
    }
    let degrees: Vec<i64> = match a.d {
        Some(d) => vec![d],
        None => (0..a.n as i64).map(|b| -b).collect(),
    };
    let claimed = BigInt::from(a.n).pow(a.n * a.g);
    let mut rows = Vec::new();
    for d in degrees {
        let (_, b) = degree_split(d, a.n);
        let formula = match count_maximal(a.n, d, 1, a.g, Convention::Paper, &ctx.opts) {
            Ok(r) => r.value,
            Err(e) => return engine_failure(&e),
        };
        let claimed = BigRational::from_integer(claimed.clone());
        rows.push(CorollaryRow {
            n: a.n,
            g: a.g,
            d,
            b,
            differs: claimed != formula,
            claimed: claimed.to_string(),
            formula: formula.to_string(),
        });
    }
    let report = CorollaryReport {
        status: "documented discrepancy (reported, not adjudicated)",
        claim: COROLLARY_CLAIM,
        source: COROLLARY_SOURCE,
        derivation: COROLLARY_DERIVATION,
        rows,
    };
    let out = match ctx.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string(&report).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &report.rows {
                w.serialize(r).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
        }
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "{}", report.status);
            let _ = writeln!(s, "claimed:    {}  ({})", report.claim, report.source);
            let _ = writeln!(s, "derivation: {}", report.derivation);
            let _ = writeln!(
                s,
                "{:>4} {:>4} {:>6} {:>4} {:>24} {:>24} differs",
                "n", "g", "d", "b", "claimed n^(ng)", "formula"
            );
            for r in &report.rows {
                let _ = writeln!(
                    s,
                    "{:>4} {:>4} {:>6} {:>4} {:>24} {:>24} {}",
                    r.n, r.g, r.d, r.b, r.claimed, r.formula, r.differs
                );
            }
            s
        }
    };
    Outcome::ok(out)
}

fn run_batch(a: BatchArgs) -> Outcome {
    let text = if a.file == "-" {
        let mut buf = String::new();
        if let Err(e) = std::io::Read::read_to_string(&mut std::io::stdin(), &mut buf) {
            return Outcome::fail(EXIT_USAGE, format!("error: reading stdin: {e}"));
        }
        buf
    } else {
        match std::fs::read_to_string(&a.file) {
            Ok(t) => t,
            Err(e) => return Outcome::fail(EXIT_USAGE, format!("error: reading {}: {e}", a.file)),
        }
    };
    run_batch_lines(&text)
}

/// Runs each nonblank line as a [`JobSpec`], concurrently, keeping input order.
pub fn run_batch_lines(text: &str) -> Outcome {
    let jobs: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let results: Vec<Outcome> = jobs
        .par_iter()
        .map(|&(lineno, line)| {
            let spec: JobSpec = match serde_json::from_str(line) {
                Ok(s) => s,
                Err(e) => return Outcome::fail(EXIT_USAGE, format!("line {}: {e}", lineno + 1)),
            };
            let args = match spec.to_args() {
                Ok(a) => a,
                Err(e) => return Outcome::fail(EXIT_USAGE, format!("line {}: {e}", lineno + 1)),
            };
            if spec.subcommand == "batch" {
                return Outcome::fail(EXIT_USAGE, format!("line {}: nested batch", lineno + 1));
            }
            let mut out = parse_and_dispatch(std::iter::once("vicalc".to_string()).chain(args));
            if !out.stderr.is_empty() {
                out.stderr = format!("line {}: {}", lineno + 1, out.stderr);
            }
            out
        })
        .collect();
    let mut combined = Outcome::ok(String::new());
    for r in results {
        combined.stdout.push_str(&r.stdout);
        combined.stderr.push_str(&r.stderr);
        combined.code = combined.code.max(r.code);
    }
    combined
}
