//! Front end for the `haros` binary. [`run`] parses arguments, dispatches a
//! subcommand and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | a verification or cross-method check failed |
//! | 2 | usage or parse error |
//! | 3 | a resource cap was hit |
//! | 4 | methods disagree under `dist --method all --strict` |

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use haros::farey::MAX_TREE_LEVEL;
use haros::verify::{self, CheckReport};
use haros::{
    build_with_cap, cf_expand, identify_boundary, oracle_with_cap, symbolic_path, sweep,
    thm1_distribution, thm2_distribution, DegreeDistribution, ExactRational, HarosError,
    SweepLimits, SweepTable,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

/// Largest denominator built explicitly unless `--max-q` or `HAROS_MAX_Q` say otherwise.
pub const DEFAULT_MAX_Q: u64 = 1_000_000;
pub const MAX_Q_ENV: &str = "HAROS_MAX_Q";

pub const SWEEP_HEADER: [&str; 10] = [
    "x_num",
    "x_den",
    "x_float",
    "k",
    "p_thm1_num",
    "p_thm1_den",
    "p_thm2_num",
    "p_thm2_den",
    "p_oracle_num",
    "p_oracle_den",
];

#[derive(Parser, Debug)]
#[command(name = "haros", version, about = "Exact degree distributions of Haros graphs")]
struct Cli {
    /// Accepted for scripting symmetry; nothing in the toolchain draws random numbers.
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Continued fraction, convergents, tree path and level of a fraction.
    Cf(CfArgs),
    /// Build G_x and dump its degree sequence and identified multiset.
    Build(BuildArgs),
    /// Degree distribution P(k, x) by one or all methods.
    Dist(DistArgs),
    /// Tabulate P(k, x) over the interior of a Farey sequence.
    Sweep(SweepArgs),
    /// Run the verification suites and print a JSON run manifest.
    Verify(VerifyArgs),
}

#[derive(clap::Args, Debug)]
struct CfArgs {
    /// Fraction literal `p/q` in [0, 1].
    fraction: String,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args, Debug)]
struct BuildArgs {
    fraction: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Largest denominator to build (default: $HAROS_MAX_Q or 1000000).
    #[arg(long)]
    max_q: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Thm1,
    Thm2,
    Oracle,
    All,
}

#[derive(clap::Args, Debug)]
struct DistArgs {
    fraction: String,
    #[arg(long, value_enum, default_value_t = Method::Thm1)]
    method: Method,
    /// With `--method all`, exit 4 when the methods disagree.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    max_q: Option<u64>,
}

#[derive(clap::Args, Debug)]
struct SweepArgs {
    /// Comma-separated degrees, each at least 5.
    #[arg(long, value_delimiter = ',', default_value = "5,6,7,8")]
    k: Vec<u64>,
    /// Farey order n; rows cover F_n minus its endpoints.
    #[arg(long)]
    order: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 5_000_000)]
    max_rows: u64,
    #[arg(long)]
    max_q: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    All,
    Identities,
    Recurrences,
    Triple,
    Corollary,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    /// Farey order for the triple, round-trip and corollary suites.
    #[arg(long, default_value_t = 50)]
    order: u64,
    /// Deepest tree level for the recurrence suite.
    #[arg(long, default_value_t = 10)]
    levels: usize,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
}

/// Error carrying the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<HarosError> for Failure {
    fn from(e: HarosError) -> Self {
        let code = if e.is_resource_cap() {
            EXIT_RESOURCE
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_CHECK_FAILED,
            message: format!("i/o error: {e}"),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Cf(a) => cmd_cf(&a, out, err),
        Command::Build(a) => cmd_build(&a, out, err),
        Command::Dist(a) => cmd_dist(&a, out, err),
        Command::Sweep(a) => cmd_sweep(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Reads `p/q`, reducing it with a notice on `err` when needed.
fn parse_fraction(text: &str, err: &mut dyn Write) -> Result<ExactRational, Failure> {
    let (p, q) = text
        .split_once('/')
        .ok_or_else(|| Failure::usage(format!("expected a fraction p/q, got `{text}`")))?;
    let parse = |token: &str| {
        token
            .trim()
            .parse::<BigUint>()
            .map_err(|_| Failure::usage(format!("`{token}` is not a non-negative integer")))
    };
    let (p, q) = (parse(p)?, parse(q)?);
    if q.is_zero() {
        return Err(Failure::usage(format!("zero denominator in `{text}`")));
    }
    if p > q {
        return Err(Failure::usage(format!("`{text}` lies outside [0, 1]")));
    }
    let x = ExactRational::new(p.clone(), q.clone());
    if *x.numer() != p {
        writeln!(err, "note: {text} normalized to {}", show(&x))?;
    }
    Ok(x)
}

fn show(x: &ExactRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn is_endpoint(x: &ExactRational) -> bool {
    x.numer().is_zero() || x.numer() == x.denom()
}

fn endpoint_note(x: &ExactRational) -> String {
    let which = if x.numer().is_zero() { 0 } else { 1 };
    format!("P(k,{which})=0 by convention")
}

/// Integers go out as JSON numbers when they fit in 64 bits, strings otherwise.
fn int_json(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn max_q(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match std::env::var(MAX_Q_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{MAX_Q_ENV}=`{v}` is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_MAX_Q),
    }
}

fn cmd_cf(a: &CfArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let x = parse_fraction(&a.fraction, err)?;
    let (terms, convergents, path, level) = if x.is_zero() {
        (Vec::new(), Vec::new(), String::new(), BigUint::one())
    } else {
        let cf = cf_expand(&x)?;
        let conv = cf.convergents().entries();
        let path = if x.is_one() {
            String::new()
        } else {
            symbolic_path(&x)?.word()
        };
        (cf.terms().to_vec(), conv, path, cf.term_sum())
    };
    if a.json {
        let report = json!({
            "x": show(&x),
            "terms": terms.iter().map(int_json).collect::<Vec<_>>(),
            "convergents": convergents.iter().map(show).collect::<Vec<_>>(),
            "path": path,
            "level": int_json(&level),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("plain JSON"))?;
    } else {
        let terms: Vec<String> = terms.iter().map(ToString::to_string).collect();
        let convergents: Vec<String> = convergents.iter().map(show).collect();
        writeln!(out, "x: {}", show(&x))?;
        writeln!(out, "terms: [{}]", terms.join(", "))?;
        writeln!(out, "convergents: {}", convergents.join(", "))?;
        writeln!(out, "path: {}", if path.is_empty() { "(root)" } else { &path })?;
        writeln!(out, "level: {level}")?;
    }
    Ok(EXIT_OK)
}

fn cmd_build(a: &BuildArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let x = parse_fraction(&a.fraction, err)?;
    let g = build_with_cap(&x, max_q(a.max_q)?)?;
    let (identified, boundary) = match identify_boundary(&g) {
        Ok(ids) => (ids.counts, Some(ids.boundary_degree)),
        Err(_) => (BTreeMap::new(), None),
    };
    let note = is_endpoint(&x).then(|| endpoint_note(&x));
    match a.format {
        Format::Json => {
            let report = json!({
                "x": show(&x),
                "nodes": g.node_count(),
                "edges": g.edge_count(),
                "degrees": g.degrees,
                "identified": identified.iter().map(|(k, c)| (k.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
                "boundary_degree": boundary,
                "note": note,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("plain JSON"))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| io::Error::other(e);
            w.write_record(["record", "key", "value"]).map_err(csv_err)?;
            w.write_record(["nodes", "", &g.node_count().to_string()]).map_err(csv_err)?;
            w.write_record(["edges", "", &g.edge_count().to_string()]).map_err(csv_err)?;
            for (i, d) in g.degrees.iter().enumerate() {
                w.write_record(["degree", &i.to_string(), &d.to_string()]).map_err(csv_err)?;
            }
            for (k, c) in &identified {
                w.write_record(["identified", &k.to_string(), &c.to_string()]).map_err(csv_err)?;
            }
            out.write_all(&w.into_inner().map_err(|e| e.into_error())?)?;
            if let Some(note) = note {
                writeln!(err, "note: {note}")?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_dist(a: &DistArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let x = parse_fraction(&a.fraction, err)?;
    let cap = max_q(a.max_q)?;
    let wanted = match a.method {
        Method::All => vec![Method::Thm1, Method::Thm2, Method::Oracle],
        m => vec![m],
    };
    let mut columns: Vec<(&str, DegreeDistribution)> = Vec::new();
    for m in wanted {
        let (name, d) = match m {
            Method::Thm1 => ("thm1", thm1_distribution(&x)?),
            Method::Thm2 => ("thm2", thm2_distribution(&x)?),
            _ => ("oracle", oracle_with_cap(&x, cap)?),
        };
        columns.push((name, d));
    }
    let degrees: std::collections::BTreeSet<BigUint> = columns
        .iter()
        .flat_map(|(_, d)| d.entries().keys().cloned())
        .collect();
    let agree = columns.windows(2).all(|w| w[0].1 == w[1].1);
    let cell = |d: &DegreeDistribution, k: &BigUint| show(&d.get(k));

    if a.json {
        let rows: Vec<Value> = degrees
            .iter()
            .map(|k| {
                let mut row = serde_json::Map::new();
                row.insert("k".into(), int_json(k));
                for (name, d) in &columns {
                    row.insert((*name).into(), json!(cell(d, k)));
                }
                Value::Object(row)
            })
            .collect();
        let mut report = json!({ "x": show(&x), "rows": rows });
        if columns.len() > 1 {
            report["match"] = json!(agree);
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("plain JSON"))?;
    } else {
        let mut header = vec!["k".to_string()];
        header.extend(columns.iter().map(|(n, _)| n.to_string()));
        if columns.len() > 1 {
            header.push("match".into());
        }
        writeln!(out, "{}", header.join(","))?;
        for k in &degrees {
            let mut row = vec![k.to_string()];
            row.extend(columns.iter().map(|(_, d)| cell(d, k)));
            if columns.len() > 1 {
                let same = columns.windows(2).all(|w| w[0].1.get(k) == w[1].1.get(k));
                row.push(same.to_string());
            }
            writeln!(out, "{}", row.join(","))?;
        }
    }
    if is_endpoint(&x) {
        writeln!(err, "note: {}", endpoint_note(&x))?;
    }
    if a.strict && a.method == Method::All && !agree {
        writeln!(err, "error: methods disagree at x = {}", show(&x))?;
        return Ok(EXIT_MISMATCH);
    }
    Ok(EXIT_OK)
}

/// Wire form of one sweep row.
#[derive(Serialize)]
struct WireRow {
    x_num: u64,
    x_den: u64,
    x_float: f64,
    k: u64,
    p_thm1_num: u64,
    p_thm1_den: u64,
    p_thm2_num: u64,
    p_thm2_den: u64,
    p_oracle_num: u64,
    p_oracle_den: u64,
}

fn wire_rows(table: &SweepTable<u64>) -> impl Iterator<Item = WireRow> + '_ {
    table.rows.iter().map(|r| WireRow {
        x_num: *r.x.numer(),
        x_den: *r.x.denom(),
        x_float: *r.x.numer() as f64 / *r.x.denom() as f64,
        k: r.k,
        p_thm1_num: *r.thm1.numer(),
        p_thm1_den: *r.thm1.denom(),
        p_thm2_num: *r.thm2.numer(),
        p_thm2_den: *r.thm2.denom(),
        p_oracle_num: *r.oracle.numer(),
        p_oracle_den: *r.oracle.denom(),
    })
}

/// Byte-exact CSV for a sweep: fixed header, `\n` line endings, floats with
/// 17 significant digits.
pub fn sweep_csv(table: &SweepTable<u64>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(SWEEP_HEADER).expect("in-memory write");
    for r in wire_rows(table) {
        w.write_record([
            r.x_num.to_string(),
            r.x_den.to_string(),
            format!("{:.16e}", r.x_float),
            r.k.to_string(),
            r.p_thm1_num.to_string(),
            r.p_thm1_den.to_string(),
            r.p_thm2_num.to_string(),
            r.p_thm2_den.to_string(),
            r.p_oracle_num.to_string(),
            r.p_oracle_den.to_string(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn sweep_json(table: &SweepTable<u64>) -> Vec<u8> {
    let rows: Vec<WireRow> = wire_rows(table).collect();
    let mut bytes = serde_json::to_vec_pretty(&rows).expect("plain JSON");
    bytes.push(b'\n');
    bytes
}

/// Writes next to `path` and renames into place, so a failed run leaves no
/// partial file behind.
fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let written = fs::write(&tmp, bytes).and_then(|_| fs::rename(&tmp, path));
    if written.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    written
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if a.order < 1 {
        return Err(Failure::usage("--order must be at least 1"));
    }
    if let Some(k) = a.k.iter().find(|&&k| k < 5) {
        return Err(Failure::usage(format!("--k entries must be at least 5, got {k}")));
    }
    let limits = SweepLimits {
        max_rows: a.max_rows,
        max_oracle_q: max_q(a.max_q)?,
    };
    let table = sweep(&a.k, &a.order, &limits)?;
    let bytes = match a.format {
        Format::Csv => sweep_csv(&table),
        Format::Json => sweep_json(&table),
    };
    let discrepancy = table.max_discrepancy();
    let summary = format!(
        "rows: {}, max discrepancy: {}/{}, removable points: {}",
        table.rows.len(),
        discrepancy.numer(),
        discrepancy.denom(),
        table.removable_count()
    );
    match &a.out {
        Some(path) => {
            write_atomically(path, &bytes)?;
            writeln!(out, "{summary}")?;
        }
        None => {
            out.write_all(&bytes)?;
            writeln!(err, "{summary}")?;
        }
    }
    if !discrepancy.is_zero() {
        writeln!(err, "error: methods disagree somewhere in the sweep")?;
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}

/// Manifest printed by `verify`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub started: String,
    pub finished: String,
    pub checks_passed: u64,
    pub checks_failed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
    pub suites: Vec<SuiteSummary>,
}

#[derive(Debug, Serialize)]
pub struct SuiteSummary {
    pub name: String,
    pub passed: u64,
    pub failed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

/// Continuant grid used by `verify`: every list of length 2 to 8 over 1 to 5.
const GRID: (usize, usize, u64) = (2, 8, 5);

fn run_suites(a: &VerifyArgs) -> Result<Vec<CheckReport>, HarosError> {
    let n = a.order;
    let mut reports = Vec::new();
    let all = a.suite == Suite::All;
    if all || a.suite == Suite::Identities {
        reports.push(verify::continuant_identities(verify::term_grid(GRID.0, GRID.1, GRID.2)));
        reports.push(verify::path_roundtrips(&n)?);
    }
    if all || a.suite == Suite::Recurrences {
        reports.push(verify::descent_recurrences::<u64>(a.levels)?);
    }
    if all || a.suite == Suite::Triple {
        reports.push(verify::triple_equality(&n)?);
    }
    if all || a.suite == Suite::Corollary {
        reports.push(verify::corollary(&n, &[5, 6, 7, 8])?);
    }
    Ok(reports)
}

/// Farey orders beyond this would build millions of graphs.
const VERIFY_MAX_ORDER: u64 = 2_000;

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if a.order < 1 {
        return Err(Failure::usage("--order must be at least 1"));
    }
    if a.order > VERIFY_MAX_ORDER {
        return Err(HarosError::ResourceCap {
            what: "verify order",
            requested: a.order.to_string(),
            cap: VERIFY_MAX_ORDER.to_string(),
        }
        .into());
    }
    if a.levels > MAX_TREE_LEVEL {
        return Err(HarosError::ResourceCap {
            what: "tree level",
            requested: a.levels.to_string(),
            cap: MAX_TREE_LEVEL.to_string(),
        }
        .into());
    }
    let started = chrono::Utc::now();
    let reports = run_suites(a)?;
    let finished = chrono::Utc::now();

    let suite = format!("{:?}", a.suite).to_lowercase();
    let parameters = BTreeMap::from([
        ("order".to_string(), a.order.to_string()),
        ("levels".to_string(), a.levels.to_string()),
        ("suite".to_string(), suite),
    ]);
    let manifest = RunManifest {
        command: "verify".into(),
        parameters,
        started: started.to_rfc3339(),
        finished: finished.to_rfc3339(),
        checks_passed: reports.iter().map(|r| r.passed).sum(),
        checks_failed: reports.iter().map(|r| r.failed).sum(),
        first_failure: reports.iter().find_map(|r| r.first_failure.clone()),
        suites: reports
            .into_iter()
            .map(|r| SuiteSummary {
                name: r.suite,
                passed: r.passed,
                failed: r.failed,
                first_failure: r.first_failure,
            })
            .collect(),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&manifest).expect("plain JSON"))?;
    if let Some(f) = &manifest.first_failure {
        writeln!(err, "first counterexample: {f}")?;
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}
