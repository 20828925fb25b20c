//! `hypercount`: exact point counts of moduli of pointed hyperelliptic
//! curves as polynomials and rational functions in the field size `q`.

use clap::{Parser, Subcommand, ValueEnum};
use hypercount::engine::GenusOneTable;
use hypercount::symq::ClosedForm;
use hypercount::tuples::{decompose_a, decompose_bc, partitions};
use hypercount::verify::{run_suite, Suite, VerifyOptions};
use hypercount::{
    cache, AExpr, BCExpr, CycleType, Engine, EnumBudget, Error, Parity, QPoly, QRat, Result,
    ULinComb,
};
use num::{One, Zero};
use serde_json::json;
use std::cell::RefCell;
use std::path::PathBuf;
use std::process;
use std::sync::Arc;

/// Like `println!`, but exits quietly when the consumer closes the pipe.
macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write;
        let mut so = std::io::stdout();
        if writeln!(so, $($t)*).is_err() {
            std::process::exit(0);
        }
    }};
}

#[derive(Parser)]
#[command(
    name = "hypercount",
    version,
    about = "Exact moment and fixed-point computations for families of \
             pointed hyperelliptic curves over finite fields",
    after_help = "Examples:\n  \
        hypercount decompose a1^4 a2\n  \
        hypercount count a0 --genus 3\n  \
        hypercount count a2 --genus 0..4 --q 3,5\n  \
        hypercount count a1^6 --char both --genus 5\n  \
        hypercount fix 1 --genus 2\n  \
        hypercount bc b1^2 c2 --genus 2\n  \
        hypercount verify invariants\n  \
        hypercount genus1-table"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Characteristic parity: odd, even, or both.
    #[arg(long = "char", global = true, value_enum, default_value_t = CharChoice::Odd)]
    char_choice: CharChoice,

    /// Genus: a single value like `3` or an inclusive range like `0..4`.
    /// When absent, commands report a certified closed form in the genus.
    #[arg(long, global = true, value_name = "SPEC")]
    genus: Option<String>,

    /// Comma-separated field sizes at which to also evaluate each result.
    #[arg(long, global = true, value_delimiter = ',', value_name = "LIST")]
    q: Vec<u64>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,

    /// With `fix`: also report the irreducible-character averages.
    #[arg(long, global = true)]
    schur: bool,

    /// Worker threads for enumeration (default: all available cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Cache directory for the genus-one table and recursion memos.
    #[arg(long, global = true, value_name = "DIR", default_value = ".hypercount-cache")]
    cache: PathBuf,

    /// Maximum number of curves any single enumeration may visit.
    #[arg(long = "budget-curves", global = true, value_name = "N")]
    budget_curves: Option<u64>,

    /// Attempt expressions outside the supported weight range instead of
    /// refusing them up front.
    #[arg(long = "allow-unsupported", global = true)]
    allow_unsupported: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a moment expression into primitive tuple sums.
    Decompose {
        /// Expression: products of `aN^R`, or of `bN^R`/`cN^R`.
        #[arg(required = true, num_args = 1.., value_name = "EXPR")]
        expr: Vec<String>,
    },
    /// Evaluate a trace-moment expression (products of `aN^R`).
    Count {
        #[arg(required = true, num_args = 1.., value_name = "EXPR")]
        expr: Vec<String>,
    },
    /// Evaluate a signed orbit-count expression (products of `bN^R`/`cN^R`).
    Bc {
        #[arg(required = true, num_args = 1.., value_name = "EXPR")]
        expr: Vec<String>,
    },
    /// Count fixed points of permutations acting on marked points: the
    /// argument is a number of points (all cycle types) or one cycle type
    /// like `(2,1)`.
    Fix {
        #[arg(value_name = "POINTS-OR-CYCLE-TYPE")]
        target: String,
    },
    /// Run verification suites (all of them when none are named).
    Verify {
        #[arg(value_name = "SUITE")]
        suites: Vec<String>,
    },
    /// Build (or load) the genus-one moment table and print it.
    Genus1Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CharChoice {
    Odd,
    Even,
    Both,
}

impl CharChoice {
    fn parities(self) -> Vec<Parity> {
        match self {
            CharChoice::Odd => vec![Parity::Odd],
            CharChoice::Even => vec![Parity::Even],
            CharChoice::Both => vec![Parity::Odd, Parity::Even],
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Latex,
}

const MAX_WEIGHT: u32 = 7;
const MAX_POINTS: u32 = 7;

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(&cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {}", e);
            process::exit(match e {
                Error::Parse(_) => 2,
                Error::Unsupported(_) => 3,
                Error::Budget { .. } => 4,
                _ => 1,
            });
        }
    }
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Decompose { expr } => cmd_decompose(cli, &expr.join(" ")),
        Command::Count { expr } => cmd_count(cli, &expr.join(" ")),
        Command::Bc { expr } => cmd_bc(cli, &expr.join(" ")),
        Command::Fix { target } => cmd_fix(cli, target),
        Command::Verify { suites } => cmd_verify(cli, suites),
        Command::Genus1Table => cmd_genus1_table(cli),
    }
}

fn budget(cli: &Cli) -> EnumBudget {
    let mut b = EnumBudget::default();
    if let Some(n) = cli.budget_curves {
        b.max_curves = n;
    }
    b
}

/// Inclusive genus range from the `--genus` flag; `None` means "closed form".
fn genus_range(cli: &Cli) -> Result<Option<(i64, i64)>> {
    let Some(spec) = &cli.genus else {
        return Ok(None);
    };
    let spec = spec.trim();
    let parse_int = |s: &str| {
        s.trim().parse::<i64>().map_err(|_| {
            Error::Parse(format!("genus must be an integer or A..B range, got {:?}", spec))
        })
    };
    if let Some((a, b)) = spec.split_once("..") {
        let lo = parse_int(a)?;
        let hi = parse_int(b)?;
        if lo > hi {
            return Err(Error::Parse(format!("empty genus range {:?}", spec)));
        }
        Ok(Some((lo, hi)))
    } else {
        let g = parse_int(spec)?;
        Ok(Some((g, g)))
    }
}

// ---------------------------------------------------------------------------
// engines with lazy genus-one table upgrade and memo persistence
// ---------------------------------------------------------------------------

struct EngineHost<'a> {
    cli: &'a Cli,
    parity: Parity,
    engine: RefCell<Engine>,
    upgraded: RefCell<bool>,
}

impl<'a> EngineHost<'a> {
    fn new(cli: &'a Cli, parity: Parity) -> EngineHost<'a> {
        let engine = Engine::new(parity);
        if let Ok(entries) = cache::load_memo(&cli.cache, parity) {
            engine.import_memo(entries);
        }
        EngineHost {
            cli,
            parity,
            engine: RefCell::new(engine),
            upgraded: RefCell::new(false),
        }
    }

    /// Runs `f`; when the engine reports an unsupported evaluation, loads or
    /// builds the genus-one table once and retries.
    fn eval<T>(&self, f: impl Fn(&Engine) -> Result<T>) -> Result<T> {
        let first = {
            let engine = self.engine.borrow();
            f(&engine)
        };
        match first {
            Err(Error::Unsupported(_)) if !*self.upgraded.borrow() => {
                let table = Arc::new(cache::load_or_build_genus1_table(
                    Some(&self.cli.cache),
                    &budget(self.cli),
                )?);
                let old = self.engine.borrow().export_memo();
                let fresh = Engine::with_genus1(self.parity, table);
                fresh.import_memo(old);
                *self.engine.borrow_mut() = fresh;
                *self.upgraded.borrow_mut() = true;
                let engine = self.engine.borrow();
                f(&engine)
            }
            other => other,
        }
    }

    fn persist(&self) {
        let memo = self.engine.borrow().export_memo();
        if let Err(e) = cache::save_memo(&self.cli.cache, self.parity, &memo) {
            eprintln!("warning: could not persist the recursion memo: {}", e);
        }
    }
}

// ---------------------------------------------------------------------------
// rendering
// ---------------------------------------------------------------------------

fn qrat_json(v: &QRat) -> serde_json::Value {
    if let Some(p) = v.as_poly() {
        json!({ "poly": poly_terms(p) })
    } else {
        json!({ "rational": { "num": poly_terms(v.num()), "den": poly_terms(v.den()) } })
    }
}

/// Nonzero terms as `[power, numerator, denominator]`, ascending in power.
/// Numerator and denominator are decimal strings so arbitrarily large
/// coefficients survive the trip through JSON.
fn poly_terms(p: &QPoly) -> serde_json::Value {
    let terms: Vec<serde_json::Value> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| json!([k, c.numer().to_string(), c.denom().to_string()]))
        .collect();
    json!(terms)
}

fn qrat_text(v: &QRat, format: Format) -> String {
    match format {
        Format::Latex => v.to_latex(),
        _ => v.to_string(),
    }
}

fn eval_entries(v: &QRat, qs: &[u64]) -> Vec<(u64, String)> {
    qs.iter()
        .map(|&q| {
            let s = match v.eval_int(q as i64) {
                Some(x) if x.denom().is_one() => x.numer().to_string(),
                Some(x) => format!("{}/{}", x.numer(), x.denom()),
                None => "undefined (pole)".to_string(),
            };
            (q, s)
        })
        .collect()
}

fn g_poly_text(coeffs: &[QRat]) -> String {
    if coeffs.iter().all(|c| c.is_zero()) {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let cs = c.to_string();
        let is_unit = cs == "1";
        parts.push(match k {
            0 => cs,
            1 if is_unit => "g".to_string(),
            1 => format!("({})*g", cs),
            _ if is_unit => format!("g^{}", k),
            _ => format!("({})*g^{}", cs, k),
        });
    }
    parts.join(" + ")
}

fn closed_form_json(cf: &ClosedForm) -> serde_json::Value {
    json!({
        "g_min": cf.g_min,
        "period": cf.period,
        "geometric": cf.geometric.to_string(),
        "residues": cf
            .residue_polys
            .iter()
            .map(|coeffs| coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

fn print_closed_form_plain(label: &str, cf: &ClosedForm) {
    outln!(
        "{}: closed form valid for g >= {}, period {}",
        label, cf.g_min, cf.period
    );
    outln!("  q^(2g) coefficient: {}", cf.geometric);
    for (r, coeffs) in cf.residue_polys.iter().enumerate() {
        outln!("  g mod {} = {}: {}", cf.period, r, g_poly_text(coeffs));
    }
}

fn print_value(
    cli: &Cli,
    expr: &str,
    parity_label: &str,
    g: i64,
    v: &QRat,
) {
    match cli.format {
        Format::Json => {
            let mut obj = json!({
                "expr": expr,
                "parity": parity_label,
                "genus": g,
            });
            merge(&mut obj, qrat_json(v));
            if !cli.q.is_empty() {
                let vals: Vec<serde_json::Value> = eval_entries(v, &cli.q)
                    .into_iter()
                    .map(|(q, s)| json!({ "q": q, "value": s }))
                    .collect();
                merge(&mut obj, json!({ "values": vals }));
            }
            outln!("{}", obj);
        }
        format => {
            outln!(
                "{} ({}) at genus {}: {}",
                expr,
                parity_label,
                g,
                qrat_text(v, format)
            );
            for (q, s) in eval_entries(v, &cli.q) {
                outln!("  at q = {}: {}", q, s);
            }
        }
    }
}

fn merge(into: &mut serde_json::Value, from: serde_json::Value) {
    if let (Some(a), Some(b)) = (into.as_object_mut(), from.as_object()) {
        for (k, v) in b {
            a.insert(k.clone(), v.clone());
        }
    }
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn cmd_decompose(cli: &Cli, expr: &str) -> Result<i32> {
    let looks_bc = expr
        .split_whitespace()
        .any(|t| t.starts_with('b') || t.starts_with('c'));
    let (label, comb): (String, ULinComb) = if looks_bc {
        let e = BCExpr::parse(expr)?;
        (e.to_string(), decompose_bc(&e))
    } else {
        let e = AExpr::parse(expr)?;
        (e.to_string(), decompose_a(&e))
    };
    match cli.format {
        Format::Json => {
            let terms: Vec<serde_json::Value> = comb
                .terms()
                .map(|(t, c)| {
                    json!({
                        "tuple": t.to_string(),
                        "coeff": if c.denom().is_one() {
                            c.numer().to_string()
                        } else {
                            format!("{}/{}", c.numer(), c.denom())
                        },
                    })
                })
                .collect();
            outln!(
                "{}",
                json!({ "expr": label, "kind": if looks_bc { "bc" } else { "a" }, "terms": terms })
            );
        }
        _ => {
            outln!("{} =", label);
            if comb.is_empty() {
                outln!("  0");
            }
            for (t, c) in comb.terms() {
                outln!("  ({}) * {}", c, t);
            }
        }
    }
    Ok(0)
}

fn cmd_count(cli: &Cli, expr: &str) -> Result<i32> {
    let e = AExpr::parse(expr)?;
    if e.weight() > MAX_WEIGHT && !cli.allow_unsupported {
        return Err(Error::Unsupported(format!(
            "weight {} exceeds the supported bound {}; pass --allow-unsupported to try anyway",
            e.weight(),
            MAX_WEIGHT
        )));
    }
    evaluate_over_parities(cli, &e.to_string(), |host, g| {
        host.eval(|engine| engine.a_value(g, &e))
    }, |host| host.eval(|engine| engine.closed_form_a(&e)))
}

fn cmd_bc(cli: &Cli, expr: &str) -> Result<i32> {
    let e = BCExpr::parse(expr)?;
    if e.weight() > MAX_WEIGHT && !cli.allow_unsupported {
        return Err(Error::Unsupported(format!(
            "weight {} exceeds the supported bound {}; pass --allow-unsupported to try anyway",
            e.weight(),
            MAX_WEIGHT
        )));
    }
    evaluate_over_parities(cli, &e.to_string(), |host, g| {
        host.eval(|engine| engine.bc_value(g, &e))
    }, |host| host.eval(|engine| engine.closed_form_bc(&e)))
}

/// Shared evaluation driver for `count` and `bc`: per-genus values for a
/// genus spec, a closed form without one, and the even-minus-odd difference
/// under `--char both`.
fn evaluate_over_parities(
    cli: &Cli,
    label: &str,
    value_at: impl Fn(&EngineHost, i64) -> Result<QRat>,
    closed: impl Fn(&EngineHost) -> Result<ClosedForm>,
) -> Result<i32> {
    let parities = cli.char_choice.parities();
    let hosts: Vec<EngineHost> = parities
        .iter()
        .map(|&p| EngineHost::new(cli, p))
        .collect();
    match genus_range(cli)? {
        Some((lo, hi)) => {
            for g in lo..=hi {
                let mut values = Vec::new();
                for host in &hosts {
                    let v = value_at(host, g)?;
                    print_value(cli, label, host.parity.as_str(), g, &v);
                    values.push(v);
                }
                if values.len() == 2 {
                    let diff = &values[1] - &values[0];
                    print_value(cli, label, "even-minus-odd", g, &diff);
                }
            }
        }
        None => {
            for host in &hosts {
                let cf = closed(host)?;
                match cli.format {
                    Format::Json => {
                        let mut obj = json!({
                            "expr": label,
                            "parity": host.parity.as_str(),
                        });
                        merge(&mut obj, json!({ "closed_form": closed_form_json(&cf) }));
                        outln!("{}", obj);
                    }
                    _ => print_closed_form_plain(
                        &format!("{} ({})", label, host.parity.as_str()),
                        &cf,
                    ),
                }
            }
        }
    }
    for host in &hosts {
        host.persist();
    }
    Ok(0)
}

fn cmd_fix(cli: &Cli, target: &str) -> Result<i32> {
    let cycle_types: Vec<CycleType> = if let Ok(n) = target.trim().parse::<u32>() {
        if n > MAX_POINTS {
            return Err(Error::Unsupported(format!(
                "{} marked points exceed the supported bound {}",
                n, MAX_POINTS
            )));
        }
        partitions(n)
    } else {
        let mu = CycleType::parse(target)?;
        if mu.n() > MAX_POINTS {
            return Err(Error::Unsupported(format!(
                "{} marked points exceed the supported bound {}",
                mu.n(),
                MAX_POINTS
            )));
        }
        vec![mu]
    };
    let range = genus_range(cli)?;
    if let Some((lo, _)) = range {
        if lo < 2 {
            return Err(Error::Unsupported(
                "fixed-point counts are supported for genus at least two".to_string(),
            ));
        }
    }
    let parities = cli.char_choice.parities();
    for parity in parities {
        let host = EngineHost::new(cli, parity);
        match range {
            Some((lo, hi)) => {
                for g in lo..=hi {
                    for mu in &cycle_types {
                        let v = host.eval(|engine| engine.fixed_point_value(g, mu))?;
                        print_value(cli, &format!("fix {}", mu), parity.as_str(), g, &v);
                    }
                    if cli.schur {
                        let n = cycle_types[0].n();
                        let rows =
                            host.eval(|engine| engine.character_transform(g, n))?;
                        for row in rows {
                            print_value(
                                cli,
                                &format!("P_{}", row.lambda),
                                parity.as_str(),
                                g,
                                &row.value,
                            );
                        }
                    }
                }
            }
            None => {
                for mu in &cycle_types {
                    let cf = host.eval(|engine| engine.closed_form_fixed_points(mu))?;
                    match cli.format {
                        Format::Json => {
                            let mut obj = json!({
                                "expr": format!("fix {}", mu),
                                "parity": parity.as_str(),
                            });
                            merge(&mut obj, json!({ "closed_form": closed_form_json(&cf) }));
                            outln!("{}", obj);
                        }
                        _ => print_closed_form_plain(
                            &format!("fix {} ({})", mu, parity.as_str()),
                            &cf,
                        ),
                    }
                }
            }
        }
        host.persist();
    }
    Ok(0)
}

fn cmd_verify(cli: &Cli, names: &[String]) -> Result<i32> {
    let suites: Vec<Suite> = if names.is_empty() {
        Suite::all().to_vec()
    } else {
        names
            .iter()
            .map(|s| Suite::parse(s))
            .collect::<Result<_>>()?
    };
    let opts = VerifyOptions {
        budget: budget(cli),
        cache_dir: Some(cli.cache.clone()),
        table: None,
    };
    let mut any_failed = false;
    for suite in suites {
        let records = run_suite(suite, &opts)?;
        let summary = hypercount::report::summarize(&records);
        match cli.format {
            Format::Json => {
                for r in &records {
                    outln!("{}", r.to_json_line());
                }
            }
            _ => {
                outln!(
                    "suite {}: {} checks, {} passed, {} failed, {} vacuous",
                    suite.name(),
                    summary.total,
                    summary.passed,
                    summary.failed,
                    summary.vacuous
                );
                for r in records.iter().filter(|r| !r.matched) {
                    outln!("  FAILED {}", r.to_json_line());
                }
            }
        }
        if summary.failed > 0 {
            any_failed = true;
        }
    }
    Ok(if any_failed { 1 } else { 0 })
}

fn cmd_genus1_table(cli: &Cli) -> Result<i32> {
    let table: GenusOneTable =
        cache::load_or_build_genus1_table(Some(&cli.cache), &budget(cli))?;
    let prov = table.provenance();
    match cli.format {
        Format::Json => {
            let entries: serde_json::Map<String, serde_json::Value> = table
                .entries()
                .iter()
                .map(|(e, p)| (e.to_string(), json!(p.to_string())))
                .collect();
            outln!(
                "{}",
                json!({
                    "entries": entries,
                    "provenance": {
                        "fields": prov.fields,
                        "degree_bound": prov.degree_bound,
                        "validation_points": prov.validation_points,
                    },
                })
            );
        }
        format => {
            outln!(
                "genus-one table: {} entries; fit over {} fields (degree bound {}, {} held-out validation fields each)",
                table.entries().len(),
                prov.fields.len(),
                prov.degree_bound,
                prov.validation_points
            );
            for (e, p) in table.entries() {
                let text = match format {
                    Format::Latex => p.to_latex(),
                    _ => p.to_string(),
                };
                outln!("  {}: {}", e, text);
            }
        }
    }
    Ok(0)
}
