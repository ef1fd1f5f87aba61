use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gapn_core::constructions::{
    build_even_binomial, build_mod3_binomial, build_odd_binomial, build_trinomial,
    find_trinomial_u, find_trinomial_u_with, ConstructionError, Family,
};
use gapn_core::field::{Field, FieldCtx, FieldElem, DEFAULT_TABLE_CAP};
use gapn_core::json::{field_info_json, function_json, function_from_json, recipe_json, verdict_json, FunctionJson};
use gapn_core::reproduce::{reproduce, CLAIMS};
use gapn_core::search::{run, SearchJob, Shape, CSV_HEADER, DEFAULT_BUDGET};
use gapn_core::is_gapn;

const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "gapn", version, about = "Construct and exactly verify GAPN functions over F_{p^n}")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the field's modulus, primitive element and subgroup size.
    FieldInfo {
        #[arg(short)]
        p: u64,
        #[arg(short, default_value_t = 2)]
        n: u32,
    },
    /// Check a function given as JSON (`-` reads stdin). Exit 0 if GAPN, 1 if not.
    Verify { file: PathBuf },
    /// Build a member of one of the explicit families and verify it.
    Construct(ConstructArgs),
    /// Exhaustively search a shape of sparse polynomials for GAPN functions.
    Search(SearchArgs),
    /// Run a named reproduction claim, or `all`.
    Reproduce {
        #[arg(long, default_value = "all")]
        claim: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    family: Family,
    #[arg(short)]
    p: u64,
    #[arg(long)]
    h: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    l: Option<u32>,
    /// Field element: `g^i` or comma-separated coefficients `c0,c1`.
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    v: Option<String>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(short)]
    p: u64,
    #[arg(short, default_value_t = 2)]
    n: u32,
    #[arg(long)]
    shape: Shape,
    /// Keep only candidates of this algebraic degree (repeatable).
    #[arg(long = "degree")]
    degrees: Vec<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Maximum number of GAPN checks before refusing to start.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Enumerate every scalar multiple instead of fixing the leading coefficient to 1.
    #[arg(long)]
    all_scalars: bool,
    /// Stop reporting after this many hits.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(short)]
    o: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Failure carrying its exit code; the message goes to stderr.
struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn table_cap() -> Result<u64, Failure> {
    match std::env::var("GAPN_TABLE_CAP") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure(EXIT_USAGE, format!("GAPN_TABLE_CAP: not an integer: {s:?}"))),
        Err(_) => Ok(DEFAULT_TABLE_CAP),
    }
}

fn field(p: u64, n: u32) -> Result<Field, Failure> {
    Ok(FieldCtx::new(p, n, None, table_cap()?)?.into())
}

fn parse_elem(k: &Field, s: &str) -> Result<FieldElem, Failure> {
    let bad = || Failure(EXIT_USAGE, format!("cannot parse field element {s:?}"));
    if let Some(i) = s.strip_prefix("g^") {
        return Ok(k.gen_pow(i.parse().map_err(|_| bad())?));
    }
    let coeffs = s
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad())?;
    Ok(k.from_coeffs(&coeffs)?)
}

/// Writes one line to stdout, reporting a closed pipe as an error rather than panicking.
fn emit(line: impl std::fmt::Display) -> Result<(), Failure> {
    writeln!(io::stdout().lock(), "{line}")?;
    Ok(())
}

fn print_json(v: &serde_json::Value) -> Outcome {
    emit(serde_json::to_string_pretty(v)?)?;
    Ok(0)
}

fn field_info(p: u64, n: u32) -> Outcome {
    print_json(&field_info_json(&field(p, n)?))
}

fn verify(path: &PathBuf) -> Outcome {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path)
            .map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    }
    let fj: FunctionJson = serde_json::from_str(&text)?;
    let f = function_from_json(&fj, table_cap()?)?;
    let v = is_gapn(&f);
    print_json(&serde_json::to_value(verdict_json(f.field(), &v))?)?;
    Ok(if v.is_gapn { 0 } else { EXIT_NEGATIVE })
}

fn require<T>(v: Option<T>, flag: &str, family: Family) -> Result<T, Failure> {
    v.ok_or_else(|| Failure(EXIT_USAGE, format!("--{flag} is required for {family}")))
}

fn construct(a: &ConstructArgs) -> Outcome {
    let k = field(a.p, 2)?;
    let recipe = match a.family {
        Family::OddBinomial => build_odd_binomial(
            &k,
            require(a.k, "k", a.family)?,
            require(a.l, "l", a.family)?,
        )?,
        Family::Mod3Binomial => build_mod3_binomial(&k, require(a.h, "h", a.family)?)?,
        Family::EvenBinomial => build_even_binomial(&k, require(a.h, "h", a.family)?)?,
        Family::Trinomial => {
            let h = require(a.h, "h", a.family)?;
            let v = match &a.v {
                Some(s) => parse_elem(&k, s)?,
                None => k.inv(k.from_int(2))?,
            };
            let u = match (&a.u, &a.v) {
                (Some(s), _) => parse_elem(&k, s)?,
                (None, None) => find_trinomial_u(&k)?,
                (None, Some(_)) => find_trinomial_u_with(&k, v)?
                    .ok_or(ConstructionError::NoTrinomialU(k.p()))?,
            };
            build_trinomial(&k, h, u, v)?
        }
    };
    let v = is_gapn(&recipe.result);
    print_json(&json!({
        "recipe": recipe_json(&recipe),
        "function": function_json(&recipe.result),
        "verdict": verdict_json(&k, &v),
    }))?;
    Ok(if v.is_gapn { 0 } else { EXIT_NEGATIVE })
}

fn search(a: &SearchArgs) -> Outcome {
    let k = field(a.p, a.n)?;
    let mut job = SearchJob::new(&k, a.shape)
        .canonical(!a.all_scalars)
        .threads(a.threads)
        .budget(a.budget);
    if !a.degrees.is_empty() {
        job = job.degrees(a.degrees.iter().copied());
    }
    if let Some(l) = a.limit {
        job = job.limit(l);
    }
    let result = run(&job)?;

    let sink: Box<dyn Write> = match &a.o {
        Some(path) => Box::new(
            File::create(path).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(sink);
    match a.format {
        Format::Json => {
            for h in &result.hits {
                writeln!(out, "{}", h.to_json())?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(CSV_HEADER)?;
            for h in &result.hits {
                w.write_record(h.csv_row())?;
            }
            w.flush()?;
        }
        Format::Text => {
            for h in &result.hits {
                writeln!(out, "#{} degree {}: {:?}", h.ordinal, h.degree, h.function)?;
            }
        }
    }
    out.flush()?;
    eprintln!("{}", result.summary.to_json(None));
    Ok(0)
}

fn reproduce_cmd(claim: &str, format: Format, threads: usize) -> Outcome {
    let ids: Vec<&str> = if claim == "all" {
        CLAIMS.iter().map(|(id, _)| *id).collect()
    } else {
        vec![claim]
    };
    let mut failed = 0;
    for id in &ids {
        let rep = reproduce(id, threads)?;
        if !rep.passed {
            failed += 1;
        }
        match format {
            Format::Json => emit(rep.to_json())?,
            Format::Csv | Format::Text => {
                let status = if rep.passed { "PASS" } else { "FAIL" };
                emit(format_args!("{status} {id} ({} ms)", rep.elapsed_ms))?;
                for note in &rep.notes {
                    emit(format_args!("    {note}"))?;
                }
            }
        }
    }
    eprintln!("{} of {} claims passed", ids.len() - failed, ids.len());
    Ok(if failed == 0 { 0 } else { EXIT_NEGATIVE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::FieldInfo { p, n } => field_info(*p, *n),
        Cmd::Verify { file } => verify(file),
        Cmd::Construct(a) => construct(a),
        Cmd::Search(a) => search(a),
        Cmd::Reproduce { claim, format, threads } => reproduce_cmd(claim, *format, *threads),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
