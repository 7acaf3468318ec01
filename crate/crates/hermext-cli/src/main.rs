//! Command-line front end: class groups, torsion subgroups, coset
//! representatives, Atkin-Lehner matrices, the orthogonal image, and the
//! verification suites.
//!
//! Exit codes: 0 on success, 1 on verification failure (with a witness in
//! the output), 2 on usage or input errors.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hermext::classgroup::ClassGroup;
use hermext::extension::{coset_representatives, atkin_decomposition};
use hermext::orthobridge::{phi_mat, GramData, OrthoMatrix};
use hermext::quadfield::FieldParams;
use hermext::verify::{run_suite, Report, Suite, VerifyOptions};

const CACHE_VERSION: u32 = 1;
const CACHE_ENV: &str = "HERMEXT_CACHE_DIR";

#[derive(Parser)]
#[command(
    name = "hermext",
    about = "Exact arithmetic for extended Hermitian modular groups over imaginary-quadratic fields",
    version
)]
struct Cli {
    /// Cache directory for class-group results (also read from HERMEXT_CACHE_DIR).
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,
    /// Emit machine-readable JSON instead of the human summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Class group of Q(sqrt(-m)): class number, structure, reduced forms.
    Classgroup(FieldArg),
    /// The n-torsion subgroup of the class group.
    Torsion(FieldDegreeArgs),
    /// Coset representatives of the extended group, one per n-torsion class.
    Cosets(FieldDegreeArgs),
    /// Atkin-Lehner matrices W_d for all squarefree d dividing the discriminant.
    Atkin(FieldArg),
    /// The exact orthogonal image of a degree-2 scaled matrix (JSON input).
    Phi {
        /// Input file with the matrix JSON; standard input when omitted.
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
    },
    /// Run a verification suite and report per-check results.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FieldArg {
    /// Squarefree positive integer m defining K = Q(sqrt(-m)).
    #[arg(short)]
    m: u64,
}

#[derive(Args)]
struct FieldDegreeArgs {
    /// Squarefree positive integer m defining K = Q(sqrt(-m)).
    #[arg(short)]
    m: u64,
    /// Degree n of the Hermitian modular group.
    #[arg(short)]
    n: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run.
    #[arg(long, value_name = "SUITE", default_value = "all")]
    suite: String,
    /// Field parameter m (required unless --corpus is given).
    #[arg(short)]
    m: Option<u64>,
    /// Degree n (default 2).
    #[arg(short, default_value_t = 2)]
    n: usize,
    /// Corpus file with one `m[,n]` pair per line; `#` starts a comment.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    /// Floating tolerance for the half-space checks.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Attach per-check timings (breaks byte-for-byte determinism).
    #[arg(long)]
    timings: bool,
}

enum CliError {
    Usage(String),
    Failure,
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failure) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn check_degree(n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(usage("degree n must be at least 1"));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cache = cli.cache.clone().or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
    match &cli.cmd {
        Cmd::Classgroup(args) => {
            let (field, cl) = load_class_group(args.m, cache.as_deref())?;
            if cli.json {
                emit(&cl.to_json());
            } else {
                println!("K = Q(sqrt(-{})), d_K = {}", field.m(), field.d_k());
                println!("h = {}", cl.h());
                println!("structure = {}", structure_string(cl.structure()));
                for f in cl.forms() {
                    let (a, b, c) = f.triple();
                    println!("form ({a}, {b}, {c})");
                }
            }
            Ok(())
        }
        Cmd::Torsion(args) => {
            check_degree(args.n)?;
            let (_, cl) = load_class_group(args.m, cache.as_deref())?;
            let torsion = cl.torsion_subgroup(args.n as u64);
            if cli.json {
                let forms: Vec<Value> =
                    torsion.iter().map(|&i| cl.form(i).to_json()).collect();
                emit(&json!({"m": args.m, "n": args.n, "torsion": forms}));
            } else {
                println!("|Cl[{}]| = {} of h = {}", args.n, torsion.len(), cl.h());
                for &i in &torsion {
                    let (a, b, c) = cl.form(i).triple();
                    println!("class ({a}, {b}, {c})");
                }
            }
            Ok(())
        }
        Cmd::Cosets(args) => {
            check_degree(args.n)?;
            let (field, cl) = load_class_group(args.m, cache.as_deref())?;
            let reps = coset_representatives(field, args.n, &cl).map_err(usage)?;
            if cli.json {
                emit(&Value::Array(reps.iter().map(|r| r.to_json()).collect()));
            } else {
                println!("{} representatives for (m, n) = ({}, {})", reps.len(), args.m, args.n);
                for r in &reps {
                    let (a, b, c) = r.class_form.triple();
                    println!(
                        "class ({a}, {b}, {c}): ell = {}, w = {}",
                        r.matrix.ell(),
                        r.matrix.w()
                    );
                }
            }
            Ok(())
        }
        Cmd::Atkin(args) => {
            let (field, cl) = load_class_group(args.m, cache.as_deref())?;
            let recs = atkin_decomposition(field).map_err(usage)?;
            if cli.json {
                let mut out = Vec::new();
                for r in &recs {
                    let dm = r.matrix.delta_membership(&cl).map_err(usage)?;
                    let class = dm.class.expect("W_d is a member");
                    let mut obj = r.to_json();
                    obj.as_object_mut()
                        .expect("record is an object")
                        .insert("class".into(), cl.form(class).to_json());
                    out.push(obj);
                }
                emit(&Value::Array(out));
            } else {
                println!("{} Atkin-Lehner cosets for m = {}", recs.len(), args.m);
                for r in &recs {
                    println!("W_{}: ell = {}, w = {}", r.d, r.matrix.ell(), r.matrix.w());
                }
            }
            Ok(())
        }
        Cmd::Phi { input } => {
            let text = match input {
                Some(path) => std::fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?,
                None => {
                    let mut buf = String::new();
                    std::io::stdin()
                        .read_to_string(&mut buf)
                        .map_err(|e| usage(format!("cannot read standard input: {e}")))?;
                    buf
                }
            };
            let value: Value =
                serde_json::from_str(&text).map_err(|e| usage(format!("invalid JSON: {e}")))?;
            let matrix = hermext::matgroup::ScaledMatrix::from_json(&value).map_err(usage)?;
            let gram = GramData::new(matrix.field());
            let image: OrthoMatrix = phi_mat(&matrix, &gram).map_err(usage)?;
            emit(&image.to_json());
            Ok(())
        }
        Cmd::Verify(args) => verify(args, cli.json, cache.as_deref()),
    }
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string(v).expect("JSON serialization cannot fail"));
}

fn structure_string(divisors: &[u64]) -> String {
    if divisors.is_empty() {
        "trivial".into()
    } else {
        divisors.iter().map(|d| format!("C_{d}")).collect::<Vec<_>>().join(" x ")
    }
}

/// Class-group lookup with the optional on-disk cache: files are keyed by
/// `m`, stamped with a format version, and written atomically.
fn load_class_group(m: u64, cache: Option<&Path>) -> Result<(FieldParams, ClassGroup), CliError> {
    let field = FieldParams::new(m).map_err(usage)?;
    let Some(dir) = cache else {
        return Ok((field, ClassGroup::new(field)));
    };
    let path = dir.join(format!("classgroup-v{CACHE_VERSION}-m{m}.json"));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(value) = serde_json::from_str::<Value>(&text) {
            if let Ok(cl) = ClassGroup::from_json(field, &value) {
                return Ok((field, cl));
            }
        }
        // stale or corrupt cache entries are recomputed and overwritten
    }
    let cl = ClassGroup::new(field);
    if let Err(e) = write_atomically(&path, &serde_json::to_string(&cl.to_json()).expect("valid JSON")) {
        eprintln!("warning: cannot write cache entry {}: {e}", path.display());
    }
    Ok((field, cl))
}

fn write_atomically(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

fn parse_corpus(path: &Path, default_n: usize) -> Result<Vec<(u64, usize)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read corpus {}: {e}", path.display())))?;
    let mut jobs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let m = parts
            .next()
            .filter(|s| !s.is_empty())
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| usage(format!("corpus line {}: bad field `m`", lineno + 1)))?;
        let n = match parts.next() {
            None => default_n,
            Some(s) => s
                .parse::<usize>()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| usage(format!("corpus line {}: bad field `n`", lineno + 1)))?,
        };
        if parts.next().is_some() {
            return Err(usage(format!("corpus line {}: expected `m[,n]`", lineno + 1)));
        }
        jobs.push((m, n));
    }
    if jobs.is_empty() {
        return Err(usage(format!("corpus {} contains no jobs", path.display())));
    }
    Ok(jobs)
}

fn verify(args: &VerifyArgs, json: bool, cache: Option<&Path>) -> Result<(), CliError> {
    check_degree(args.n)?;
    let suite = Suite::from_str(&args.suite).map_err(usage)?;
    let jobs: Vec<(u64, usize)> = match (&args.corpus, args.m) {
        (Some(path), _) => parse_corpus(path, args.n)?,
        (None, Some(m)) => vec![(m, args.n)],
        (None, None) => return Err(usage("verify needs -m or --corpus")),
    };
    // warm the cache so parallel jobs do not race on the same entry
    for &(m, _) in &jobs {
        let _ = load_class_group(m, cache)?;
    }
    let opts = VerifyOptions { tolerance: args.tolerance };
    let reports: Vec<hermext::Result<Report>> =
        hermext::parallel::batch_map(&jobs, |&(m, n)| run_suite(suite, m, n, &opts));
    let mut all_ok = true;
    let mut out = Vec::new();
    for r in reports {
        let report = r.map_err(usage)?;
        all_ok &= report.ok();
        out.push(report);
    }
    if json {
        let payload: Vec<Value> = out.iter().map(|r| r.to_json(args.timings)).collect();
        if payload.len() == 1 {
            emit(&payload[0]);
        } else {
            emit(&Value::Array(payload));
        }
    } else {
        for report in &out {
            println!("suite {} for (m, n) = ({}, {})", report.suite, report.m, report.n);
            for check in &report.checks {
                if check.passed {
                    if args.timings {
                        println!("  PASS {} ({} ms)", check.name, check.millis);
                    } else {
                        println!("  PASS {}", check.name);
                    }
                } else {
                    println!(
                        "  FAIL {} witness: {}",
                        check.name,
                        serde_json::to_string(check.witness.as_ref().unwrap_or(&Value::Null))
                            .expect("valid JSON")
                    );
                }
            }
        }
        println!("{}", if all_ok { "all checks passed" } else { "verification FAILED" });
    }
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Failure)
    }
}
