//! `mbqc`: compile, simulate and analyze l2-MBQC schemes from the shell.
//!
//! Every subcommand prints one JSON document (or a table with `--pretty`).
//! Exit codes: 0 success, 1 domain error (`{"error": ...}` on stdout),
//! 2 usage error.

mod pretty;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use mbqc::acceptance::{run_all, run_criterion};
use mbqc::adaptive::{chain_and, execute, execute_all, tree_and, validate, AdaptiveGraph, GraphJson};
use mbqc::boolfn::FunctionJson;
use mbqc::compiler::{
    clifford_level, compile_delta, compile_general, compile_quadratic, scheme_output_oracle, SchemeJson,
    StabilizerSchemeJson,
};
use mbqc::gf2::{parse_bitstring, to_bitstring};
use mbqc::qcount::{r_ghz_exact, r_ghz_upper_symmetric, reduce_by_zero_poly, ZeroPoly};
use mbqc::quditext::{qudit_delta_scheme, qudit_run_all};
use mbqc::simulator::{run, run_stabilizer, sample_outputs, DEFAULT_TOL};
use mbqc::stabilizer::{max_success_prob, nearest_quadratic, non_quadraticity};
use mbqc::{BoolFn, Dyadic, Error, RealPoly};

#[derive(Parser, Debug)]
#[command(name = "mbqc", version, about = "Compiler, resource analyzer and exact simulator for non-adaptive l2-MBQC")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a Boolean function into a measurement scheme.
    Compile {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, value_enum, default_value_t = Mode::General)]
        mode: Mode,
    },
    /// Simulate a scheme on every input.
    Simulate {
        /// GHZ or stabilizer scheme JSON, as emitted by `compile`.
        #[arg(long)]
        scheme: PathBuf,
        /// Function JSON to score against.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Also draw this many seeded samples per input (GHZ schemes only).
        #[arg(long, default_value_t = 0)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Qubit counts for GHZ schemes.
    Qcount {
        #[command(flatten)]
        function: FunctionArgs,
        /// Exhaustive minimization (n <= 4).
        #[arg(long)]
        exact: bool,
        /// Phases are u/2^(K-1); defaults to K = n, which is exact.
        #[arg(long)]
        level: Option<usize>,
        /// Real polynomial JSON `{"n", "coeffs": {"<mask>": "<dyadic>"}}` added to f.
        #[arg(long)]
        zero_poly: Option<PathBuf>,
        /// Upper bound for the elementary symmetric function Σ^n_k, as `N,K`.
        #[arg(long, value_parser = parse_pair, conflicts_with_all = ["anf", "hex", "anf_file"])]
        symmetric: Option<(usize, usize)>,
    },
    /// Non-quadraticity and the best stabilizer success probability.
    Nq {
        #[command(flatten)]
        function: FunctionArgs,
    },
    /// Clifford level of a GHZ scheme and the degree of its output.
    Level {
        #[arg(long)]
        scheme: PathBuf,
    },
    /// Delta function on Z_d^n for prime d, verified by qudit simulation.
    QuditDelta {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Adaptive compositions: metrics and execution.
    Adaptive {
        #[arg(long, conflicts_with_all = ["tree", "graph"])]
        chain: Option<usize>,
        #[arg(long, conflicts_with = "graph")]
        tree: Option<usize>,
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Input bits `x1 x2 ...`; omit for the full truth table.
        #[arg(long)]
        input: Option<String>,
    },
    /// Run the acceptance criteria.
    Verify {
        /// Run only this criterion.
        #[arg(long)]
        criterion: Option<usize>,
    },
}

#[derive(Args, Debug)]
#[group(skip)]
struct FunctionArgs {
    /// Arity, required with --anf and --hex.
    #[arg(long)]
    n: Option<usize>,
    /// Algebraic normal form, e.g. "x1*x2 + x3".
    #[arg(long, group = "source", requires = "n")]
    anf: Option<String>,
    /// Truth table as hex, bit i of the integer is f(i).
    #[arg(long, group = "source", requires = "n")]
    hex: Option<String>,
    /// Function JSON `{"n", "anf"}` or `{"n", "tt_hex"}`.
    #[arg(long, group = "source")]
    anf_file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    /// One qubit per Walsh coefficient.
    General,
    /// Delta function of arity n; ignores the function body.
    Delta,
    /// Stabilizer scheme for degree <= 2.
    Quadratic,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected N,K")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

type CliResult<T> = Result<T, Error>;

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn usage_error(msg: &str) -> ! {
    use clap::CommandFactory;
    Cli::command().error(clap::error::ErrorKind::MissingRequiredArgument, msg).exit()
}

fn load_function(a: &FunctionArgs) -> CliResult<BoolFn> {
    if let Some(path) = &a.anf_file {
        return read_json::<FunctionJson>(path)?.to_bool_fn();
    }
    match (a.n, &a.anf, &a.hex) {
        (Some(n), Some(expr), _) => BoolFn::from_anf(n, expr),
        (Some(n), _, Some(hex)) => BoolFn::from_hex(n, hex),
        _ => usage_error("a function is required: --n with --anf or --hex, or --anf-file"),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyScheme {
    Stabilizer(StabilizerSchemeJson),
    Ghz(SchemeJson),
}

#[derive(Deserialize)]
struct PolyJson {
    n: usize,
    /// Monomial bitstring `x1..xn` to a dyadic such as "-2" or "3/4".
    coeffs: std::collections::BTreeMap<String, String>,
}

fn parse_dyadic(s: &str) -> CliResult<Dyadic> {
    let bad = || Error::Invalid(format!("not a dyadic rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim().parse::<i64>().map_err(|_| bad())?, b.trim().parse::<u64>().map_err(|_| bad())?),
        None => (s.trim().parse::<i64>().map_err(|_| bad())?, 1),
    };
    if !den.is_power_of_two() {
        return Err(bad());
    }
    Ok(Dyadic::new(num, den.trailing_zeros()))
}

fn load_poly(path: &Path) -> CliResult<RealPoly> {
    let pj: PolyJson = read_json(path)?;
    let mut p = RealPoly::zero(pj.n)?;
    for (mask, value) in &pj.coeffs {
        let (b, len) = parse_bitstring(mask).map_err(Error::Invalid)?;
        if len != pj.n {
            return Err(Error::DimensionMismatch { expected: pj.n, got: len });
        }
        p.set(b as usize, p.coeff(b as usize) + parse_dyadic(value)?);
    }
    Ok(p)
}

fn to_value<T: serde::Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn function_json(f: &BoolFn) -> Value {
    json!({ "n": f.n(), "anf": f.to_anf().to_string(), "tt_hex": f.to_hex() })
}

/// Runs a subcommand. The flag marks whether a verification failed.
fn dispatch(cmd: Command) -> CliResult<(Value, bool)> {
    let value = match cmd {
        Command::Compile { function, mode } => {
            if let (Mode::Delta, Some(n), None) = (mode, function.n, &function.anf_file) {
                return Ok((to_value(compile_delta(n)?.to_json()), false));
            }
            let f = load_function(&function)?;
            match mode {
                Mode::General => to_value(compile_general(&f)?.to_json()),
                Mode::Delta => to_value(compile_delta(f.n())?.to_json()),
                Mode::Quadratic => to_value(compile_quadratic(&f)?.to_json()),
            }
        }
        Command::Simulate { scheme, target, tol, shots, seed } => {
            let target = target.map(|p| read_json::<FunctionJson>(&p)?.to_bool_fn()).transpose()?;
            match read_json::<AnyScheme>(&scheme)? {
                AnyScheme::Stabilizer(sj) => to_value(run_stabilizer(&sj.to_scheme()?, target.as_ref(), tol)?.to_json()),
                AnyScheme::Ghz(gj) => {
                    let s = gj.to_scheme()?;
                    let mut v = to_value(run(&s, target.as_ref(), tol)?.to_json());
                    if shots > 0 {
                        let samples = (0..1usize << s.n())
                            .map(|i| {
                                let bits = sample_outputs(&s, i, shots, seed.wrapping_add(i as u64))?;
                                let ones = bits.iter().filter(|&&b| b == 1).count();
                                Ok(json!({ "i": to_bitstring(i as u64, s.n()), "ones": ones, "shots": shots }))
                            })
                            .collect::<CliResult<Vec<_>>>()?;
                        v["samples"] = Value::Array(samples);
                    }
                    v
                }
            }
        }
        Command::Qcount { function, exact, level, zero_poly, symmetric } => {
            if let Some((n, k)) = symmetric {
                let b = r_ghz_upper_symmetric(n, k)?;
                return Ok((json!({ "n": n, "k": k, "count": b.count, "terms": b.terms }), false));
            }
            let f = load_function(&function)?;
            let mut v = json!({ "function": function_json(&f), "walsh_count": compile_general(&f)?.num_qubits() });
            if let Some(path) = zero_poly {
                let z = ZeroPoly::new(load_poly(&path)?)?;
                let s = reduce_by_zero_poly(&f, &z)?;
                v["reduced_count"] = json!(s.support_size());
            }
            if exact || level.is_some() {
                let r = r_ghz_exact(&f, level)?;
                v["count"] = json!(r.count);
                v["witness"] = to_value(r.witness.to_json());
                v["search_class"] = to_value(r.search_class);
                v["exact_within_class"] = json!(r.exact_within_class);
            } else {
                v["count"] = v["walsh_count"].clone();
            }
            v
        }
        Command::Nq { function } => {
            let f = load_function(&function)?;
            let q = nearest_quadratic(&f)?;
            json!({
                "function": function_json(&f),
                "nq": non_quadraticity(&f)?,
                "p_max": max_success_prob(&f)?.to_string(),
                "nearest_quadratic": function_json(&q),
            })
        }
        Command::Level { scheme } => {
            let s = read_json::<SchemeJson>(&scheme)?.to_scheme()?;
            let output = scheme_output_oracle(&s).ok();
            json!({
                "level": clifford_level(&s),
                "deterministic": output.is_some(),
                "degree": output.as_ref().map(BoolFn::degree),
                "output": output.as_ref().map(function_json),
            })
        }
        Command::QuditDelta { d, n, tol } => {
            let s = qudit_delta_scheme(n, d)?;
            let runs = qudit_run_all(&s, tol)?;
            let ok = runs.iter().all(|r| r.deterministic && r.delta == u32::from(r.input.iter().all(|&x| x == 0)));
            return Ok((json!({ "scheme": to_value(s.to_json()), "runs": runs, "all_correct": ok }), !ok));
        }
        Command::Adaptive { chain, tree, graph, input } => {
            let g: AdaptiveGraph = match (chain, tree, graph) {
                (Some(n), _, _) => chain_and(n)?,
                (_, Some(n), _) => tree_and(n)?,
                (_, _, Some(path)) => read_json::<GraphJson>(&path)?.to_graph()?,
                _ => return Err(Error::Invalid("one of --chain, --tree, --graph is required".into())),
            };
            let metrics = validate(&g)?;
            let mut v = json!({ "metrics": metrics, "graph": to_value(g.to_json()) });
            match input {
                Some(bits) => {
                    let (x, len) = parse_bitstring(&bits).map_err(Error::Invalid)?;
                    if len != g.n_inputs {
                        return Err(Error::DimensionMismatch { expected: g.n_inputs, got: len });
                    }
                    v["input"] = json!(bits);
                    v["output"] = json!(execute(&g, x as usize)?);
                }
                None if g.n_inputs <= 16 => v["output_fn"] = function_json(&execute_all(&g)?),
                None => {}
            }
            v
        }
        Command::Verify { criterion } => {
            let results = match criterion {
                Some(id) => vec![run_criterion(id).ok_or_else(|| Error::Invalid(format!("no criterion {id}")))?],
                None => run_all(),
            };
            let failed = results.iter().any(|r| !r.passed);
            return Ok((json!({ "criteria": results, "all_passed": !failed }), failed));
        }
    };
    Ok((value, false))
}

fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            // A reader that stops early (e.g. `head`) is not an error.
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => r,
        },
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("MBQC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let (value, code) = match dispatch(cli.command) {
        Ok((v, failed)) => (v, if failed { 1 } else { 0 }),
        Err(e) => (json!({ "error": e.to_string() }), 1),
    };
    let text = if cli.pretty { pretty::render(&value) } else { serde_json::to_string(&value).expect("serializable") };
    if let Err(e) = emit(&text, cli.out.as_deref()) {
        eprintln!("cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
