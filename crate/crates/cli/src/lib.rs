//! Command dispatch for the `mumford` binary, kept in a library so that it can
//! be driven in-process by tests.

use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use mumford_core::arith::{fmt_rational, is_prime, parse_rational};
use mumford_core::classifier::{bound_text, TateCheck};
use mumford_core::group::kernel_rank_formula;
use mumford_core::schottky::PresentationJson;
use mumford_core::{
    alpha_bound, classify, classify_four_point, kernel_generators_rs, quotient_tree,
    subgroup_index, synthesize, tate_j_check, torsion_scan, verify_schottky, CoverSpec,
    CyclicAssignment, Error, FreeProduct, KummerEquation, KummerInput, MumfordVerdict,
    SchottkyPresentation, Valuation,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "mumford",
    version,
    about = "Mumford covers, Schottky generators and free-product oracles over p-adic fields"
)]
struct Cli {
    /// Residue characteristic.
    #[arg(long, global = true, default_value_t = 2)]
    p: u64,
    /// Working precision in uniformizer digits (at least 8).
    #[arg(long, global = true, default_value_t = 64)]
    precision: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Read the JSON payload from a file instead of stdin.
    #[arg(long = "in", global = true)]
    input: Option<String>,
    /// Wrap the output as {"status", "payload", "diagnostics"}.
    #[arg(long, global = true)]
    envelope: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sharp separation threshold α_p(m, n).
    Bound { m: u64, n: u64 },
    /// Classify a superelliptic equation given as JSON {degree, terms: [{point, exp}]}.
    Classify {
        /// Only run the four-point test.
        #[arg(long)]
        four_point: bool,
    },
    /// Schottky generators for the kernel of C_d * C_e -> C_lcm(d,e).
    Synthesize(SynthArgs),
    /// Ford-domain certificate for a presentation (stdin) or for fresh synthesis flags.
    Verify {
        #[command(flatten)]
        synth: OptSynthArgs,
    },
    /// Quotient tree of C_m * C_n for v(λ - 1) = lambda_val.
    Tree {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long = "lambda-val")]
        lambda_val: String,
    },
    /// Reidemeister-Schreier basis, rank and torsion scan for a cyclic quotient.
    Oracle {
        /// Factor orders, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        orders: Vec<u64>,
        #[arg(long)]
        n: u64,
        /// Images of the factor generators in C_n, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        images: Vec<u64>,
        /// Syllable bound for the torsion scan (skipped when absent).
        #[arg(long)]
        torsion_length: Option<usize>,
    },
}

#[derive(clap::Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    d: u64,
    #[arg(long)]
    e: u64,
    #[arg(long)]
    lambda: String,
    #[arg(long, default_value_t = 1)]
    f: u64,
    #[arg(long, default_value_t = 1)]
    k: u64,
    #[arg(long, default_value_t = 1)]
    l: u64,
}

#[derive(clap::Args, Debug)]
struct OptSynthArgs {
    #[arg(long, requires_all = ["e", "lambda"])]
    d: Option<u64>,
    #[arg(long)]
    e: Option<u64>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long, default_value_t = 1)]
    f: u64,
    #[arg(long, default_value_t = 1)]
    k: u64,
    #[arg(long, default_value_t = 1)]
    l: u64,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Typed(Error),
    Malformed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(m) => Failure::Malformed(m),
            e => Failure::Typed(e),
        }
    }
}

struct Response {
    payload: Value,
    text: Option<String>,
    diagnostics: Vec<String>,
}

impl Response {
    fn json<T: Serialize>(v: &T) -> Self {
        Response {
            payload: serde_json::to_value(v).expect("serializable"),
            text: None,
            diagnostics: Vec::new(),
        }
    }
}

pub fn run<I, S>(args: I, stdin: &mut dyn Read) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_MALFORMED,
            };
            return Output {
                code,
                stdout: if code == 0 {
                    e.to_string()
                } else {
                    String::new()
                },
                stderr: if code == 0 {
                    String::new()
                } else {
                    e.to_string()
                },
            };
        }
    };
    let envelope = cli.envelope;
    match dispatch(cli, stdin) {
        Ok(r) => {
            let stdout = match (&r.text, envelope) {
                (Some(t), false) => t.clone(),
                (Some(t), true) => {
                    line(&json!({"status": "ok", "payload": t, "diagnostics": r.diagnostics}))
                }
                (None, false) => line(&r.payload),
                (None, true) => line(
                    &json!({"status": "ok", "payload": r.payload, "diagnostics": r.diagnostics}),
                ),
            };
            let stderr = if envelope {
                String::new()
            } else {
                r.diagnostics
                    .iter()
                    .map(|d| format!("warning: {d}\n"))
                    .collect()
            };
            Output {
                code: EXIT_OK,
                stdout,
                stderr,
            }
        }
        Err(Failure::Typed(e)) => error_output(EXIT_ERROR, e.code(), &e.to_string()),
        Err(Failure::Malformed(m)) => error_output(EXIT_MALFORMED, "MALFORMED_INPUT", &m),
    }
}

fn line(v: &Value) -> String {
    format!("{}\n", serde_json::to_string(v).expect("serializable"))
}

fn error_output(code: i32, tag: &str, message: &str) -> Output {
    let body = json!({"status": "error", "code": tag, "message": message, "diagnostics": []});
    Output {
        code,
        stdout: line(&body),
        stderr: format!("error[{tag}]: {message}\n"),
    }
}

fn read_payload(path: &Option<String>, stdin: &mut dyn Read) -> Result<Value, Failure> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text =
                std::fs::read_to_string(p).map_err(|e| Failure::Malformed(format!("{p}: {e}")))?;
        }
        None => {
            stdin
                .read_to_string(&mut text)
                .map_err(|e| Failure::Malformed(format!("stdin: {e}")))?;
        }
    }
    serde_json::from_str(&text).map_err(|e| Failure::Malformed(format!("invalid JSON: {e}")))
}

fn schema<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(|e| Failure::Malformed(format!("{what}: {e}")))
}

fn dispatch(cli: Cli, stdin: &mut dyn Read) -> Result<Response, Failure> {
    if !is_prime(cli.p) {
        return Err(Failure::Malformed(format!("--p {} is not a prime", cli.p)));
    }
    if cli.precision < 8 {
        return Err(Failure::Malformed(format!(
            "--precision {} is below 8",
            cli.precision
        )));
    }
    if cli.format == Format::Dot && !matches!(cli.command, Command::Tree { .. }) {
        return Err(Failure::Malformed(
            "--format dot is only valid for tree".into(),
        ));
    }
    let (p, precision) = (cli.p, cli.precision);
    let mut diagnostics = Vec::new();
    if precision < 32 {
        diagnostics.push(format!("working precision {precision} is low; deep valuations may report INSUFFICIENT_PRECISION"));
    }
    let mut resp = match cli.command {
        Command::Bound { m, n } => bound(p, m, n)?,
        Command::Classify { four_point } => {
            let mut v = read_payload(&cli.input, stdin)?;
            let obj = v
                .as_object_mut()
                .ok_or_else(|| Failure::Malformed("payload must be an object".into()))?;
            obj.entry("p").or_insert(json!(p));
            obj.entry("precision").or_insert(json!(precision));
            let input: KummerInput = schema(v, "classify payload")?;
            let eq = input.build()?;
            classify_response(&eq, four_point)?
        }
        Command::Synthesize(a) => {
            let spec =
                CoverSpec::new(p, a.d, a.e, &a.lambda, Some(precision))?.with_twists(a.f, a.k, a.l);
            Response::json(&synthesize(&spec)?.to_json())
        }
        Command::Verify { synth } => {
            let pres = match (synth.d, synth.e, synth.lambda) {
                (Some(d), Some(e), Some(lambda)) => {
                    let spec = CoverSpec::new(p, d, e, &lambda, Some(precision))?
                        .with_twists(synth.f, synth.k, synth.l);
                    synthesize(&spec)?
                }
                _ => {
                    let j: PresentationJson =
                        schema(read_payload(&cli.input, stdin)?, "presentation")?;
                    SchottkyPresentation::from_json(&j)?
                }
            };
            let report = verify_schottky(&pres)?;
            let mut r = Response::json(&report);
            if report.skipped_coincident_pairs > 0 {
                r.diagnostics.push(format!(
                    "{} coincident circle pairs skipped",
                    report.skipped_coincident_pairs
                ));
            }
            r
        }
        Command::Tree { m, n, lambda_val } => {
            let lv = parse_rational(&lambda_val)?;
            let q = quotient_tree(p, m, n, lv)?;
            match cli.format {
                Format::Dot => Response {
                    payload: Value::Null,
                    text: Some(q.to_dot()),
                    diagnostics: Vec::new(),
                },
                Format::Json => Response::json(&q),
            }
        }
        Command::Oracle {
            orders,
            n,
            images,
            torsion_length,
        } => oracle(orders, n, images, torsion_length)?,
    };
    diagnostics.append(&mut resp.diagnostics);
    resp.diagnostics = diagnostics;
    Ok(resp)
}

#[derive(Serialize)]
struct BoundOut {
    threshold_val: String,
    bound: String,
}

fn bound(p: u64, m: u64, n: u64) -> Result<Response, Failure> {
    if m < 1 || n < 1 {
        return Err(Failure::Malformed("orders must be positive".into()));
    }
    let out = match alpha_bound(p, m, n) {
        Valuation::Finite(t) => BoundOut {
            threshold_val: fmt_rational(&t),
            bound: bound_text(p, t),
        },
        Valuation::Top => BoundOut {
            threshold_val: "inf".into(),
            bound: "0".into(),
        },
    };
    Ok(Response::json(&out))
}

#[derive(Serialize)]
struct TateOut {
    j: String,
    lambda_close: bool,
    j_large: bool,
    consistent: bool,
}

impl From<TateCheck> for TateOut {
    fn from(t: TateCheck) -> Self {
        TateOut {
            j: t.j.to_text(),
            lambda_close: t.lambda_close,
            j_large: t.j_large,
            consistent: t.consistent,
        }
    }
}

#[derive(Serialize)]
struct ClassifyOut {
    #[serde(flatten)]
    verdict: MumfordVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    tate: Option<TateOut>,
}

/// λ when the equation is the Legendre form y^2 = x(x - 1)(x - λ) over Q_2.
fn legendre_lambda(eq: &KummerEquation) -> Option<mumford_core::PadicElement> {
    if eq.degree() != 2 || eq.field().p() != 2 || eq.terms().len() != 4 {
        return None;
    }
    let f = eq.field();
    let mut rest = Vec::new();
    let (mut zero, mut one, mut inf) = (false, false, false);
    for (pt, _) in eq.terms() {
        match pt.affine_value() {
            None => inf = true,
            Some(x) if x.is_zero() => zero = true,
            Some(x) if (&x - &f.one()).is_zero() => one = true,
            Some(x) => rest.push(x),
        }
    }
    (zero && one && inf && rest.len() == 1).then(|| rest.pop().unwrap())
}

fn classify_response(eq: &KummerEquation, four_point: bool) -> Result<Response, Failure> {
    let verdict = if four_point {
        classify_four_point(eq)?
    } else {
        classify(eq)?
    };
    let tate = match legendre_lambda(eq) {
        Some(l) => Some(tate_j_check(&l)?.into()),
        None => None,
    };
    Ok(Response::json(&ClassifyOut { verdict, tate }))
}

#[derive(Serialize)]
struct OracleOut {
    orders: Vec<u64>,
    n: u64,
    images: Vec<u64>,
    rank: usize,
    formula_rank: i64,
    /// Index of the subgroup generated by the basis, by coset enumeration.
    index: Option<usize>,
    generators: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    torsion_free: Option<bool>,
}

fn oracle(
    orders: Vec<u64>,
    n: u64,
    images: Vec<u64>,
    torsion_length: Option<usize>,
) -> Result<Response, Failure> {
    let fp = FreeProduct::new(orders.clone())?;
    let a = CyclicAssignment::new(&fp, n, images.clone())?;
    let gens = kernel_generators_rs(&fp, &a)?;
    let names: Option<&[&str]> = if orders.len() == 2 {
        Some(&["s", "t"])
    } else {
        None
    };
    let out = OracleOut {
        orders,
        n,
        images,
        rank: gens.len(),
        formula_rank: kernel_rank_formula(&fp, n),
        index: subgroup_index(&fp, &gens, 200_000),
        generators: gens.iter().map(|w| fp.format(w, names)).collect(),
        torsion_free: torsion_length.map(|l| torsion_scan(&fp, Some(&a), l)),
    };
    Ok(Response::json(&out))
}
