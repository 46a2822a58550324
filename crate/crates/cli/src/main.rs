//! `ellnf` — JSON-in/JSON-out front end for the classification pipelines.
//!
//! Each subcommand wraps one library entry point. Input files hold the JSON
//! produced by the corresponding `to_json` methods; `-` means stdin/stdout.
//! On failure a machine-readable error object is printed to stderr and the
//! process exits with 2 (validation), 4 (truncation too low), or 3 (other
//! mathematical precondition failures).

use std::fs;
use std::io::Read as _;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_complex::Complex64;
use serde_json::{json, Value};

use ellnf_core::bifoliated::{classify_pair, tangency};
use ellnf_core::coefficients::Coeff;
use ellnf_core::dynamics::{brjuno_profile, diophantine_profile, koenigs, CFExpansion};
use ellnf_core::germs::Germ;
use ellnf_core::neighborhood::{
    build_model, cross_ratio_slope, holonomy, involution, ModelSpec, PencilTime, Presentation,
};
use ellnf_core::normalform::{normalize_germ, HolRep};
use ellnf_core::series::{LSeries, PSeries};
use ellnf_core::error::Result;
use ellnf_core::{Approx, Approx32, Error, Exact};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Backend {
    /// Cyclotomic-rational exact arithmetic.
    Exact,
    /// Complex double precision.
    F64,
    /// Complex single precision.
    F32,
}

#[derive(Parser)]
#[command(name = "ellnf", version, about = "Formal classification toolkit for elliptic-curve neighborhoods")]
struct Cli {
    /// Coefficient backend for the algebraic subcommands.
    #[arg(long, value_enum, default_value = "exact")]
    backend: Backend,

    /// Treat inputs as truncations of unknown higher-order data (reports
    /// TRUNCATION_TOO_LOW instead of certifying periodicity).
    #[arg(long)]
    approximate: bool,

    /// Seed for randomized generators (accepted for reproducibility; the
    /// current subcommands are fully deterministic).
    #[arg(long)]
    seed: Option<u64>,

    /// Output path ("-" = stdout).
    #[arg(long, default_value = "-")]
    output: String,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normal form of a diffeomorphism germ (Germ JSON in, DiffeoNF JSON out).
    NormalizeDiffeo { file: String },
    /// Classify a commuting pair of holonomy representations
    /// ({"repF":..., "repG":...} in, PairInvariants JSON out).
    ClassifyPair { file: String },
    /// Build the model presentation of a spec ({"spec":..., "tau":...} in).
    BuildModel {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        order: usize,
    },
    /// Holonomy germ of a pencil member along one loop.
    Holonomy {
        /// Model file ({"spec":..., "tau":...}).
        #[arg(long)]
        model: String,
        /// Pencil time: a rational/decimal scalar, or "inf".
        #[arg(long)]
        t: String,
        /// Loop selector.
        #[arg(long = "loop", value_parser = ["1", "tau"])]
        loop_name: String,
        /// Truncation order of the presentation (default 2k+6).
        #[arg(long)]
        order: Option<usize>,
    },
    /// Contact order of two representations ({"repF":..., "repG":...} in).
    Tangency {
        #[arg(long)]
        pair: String,
    },
    /// Involution image of a ModelSpec (ModelSpec JSON in and out).
    Involution {
        #[arg(long)]
        spec: String,
    },
    /// Recombine three pencil slopes at cross-ratio coordinate c
    /// ({"s1":..., "s2":..., "s3":...} in, Laurent series JSON out).
    Crossratio {
        #[arg(long)]
        slopes: String,
        #[arg(long)]
        c: String,
    },
    /// Brjuno partial-sum profile of a continued fraction.
    Brjuno {
        /// Number in [0,1), as a decimal or "p/q".
        #[arg(long, conflicts_with = "cf")]
        alpha: Option<String>,
        /// Quotient file ({"quotients": ["1", "2", ...]}).
        #[arg(long)]
        cf: Option<String>,
        #[arg(long)]
        terms: usize,
    },
    /// Koenigs linearizer of a hyperbolic germ at a seed point.
    Koenigs {
        /// Map file (power-series JSON, float coefficients).
        #[arg(long)]
        map: String,
        /// Seed point, "re" or "re,im".
        #[arg(long)]
        seed: String,
        #[arg(long)]
        iters: usize,
    },
    /// Diophantine profile of a normal bundle class on C/(Z + tau Z).
    Dioph {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        z0: String,
        #[arg(long = "K")]
        big_k: usize,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
}

fn read_input(path: &str) -> Result<Value> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Validation(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Error::Validation(format!("{path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Validation(format!("{path}: bad JSON: {e}")))
}

fn write_output(path: &str, v: &Value) -> Result<()> {
    let text = format!("{}\n", serde_json::to_string_pretty(v).unwrap());
    if path == "-" {
        print!("{text}");
        Ok(())
    } else {
        fs::write(path, text).map_err(|e| Error::Validation(format!("{path}: {e}")))
    }
}

/// Parse a scalar given as an integer, "p/q", or a finite decimal (decimals
/// are converted to exact ratios, so they work on every backend).
fn parse_scalar<K: Coeff>(s: &str) -> Result<K> {
    let s = s.trim();
    let bad = || Error::Validation(format!("cannot parse scalar {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::DivisionByZero);
        }
        return Ok(K::from_ratio(p, q));
    }
    if let Ok(n) = s.parse::<i64>() {
        return Ok(K::from_int(n));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let mantissa: i64 = digits.parse().map_err(|_| bad())?;
        let denom = 10i64
            .checked_pow(frac.len() as u32)
            .ok_or_else(bad)?;
        return Ok(K::from_ratio(mantissa, denom));
    }
    Err(bad())
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let bad = || Error::Validation(format!("cannot parse complex number {s:?} (use \"re\" or \"re,im\")"));
    if let Some((re, im)) = s.split_once(',') {
        Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        ))
    } else {
        Ok(Complex64::new(s.parse().map_err(|_| bad())?, 0.0))
    }
}

fn load_model<K: Coeff>(path: &str) -> Result<(ModelSpec<K>, K)> {
    let v = read_input(path)?;
    let spec = v
        .get("spec")
        .ok_or_else(|| Error::Validation("model file needs a \"spec\" key".into()))
        .and_then(ModelSpec::from_json)?;
    let tau = v
        .get("tau")
        .ok_or_else(|| Error::Validation("model file needs a \"tau\" key".into()))
        .and_then(K::from_json)?;
    Ok((spec, tau))
}

fn load_rep_pair<K: Coeff>(path: &str) -> Result<(HolRep<K>, HolRep<K>)> {
    let v = read_input(path)?;
    let f = v
        .get("repF")
        .ok_or_else(|| Error::Validation("pair file needs a \"repF\" key".into()))
        .and_then(HolRep::from_json)?;
    let g = v
        .get("repG")
        .ok_or_else(|| Error::Validation("pair file needs a \"repG\" key".into()))
        .and_then(HolRep::from_json)?;
    Ok((f, g))
}

/// The algebraic subcommands, generic over the coefficient backend.
fn run_algebraic<K: Coeff>(cli: &Cli) -> Result<Value> {
    let assume_exact = !cli.approximate;
    match &cli.cmd {
        Cmd::NormalizeDiffeo { file } => {
            let f: Germ<K> = Germ::from_json(&read_input(file)?)?;
            if f.is_identity() {
                return Err(Error::IdentityGerm);
            }
            Ok(normalize_germ(&f, assume_exact)?.to_json())
        }
        Cmd::ClassifyPair { file } => {
            let (f, g) = load_rep_pair::<K>(file)?;
            Ok(classify_pair(&f, &g, assume_exact)?.to_json())
        }
        Cmd::BuildModel { spec, order } => {
            let (spec, tau) = load_model::<K>(spec)?;
            Ok(build_model(&spec, &tau, *order)?.to_json())
        }
        Cmd::Holonomy {
            model,
            t,
            loop_name,
            order,
        } => {
            let (spec, tau) = load_model::<K>(model)?;
            let n = order.unwrap_or(2 * spec.k + 6);
            let pres: Presentation<K> = build_model(&spec, &tau, n)?;
            let time = if t.trim().eq_ignore_ascii_case("inf") {
                PencilTime::Infinity
            } else {
                PencilTime::Finite(parse_scalar::<K>(t)?)
            };
            let rep = holonomy(&pres, &spec, &time)?;
            let germ = if loop_name == "tau" {
                rep.phitau
            } else {
                rep.phi1
            };
            Ok(germ.to_json())
        }
        Cmd::Tangency { pair } => {
            let (f, g) = load_rep_pair::<K>(pair)?;
            Ok(json!(tangency(&f, &g)?))
        }
        Cmd::Involution { spec } => {
            let spec: ModelSpec<K> = ModelSpec::from_json(&read_input(spec)?)?;
            Ok(involution(&spec)?.to_json())
        }
        Cmd::Crossratio { slopes, c } => {
            let v = read_input(slopes)?;
            let get = |key: &str| -> Result<LSeries<K>> {
                v.get(key)
                    .ok_or_else(|| Error::Validation(format!("slopes file needs {key:?}")))
                    .and_then(LSeries::from_json)
            };
            let c = parse_scalar::<K>(c)?;
            Ok(cross_ratio_slope(&get("s1")?, &get("s2")?, &get("s3")?, &c)?.to_json())
        }
        _ => unreachable!("numeric subcommands are dispatched separately"),
    }
}

fn run_numeric(cli: &Cli) -> Result<Value> {
    match &cli.cmd {
        Cmd::Brjuno { alpha, cf, terms } => {
            let expansion = match (alpha, cf) {
                (Some(a), None) => {
                    if let Some((p, q)) = a.split_once('/') {
                        let bad = || Error::Validation(format!("bad rational {a:?}"));
                        let p: BigUint = p.trim().parse().map_err(|_| bad())?;
                        let q: BigUint = q.trim().parse().map_err(|_| bad())?;
                        CFExpansion::from_rational(&p, &q)?
                    } else {
                        let x: f64 = a
                            .trim()
                            .parse()
                            .map_err(|_| Error::Validation(format!("bad decimal {a:?}")))?;
                        CFExpansion::from_real(x, terms + 8)?
                    }
                }
                (None, Some(path)) => CFExpansion::from_json(&read_input(path)?)?,
                _ => {
                    return Err(Error::Validation(
                        "exactly one of --alpha or --cf is required".into(),
                    ))
                }
            };
            let avail = expansion.qden.len().saturating_sub(1);
            Ok(brjuno_profile(&expansion, (*terms).min(avail))?.to_json())
        }
        Cmd::Koenigs { map, seed, iters } => {
            let f: PSeries<Approx> = PSeries::from_json(&read_input(map)?)?;
            let z = parse_complex(seed)?;
            Ok(koenigs(&f, z, *iters)?.to_json())
        }
        Cmd::Dioph {
            tau,
            z0,
            big_k,
            alpha,
            eps,
        } => {
            let tau = parse_complex(tau)?;
            let z0 = parse_complex(z0)?;
            Ok(diophantine_profile(tau, z0, *big_k, *alpha, *eps)?.to_json())
        }
        _ => unreachable!("algebraic subcommands are dispatched separately"),
    }
}

fn error_code(e: &Error) -> String {
    // "Validation(..)" -> "VALIDATION", "IdentityGerm" -> "IDENTITY_GERM".
    let dbg = format!("{e:?}");
    let name: String = dbg
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect();
    let mut out = String::new();
    for (i, c) in name.chars().enumerate() {
        if c.is_ascii_uppercase() && i > 0 {
            out.push('_');
        }
        out.push(c.to_ascii_uppercase());
    }
    out
}

fn main() {
    let cli = Cli::parse();
    let _ = cli.seed; // no subcommand currently draws randomness
    let numeric = matches!(cli.cmd, Cmd::Brjuno { .. } | Cmd::Koenigs { .. } | Cmd::Dioph { .. });
    let result = if numeric {
        run_numeric(&cli)
    } else {
        match cli.backend {
            Backend::Exact => run_algebraic::<Exact>(&cli),
            Backend::F64 => run_algebraic::<Approx>(&cli),
            Backend::F32 => run_algebraic::<Approx32>(&cli),
        }
    }
    .and_then(|v| write_output(&cli.output, &v));
    if let Err(e) = result {
        let obj = json!({
            "error": error_code(&e),
            "message": e.to_string(),
            "exit": e.exit_code(),
        });
        eprintln!("{}", serde_json::to_string(&obj).unwrap());
        std::process::exit(e.exit_code());
    }
}
