//! `mvldc` — matching-vector locally decodable codes from the command line.
//!
//! Every pipeline stage is a subcommand: field construction, canonical
//! sets, decoding-polynomial search and verification, composition,
//! matching-vector family search, encode/decode/corrupt/trials, a PIR
//! demonstration, and the batch polynomial hunt.
//!
//! Contract: JSON output (`--format json`) is the machine interface, text
//! is a rendering of the same data; identical invocations are byte-
//! identical. Exit codes: 0 = found/verified, 2 = certified nonexistent,
//! exhausted, or failed verification, 1 = error (with a JSON error object
//! on stderr). Budget caps can be overridden by environment variables:
//! `MVLDC_SEARCH_CEILING` (polynomial search work estimate),
//! `MVLDC_FAMILY_BUDGET` (family search nodes per root), and
//! `MVLDC_ENUM_GUARD` (exact-enumeration cutoff for privacy certificates).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use mvldc::compose;
use mvldc::decpoly::{
    canonical_polynomial, exhaustive_search, verify_decoding, DecodingPolynomial, PolyVerdict,
    SearchOutcome,
};
use mvldc::gf2::{build_field, find_order_m_element, mult_order_of_2, Fe, FieldCtx};
use mvldc::ldc::{self, Code, Codeword, CorruptionMode, TrialConfig};
use mvldc::mvfam::{search_family, FamilySearch, MatchingFamily};
use mvldc::par::Parallelism;
use mvldc::pir::{self, PirInstance, PrivacyCertificate, PrivacyEntry};
use mvldc::zmod::{canonical_set, Modulus};
use mvldc::Error;

#[derive(Parser)]
#[command(name = "mvldc", version, about = "matching-vector locally decodable codes")]
struct Cli {
    /// Seed for every randomized step; fixed seed means byte-identical output
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,

    /// Worker threads: 0 = all cores, 1 = sequential
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Field parameters for a modulus: t, modulus polynomial, generator, γ
    FieldInfo {
        #[arg(long)]
        m: u64,
    },
    /// The canonical set S_m
    CanonicalSet {
        #[arg(long)]
        m: u64,
    },
    /// Exhaustive minimal-monomial search for an S_m-decoding polynomial
    FindPoly {
        #[arg(long)]
        m: u64,
        #[arg(long = "max-k")]
        max_k: usize,
        /// Write the found polynomial here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The (|S_m|+1)-monomial product-construction polynomial
    CanonicalPoly {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a stored polynomial against its canonical set
    VerifyPoly {
        #[arg(long)]
        file: PathBuf,
    },
    /// Compose two coprime-moduli polynomials into one for m₁·m₂
    Compose {
        #[arg(long)]
        p1: PathBuf,
        #[arg(long)]
        p2: PathBuf,
        /// Write the composed polynomial here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the composition plan summary here
        #[arg(long = "plan-out")]
        plan_out: Option<PathBuf>,
    },
    /// Search for an n-vector matching family in Z_m^h
    SearchMv {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a message (comma-separated hex symbols) to a codeword file
    Encode {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        message: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode one message symbol from a codeword file
    Decode {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        word: PathBuf,
        #[arg(long)]
        index: usize,
    },
    /// Corrupt a stored codeword at ⌊δN⌋ positions
    Corrupt {
        #[arg(long)]
        word: PathBuf,
        #[arg(long)]
        delta: f64,
        /// Adversarial positions (comma-separated); omitted = uniform
        #[arg(long)]
        positions: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo decode-failure rate under corruption
    Trials {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        message: String,
        #[arg(long)]
        index: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        trials: u64,
        /// Adversarial positions (comma-separated); omitted = uniform
        #[arg(long)]
        positions: Option<String>,
    },
    /// One full PIR retrieval with privacy certificate and bit accounting
    PirDemo {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        index: usize,
        /// Database length (family size to search for)
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Database symbols (comma-separated hex); omitted = seed-derived
        #[arg(long)]
        message: Option<String>,
    },
    /// Batch minimal-monomial search over candidate moduli
    Hunt {
        /// JSON file holding an array of moduli
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long = "max-k")]
        max_k: usize,
        /// Resumable results file, rewritten after every modulus
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
}

/// What a subcommand hands back to `main` for printing.
struct Outcome {
    code: u8,
    text: String,
    json: Value,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Outcome {
        Outcome { code: 0, text, json }
    }

    /// A definitive negative result (nonexistent / exhausted / invalid).
    fn negative(text: String, json: Value) -> Outcome {
        Outcome { code: 2, text, json }
    }
}

/// Write to stdout, exiting quietly when the reader has gone away
/// (`mvldc ... | head` must not panic) and loudly on any real I/O error.
fn emit(s: std::fmt::Arguments) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let res = out.write_fmt(s).and_then(|()| out.flush());
    if let Err(e) = res {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("{}", json!({ "error": format!("stdout: {e}") }));
        std::process::exit(1);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                emit(format_args!("{e}"));
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", json!({ "error": e.to_string() }));
            return ExitCode::from(1);
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            match format {
                OutFormat::Text => emit(format_args!("{}\n", out.text.trim_end())),
                OutFormat::Json => {
                    emit(format_args!(
                        "{}\n",
                        serde_json::to_string_pretty(&out.json).expect("valid json")
                    ));
                }
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string() }));
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let par = parallelism(cli.threads);
    let seed = cli.seed;
    match cli.cmd {
        Cmd::FieldInfo { m } => field_info(m),
        Cmd::CanonicalSet { m } => canonical_set_cmd(m),
        Cmd::FindPoly { m, max_k, out } => find_poly(m, max_k, out.as_deref(), par),
        Cmd::CanonicalPoly { m, out } => canonical_poly(m, out.as_deref()),
        Cmd::VerifyPoly { file } => verify_poly(&file),
        Cmd::Compose { p1, p2, out, plan_out } => {
            compose_cmd(&p1, &p2, out.as_deref(), plan_out.as_deref())
        }
        Cmd::SearchMv { m, h, n, out } => search_mv(m, h, n, seed, out.as_deref(), par),
        Cmd::Encode { family, poly, message, out } => {
            encode_cmd(&family, &poly, &message, &out, par)
        }
        Cmd::Decode { family, poly, word, index } => {
            decode_cmd(&family, &poly, &word, index, seed)
        }
        Cmd::Corrupt { word, delta, positions, out } => {
            corrupt_cmd(&word, delta, positions.as_deref(), &out, seed)
        }
        Cmd::Trials { family, poly, message, index, delta, trials, positions } => trials_cmd(
            &family,
            &poly,
            &message,
            index,
            delta,
            trials,
            positions.as_deref(),
            seed,
            par,
        ),
        Cmd::PirDemo { m, h, index, n, message } => {
            pir_demo(m, h, index, n, message.as_deref(), seed, par)
        }
        Cmd::Hunt { candidates, max_k, checkpoint } => {
            hunt_cmd(&candidates, max_k, checkpoint.as_deref(), par)
        }
    }
}

// ---------------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------------

fn parallelism(threads: usize) -> Parallelism {
    match threads {
        0 => Parallelism::Auto,
        1 => Parallelism::Sequential,
        n => Parallelism::Threads(n),
    }
}

/// Parse an environment override; absent means `None` (built-in default).
fn env_override<T: FromStr>(name: &'static str) -> Result<Option<T>, Error> {
    match std::env::var(name) {
        Ok(v) => v.trim().parse::<T>().map(Some).map_err(|_| Error::Format {
            what: "environment override",
            detail: format!("{name}={v} is not a valid number"),
        }),
        Err(_) => Ok(None),
    }
}

/// Build the native field and order-m γ for a modulus.
fn native_field(m: u64) -> Result<(Modulus, FieldCtx, mvldc::gf2::OrderMElement), Error> {
    let modulus = Modulus::factorize(m)?;
    let t = mult_order_of_2(&modulus) as u32;
    let ctx = build_field(t, None)?;
    let gamma = find_order_m_element(&ctx, &modulus)?;
    Ok((modulus, ctx, gamma))
}

fn load_code(family: &Path, poly: &Path) -> Result<Code, Error> {
    let family = MatchingFamily::read_file(family)?;
    let poly = DecodingPolynomial::read_file(poly)?;
    Code::with_native_field(family, poly)
}

/// Comma-separated hex field symbols.
fn parse_symbols(ctx: &FieldCtx, s: &str) -> Result<Vec<Fe>, Error> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let bits = u64::from_str_radix(tok, 16).map_err(|_| Error::BadHex(tok.to_string()))?;
            ctx.element_from_bits(bits)
        })
        .collect()
}

/// Comma-separated decimal positions.
fn parse_positions(s: &str) -> Result<Vec<u64>, Error> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<u64>().map_err(|_| Error::Format {
                what: "position list",
                detail: format!("{tok} is not a position"),
            })
        })
        .collect()
}

fn hex(v: u64) -> String {
    format!("{v:x}")
}

fn poly_text(p: &DecodingPolynomial) -> String {
    let mut s = format!(
        "m: {}\nt1: {}\ngamma-minpoly: {}\nk: {}\n",
        p.m(),
        p.t1(),
        hex(p.gamma_minpoly()),
        p.k()
    );
    for t in p.terms() {
        s.push_str(&format!("term: coef={} exp={}\n", hex(t.coef), t.exp));
    }
    s
}

fn family_text(f: &MatchingFamily) -> String {
    let mut s = format!("m: {}\nh: {}\nn: {}\n", f.m(), f.h(), f.n());
    for (i, v) in f.vectors().iter().enumerate() {
        let coords: Vec<String> = v.coords().iter().map(u64::to_string).collect();
        s.push_str(&format!("vector {i}: {}\n", coords.join(" ")));
    }
    s
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn field_info(m: u64) -> Result<Outcome, Error> {
    let (_, ctx, gamma) = native_field(m)?;
    let g = gamma.element();
    let text = format!(
        "m: {m}\nt: {}\nmodulus-poly: {}\ngenerator: {}\ngamma: {}\ngamma-minpoly: {}\n",
        ctx.t(),
        hex(ctx.modulus_poly()),
        hex(ctx.generator().bits()),
        hex(g.bits()),
        hex(ctx.minimal_polynomial(g)),
    );
    let json = json!({
        "m": m,
        "t": ctx.t(),
        "modulus_poly": hex(ctx.modulus_poly()),
        "generator": hex(ctx.generator().bits()),
        "gamma": hex(g.bits()),
        "gamma_minpoly": hex(ctx.minimal_polynomial(g)),
    });
    Ok(Outcome::ok(text, json))
}

fn canonical_set_cmd(m: u64) -> Result<Outcome, Error> {
    let modulus = Modulus::factorize(m)?;
    let s = canonical_set(&modulus);
    let factors: Vec<String> = modulus
        .factors()
        .iter()
        .map(|&(p, e)| {
            if e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect();
    let elems: Vec<String> = s.sorted().iter().map(u64::to_string).collect();
    let text = format!(
        "m: {m}\nfactors: {}\nsize: {}\ns: {}\n",
        factors.join(" "),
        s.len(),
        elems.join(" ")
    );
    let json = json!({
        "m": m,
        "factors": modulus.factors(),
        "size": s.len(),
        "s": s.sorted(),
    });
    Ok(Outcome::ok(text, json))
}

fn find_poly(m: u64, max_k: usize, out: Option<&Path>, par: Parallelism) -> Result<Outcome, Error> {
    let (modulus, ctx, gamma) = native_field(m)?;
    let s = canonical_set(&modulus);
    let ceiling = env_override::<u128>("MVLDC_SEARCH_CEILING")?;
    match exhaustive_search(s.sorted(), &gamma, &ctx, max_k, ceiling, par)? {
        SearchOutcome::Found(poly) => {
            if let Some(path) = out {
                poly.write_file(path)?;
            }
            let text = format!("outcome: found\n{}", poly_text(&poly));
            let json = json!({
                "m": m,
                "max_k": max_k,
                "outcome": "found",
                "polynomial": to_value(&poly),
            });
            Ok(Outcome::ok(text, json))
        }
        SearchOutcome::Nonexistent(cert) => {
            let text = format!(
                "outcome: nonexistent\nm: {m}\nmax-k: {}\nsubsets-checked: {}\n",
                cert.max_k, cert.subsets_checked
            );
            let json = json!({
                "m": m,
                "max_k": max_k,
                "outcome": "nonexistent",
                "certificate": to_value(&cert),
            });
            Ok(Outcome::negative(text, json))
        }
    }
}

fn canonical_poly(m: u64, out: Option<&Path>) -> Result<Outcome, Error> {
    let (modulus, ctx, gamma) = native_field(m)?;
    let s = canonical_set(&modulus);
    let poly = canonical_polynomial(s.sorted(), &gamma, &ctx)?;
    if let Some(path) = out {
        poly.write_file(path)?;
    }
    let json = json!({ "m": m, "polynomial": to_value(&poly) });
    Ok(Outcome::ok(poly_text(&poly), json))
}

fn verify_poly(file: &Path) -> Result<Outcome, Error> {
    let poly = DecodingPolynomial::read_file(file)?;
    let (ctx, gamma) = poly.native_ctx()?;
    let modulus = Modulus::factorize(poly.m())?;
    let s = canonical_set(&modulus);
    let verdict = verify_decoding(&poly, s.sorted(), &gamma, &ctx)?;
    let base = json!({ "m": poly.m(), "k": poly.k() });
    match verdict {
        PolyVerdict::Valid => {
            let text = format!("verdict: valid\nm: {}\nk: {}\n", poly.m(), poly.k());
            let mut json = base;
            json["verdict"] = json!("valid");
            Ok(Outcome::ok(text, json))
        }
        PolyVerdict::ViolationAtOne { got } => {
            let text = format!("verdict: violation\nat: 1\ngot: {}\n", hex(got));
            let mut json = base;
            json["verdict"] = json!({ "violation_at_one": { "got": hex(got) } });
            Ok(Outcome::negative(text, json))
        }
        PolyVerdict::ViolationAtS { s, got } => {
            let text = format!("verdict: violation\nat: s={s}\ngot: {}\n", hex(got));
            let mut json = base;
            json["verdict"] = json!({ "violation_at_s": { "s": s, "got": hex(got) } });
            Ok(Outcome::negative(text, json))
        }
    }
}

fn compose_cmd(
    p1: &Path,
    p2: &Path,
    out: Option<&Path>,
    plan_out: Option<&Path>,
) -> Result<Outcome, Error> {
    let p1 = DecodingPolynomial::read_file(p1)?;
    let p2 = DecodingPolynomial::read_file(p2)?;
    let plan = compose::plan(&p1, &p2)?;
    let composed = compose::compose_polynomials(&plan, &p1, &p2)?;
    let summary = plan.summary();
    if let Some(path) = out {
        composed.write_file(path)?;
    }
    if let Some(path) = plan_out {
        let mut body = serde_json::to_string_pretty(&summary).expect("serializable");
        body.push('\n');
        std::fs::write(path, body)?;
    }
    let text = format!(
        "m1: {}\nm2: {}\nt: {}\nh1: {}\nh2: {}\n{}",
        summary.m1,
        summary.m2,
        summary.t,
        summary.h1,
        summary.h2,
        poly_text(&composed)
    );
    let json = json!({ "plan": to_value(&summary), "polynomial": to_value(&composed) });
    Ok(Outcome::ok(text, json))
}

fn search_mv(
    m: u64,
    h: usize,
    n: usize,
    seed: u64,
    out: Option<&Path>,
    par: Parallelism,
) -> Result<Outcome, Error> {
    let modulus = Modulus::factorize(m)?;
    let budget = env_override::<u64>("MVLDC_FAMILY_BUDGET")?;
    match search_family(&modulus, h, n, seed, budget, par)? {
        FamilySearch::Found(family) => {
            if let Some(path) = out {
                family.write_file(path)?;
            }
            let text = format!("outcome: found\n{}", family_text(&family));
            let json = json!({ "outcome": "found", "family": to_value(&family) });
            Ok(Outcome::ok(text, json))
        }
        FamilySearch::Exhausted { nodes } => {
            let text = format!("outcome: exhausted\nnodes: {nodes}\n");
            let json = json!({ "outcome": "exhausted", "nodes": nodes });
            Ok(Outcome::negative(text, json))
        }
        FamilySearch::BudgetExceeded { roots_exceeded, nodes } => {
            let text =
                format!("outcome: budget-exceeded\nroots-exceeded: {roots_exceeded}\nnodes: {nodes}\n");
            let json = json!({
                "outcome": "budget-exceeded",
                "roots_exceeded": roots_exceeded,
                "nodes": nodes,
            });
            Ok(Outcome::negative(text, json))
        }
    }
}

fn encode_cmd(
    family: &Path,
    poly: &Path,
    message: &str,
    out: &Path,
    par: Parallelism,
) -> Result<Outcome, Error> {
    let code = load_code(family, poly)?;
    let x = parse_symbols(code.ctx(), message)?;
    let word = code.encode(&x, par)?;
    word.write_file(out)?;
    let text = format!(
        "n: {}\npositions: {}\nt: {}\nfile: {}\n",
        code.n(),
        word.len(),
        word.t(),
        out.display()
    );
    let json = json!({
        "n": code.n(),
        "positions": word.len(),
        "t": word.t(),
        "file": out.display().to_string(),
    });
    Ok(Outcome::ok(text, json))
}

fn decode_cmd(
    family: &Path,
    poly: &Path,
    word: &Path,
    index: usize,
    seed: u64,
) -> Result<Outcome, Error> {
    let code = load_code(family, poly)?;
    let word = Codeword::read_file(word)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let value = code.decode(index, &word, &mut rng)?;
    let text = format!("i: {index}\nsymbol: {}\n", hex(value.bits()));
    let json = json!({ "i": index, "symbol": hex(value.bits()) });
    Ok(Outcome::ok(text, json))
}

fn corrupt_cmd(
    word: &Path,
    delta: f64,
    positions: Option<&str>,
    out: &Path,
    seed: u64,
) -> Result<Outcome, Error> {
    let word = Codeword::read_file(word)?;
    let mode = match positions {
        Some(s) => CorruptionMode::Adversarial(parse_positions(s)?),
        None => CorruptionMode::Uniform,
    };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (corrupted, hit) = ldc::corrupt(&word, delta, &mode, &mut rng)?;
    corrupted.write_file(out)?;
    let mut text = format!(
        "corrupted: {}\nbudget: {}\nfile: {}\n",
        hit.len(),
        (delta * word.len() as f64).floor() as u64,
        out.display()
    );
    // keep text output bounded; the JSON carries the full list when small
    if hit.len() <= 16 {
        let list: Vec<String> = hit.iter().map(u64::to_string).collect();
        text.push_str(&format!("positions: {}\n", list.join(" ")));
    }
    let json = json!({
        "corrupted": hit.len(),
        "positions": if hit.len() <= 4096 { to_value(&hit) } else { Value::Null },
        "file": out.display().to_string(),
    });
    Ok(Outcome::ok(text, json))
}

#[allow(clippy::too_many_arguments)]
fn trials_cmd(
    family: &Path,
    poly: &Path,
    message: &str,
    index: usize,
    delta: f64,
    trials: u64,
    positions: Option<&str>,
    seed: u64,
    par: Parallelism,
) -> Result<Outcome, Error> {
    let code = load_code(family, poly)?;
    let x = parse_symbols(code.ctx(), message)?;
    let mode = match positions {
        Some(s) => CorruptionMode::Adversarial(parse_positions(s)?),
        None => CorruptionMode::Uniform,
    };
    let cfg = TrialConfig { delta, trials, seed, mode };
    let report = ldc::run_trials(&code, &x, index, &cfg, par)?;
    let text = format!(
        "trials: {}\nfailures: {}\nrate: {:.6}\nwilson95: [{:.6}, {:.6}]\nkdelta-bound: {:.6}\ncorrupted: {}\n",
        report.trials,
        report.failures,
        report.rate,
        report.wilson_low,
        report.wilson_high,
        report.kdelta_bound,
        report.corrupted,
    );
    let json = json!({ "i": index, "report": to_value(&report) });
    Ok(Outcome::ok(text, json))
}

fn pir_demo(
    m: u64,
    h: usize,
    index: usize,
    n: usize,
    message: Option<&str>,
    seed: u64,
    par: Parallelism,
) -> Result<Outcome, Error> {
    let modulus = Modulus::factorize(m)?;
    // the three-monomial m=511 polynomial ships with the library; other
    // moduli get the canonical product construction
    let poly = if m == 511 {
        DecodingPolynomial::from_json(mvldc::M511_POLY_JSON)?
    } else {
        let (_, ctx, gamma) = native_field(m)?;
        canonical_polynomial(canonical_set(&modulus).sorted(), &gamma, &ctx)?
    };
    let budget = env_override::<u64>("MVLDC_FAMILY_BUDGET")?;
    let family = match search_family(&modulus, h, n, seed, budget, par)? {
        FamilySearch::Found(f) => f,
        FamilySearch::Exhausted { nodes } => {
            let text = format!("outcome: no-family\nnodes: {nodes}\n");
            let json = json!({ "outcome": "no-family", "nodes": nodes });
            return Ok(Outcome::negative(text, json));
        }
        FamilySearch::BudgetExceeded { roots_exceeded, nodes } => {
            let text = format!(
                "outcome: family-budget-exceeded\nroots-exceeded: {roots_exceeded}\nnodes: {nodes}\n"
            );
            let json = json!({
                "outcome": "family-budget-exceeded",
                "roots_exceeded": roots_exceeded,
                "nodes": nodes,
            });
            return Ok(Outcome::negative(text, json));
        }
    };
    let code = Code::with_native_field(family, poly)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let x = match message {
        Some(s) => {
            let x = parse_symbols(code.ctx(), s)?;
            if x.len() != code.n() {
                return Err(Error::MessageLength { expected: code.n(), got: x.len() });
            }
            x
        }
        None => {
            let t = code.ctx().t();
            (0..code.n())
                .map(|_| code.ctx().element_from_bits(rng.gen_range(0..1u64 << t)))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let inst = PirInstance::new(code, &x, par)?;
    let (value, transcript) = pir::retrieve(&inst, index, &mut rng)?;
    if value != x[index] {
        return Err(Error::Format {
            what: "pir retrieval",
            detail: "honest-server retrieval disagreed with the database".into(),
        });
    }
    let guard = env_override::<u64>("MVLDC_ENUM_GUARD")?.unwrap_or(ldc::ENUM_GUARD);
    let mut entries = Vec::with_capacity(inst.n() * inst.k());
    for i in 0..inst.n() {
        for server in 0..inst.k() {
            entries.push(PrivacyEntry {
                i,
                server,
                verdict: pir::verify_privacy_with_guard(&inst, i, server, seed, guard, par)?,
            });
        }
    }
    let certificate = PrivacyCertificate { entries };
    let report = pir::communication_report(&inst);
    let text = format!(
        "i: {index}\nvalue: {}\nservers: {}\npositions: {}\nbits-up: {}\nbits-down: {}\nbits-total: {}\nprivacy: {} ({} pairs)\n",
        hex(value.bits()),
        report.servers,
        report.codeword_positions,
        report.bits_up,
        report.bits_down,
        report.bits_total,
        if certificate.is_exact() { "exact" } else { "sampled" },
        certificate.entries.len(),
    );
    let json = json!({
        "m": m,
        "h": h,
        "i": index,
        "value": hex(value.bits()),
        "transcript": to_value(&transcript),
        "communication": to_value(&report),
        "privacy": {
            "exact": certificate.is_exact(),
            "pairs": certificate.entries.len(),
            "entries": to_value(&certificate.entries),
        },
    });
    Ok(Outcome::ok(text, json))
}

fn hunt_cmd(
    candidates: &Path,
    max_k: usize,
    checkpoint: Option<&Path>,
    par: Parallelism,
) -> Result<Outcome, Error> {
    let list: Vec<u64> = serde_json::from_str(&std::fs::read_to_string(candidates)?)?;
    let ceiling = env_override::<u128>("MVLDC_SEARCH_CEILING")?;
    let entries = mvldc::decpoly::hunt(&list, max_k, ceiling, checkpoint, par)?;
    let mut text = String::new();
    let mut any_found = false;
    for e in &entries {
        use mvldc::decpoly::HuntVerdict::*;
        match &e.verdict {
            Found { polynomial } => {
                any_found = true;
                text.push_str(&format!("m={}: found k={}\n", e.m, polynomial.k()));
            }
            Nonexistent { certificate } => {
                text.push_str(&format!(
                    "m={}: nonexistent ({} subsets)\n",
                    e.m, certificate.subsets_checked
                ));
            }
            Refused { estimate, ceiling } => {
                text.push_str(&format!(
                    "m={}: refused (estimate {estimate} over ceiling {ceiling})\n",
                    e.m
                ));
            }
            Unsupported { reason } => {
                text.push_str(&format!("m={}: unsupported ({reason})\n", e.m));
            }
        }
    }
    let json = json!({ "max_k": max_k, "entries": to_value(&entries) });
    if any_found {
        Ok(Outcome::ok(text, json))
    } else {
        Ok(Outcome::negative(text, json))
    }
}
