//! The `klehmer` command line.
//!
//! Exit codes: 0 success, 1 usage or domain error, 2 bound or memory budget
//! exceeded, 3 verification failure.

use std::fmt::Display;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arith::{self, factorize, FactoredInteger, MAX_NATURAL};
use crate::carmichael::{self, ChernickCandidate};
use crate::error::{Error, Result};
use crate::lehmer::{self, LehmerIndex, SemiprimeDecomposition};
use crate::sieve::{self, AlphaOutcome, AlphaRecord, KBound, SieveConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Bfile,
}

#[derive(Debug, Parser)]
#[command(
    name = "klehmer",
    version,
    about = "k-Lehmer and Carmichael number toolkit"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Values per sieve segment
    #[arg(long, global = true)]
    segment_size: Option<u64>,
    /// Worker threads for sieving
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Raise the range limit from 10^7 to 10^8
    #[arg(long, global = true)]
    allow_large: bool,
    /// File caching the sieving primes
    #[arg(long, global = true)]
    prime_cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Factorization, φ, λ, rad(φ), Lehmer index and Carmichael status of n
    Classify { n: String },
    /// C_k(10^j) for every power of ten up to the limit
    Count {
        #[arg(long)]
        limit: String,
        /// Comma-separated k values; `inf` for L_∞
        #[arg(long, default_value = "2,3,4,5,inf")]
        k: String,
    },
    /// l2-composites, lk-composites:<k> or carmichael, up to the limit
    List {
        #[arg(long)]
        set: String,
        #[arg(long)]
        limit: String,
    },
    /// Least Carmichael number outside L_k, searching up to the limit
    Alpha {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        limit: String,
    },
    /// Check a claimed α(k) directly, without a search
    AlphaVerify {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: String,
    },
    /// Chernick's U_k(m) for one m or for m = 1..=m-max
    Chernick {
        #[arg(long)]
        k: u32,
        #[arg(long, conflicts_with = "m_max", required_unless_present = "m_max")]
        m: Option<String>,
        #[arg(long)]
        m_max: Option<String>,
    },
    /// Semiprime criterion for pq ∈ L_k next to the direct test
    Semiprime {
        p: String,
        q: String,
        #[arg(long)]
        k: u32,
    },
    /// The Fermat base 2^(φ(n)/rad(φ(n))) mod n
    PseudoBase { n: String },
}

/// Accepts plain decimal or `<digits>e<digits>`, e.g. `1e6`.
pub fn parse_natural(s: &str) -> Result<u128> {
    let bad = || Error::InvalidArgument(format!("not a natural number: {s:?}"));
    let s = s.trim();
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let value = match s.split_once(['e', 'E']) {
        Some((mant, exp)) if digits(mant) && digits(exp) => {
            let mant: u128 = mant.parse().map_err(|_| bad())?;
            let exp: u32 = exp.parse().map_err(|_| bad())?;
            10u128
                .checked_pow(exp)
                .and_then(|p| p.checked_mul(mant))
                .ok_or(Error::OutOfRange(u128::MAX))?
        }
        None if digits(s) => s.parse().map_err(|_| Error::OutOfRange(u128::MAX))?,
        _ => return Err(bad()),
    };
    if value > MAX_NATURAL {
        return Err(Error::OutOfRange(value));
    }
    Ok(value)
}

/// OEIS b-file: one "index value" line per term, indices from `offset`.
pub fn emit_bfile<T: Display>(sequence: &[T], offset: u64) -> String {
    let mut out = String::new();
    for (i, v) in sequence.iter().enumerate() {
        out.push_str(&format!("{} {}\n", offset + i as u64, v));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorEntry {
    #[serde(with = "crate::decimal")]
    pub prime: u128,
    pub exponent: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    #[serde(with = "crate::decimal")]
    pub n: u128,
    pub factorization: Vec<FactorEntry>,
    #[serde(with = "crate::decimal")]
    pub phi: u128,
    #[serde(with = "crate::decimal")]
    pub lambda: u128,
    #[serde(with = "crate::decimal")]
    pub rad_phi: u128,
    pub lehmer_index: LehmerIndex,
    pub is_carmichael: bool,
    #[serde(
        with = "crate::decimal::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub pseudoprime_base: Option<u128>,
    pub base_degenerate: bool,
}

pub fn classify(n: u128) -> Result<ClassificationReport> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let f = factorize(n)?;
    Ok(report_for(&f))
}

fn report_for(f: &FactoredInteger) -> ClassificationReport {
    let n = f.value();
    let phi = arith::totient_factorization(f);
    let rad_phi = arith::radical(&phi);
    let lehmer_index = lehmer::lehmer_index_factored(f);
    let composite = n > 1 && !f.is_prime();
    let pseudoprime_base = (composite && lehmer_index.in_linf())
        .then(|| arith::pow_mod_unchecked(2, phi.value() / rad_phi, n));
    ClassificationReport {
        n,
        factorization: f
            .factors()
            .iter()
            .map(|&(prime, exponent)| FactorEntry { prime, exponent })
            .collect(),
        phi: phi.value(),
        lambda: arith::carmichael_lambda(f),
        rad_phi,
        lehmer_index,
        is_carmichael: carmichael::korselt_factored(f),
        pseudoprime_base,
        base_degenerate: pseudoprime_base.is_some_and(|b| carmichael::is_degenerate_base(n, b)),
    }
}

#[derive(Serialize)]
struct CountJson<'a> {
    limit: u64,
    ks: &'a [KBound],
    rows: Vec<CountRowJson>,
}

#[derive(Serialize)]
struct CountRowJson {
    x: u64,
    counts: Vec<u64>,
}

#[derive(Serialize)]
struct ListJson<'a> {
    set: &'a str,
    limit: u64,
    values: &'a [u64],
}

#[derive(Serialize)]
struct AlphaJson {
    found: bool,
    #[serde(flatten)]
    record: Option<AlphaRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(with = "crate::decimal::option")]
    bound: Option<u128>,
}

#[derive(Serialize)]
struct SemiprimeJson {
    #[serde(with = "crate::decimal")]
    n: u128,
    decomposition: SemiprimeDecomposition,
    k: u32,
    criterion: bool,
    direct: bool,
}

#[derive(Serialize)]
struct PseudoBaseJson {
    #[serde(with = "crate::decimal")]
    n: u128,
    #[serde(with = "crate::decimal")]
    base: u128,
    degenerate: bool,
    fermat_holds: bool,
}

/// Failure surfaced to the user, with its exit code.
enum Failure {
    Usage(String),
    Domain(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(io::Error::other(e))
    }
}

type CliResult = std::result::Result<(), Failure>;

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult {
    serde_json::to_writer(&mut *out, value).map_err(io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn unsupported(format: Format, what: &str) -> Failure {
    let name = match format {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Bfile => "bfile",
    };
    Failure::Usage(format!("--format {name} is not available for {what}"))
}

/// Runs the CLI with `argv[0]` being the program name; returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn config(cli: &Cli) -> Result<SieveConfig> {
    let mut cfg = SieveConfig::from_env()?;
    if cli.allow_large {
        cfg = cfg.allow_large();
    }
    if let Some(s) = cli.segment_size {
        cfg = cfg.with_segment_size(s);
    }
    if let Some(w) = cli.workers {
        cfg = cfg.with_workers(w);
    }
    cfg.prime_cache = cli.prime_cache.clone();
    Ok(cfg)
}

fn parse_ks(s: &str) -> Result<Vec<KBound>> {
    let ks: Vec<KBound> = s.split(',').map(str::parse).collect::<Result<_>>()?;
    if ks.is_empty() {
        return Err(Error::InvalidArgument("empty k list".into()));
    }
    Ok(ks)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult {
    let format = cli.format;
    match &cli.command {
        Command::Classify { n } => {
            let report = classify(parse_natural(n)?)?;
            match format {
                Format::Json => write_json(out, &report),
                Format::Csv => {
                    let mut w = csv_writer(out);
                    w.write_record([
                        "n",
                        "factorization",
                        "phi",
                        "lambda",
                        "rad_phi",
                        "lehmer_index",
                        "is_carmichael",
                        "pseudoprime_base",
                        "base_degenerate",
                    ])?;
                    let f = FactoredInteger::from_factors(
                        report.factorization.iter().map(|e| (e.prime, e.exponent)),
                    )?;
                    w.write_record([
                        report.n.to_string(),
                        f.to_string(),
                        report.phi.to_string(),
                        report.lambda.to_string(),
                        report.rad_phi.to_string(),
                        report.lehmer_index.to_string(),
                        report.is_carmichael.to_string(),
                        report
                            .pseudoprime_base
                            .map(|b| b.to_string())
                            .unwrap_or_default(),
                        report.base_degenerate.to_string(),
                    ])?;
                    w.flush()?;
                    Ok(())
                }
                Format::Bfile => Err(unsupported(format, "classify")),
            }
        }
        Command::Count { limit, k } => {
            let cfg = config(cli)?;
            let ks = parse_ks(k)?;
            let table = sieve::count_table(parse_natural(limit)?, &ks, &cfg)?;
            // the table always carries ∞; show only what was asked for
            let cols: Vec<usize> = ks
                .iter()
                .map(|k| table.ks.iter().position(|j| j == k).unwrap())
                .collect();
            let rows: Vec<CountRowJson> = table
                .rows
                .iter()
                .map(|r| CountRowJson {
                    x: r.x,
                    counts: cols.iter().map(|&c| r.counts[c]).collect(),
                })
                .collect();
            match format {
                Format::Json => write_json(
                    out,
                    &CountJson {
                        limit: table.limit,
                        ks: &ks,
                        rows,
                    },
                ),
                Format::Csv => {
                    let mut w = csv_writer(out);
                    let mut header = vec!["x".to_string()];
                    header.extend(ks.iter().map(|k| format!("C_{k}")));
                    w.write_record(&header)?;
                    for r in rows {
                        let mut rec = vec![r.x.to_string()];
                        rec.extend(r.counts.iter().map(u64::to_string));
                        w.write_record(&rec)?;
                    }
                    w.flush()?;
                    Ok(())
                }
                Format::Bfile => Err(unsupported(format, "count")),
            }
        }
        Command::List { set, limit } => {
            let cfg = config(cli)?;
            let limit = parse_natural(limit)?;
            let values = match set.as_str() {
                "l2-composites" => sieve::enumerate_lk_composites(limit, 2, &cfg)?,
                "carmichael" => sieve::enumerate_carmichael(limit, &cfg)?,
                other => match other.strip_prefix("lk-composites:") {
                    Some(k) => {
                        let k: u32 =
                            k.parse().ok().filter(|&k| k >= 1).ok_or_else(|| {
                                Failure::Usage(format!("bad k in --set {other:?}"))
                            })?;
                        sieve::enumerate_lk_composites(limit, k, &cfg)?
                    }
                    None => return Err(Failure::Usage(format!("unknown set {other:?}"))),
                },
            };
            match format {
                Format::Json => write_json(
                    out,
                    &ListJson {
                        set,
                        limit: limit as u64,
                        values: &values,
                    },
                ),
                Format::Csv => {
                    let mut w = csv_writer(out);
                    w.write_record(["index", "value"])?;
                    for (i, v) in values.iter().enumerate() {
                        w.write_record([(i + 1).to_string(), v.to_string()])?;
                    }
                    w.flush()?;
                    Ok(())
                }
                Format::Bfile => {
                    out.write_all(emit_bfile(&values, 1).as_bytes())?;
                    Ok(())
                }
            }
        }
        Command::Alpha { k, limit } => {
            let cfg = config(cli)?;
            let outcome = sieve::alpha_search(*k, parse_natural(limit)?, &cfg)?;
            let (found, record, bound) = match outcome {
                AlphaOutcome::Found(r) => (true, Some(r), None),
                AlphaOutcome::NotFound { bound } => (false, None, Some(bound)),
            };
            match format {
                Format::Json => write_json(
                    out,
                    &AlphaJson {
                        found,
                        record,
                        k: (!found).then_some(*k),
                        bound,
                    },
                )?,
                Format::Csv => write_alpha_csv(out, record.as_slice())?,
                Format::Bfile => return Err(unsupported(format, "alpha")),
            }
            match bound {
                Some(b) => Err(Error::NotFound(b).into()),
                None => Ok(()),
            }
        }
        Command::AlphaVerify { k, n } => {
            let record = sieve::verify_alpha_entry(*k, parse_natural(n)?)?;
            match format {
                Format::Json => write_json(out, &record),
                Format::Csv => write_alpha_csv(out, &[record]),
                Format::Bfile => Err(unsupported(format, "alpha-verify")),
            }
        }
        Command::Chernick { k, m, m_max } => {
            let candidates: Vec<ChernickCandidate> = match (m, m_max) {
                (Some(m), _) => vec![carmichael::chernick(*k, parse_natural(m)?)?],
                (None, Some(max)) => (1..=parse_natural(max)?)
                    .map(|m| carmichael::chernick(*k, m))
                    .collect::<Result<_>>()?,
                (None, None) => unreachable!("clap requires one of --m, --m-max"),
            };
            match format {
                Format::Json => write_json(out, &candidates),
                Format::Csv => {
                    let mut w = csv_writer(out);
                    w.write_record([
                        "k",
                        "m",
                        "factors",
                        "value",
                        "all_prime",
                        "divisibility_ok",
                        "is_carmichael",
                        "index_guaranteed",
                        "observed_index",
                    ])?;
                    for c in &candidates {
                        let factors: Vec<String> = c.factors.iter().map(u128::to_string).collect();
                        w.write_record([
                            c.k.to_string(),
                            c.m.to_string(),
                            factors.join("*"),
                            c.value.to_string(),
                            c.all_prime.to_string(),
                            c.divisibility_ok.to_string(),
                            c.is_carmichael.to_string(),
                            c.index_guaranteed.to_string(),
                            c.observed_index.map(|i| i.to_string()).unwrap_or_default(),
                        ])?;
                    }
                    w.flush()?;
                    Ok(())
                }
                Format::Bfile => Err(unsupported(format, "chernick")),
            }
        }
        Command::Semiprime { p, q, k } => {
            let dec = lehmer::semiprime_decompose(parse_natural(p)?, parse_natural(q)?)?;
            let criterion = lehmer::semiprime_in_lk(&dec, *k)?;
            let direct = lehmer::in_lk(dec.n(), *k)?;
            let report = SemiprimeJson {
                n: dec.n(),
                decomposition: dec,
                k: *k,
                criterion,
                direct,
            };
            match format {
                Format::Json => write_json(out, &report),
                Format::Csv => {
                    let mut w = csv_writer(out);
                    w.write_record([
                        "n",
                        "p",
                        "q",
                        "a",
                        "b",
                        "d",
                        "alpha",
                        "beta",
                        "k",
                        "criterion",
                        "direct",
                    ])?;
                    w.write_record([
                        dec.n().to_string(),
                        dec.p.to_string(),
                        dec.q.to_string(),
                        dec.a.to_string(),
                        dec.b.to_string(),
                        dec.d.to_string(),
                        dec.alpha.to_string(),
                        dec.beta.to_string(),
                        k.to_string(),
                        criterion.to_string(),
                        direct.to_string(),
                    ])?;
                    w.flush()?;
                    Ok(())
                }
                Format::Bfile => Err(unsupported(format, "semiprime")),
            }
        }
        Command::PseudoBase { n } => {
            let n = parse_natural(n)?;
            let base = carmichael::pseudoprime_base(n)?;
            let report = PseudoBaseJson {
                n,
                base,
                degenerate: carmichael::is_degenerate_base(n, base),
                fermat_holds: carmichael::fermat_test(n, base)?,
            };
            match format {
                Format::Json => write_json(out, &report),
                Format::Csv => {
                    let mut w = csv_writer(out);
                    w.write_record(["n", "base", "degenerate", "fermat_holds"])?;
                    w.write_record([
                        n.to_string(),
                        base.to_string(),
                        report.degenerate.to_string(),
                        report.fermat_holds.to_string(),
                    ])?;
                    w.flush()?;
                    Ok(())
                }
                Format::Bfile => Err(unsupported(format, "pseudo-base")),
            }
        }
    }
}

fn write_alpha_csv(out: &mut dyn Write, records: &[AlphaRecord]) -> CliResult {
    let mut w = csv_writer(out);
    w.write_record(["k", "n", "omega", "in_next", "bound"])?;
    for r in records {
        w.write_record([
            r.k.to_string(),
            r.n.to_string(),
            r.omega.to_string(),
            r.in_next.to_string(),
            r.bound.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
