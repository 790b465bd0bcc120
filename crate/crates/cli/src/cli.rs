//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ilrc_core::analysis::{
    self, decryption_failure_bound, security_report, MonteCarloConfig, MonteCarloResult, RsdKind,
};
use ilrc_core::cryptosystem::Constraint;
use ilrc_core::distinguisher::{
    self, augmented_dims, classify_error, dual_augmented_dims, dual_dimension_bound,
    gabidulin_dimension_bound, random_dimension, Verdict,
};
use ilrc_core::linalg::{self, embed, sample_full_rank, Base, Ext, DEFAULT_RETRY_BUDGET};
use ilrc_core::{CryptoError, Cryptosystem, FieldCtx, ParameterSet, RngStream};
use rayon::prelude::*;

use crate::envelope::{self, FileKind};
use crate::fixture;
use crate::message::{self, MessageError};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INVALID_PARAMS: u8 = 2;
pub const EXIT_DECRYPTION_FAILURE: u8 = 3;
pub const EXIT_FORMAT: u8 = 4;
pub const EXIT_IO: u8 = 5;
pub const EXIT_PADDING: u8 = 6;
pub const EXIT_RUNTIME: u8 = 7;

const EXIT_CODES_HELP: &str = "\
Exit codes:
  0  success
  1  usage error
  2  invalid or unsupported parameters
  3  decryption failure
  4  malformed or mismatched file
  5  I/O error
  6  bad message padding (usually a wrong key)
  7  sampling budget exhausted";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("decryption failure")]
    Decryption,
    #[error("format error: {0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("message padding check failed (wrong key?)")]
    Padding,
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::InvalidParams(_) => EXIT_INVALID_PARAMS,
            CliError::Decryption => EXIT_DECRYPTION_FAILURE,
            CliError::Format(_) => EXIT_FORMAT,
            CliError::Io { .. } => EXIT_IO,
            CliError::Padding => EXIT_PADDING,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

fn crypto_err(e: CryptoError) -> CliError {
    match e {
        CryptoError::InvalidParams(p) => CliError::InvalidParams(p.to_string()),
        CryptoError::Field(f) => CliError::InvalidParams(f.to_string()),
        CryptoError::DecryptionFailure => CliError::Decryption,
        e @ (CryptoError::MalformedEncoding(_)
        | CryptoError::VersionMismatch { .. }
        | CryptoError::FingerprintMismatch
        | CryptoError::ShapeMismatch { .. }) => CliError::Format(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    }
}

fn message_err(e: MessageError) -> CliError {
    match e {
        MessageError::Padding => CliError::Padding,
        other => CliError::InvalidParams(other.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ilrc",
    version,
    about = "Interleaved rank-metric McEliece-type cryptosystem",
    after_help = EXIT_CODES_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Subfield order (prime power)
    #[arg(long)]
    pub q: u64,
    /// Extension degree
    #[arg(long)]
    pub m: usize,
    /// Code length
    #[arg(long)]
    pub n: usize,
    /// Code dimension
    #[arg(long)]
    pub k: usize,
    /// Dimension of the column-mixer subspace
    #[arg(long)]
    pub lambda: usize,
    /// Interleaving order
    #[arg(long)]
    pub ell: usize,
}

impl ParamArgs {
    fn params(&self) -> ParameterSet {
        ParameterSet {
            q: self.q,
            m: self.m,
            n: self.n,
            k: self.k,
            lambda: self.lambda,
            ell: self.ell,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned human-readable text
    Text,
    /// One `key=value` record per line
    Records,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ErrorCodeArg {
    /// Uniform full-rank A_E
    Random,
    /// A_E a Moore matrix (distinguishable; for experiments only)
    Gabidulin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RsdKindArg {
    Plain,
    Interleaved,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a parameter set and print its security report
    Params {
        #[command(flatten)]
        params: ParamArgs,
        /// Externally computed generic-decoding work factor, in bits
        #[arg(long)]
        wf_e: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Generate a key pair, written to <OUT>.pub and <OUT>.sec
    Keygen {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        seed: u64,
        /// Output path prefix
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a file under a public key
    Encrypt {
        /// Public key file
        #[arg(long)]
        key: PathBuf,
        /// Plaintext file
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Structure of the error code
        #[arg(long, value_enum, default_value_t = ErrorCodeArg::Random)]
        error_code: ErrorCodeArg,
    },
    /// Decrypt a ciphertext file with a secret key
    Decrypt {
        /// Secret key file
        #[arg(long)]
        key: PathBuf,
        /// Ciphertext file
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the decryption failure rate by simulation
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Decoding radius override
        #[arg(long)]
        tau: Option<usize>,
        /// Encrypt with the zero error (control run)
        #[arg(long)]
        zero_error: bool,
        /// Worker threads (results do not depend on this)
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// q-sum dimension tables and verdict for a ciphertext block
    Distinguish {
        /// Public key file
        #[arg(long)]
        key: PathBuf,
        /// Ciphertext file
        #[arg(long = "in")]
        input: PathBuf,
        /// Largest Frobenius power in the tables
        #[arg(long, default_value_t = 3)]
        imax: usize,
        /// Power used for the verdict
        #[arg(long, default_value_t = 1)]
        i: usize,
        /// Ciphertext block to analyse
        #[arg(long, default_value_t = 0)]
        block: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample a rank syndrome decoding instance as matrix fixtures
    RsdSample {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// GF(q)-rank of the secret
        #[arg(long)]
        w: usize,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long, value_enum, default_value_t = RsdKindArg::Plain)]
        kind: RsdKindArg,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn open(path: &Path, kind: FileKind) -> Result<envelope::Opened, CliError> {
    envelope::open(&read_text(path)?, kind)
        .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
}

fn same_system(a: &Cryptosystem, b: &Cryptosystem) -> Result<(), CliError> {
    if a.fingerprint() != b.fingerprint() {
        return Err(CliError::Format(
            "key and ciphertext were produced under different parameters".into(),
        ));
    }
    Ok(())
}

fn fmt_bits(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else {
        format!("{v:.2}")
    }
}

fn slug(c: Constraint) -> &'static str {
    match c {
        Constraint::QPrimePower => "q_prime_power",
        Constraint::MPositive => "m_positive",
        Constraint::LengthWithinExtension => "n_at_most_m",
        Constraint::DimensionBelowLength => "k_below_n",
        Constraint::DimensionPositive => "k_positive",
        Constraint::LambdaLower => "lambda_lower",
        Constraint::LambdaUpper => "lambda_upper",
        Constraint::EllPositive => "ell_positive",
        Constraint::EllBelowTpub => "ell_below_t_pub",
    }
}

/// Renders `(key, value)` rows in the chosen format.
fn render(rows: &[(String, String)], format: Format) -> String {
    let mut out = String::new();
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        let _ = match format {
            Format::Text => writeln!(out, "{k:<width$}  {v}"),
            Format::Records => writeln!(out, "{k}={v}"),
        };
    }
    out
}

fn cmd_params(params: &ParamArgs, wf_e: Option<f64>, output: &OutputArgs) -> Result<(), CliError> {
    let p = params.params();
    let mut rows: Vec<(String, String)> = Vec::new();
    for (c, ok) in p.check() {
        let key = match output.format {
            Format::Text => format!("constraint {}", c.describe()),
            Format::Records => format!("constraint.{}", slug(c)),
        };
        rows.push((key, if ok { "ok" } else { "violated" }.into()));
    }
    if let Err(e) = p.validate() {
        rows.push(("valid".into(), "false".into()));
        emit(output.out.as_deref(), render(&rows, output.format).as_bytes())?;
        return Err(CliError::InvalidParams(e.violated.describe().into()));
    }
    rows.push(("valid".into(), "true".into()));
    let r = security_report(&p);
    let rate = *r.rate.numer() as f64 / *r.rate.denom() as f64;
    let (d_lhs, d_ok) = (
        (p.n - p.k) as f64 / (2 * p.lambda) as f64,
        if r.d_e_threshold_ok { "ok" } else { "below threshold" },
    );
    rows.extend([
        ("t_pub".into(), r.t_pub.to_string()),
        ("wf_loi".into(), fmt_bits(r.wf_loidreau_bits)),
        (
            "wf_e".into(),
            wf_e.map_or_else(|| "not computed".into(), fmt_bits),
        ),
        ("wf_ae".into(), fmt_bits(r.wf_ae_bits.unwrap_or(f64::INFINITY))),
        ("rate".into(), format!("{rate:.2}")),
        ("rate_exact".into(), format!("{}/{}", r.rate.numer(), r.rate.denom())),
        ("p_f".into(), fmt_bits(r.p_fail_log2)),
        (
            "p_f_unconditional".into(),
            fmt_bits(analysis::decryption_failure_bound_unconditional(&p)),
        ),
        (
            "key_size_bytes".into(),
            r.key_size_bytes.map_or_else(|| "n/a".into(), |b| b.to_string()),
        ),
        (
            "key_size_kb".into(),
            r.key_size_bytes
                .map_or_else(|| "n/a".into(), |b| format!("{:.2}", b as f64 / 1000.0)),
        ),
        ("mrd_bound_log2".into(), fmt_bits(r.mrd_bound_log2)),
        ("mrd_bound_vacuous".into(), r.mrd_bound_vacuous.to_string()),
        ("d_e".into(), r.d_e.to_string()),
        ("d_e_threshold".into(), format!("{d_lhs:.2} ({d_ok})")),
    ]);
    emit(output.out.as_deref(), render(&rows, output.format).as_bytes())
}

fn system(params: &ParamArgs) -> Result<Cryptosystem, CliError> {
    Cryptosystem::new(params.params()).map_err(crypto_err)
}

fn with_ext(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

fn cmd_keygen(params: &ParamArgs, seed: u64, out: &Path) -> Result<(), CliError> {
    let sys = system(params)?;
    let (pk, sk) = sys
        .keygen(&mut RngStream::named(seed, "keygen"))
        .map_err(crypto_err)?;
    let pub_text = envelope::seal(FileKind::PublicKey, &sys, &sys.encode_public_key(&pk));
    let sec_text = envelope::seal(FileKind::SecretKey, &sys, &sys.encode_secret_key(&sk));
    emit(Some(&with_ext(out, ".pub")), pub_text.as_bytes())?;
    emit(Some(&with_ext(out, ".sec")), sec_text.as_bytes())
}

fn cmd_encrypt(
    key: &Path,
    input: &Path,
    seed: u64,
    out: Option<&Path>,
    error_code: ErrorCodeArg,
) -> Result<(), CliError> {
    let opened = open(key, FileKind::PublicKey)?;
    let sys = opened.system;
    let pk = sys.decode_public_key(&opened.payload).map_err(crypto_err)?;
    let data = read_bytes(input)?;
    let p = *sys.params();
    let blocks = message::encode(sys.ctx(), p.ell, p.k, &data).map_err(message_err)?;
    let mut rng = RngStream::named(seed, "encrypt");
    let mut encoded = Vec::with_capacity(blocks.len());
    for msg in &blocks {
        let ct = match error_code {
            ErrorCodeArg::Random => sys.encrypt(&pk, msg, &mut rng),
            ErrorCodeArg::Gabidulin => {
                let ctx = sys.ctx();
                let t = sys.t_pub();
                let a = distinguisher::gabidulin_error_code(ctx, p.ell, t, &mut rng)
                    .map_err(|e| crypto_err(e.into()))?;
                let b = sample_full_rank(&Base(ctx), t, p.n, &mut rng, DEFAULT_RETRY_BUDGET)
                    .map_err(|e| crypto_err(e.into()))?;
                let e = linalg::mul(&Ext(ctx), &a, &embed(ctx, &b));
                sys.encrypt_with_error(&pk, msg, &e)
            }
        }
        .map_err(crypto_err)?;
        encoded.push(sys.encode_ciphertext(&ct));
    }
    let text = envelope::seal(FileKind::Ciphertext, &sys, &envelope::pack_blocks(&encoded));
    emit(out, text.as_bytes())
}

fn read_ciphertexts(
    path: &Path,
    sys: &Cryptosystem,
) -> Result<Vec<ilrc_core::Ciphertext>, CliError> {
    let opened = open(path, FileKind::Ciphertext)?;
    same_system(sys, &opened.system)?;
    let blocks = envelope::unpack_blocks(&opened.payload)
        .ok_or_else(|| CliError::Format("malformed ciphertext block list".into()))?;
    blocks
        .into_iter()
        .map(|b| sys.decode_ciphertext(b).map_err(crypto_err))
        .collect()
}

fn cmd_decrypt(key: &Path, input: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let opened = open(key, FileKind::SecretKey)?;
    let sys = opened.system;
    let sk = sys.decode_secret_key(&opened.payload).map_err(crypto_err)?;
    let cts = read_ciphertexts(input, &sys)?;
    let msgs = cts
        .iter()
        .map(|ct| sys.decrypt(&sk, ct).map_err(crypto_err))
        .collect::<Result<Vec<_>, _>>()?;
    let data = message::decode(sys.ctx(), &msgs).map_err(message_err)?;
    emit(out, &data)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    params: &ParamArgs,
    trials: u64,
    seed: u64,
    tau: Option<usize>,
    zero_error: bool,
    threads: Option<usize>,
    output: &OutputArgs,
) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let sys = system(params)?;
    let p = *sys.params();
    if let Some(t) = tau {
        if t > p.decoding_radius() {
            return Err(CliError::InvalidParams(format!(
                "tau {t} exceeds the decoding radius {}",
                p.decoding_radius()
            )));
        }
    }
    let cfg = MonteCarloConfig {
        trials,
        seed,
        tau,
        zero_error,
    };
    let (pk, sk) = analysis::simulation_keys(&sys, seed).map_err(crypto_err)?;
    let run = || {
        (0..trials)
            .into_par_iter()
            .map(|i| analysis::run_trial(&sys, &pk, &sk, &cfg, i))
            .collect::<Result<Vec<_>, _>>()
    };
    let outcomes = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::Runtime(e.to_string()))?
            .install(run),
        None => run(),
    }
    .map_err(crypto_err)?;
    let res = MonteCarloResult::from_outcomes(outcomes);
    let bound = decryption_failure_bound(&p);
    let pb = bound.exp2();
    let nt = trials as f64;
    let limit = (nt * pb + 3.0 * (nt * pb * (1.0 - pb)).sqrt()).floor() as u64;
    let rows: Vec<(String, String)> = vec![
        ("trials".into(), res.trials.to_string()),
        ("failures".into(), res.failures.to_string()),
        ("wrong_messages".into(), res.wrong.to_string()),
        ("tau".into(), tau.unwrap_or(p.decoding_radius()).to_string()),
        ("zero_error".into(), zero_error.to_string()),
        (
            if res.failures + res.wrong == 0 {
                "log2_rate_floor".into()
            } else {
                "log2_rate".into()
            },
            fmt_bits(res.log2_rate_or_floor),
        ),
        ("p_f_bound".into(), fmt_bits(bound)),
        (
            "consistent_with_bound".into(),
            (res.wrong == 0 && res.failures <= limit).to_string(),
        ),
    ];
    emit(output.out.as_deref(), render(&rows, output.format).as_bytes())
}

fn cmd_distinguish(
    key: &Path,
    input: &Path,
    imax: usize,
    i: usize,
    block: usize,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let opened = open(key, FileKind::PublicKey)?;
    let sys = opened.system;
    let pk = sys.decode_public_key(&opened.payload).map_err(crypto_err)?;
    let cts = read_ciphertexts(input, &sys)?;
    let ct = cts
        .get(block)
        .ok_or_else(|| CliError::Usage(format!("ciphertext has {} blocks", cts.len())))?;
    let ctx: &FieldCtx = sys.ctx();
    let p = *sys.params();
    let t = sys.t_pub();
    let imax = imax.max(i);
    let primal = augmented_dims(ctx, &pk.g_pub, &ct.y, imax)
        .map_err(|e| CliError::Format(e.to_string()))?;
    let dual = dual_augmented_dims(ctx, &pk.g_pub, &ct.y, imax).ok();
    let mut out = String::new();
    match output.format {
        Format::Text => {
            let _ = writeln!(out, "{:>3}  {:>9}  {:>9}  {:>9}  {:>9}  {:>9}", "i", "dim_aug", "gab_bound", "random", "dim_dual", "dual_bnd");
            for j in 0..=imax {
                let d = dual.as_ref().map_or("n/a".into(), |d| d[j].to_string());
                let _ = writeln!(
                    out,
                    "{j:>3}  {:>9}  {:>9}  {:>9}  {d:>9}  {:>9}",
                    primal[j],
                    gabidulin_dimension_bound(p.n, p.k, p.ell, t, j),
                    random_dimension(p.n, p.k, p.ell, t, j),
                    dual_dimension_bound(p.n, p.k, p.ell, j)
                );
            }
        }
        Format::Records => {
            for j in 0..=imax {
                let d = dual.as_ref().map_or("n/a".into(), |d| d[j].to_string());
                let _ = writeln!(
                    out,
                    "i={j} dim_aug={} gab_bound={} random={} dim_dual={d} dual_bound={}",
                    primal[j],
                    gabidulin_dimension_bound(p.n, p.k, p.ell, t, j),
                    random_dimension(p.n, p.k, p.ell, t, j),
                    dual_dimension_bound(p.n, p.k, p.ell, j)
                );
            }
        }
    }
    let c = classify_error(ctx, &pk.g_pub, &ct.y, t, i).map_err(|e| CliError::Format(e.to_string()))?;
    let verdict = match c.verdict {
        Verdict::GabidulinLike => "GabidulinLike",
        Verdict::RandomLike => "RandomLike",
        Verdict::Inconclusive => "Inconclusive",
    };
    let _ = writeln!(
        out,
        "{}",
        match output.format {
            Format::Text => format!("verdict (i={i}): {verdict}"),
            Format::Records => format!("verdict={verdict}"),
        }
    );
    if !distinguisher::distinguishable(p.n, p.k, p.ell, t) {
        let _ = writeln!(
            out,
            "note: 2k + min(ell+1, t_pub) = {} >= n = {}, so the dimension test cannot separate the cases",
            2 * p.k + (p.ell + 1).min(t),
            p.n
        );
    } else if c.gabidulin_bound >= c.random_dim {
        let _ = writeln!(out, "note: the Gabidulin bound and the random dimension coincide at i={i}");
    }
    emit(output.out.as_deref(), out.as_bytes())
}

#[allow(clippy::too_many_arguments)]
fn cmd_rsd_sample(
    q: u64,
    m: usize,
    n: usize,
    k: usize,
    w: usize,
    ell: usize,
    kind: RsdKindArg,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if n > m || k > n || w > n {
        return Err(CliError::InvalidParams("require k <= n <= m and w <= n".into()));
    }
    let ctx = FieldCtx::with_order(q, m).map_err(|e| CliError::InvalidParams(e.to_string()))?;
    let kind = match kind {
        RsdKindArg::Plain => RsdKind::Plain,
        RsdKindArg::Interleaved => RsdKind::Interleaved,
    };
    let inst = analysis::sample_rsd_instance(
        &ctx,
        kind,
        n,
        k,
        w,
        ell,
        &mut RngStream::named(seed, "rsd"),
    )
    .map_err(|e| CliError::InvalidParams(e.to_string()))?;
    let fmt = |e: fixture::FixtureError| CliError::InvalidParams(e.to_string());
    let mut text = String::new();
    text += &fixture::write_ext(&ctx, &inst.h, Some("H parity-check matrix")).map_err(fmt)?;
    text += &fixture::write_ext(&ctx, &inst.x, Some("X secret")).map_err(fmt)?;
    text += &fixture::write_ext(&ctx, &inst.syndromes, Some("H X^T syndromes")).map_err(fmt)?;
    emit(out, text.as_bytes())
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Params {
            params,
            wf_e,
            output,
        } => cmd_params(&params, wf_e, &output),
        Command::Keygen { params, seed, out } => cmd_keygen(&params, seed, &out),
        Command::Encrypt {
            key,
            input,
            seed,
            out,
            error_code,
        } => cmd_encrypt(&key, &input, seed, out.as_deref(), error_code),
        Command::Decrypt { key, input, out } => cmd_decrypt(&key, &input, out.as_deref()),
        Command::Simulate {
            params,
            trials,
            seed,
            tau,
            zero_error,
            threads,
            output,
        } => cmd_simulate(&params, trials, seed, tau, zero_error, threads, &output),
        Command::Distinguish {
            key,
            input,
            imax,
            i,
            block,
            output,
        } => cmd_distinguish(&key, &input, imax, i, block, &output),
        Command::RsdSample {
            q,
            m,
            n,
            k,
            w,
            ell,
            kind,
            seed,
            out,
        } => cmd_rsd_sample(q, m, n, k, w, ell, kind, seed, out.as_deref()),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("ilrc: {e}");
            e.exit_code()
        }
    }
}
