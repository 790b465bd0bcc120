//! Work factors, key sizes and failure bounds, plus empirical checks.
//!
//! Probabilities are evaluated as exact big rationals; only the final value is
//! converted to a base-2 logarithm, since the bounds of interest sit far below
//! the smallest normal `f64`.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Pow, Zero};
use rand::RngCore;

use crate::cryptosystem::{CryptoError, Cryptosystem, ParameterSet, PublicKey, SecretKey};
use crate::gf::{prime_power, FieldCtx};
use crate::linalg::{
    self, sample_full_rank, sample_rank_q, sample_uniform, Ext, LinalgError, MatQm,
    DEFAULT_RETRY_BUDGET,
};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("m·log2(q) is not an integer for q = {0}")]
    NonIntegralBits(u64),
    #[error("rank {t_prime} outside [0, {max}]")]
    OutOfRange { t_prime: usize, max: usize },
}

pub fn t_pub(params: &ParameterSet) -> usize {
    params.t_pub()
}

fn log2_q(params: &ParameterSet) -> f64 {
    libm::log2(params.q as f64)
}

/// Cost exponent of the structural attack, in bits.
pub fn wf_loidreau(params: &ParameterSet) -> f64 {
    let l = params.lambda as f64 - 1.0;
    0.5 * (l * params.m as f64 - l * l) * log2_q(params)
}

/// Inverse probability that the error code is not MRD, in bits; `None` for ℓ = 1.
pub fn wf_ae(params: &ParameterSet) -> Option<f64> {
    if params.ell < 2 {
        return None;
    }
    let exp = params.m as f64 - (params.ell * params.t_pub()) as f64;
    Some(exp * log2_q(params) - libm::log2(params.ell as f64))
}

/// Size of the systematic public key: `k(n−k)` elements of `m·log2 q` bits.
pub fn key_size_bytes(params: &ParameterSet) -> Result<u64, AnalysisError> {
    let (p, r) = prime_power(params.q).ok_or(AnalysisError::NonIntegralBits(params.q))?;
    if p != 2 {
        return Err(AnalysisError::NonIntegralBits(params.q));
    }
    let bits = (params.k * (params.n - params.k) * params.m) as u64 * r as u64;
    Ok(bits.div_ceil(8))
}

pub fn rate(params: &ParameterSet) -> Ratio<u64> {
    Ratio::new(params.k as u64, params.n as u64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrdBound {
    /// `log2(ℓ) + (ℓ·t_pub − m)·log2(q)`.
    pub log2: f64,
    /// The bound carries no information (it is at least 1).
    pub vacuous: bool,
}

/// Log-probability bound that the error code is not `[t_pub, ℓ, t_pub−ℓ+1]`.
pub fn mrd_probability_bound(params: &ParameterSet) -> MrdBound {
    let exp = (params.ell * params.t_pub()) as f64 - params.m as f64;
    let log2 = libm::log2(params.ell as f64) + exp * log2_q(params);
    MrdBound {
        log2,
        vacuous: log2 >= 0.0,
    }
}

fn big_pow(q: u64, e: usize) -> BigInt {
    Pow::pow(BigInt::from(q), e as u32)
}

/// Probability that a uniform `rows × cols` matrix over GF(q) has rank `r`.
pub fn matrix_rank_probability(q: u64, rows: usize, cols: usize, r: usize) -> BigRational {
    if r > rows.min(cols) {
        return BigRational::zero();
    }
    let mut num = BigInt::one();
    let mut den = big_pow(q, rows * cols);
    let qr = big_pow(q, rows);
    let qc = big_pow(q, cols);
    let qt = big_pow(q, r);
    for i in 0..r {
        let qi = big_pow(q, i);
        num *= (&qr - &qi) * (&qc - &qi);
        den *= &qt - &qi;
    }
    BigRational::new(num, den)
}

/// Probability that the inflated error `E·P` has GF(q)-rank `t′`.
pub fn rank_weight_probability(
    t_prime: usize,
    params: &ParameterSet,
) -> Result<BigRational, AnalysisError> {
    let rows = params.lambda * params.t_pub();
    let max = rows.min(params.n);
    if t_prime > max {
        return Err(AnalysisError::OutOfRange { t_prime, max });
    }
    Ok(matrix_rank_probability(params.q, rows, params.n, t_prime))
}

/// Base-2 logarithm of a nonnegative rational; `-∞` for zero.
pub fn log2_rational(x: &BigRational) -> f64 {
    if x.is_zero() || x.numer().sign() == Sign::Minus {
        return f64::NEG_INFINITY;
    }
    log2_uint(x.numer().magnitude()) - log2_uint(x.denom().magnitude())
}

fn log2_uint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        let v = n.iter_u64_digits().next().unwrap_or(0);
        return libm::log2(v as f64);
    }
    let shift = bits - 64;
    let top: BigUint = n >> shift;
    let v = top.iter_u64_digits().next().unwrap_or(0);
    libm::log2(v as f64) + shift as f64
}

fn success_mass(params: &ParameterSet, ell_exponent: bool, extra_factor: bool) -> BigRational {
    let q = params.q;
    let m = params.m;
    let ell = params.ell;
    let t = params.t_pub();
    let one = BigRational::one();
    let qm = BigRational::from_integer(big_pow(q, m));
    let field = &one - BigRational::from_integer(BigInt::from(4)) / &qm;
    let dim_factor = if extra_factor {
        // 1 − t_pub · q^{λ t_pub − m}
        let lt = params.lambda * t;
        &one - BigRational::new(BigInt::from(t) * big_pow(q, lt), big_pow(q, m))
    } else {
        one.clone()
    };
    let top = (params.lambda * t).min(params.n);
    let mut total = BigRational::zero();
    for tp in ell.max(1)..=top {
        // 1 − q^{m(ℓ − t′)}
        let drop = &one - BigRational::new(BigInt::one(), big_pow(q, m * (tp - ell.min(tp))));
        let drop = if ell_exponent {
            Pow::pow(drop, ell as u32)
        } else {
            drop
        };
        let pr = rank_weight_probability(tp, params).expect("in range");
        total += &field * drop * &dim_factor * pr;
    }
    total
}

/// Unique decoding is guaranteed for ℓ = 1: the inflated error rank λ·t_pub
/// never exceeds ⌊(n−k)/2⌋.
fn unique_decoding(params: &ParameterSet) -> bool {
    params.ell == 1 && 2 * params.lambda * params.t_pub() <= params.n - params.k
}

/// log2 of the decryption-failure upper bound
/// `1 − Σ_{t′=ℓ}^{λt_pub} (1−4/q^m)(1−q^{m(ℓ−t′)})^ℓ Pr[rank(E·P) = t′]`.
pub fn decryption_failure_bound(params: &ParameterSet) -> f64 {
    if unique_decoding(params) {
        return f64::NEG_INFINITY;
    }
    log2_rational(&(BigRational::one() - success_mass(params, true, false)))
}

/// The looser variant that also charges the product-space dimension
/// condition: each term carries `(1 − t_pub·q^{λt_pub−m})`, and the
/// `(1−q^{m(ℓ−t′)})` factor appears without the power ℓ.
pub fn decryption_failure_bound_unconditional(params: &ParameterSet) -> f64 {
    if unique_decoding(params) {
        return f64::NEG_INFINITY;
    }
    log2_rational(&(BigRational::one() - success_mass(params, false, true)))
}

/// Minimum distance `t_pub − ℓ + 1` of an MRD error code, and whether it
/// clears the `(d−1)/(2λ)` threshold with `d = n−k+1`.
pub fn error_distance_check(params: &ParameterSet) -> (usize, bool) {
    let d_e = (params.t_pub() + 1).saturating_sub(params.ell);
    // (n−k)/(2λ) < d_E
    let ok = params.n - params.k < 2 * params.lambda * d_e;
    (d_e, ok)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecurityReport {
    pub t_pub: usize,
    pub wf_loidreau_bits: f64,
    pub wf_ae_bits: Option<f64>,
    pub rate: Ratio<u64>,
    pub key_size_bytes: Option<u64>,
    pub p_fail_log2: f64,
    pub mrd_bound_log2: f64,
    pub mrd_bound_vacuous: bool,
    pub d_e: usize,
    pub d_e_threshold_ok: bool,
}

pub fn security_report(params: &ParameterSet) -> SecurityReport {
    let mrd = mrd_probability_bound(params);
    let (d_e, d_e_threshold_ok) = error_distance_check(params);
    SecurityReport {
        t_pub: params.t_pub(),
        wf_loidreau_bits: wf_loidreau(params),
        wf_ae_bits: wf_ae(params),
        rate: rate(params),
        key_size_bytes: key_size_bytes(params).ok(),
        p_fail_log2: decryption_failure_bound(params),
        mrd_bound_log2: mrd.log2,
        mrd_bound_vacuous: mrd.vacuous,
        d_e,
        d_e_threshold_ok,
    }
}

// ---- Monte Carlo ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub trials: u64,
    pub seed: u64,
    /// Decoding radius; defaults to ⌊ℓ(n−k)/(ℓ+1)⌋.
    pub tau: Option<usize>,
    /// Encrypt with `E = 0` instead of a sampled error.
    pub zero_error: bool,
}

impl MonteCarloConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            tau: None,
            zero_error: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Success,
    Failure,
    /// Decoding returned a message different from the one encrypted.
    Wrong,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloResult {
    pub trials: u64,
    pub failures: u64,
    pub wrong: u64,
    /// `log2(failures/trials)`, or `−log2(trials)` when nothing failed.
    pub log2_rate_or_floor: f64,
}

impl MonteCarloResult {
    pub fn from_outcomes(outcomes: impl IntoIterator<Item = TrialOutcome>) -> Self {
        let (mut trials, mut failures, mut wrong) = (0u64, 0u64, 0u64);
        for o in outcomes {
            trials += 1;
            match o {
                TrialOutcome::Success => {}
                TrialOutcome::Failure => failures += 1,
                TrialOutcome::Wrong => wrong += 1,
            }
        }
        let bad = failures + wrong;
        let log2_rate_or_floor = if trials == 0 {
            0.0
        } else if bad == 0 {
            -libm::log2(trials as f64)
        } else {
            libm::log2(bad as f64) - libm::log2(trials as f64)
        };
        Self {
            trials,
            failures,
            wrong,
            log2_rate_or_floor,
        }
    }
}

/// Keys shared by all trials of one simulation.
pub fn simulation_keys(
    sys: &Cryptosystem,
    seed: u64,
) -> Result<(PublicKey, SecretKey), CryptoError> {
    sys.keygen(&mut RngStream::named(seed, "keygen"))
}

/// Trial `index` draws from its own stream, so results do not depend on how
/// trials are distributed over workers.
pub fn run_trial(
    sys: &Cryptosystem,
    pk: &PublicKey,
    sk: &SecretKey,
    cfg: &MonteCarloConfig,
    index: u64,
) -> Result<TrialOutcome, CryptoError> {
    let mut rng = RngStream::indexed(cfg.seed, index);
    let f = Ext(sys.ctx());
    let p = sys.params();
    let msg = sample_uniform(&f, p.ell, p.k, &mut rng);
    let ct = if cfg.zero_error {
        sys.encrypt_with_error(pk, &msg, &linalg::zeros(&f, p.ell, p.n))?
    } else {
        sys.encrypt(pk, &msg, &mut rng)?
    };
    let tau = cfg.tau.unwrap_or_else(|| p.decoding_radius());
    match sys.decrypt_with_radius(sk, &ct, tau) {
        Ok(m) if m == msg => Ok(TrialOutcome::Success),
        Ok(_) => Ok(TrialOutcome::Wrong),
        Err(CryptoError::DecryptionFailure) => Ok(TrialOutcome::Failure),
        Err(e) => Err(e),
    }
}

/// One key pair, then `trials` independent encrypt/decrypt rounds.
pub fn monte_carlo_failure_rate(
    sys: &Cryptosystem,
    cfg: &MonteCarloConfig,
) -> Result<MonteCarloResult, CryptoError> {
    let (pk, sk) = simulation_keys(sys, cfg.seed)?;
    let outcomes = (0..cfg.trials)
        .map(|i| run_trial(sys, &pk, &sk, cfg, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MonteCarloResult::from_outcomes(outcomes))
}

// ---- RSD instances ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsdKind {
    Plain,
    Interleaved,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsdInstance {
    /// Full-rank `(n−k) × n` parity-check matrix.
    pub h: MatQm,
    /// Secret `ℓ × n` matrix of GF(q)-rank `w`.
    pub x: MatQm,
    /// `H·Xᵀ`, one column per row of `X`.
    pub syndromes: MatQm,
}

pub fn sample_rsd_instance<R: RngCore + ?Sized>(
    ctx: &FieldCtx,
    kind: RsdKind,
    n: usize,
    k: usize,
    w: usize,
    ell: usize,
    rng: &mut R,
) -> Result<RsdInstance, LinalgError> {
    let ell = match kind {
        RsdKind::Plain => 1,
        RsdKind::Interleaved => ell,
    };
    if k > n || ell == 0 {
        return Err(LinalgError::ShapeMismatch {
            expected: (n, n),
            got: (k, ell),
        });
    }
    let f = Ext(ctx);
    let h = sample_full_rank(&f, n - k, n, rng, DEFAULT_RETRY_BUDGET)?;
    let x = sample_rank_q(ctx, ell, n, w, rng, DEFAULT_RETRY_BUDGET)?;
    let syndromes = linalg::mul(&f, &h, &x.transpose());
    Ok(RsdInstance { h, x, syndromes })
}
