//! Key generation, encryption and decryption of the interleaved scheme.
//!
//! The secret key hides a Gabidulin code `G` behind a scrambler `S` and a
//! column mixer `P` whose entries lie in a λ-dimensional GF(q)-subspace `V`.
//! A ciphertext is `Y = M·G_pub + E` with `E = A_E·B`, where `A_E` has full
//! GF(q^m)-rank ℓ and full GF(q)-rank t_pub, so every row of `E` has rank at
//! least the minimum distance of the code spanned by `A_E`.  Decryption
//! multiplies by `P`, which inflates the error rank to at most λ·t_pub, and
//! decodes in the interleaved code.

mod codec;

use core::fmt;

use rand::RngCore;

use crate::gabidulin::{decode_interleaved, CodeError, GabidulinCode};
use crate::gf::{prime_power, FieldCtx, GfError};
use crate::linalg::{
    self, embed, rank_q, rank_qm, sample_full_rank, sample_invertible,
    sample_matrix_over_subspace, sample_subspace, sample_uniform, Base, Ext, LinalgError, MatQ,
    MatQm, Matrix, SubspaceV, DEFAULT_RETRY_BUDGET,
};

pub use codec::{read_header, Header, Kind, FORMAT_VERSION};

/// One row of the parameter restriction table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    QPrimePower,
    MPositive,
    LengthWithinExtension,
    DimensionBelowLength,
    DimensionPositive,
    LambdaLower,
    LambdaUpper,
    EllPositive,
    EllBelowTpub,
}

impl Constraint {
    pub const ALL: [Constraint; 9] = [
        Constraint::QPrimePower,
        Constraint::MPositive,
        Constraint::LengthWithinExtension,
        Constraint::DimensionBelowLength,
        Constraint::DimensionPositive,
        Constraint::LambdaLower,
        Constraint::LambdaUpper,
        Constraint::EllPositive,
        Constraint::EllBelowTpub,
    ];

    pub fn describe(self) -> &'static str {
        match self {
            Constraint::QPrimePower => "q is a prime power",
            Constraint::MPositive => "1 <= m",
            Constraint::LengthWithinExtension => "n <= m",
            Constraint::DimensionBelowLength => "k < n",
            Constraint::DimensionPositive => "1 <= k",
            Constraint::LambdaLower => "n/(n-k) < lambda",
            Constraint::LambdaUpper => "lambda <= floor((n-k)/2)",
            Constraint::EllPositive => "1 <= ell",
            Constraint::EllBelowTpub => "ell < t_pub",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("constraint violated: {violated}")]
pub struct ParamError {
    pub violated: Constraint,
}

/// `(q, m, n, k, λ, ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParameterSet {
    pub q: u64,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub lambda: usize,
    pub ell: usize,
}

impl ParameterSet {
    pub fn new(
        q: u64,
        m: usize,
        n: usize,
        k: usize,
        lambda: usize,
        ell: usize,
    ) -> Result<Self, ParamError> {
        let p = Self {
            q,
            m,
            n,
            k,
            lambda,
            ell,
        };
        p.validate()?;
        Ok(p)
    }

    /// `⌊ℓ(n−k) / (λ(ℓ+1))⌋`, or 0 when undefined.
    pub fn t_pub(&self) -> usize {
        if self.lambda == 0 || self.k >= self.n {
            return 0;
        }
        self.ell * (self.n - self.k) / (self.lambda * (self.ell + 1))
    }

    /// Decoding radius `⌊ℓ(n−k)/(ℓ+1)⌋` of the interleaved secret code.
    pub fn decoding_radius(&self) -> usize {
        if self.k >= self.n {
            return 0;
        }
        self.ell * (self.n - self.k) / (self.ell + 1)
    }

    pub fn holds(&self, c: Constraint) -> bool {
        let redundancy = self.n.saturating_sub(self.k);
        match c {
            Constraint::QPrimePower => prime_power(self.q).is_some(),
            Constraint::MPositive => self.m >= 1,
            Constraint::LengthWithinExtension => self.n <= self.m,
            Constraint::DimensionBelowLength => self.k < self.n,
            Constraint::DimensionPositive => self.k >= 1,
            // n/(n−k) < λ  ⇔  n < λ(n−k)
            Constraint::LambdaLower => redundancy > 0 && self.n < self.lambda * redundancy,
            Constraint::LambdaUpper => self.lambda <= redundancy / 2,
            Constraint::EllPositive => self.ell >= 1,
            Constraint::EllBelowTpub => self.ell < self.t_pub(),
        }
    }

    /// Every constraint with its verdict, in table order.
    pub fn check(&self) -> [(Constraint, bool); 9] {
        Constraint::ALL.map(|c| (c, self.holds(c)))
    }

    /// Fails on the first violated constraint.
    pub fn validate(&self) -> Result<(), ParamError> {
        match Constraint::ALL.iter().find(|&&c| !self.holds(c)) {
            Some(&violated) => Err(ParamError { violated }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CryptoError {
    #[error(transparent)]
    InvalidParams(#[from] ParamError),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Code(CodeError),
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("injected error has rank {rank}, above t_pub = {max}")]
    ErrorTooHeavy { rank: usize, max: usize },
    #[error("decryption failure")]
    DecryptionFailure,
    #[error("object was produced under different parameters")]
    FingerprintMismatch,
    #[error("malformed encoding: {0}")]
    MalformedEncoding(&'static str),
    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: u8, expected: u8 },
}

impl From<CodeError> for CryptoError {
    fn from(e: CodeError) -> Self {
        match e {
            CodeError::Linalg(l) => CryptoError::Linalg(l),
            other => CryptoError::Code(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    pub g_pub: MatQm,
    pub params: ParameterSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey {
    pub code: GabidulinCode,
    pub s: MatQm,
    pub p: MatQm,
    pub v: SubspaceV,
    pub s_inv: MatQm,
    pub p_inv: MatQm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext {
    pub y: MatQm,
    pub fingerprint: u64,
}

/// Reduced row echelon form `[I | X]` up to the column permutation `pivots`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Systematic {
    pub pivots: alloc::vec::Vec<usize>,
    pub redundancy: MatQm,
}

impl PublicKey {
    pub fn systematic(&self, ctx: &FieldCtx) -> Systematic {
        let red = linalg::reduce(&Ext(ctx), &self.g_pub);
        let free: alloc::vec::Vec<usize> = (0..self.g_pub.cols())
            .filter(|c| !red.pivots.contains(c))
            .collect();
        let rows: alloc::vec::Vec<usize> = (0..red.rank).collect();
        Systematic {
            redundancy: red.rref.select_rows(&rows).select_cols(&free),
            pivots: red.pivots,
        }
    }
}

/// Parameters bound to a concrete field.
#[derive(Debug, Clone)]
pub struct Cryptosystem {
    params: ParameterSet,
    ctx: FieldCtx,
}

impl Cryptosystem {
    /// Validates `params` and builds GF(q^m) with default moduli.
    pub fn new(params: ParameterSet) -> Result<Self, CryptoError> {
        params.validate()?;
        let ctx = FieldCtx::with_order(params.q, params.m)?;
        Ok(Self { params, ctx })
    }

    pub fn with_field(params: ParameterSet, ctx: FieldCtx) -> Result<Self, CryptoError> {
        params.validate()?;
        if ctx.q() as u64 != params.q || ctx.m() != params.m {
            return Err(GfError::FieldMismatch.into());
        }
        Ok(Self { params, ctx })
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn t_pub(&self) -> usize {
        self.params.t_pub()
    }

    pub fn keygen<R: RngCore + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(PublicKey, SecretKey), CryptoError> {
        let ParameterSet { n, k, lambda, .. } = self.params;
        let ctx = &self.ctx;
        let f = Ext(ctx);
        let code = GabidulinCode::random(ctx, n, k, rng, DEFAULT_RETRY_BUDGET)?;
        let s = sample_invertible(&f, k, rng, DEFAULT_RETRY_BUDGET)?;
        let v = sample_subspace(ctx, lambda, rng, DEFAULT_RETRY_BUDGET)?;
        let p = sample_matrix_over_subspace(ctx, &v, n, rng, DEFAULT_RETRY_BUDGET)?;
        let s_inv = linalg::inverse(&f, &s)?;
        let p_inv = linalg::inverse(&f, &p)?;
        let g_pub = linalg::mul(&f, &linalg::mul(&f, &s, code.generator()), &p_inv);
        let pk = PublicKey {
            g_pub,
            params: self.params,
        };
        let sk = SecretKey {
            code,
            s,
            p,
            v,
            s_inv,
            p_inv,
        };
        Ok((pk, sk))
    }

    /// `(A_E, B)` with `A_E` of GF(q^m)-rank ℓ and GF(q)-rank t_pub, and `B`
    /// a full-rank t_pub×n matrix over GF(q).
    pub fn sample_error_factors<R: RngCore + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(MatQm, MatQ), CryptoError> {
        let ctx = &self.ctx;
        let (ell, t) = (self.params.ell, self.t_pub());
        let a = sample_error_code(ctx, ell, t, rng, DEFAULT_RETRY_BUDGET)?;
        let b = sample_full_rank(&Base(ctx), t, self.params.n, rng, DEFAULT_RETRY_BUDGET)?;
        Ok((a, b))
    }

    pub fn sample_error<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<MatQm, CryptoError> {
        let (a, b) = self.sample_error_factors(rng)?;
        Ok(linalg::mul(&Ext(&self.ctx), &a, &embed(&self.ctx, &b)))
    }

    /// Hash of the field and parameters, carried by every ciphertext.
    pub fn fingerprint(&self) -> u64 {
        codec::fingerprint(&self.ctx, &self.params)
    }

    fn check_message(&self, msg: &MatQm) -> Result<(), CryptoError> {
        let expected = (self.params.ell, self.params.k);
        if msg.shape() != expected {
            return Err(CryptoError::ShapeMismatch {
                expected,
                got: msg.shape(),
            });
        }
        Ok(())
    }

    fn check_key(&self, pk: &PublicKey) -> Result<(), CryptoError> {
        let expected = (self.params.k, self.params.n);
        if pk.params != self.params {
            return Err(CryptoError::FingerprintMismatch);
        }
        if pk.g_pub.shape() != expected {
            return Err(CryptoError::ShapeMismatch {
                expected,
                got: pk.g_pub.shape(),
            });
        }
        Ok(())
    }

    pub fn encrypt<R: RngCore + ?Sized>(
        &self,
        pk: &PublicKey,
        msg: &MatQm,
        rng: &mut R,
    ) -> Result<Ciphertext, CryptoError> {
        self.check_key(pk)?;
        self.check_message(msg)?;
        let e = self.sample_error(rng)?;
        Ok(self.combine(pk, msg, &e))
    }

    /// Encryption with a caller-chosen error of GF(q)-rank at most t_pub.
    pub fn encrypt_with_error(
        &self,
        pk: &PublicKey,
        msg: &MatQm,
        error: &MatQm,
    ) -> Result<Ciphertext, CryptoError> {
        self.check_key(pk)?;
        self.check_message(msg)?;
        let expected = (self.params.ell, self.params.n);
        if error.shape() != expected {
            return Err(CryptoError::ShapeMismatch {
                expected,
                got: error.shape(),
            });
        }
        let rank = rank_q(&self.ctx, error);
        if rank > self.t_pub() {
            return Err(CryptoError::ErrorTooHeavy {
                rank,
                max: self.t_pub(),
            });
        }
        Ok(self.combine(pk, msg, error))
    }

    fn combine(&self, pk: &PublicKey, msg: &MatQm, error: &MatQm) -> Ciphertext {
        let f = Ext(&self.ctx);
        let y = linalg::add(&f, &linalg::mul(&f, msg, &pk.g_pub), error);
        Ciphertext {
            y,
            fingerprint: self.fingerprint(),
        }
    }

    pub fn decrypt(&self, sk: &SecretKey, ct: &Ciphertext) -> Result<MatQm, CryptoError> {
        self.decrypt_with_radius(sk, ct, self.params.decoding_radius())
    }

    /// Decryption with an explicit decoding radius, for experiments.
    pub fn decrypt_with_radius(
        &self,
        sk: &SecretKey,
        ct: &Ciphertext,
        tau: usize,
    ) -> Result<MatQm, CryptoError> {
        let expected = (self.params.ell, self.params.n);
        if ct.y.shape() != expected {
            return Err(CryptoError::ShapeMismatch {
                expected,
                got: ct.y.shape(),
            });
        }
        if ct.fingerprint != self.fingerprint() {
            return Err(CryptoError::FingerprintMismatch);
        }
        if sk.code.n() != self.params.n || sk.code.k() != self.params.k {
            return Err(CryptoError::FingerprintMismatch);
        }
        let f = Ext(&self.ctx);
        let yp = linalg::mul(&f, &ct.y, &sk.p);
        let decoded = match decode_interleaved(&self.ctx, &yp, &sk.code, tau) {
            Ok(d) => d,
            Err(CodeError::DecodingFailure) => return Err(CryptoError::DecryptionFailure),
            Err(e) => return Err(e.into()),
        };
        Ok(linalg::mul(&f, &decoded.message, &sk.s_inv))
    }
}

/// Uniform ℓ×t matrix over GF(q^m) with GF(q^m)-rank ℓ and GF(q)-rank t.
pub fn sample_error_code<R: RngCore + ?Sized>(
    ctx: &FieldCtx,
    ell: usize,
    t: usize,
    rng: &mut R,
    budget: usize,
) -> Result<MatQm, LinalgError> {
    if t > ell * ctx.m() || ell > t {
        return Err(LinalgError::DimensionTooLarge {
            dim: t,
            ambient: ell * ctx.m(),
        });
    }
    let f = Ext(ctx);
    for _ in 0..budget {
        let a = sample_uniform(&f, ell, t, rng);
        if rank_qm(ctx, &a) == ell && rank_q(ctx, &a) == t {
            return Ok(a);
        }
    }
    Err(LinalgError::SamplingTimeout(budget))
}

impl Matrix<crate::gf::FqmElem> {
    /// Every entry lies in `span(v)`.
    pub fn entries_in(&self, ctx: &FieldCtx, v: &SubspaceV) -> bool {
        self.data().iter().all(|x| v.contains(ctx, x))
    }
}
