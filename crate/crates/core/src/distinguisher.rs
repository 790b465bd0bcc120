//! q-sum dimension tests separating Moore-structured error codes from random
//! ones.
//!
//! For a code `C`, `Λ_i(C) = C + C^{[1]} + … + C^{[i]}`.  Gabidulin codes grow
//! by one dimension per Frobenius shift, random codes by their full dimension.
//! Since `⟨[G_pub; Y]⟩ = ⟨[G_pub; E]⟩`, the growth of the augmented code
//! reveals the structure of the error code spanned by `A_E`.

use alloc::vec::Vec;

use rand::RngCore;

use crate::cryptosystem::{sample_error_code, CryptoError, Cryptosystem, PublicKey};
use crate::gabidulin::moore_matrix;
use crate::gf::FieldCtx;
use crate::linalg::{
    self, embed, frobenius_matrix, rank, rank_q, right_kernel, row_space_basis,
    sample_full_rank, sample_uniform, Base, Ext, LinalgError, MatQm, DEFAULT_RETRY_BUDGET,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DistinguisherError {
    #[error("augmented stack has rank {rank}, expected {expected}")]
    RankDeficientStack { rank: usize, expected: usize },
    #[error("shape mismatch: expected {expected} columns, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
}

/// Reduced basis of `Λ_i(C)` for the code spanned by the rows of `c`.
pub fn q_sum(ctx: &FieldCtx, c: &MatQm, i: usize) -> MatQm {
    q_sum_dims_and_basis(ctx, c, i).1
}

/// `dim Λ_j(C)` for `j = 0..=i_max`.
pub fn q_sum_dims(ctx: &FieldCtx, c: &MatQm, i_max: usize) -> Vec<usize> {
    q_sum_dims_and_basis(ctx, c, i_max).0
}

fn q_sum_dims_and_basis(ctx: &FieldCtx, c: &MatQm, i_max: usize) -> (Vec<usize>, MatQm) {
    let f = Ext(ctx);
    let n = c.cols();
    let mut basis = row_space_basis(&f, c);
    let mut dims = Vec::with_capacity(i_max + 1);
    dims.push(basis.rows());
    let mut shifted = c.clone();
    for _ in 1..=i_max {
        if basis.rows() == n {
            dims.push(n);
            continue;
        }
        shifted = frobenius_matrix(ctx, &shifted, 1);
        basis = row_space_basis(&f, &basis.vstack(&shifted));
        dims.push(basis.rows());
    }
    (dims, basis)
}

/// `dim Λ_i(⟨[G_pub; Y]⟩)` for `i = 0..=i_max`.
pub fn augmented_dims(
    ctx: &FieldCtx,
    g_pub: &MatQm,
    y: &MatQm,
    i_max: usize,
) -> Result<Vec<usize>, DistinguisherError> {
    if g_pub.cols() != y.cols() {
        return Err(DistinguisherError::ShapeMismatch {
            expected: g_pub.cols(),
            got: y.cols(),
        });
    }
    Ok(q_sum_dims(ctx, &g_pub.vstack(y), i_max))
}

fn augmented_dual(ctx: &FieldCtx, g_pub: &MatQm, y: &MatQm) -> Result<MatQm, DistinguisherError> {
    if g_pub.cols() != y.cols() {
        return Err(DistinguisherError::ShapeMismatch {
            expected: g_pub.cols(),
            got: y.cols(),
        });
    }
    let f = Ext(ctx);
    let stack = g_pub.vstack(y);
    let r = rank(&f, &stack);
    let expected = g_pub.rows() + y.rows();
    if r != expected {
        return Err(DistinguisherError::RankDeficientStack { rank: r, expected });
    }
    Ok(right_kernel(&f, &stack))
}

/// `dim Λ_i(C_aug^⊥)` for `i = 0..=i_max`.
pub fn dual_augmented_dims(
    ctx: &FieldCtx,
    g_pub: &MatQm,
    y: &MatQm,
    i_max: usize,
) -> Result<Vec<usize>, DistinguisherError> {
    let dual = augmented_dual(ctx, g_pub, y)?;
    Ok(q_sum_dims(ctx, &dual, i_max))
}

/// `min{n−ℓ+i, (i+1)(n−k), n}`.
pub fn dual_dimension_bound(n: usize, k: usize, ell: usize, i: usize) -> usize {
    (n - ell + i).min((i + 1) * (n - k)).min(n)
}

/// `min{(i+1)k + min{ℓ+i, t_pub}, n}`.
pub fn gabidulin_dimension_bound(n: usize, k: usize, ell: usize, t_pub: usize, i: usize) -> usize {
    ((i + 1) * k + (ell + i).min(t_pub)).min(n)
}

/// `min{(i+1)k + min{(i+1)ℓ, t_pub}, n}`.
pub fn random_dimension(n: usize, k: usize, ell: usize, t_pub: usize, i: usize) -> usize {
    ((i + 1) * k + ((i + 1) * ell).min(t_pub)).min(n)
}

/// Whether `2k + min{ℓ+1, t_pub} < n`.
pub fn distinguishable(n: usize, k: usize, ell: usize, t_pub: usize) -> bool {
    2 * k + (ell + 1).min(t_pub) < n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    GabidulinLike,
    RandomLike,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    /// Observed `dim Λ_i(C_aug)`; `None` when the precondition failed.
    pub dim: Option<usize>,
    pub gabidulin_bound: usize,
    pub random_dim: usize,
}

/// Three-way verdict on the error code hidden in `y`.
pub fn classify_error(
    ctx: &FieldCtx,
    g_pub: &MatQm,
    y: &MatQm,
    t_pub: usize,
    i: usize,
) -> Result<Classification, DistinguisherError> {
    let (n, k, ell) = (g_pub.cols(), g_pub.rows(), y.rows());
    let gabidulin_bound = gabidulin_dimension_bound(n, k, ell, t_pub, i);
    let random_dim = random_dimension(n, k, ell, t_pub, i);
    if !distinguishable(n, k, ell, t_pub) || gabidulin_bound >= random_dim {
        return Ok(Classification {
            verdict: Verdict::Inconclusive,
            dim: None,
            gabidulin_bound,
            random_dim,
        });
    }
    let d = augmented_dims(ctx, g_pub, y, i)?[i];
    let verdict = if d <= gabidulin_bound {
        Verdict::GabidulinLike
    } else if d == random_dim {
        Verdict::RandomLike
    } else {
        Verdict::Inconclusive
    };
    Ok(Classification {
        verdict,
        dim: Some(d),
        gabidulin_bound,
        random_dim,
    })
}

/// `ℓ × t` Moore matrix of a random vector of GF(q)-rank `t`.
pub fn gabidulin_error_code<R: RngCore + ?Sized>(
    ctx: &FieldCtx,
    ell: usize,
    t: usize,
    rng: &mut R,
) -> Result<MatQm, LinalgError> {
    let f = Ext(ctx);
    for _ in 0..DEFAULT_RETRY_BUDGET {
        let a = sample_uniform(&f, 1, t, rng);
        if rank_q(ctx, &a) == t {
            return Ok(moore_matrix(ctx, a.row(0), ell, 0));
        }
    }
    Err(LinalgError::SamplingTimeout(DEFAULT_RETRY_BUDGET))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCodeKind {
    Gabidulin,
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub y: MatQm,
    pub error: MatQm,
}

/// Ciphertext under `pk` whose error is `A_E·B` with `A_E` of the given kind.
pub fn sample_instance<R: RngCore + ?Sized>(
    sys: &Cryptosystem,
    pk: &PublicKey,
    kind: ErrorCodeKind,
    rng: &mut R,
) -> Result<Instance, CryptoError> {
    let ctx = sys.ctx();
    let p = sys.params();
    let t = sys.t_pub();
    let a = match kind {
        ErrorCodeKind::Gabidulin => gabidulin_error_code(ctx, p.ell, t, rng)?,
        ErrorCodeKind::Random => sample_error_code(ctx, p.ell, t, rng, DEFAULT_RETRY_BUDGET)?,
    };
    let b = sample_full_rank(&Base(ctx), t, p.n, rng, DEFAULT_RETRY_BUDGET)?;
    let f = Ext(ctx);
    let error = linalg::mul(&f, &a, &embed(ctx, &b));
    let msg = sample_uniform(&f, p.ell, p.k, rng);
    let ct = sys.encrypt_with_error(pk, &msg, &error)?;
    Ok(Instance { y: ct.y, error })
}

/// Whether every row of `a` lies in the row space of `b`.
pub fn is_subspace(ctx: &FieldCtx, a: &MatQm, b: &MatQm) -> bool {
    let f = Ext(ctx);
    rank(&f, &b.vstack(a)) == rank(&f, b)
}

/// `Λ_i(C_aug^⊥) ⊆ Λ_i(⟨H_pub⟩) ∩ Λ_i(⟨H_E⟩)`, where `H_pub` and `H_E` span
/// the duals of `⟨G_pub⟩` and `⟨E⟩`.
pub fn dual_containment_holds(
    ctx: &FieldCtx,
    g_pub: &MatQm,
    error: &MatQm,
    i: usize,
) -> Result<bool, DistinguisherError> {
    let f = Ext(ctx);
    let dual = augmented_dual(ctx, g_pub, error)?;
    let lhs = q_sum(ctx, &dual, i);
    let h_pub = q_sum(ctx, &right_kernel(&f, g_pub), i);
    let h_e = q_sum(ctx, &right_kernel(&f, error), i);
    Ok(is_subspace(ctx, &lhs, &h_pub) && is_subspace(ctx, &lhs, &h_e))
}
