//! Gabidulin and interleaved Gabidulin codes.
//!
//! The decoder is syndrome based.  With parity-check vector `h`, row `r` of the
//! received word has syndromes `s_j = Σ_i y_i h_i^{[j]}`.  An error of GF(q)-rank
//! `t` factors as `E = A·B` with `B` over GF(q), so `s_j = Σ_l A_{r,l} x_l^{[j]}`
//! where `x = B·hᵀ` is shared by all rows.  The q-linearized polynomial
//! `Γ(z) = Σ_u γ_u z^{[u]}` vanishing on `span(x)` satisfies, after applying
//! `[-j]`, the linear key equations
//!
//! ```text
//! Σ_u γ_u · (s^{(r)}_{j+u})^{[-j]} = 0,   0 ≤ j < n-k-t,  1 ≤ r ≤ ℓ.
//! ```
//!
//! The smallest `t` with a nonzero solution gives `Γ`; its GF(q)-root space
//! recovers `span(x)`, hence `B`, and `A` follows from one more linear solve.

use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use crate::gf::{FieldCtx, Fq, FqmElem};
use crate::linalg::{
    self, embed, enumerate_subspaces, expand, gaussian_binomial, rank_q, right_kernel, Base,
    Ext, LinalgError, MatQm, Matrix,
};

/// Subspace enumeration cap for [`decode_bruteforce_oracle`].
pub const DEFAULT_ORACLE_CAP: u128 = 1_000_000;

/// Codeword enumeration cap for [`min_rank_distance`].
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 26;

/// Key-equation kernel vectors tried before giving up.
const MAX_KERNEL_CANDIDATES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodeError {
    #[error("invalid code: {0}")]
    InvalidCode(&'static str),
    #[error("dual solution space has dimension {0}, expected 1")]
    DegenerateKernel(usize),
    #[error("decoding failure")]
    DecodingFailure,
    #[error("decoding radius {tau} exceeds the maximum {max}")]
    InvalidRadius { tau: usize, max: usize },
    #[error("received word has shape {got:?}, expected {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("enumeration of {0} candidates exceeds the configured cap")]
    TooLarge(u128),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Rows `x^{[start]}, x^{[start+1]}, …` of the Moore matrix of `g`.
pub fn moore_matrix(ctx: &FieldCtx, g: &[FqmElem], rows: usize, start_power: i64) -> MatQm {
    let mut data = Vec::with_capacity(rows * g.len());
    let mut cur: Vec<FqmElem> = g.iter().map(|x| ctx.frobenius(x, start_power)).collect();
    for j in 0..rows {
        if j > 0 {
            cur = cur.iter().map(|x| ctx.frobenius(x, 1)).collect();
        }
        data.extend(cur.iter().cloned());
    }
    Matrix::new(rows, g.len(), data)
}

/// `Gab[n, k]` with evaluation vector `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GabidulinCode {
    g: Vec<FqmElem>,
    k: usize,
    generator: MatQm,
    h: Option<Vec<FqmElem>>,
}

impl GabidulinCode {
    pub fn new(ctx: &FieldCtx, g: Vec<FqmElem>, k: usize) -> Result<Self, CodeError> {
        let n = g.len();
        if n == 0 || n > ctx.m() {
            return Err(CodeError::InvalidCode("length must satisfy 1 ≤ n ≤ m"));
        }
        if k == 0 || k > n {
            return Err(CodeError::InvalidCode("dimension must satisfy 1 ≤ k ≤ n"));
        }
        if rank_q(ctx, &Matrix::row_vector(g.clone())) != n {
            return Err(CodeError::InvalidCode("g must have GF(q)-rank n"));
        }
        let generator = moore_matrix(ctx, &g, k, 0);
        let mut code = Self {
            g,
            k,
            generator,
            h: None,
        };
        if k < n {
            code.h = Some(dual_vector(ctx, &code)?);
        }
        Ok(code)
    }

    /// Code with a uniformly drawn evaluation vector of rank n.
    pub fn random<R: RngCore + ?Sized>(
        ctx: &FieldCtx,
        n: usize,
        k: usize,
        rng: &mut R,
        budget: usize,
    ) -> Result<Self, CodeError> {
        if n == 0 || n > ctx.m() {
            return Err(CodeError::InvalidCode("length must satisfy 1 ≤ n ≤ m"));
        }
        let f = Ext(ctx);
        for _ in 0..budget {
            let g = linalg::sample_uniform(&f, 1, n, rng);
            if rank_q(ctx, &g) == n {
                return Self::new(ctx, g.into_data(), k);
            }
        }
        Err(LinalgError::SamplingTimeout(budget).into())
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn g(&self) -> &[FqmElem] {
        &self.g
    }

    pub fn generator(&self) -> &MatQm {
        &self.generator
    }

    /// Parity-check vector, present when k < n.
    pub fn dual(&self) -> Option<&[FqmElem]> {
        self.h.as_deref()
    }

    pub fn parity_check(&self, ctx: &FieldCtx) -> Option<MatQm> {
        self.h
            .as_ref()
            .map(|h| moore_matrix(ctx, h, self.n() - self.k, 0))
    }

    /// ⌊ℓ(n−k)/(ℓ+1)⌋.
    pub fn max_radius(&self, ell: usize) -> usize {
        ell * (self.n() - self.k) / (ell + 1)
    }
}

/// Vector `h` with `Σ_i h_i g_i^{[c]} = 0` for `c ∈ [−(n−k−1), k−1]`.
pub fn dual_vector(ctx: &FieldCtx, code: &GabidulinCode) -> Result<Vec<FqmElem>, CodeError> {
    let (n, k) = (code.n(), code.k());
    if k >= n {
        return Err(CodeError::InvalidCode("dual requires k < n"));
    }
    let system = moore_matrix(ctx, &code.g, n - 1, -((n - k - 1) as i64));
    let kernel = right_kernel(&Ext(ctx), &system);
    if kernel.rows() != 1 {
        return Err(CodeError::DegenerateKernel(kernel.rows()));
    }
    Ok(kernel.row(0).to_vec())
}

/// Row-wise encoding `M·G`.
pub fn encode_interleaved(ctx: &FieldCtx, message: &MatQm, code: &GabidulinCode) -> MatQm {
    linalg::mul(&Ext(ctx), message, &code.generator)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub message: MatQm,
    pub error: MatQm,
}

fn check_shape(code: &GabidulinCode, y: &MatQm) -> Result<(), CodeError> {
    if y.cols() != code.n() || y.rows() == 0 {
        return Err(CodeError::ShapeMismatch {
            expected: (y.rows().max(1), code.n()),
            got: y.shape(),
        });
    }
    Ok(())
}

/// Codeword rows to message rows, then the mandatory re-encode check.
fn finish(
    ctx: &FieldCtx,
    code: &GabidulinCode,
    y: &MatQm,
    error: MatQm,
    tau: usize,
) -> Option<Decoded> {
    let f = Ext(ctx);
    let codeword = linalg::sub(&f, y, &error);
    let message = linalg::solve_left(&f, &code.generator, &codeword).ok()?;
    let reencoded = linalg::add(&f, &encode_interleaved(ctx, &message, code), &error);
    if reencoded != *y || rank_q(ctx, &error) > tau {
        return None;
    }
    Some(Decoded { message, error })
}

/// Decodes up to `tau ≤ ⌊ℓ(n−k)/(ℓ+1)⌋` rank errors.
pub fn decode_interleaved(
    ctx: &FieldCtx,
    y: &MatQm,
    code: &GabidulinCode,
    tau: usize,
) -> Result<Decoded, CodeError> {
    check_shape(code, y)?;
    let ell = y.rows();
    let max = code.max_radius(ell);
    if tau > max {
        return Err(CodeError::InvalidRadius { tau, max });
    }
    let f = Ext(ctx);
    let (n, k) = (code.n(), code.k());
    let parity = match code.parity_check(ctx) {
        Some(h) => h,
        // k = n: every word is a codeword
        None => {
            return finish(ctx, code, y, linalg::zeros(&f, ell, n), tau)
                .ok_or(CodeError::DecodingFailure)
        }
    };
    let syndromes = linalg::mul(&f, y, &parity.transpose());
    if linalg::is_zero_matrix(&f, &syndromes) {
        return finish(ctx, code, y, linalg::zeros(&f, ell, n), tau)
            .ok_or(CodeError::DecodingFailure);
    }
    let redundancy = n - k;
    for t in 1..=tau {
        let eq_per_row = redundancy - t;
        let mut data = Vec::with_capacity(ell * eq_per_row * (t + 1));
        for r in 0..ell {
            for j in 0..eq_per_row {
                for u in 0..=t {
                    data.push(ctx.frobenius(syndromes.get(r, j + u), -(j as i64)));
                }
            }
        }
        let system = Matrix::new(ell * eq_per_row, t + 1, data);
        let kernel = right_kernel(&f, &system);
        if kernel.rows() == 0 {
            continue;
        }
        for c in 0..kernel.rows().min(MAX_KERNEL_CANDIDATES) {
            if let Some(d) = recover_error(ctx, code, y, &syndromes, kernel.row(c), t, tau) {
                return Ok(d);
            }
        }
        return Err(CodeError::DecodingFailure);
    }
    Err(CodeError::DecodingFailure)
}

/// Evaluates `Σ_u γ_u z^{[u]}`.
fn eval_linearized(ctx: &FieldCtx, poly: &[FqmElem], z: &FqmElem) -> FqmElem {
    let mut acc = ctx.zero();
    let mut zp = z.clone();
    for (u, c) in poly.iter().enumerate() {
        if u > 0 {
            zp = ctx.frobenius(&zp, 1);
        }
        ctx.mul_acc(&mut acc, c, &zp);
    }
    acc
}

fn recover_error(
    ctx: &FieldCtx,
    code: &GabidulinCode,
    y: &MatQm,
    syndromes: &MatQm,
    gamma: &[FqmElem],
    t: usize,
    tau: usize,
) -> Option<Decoded> {
    let m = ctx.m();
    let base = Base(ctx);
    // GF(q)-matrix of z ↦ Γ(z) in the basis γ; column b is Γ(γ_b)
    let images: Vec<FqmElem> = ctx
        .gamma()
        .iter()
        .map(|b| eval_linearized(ctx, gamma, b))
        .collect();
    let map = expand(ctx, &Matrix::row_vector(images));
    let roots = right_kernel(&base, &map);
    if roots.rows() != t {
        return None;
    }
    debug_assert_eq!(roots.cols(), m);
    let rho: Vec<FqmElem> = (0..t)
        .map(|i| ctx.from_coeffs(roots.row(i).to_vec()).expect("in range"))
        .collect();
    // write each root in terms of h over GF(q): ρ_l = Σ_i B_{l,i} h_i
    let h = code.dual()?;
    let h_exp = expand(ctx, &Matrix::row_vector(h.to_vec()));
    let rho_exp = roots.transpose();
    let b = linalg::solve(&base, &h_exp, &rho_exp).ok()?.transpose();
    // S = A · Q with Q_{l,j} = ρ_l^{[j]}
    let q_mat = moore_matrix(ctx, &rho, code.n() - code.k(), 0).transpose();
    let a = linalg::solve_left(&Ext(ctx), &q_mat, syndromes).ok()?;
    let error = linalg::mul(&Ext(ctx), &a, &embed(ctx, &b));
    finish(ctx, code, y, error, tau)
}

/// Exhaustive minimum-rank decoder for tiny parameters.
///
/// Tries every GF(q)-row space of dimension `0..=tau` for the error, in order
/// of dimension and then lexicographic RREF basis, and returns the first
/// candidate for which `Y = M·G + A·B'` is solvable.
pub fn decode_bruteforce_oracle(
    ctx: &FieldCtx,
    y: &MatQm,
    code: &GabidulinCode,
    tau: usize,
    cap: u128,
) -> Result<Decoded, CodeError> {
    check_shape(code, y)?;
    let n = code.n();
    let q = ctx.q() as u64;
    let total = (0..=tau).fold(0u128, |acc, d| acc.saturating_add(gaussian_binomial(q, n, d)));
    if total > cap {
        return Err(CodeError::TooLarge(total));
    }
    let f = Ext(ctx);
    let k = code.k();
    for d in 0..=tau.min(n) {
        for basis in enumerate_subspaces(ctx, n, d) {
            let w = code.generator.vstack(&embed(ctx, &basis));
            let Ok(x) = linalg::solve_left(&f, &w, y) else {
                continue;
            };
            let msg_cols: Vec<usize> = (0..k).collect();
            let err_cols: Vec<usize> = (k..k + d).collect();
            let message = x.select_cols(&msg_cols);
            let a = x.select_cols(&err_cols);
            let error = if d == 0 {
                linalg::zeros(&f, y.rows(), n)
            } else {
                linalg::mul(&f, &a, &embed(ctx, &basis))
            };
            return Ok(Decoded { message, error });
        }
    }
    Err(CodeError::DecodingFailure)
}

/// Minimum rank distance of the code spanned by the rows of `basis`, by
/// enumerating every nonzero codeword.
pub fn min_rank_distance(ctx: &FieldCtx, basis: &MatQm, cap: u128) -> Result<usize, CodeError> {
    let dim = basis.rows();
    let n = basis.cols();
    let m = ctx.m();
    let q = ctx.q() as u128;
    let size = q
        .checked_pow((m * dim) as u32)
        .unwrap_or(u128::MAX);
    if size > cap {
        return Err(CodeError::TooLarge(size));
    }
    if dim == 0 {
        return Ok(0);
    }
    let scalars = all_elements(ctx);
    // multiples[i][a] = a · basis_i
    let multiples: Vec<Vec<Vec<FqmElem>>> = (0..dim)
        .map(|i| {
            scalars
                .iter()
                .map(|a| basis.row(i).iter().map(|x| ctx.mul(a, x)).collect())
                .collect()
        })
        .collect();
    let mut best = usize::MAX;
    if ctx.q() == 2 && m <= 64 {
        let packed: Vec<Vec<Vec<u64>>> = multiples
            .iter()
            .map(|rows| rows.iter().map(|v| v.iter().map(pack_bits).collect()).collect())
            .collect();
        let mut acc = vec![vec![0u64; n]; dim + 1];
        enumerate_binary(&packed, 0, &mut acc, false, &mut best);
    } else {
        let mut acc = vec![vec![ctx.zero(); n]; dim + 1];
        enumerate_generic(ctx, &multiples, 0, &mut acc, false, &mut best);
    }
    Ok(best)
}

fn all_elements(ctx: &FieldCtx) -> Vec<FqmElem> {
    let q = ctx.q() as u64;
    let m = ctx.m();
    let total = q.pow(m as u32);
    (0..total)
        .map(|mut v| {
            let coeffs = (0..m)
                .map(|_| {
                    let c = (v % q) as Fq;
                    v /= q;
                    c
                })
                .collect();
            ctx.from_coeffs(coeffs).expect("in range")
        })
        .collect()
}

fn pack_bits(x: &FqmElem) -> u64 {
    x.coeffs()
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &c)| acc | ((c as u64) << i))
}

fn binary_rank(vectors: &[u64]) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for &v in vectors {
        let mut x = v;
        while x != 0 {
            let top = 63 - x.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = x;
                rank += 1;
                break;
            }
            x ^= basis[top];
        }
    }
    rank
}

fn enumerate_binary(
    packed: &[Vec<Vec<u64>>],
    level: usize,
    acc: &mut Vec<Vec<u64>>,
    nonzero: bool,
    best: &mut usize,
) {
    if level == packed.len() {
        if nonzero {
            *best = (*best).min(binary_rank(&acc[level]));
        }
        return;
    }
    for (a, mult) in packed[level].iter().enumerate() {
        let next: Vec<u64> = acc[level].iter().zip(mult).map(|(x, y)| x ^ y).collect();
        acc[level + 1] = next;
        enumerate_binary(packed, level + 1, acc, nonzero || a != 0, best);
    }
}

fn enumerate_generic(
    ctx: &FieldCtx,
    multiples: &[Vec<Vec<FqmElem>>],
    level: usize,
    acc: &mut Vec<Vec<FqmElem>>,
    nonzero: bool,
    best: &mut usize,
) {
    if level == multiples.len() {
        if nonzero {
            let w = rank_q(ctx, &Matrix::row_vector(acc[level].clone()));
            *best = (*best).min(w);
        }
        return;
    }
    for (a, mult) in multiples[level].iter().enumerate() {
        let next: Vec<FqmElem> = acc[level].iter().zip(mult).map(|(x, y)| ctx.add(x, y)).collect();
        acc[level + 1] = next;
        enumerate_generic(ctx, multiples, level + 1, acc, nonzero || a != 0, best);
    }
}
