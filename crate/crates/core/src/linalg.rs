//! Dense exact linear algebra over GF(q) and GF(q^m).
//!
//! [`Matrix`] is generic over the entry type; arithmetic goes through a
//! [`LinField`] handle ([`Base`] for GF(q), [`Ext`] for GF(q^m)) so the same
//! elimination code serves both levels.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;

use rand::{Rng, RngCore};

use crate::gf::{FieldCtx, Fq, FqmElem};

/// Rejection samplers give up after this many draws by default.
pub const DEFAULT_RETRY_BUDGET: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("linear system has no solution")]
    NoSolution,
    #[error("matrix is singular")]
    Singular,
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("rejection sampling exceeded {0} attempts")]
    SamplingTimeout(usize),
    #[error("requested subspace dimension {dim} exceeds ambient dimension {ambient}")]
    DimensionTooLarge { dim: usize, ambient: usize },
}

/// Field operations needed by the generic matrix routines.
pub trait LinField {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Inverse of a nonzero element.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    /// `target += c * src`, entrywise.
    fn add_scaled(&self, target: &mut [Self::Elem], c: &Self::Elem, src: &[Self::Elem]) {
        for (t, s) in target.iter_mut().zip(src) {
            *t = self.add(t, &self.mul(c, s));
        }
    }

    fn scale_slice(&self, row: &mut [Self::Elem], c: &Self::Elem) {
        for x in row.iter_mut() {
            *x = self.mul(x, c);
        }
    }
}

/// GF(q) operations.
#[derive(Debug, Clone, Copy)]
pub struct Base<'a>(pub &'a FieldCtx);

/// GF(q^m) operations.
#[derive(Debug, Clone, Copy)]
pub struct Ext<'a>(pub &'a FieldCtx);

impl LinField for Base<'_> {
    type Elem = Fq;

    fn zero(&self) -> Fq {
        0
    }
    fn one(&self) -> Fq {
        1
    }
    fn is_zero(&self, a: &Fq) -> bool {
        *a == 0
    }
    fn add(&self, a: &Fq, b: &Fq) -> Fq {
        self.0.fq_add(*a, *b)
    }
    fn sub(&self, a: &Fq, b: &Fq) -> Fq {
        self.0.fq_sub(*a, *b)
    }
    fn neg(&self, a: &Fq) -> Fq {
        self.0.fq_neg(*a)
    }
    fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        self.0.fq_mul(*a, *b)
    }
    fn inv(&self, a: &Fq) -> Fq {
        self.0.fq_inv(*a).expect("inverse of zero")
    }
    fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> Fq {
        rng.gen_range(0..self.0.q()) as Fq
    }
}

impl LinField for Ext<'_> {
    type Elem = FqmElem;

    fn zero(&self) -> FqmElem {
        self.0.zero()
    }
    fn one(&self) -> FqmElem {
        self.0.one()
    }
    fn is_zero(&self, a: &FqmElem) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &FqmElem, b: &FqmElem) -> FqmElem {
        self.0.add(a, b)
    }
    fn sub(&self, a: &FqmElem, b: &FqmElem) -> FqmElem {
        self.0.sub(a, b)
    }
    fn neg(&self, a: &FqmElem) -> FqmElem {
        self.0.neg(a)
    }
    fn mul(&self, a: &FqmElem, b: &FqmElem) -> FqmElem {
        self.0.mul(a, b)
    }
    fn inv(&self, a: &FqmElem) -> FqmElem {
        self.0.inv(a).expect("inverse of zero")
    }
    fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> FqmElem {
        let q = self.0.q();
        let coeffs = (0..self.0.m()).map(|_| rng.gen_range(0..q) as Fq).collect();
        self.0.from_coeffs(coeffs).expect("in range")
    }
    fn add_scaled(&self, target: &mut [FqmElem], c: &FqmElem, src: &[FqmElem]) {
        if c.is_zero() {
            return;
        }
        for (t, s) in target.iter_mut().zip(src) {
            if !s.is_zero() {
                self.0.mul_acc(t, c, s);
            }
        }
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type MatQ = Matrix<Fq>;
pub type MatQm = Matrix<FqmElem>;

impl<T: Clone> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data length");
        Self { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Self::new(n, cols, data)
    }

    /// Row vector.
    pub fn row_vector(v: Vec<T>) -> Self {
        let cols = v.len();
        Self::new(1, cols, v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_matrix(&self, r: usize) -> Self {
        Self::row_vector(self.row(r).to_vec())
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Self::new(self.cols, self.rows, data)
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self::new(self.rows + other.rows, self.cols, data)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Self::new(idx.len(), self.cols, data)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for r in 0..self.rows {
            for &c in idx {
                data.push(self.get(r, c).clone());
            }
        }
        Self::new(self.rows, idx.len(), data)
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix::new(self.rows, self.cols, self.data.iter().map(f).collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Mutable row `target` and shared row `src` at once.
    fn row_pair(&mut self, target: usize, src: usize) -> (&mut [T], &[T]) {
        assert_ne!(target, src);
        let cols = self.cols;
        if target < src {
            let (lo, hi) = self.data.split_at_mut(src * cols);
            (&mut lo[target * cols..(target + 1) * cols], &hi[..cols])
        } else {
            let (lo, hi) = self.data.split_at_mut(target * cols);
            (&mut hi[..cols], &lo[src * cols..(src + 1) * cols])
        }
    }
}

pub fn zeros<F: LinField>(f: &F, rows: usize, cols: usize) -> Matrix<F::Elem> {
    Matrix::filled(rows, cols, f.zero())
}

pub fn identity<F: LinField>(f: &F, n: usize) -> Matrix<F::Elem> {
    let mut m = zeros(f, n, n);
    for i in 0..n {
        m.set(i, i, f.one());
    }
    m
}

pub fn is_zero_matrix<F: LinField>(f: &F, a: &Matrix<F::Elem>) -> bool {
    a.data().iter().all(|x| f.is_zero(x))
}

pub fn mul<F: LinField>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!(a.cols, b.rows, "product shape mismatch");
    let mut out = zeros(f, a.rows, b.cols);
    for i in 0..a.rows {
        let out_row = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for k in 0..a.cols {
            let c = a.get(i, k);
            if f.is_zero(c) {
                continue;
            }
            f.add_scaled(out_row, c, b.row(k));
        }
    }
    out
}

pub fn add<F: LinField>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!(a.shape(), b.shape(), "sum shape mismatch");
    let data = a.data.iter().zip(&b.data).map(|(x, y)| f.add(x, y)).collect();
    Matrix::new(a.rows, a.cols, data)
}

pub fn sub<F: LinField>(f: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    assert_eq!(a.shape(), b.shape(), "difference shape mismatch");
    let data = a.data.iter().zip(&b.data).map(|(x, y)| f.sub(x, y)).collect();
    Matrix::new(a.rows, a.cols, data)
}

/// Reduced row echelon form with its rank and pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduced<T> {
    pub rref: Matrix<T>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn reduce<F: LinField>(f: &F, a: &Matrix<F::Elem>) -> Reduced<F::Elem> {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(pr) = (row..m.rows).find(|&r| !f.is_zero(m.get(r, col))) else {
            continue;
        };
        m.swap_rows(row, pr);
        let inv = f.inv(m.get(row, col));
        f.scale_slice(m.row_mut(row), &inv);
        for r in 0..m.rows {
            if r == row || f.is_zero(m.get(r, col)) {
                continue;
            }
            let factor = f.neg(m.get(r, col));
            let (target, src) = m.row_pair(r, row);
            f.add_scaled(target, &factor, src);
        }
        pivots.push(col);
        row += 1;
    }
    Reduced {
        rref: m,
        rank: row,
        pivots,
    }
}

/// Rank by forward elimination only.
pub fn rank<F: LinField>(f: &F, a: &Matrix<F::Elem>) -> usize {
    let mut m = a.clone();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(pr) = (row..m.rows).find(|&r| !f.is_zero(m.get(r, col))) else {
            continue;
        };
        m.swap_rows(row, pr);
        let inv = f.inv(m.get(row, col));
        for r in row + 1..m.rows {
            if f.is_zero(m.get(r, col)) {
                continue;
            }
            let factor = f.neg(&f.mul(m.get(r, col), &inv));
            let (target, src) = m.row_pair(r, row);
            f.add_scaled(target, &factor, src);
        }
        row += 1;
    }
    row
}

/// Nonzero rows of the RREF: a canonical basis of the row space.
pub fn row_space_basis<F: LinField>(f: &F, a: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let red = reduce(f, a);
    let idx: Vec<usize> = (0..red.rank).collect();
    red.rref.select_rows(&idx)
}

/// Basis (as rows) of `{x : a · xᵀ = 0}`.
pub fn right_kernel<F: LinField>(f: &F, a: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let red = reduce(f, a);
    let n = a.cols;
    let free: Vec<usize> = (0..n).filter(|c| !red.pivots.contains(c)).collect();
    let mut out = zeros(f, free.len(), n);
    for (i, &fc) in free.iter().enumerate() {
        out.set(i, fc, f.one());
        for (pr, &pc) in red.pivots.iter().enumerate() {
            let v = f.neg(red.rref.get(pr, fc));
            out.set(i, pc, v);
        }
    }
    out
}

/// Solves `a · x = b` (any number of right-hand-side columns).
pub fn solve<F: LinField>(
    f: &F,
    a: &Matrix<F::Elem>,
    b: &Matrix<F::Elem>,
) -> Result<Matrix<F::Elem>, LinalgError> {
    if a.rows != b.rows {
        return Err(LinalgError::ShapeMismatch {
            expected: (a.rows, b.cols),
            got: b.shape(),
        });
    }
    let n = a.cols;
    let mut aug_data = Vec::with_capacity(a.rows * (n + b.cols));
    for r in 0..a.rows {
        aug_data.extend_from_slice(a.row(r));
        aug_data.extend_from_slice(b.row(r));
    }
    let aug = Matrix::new(a.rows, n + b.cols, aug_data);
    let red = reduce(f, &aug);
    if red.pivots.iter().any(|&p| p >= n) {
        return Err(LinalgError::NoSolution);
    }
    let mut x = zeros(f, n, b.cols);
    for (pr, &pc) in red.pivots.iter().enumerate() {
        for j in 0..b.cols {
            x.set(pc, j, red.rref.get(pr, n + j).clone());
        }
    }
    Ok(x)
}

/// Solves `x · a = b`.
pub fn solve_left<F: LinField>(
    f: &F,
    a: &Matrix<F::Elem>,
    b: &Matrix<F::Elem>,
) -> Result<Matrix<F::Elem>, LinalgError> {
    Ok(solve(f, &a.transpose(), &b.transpose())?.transpose())
}

pub fn inverse<F: LinField>(f: &F, a: &Matrix<F::Elem>) -> Result<Matrix<F::Elem>, LinalgError> {
    if a.rows != a.cols {
        return Err(LinalgError::ShapeMismatch {
            expected: (a.rows, a.rows),
            got: a.shape(),
        });
    }
    let n = a.rows;
    let id = identity(f, n);
    let mut aug_data = Vec::with_capacity(2 * n * n);
    for r in 0..n {
        aug_data.extend_from_slice(a.row(r));
        aug_data.extend_from_slice(id.row(r));
    }
    let red = reduce(f, &Matrix::new(n, 2 * n, aug_data));
    if red.rank < n || red.pivots[n - 1] >= n {
        return Err(LinalgError::Singular);
    }
    let cols: Vec<usize> = (n..2 * n).collect();
    Ok(red.rref.select_cols(&cols))
}

// ---- GF(q^m)-specific ----

/// Maps each row of `a` to its m×cols coordinate block and stacks the blocks.
pub fn expand(ctx: &FieldCtx, a: &MatQm) -> MatQ {
    let m = ctx.m();
    let mut out = Matrix::filled(a.rows * m, a.cols, 0 as Fq);
    for r in 0..a.rows {
        for c in 0..a.cols {
            for (i, &x) in a.get(r, c).coeffs().iter().enumerate() {
                out.set(r * m + i, c, x);
            }
        }
    }
    out
}

/// Inverse of [`expand`]; the row count must be a multiple of m.
pub fn contract(ctx: &FieldCtx, a: &MatQ) -> Result<MatQm, LinalgError> {
    let m = ctx.m();
    if !a.rows.is_multiple_of(m) {
        return Err(LinalgError::ShapeMismatch {
            expected: (a.rows.div_ceil(m) * m, a.cols),
            got: a.shape(),
        });
    }
    let rows = a.rows / m;
    let mut data = Vec::with_capacity(rows * a.cols);
    for r in 0..rows {
        for c in 0..a.cols {
            let coeffs = (0..m).map(|i| *a.get(r * m + i, c)).collect();
            data.push(ctx.from_coeffs(coeffs).expect("GF(q) entries"));
        }
    }
    Ok(Matrix::new(rows, a.cols, data))
}

/// Rank over GF(q) of the expansion; for a vector, its rank norm.
pub fn rank_q(ctx: &FieldCtx, a: &MatQm) -> usize {
    rank(&Base(ctx), &expand(ctx, a))
}

pub fn rank_qm(ctx: &FieldCtx, a: &MatQm) -> usize {
    rank(&Ext(ctx), a)
}

pub fn rank_distance(ctx: &FieldCtx, a: &MatQm, b: &MatQm) -> usize {
    rank_q(ctx, &sub(&Ext(ctx), a, b))
}

/// Entrywise `x ↦ x^{q^i}`.
pub fn frobenius_matrix(ctx: &FieldCtx, a: &MatQm, i: i64) -> MatQm {
    a.map(|x| ctx.frobenius(x, i))
}

/// GF(q) matrix viewed over GF(q^m).
pub fn embed(ctx: &FieldCtx, a: &MatQ) -> MatQm {
    a.map(|&c| ctx.from_base(c))
}

// ---- sampling ----

pub fn sample_uniform<F: LinField, R: RngCore + ?Sized>(
    f: &F,
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Matrix<F::Elem> {
    Matrix::new(rows, cols, (0..rows * cols).map(|_| f.random(rng)).collect())
}

/// Uniform among matrices of rank `min(rows, cols)`.
pub fn sample_full_rank<F: LinField, R: RngCore + ?Sized>(
    f: &F,
    rows: usize,
    cols: usize,
    rng: &mut R,
    budget: usize,
) -> Result<Matrix<F::Elem>, LinalgError> {
    let target = rows.min(cols);
    for _ in 0..budget {
        let m = sample_uniform(f, rows, cols, rng);
        if rank(f, &m) == target {
            return Ok(m);
        }
    }
    Err(LinalgError::SamplingTimeout(budget))
}

pub fn sample_invertible<F: LinField, R: RngCore + ?Sized>(
    f: &F,
    n: usize,
    rng: &mut R,
    budget: usize,
) -> Result<Matrix<F::Elem>, LinalgError> {
    sample_full_rank(f, n, n, rng, budget)
}

/// λ-dimensional GF(q)-subspace of GF(q^m), given by a basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceV {
    basis: Vec<FqmElem>,
}

impl SubspaceV {
    /// Validates GF(q)-independence of the basis.
    pub fn new(ctx: &FieldCtx, basis: Vec<FqmElem>) -> Result<Self, LinalgError> {
        let v = Matrix::row_vector(basis.clone());
        let got = rank_q(ctx, &v);
        if got != basis.len() {
            return Err(LinalgError::Singular);
        }
        Ok(Self { basis })
    }

    pub fn basis(&self) -> &[FqmElem] {
        &self.basis
    }

    pub fn lambda(&self) -> usize {
        self.basis.len()
    }

    /// Uniform element of the span.
    pub fn random_element<R: RngCore + ?Sized>(&self, ctx: &FieldCtx, rng: &mut R) -> FqmElem {
        let mut acc = ctx.zero();
        for b in &self.basis {
            let c = rng.gen_range(0..ctx.q()) as Fq;
            ctx.add_assign(&mut acc, &ctx.scale(b, c));
        }
        acc
    }

    /// Coordinates of `a` in the basis, or `None` when `a` is outside the span.
    pub fn coordinates(&self, ctx: &FieldCtx, a: &FqmElem) -> Option<Vec<Fq>> {
        let basis = expand(ctx, &Matrix::row_vector(self.basis.clone()));
        let target = expand(ctx, &Matrix::row_vector(vec![a.clone()]));
        let x = solve(&Base(ctx), &basis, &target).ok()?;
        Some((0..self.basis.len()).map(|i| *x.get(i, 0)).collect())
    }

    pub fn contains(&self, ctx: &FieldCtx, a: &FqmElem) -> bool {
        self.coordinates(ctx, a).is_some()
    }
}

pub fn sample_subspace<R: RngCore + ?Sized>(
    ctx: &FieldCtx,
    lambda: usize,
    rng: &mut R,
    budget: usize,
) -> Result<SubspaceV, LinalgError> {
    if lambda > ctx.m() {
        return Err(LinalgError::DimensionTooLarge {
            dim: lambda,
            ambient: ctx.m(),
        });
    }
    // a uniform λ×m GF(q)-matrix of full rank gives a uniform basis
    let coords = sample_full_rank(&Base(ctx), lambda, ctx.m(), rng, budget)?;
    let basis = (0..lambda)
        .map(|i| ctx.from_coeffs(coords.row(i).to_vec()).expect("in range"))
        .collect();
    Ok(SubspaceV { basis })
}

/// Uniform invertible n×n matrix with every entry in `span(v)`.
pub fn sample_matrix_over_subspace<R: RngCore + ?Sized>(
    ctx: &FieldCtx,
    v: &SubspaceV,
    n: usize,
    rng: &mut R,
    budget: usize,
) -> Result<MatQm, LinalgError> {
    let f = Ext(ctx);
    for _ in 0..budget {
        let data = (0..n * n).map(|_| v.random_element(ctx, rng)).collect();
        let m = Matrix::new(n, n, data);
        if rank(&f, &m) == n {
            return Ok(m);
        }
    }
    Err(LinalgError::SamplingTimeout(budget))
}

/// `ℓ×cols` matrix over GF(q^m) whose GF(q)-rank is exactly `w`, uniform among
/// such matrices: `A·B` with `A` of GF(q)-rank `w` and `B` full-rank over GF(q).
pub fn sample_rank_q<R: RngCore + ?Sized>(
    ctx: &FieldCtx,
    rows: usize,
    cols: usize,
    w: usize,
    rng: &mut R,
    budget: usize,
) -> Result<MatQm, LinalgError> {
    if w > cols || w > rows * ctx.m() {
        return Err(LinalgError::DimensionTooLarge {
            dim: w,
            ambient: cols.min(rows * ctx.m()),
        });
    }
    let a = (0..budget)
        .map(|_| sample_uniform(&Ext(ctx), rows, w, rng))
        .find(|a| rank_q(ctx, a) == w)
        .ok_or(LinalgError::SamplingTimeout(budget))?;
    let b = sample_full_rank(&Base(ctx), w, cols, rng, budget)?;
    Ok(mul(&Ext(ctx), &a, &embed(ctx, &b)))
}

// ---- subspace enumeration ----

/// Number of `k`-dimensional subspaces of GF(q)^n, saturating at `u128::MAX`.
pub fn gaussian_binomial(q: u64, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        let a = q.checked_pow((n - i) as u32).and_then(|x| x.checked_sub(1));
        let b = q.checked_pow((i + 1) as u32).and_then(|x| x.checked_sub(1));
        match (a.and_then(|a| num.checked_mul(a)), b.and_then(|b| den.checked_mul(b))) {
            (Some(nn), Some(dd)) => {
                let g = gcd(nn, dd);
                num = nn / g;
                den = dd / g;
            }
            _ => return u128::MAX,
        }
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Every `dim`-dimensional subspace of GF(q)^n as its RREF basis, in
/// lexicographic order of the row-major entries.
pub fn enumerate_subspaces(ctx: &FieldCtx, n: usize, dim: usize) -> Vec<MatQ> {
    let mut out = Vec::new();
    if dim > n {
        return out;
    }
    let q = ctx.q() as u64;
    let mut pivots: Vec<usize> = (0..dim).collect();
    loop {
        // free positions: (row i, column c) with c > pivot_i and c not a pivot
        let free: Vec<(usize, usize)> = (0..dim)
            .flat_map(|i| {
                let pv = &pivots;
                (pv[i] + 1..n)
                    .filter(move |c| !pv.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let mut counter = vec![0u64; free.len()];
        loop {
            let mut m = Matrix::filled(dim, n, 0 as Fq);
            for (i, &p) in pivots.iter().enumerate() {
                m.set(i, p, 1);
            }
            for (&(i, c), &v) in free.iter().zip(&counter) {
                m.set(i, c, v as Fq);
            }
            out.push(m);
            let mut j = 0;
            while j < counter.len() {
                counter[j] += 1;
                if counter[j] < q {
                    break;
                }
                counter[j] = 0;
                j += 1;
            }
            if j == counter.len() {
                break;
            }
        }
        if !next_combination(&mut pivots, n) {
            break;
        }
    }
    out.sort_by(|a, b| a.data().cmp(b.data()));
    out
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Moduli;
    use crate::rng::RngStream;

    fn gf(q: u64, m: usize) -> FieldCtx {
        FieldCtx::with_order(q, m).unwrap()
    }

    fn el(ctx: &FieldCtx, c: &[Fq]) -> FqmElem {
        ctx.from_coeffs(c.to_vec()).unwrap()
    }

    #[test]
    fn reduce_basic_cases() {
        let ctx = gf(2, 3);
        let f = Base(&ctx);
        let id = identity(&f, 4);
        assert_eq!(reduce(&f, &id).rank, 4);
        assert_eq!(reduce(&f, &zeros(&f, 3, 5)).rank, 0);
        let ones = Matrix::new(2, 2, vec![1, 1, 1, 1]);
        let red = reduce(&f, &ones);
        assert_eq!((red.rank, red.pivots), (1, vec![0]));
    }

    #[test]
    fn expand_gf8_row() {
        let ctx = FieldCtx::new(2, 1, 3, &Moduli::default()).unwrap();
        let v = Matrix::row_vector(vec![el(&ctx, &[0, 0, 1]), el(&ctx, &[1, 1, 0])]);
        let e = expand(&ctx, &v);
        assert_eq!(e, Matrix::new(3, 2, vec![0, 1, 0, 1, 1, 0]));
        assert_eq!(contract(&ctx, &e).unwrap(), v);
        let z = Matrix::row_vector(vec![ctx.zero(); 2]);
        assert!(expand(&ctx, &z).data().iter().all(|&x| x == 0));
    }

    #[test]
    fn rank_norm_examples() {
        let ctx = FieldCtx::new(2, 1, 3, &Moduli::default()).unwrap();
        let a = ctx.alpha();
        assert_eq!(rank_q(&ctx, &Matrix::row_vector(vec![ctx.one(), a.clone()])), 2);
        assert_eq!(rank_q(&ctx, &Matrix::row_vector(vec![a.clone(), a])), 1);
    }

    #[test]
    fn rank_q_of_matrix_drawn_from_subspace() {
        let ctx = gf(2, 6);
        let mut rng = RngStream::new(3);
        let basis = sample_subspace(&ctx, 3, &mut rng, 256).unwrap();
        let data = (0..5).map(|_| basis.random_element(&ctx, &mut rng)).collect();
        let m = Matrix::new(1, 5, data);
        // a single row drawn from V has rank at most dim V
        assert!(rank_q(&ctx, &m) <= 3);
        // force full use of the basis in the first three entries
        let mut m = m;
        for (i, b) in basis.basis().iter().enumerate() {
            m.set(0, i, b.clone());
        }
        assert_eq!(rank_q(&ctx, &m), 3);
    }

    #[test]
    fn kernel_and_solve() {
        let ctx = gf(2, 5);
        let f = Ext(&ctx);
        let mut rng = RngStream::new(11);
        for _ in 0..20 {
            let a = sample_uniform(&f, 3, 6, &mut rng);
            let k = right_kernel(&f, &a);
            assert_eq!(k.rows() + rank(&f, &a), 6);
            assert!(is_zero_matrix(&f, &mul(&f, &a, &k.transpose())));
            let x = sample_uniform(&f, 6, 2, &mut rng);
            let b = mul(&f, &a, &x);
            let sol = solve(&f, &a, &b).unwrap();
            assert_eq!(mul(&f, &a, &sol), b);
        }
        let a = Matrix::new(2, 1, vec![ctx.one(), ctx.one()]);
        let b = Matrix::new(2, 1, vec![ctx.one(), ctx.zero()]);
        assert_eq!(solve(&f, &a, &b).unwrap_err(), LinalgError::NoSolution);
    }

    #[test]
    fn inverse_round_trip() {
        let ctx = gf(4, 5);
        let f = Ext(&ctx);
        let mut rng = RngStream::new(1);
        let a = sample_invertible(&f, 5, &mut rng, 256).unwrap();
        let inv = inverse(&f, &a).unwrap();
        assert_eq!(mul(&f, &a, &inv), identity(&f, 5));
        assert_eq!(
            inverse(&f, &zeros(&f, 2, 2)).unwrap_err(),
            LinalgError::Singular
        );
    }

    #[test]
    fn invertible_one_by_one_is_nonzero() {
        let ctx = gf(2, 3);
        let mut rng = RngStream::new(2);
        for _ in 0..50 {
            let a = sample_invertible(&Ext(&ctx), 1, &mut rng, 256).unwrap();
            assert!(!a.get(0, 0).is_zero());
        }
    }

    #[test]
    fn subspace_sampling_and_membership() {
        let ctx = gf(2, 6);
        let mut rng = RngStream::new(4);
        let v = sample_subspace(&ctx, 2, &mut rng, 256).unwrap();
        assert_eq!(rank_q(&ctx, &Matrix::row_vector(v.basis().to_vec())), 2);
        let p = sample_matrix_over_subspace(&ctx, &v, 3, &mut rng, 256).unwrap();
        assert!(p.data().iter().all(|x| v.contains(&ctx, x)));
        assert_eq!(rank_qm(&ctx, &p), 3);
        // an element outside a 2-dim space of a 6-dim field exists among γ
        assert!(ctx.gamma().iter().any(|g| !v.contains(&ctx, g)));
    }

    #[test]
    fn sampling_timeout_is_reported() {
        let ctx = gf(2, 3);
        let v = SubspaceV::new(&ctx, vec![ctx.one()]).unwrap();
        let mut rng = RngStream::new(0);
        // all entries in GF(2): a random 3×3 binary matrix is often singular,
        // but with one attempt and a fixed seed we only check the error path
        let res = (0..64)
            .map(|s| {
                let mut r = RngStream::new(s);
                sample_matrix_over_subspace(&ctx, &v, 3, &mut r, 1)
            })
            .find(|r| r.is_err());
        assert_eq!(res, Some(Err(LinalgError::SamplingTimeout(1))));
        assert!(sample_subspace(&ctx, 4, &mut rng, 8).is_err());
    }

    #[test]
    fn subspace_counts_match_gaussian_binomial() {
        let ctx = gf(2, 6);
        assert_eq!(gaussian_binomial(2, 6, 2), 651);
        assert_eq!(enumerate_subspaces(&ctx, 6, 2).len(), 651);
        assert_eq!(enumerate_subspaces(&ctx, 6, 0).len(), 1);
        assert_eq!(enumerate_subspaces(&ctx, 6, 1).len(), 63);
        let ctx3 = gf(3, 2);
        assert_eq!(enumerate_subspaces(&ctx3, 4, 2).len() as u128, gaussian_binomial(3, 4, 2));
        let all = enumerate_subspaces(&ctx, 5, 2);
        for w in all.windows(2) {
            assert!(w[0].data() < w[1].data());
        }
        for s in &all {
            assert_eq!(reduce(&Base(&ctx), s).rref, *s);
        }
    }

    /// Leibniz-formula determinant; independent of elimination.
    fn det(ctx: &FieldCtx, a: &MatQm) -> FqmElem {
        let n = a.rows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = ctx.zero();
        permute(ctx, a, &mut perm, 0, &mut total);
        total
    }

    fn permute(ctx: &FieldCtx, a: &MatQm, perm: &mut Vec<usize>, k: usize, total: &mut FqmElem) {
        let n = perm.len();
        if k == n {
            let mut inversions = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if perm[i] > perm[j] {
                        inversions += 1;
                    }
                }
            }
            let mut term = ctx.one();
            for (i, &p) in perm.iter().enumerate() {
                term = ctx.mul(&term, a.get(i, p));
            }
            if inversions % 2 == 1 {
                term = ctx.neg(&term);
            }
            ctx.add_assign(total, &term);
            return;
        }
        for i in k..n {
            perm.swap(k, i);
            permute(ctx, a, perm, k + 1, total);
            perm.swap(k, i);
        }
    }

    #[test]
    fn elimination_agrees_with_determinant() {
        for (q, m) in [(2u64, 2usize), (3, 1), (4, 2)] {
            let ctx = gf(q, m);
            let f = Ext(&ctx);
            let mut rng = RngStream::new(q * 10 + m as u64);
            let mut singular = 0;
            for _ in 0..300 {
                let a = sample_uniform(&f, 4, 4, &mut rng);
                let d = det(&ctx, &a);
                assert_eq!(d.is_zero(), rank(&f, &a) < 4);
                singular += d.is_zero() as usize;
            }
            assert!(singular > 0, "small fields should produce singular draws");
        }
    }

    #[test]
    fn invertible_acceptance_rate() {
        let ctx = gf(2, 4);
        let f = Ext(&ctx);
        let mut rng = RngStream::new(8);
        let trials = 1000;
        let ok = (0..trials)
            .filter(|_| rank(&f, &sample_uniform(&f, 3, 3, &mut rng)) == 3)
            .count();
        let q_m = 16.0f64;
        // P[singular] ≈ 1/q^m + 1/q^{2m} + …  < 2/q^m
        let expected = 1.0 - 2.0 / q_m;
        assert!(ok as f64 / trials as f64 >= expected - 0.03, "acceptance {ok}");
    }

    #[test]
    fn rank_structure_properties() {
        let ctx = gf(2, 8);
        let f = Ext(&ctx);
        let mut rng = RngStream::new(21);
        for _ in 0..50 {
            let a = sample_uniform(&f, 2, 6, &mut rng);
            assert!(rank_q(&ctx, &a) >= rank_qm(&ctx, &a));
            // right multiplication by a full-row-rank GF(q) matrix keeps rank_q
            let b = sample_full_rank(&Base(&ctx), 6, 9, &mut rng, 256).unwrap();
            let ab = mul(&f, &a, &embed(&ctx, &b));
            assert_eq!(rank_q(&ctx, &ab), rank_q(&ctx, &a));
        }
    }

    #[test]
    fn rank_q_sampler_hits_target() {
        let ctx = gf(2, 6);
        let mut rng = RngStream::new(5);
        for w in 0..=5 {
            let x = sample_rank_q(&ctx, 2, 5, w, &mut rng, 256).unwrap();
            assert_eq!(rank_q(&ctx, &x), w);
        }
    }
}
