//! Arithmetic in the field tower GF(p) ⊂ GF(q = p^r) ⊂ GF(q^m).
//!
//! Elements of GF(q) are packed integers `Σ c_i p^i` (for p = 2 this is the
//! usual bit-polynomial encoding).  Elements of GF(q^m) are coefficient vectors
//! over GF(q) with respect to the polynomial basis `1, x, …, x^{m-1}` of the
//! extension modulus.

use alloc::vec;
use alloc::vec::Vec;

/// Packed element of the subfield GF(q) (or of the prime field GF(p)).
pub type Fq = u16;

/// Largest supported subfield order.
pub const MAX_Q: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order p^r = {0} exceeds the supported maximum of 65536")]
    FieldTooLarge(u64),
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("modulus is not monic of the expected degree")]
    BadModulus,
    #[error("modulus is reducible")]
    ReducibleModulus,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands do not belong to this field")]
    FieldMismatch,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Writes `q = p^r` with p prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut r = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        r += 1;
    }
    (rest == 1).then_some((p, r))
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Scalar arithmetic used by the polynomial routines below.
trait Scalars {
    fn order(&self) -> u64;
    fn add(&self, a: Fq, b: Fq) -> Fq;
    fn sub(&self, a: Fq, b: Fq) -> Fq;
    fn mul(&self, a: Fq, b: Fq) -> Fq;
    fn inv(&self, a: Fq) -> Fq;
}

struct PrimeField(u32);

impl Scalars for PrimeField {
    fn order(&self) -> u64 {
        self.0 as u64
    }
    fn add(&self, a: Fq, b: Fq) -> Fq {
        ((a as u32 + b as u32) % self.0) as Fq
    }
    fn sub(&self, a: Fq, b: Fq) -> Fq {
        ((a as u32 + self.0 - b as u32) % self.0) as Fq
    }
    fn mul(&self, a: Fq, b: Fq) -> Fq {
        ((a as u32 * b as u32) % self.0) as Fq
    }
    fn inv(&self, a: Fq) -> Fq {
        let mut result = 1u32;
        let mut base = a as u32;
        let mut e = self.0 - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % self.0;
            }
            base = base * base % self.0;
            e >>= 1;
        }
        result as Fq
    }
}

/// GF(q) via log/antilog tables.
#[derive(Debug, Clone)]
struct BaseTables {
    p: u32,
    q: u32,
    exp: Vec<Fq>,
    log: Vec<u32>,
}

impl BaseTables {
    fn build(p: u32, r: u32, modulus: &[Fq]) -> Self {
        let q = p.pow(r);
        let pf = PrimeField(p);
        let slow_mul = |a: Fq, b: Fq| -> Fq {
            let da = unpack(a as u32, p, r as usize);
            let db = unpack(b as u32, p, r as usize);
            let prod = poly_mul(&pf, &da, &db);
            let red = poly_rem(&pf, &prod, modulus);
            pack(&red, p)
        };
        // find a generator of the multiplicative group
        let order = q - 1;
        let factors = prime_factors(order as usize);
        let mut generator = 1 as Fq;
        if q > 2 {
            'search: for cand in 2..q {
                let cand = cand as Fq;
                for &f in &factors {
                    let e = order / f as u32;
                    let mut acc = 1 as Fq;
                    let mut base = cand;
                    let mut k = e;
                    while k > 0 {
                        if k & 1 == 1 {
                            acc = slow_mul(acc, base);
                        }
                        base = slow_mul(base, base);
                        k >>= 1;
                    }
                    if acc == 1 {
                        continue 'search;
                    }
                }
                generator = cand;
                break;
            }
        }
        let mut exp = vec![0 as Fq; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1 as Fq;
        for i in 0..order as usize {
            exp[i] = cur;
            exp[i + order as usize] = cur;
            log[cur as usize] = i as u32;
            cur = slow_mul(cur, generator);
        }
        BaseTables { p, q, exp, log }
    }

    #[inline]
    fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a as u32, b as u32);
        let mut out = 0u32;
        let mut place = 1u32;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as Fq
    }

    #[inline]
    fn neg(&self, a: Fq) -> Fq {
        if self.p == 2 {
            return a;
        }
        let mut a = a as u32;
        let mut out = 0u32;
        let mut place = 1u32;
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out as Fq
    }

    #[inline]
    fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    #[inline]
    fn inv(&self, a: Fq) -> Fq {
        debug_assert!(a != 0);
        let order = self.q - 1;
        self.exp[((order - self.log[a as usize]) % order) as usize]
    }
}

impl Scalars for BaseTables {
    fn order(&self) -> u64 {
        self.q as u64
    }
    fn add(&self, a: Fq, b: Fq) -> Fq {
        BaseTables::add(self, a, b)
    }
    fn sub(&self, a: Fq, b: Fq) -> Fq {
        BaseTables::add(self, a, self.neg(b))
    }
    fn mul(&self, a: Fq, b: Fq) -> Fq {
        BaseTables::mul(self, a, b)
    }
    fn inv(&self, a: Fq) -> Fq {
        BaseTables::inv(self, a)
    }
}

fn unpack(mut v: u32, p: u32, len: usize) -> Vec<Fq> {
    let mut out = vec![0; len];
    for slot in out.iter_mut() {
        *slot = (v % p) as Fq;
        v /= p;
    }
    out
}

fn pack(digits: &[Fq], p: u32) -> Fq {
    digits
        .iter()
        .rev()
        .fold(0u32, |acc, &d| acc * p + d as u32) as Fq
}

fn trim(a: &mut Vec<Fq>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_mul<S: Scalars>(f: &S, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo `m` (leading coefficient of `m` nonzero).
fn poly_rem<S: Scalars>(f: &S, a: &[Fq], m: &[Fq]) -> Vec<Fq> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    trim(&mut r);
    let lead_inv = f.inv(m[dm]);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = f.mul(r[top], lead_inv);
        if c != 0 {
            for i in 0..=dm {
                let idx = top - dm + i;
                r[idx] = f.sub(r[idx], f.mul(c, m[i]));
            }
        }
        trim(&mut r);
    }
    r
}

fn poly_divrem<S: Scalars>(f: &S, a: &[Fq], m: &[Fq]) -> (Vec<Fq>, Vec<Fq>) {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() <= dm {
        return (Vec::new(), r);
    }
    let mut quot = vec![0; r.len() - dm];
    let lead_inv = f.inv(m[dm]);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = f.mul(r[top], lead_inv);
        quot[top - dm] = c;
        for i in 0..=dm {
            let idx = top - dm + i;
            r[idx] = f.sub(r[idx], f.mul(c, m[i]));
        }
        trim(&mut r);
    }
    trim(&mut quot);
    (quot, r)
}

fn poly_sub<S: Scalars>(f: &S, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    let len = a.len().max(b.len());
    let mut out: Vec<Fq> = (0..len)
        .map(|i| {
            f.sub(
                a.get(i).copied().unwrap_or(0),
                b.get(i).copied().unwrap_or(0),
            )
        })
        .collect();
    trim(&mut out);
    out
}

fn poly_gcd<S: Scalars>(f: &S, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(f, &a, &b);
        a = b;
        b = r;
    }
    a
}

fn poly_powmod<S: Scalars>(f: &S, base: &[Fq], mut e: u64, m: &[Fq]) -> Vec<Fq> {
    let mut acc = vec![1 as Fq];
    let mut b = poly_rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(f, &poly_mul(f, &acc, &b), m);
        }
        b = poly_rem(f, &poly_mul(f, &b, &b), m);
        e >>= 1;
    }
    acc
}

/// Rabin's irreducibility test for a monic polynomial.
fn is_irreducible<S: Scalars>(f: &S, poly: &[Fq]) -> bool {
    let d = poly.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    if poly[0] == 0 {
        return false;
    }
    let q = f.order();
    let x = vec![0, 1];
    // x^{q^i} mod poly for i = 0..=d
    let mut powers = Vec::with_capacity(d + 1);
    powers.push(poly_rem(f, &x, poly));
    for i in 1..=d {
        let next = poly_powmod(f, &powers[i - 1], q, poly);
        powers.push(next);
    }
    if poly_sub(f, &powers[d], &x).iter().any(|&c| c != 0) {
        return false;
    }
    for s in prime_factors(d) {
        let h = poly_sub(f, &powers[d / s], &x);
        let g = poly_gcd(f, poly, &h);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of the given degree,
/// ordering candidates by their coefficient vector read from x^{deg-1} down.
fn least_irreducible<S: Scalars>(f: &S, degree: usize) -> Vec<Fq> {
    let q = f.order();
    let mut cand = vec![0 as Fq; degree + 1];
    cand[degree] = 1;
    loop {
        if is_irreducible(f, &cand) {
            return cand;
        }
        // increment the lower coefficients as a base-q counter
        let mut i = 0;
        loop {
            let next = cand[i] as u64 + 1;
            if next < q {
                cand[i] = next as Fq;
                break;
            }
            cand[i] = 0;
            i += 1;
            assert!(i < degree, "an irreducible polynomial always exists");
        }
    }
}

/// Optional explicit moduli for [`FieldCtx::new`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Moduli {
    /// Monic, degree r, coefficients over GF(p), constant term first.
    pub base: Option<Vec<Fq>>,
    /// Monic, degree m, coefficients over GF(q), constant term first.
    pub ext: Option<Vec<Fq>>,
}

/// The field tower together with its fixed polynomial basis γ.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u32,
    r: u32,
    m: usize,
    base_modulus: Vec<Fq>,
    ext_modulus: Vec<Fq>,
    tables: BaseTables,
    // frob[i] is the m×m matrix (row-major) of a ↦ a^{q^i}, for i in 0..m
    frob: Vec<Vec<Fq>>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.r == other.r
            && self.m == other.m
            && self.base_modulus == other.base_modulus
            && self.ext_modulus == other.ext_modulus
    }
}

impl Eq for FieldCtx {}

/// GF(q^m) element: coordinates over GF(q) in the polynomial basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqmElem {
    coeffs: Vec<Fq>,
}

impl FqmElem {
    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Binary/unary operations accepted by [`FieldCtx::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    /// Inverse of the first operand; the second is ignored.
    Inv,
    /// First operand raised to the given exponent; the second is ignored.
    Pow(u64),
}

impl FieldCtx {
    /// Builds GF(p^r)^m.  Missing moduli are replaced by the lexicographically
    /// least irreducible polynomial of the right degree.
    pub fn new(p: u64, r: u32, m: usize, moduli: &Moduli) -> Result<Self, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if r == 0 || m == 0 {
            return Err(GfError::ZeroDegree);
        }
        let q = (p as u128).checked_pow(r).unwrap_or(u128::MAX);
        if q > MAX_Q as u128 {
            return Err(GfError::FieldTooLarge(q.min(u64::MAX as u128) as u64));
        }
        let p32 = p as u32;
        let pf = PrimeField(p32);
        let base_modulus = match &moduli.base {
            Some(b) => {
                check_monic(b, r as usize, p)?;
                if !is_irreducible(&pf, b) {
                    return Err(GfError::ReducibleModulus);
                }
                b.clone()
            }
            None => least_irreducible(&pf, r as usize),
        };
        let tables = BaseTables::build(p32, r, &base_modulus);
        let ext_modulus = match &moduli.ext {
            Some(e) => {
                check_monic(e, m, q as u64)?;
                if !is_irreducible(&tables, e) {
                    return Err(GfError::ReducibleModulus);
                }
                e.clone()
            }
            None => least_irreducible(&tables, m),
        };
        let mut ctx = FieldCtx {
            p: p32,
            r,
            m,
            base_modulus,
            ext_modulus,
            tables,
            frob: Vec::new(),
        };
        ctx.frob = ctx.frobenius_tables();
        Ok(ctx)
    }

    /// GF(q^m) for a prime-power `q`, with default moduli.
    pub fn with_order(q: u64, m: usize) -> Result<Self, GfError> {
        let (p, r) = prime_power(q).ok_or(GfError::NotPrimePower(q))?;
        Self::new(p, r, m, &Moduli::default())
    }

    fn frobenius_tables(&self) -> Vec<Vec<Fq>> {
        let m = self.m;
        let q = self.q() as u64;
        // column j of the Frobenius matrix: coordinates of (x^j)^q = (x^q)^j
        let xq = poly_powmod(&self.tables, &[0, 1], q, &self.ext_modulus);
        let mut frob1 = vec![0 as Fq; m * m];
        let mut col = vec![1 as Fq];
        for j in 0..m {
            for (row, &c) in col.iter().enumerate() {
                frob1[row * m + j] = c;
            }
            col = poly_rem(&self.tables, &poly_mul(&self.tables, &col, &xq), &self.ext_modulus);
        }
        let mut out = Vec::with_capacity(m);
        let mut identity = vec![0 as Fq; m * m];
        for i in 0..m {
            identity[i * m + i] = 1;
        }
        out.push(identity);
        for i in 1..m {
            let prev = &out[i - 1];
            let mut next = vec![0 as Fq; m * m];
            for r in 0..m {
                for k in 0..m {
                    let a = frob1[r * m + k];
                    if a == 0 {
                        continue;
                    }
                    for c in 0..m {
                        let t = self.tables.mul(a, prev[k * m + c]);
                        next[r * m + c] = self.tables.add(next[r * m + c], t);
                    }
                }
            }
            out.push(next);
        }
        out
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Order of the subfield GF(q).
    pub fn q(&self) -> u32 {
        self.tables.q
    }

    /// Bits needed to hold one packed GF(q) element.
    pub fn fq_bits(&self) -> u32 {
        32 - (self.q() - 1).leading_zeros()
    }

    pub fn base_modulus(&self) -> &[Fq] {
        &self.base_modulus
    }

    pub fn ext_modulus(&self) -> &[Fq] {
        &self.ext_modulus
    }

    // ---- GF(q) ----

    #[inline]
    pub fn fq_add(&self, a: Fq, b: Fq) -> Fq {
        self.tables.add(a, b)
    }

    #[inline]
    pub fn fq_neg(&self, a: Fq) -> Fq {
        self.tables.neg(a)
    }

    #[inline]
    pub fn fq_sub(&self, a: Fq, b: Fq) -> Fq {
        self.tables.add(a, self.tables.neg(b))
    }

    #[inline]
    pub fn fq_mul(&self, a: Fq, b: Fq) -> Fq {
        self.tables.mul(a, b)
    }

    pub fn fq_inv(&self, a: Fq) -> Result<Fq, GfError> {
        if a == 0 {
            return Err(GfError::DivisionByZero);
        }
        Ok(self.tables.inv(a))
    }

    // ---- GF(q^m) ----

    pub fn zero(&self) -> FqmElem {
        FqmElem {
            coeffs: vec![0; self.m],
        }
    }

    pub fn one(&self) -> FqmElem {
        self.from_base(1)
    }

    /// Embeds a GF(q) element.
    pub fn from_base(&self, c: Fq) -> FqmElem {
        let mut coeffs = vec![0; self.m];
        coeffs[0] = c;
        FqmElem { coeffs }
    }

    /// The class of x, a root of the extension modulus.
    pub fn alpha(&self) -> FqmElem {
        if self.m == 1 {
            // x ≡ -f_0 when the extension is trivial
            return self.from_base(self.fq_neg(self.ext_modulus[0]));
        }
        let mut coeffs = vec![0; self.m];
        coeffs[1] = 1;
        FqmElem { coeffs }
    }

    /// The ordered basis γ = (1, x, …, x^{m-1}).
    pub fn gamma(&self) -> Vec<FqmElem> {
        (0..self.m)
            .map(|i| {
                let mut coeffs = vec![0; self.m];
                coeffs[i] = 1;
                FqmElem { coeffs }
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: Vec<Fq>) -> Result<FqmElem, GfError> {
        if coeffs.len() != self.m || coeffs.iter().any(|&c| c as u32 >= self.q()) {
            return Err(GfError::FieldMismatch);
        }
        Ok(FqmElem { coeffs })
    }

    pub fn contains(&self, a: &FqmElem) -> bool {
        a.coeffs.len() == self.m && a.coeffs.iter().all(|&c| (c as u32) < self.q())
    }

    /// Whether `a` lies in the embedded subfield GF(q).
    pub fn is_base(&self, a: &FqmElem) -> bool {
        a.coeffs[1..].iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FqmElem, b: &FqmElem) -> FqmElem {
        debug_assert_eq!(a.coeffs.len(), self.m);
        debug_assert_eq!(b.coeffs.len(), self.m);
        FqmElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| self.tables.add(x, y))
                .collect(),
        }
    }

    pub fn add_assign(&self, a: &mut FqmElem, b: &FqmElem) {
        for (x, &y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x = self.tables.add(*x, y);
        }
    }

    pub fn neg(&self, a: &FqmElem) -> FqmElem {
        FqmElem {
            coeffs: a.coeffs.iter().map(|&x| self.tables.neg(x)).collect(),
        }
    }

    pub fn sub(&self, a: &FqmElem, b: &FqmElem) -> FqmElem {
        FqmElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| self.tables.add(x, self.tables.neg(y)))
                .collect(),
        }
    }

    /// Multiplies by a subfield scalar.
    pub fn scale(&self, a: &FqmElem, c: Fq) -> FqmElem {
        FqmElem {
            coeffs: a.coeffs.iter().map(|&x| self.tables.mul(x, c)).collect(),
        }
    }

    pub fn mul(&self, a: &FqmElem, b: &FqmElem) -> FqmElem {
        let mut out = self.zero();
        self.mul_acc(&mut out, a, b);
        out
    }

    /// `acc += a * b`.
    pub fn mul_acc(&self, acc: &mut FqmElem, a: &FqmElem, b: &FqmElem) {
        let m = self.m;
        let t = &self.tables;
        let mut prod = [0 as Fq; 256];
        let mut heap;
        let prod: &mut [Fq] = if 2 * m <= prod.len() {
            &mut prod[..2 * m]
        } else {
            heap = vec![0 as Fq; 2 * m];
            &mut heap
        };
        if t.p == 2 {
            for (i, &x) in a.coeffs.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let lx = t.log[x as usize];
                for (j, &y) in b.coeffs.iter().enumerate() {
                    if y != 0 {
                        prod[i + j] ^= t.exp[(lx + t.log[y as usize]) as usize];
                    }
                }
            }
        } else {
            for (i, &x) in a.coeffs.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.coeffs.iter().enumerate() {
                    prod[i + j] = t.add(prod[i + j], t.mul(x, y));
                }
            }
        }
        self.reduce_into(prod);
        for (x, &y) in acc.coeffs.iter_mut().zip(prod.iter()) {
            *x = t.add(*x, y);
        }
    }

    fn reduce_into(&self, prod: &mut [Fq]) {
        let m = self.m;
        let t = &self.tables;
        let f = &self.ext_modulus;
        for d in (m..2 * m).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            let nc = t.neg(c);
            for i in 0..m {
                if f[i] != 0 {
                    prod[d - m + i] = t.add(prod[d - m + i], t.mul(nc, f[i]));
                }
            }
        }
    }

    pub fn inv(&self, a: &FqmElem) -> Result<FqmElem, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        // extended Euclid on GF(q)[x]: find s with s·a ≡ 1 mod f
        let t = &self.tables;
        let mut r0 = self.ext_modulus.clone();
        let mut r1 = a.coeffs.clone();
        trim(&mut r1);
        let mut s0: Vec<Fq> = Vec::new();
        let mut s1: Vec<Fq> = vec![1];
        while r1.len() > 1 {
            let (quot, rem) = poly_divrem(t, &r0, &r1);
            let s2 = poly_sub(t, &s0, &poly_mul(t, &quot, &s1));
            r0 = core::mem::replace(&mut r1, rem);
            s0 = core::mem::replace(&mut s1, s2);
        }
        // r1 is a nonzero constant
        let c = t.inv(r1[0]);
        let mut coeffs = vec![0; self.m];
        for (i, &s) in s1.iter().enumerate() {
            coeffs[i] = t.mul(s, c);
        }
        Ok(FqmElem { coeffs })
    }

    pub fn pow(&self, a: &FqmElem, mut e: u64) -> FqmElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a ↦ a^{q^i}`; negative `i` applies the inverse automorphism.
    pub fn frobenius(&self, a: &FqmElem, i: i64) -> FqmElem {
        let m = self.m;
        let idx = i.rem_euclid(m as i64) as usize;
        if idx == 0 {
            return a.clone();
        }
        let mat = &self.frob[idx];
        let t = &self.tables;
        let mut coeffs = vec![0 as Fq; m];
        for (j, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (r, out) in coeffs.iter_mut().enumerate() {
                let f = mat[r * m + j];
                if f != 0 {
                    *out = t.add(*out, t.mul(f, x));
                }
            }
        }
        FqmElem { coeffs }
    }

    /// Checked arithmetic entry point.
    pub fn arith(&self, a: &FqmElem, b: &FqmElem, op: ArithOp) -> Result<FqmElem, GfError> {
        if !self.contains(a) || !self.contains(b) {
            return Err(GfError::FieldMismatch);
        }
        Ok(match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
            ArithOp::Inv => self.inv(a)?,
            ArithOp::Pow(e) => self.pow(a, e),
        })
    }
}

fn check_monic(poly: &[Fq], degree: usize, order: u64) -> Result<(), GfError> {
    if poly.len() != degree + 1
        || poly[degree] != 1
        || poly.iter().any(|&c| c as u64 >= order)
    {
        return Err(GfError::BadModulus);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf8() -> FieldCtx {
        FieldCtx::new(2, 1, 3, &Moduli::default()).unwrap()
    }

    fn elem(ctx: &FieldCtx, c: &[Fq]) -> FqmElem {
        ctx.from_coeffs(c.to_vec()).unwrap()
    }

    #[test]
    fn smallest_field_uses_x3_x_1() {
        let ctx = gf8();
        assert_eq!(ctx.ext_modulus(), &[1, 1, 0, 1]);
        assert_eq!(ctx.base_modulus(), &[0, 1]);
        assert_eq!(ctx.q(), 2);
    }

    #[test]
    fn composite_characteristic_is_rejected() {
        assert_eq!(
            FieldCtx::new(4, 1, 3, &Moduli::default()).unwrap_err(),
            GfError::NotPrime(4)
        );
    }

    #[test]
    fn reducible_modulus_is_rejected() {
        let moduli = Moduli {
            base: None,
            // x^3 + 1 = (x + 1)(x^2 + x + 1)
            ext: Some(vec![1, 0, 0, 1]),
        };
        assert_eq!(
            FieldCtx::new(2, 1, 3, &moduli).unwrap_err(),
            GfError::ReducibleModulus
        );
    }

    #[test]
    fn table_two_field_builds() {
        let ctx = FieldCtx::new(2, 4, 42, &Moduli::default()).unwrap();
        assert_eq!(ctx.q(), 16);
        assert_eq!(ctx.m(), 42);
        // least irreducible quartic over GF(2) is x^4 + x + 1
        assert_eq!(ctx.base_modulus(), &[1, 1, 0, 0, 1]);
        let a = ctx.alpha();
        assert_eq!(ctx.frobenius(&a, 42), a);
    }

    #[test]
    fn alpha_cubed_reduces() {
        let ctx = gf8();
        let a = ctx.alpha();
        let a2 = elem(&ctx, &[0, 0, 1]);
        assert_eq!(ctx.mul(&a, &a2), elem(&ctx, &[1, 1, 0]));
    }

    #[test]
    fn inverse_of_one_and_zero() {
        let ctx = gf8();
        assert_eq!(ctx.inv(&ctx.one()).unwrap(), ctx.one());
        assert_eq!(ctx.inv(&ctx.zero()).unwrap_err(), GfError::DivisionByZero);
    }

    #[test]
    fn arith_rejects_foreign_elements() {
        let ctx = gf8();
        let other = FieldCtx::with_order(2, 4).unwrap();
        let err = ctx.arith(&ctx.one(), &other.one(), ArithOp::Add).unwrap_err();
        assert_eq!(err, GfError::FieldMismatch);
    }

    #[test]
    fn frobenius_squares_in_gf8() {
        let ctx = gf8();
        let a = ctx.alpha();
        assert_eq!(ctx.frobenius(&a, 1), elem(&ctx, &[0, 0, 1]));
        assert_eq!(ctx.frobenius(&a, 0), a);
        assert_eq!(ctx.frobenius(&ctx.frobenius(&a, 1), -1), a);
    }

    #[test]
    fn odd_characteristic_tower() {
        let ctx = FieldCtx::new(3, 2, 4, &Moduli::default()).unwrap();
        assert_eq!(ctx.q(), 9);
        let a = ctx.alpha();
        let b = ctx.add(&a, &ctx.from_base(5));
        let prod = ctx.mul(&a, &b);
        assert_eq!(ctx.mul(&prod, &ctx.inv(&b).unwrap()), a);
        assert_eq!(ctx.frobenius(&b, 4), b);
        assert_eq!(ctx.frobenius(&b, 1), ctx.pow(&b, 9));
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    /// Independent multiplication: polynomial product over GF(q) followed by
    /// long division by the extension modulus.
    fn schoolbook(ctx: &FieldCtx, a: &FqmElem, b: &FqmElem) -> FqmElem {
        let prod = poly_mul(&ctx.tables, a.coeffs(), b.coeffs());
        let rem = poly_rem(&ctx.tables, &prod, ctx.ext_modulus());
        let mut coeffs = vec![0; ctx.m()];
        coeffs[..rem.len()].copy_from_slice(&rem);
        ctx.from_coeffs(coeffs).unwrap()
    }

    fn arb_elem(q: u16, m: usize) -> impl Strategy<Value = Vec<Fq>> {
        proptest::collection::vec(0..q, m)
    }

    proptest! {
        #[test]
        fn mul_agrees_with_schoolbook(a in arb_elem(16, 7), b in arb_elem(16, 7)) {
            let ctx = FieldCtx::new(2, 4, 7, &Moduli::default()).unwrap();
            let a = ctx.from_coeffs(a).unwrap();
            let b = ctx.from_coeffs(b).unwrap();
            prop_assert_eq!(ctx.mul(&a, &b), schoolbook(&ctx, &a, &b));
        }

        #[test]
        fn frobenius_is_an_automorphism(a in arb_elem(2, 12), b in arb_elem(2, 12), i in -30i64..30) {
            let ctx = FieldCtx::new(2, 1, 12, &Moduli::default()).unwrap();
            let a = ctx.from_coeffs(a).unwrap();
            let b = ctx.from_coeffs(b).unwrap();
            prop_assert_eq!(
                ctx.frobenius(&ctx.mul(&a, &b), i),
                ctx.mul(&ctx.frobenius(&a, i), &ctx.frobenius(&b, i))
            );
            prop_assert_eq!(
                ctx.frobenius(&ctx.add(&a, &b), i),
                ctx.add(&ctx.frobenius(&a, i), &ctx.frobenius(&b, i))
            );
            prop_assert_eq!(ctx.frobenius(&a, i + 12), ctx.frobenius(&a, i));
            prop_assert_eq!(ctx.frobenius(&a, 12), a.clone());
        }

        #[test]
        fn subfield_fixed_by_frobenius(c in 0u16..16) {
            let ctx = FieldCtx::new(2, 4, 5, &Moduli::default()).unwrap();
            let a = ctx.from_base(c);
            prop_assert_eq!(ctx.frobenius(&a, 1), a);
        }

        #[test]
        fn inverse_round_trips(a in arb_elem(16, 6)) {
            let ctx = FieldCtx::new(2, 4, 6, &Moduli::default()).unwrap();
            let a = ctx.from_coeffs(a).unwrap();
            prop_assume!(!a.is_zero());
            let inv = ctx.inv(&a).unwrap();
            prop_assert_eq!(ctx.mul(&a, &inv), ctx.one());
        }
    }

    #[test]
    fn char_two_self_sum_vanishes() {
        let ctx = FieldCtx::new(2, 4, 5, &Moduli::default()).unwrap();
        let a = ctx.add(&ctx.alpha(), &ctx.from_base(7));
        assert!(ctx.add(&a, &a).is_zero());
    }

    #[test]
    fn thousand_random_products_match_oracle() {
        use rand::{Rng, SeedableRng};
        let ctx = FieldCtx::new(2, 4, 11, &Moduli::default()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a = ctx
                .from_coeffs((0..11).map(|_| rng.gen_range(0..16)).collect())
                .unwrap();
            let b = ctx
                .from_coeffs((0..11).map(|_| rng.gen_range(0..16)).collect())
                .unwrap();
            assert_eq!(ctx.mul(&a, &b), schoolbook(&ctx, &a, &b));
        }
    }
}
