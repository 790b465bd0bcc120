//! Versioned binary encoding of keys and ciphertexts.
//!
//! Every object starts with a common header:
//!
//! ```text
//! u8  version
//! u8  kind                      1 public key, 2 secret key, 3 ciphertext
//! u32 p, u8 r, u16 m            field tower (little endian)
//! u16 × (r+1)                   base modulus, constant term first
//! u16 × (m+1)                   extension modulus, constant term first
//! u32 q, u16 × 5                m, n, k, λ, ℓ
//! u64 fingerprint               FNV-1a of the field and parameter bytes
//! ```
//!
//! Matrices over GF(q^m) are stored row-major as byte-aligned sections, each
//! GF(q) coefficient packed into `fq_bits` bits, least significant first.
//! The public key body holds the pivot columns of its echelon form, the
//! `k × (n−k)` systematic part and then the raw generator.

use alloc::vec::Vec;

use super::{Ciphertext, CryptoError, Cryptosystem, ParameterSet, PublicKey, SecretKey};
use crate::gabidulin::GabidulinCode;
use crate::gf::{FieldCtx, Fq, FqmElem, Moduli};
use crate::linalg::{self, Ext, MatQm, Matrix, SubspaceV};

pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    PublicKey = 1,
    SecretKey = 2,
    Ciphertext = 3,
}

impl Kind {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(Kind::PublicKey),
            2 => Some(Kind::SecretKey),
            3 => Some(Kind::Ciphertext),
            _ => None,
        }
    }
}

/// Decoded common header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub kind: Kind,
    pub p: u64,
    pub r: u32,
    pub moduli: Moduli,
    pub params: ParameterSet,
    pub fingerprint: u64,
    body_offset: usize,
}

impl Header {
    /// Rebuilds the field and parameters recorded in the header.
    pub fn system(&self) -> Result<Cryptosystem, CryptoError> {
        let ctx = FieldCtx::new(self.p, self.r, self.params.m, &self.moduli)
            .map_err(|_| CryptoError::MalformedEncoding("invalid field description"))?;
        let sys = Cryptosystem::with_field(self.params, ctx)?;
        if sys.fingerprint() != self.fingerprint {
            return Err(CryptoError::MalformedEncoding("fingerprint does not match header"));
        }
        Ok(sys)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn field_and_params(ctx: &FieldCtx, params: &ParameterSet) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&ctx.p().to_le_bytes());
    out.push(ctx.r() as u8);
    out.extend_from_slice(&(ctx.m() as u16).to_le_bytes());
    for &c in ctx.base_modulus().iter().chain(ctx.ext_modulus()) {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out.extend_from_slice(&(params.q as u32).to_le_bytes());
    for v in [params.m, params.n, params.k, params.lambda, params.ell] {
        out.extend_from_slice(&(v as u16).to_le_bytes());
    }
    out
}

pub(super) fn fingerprint(ctx: &FieldCtx, params: &ParameterSet) -> u64 {
    fnv1a(&field_and_params(ctx, params))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CryptoError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or(CryptoError::MalformedEncoding("truncated input"))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, CryptoError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, CryptoError> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32, CryptoError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn u64(&mut self) -> Result<u64, CryptoError> {
        let b = self.take(8)?;
        let mut a = [0u8; 8];
        a.copy_from_slice(b);
        Ok(u64::from_le_bytes(a))
    }

    fn finish(&self) -> Result<(), CryptoError> {
        if self.pos != self.bytes.len() {
            return Err(CryptoError::MalformedEncoding("trailing bytes"));
        }
        Ok(())
    }
}

/// Parses and sanity-checks the common header.
pub fn read_header(bytes: &[u8]) -> Result<Header, CryptoError> {
    let mut rd = Reader { bytes, pos: 0 };
    let version = rd.u8()?;
    if version != FORMAT_VERSION {
        return Err(CryptoError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let kind = Kind::from_byte(rd.u8()?).ok_or(CryptoError::MalformedEncoding("unknown kind"))?;
    let p = rd.u32()? as u64;
    let r = rd.u8()? as u32;
    let m = rd.u16()? as usize;
    if r == 0 || m == 0 {
        return Err(CryptoError::MalformedEncoding("zero field degree"));
    }
    let base = (0..=r).map(|_| rd.u16()).collect::<Result<Vec<Fq>, _>>()?;
    let ext = (0..=m).map(|_| rd.u16()).collect::<Result<Vec<Fq>, _>>()?;
    let q = rd.u32()? as u64;
    let mut dims = [0usize; 5];
    for d in dims.iter_mut() {
        *d = rd.u16()? as usize;
    }
    let [pm, n, k, lambda, ell] = dims;
    if pm != m {
        return Err(CryptoError::MalformedEncoding("field and parameter degrees differ"));
    }
    if (p as u128).checked_pow(r) != Some(q as u128) {
        return Err(CryptoError::MalformedEncoding("q does not match the field"));
    }
    let fingerprint = rd.u64()?;
    Ok(Header {
        kind,
        p,
        r,
        moduli: Moduli {
            base: Some(base),
            ext: Some(ext),
        },
        params: ParameterSet {
            q,
            m,
            n,
            k,
            lambda,
            ell,
        },
        fingerprint,
        body_offset: rd.pos,
    })
}

/// Byte length of a section holding `count` elements of GF(q^m).
pub fn section_len(ctx: &FieldCtx, count: usize) -> usize {
    (count * ctx.m() * ctx.fq_bits() as usize).div_ceil(8)
}

fn write_section(ctx: &FieldCtx, out: &mut Vec<u8>, elems: &[FqmElem]) {
    let bits = ctx.fq_bits();
    let start = out.len();
    out.resize(start + section_len(ctx, elems.len()), 0);
    let mut pos = 0usize;
    for e in elems {
        for &c in e.coeffs() {
            for b in 0..bits {
                if (c >> b) & 1 == 1 {
                    out[start + pos / 8] |= 1 << (pos % 8);
                }
                pos += 1;
            }
        }
    }
}

fn read_section(
    ctx: &FieldCtx,
    rd: &mut Reader<'_>,
    count: usize,
) -> Result<Vec<FqmElem>, CryptoError> {
    let bits = ctx.fq_bits();
    let data = rd.take(section_len(ctx, count))?;
    let mut pos = 0usize;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut coeffs = Vec::with_capacity(ctx.m());
        for _ in 0..ctx.m() {
            let mut c: u32 = 0;
            for b in 0..bits {
                c |= (((data[pos / 8] >> (pos % 8)) & 1) as u32) << b;
                pos += 1;
            }
            if c >= ctx.q() {
                return Err(CryptoError::MalformedEncoding("coefficient out of range"));
            }
            coeffs.push(c as Fq);
        }
        out.push(ctx.from_coeffs(coeffs).expect("checked range"));
    }
    // padding bits must be zero for a canonical encoding
    while !pos.is_multiple_of(8) {
        if (data[pos / 8] >> (pos % 8)) & 1 == 1 {
            return Err(CryptoError::MalformedEncoding("nonzero padding"));
        }
        pos += 1;
    }
    Ok(out)
}

fn read_matrix(
    ctx: &FieldCtx,
    rd: &mut Reader<'_>,
    rows: usize,
    cols: usize,
) -> Result<MatQm, CryptoError> {
    Ok(Matrix::new(rows, cols, read_section(ctx, rd, rows * cols)?))
}

impl Cryptosystem {
    fn header(&self, kind: Kind) -> Vec<u8> {
        let mut out = Vec::new();
        out.push(FORMAT_VERSION);
        out.push(kind as u8);
        out.extend_from_slice(&field_and_params(self.ctx(), self.params()));
        out.extend_from_slice(&self.fingerprint().to_le_bytes());
        out
    }

    fn open<'a>(&self, bytes: &'a [u8], kind: Kind) -> Result<Reader<'a>, CryptoError> {
        let h = read_header(bytes)?;
        if h.kind != kind {
            return Err(CryptoError::MalformedEncoding("unexpected object kind"));
        }
        if h.fingerprint != self.fingerprint() || h.params != *self.params() {
            return Err(CryptoError::FingerprintMismatch);
        }
        Ok(Reader {
            bytes,
            pos: h.body_offset,
        })
    }

    pub fn encode_public_key(&self, pk: &PublicKey) -> Vec<u8> {
        let ctx = self.ctx();
        let mut out = self.header(Kind::PublicKey);
        let sys = pk.systematic(ctx);
        for &p in &sys.pivots {
            out.extend_from_slice(&(p as u16).to_le_bytes());
        }
        write_section(ctx, &mut out, sys.redundancy.data());
        write_section(ctx, &mut out, pk.g_pub.data());
        out
    }

    /// Length of the systematic public-key section alone.
    pub fn systematic_key_len(&self) -> usize {
        let p = self.params();
        section_len(self.ctx(), p.k * (p.n - p.k))
    }

    pub fn decode_public_key(&self, bytes: &[u8]) -> Result<PublicKey, CryptoError> {
        let ctx = self.ctx();
        let ParameterSet { n, k, .. } = *self.params();
        let mut rd = self.open(bytes, Kind::PublicKey)?;
        let pivots = (0..k)
            .map(|_| rd.u16().map(|v| v as usize))
            .collect::<Result<Vec<_>, _>>()?;
        let redundancy = read_matrix(ctx, &mut rd, k, n - k)?;
        let g_pub = read_matrix(ctx, &mut rd, k, n)?;
        rd.finish()?;
        let pk = PublicKey {
            g_pub,
            params: *self.params(),
        };
        let sys = pk.systematic(ctx);
        if sys.pivots.len() != k {
            return Err(CryptoError::MalformedEncoding("public key is rank deficient"));
        }
        if sys.pivots != pivots || sys.redundancy != redundancy {
            return Err(CryptoError::MalformedEncoding("systematic section disagrees"));
        }
        Ok(pk)
    }

    pub fn encode_secret_key(&self, sk: &SecretKey) -> Vec<u8> {
        let ctx = self.ctx();
        let mut out = self.header(Kind::SecretKey);
        write_section(ctx, &mut out, sk.code.g());
        write_section(ctx, &mut out, sk.s.data());
        write_section(ctx, &mut out, sk.p.data());
        write_section(ctx, &mut out, sk.v.basis());
        out
    }

    pub fn decode_secret_key(&self, bytes: &[u8]) -> Result<SecretKey, CryptoError> {
        let ctx = self.ctx();
        let f = Ext(ctx);
        let ParameterSet { n, k, lambda, .. } = *self.params();
        let mut rd = self.open(bytes, Kind::SecretKey)?;
        let g = read_section(ctx, &mut rd, n)?;
        let s = read_matrix(ctx, &mut rd, k, k)?;
        let p = read_matrix(ctx, &mut rd, n, n)?;
        let v = read_section(ctx, &mut rd, lambda)?;
        rd.finish()?;
        let code = GabidulinCode::new(ctx, g, k)
            .map_err(|_| CryptoError::MalformedEncoding("invalid evaluation vector"))?;
        let v = SubspaceV::new(ctx, v)
            .map_err(|_| CryptoError::MalformedEncoding("dependent subspace basis"))?;
        if !p.entries_in(ctx, &v) {
            return Err(CryptoError::MalformedEncoding("mixer entries outside the subspace"));
        }
        let s_inv = linalg::inverse(&f, &s)
            .map_err(|_| CryptoError::MalformedEncoding("singular scrambler"))?;
        let p_inv = linalg::inverse(&f, &p)
            .map_err(|_| CryptoError::MalformedEncoding("singular mixer"))?;
        Ok(SecretKey {
            code,
            s,
            p,
            v,
            s_inv,
            p_inv,
        })
    }

    pub fn encode_ciphertext(&self, ct: &Ciphertext) -> Vec<u8> {
        let mut out = self.header(Kind::Ciphertext);
        write_section(self.ctx(), &mut out, ct.y.data());
        out
    }

    pub fn decode_ciphertext(&self, bytes: &[u8]) -> Result<Ciphertext, CryptoError> {
        let ParameterSet { n, ell, .. } = *self.params();
        let mut rd = self.open(bytes, Kind::Ciphertext)?;
        let y = read_matrix(self.ctx(), &mut rd, ell, n)?;
        rd.finish()?;
        Ok(Ciphertext {
            y,
            fingerprint: self.fingerprint(),
        })
    }
}
