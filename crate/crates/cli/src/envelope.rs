//! Text envelope around binary objects.
//!
//! ```text
//! ILRC1 <kind>
//! field <p> <r> <m> <base modulus> <ext modulus> basis=polynomial
//! params q=<q> m=<m> n=<n> k=<k> lambda=<λ> ell=<ℓ>
//! <base64 payload, 76 columns>
//! crc32 <8 hex digits of the payload CRC>
//! ```
//!
//! Moduli are comma-separated coefficient lists, constant term first.  The
//! field and parameter lines are informative and are cross-checked against
//! the fingerprint embedded in the payload.

use std::fmt::Write as _;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use ilrc_core::{Cryptosystem, FieldCtx, Moduli, ParameterSet};

pub const MAGIC: &str = "ILRC1";
const WRAP: usize = 76;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    PublicKey,
    SecretKey,
    Ciphertext,
}

impl FileKind {
    pub fn label(self) -> &'static str {
        match self {
            FileKind::PublicKey => "public-key",
            FileKind::SecretKey => "secret-key",
            FileKind::Ciphertext => "ciphertext",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "public-key" => Some(FileKind::PublicKey),
            "secret-key" => Some(FileKind::SecretKey),
            "ciphertext" => Some(FileKind::Ciphertext),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnvelopeError {
    #[error("missing {MAGIC} header")]
    BadMagic,
    #[error("expected a {expected} file, found {found}")]
    KindMismatch { expected: &'static str, found: String },
    #[error("malformed {0} line")]
    BadLine(&'static str),
    #[error("invalid field description: {0}")]
    BadField(String),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("payload is not valid base64")]
    Base64,
    #[error("checksum mismatch (stored {stored:08x}, computed {computed:08x})")]
    Checksum { stored: u32, computed: u32 },
}

/// Contents of a parsed envelope.
#[derive(Debug, Clone)]
pub struct Opened {
    pub kind: FileKind,
    pub system: Cryptosystem,
    pub payload: Vec<u8>,
}

fn join(coeffs: &[u16]) -> String {
    coeffs
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn field_line(ctx: &FieldCtx) -> String {
    format!(
        "field {} {} {} {} {} basis=polynomial",
        ctx.p(),
        ctx.r(),
        ctx.m(),
        join(ctx.base_modulus()),
        join(ctx.ext_modulus())
    )
}

pub fn params_line(p: &ParameterSet) -> String {
    format!(
        "params q={} m={} n={} k={} lambda={} ell={}",
        p.q, p.m, p.n, p.k, p.lambda, p.ell
    )
}

pub fn seal(kind: FileKind, sys: &Cryptosystem, payload: &[u8]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {}", kind.label());
    let _ = writeln!(out, "{}", field_line(sys.ctx()));
    let _ = writeln!(out, "{}", params_line(sys.params()));
    let b64 = STANDARD.encode(payload);
    for chunk in b64.as_bytes().chunks(WRAP) {
        out.push_str(std::str::from_utf8(chunk).expect("base64 is ascii"));
        out.push('\n');
    }
    let _ = writeln!(out, "crc32 {:08x}", crc32fast::hash(payload));
    out
}

fn parse_coeffs(s: &str) -> Result<Vec<u16>, EnvelopeError> {
    s.split(',')
        .map(|c| c.parse::<u16>())
        .collect::<Result<_, _>>()
        .map_err(|_| EnvelopeError::BadLine("field"))
}

fn parse_field(line: &str) -> Result<FieldCtx, EnvelopeError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 7 || parts[0] != "field" || parts[6] != "basis=polynomial" {
        return Err(EnvelopeError::BadLine("field"));
    }
    let num = |s: &str| s.parse::<u64>().map_err(|_| EnvelopeError::BadLine("field"));
    let (p, r, m) = (num(parts[1])?, num(parts[2])?, num(parts[3])?);
    let moduli = Moduli {
        base: Some(parse_coeffs(parts[4])?),
        ext: Some(parse_coeffs(parts[5])?),
    };
    FieldCtx::new(p, r as u32, m as usize, &moduli).map_err(|e| EnvelopeError::BadField(e.to_string()))
}

/// Parses `key=value` tokens following a leading keyword.
pub fn parse_params_line(line: &str) -> Result<ParameterSet, EnvelopeError> {
    let mut it = line.split_whitespace();
    if it.next() != Some("params") {
        return Err(EnvelopeError::BadLine("params"));
    }
    let mut vals = [None::<u64>; 6];
    const KEYS: [&str; 6] = ["q", "m", "n", "k", "lambda", "ell"];
    for tok in it {
        let (k, v) = tok.split_once('=').ok_or(EnvelopeError::BadLine("params"))?;
        let idx = KEYS
            .iter()
            .position(|&key| key == k)
            .ok_or(EnvelopeError::BadLine("params"))?;
        vals[idx] = Some(v.parse().map_err(|_| EnvelopeError::BadLine("params"))?);
    }
    let get = |i: usize| vals[i].ok_or(EnvelopeError::BadLine("params"));
    Ok(ParameterSet {
        q: get(0)?,
        m: get(1)? as usize,
        n: get(2)? as usize,
        k: get(3)? as usize,
        lambda: get(4)? as usize,
        ell: get(5)? as usize,
    })
}

pub fn open(text: &str, expected: FileKind) -> Result<Opened, EnvelopeError> {
    let mut lines = text.lines();
    let head = lines.next().ok_or(EnvelopeError::BadMagic)?;
    let (magic, label) = head.split_once(' ').ok_or(EnvelopeError::BadMagic)?;
    if magic != MAGIC {
        return Err(EnvelopeError::BadMagic);
    }
    let kind = FileKind::parse(label.trim()).ok_or(EnvelopeError::BadLine("header"))?;
    if kind != expected {
        return Err(EnvelopeError::KindMismatch {
            expected: expected.label(),
            found: label.trim().to_string(),
        });
    }
    let ctx = parse_field(lines.next().ok_or(EnvelopeError::BadLine("field"))?)?;
    let params = parse_params_line(lines.next().ok_or(EnvelopeError::BadLine("params"))?)?;
    let system =
        Cryptosystem::with_field(params, ctx).map_err(|e| EnvelopeError::BadParams(e.to_string()))?;
    let mut b64 = String::new();
    let mut crc_line = None;
    for line in lines {
        let line = line.trim_end();
        if let Some(hex) = line.strip_prefix("crc32 ") {
            crc_line = Some(hex.to_string());
            break;
        }
        b64.push_str(line);
    }
    let stored = crc_line
        .and_then(|h| u32::from_str_radix(h.trim(), 16).ok())
        .ok_or(EnvelopeError::BadLine("crc32"))?;
    let payload = STANDARD.decode(b64.as_bytes()).map_err(|_| EnvelopeError::Base64)?;
    let computed = crc32fast::hash(&payload);
    if computed != stored {
        return Err(EnvelopeError::Checksum { stored, computed });
    }
    Ok(Opened {
        kind,
        system,
        payload,
    })
}

/// Length-prefixed concatenation, used for multi-block ciphertexts.
pub fn pack_blocks(blocks: &[Vec<u8>]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(blocks.len() as u32).to_le_bytes());
    for b in blocks {
        out.extend_from_slice(&(b.len() as u32).to_le_bytes());
        out.extend_from_slice(b);
    }
    out
}

pub fn unpack_blocks(payload: &[u8]) -> Option<Vec<&[u8]>> {
    let read_u32 = |at: usize| -> Option<usize> {
        let b = payload.get(at..at + 4)?;
        Some(u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as usize)
    };
    let count = read_u32(0)?;
    let mut pos = 4;
    let mut out = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let len = read_u32(pos)?;
        pos += 4;
        out.push(payload.get(pos..pos.checked_add(len)?)?);
        pos += len;
    }
    (pos == payload.len()).then_some(out)
}
