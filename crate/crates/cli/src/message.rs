//! Byte strings to message matrices and back.
//!
//! A block carries `ℓ·k·m·r` bits for `q = 2^r`: entries are filled
//! row-major, coefficients low degree first, each coefficient `r` bits,
//! least significant bit of the stream first.  The plaintext is always
//! followed by a `0x80` marker and zero bits up to a block boundary, so an
//! empty input still produces one block.

use ilrc_core::{FieldCtx, Fq, MatQm, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MessageError {
    #[error("byte mapping requires q to be a power of two")]
    UnsupportedField,
    #[error("a block of {0} bits cannot hold the padding marker")]
    BlockTooSmall(usize),
    #[error("bad message padding")]
    Padding,
}

/// Bits carried by one `ell × k` block.
pub fn block_bits(ctx: &FieldCtx, ell: usize, k: usize) -> Result<usize, MessageError> {
    if ctx.p() != 2 {
        return Err(MessageError::UnsupportedField);
    }
    let bits = ell * k * ctx.m() * ctx.r() as usize;
    if bits < 8 {
        return Err(MessageError::BlockTooSmall(bits));
    }
    Ok(bits)
}

fn bit(bytes: &[u8], i: usize) -> u8 {
    bytes.get(i / 8).map_or(0, |b| (b >> (i % 8)) & 1)
}

pub fn encode(ctx: &FieldCtx, ell: usize, k: usize, data: &[u8]) -> Result<Vec<MatQm>, MessageError> {
    let bits = block_bits(ctx, ell, k)?;
    let mut padded = data.to_vec();
    padded.push(0x80);
    let total = (padded.len() * 8).div_ceil(bits) * bits;
    let r = ctx.r() as usize;
    let m = ctx.m();
    let mut pos = 0;
    let mut blocks = Vec::with_capacity(total / bits);
    while pos < total {
        let mut entries = Vec::with_capacity(ell * k);
        for _ in 0..ell * k {
            let mut coeffs = Vec::with_capacity(m);
            for _ in 0..m {
                let mut c: Fq = 0;
                for b in 0..r {
                    c |= (bit(&padded, pos) as Fq) << b;
                    pos += 1;
                }
                coeffs.push(c);
            }
            entries.push(ctx.from_coeffs(coeffs).expect("r-bit coefficient"));
        }
        blocks.push(Matrix::new(ell, k, entries));
    }
    Ok(blocks)
}

pub fn decode(ctx: &FieldCtx, blocks: &[MatQm]) -> Result<Vec<u8>, MessageError> {
    if ctx.p() != 2 {
        return Err(MessageError::UnsupportedField);
    }
    let r = ctx.r() as usize;
    let mut bits: Vec<u8> = Vec::new();
    for block in blocks {
        for x in block.data() {
            for &c in x.coeffs() {
                for b in 0..r {
                    bits.push(((c >> b) & 1) as u8);
                }
            }
        }
    }
    let whole = bits.len() / 8;
    if bits[whole * 8..].iter().any(|&b| b != 0) {
        return Err(MessageError::Padding);
    }
    let mut bytes: Vec<u8> = bits[..whole * 8]
        .chunks(8)
        .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << i)))
        .collect();
    while bytes.last() == Some(&0) {
        bytes.pop();
    }
    if bytes.pop() != Some(0x80) {
        return Err(MessageError::Padding);
    }
    Ok(bytes)
}
