//! Plain-text matrix fixtures.
//!
//! A fixture starts with `rows cols level` where `level` is `q` for a matrix
//! over GF(q) or `qm` for GF(q^m); each following line is one row of
//! whitespace-separated hex entries.  A GF(q^m) entry packs coefficient `i`
//! at bit offset `i·fq_bits`.  Lines starting with `#` are comments and a
//! file may hold several fixtures.

use std::fmt::Write as _;

use ilrc_core::{FieldCtx, Fq, FqmElem, MatQ, MatQm, Matrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fixture {
    Base(MatQ),
    Ext(MatQm),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixtureError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: &'static str },
    #[error("extension degree m·fq_bits exceeds 128 bits")]
    TooWide,
}

fn pack(ctx: &FieldCtx, x: &FqmElem) -> u128 {
    let bits = ctx.fq_bits();
    x.coeffs()
        .iter()
        .enumerate()
        .fold(0u128, |acc, (i, &c)| acc | ((c as u128) << (i as u32 * bits)))
}

fn unpack(ctx: &FieldCtx, mut v: u128) -> Option<FqmElem> {
    let bits = ctx.fq_bits();
    let mask = (1u128 << bits) - 1;
    let mut coeffs = Vec::with_capacity(ctx.m());
    for _ in 0..ctx.m() {
        coeffs.push((v & mask) as Fq);
        v >>= bits;
    }
    if v != 0 {
        return None;
    }
    ctx.from_coeffs(coeffs).ok()
}

fn width_ok(ctx: &FieldCtx) -> Result<(), FixtureError> {
    if ctx.m() as u32 * ctx.fq_bits() > 128 {
        return Err(FixtureError::TooWide);
    }
    Ok(())
}

pub fn write_ext(ctx: &FieldCtx, a: &MatQm, label: Option<&str>) -> Result<String, FixtureError> {
    width_ok(ctx)?;
    let mut out = String::new();
    if let Some(l) = label {
        let _ = writeln!(out, "# {l}");
    }
    let _ = writeln!(out, "{} {} qm", a.rows(), a.cols());
    for r in 0..a.rows() {
        let row: Vec<String> = a.row(r).iter().map(|x| format!("{:x}", pack(ctx, x))).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    Ok(out)
}

pub fn write_base(a: &MatQ, label: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(l) = label {
        let _ = writeln!(out, "# {l}");
    }
    let _ = writeln!(out, "{} {} q", a.rows(), a.cols());
    for r in 0..a.rows() {
        let row: Vec<String> = a.row(r).iter().map(|x| format!("{x:x}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Parses every fixture in `text`.
pub fn read_all(ctx: &FieldCtx, text: &str) -> Result<Vec<Fixture>, FixtureError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut out = Vec::new();
    while let Some((line, head)) = lines.next() {
        let err = |reason| FixtureError::Parse { line, reason };
        let parts: Vec<&str> = head.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(err("expected `rows cols level`"));
        }
        let rows: usize = parts[0].parse().map_err(|_| err("bad row count"))?;
        let cols: usize = parts[1].parse().map_err(|_| err("bad column count"))?;
        let ext = match parts[2] {
            "q" => false,
            "qm" => {
                width_ok(ctx)?;
                true
            }
            _ => return Err(err("level must be q or qm")),
        };
        let mut raw = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (line, row) = lines.next().ok_or(FixtureError::Parse {
                line,
                reason: "missing rows",
            })?;
            let err = |reason| FixtureError::Parse { line, reason };
            let entries: Vec<&str> = row.split_whitespace().collect();
            if entries.len() != cols {
                return Err(err("wrong number of entries"));
            }
            for e in entries {
                raw.push((u128::from_str_radix(e, 16).map_err(|_| err("bad hex entry"))?, line));
            }
        }
        if ext {
            let data = raw
                .into_iter()
                .map(|(v, line)| {
                    unpack(ctx, v).ok_or(FixtureError::Parse {
                        line,
                        reason: "entry outside GF(q^m)",
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.push(Fixture::Ext(Matrix::new(rows, cols, data)));
        } else {
            let data = raw
                .into_iter()
                .map(|(v, line)| {
                    if v < ctx.q() as u128 {
                        Ok(v as Fq)
                    } else {
                        Err(FixtureError::Parse {
                            line,
                            reason: "entry outside GF(q)",
                        })
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.push(Fixture::Base(Matrix::new(rows, cols, data)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ilrc_core::linalg::{sample_uniform, Base, Ext};
    use ilrc_core::RngStream;

    #[test]
    fn round_trip_both_levels() {
        let ctx = FieldCtx::with_order(16, 5).unwrap();
        let mut rng = RngStream::new(1);
        let a = sample_uniform(&Ext(&ctx), 3, 4, &mut rng);
        let b = sample_uniform(&Base(&ctx), 2, 5, &mut rng);
        let text = write_ext(&ctx, &a, Some("A")).unwrap() + &write_base(&b, None);
        let all = read_all(&ctx, &text).unwrap();
        assert_eq!(all, vec![Fixture::Ext(a), Fixture::Base(b)]);
    }

    #[test]
    fn gf8_entry_packing() {
        let ctx = FieldCtx::with_order(2, 3).unwrap();
        // α² + 1 packs to 0b101
        let text = "1 2 qm\n5 2\n";
        let Fixture::Ext(m) = &read_all(&ctx, text).unwrap()[0] else {
            panic!()
        };
        assert_eq!(m.get(0, 0).coeffs(), &[1, 0, 1]);
        assert_eq!(m.get(0, 1), &ctx.alpha());
        assert!(read_all(&ctx, "1 1 qm\n8\n").is_err());
        assert!(read_all(&ctx, "1 1 q\n2\n").is_err());
        assert!(read_all(&ctx, "2 1 q\n1\n").is_err());
    }
}
