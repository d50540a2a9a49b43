//! Text matrix files.
//!
//! ```text
//! mpmat <rows> <cols> <tag> <precision-bits>
//! <row 0 entries>
//! ...
//! ```
//!
//! `tag` is `dd`, `td`, `qd` or `bf`. Entries are hex-floats separated by
//! spaces: one token per component for multi-component values, one token for
//! `bf` values. Vectors are stored as `n × 1` matrices. Writing then reading
//! reproduces every bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::bigfloat::{f64_from_hex, f64_to_hex, BigFloat, PrecisionContext};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Scalar, Vector};
use crate::mcfloat::MultiComp;

const MAGIC: &str = "mpmat";

/// Scalars with a file representation.
pub trait FileScalar: Scalar {
    fn tag(ctx: &Self::Ctx) -> &'static str;
    fn bits(ctx: &Self::Ctx) -> u32;
    fn ctx_for(tag: &str, bits: u32) -> Result<Self::Ctx>;
    fn tokens() -> usize;
    fn write_tokens(&self, out: &mut String);
    fn parse_tokens(tokens: &[&str], ctx: &Self::Ctx) -> Result<Self>;
}

impl<const K: usize> FileScalar for MultiComp<K> {
    fn tag(_: &()) -> &'static str {
        Self::TAG.name()
    }

    fn bits(_: &()) -> u32 {
        Self::TAG.bits()
    }

    fn ctx_for(tag: &str, bits: u32) -> Result<()> {
        if tag != Self::TAG.name() || bits != Self::TAG.bits() {
            return Err(Error::Parse(format!(
                "expected '{} {}', found '{tag} {bits}'",
                Self::TAG.name(),
                Self::TAG.bits()
            )));
        }
        Ok(())
    }

    fn tokens() -> usize {
        K
    }

    fn write_tokens(&self, out: &mut String) {
        for (i, c) in self.components().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&f64_to_hex(*c));
        }
    }

    fn parse_tokens(tokens: &[&str], _: &()) -> Result<Self> {
        let mut c = [0.0; K];
        for (slot, t) in c.iter_mut().zip(tokens) {
            *slot = f64_from_hex(t)?;
        }
        MultiComp::from_components(c)
    }
}

impl FileScalar for BigFloat {
    fn tag(_: &PrecisionContext) -> &'static str {
        "bf"
    }

    fn bits(ctx: &PrecisionContext) -> u32 {
        ctx.bits()
    }

    fn ctx_for(tag: &str, bits: u32) -> Result<PrecisionContext> {
        if tag != "bf" {
            return Err(Error::Parse(format!("expected 'bf', found '{tag}'")));
        }
        PrecisionContext::new(bits)
    }

    fn tokens() -> usize {
        1
    }

    fn write_tokens(&self, out: &mut String) {
        out.push_str(&self.to_hex());
    }

    fn parse_tokens(tokens: &[&str], ctx: &PrecisionContext) -> Result<Self> {
        let v = BigFloat::parse_hex(tokens[0], ctx)?;
        // Reject text that needed rounding.
        let wide = ctx.widen(64);
        if v != BigFloat::parse_hex(tokens[0], &wide)? {
            return Err(Error::Parse(format!("'{}' exceeds {} bits", tokens[0], ctx.bits())));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Header {
    pub rows: usize,
    pub cols: usize,
    pub tag: String,
    pub bits: u32,
}

impl Header {
    pub fn parse(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 || f[0] != MAGIC {
            return Err(Error::Parse(format!("bad header '{line}'")));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| Error::Parse(format!("bad header field '{s}'")));
        Ok(Header {
            rows: num(f[1])? as usize,
            cols: num(f[2])? as usize,
            tag: f[3].to_string(),
            bits: u32::try_from(num(f[4])?).map_err(|_| Error::Parse("precision out of range".into()))?,
        })
    }
}

pub fn write_matrix<S: FileScalar, W: Write>(w: &mut W, m: &DenseMatrix<S>, ctx: &S::Ctx) -> Result<()> {
    writeln!(w, "{MAGIC} {} {} {} {}", m.rows(), m.cols(), S::tag(ctx), S::bits(ctx))?;
    let mut line = String::new();
    for i in 0..m.rows() {
        line.clear();
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(' ');
            }
            v.write_tokens(&mut line);
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_header<R: BufRead>(r: &mut R) -> Result<Header> {
    let mut first = String::new();
    if r.read_line(&mut first)? == 0 {
        return Err(Error::Parse("empty matrix file".into()));
    }
    Header::parse(first.trim())
}

pub fn read_matrix<S: FileScalar, R: BufRead>(mut r: R) -> Result<(DenseMatrix<S>, S::Ctx)> {
    let h = read_header(&mut r)?;
    let ctx = S::ctx_for(&h.tag, h.bits)?;
    let mut data = Vec::with_capacity(h.rows * h.cols);
    let mut lines = r.lines();
    for i in 0..h.rows {
        let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {i}")))??;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != h.cols * S::tokens() {
            return Err(Error::Parse(format!(
                "row {i}: expected {} tokens, found {}",
                h.cols * S::tokens(),
                tokens.len()
            )));
        }
        for entry in tokens.chunks(S::tokens()) {
            data.push(S::parse_tokens(entry, &ctx)?);
        }
    }
    for rest in lines {
        if !rest?.trim().is_empty() {
            return Err(Error::Parse("trailing data after last row".into()));
        }
    }
    Ok((DenseMatrix::from_vec(h.rows, h.cols, data)?, ctx))
}

pub fn save_matrix<S: FileScalar>(path: &Path, m: &DenseMatrix<S>, ctx: &S::Ctx) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix(&mut w, m, ctx)?;
    w.flush()?;
    Ok(())
}

pub fn load_matrix<S: FileScalar>(path: &Path) -> Result<(DenseMatrix<S>, S::Ctx)> {
    read_matrix(BufReader::new(File::open(path)?))
}

pub fn save_vector<S: FileScalar>(path: &Path, v: &Vector<S>, ctx: &S::Ctx) -> Result<()> {
    let m = DenseMatrix::from_vec(v.len(), 1, v.as_slice().to_vec())?;
    save_matrix(path, &m, ctx)
}

pub fn load_vector<S: FileScalar>(path: &Path) -> Result<(Vector<S>, S::Ctx)> {
    let (m, ctx) = load_matrix::<S>(path)?;
    if m.cols() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: m.cols() });
    }
    Ok((Vector::from_vec(m.into_vec()), ctx))
}

pub fn peek_header(path: &Path) -> Result<Header> {
    read_header(&mut BufReader::new(File::open(path)?))
}
