//! Text formats for masks, generalized filters and sample vectors.
//!
//! All formats are line based. Text after `#` is ignored, as are blank lines.
//!
//! ```text
//! # mask file
//! p 2 n 1 mode coeffs
//! 0 0.5 0
//! 1 0.5 0
//! ```
//!
//! A filter file starts with `p <p> R <R>` and holds `p` blocks, each opened
//! by `filter <i>` and followed by `p^R` lines `<index> <re> <im>`. A vector
//! file starts with `p <p> n <n>` and holds `p^n` such lines.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frame::GeneralizedFilter;
use crate::mask::{Mask, MaskMode};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate() }
    }

    /// Next non-empty line as (1-based line number, tokens).
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            let content = line.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn number<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T> {
    token.parse().map_err(|_| parse_err(line, format!("invalid {what} {token:?}")))
}

/// Parses `key value key value ..` with the keys in the given order.
fn header<'a>(line: usize, tokens: &[&'a str], keys: &[&str]) -> Result<Vec<&'a str>> {
    if tokens.len() != 2 * keys.len() {
        return Err(parse_err(line, format!("expected header `{}`", keys.join(" <..> "))));
    }
    keys.iter()
        .enumerate()
        .map(|(k, key)| {
            if tokens[2 * k] != *key {
                Err(parse_err(line, format!("expected `{key}`, found {:?}", tokens[2 * k])))
            } else {
                Ok(tokens[2 * k + 1])
            }
        })
        .collect()
}

fn table_len(p: u8, n: u32) -> Result<usize> {
    crate::group::check_modulus(p)?;
    (p as usize)
        .checked_pow(n)
        .filter(|&len| len <= 1 << 26)
        .ok_or_else(|| Error::InvalidInput(format!("table of size {p}^{n} is too large")))
}

/// Reads `len` lines `<index> <re> <im>`, stopping early at a line whose first
/// token is `stop`. Every index in `0..len` must appear exactly once.
fn read_entries(lines: &mut Lines, len: usize, stop: Option<&str>) -> Result<Vec<Complex64>> {
    let mut values = vec![None; len];
    let mut count = 0;
    while count < len {
        let Some((line, tokens)) = lines.next_tokens() else { break };
        if Some(tokens[0]) == stop {
            return Err(Error::InvalidInput(format!(
                "block ending at line {line} has {count} entries, expected {len}"
            )));
        }
        if tokens.len() != 3 {
            return Err(parse_err(line, "expected `<index> <re> <im>`"));
        }
        let idx: usize = number(line, tokens[0], "index")?;
        let re: f64 = number(line, tokens[1], "real part")?;
        let im: f64 = number(line, tokens[2], "imaginary part")?;
        if idx >= len {
            return Err(parse_err(line, format!("index {idx} out of range 0..{len}")));
        }
        if values[idx].is_some() {
            return Err(parse_err(line, format!("duplicate index {idx}")));
        }
        values[idx] = Some(Complex64::new(re, im));
        count += 1;
    }
    if count < len {
        return Err(Error::InvalidInput(format!("expected {len} entries, found {count}")));
    }
    Ok(values.into_iter().map(|v| v.expect("all indices seen")).collect())
}

fn expect_end(lines: &mut Lines, what: &str) -> Result<()> {
    match lines.next_tokens() {
        None => Ok(()),
        Some((line, _)) => Err(Error::InvalidInput(format!("extra data at line {line} after the {what}"))),
    }
}

fn write_entries(out: &mut String, values: &[Complex64]) {
    for (i, z) in values.iter().enumerate() {
        writeln!(out, "{i} {} {}", z.re, z.im).unwrap();
    }
}

/// Parses a mask file; coefficient files are transformed to value tables.
pub fn parse_mask(text: &str) -> Result<Mask> {
    let mut lines = Lines::new(text);
    let (line, tokens) = lines.next_tokens().ok_or_else(|| parse_err(1, "empty mask file"))?;
    let h = header(line, &tokens, &["p", "n", "mode"])?;
    let p: u8 = number(line, h[0], "modulus")?;
    let n: u32 = number(line, h[1], "order")?;
    let mode = match h[2] {
        "coeffs" => MaskMode::Coeffs,
        "values" => MaskMode::Values,
        other => return Err(parse_err(line, format!("unknown mode {other:?}"))),
    };
    let values = read_entries(&mut lines, table_len(p, n)?, None)?;
    expect_end(&mut lines, "mask table")?;
    match mode {
        MaskMode::Coeffs => Mask::from_coeffs(p, n, values),
        MaskMode::Values => Mask::from_values(p, n, values),
    }
}

/// Writes a mask in the mode it was created from, with round-trip float
/// formatting.
pub fn emit_mask(m: &Mask) -> String {
    let mut out = format!("p {} n {} mode {}\n", m.p(), m.n(), m.mode().as_str());
    let data = match m.mode() {
        MaskMode::Coeffs => m.coeffs(),
        MaskMode::Values => m.values(),
    };
    write_entries(&mut out, data);
    out
}

pub fn parse_filter(text: &str) -> Result<GeneralizedFilter> {
    let mut lines = Lines::new(text);
    let (line, tokens) = lines.next_tokens().ok_or_else(|| parse_err(1, "empty filter file"))?;
    let h = header(line, &tokens, &["p", "R"])?;
    let p: u8 = number(line, h[0], "modulus")?;
    let r: u32 = number(line, h[1], "resolution")?;
    let len = table_len(p, r)?;
    let mut tables = Vec::with_capacity(p as usize);
    for i in 0..p as usize {
        let (line, tokens) = lines
            .next_tokens()
            .ok_or_else(|| Error::InvalidInput(format!("expected {p} filter blocks, found {i}")))?;
        let h = header(line, &tokens, &["filter"])?;
        let k: usize = number(line, h[0], "filter index")?;
        if k != i {
            return Err(parse_err(line, format!("expected `filter {i}`, found `filter {k}`")));
        }
        tables.push(read_entries(&mut lines, len, Some("filter"))?);
    }
    expect_end(&mut lines, "last filter block")?;
    GeneralizedFilter::new(p, r, tables)
}

pub fn emit_filter(f: &GeneralizedFilter) -> String {
    let mut out = format!("p {} R {}\n", f.p(), f.resolution());
    for (i, t) in f.tables().iter().enumerate() {
        writeln!(out, "filter {i}").unwrap();
        write_entries(&mut out, t);
    }
    out
}

/// A length-`p^n` complex vector, the input of the transform command.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleVector {
    pub p: u8,
    pub values: Vec<Complex64>,
}

pub fn parse_vector(text: &str) -> Result<SampleVector> {
    let mut lines = Lines::new(text);
    let (line, tokens) = lines.next_tokens().ok_or_else(|| parse_err(1, "empty vector file"))?;
    let h = header(line, &tokens, &["p", "n"])?;
    let p: u8 = number(line, h[0], "modulus")?;
    let n: u32 = number(line, h[1], "length exponent")?;
    let values = read_entries(&mut lines, table_len(p, n)?, None)?;
    expect_end(&mut lines, "vector")?;
    Ok(SampleVector { p, values })
}

pub fn emit_vector(v: &SampleVector) -> Result<String> {
    let n = crate::walsh::log_p(v.values.len(), v.p)?;
    let mut out = format!("p {} n {n}\n", v.p);
    write_entries(&mut out, &v.values);
    Ok(out)
}
