//! Text cache for coefficient tables.
//!
//! ```text
//! cuspsum-coeffs v1 weight=12 n_max=3
//! 1,1,0x1p+0
//! 2,-24,-0x1.0f876ccdf6cd9p-1
//! 3,252,0x1.328d364958a57p-1
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_bigint::BigInt;

use super::{validate_table, CoefficientTable, Source, ValidationReport};
use crate::error::{Error, Result};
use crate::hexfloat::{format_hex, parse_hex};

pub const CACHE_MAGIC: &str = "cuspsum-coeffs v1";

pub fn write_cache<W: Write>(t: &CoefficientTable, mut w: W) -> Result<()> {
    writeln!(w, "{CACHE_MAGIC} weight={} n_max={}", t.weight(), t.n_max())?;
    for n in 1..=t.n_max() {
        writeln!(w, "{n},{},{}", t.tau(n), format_hex(t.a(n)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_cache(t: &CoefficientTable, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    write_cache(t, BufWriter::new(file))
}

fn cache_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Cache {
        line,
        reason: reason.into(),
    }
}

fn header_field<'a>(header: &'a str, key: &str) -> Option<&'a str> {
    header
        .split_whitespace()
        .find_map(|f| f.strip_prefix(key)?.strip_prefix('='))
}

/// Parses a cache and audits it. Normalization or Deligne failures reject the
/// table; eigenform relation failures come back as warnings in the report.
pub fn read_cache<R: Read>(r: R) -> Result<(CoefficientTable, ValidationReport)> {
    let mut lines = BufReader::new(r).lines();
    let header = lines
        .next()
        .ok_or_else(|| cache_err(1, "empty file"))??;
    if !header.starts_with(CACHE_MAGIC) {
        return Err(cache_err(1, format!("expected header `{CACHE_MAGIC} ...`")));
    }
    let weight: u32 = header_field(&header, "weight")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| cache_err(1, "missing or bad weight"))?;
    let n_max: usize = header_field(&header, "n_max")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| cache_err(1, "missing or bad n_max"))?;

    let mut tau = Vec::with_capacity(n_max);
    let mut a = Vec::with_capacity(n_max);
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lineno = i + 2;
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(n), Some(t), Some(x), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(cache_err(lineno, "expected `n,tau,a`"));
        };
        let n: usize = n.parse().map_err(|_| cache_err(lineno, "bad index"))?;
        if n != tau.len() + 1 {
            return Err(cache_err(lineno, format!("expected index {}, found {n}", tau.len() + 1)));
        }
        tau.push(
            t.parse::<BigInt>()
                .map_err(|_| cache_err(lineno, "bad integer coefficient"))?,
        );
        a.push(parse_hex(x).ok_or_else(|| cache_err(lineno, "bad hexadecimal float"))?);
    }
    if tau.len() != n_max {
        return Err(cache_err(0, format!("header says n_max={n_max}, found {} rows", tau.len())));
    }

    let table = CoefficientTable::from_parts(weight, tau, a, Source::Loaded)?;
    let report = validate_table(&table);
    if let Some(v) = report.errors_for_loaded().next() {
        return Err(Error::Rejected(format!("{v:?}")));
    }
    Ok((table, report))
}

pub fn load_cache(path: &Path) -> Result<(CoefficientTable, ValidationReport)> {
    read_cache(File::open(path)?)
}
