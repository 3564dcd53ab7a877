//! Command-line literals: complex numbers, points and parameter ranges.

use unistab_core::lie::{CVector, C64};
use unistab_core::{Error, ProjectivePoint, Result};

/// Parses `1`, `-0.5`, `2i`, `-i`, `1+2i`, `1.5e-3-2i`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid complex literal '{s}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(k, ch)| (ch == '+' || ch == '-') && !matches!(body.as_bytes()[k - 1], b'e' | b'E'))
        .map(|(k, _)| k)
        .last();
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().map_err(|_| bad())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(C64::new(re, im))
}

/// Comma-separated complex coordinates.
pub fn parse_vector(s: &str) -> Result<CVector> {
    let v = s.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(v))
}

pub fn parse_point(s: &str) -> Result<ProjectivePoint> {
    ProjectivePoint::new(parse_vector(s)?)
}

/// Semicolon-separated slots of a point of `Y`.
pub fn parse_slots(s: &str) -> Result<Vec<CVector>> {
    s.split(';').map(parse_vector).collect()
}

/// `name=a:b:n` (n evenly spaced values), `name=v1,v2,...` or `name=v`.
pub fn parse_param(s: &str) -> Result<(String, Vec<f64>)> {
    let bad = |why: &str| Error::Parse(format!("invalid parameter '{s}': {why}"));
    let (name, rhs) = s.split_once('=').ok_or_else(|| bad("expected name=values"))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(bad("empty name"));
    }
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let values = if let Some((a, rest)) = rhs.split_once(':') {
        let (b, n) = rest.split_once(':').ok_or_else(|| bad("range needs a:b:n"))?;
        let (a, b) = (num(a)?, num(b)?);
        let n: usize = n.trim().parse().map_err(|_| bad("count is not an integer"))?;
        match n {
            0 => return Err(bad("count must be positive")),
            1 => vec![a],
            _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
        }
    } else {
        rhs.split(',').map(num).collect::<Result<_>>()?
    };
    Ok((name.to_string(), values))
}
