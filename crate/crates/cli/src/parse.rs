//! Flag parsing helpers for rational-valued inputs.

use nahm_core::error::Error;
use nahm_core::liealg::MatrixQ;
use nahm_core::qseries::{parse_rat, Rat};

/// Matrix written as nested lists of rationals: `[[3/2,1],[1,2]]`.
pub fn parse_matrix(text: &str) -> Result<MatrixQ, Error> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = t
        .strip_prefix("[[")
        .and_then(|s| s.strip_suffix("]]"))
        .ok_or_else(|| Error::invalid(format!("matrix must look like [[..],[..]]: {text:?}")))?;
    let rows = inner
        .split("],[")
        .map(|row| {
            row.split(',')
                .map(parse_rat)
                .collect::<Result<Vec<Rat>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    MatrixQ::from_rows(rows)
}

/// Comma-separated rational vector: `-1/2,-1,-1/2`.
pub fn parse_vector(text: &str) -> Result<Vec<Rat>, Error> {
    text.split(',').map(|s| parse_rat(s.trim())).collect()
}

/// Closed interval `lo:hi`.
pub fn parse_range(text: &str) -> Result<(Rat, Rat), Error> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("range must look like lo:hi, got {text:?}")))?;
    let lo = parse_rat(lo)?;
    let hi = parse_rat(hi)?;
    if lo > hi {
        return Err(Error::invalid(format!("empty range {text:?}")));
    }
    Ok((lo, hi))
}

/// Comma-separated positive denominators: `1,2,4`.
pub fn parse_denoms(text: &str) -> Result<Vec<u32>, Error> {
    let out = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|e| Error::invalid(format!("bad denominator {s:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() || out.contains(&0) {
        return Err(Error::invalid("denominators must be positive"));
    }
    Ok(out)
}
