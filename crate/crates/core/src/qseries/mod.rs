//! Exact arithmetic for truncated one- and two-variable q-series.
//!
//! All coefficients are exact rationals ([`Rat`]); nothing in this module
//! rounds. A [`PuiseuxSeries`] lives on a shifted exponent lattice
//! `offset + (1/N)Z` and carries an explicit "known up to" bound that every
//! operation propagates pessimistically, so a comparison can never silently
//! succeed beyond what has actually been computed.

mod reconstruct;
mod series;
mod special;
mod twovar;

pub use reconstruct::rational_reconstruct;
pub use series::{PuiseuxSeries, SeriesCmp, SeriesJson};
pub use special::{dedekind_eta, pochhammer, theta_lattice};
pub use twovar::{TwoVarSeries, ZPoly};

use crate::error::{Error, Result};

/// Exact rational scalar; always in lowest terms with positive denominator.
pub type Rat = rug::Rational;

/// Convenience constructor used pervasively in tests and table code.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::from((num, den))
}

pub(crate) fn is_zero(r: &Rat) -> bool {
    r.cmp0() == std::cmp::Ordering::Equal
}

/// Parses a rational written as `p/q` or `p` (lowest terms not required).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    t.parse::<Rat>()
        .map_err(|e| Error::invalid(format!("bad rational {t:?}: {e}")))
}

/// Formats a rational as `p/q`, or `p` when the denominator is 1.
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

pub(crate) fn lcm_u64(a: u64, b: u64) -> u64 {
    let g = gcd_u64(a, b);
    a / g * b
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Denominator of `r` as `u64`; the lattices in this crate stay small.
pub(crate) fn den_u64(r: &Rat) -> u64 {
    r.denom()
        .to_u64()
        .expect("exponent lattice denominator overflows u64")
}
