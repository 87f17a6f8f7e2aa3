//! Truncated Puiseux series with exact rational coefficients.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{den_u64, fmt_rat, is_zero, lcm_u64, parse_rat, Rat};
use crate::error::{Error, Result};

/// A truncated series `sum_i c_i q^{(offset_steps + i)/N}`.
///
/// Exponents below the offset are known to be zero; exponents above the last
/// stored coefficient are unknown, not zero. The lattice denominator `N` and
/// the offset are part of the value: two series only interact after being
/// rescaled to the least common lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuiseuxSeries {
    lattice_den: u64,
    offset_steps: i64,
    coeffs: Vec<Rat>,
}

/// Outcome of comparing two series on the overlap of their known ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesCmp {
    /// All known coefficients agree up to (and including) this exponent.
    Equal { through: Rat },
    /// First exponent at which the series differ.
    Differs { at: Rat },
}

impl PuiseuxSeries {
    /// Builds a series from raw parts. `coeffs[i]` is the coefficient of
    /// `q^{(offset_steps + i)/lattice_den}`.
    pub fn from_parts(lattice_den: u64, offset_steps: i64, coeffs: Vec<Rat>) -> Self {
        assert!(lattice_den >= 1, "lattice denominator must be positive");
        assert!(
            !coeffs.is_empty(),
            "a series stores at least one coefficient"
        );
        PuiseuxSeries {
            lattice_den,
            offset_steps,
            coeffs,
        }
    }

    /// The constant series 1, known through integer order `order`.
    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![Rat::new(); order + 1];
        coeffs[0] = Rat::from(1);
        PuiseuxSeries {
            lattice_den: 1,
            offset_steps: 0,
            coeffs,
        }
    }

    /// The zero series, known through integer order `order`.
    pub fn zero(order: usize) -> Self {
        PuiseuxSeries {
            lattice_den: 1,
            offset_steps: 0,
            coeffs: vec![Rat::new(); order + 1],
        }
    }

    /// `coeff * q^exponent`, known for `extra_orders` further integer orders.
    pub fn monomial(coeff: Rat, exponent: &Rat, extra_orders: usize) -> Self {
        let den = den_u64(exponent);
        let steps = exp_to_steps(exponent, den).expect("own denominator always divides");
        let mut coeffs = vec![Rat::new(); extra_orders * den as usize + 1];
        coeffs[0] = coeff;
        PuiseuxSeries {
            lattice_den: den,
            offset_steps: steps,
            coeffs,
        }
    }

    pub fn lattice_den(&self) -> u64 {
        self.lattice_den
    }

    /// Leading lattice exponent (coefficient there may be zero).
    pub fn offset(&self) -> Rat {
        Rat::from((self.offset_steps, self.lattice_den))
    }

    /// Number of stored lattice coefficients minus one.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Largest exponent whose coefficient is known.
    pub fn known_upper(&self) -> Rat {
        Rat::from((
            self.offset_steps + self.coeffs.len() as i64 - 1,
            self.lattice_den,
        ))
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// First nonzero term as `(exponent, coefficient)`, if any is known.
    pub fn leading(&self) -> Option<(Rat, &Rat)> {
        self.coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| !is_zero(c))
            .map(|(i, c)| {
                (
                    Rat::from((self.offset_steps + i as i64, self.lattice_den)),
                    c,
                )
            })
    }

    /// Coefficient of `q^exponent`: `None` beyond the known range, exact
    /// value otherwise (implicitly zero below the offset and off-lattice).
    pub fn coeff_at(&self, exponent: &Rat) -> Option<Rat> {
        if *exponent > self.known_upper() {
            return None;
        }
        match exp_to_steps(exponent, self.lattice_den) {
            None => Some(Rat::new()),
            Some(steps) => {
                let idx = steps - self.offset_steps;
                if idx < 0 {
                    Some(Rat::new())
                } else {
                    Some(self.coeffs[idx as usize].clone())
                }
            }
        }
    }

    /// Integer-order coefficient relative to the leading nonzero exponent:
    /// `bracket_coeff(n)` is the coefficient of `q^n` in the bracket of
    /// `q^lead (c_0 + c_1 q + ...)`. Handy for checking printed expansions.
    pub fn bracket_coeff(&self, n: u32) -> Option<Rat> {
        let (lead, _) = self.leading()?;
        let e = Rat::from(&lead + Rat::from(n));
        self.coeff_at(&e)
    }

    /// Rescales to a finer lattice whose denominator is `new_den`.
    pub fn rescaled(&self, new_den: u64) -> Self {
        assert!(
            new_den % self.lattice_den == 0,
            "can only rescale to a multiple"
        );
        let stride = (new_den / self.lattice_den) as usize;
        if stride == 1 {
            return self.clone();
        }
        let mut coeffs = vec![Rat::new(); (self.coeffs.len() - 1) * stride + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !is_zero(c) {
                coeffs[i * stride] = c.clone();
            }
        }
        PuiseuxSeries {
            lattice_den: new_den,
            offset_steps: self.offset_steps * stride as i64,
            coeffs,
        }
    }

    /// Drops leading zero coefficients (the known upper bound is preserved).
    pub fn normalized(&self) -> Self {
        let first = self
            .coeffs
            .iter()
            .position(|c| !is_zero(c))
            .unwrap_or(self.coeffs.len() - 1);
        if first == 0 {
            return self.clone();
        }
        PuiseuxSeries {
            lattice_den: self.lattice_den,
            offset_steps: self.offset_steps + first as i64,
            coeffs: self.coeffs[first..].to_vec(),
        }
    }

    /// Restricts the known range to exponents `<= upper`.
    pub fn truncated(&self, upper: &Rat) -> Self {
        let bound = Rat::from(upper * Rat::from(self.lattice_den));
        let max_steps = bound
            .floor()
            .numer()
            .to_i64()
            .expect("truncation bound overflow");
        let keep = (max_steps - self.offset_steps + 1).clamp(1, self.coeffs.len() as i64);
        PuiseuxSeries {
            lattice_den: self.lattice_den,
            offset_steps: self.offset_steps,
            coeffs: self.coeffs[..keep as usize].to_vec(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rat::from(-1))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let coeffs = self.coeffs.iter().map(|a| Rat::from(a * c)).collect();
        PuiseuxSeries {
            lattice_den: self.lattice_den,
            offset_steps: self.offset_steps,
            coeffs,
        }
    }

    /// Multiplies by `q^delta`.
    pub fn shift(&self, delta: &Rat) -> Self {
        let den = lcm_u64(self.lattice_den, den_u64(delta));
        let mut s = self.rescaled(den);
        s.offset_steps += exp_to_steps(delta, den).expect("lcm contains delta");
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, subtract: bool) -> Self {
        let den = lcm_u64(self.lattice_den, other.lattice_den);
        let a = self.rescaled(den);
        let b = other.rescaled(den);
        let known = (a.offset_steps + a.coeffs.len() as i64 - 1)
            .min(b.offset_steps + b.coeffs.len() as i64 - 1);
        let lo = a.offset_steps.min(b.offset_steps).min(known);
        let mut coeffs = vec![Rat::new(); (known - lo + 1) as usize];
        for (i, c) in a.coeffs.iter().enumerate() {
            let idx = a.offset_steps + i as i64 - lo;
            if (0..coeffs.len() as i64).contains(&idx) && !is_zero(c) {
                coeffs[idx as usize] += c;
            }
        }
        for (i, c) in b.coeffs.iter().enumerate() {
            let idx = b.offset_steps + i as i64 - lo;
            if (0..coeffs.len() as i64).contains(&idx) && !is_zero(c) {
                if subtract {
                    coeffs[idx as usize] -= c;
                } else {
                    coeffs[idx as usize] += c;
                }
            }
        }
        PuiseuxSeries {
            lattice_den: den,
            offset_steps: lo,
            coeffs,
        }
    }

    /// Exact product; the known bound is the minimum over cross-terms.
    pub fn mul(&self, other: &Self) -> Self {
        let den = lcm_u64(self.lattice_den, other.lattice_den);
        let a = self.rescaled(den);
        let b = other.rescaled(den);
        let lo = a.offset_steps + b.offset_steps;
        let len = a.coeffs.len().min(b.coeffs.len());
        let mut coeffs = vec![Rat::new(); len];
        let nz_a: Vec<(usize, &Rat)> = a
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !is_zero(c))
            .collect();
        let nz_b: Vec<(usize, &Rat)> = b
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !is_zero(c))
            .collect();
        for &(i, ca) in &nz_a {
            if i >= len {
                break;
            }
            for &(j, cb) in &nz_b {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] += Rat::from(ca * cb);
            }
        }
        PuiseuxSeries {
            lattice_den: den,
            offset_steps: lo,
            coeffs,
        }
    }

    /// Multiplicative inverse up to the same relative truncation.
    pub fn invert(&self) -> Result<Self> {
        let s = self.normalized();
        if is_zero(&s.coeffs[0]) {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let lead_inv = Rat::from(s.coeffs[0].clone().recip());
        let nz_tail: Vec<(usize, &Rat)> = s.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| (i + 1, c))
            .filter(|(_, c)| !is_zero(c))
            .collect();
        let mut inv: Vec<Rat> = Vec::with_capacity(s.coeffs.len());
        inv.push(lead_inv.clone());
        for n in 1..s.coeffs.len() {
            let mut acc = Rat::new();
            for &(i, c) in &nz_tail {
                if i > n {
                    break;
                }
                if !is_zero(&inv[n - i]) {
                    acc += Rat::from(c * &inv[n - i]);
                }
            }
            acc = -acc;
            inv.push(Rat::from(&acc * &lead_inv));
        }
        Ok(PuiseuxSeries {
            lattice_den: s.lattice_den,
            offset_steps: -s.offset_steps,
            coeffs: inv,
        })
    }

    /// Compares the known coefficients of `self` and `other` on the overlap
    /// of their known ranges. Errors when the overlap is empty.
    pub fn compare(&self, other: &Self) -> Result<SeriesCmp> {
        let den = lcm_u64(self.lattice_den, other.lattice_den);
        let a = self.rescaled(den);
        let b = other.rescaled(den);
        let known = (a.offset_steps + a.coeffs.len() as i64 - 1)
            .min(b.offset_steps + b.coeffs.len() as i64 - 1);
        let lo = a.offset_steps.min(b.offset_steps);
        if known < lo {
            // Both implicitly zero on the whole overlap; equal if nonempty,
            // which it always is (everything below both offsets is known).
            return Ok(SeriesCmp::Equal {
                through: Rat::from((known, den)),
            });
        }
        for step in lo..=known {
            let ca = a.step_coeff(step);
            let cb = b.step_coeff(step);
            let eq = match (ca, cb) {
                (Some(x), Some(y)) => x == y,
                (Some(x), None) => is_zero(x),
                (None, Some(y)) => is_zero(y),
                (None, None) => true,
            };
            if !eq {
                return Ok(SeriesCmp::Differs {
                    at: Rat::from((step, den)),
                });
            }
        }
        Ok(SeriesCmp::Equal {
            through: Rat::from((known, den)),
        })
    }

    /// True when the two series agree on their full common known range and
    /// that range reaches at least `min_upper`.
    pub fn agrees_through(&self, other: &Self, min_upper: &Rat) -> bool {
        match self.compare(other) {
            Ok(SeriesCmp::Equal { through }) => through >= *min_upper,
            _ => false,
        }
    }

    fn step_coeff(&self, step: i64) -> Option<&Rat> {
        let idx = step - self.offset_steps;
        if (0..self.coeffs.len() as i64).contains(&idx) {
            Some(&self.coeffs[idx as usize])
        } else {
            None
        }
    }

    /// Iterator over nonzero terms `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (Rat, &Rat)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !is_zero(c))
            .map(move |(i, c)| {
                (
                    Rat::from((self.offset_steps + i as i64, self.lattice_den)),
                    c,
                )
            })
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for (e, c) in self.terms() {
            writeln!(f, "q^{}: {}", e, c)?;
            any = true;
        }
        if !any {
            writeln!(f, "0 (known through q^{})", self.known_upper())?;
        }
        Ok(())
    }
}

fn exp_to_steps(e: &Rat, den: u64) -> Option<i64> {
    let scaled = Rat::from(e * Rat::from(den));
    if scaled.is_integer() {
        scaled.numer().to_i64()
    } else {
        None
    }
}

/// Wire format: rationals as strings `p/q` in lowest terms, bit-exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesJson {
    pub lattice_den: u64,
    pub offset: String,
    pub coeffs: Vec<String>,
    pub order: usize,
}

impl From<&PuiseuxSeries> for SeriesJson {
    fn from(s: &PuiseuxSeries) -> Self {
        SeriesJson {
            lattice_den: s.lattice_den,
            offset: fmt_rat(&s.offset()),
            coeffs: s.coeffs.iter().map(fmt_rat).collect(),
            order: s.order(),
        }
    }
}

impl TryFrom<&SeriesJson> for PuiseuxSeries {
    type Error = Error;

    fn try_from(j: &SeriesJson) -> Result<Self> {
        if j.lattice_den == 0 {
            return Err(Error::invalid("lattice_den must be positive"));
        }
        let offset = parse_rat(&j.offset)?;
        let steps = exp_to_steps(&offset, j.lattice_den).ok_or(Error::IncompatibleLattice {
            gap: fmt_rat(&offset),
            lattice_den: j.lattice_den,
        })?;
        if j.coeffs.is_empty() || j.coeffs.len() != j.order + 1 {
            return Err(Error::invalid("coeffs length must equal order + 1"));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(PuiseuxSeries::from_parts(j.lattice_den, steps, coeffs))
    }
}
