//! Two-variable series in (q, z) with half-integer z-exponents.
//!
//! Every series here lives on an integer-step q-grid above a rational
//! offset, which is all the affine/u(1) character machinery needs. The
//! z-dependence of each q-coefficient is a finite Laurent polynomial with
//! exponents in (1/2)Z, stored with doubled integer keys.

use std::collections::BTreeMap;

use super::{den_u64, is_zero, PuiseuxSeries, Rat};
use crate::error::{Error, Result};

/// Laurent polynomial in `z` with exponents in `(1/2)Z`; the map key is
/// twice the exponent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZPoly(pub BTreeMap<i64, Rat>);

impl ZPoly {
    pub fn new() -> Self {
        ZPoly(BTreeMap::new())
    }

    pub fn term(key2: i64, coeff: Rat) -> Self {
        let mut m = BTreeMap::new();
        if !is_zero(&coeff) {
            m.insert(key2, coeff);
        }
        ZPoly(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, key2: i64) -> Rat {
        self.0.get(&key2).cloned().unwrap_or_default()
    }

    pub fn add_scaled(&mut self, other: &ZPoly, scale: &Rat) {
        if is_zero(scale) {
            return;
        }
        for (k, c) in &other.0 {
            let v = self.0.entry(*k).or_default();
            *v += Rat::from(c * scale);
            if is_zero(v) {
                self.0.remove(k);
            }
        }
    }

    pub fn add_term(&mut self, key2: i64, coeff: &Rat) {
        if is_zero(coeff) {
            return;
        }
        let v = self.0.entry(key2).or_default();
        *v += coeff;
        if is_zero(v) {
            self.0.remove(&key2);
        }
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        let mut out = ZPoly::new();
        for (ka, ca) in &self.0 {
            for (kb, cb) in &other.0 {
                out.add_term(ka + kb, &Rat::from(ca * cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> ZPoly {
        let mut out = ZPoly::new();
        for (k, v) in &self.0 {
            out.add_term(*k, &Rat::from(v * c));
        }
        out
    }

    /// Substitution z -> 1/z.
    pub fn flipped(&self) -> ZPoly {
        ZPoly(self.0.iter().map(|(k, c)| (-k, c.clone())).collect())
    }

    /// Sum of all coefficients (the z -> 1 specialisation).
    pub fn eval_one(&self) -> Rat {
        let mut acc = Rat::new();
        for c in self.0.values() {
            acc += c;
        }
        acc
    }

    /// Exact division by `z^{1/2} - z^{-1/2}`; `None` if not divisible.
    fn div_antisym(&self) -> Option<ZPoly> {
        let mut rem = self.clone();
        let mut quot = ZPoly::new();
        let mut guard = 0usize;
        let max_iter = rem.0.len() + span(&rem.0) as usize + 8;
        while let Some((&top, coeff)) = rem.0.iter().next_back() {
            let c = coeff.clone();
            // c * z^{(top-1)/2} * (z^{1/2} - z^{-1/2}) has keys top, top-2.
            quot.add_term(top - 1, &c);
            rem.add_term(top, &Rat::from(-c.clone()));
            rem.add_term(top - 2, &c);
            guard += 1;
            if guard > max_iter {
                return None;
            }
        }
        Some(quot)
    }
}

fn span(m: &BTreeMap<i64, Rat>) -> i64 {
    match (m.keys().next(), m.keys().next_back()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0,
    }
}

/// Series `sum_i coeffs[i](z) q^{offset + i}`; exponents above
/// `offset + len - 1` are unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoVarSeries {
    offset: Rat,
    coeffs: Vec<ZPoly>,
}

impl TwoVarSeries {
    pub fn from_parts(offset: Rat, coeffs: Vec<ZPoly>) -> Self {
        assert!(!coeffs.is_empty());
        TwoVarSeries { offset, coeffs }
    }

    pub fn offset(&self) -> &Rat {
        &self.offset
    }

    pub fn orders(&self) -> usize {
        self.coeffs.len()
    }

    pub fn q_coeff(&self, i: usize) -> &ZPoly {
        &self.coeffs[i]
    }

    pub fn known_upper(&self) -> Rat {
        Rat::from(&self.offset + Rat::from(self.coeffs.len() as u64 - 1))
    }

    /// q-exponent gap `other.offset - self.offset`, required integral.
    fn integer_gap(&self, other: &Self) -> Option<i64> {
        let gap = Rat::from(&other.offset - &self.offset);
        if gap.is_integer() {
            gap.numer().to_i64()
        } else {
            None
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let gap = self
            .integer_gap(other)
            .ok_or_else(|| Error::IncompatibleLattice {
                gap: Rat::from(&other.offset - &self.offset).to_string(),
                lattice_den: 1,
            })?;
        let lo_shift = gap.min(0);
        let offset = Rat::from(&self.offset + Rat::from(lo_shift));
        let known = (self.coeffs.len() as i64 - 1).min(gap + other.coeffs.len() as i64 - 1);
        let len = (known - lo_shift + 1).max(1) as usize;
        let mut coeffs = vec![ZPoly::new(); len];
        let one = Rat::from(1);
        let minus_one = Rat::from(-1);
        for (i, c) in self.coeffs.iter().enumerate() {
            let idx = i as i64 - lo_shift;
            if (0..len as i64).contains(&idx) {
                coeffs[idx as usize].add_scaled(c, &one);
            }
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            let idx = i as i64 + gap - lo_shift;
            if (0..len as i64).contains(&idx) {
                coeffs[idx as usize].add_scaled(c, &minus_one);
            }
        }
        Ok(TwoVarSeries { offset, coeffs })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let negated = TwoVarSeries {
            offset: other.offset.clone(),
            coeffs: other
                .coeffs
                .iter()
                .map(|p| p.scale(&Rat::from(-1)))
                .collect(),
        };
        self.sub(&negated)
    }

    /// Product with a pure q-series supported on integer steps.
    pub fn mul_one_var(&self, s: &PuiseuxSeries) -> Result<Self> {
        let (s_offset, s_coeffs) = integer_step_view(s)?;
        let offset = Rat::from(&self.offset + &s_offset);
        let len = self.coeffs.len().min(s_coeffs.len());
        let mut coeffs = vec![ZPoly::new(); len];
        for (j, c) in s_coeffs.iter().enumerate() {
            if is_zero(c) || j >= len {
                continue;
            }
            for (i, p) in self.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j].add_scaled(p, c);
            }
        }
        Ok(TwoVarSeries { offset, coeffs })
    }

    pub fn mul(&self, other: &Self) -> Self {
        let offset = Rat::from(&self.offset + &other.offset);
        let len = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![ZPoly::new(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    let prod = a.mul(b);
                    coeffs[i + j].add_scaled(&prod, &Rat::from(1));
                }
            }
        }
        TwoVarSeries { offset, coeffs }
    }

    /// Coefficient of `z^{key2/2}` as a pure q-series on the lattice of the
    /// q-offset.
    pub fn z_slice(&self, key2: i64) -> PuiseuxSeries {
        let den = den_u64(&self.offset);
        let offset_steps = Rat::from(&self.offset * Rat::from(den))
            .numer()
            .to_i64()
            .expect("two-variable offset overflow");
        let len = (self.coeffs.len() - 1) * den as usize + 1;
        let mut coeffs = vec![Rat::new(); len];
        for (i, p) in self.coeffs.iter().enumerate() {
            let c = p.coeff(key2);
            if !is_zero(&c) {
                coeffs[i * den as usize] = c;
            }
        }
        PuiseuxSeries::from_parts(den, offset_steps, coeffs)
    }

    /// Specialisation z -> 1.
    pub fn eval_z_one(&self) -> PuiseuxSeries {
        let den = den_u64(&self.offset);
        let offset_steps = Rat::from(&self.offset * Rat::from(den))
            .numer()
            .to_i64()
            .expect("two-variable offset overflow");
        let len = (self.coeffs.len() - 1) * den as usize + 1;
        let mut coeffs = vec![Rat::new(); len];
        for (i, p) in self.coeffs.iter().enumerate() {
            coeffs[i * den as usize] = p.eval_one();
        }
        PuiseuxSeries::from_parts(den, offset_steps, coeffs)
    }

    /// Substitution z -> 1/z applied to every q-order.
    pub fn z_flipped(&self) -> Self {
        TwoVarSeries {
            offset: self.offset.clone(),
            coeffs: self.coeffs.iter().map(ZPoly::flipped).collect(),
        }
    }

    /// Order-by-order long division of `self` by `den`, whose leading
    /// q-coefficient must be exactly `z^{1/2} - z^{-1/2}`. The division is
    /// exact by construction of the character quotients; a nonexact step
    /// reports an error rather than returning wrong coefficients.
    pub fn div_by_antisym_leading(&self, den: &Self) -> Result<Self> {
        let d0 = &den.coeffs[0];
        let expected: Vec<(i64, Rat)> = vec![(-1, Rat::from(-1)), (1, Rat::from(1))];
        let got: Vec<(i64, Rat)> = d0.0.iter().map(|(k, c)| (*k, c.clone())).collect();
        if got != expected {
            return Err(Error::invalid(
                "divisor leading q-coefficient must be z^{1/2} - z^{-1/2}",
            ));
        }
        let offset = Rat::from(&self.offset - &den.offset);
        let len = self.coeffs.len().min(den.coeffs.len());
        let mut out: Vec<ZPoly> = Vec::with_capacity(len);
        for e in 0..len {
            let mut rem = self.coeffs[e].clone();
            for (i, q) in out.iter().enumerate() {
                let d = &den.coeffs[e - i];
                if !q.is_zero() && !d.is_zero() {
                    let prod = q.mul(d);
                    rem.add_scaled(&prod, &Rat::from(-1));
                }
            }
            let quot = rem
                .div_antisym()
                .ok_or(Error::NonexactDivision { order: e })?;
            out.push(quot);
        }
        Ok(TwoVarSeries {
            offset,
            coeffs: out,
        })
    }
}

/// Reads a Puiseux series as `(offset, integer-step coefficients)`; errors
/// when its support does not lie on integer steps above the offset.
pub(crate) fn integer_step_view(s: &PuiseuxSeries) -> Result<(Rat, Vec<Rat>)> {
    let s = s.normalized();
    let den = s.lattice_den() as usize;
    let offset = s.offset();
    let coeffs = s.coeffs();
    let orders = (coeffs.len() - 1) / den;
    let mut out = vec![Rat::new(); orders + 1];
    for (i, c) in coeffs.iter().enumerate() {
        if is_zero(c) {
            continue;
        }
        if i % den != 0 {
            return Err(Error::invalid("series support is not on integer steps"));
        }
        out[i / den] = c.clone();
    }
    Ok((offset, out))
}
