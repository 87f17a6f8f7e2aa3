//! Exact character series: (p,2) minimal models, affine su(2) at level k,
//! u(1) characters, coset characters extracted from the decomposition of
//! affine characters, and the predicted target combinations the search
//! matches against.
//!
//! Everything is built from theta-style lattice sums and eta quotients so
//! that only `qseries` primitives are involved; the decomposition identity
//! then doubles as an independent correctness oracle for the whole module
//! (see the recomposition tests).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::qseries::{dedekind_eta, rat, PuiseuxSeries, Rat, TwoVarSeries, ZPoly};

/// Label of a single character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CharacterLabel {
    /// `chi_{1,s}` of the (p,2) minimal model, p odd >= 5, 1 <= s <= (p-1)/2.
    Minimal { p: u32, s: u32 },
    /// Affine su(2) level-k character, 0 <= l <= k.
    Affine { k: u32, l: u32 },
    /// u(1) level-k character `K_m`, -k+1 <= m <= k.
    U1 { k: u32, m: i64 },
    /// Coset su(2)_k / u(1) character, l + m even.
    Coset { k: u32, l: u32, m: i64 },
}

impl CharacterLabel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CharacterLabel::Minimal { p, s } => {
                if p < 5 || p % 2 == 0 {
                    return Err(Error::LabelOutOfRange(format!("minimal model p = {p}")));
                }
                if s < 1 || s > (p - 1) / 2 {
                    return Err(Error::LabelOutOfRange(format!(
                        "minimal model s = {s} for p = {p}"
                    )));
                }
            }
            CharacterLabel::Affine { k, l } => {
                if k < 1 || l > k {
                    return Err(Error::LabelOutOfRange(format!("affine k = {k}, l = {l}")));
                }
            }
            CharacterLabel::U1 { k, m } => {
                if k < 1 || m <= -(k as i64) || m > k as i64 {
                    return Err(Error::LabelOutOfRange(format!("u1 k = {k}, m = {m}")));
                }
            }
            CharacterLabel::Coset { k, l, m } => {
                if k < 1 || l > k || m <= -(k as i64) || m > k as i64 {
                    return Err(Error::LabelOutOfRange(format!(
                        "coset k = {k}, l = {l}, m = {m}"
                    )));
                }
                if (l as i64 + m).rem_euclid(2) != 0 {
                    return Err(Error::ParityViolation { l, m });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for CharacterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CharacterLabel::Minimal { p, s } => write!(f, "minimal:p={p},s={s}"),
            CharacterLabel::Affine { k, l } => write!(f, "affine:k={k},l={l}"),
            CharacterLabel::U1 { k, m } => write!(f, "u1:k={k},m={m}"),
            CharacterLabel::Coset { k, l, m } => write!(f, "coset:k={k},l={l},m={m}"),
        }
    }
}

/// A multiset of character labels with multiplicities; the right-hand sides
/// the search matches `f_{A,B,C}` against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetCombination {
    pub terms: Vec<(CharacterLabel, u32)>,
    pub name: String,
}

impl TargetCombination {
    pub fn new(terms: Vec<(CharacterLabel, u32)>) -> Self {
        let name = terms
            .iter()
            .map(|(label, mult)| {
                if *mult == 1 {
                    label.to_string()
                } else {
                    format!("{mult}*{label}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ");
        TargetCombination { terms, name }
    }
}

/// Two-variable theta sum `Theta_{m,level}(q, z)`: terms
/// `q^{level n^2 + m n + m^2/(4 level)} z^{(2 level n + m)/2}` over n in Z,
/// kept through `orders` integer q-steps above the offset `m^2/(4 level)`.
fn theta_two_var(m: i64, level: u32, orders: usize) -> TwoVarSeries {
    let level_i = level as i64;
    let offset = rat(m * m, 4 * level_i);
    let mut coeffs = vec![ZPoly::new(); orders + 1];
    for dir in [0i64, 1] {
        let mut n = dir;
        loop {
            let step = level_i * n * n + m * n;
            if !(0..=orders as i64).contains(&step) {
                // Steps are monotone in |n| once past the vertex; going
                // outward from n = 0 the first out-of-range step ends the
                // scan in that direction unless the vertex is still ahead.
                if (dir == 1 && 2 * level_i * n + m > 0) || (dir == 0 && 2 * level_i * n + m < 0) {
                    break;
                }
            } else {
                coeffs[step as usize].add_term(2 * level_i * n + m, &Rat::from(1));
            }
            n += if dir == 0 { -1 } else { 1 };
        }
    }
    TwoVarSeries::from_parts(offset, coeffs)
}

/// Affine su(2) level-k character as a quotient of theta sums, computed by
/// exact order-by-order division in q.
pub fn affine_su2_character(k: u32, l: u32, orders: usize) -> Result<TwoVarSeries> {
    CharacterLabel::Affine { k, l }.validate()?;
    let num = theta_two_var(l as i64 + 1, k + 2, orders).sub(&theta_two_var(
        -(l as i64) - 1,
        k + 2,
        orders,
    ))?;
    let den = theta_two_var(1, 2, orders).sub(&theta_two_var(-1, 2, orders))?;
    num.div_by_antisym_leading(&den)
}

/// u(1) character `K_m = Theta_{m,k}(q,z) / eta(q)`.
pub fn u1_character(k: u32, m: i64, orders: usize) -> Result<TwoVarSeries> {
    CharacterLabel::U1 { k, m }.validate()?;
    let theta = theta_two_var(m, k, orders);
    let eta_inv = dedekind_eta(orders).invert()?;
    theta.mul_one_var(&eta_inv)
}

/// Coset character `chi_{l;m}(q) = eta(q) q^{-m^2/(4k)} [z^{m/2}] chi_l^{(k)}`.
///
/// The extraction is valid because distinct `m` occupy disjoint z-power
/// classes in the decomposition and the single power `z^{m/2}` of `K_m`
/// receives only its leading theta term.
pub fn coset_character(k: u32, l: u32, m: i64, orders: usize) -> Result<PuiseuxSeries> {
    CharacterLabel::Coset { k, l, m }.validate()?;
    let mut margin = orders + 2;
    loop {
        let chi = affine_su2_character(k, l, margin)?;
        let slice = chi.z_slice(m).normalized();
        let eta = dedekind_eta(margin);
        let shift = rat(-m * m, 4 * k as i64);
        let series = eta.mul(&slice).shift(&shift).normalized();
        if let Some((lead, _)) = series.leading() {
            let have = Rat::from(&series.known_upper() - &lead);
            if have >= rat(orders as i64, 1) {
                let cap = Rat::from(&lead + rat(orders as i64, 1));
                return Ok(series.truncated(&cap));
            }
        }
        margin = margin * 2 + 4;
        if margin > 16 * (orders + 4) {
            return Err(Error::invalid(format!(
                "coset character k={k}, l={l}, m={m} has no support within the computed range"
            )));
        }
    }
}

/// Canonical representative of a coset label under field identification
/// `(l, m) -> (k - l, m - k)` and the reflection `m -> -m`, with `m`
/// normalised to `(-k, k]`. Preference order: smaller `l`, then `m >= 0`,
/// then smaller `|m|`.
pub fn coset_canonical(k: u32, l: u32, m: i64) -> (u32, i64) {
    let kk = k as i64;
    let norm = |m: i64| -> i64 {
        let mut v = m.rem_euclid(2 * kk);
        if v > kk {
            v -= 2 * kk;
        }
        v
    };
    let mut orbit = vec![(l, norm(m))];
    // Closure under the two label symmetries.
    for _ in 0..2 {
        let mut extra = Vec::new();
        for &(l0, m0) in &orbit {
            extra.push((l0, norm(-m0)));
            extra.push((k - l0, norm(m0 - kk)));
        }
        for e in extra {
            if !orbit.contains(&e) {
                orbit.push(e);
            }
        }
    }
    orbit
        .into_iter()
        .min_by_key(|&(l0, m0)| (l0, m0 < 0, m0.abs()))
        .expect("orbit nonempty")
}

/// Character of the (p,2) minimal model, `chi_{1,s}` with p = 2n+3:
/// an alternating theta sum divided by eta.
pub fn minimal_character(p: u32, s: u32, orders: usize) -> Result<PuiseuxSeries> {
    CharacterLabel::Minimal { p, s }.validate()?;
    let pp = p as i64;
    let ss = s as i64;
    let margin = orders + 2;
    // Alternating theta sum: sum_j q^{(4pj + p - 2s)^2/(8p)} - (s -> -s),
    // assembled directly on the 8p lattice. The exponent for shift t sits
    // at integer steps 2 p j^2 + t j above t^2/(8p).
    let base = rat((pp - 2 * ss) * (pp - 2 * ss), 8 * pp);
    let bound = Rat::from(&base + rat(margin as i64, 1));
    let mut terms: Vec<(Rat, i64)> = Vec::new();
    for (shift, sign) in [(pp - 2 * ss, 1i64), (pp + 2 * ss, -1)] {
        for dir in [0i64, 1] {
            let mut j = dir;
            loop {
                let arg = 4 * pp * j + shift;
                let e = rat(arg * arg, 8 * pp);
                if e > bound {
                    // Exponents are monotone in |arg|; once past the vertex
                    // every further j in this direction is out of range.
                    if (dir == 1 && arg > 0) || (dir == 0 && arg < 0) {
                        break;
                    }
                } else {
                    terms.push((e.clone(), sign));
                }
                j += if dir == 0 { -1 } else { 1 };
            }
        }
    }
    let mut den = crate::qseries::den_u64(&base);
    for (e, _) in &terms {
        den = crate::qseries::lcm_u64(den, crate::qseries::den_u64(e));
    }
    let steps = |e: &Rat| -> i64 {
        Rat::from(e * Rat::from(den))
            .numer()
            .to_i64()
            .expect("lattice step overflow")
    };
    let base_steps = steps(&base);
    let len = margin * den as usize + 1;
    let mut coeffs = vec![Rat::new(); len];
    for (e, sign) in &terms {
        let idx = steps(e) - base_steps;
        if (0..len as i64).contains(&idx) {
            coeffs[idx as usize] += Rat::from(*sign);
        }
    }
    let numerator = PuiseuxSeries::from_parts(den, base_steps, coeffs);
    let eta_inv = dedekind_eta(margin).invert()?;
    let series = numerator.mul(&eta_inv).normalized();
    let (lead, _) = series.leading().ok_or_else(|| {
        Error::invalid(format!(
            "minimal character p={p}, s={s} vanished identically"
        ))
    })?;
    let cap = Rat::from(&lead + rat(orders as i64, 1));
    Ok(series.truncated(&cap))
}

/// Series of one character label.
pub fn character_series(label: &CharacterLabel, orders: usize) -> Result<PuiseuxSeries> {
    label.validate()?;
    match *label {
        CharacterLabel::Minimal { p, s } => minimal_character(p, s, orders),
        CharacterLabel::Coset { k, l, m } => coset_character(k, l, m, orders),
        CharacterLabel::Affine { k, l } => Ok(affine_su2_character(k, l, orders)?.eval_z_one()),
        CharacterLabel::U1 { k, m } => Ok(u1_character(k, m, orders)?.eval_z_one()),
    }
}

/// Sum of the combination's character series on a common lattice.
pub fn combination_series(t: &TargetCombination, orders: usize) -> Result<PuiseuxSeries> {
    let mut acc: Option<PuiseuxSeries> = None;
    for (label, mult) in &t.terms {
        let s = character_series(label, orders)?.scale(&Rat::from(*mult));
        acc = Some(match acc {
            None => s,
            Some(a) => a.add(&s),
        });
    }
    acc.ok_or_else(|| Error::invalid("empty target combination"))
}

/// The combinations predicted by the affine-character decomposition for the
/// level-k coset: for each l the sum over the m-parity class after field
/// identification, plus (for even k) the same combination divided by its
/// common integer multiplicity when one exists.
pub fn predicted_combinations(k: u32) -> Vec<TargetCombination> {
    assert!(k >= 1);
    let l_top = if k % 2 == 0 { k / 2 } else { (k + 1) / 2 };
    let mut seen: Vec<Vec<(CharacterLabel, u32)>> = Vec::new();
    let mut out = Vec::new();
    for l in 0..=l_top {
        let mut counts: BTreeMap<(u32, i64), u32> = BTreeMap::new();
        let mut m = -(k as i64) + 1;
        while m <= k as i64 {
            if (l as i64 + m).rem_euclid(2) == 0 {
                *counts.entry(coset_canonical(k, l, m)).or_default() += 1;
            }
            m += 1;
        }
        let terms: Vec<(CharacterLabel, u32)> = counts
            .iter()
            .map(|(&(lc, mc), &mult)| (CharacterLabel::Coset { k, l: lc, m: mc }, mult))
            .collect();
        if seen.contains(&terms) {
            continue;
        }
        seen.push(terms.clone());
        out.push(TargetCombination::new(terms.clone()));

        if k % 2 == 0 {
            let gcd = terms.iter().fold(0u32, |g, (_, m)| gcd_u32(g, *m));
            // Dividdng out the common multiplicity yields a new candidate
            // combination; a lone bare character (as the halving at k = 2
            // would produce) is not a combination of this family.
            if gcd >= 2 && terms.len() >= 2 {
                let halved: Vec<(CharacterLabel, u32)> =
                    terms.iter().map(|(lab, m)| (*lab, m / gcd)).collect();
                if !seen.contains(&halved) {
                    seen.push(halved.clone());
                    out.push(TargetCombination::new(halved));
                }
            }
        }
    }
    out
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if a == 0 {
        b
    } else {
        gcd_u32(b % a, a)
    }
}

/// The n+1 single-character targets of the (2n+3, 2) minimal model.
pub fn minimal_targets(n: u32) -> Vec<TargetCombination> {
    assert!(n >= 1);
    let p = 2 * n + 3;
    (1..=n + 1)
        .map(|s| TargetCombination::new(vec![(CharacterLabel::Minimal { p, s }, 1)]))
        .collect()
}
