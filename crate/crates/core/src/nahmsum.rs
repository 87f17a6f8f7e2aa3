//! Exact evaluation of the Nahm sum
//! `f_{A,B,C}(q) = sum_{n >= 0} q^{n^t A n / 2 + B^t n + C} / ((q)_{n_1} ... (q)_{n_r})`
//! as a truncated Puiseux series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{MatrixJson, MatrixQ};
use crate::qseries::{fmt_rat, is_zero, lcm_u64, parse_rat, pochhammer, PuiseuxSeries, Rat};

/// The triple `(A, B, C)` the whole search is about. `A` must be symmetric
/// positive definite so that the lattice enumeration terminates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NahmDatum {
    a: MatrixQ,
    b: Vec<Rat>,
    c: Rat,
}

impl NahmDatum {
    pub fn new(a: MatrixQ, b: Vec<Rat>, c: Rat) -> Result<Self> {
        if !a.is_square() || a.rows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{} but B has length {}",
                a.rows(),
                a.cols(),
                b.len()
            )));
        }
        if !a.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(NahmDatum { a, b, c })
    }

    pub fn rank(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &MatrixQ {
        &self.a
    }

    pub fn b(&self) -> &[Rat] {
        &self.b
    }

    pub fn c(&self) -> &Rat {
        &self.c
    }

    /// Exponent `n^t A n / 2 + B^t n + C` of the leading term at `n`.
    pub fn exponent(&self, n: &[i64]) -> Rat {
        let r = self.rank();
        let mut acc = self.c.clone();
        for i in 0..r {
            if n[i] == 0 {
                continue;
            }
            acc += Rat::from(&self.b[i] * Rat::from(n[i]));
            for j in 0..r {
                if n[j] != 0 {
                    let quad = Rat::from(self.a.get(i, j) * Rat::from(n[i] * n[j]));
                    acc += Rat::from(quad / Rat::from(2));
                }
            }
        }
        acc
    }
}

/// Every lattice point with exponent at most `bound`.
///
/// A float lower bound on the smallest eigenvalue of `A` only sizes the
/// search box; membership is decided by the exact rational exponent.
fn enumerate_points(d: &NahmDatum, bound: &Rat) -> Vec<Vec<i64>> {
    let r = d.rank();
    let lambda = min_eigenvalue_lower_bound(d.a()) * 0.9;
    let b_norm = d.b().iter().map(|b| b.to_f64().powi(2)).sum::<f64>().sqrt();
    let excess = (Rat::from(bound - d.c())).to_f64().max(0.0);
    let radius = (b_norm + (b_norm * b_norm + 2.0 * lambda * excess).sqrt()) / lambda;
    let max_coord = (radius * 1.05).ceil() as i64 + 2;

    let mut out = Vec::new();
    let mut point = vec![0i64; r];
    enumerate_rec(d, bound, max_coord, 0, &mut point, &mut out);
    out
}

fn enumerate_rec(
    d: &NahmDatum,
    bound: &Rat,
    max_coord: i64,
    depth: usize,
    point: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    let r = d.rank();
    if depth == r - 1 {
        // Innermost coordinate: the exponent is a positive quadratic, so
        // once past its vertex and above the bound we can stop.
        let mut rising = false;
        let mut prev: Option<Rat> = None;
        for v in 0..=max_coord {
            point[depth] = v;
            let e = d.exponent(point);
            if e <= *bound {
                out.push(point.clone());
            } else if rising {
                break;
            }
            if let Some(p) = &prev {
                if e > *p {
                    rising = true;
                }
            }
            prev = Some(e);
        }
        point[depth] = 0;
        return;
    }
    for v in 0..=max_coord {
        point[depth] = v;
        enumerate_rec(d, bound, max_coord, depth + 1, point, out);
    }
    point[depth] = 0;
}

/// Lower bound for the smallest eigenvalue of a symmetric positive-definite
/// rational matrix, via shifted power iteration in f64.
fn min_eigenvalue_lower_bound(a: &MatrixQ) -> f64 {
    let m = a.to_f64();
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let lambda_max = power_iteration(&|v: &[f64]| matvec(&m, v), n);
    // Largest eigenvalue of (lambda_max I - A) is lambda_max - lambda_min.
    let shifted = power_iteration(
        &|v: &[f64]| {
            let av = matvec(&m, v);
            v.iter()
                .zip(av)
                .map(|(x, ax)| lambda_max * x - ax)
                .collect()
        },
        n,
    );
    (lambda_max - shifted).max(1e-9)
}

fn matvec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
        .collect()
}

fn power_iteration(op: &dyn Fn(&[f64]) -> Vec<f64>, n: usize) -> f64 {
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.3 * (i as f64 + 1.0).sin()).collect();
    let mut eig = 0.0;
    for _ in 0..200 {
        let w = op(&v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        eig = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>()
            / v.iter().map(|x| x * x).sum::<f64>();
        v = w.into_iter().map(|x| x / norm).collect();
    }
    eig.abs()
}

/// Exact truncation of `f_{A,B,C}` known through `order` integer orders
/// above its leading exponent.
pub fn nahm_sum(d: &NahmDatum, order: u32) -> Result<PuiseuxSeries> {
    // Phase 1: locate the discrete minimum of the exponent (n = 0 attains C,
    // so the search region `exponent <= C` is nonempty and contains it).
    let seed = enumerate_points(d, d.c());
    let min_exp = seed
        .iter()
        .map(|n| d.exponent(n))
        .min()
        .expect("n = 0 always enumerated");

    // Phase 2: everything contributing at or below min_exp + order.
    let bound = Rat::from(&min_exp + Rat::from(order));
    let points = enumerate_points(d, &bound);

    // Pochhammer inverses as integer series, shared across lattice points.
    let max_n = points
        .iter()
        .flat_map(|p| p.iter().copied())
        .max()
        .unwrap_or(0) as u32;
    let poch_len = order as usize + 1;
    let inv_poch: Vec<Vec<Rat>> = (0..=max_n)
        .map(|n| {
            let p = pochhammer(n, poch_len - 1).truncated(&Rat::from(poch_len as u64 - 1));
            p.invert()
                .expect("(q)_n has leading coefficient 1")
                .coeffs()
                .to_vec()
        })
        .collect();

    let mut den = crate::qseries::den_u64(&min_exp);
    for p in &points {
        den = lcm_u64(den, crate::qseries::den_u64(&d.exponent(p)));
    }

    let offset_steps = steps_of(&min_exp, den);
    let len = order as usize * den as usize + 1;
    let mut coeffs = vec![Rat::new(); len];
    let mut term = vec![Rat::new(); poch_len];
    let mut next = vec![Rat::new(); poch_len];
    for p in &points {
        let e = d.exponent(p);
        // Integer orders available for this point's Pochhammer factor.
        let budget = Rat::from(&bound - &e);
        let avail = budget.floor().numer().to_u32().expect("nonnegative") as usize;
        product_of(&inv_poch, p, avail, &mut term, &mut next);
        let base = steps_of(&e, den) - offset_steps;
        for (t, c) in term[..=avail].iter().enumerate() {
            if !is_zero(c) {
                let idx = base + (t as i64) * den as i64;
                coeffs[idx as usize] += c;
            }
        }
    }
    Ok(PuiseuxSeries::from_parts(den, offset_steps, coeffs))
}

/// `term <- prod_i inv_poch[p[i]]` truncated to `avail` orders.
fn product_of(
    inv_poch: &[Vec<Rat>],
    p: &[i64],
    avail: usize,
    term: &mut [Rat],
    scratch: &mut [Rat],
) {
    for c in term.iter_mut() {
        *c = Rat::new();
    }
    term[0] = Rat::from(1);
    let mut top = 0usize;
    for &ni in p {
        if ni == 0 {
            continue;
        }
        let f = &inv_poch[ni as usize];
        for c in scratch[..=avail].iter_mut() {
            *c = Rat::new();
        }
        for i in 0..=top.min(avail) {
            if is_zero(&term[i]) {
                continue;
            }
            for (j, fc) in f.iter().enumerate() {
                if i + j > avail {
                    break;
                }
                scratch[i + j] += Rat::from(&term[i] * fc);
            }
        }
        term[..=avail].clone_from_slice(&scratch[..=avail]);
        top = avail;
    }
}

fn steps_of(e: &Rat, den: u64) -> i64 {
    let scaled = Rat::from(e * Rat::from(den));
    debug_assert!(scaled.is_integer());
    scaled.numer().to_i64().expect("lattice step overflow")
}

/// Wire format for a Nahm datum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NahmDatumJson {
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "B")]
    pub b: Vec<String>,
    #[serde(rename = "C")]
    pub c: String,
}

impl From<&NahmDatum> for NahmDatumJson {
    fn from(d: &NahmDatum) -> Self {
        NahmDatumJson {
            a: MatrixJson::from(&d.a),
            b: d.b.iter().map(fmt_rat).collect(),
            c: fmt_rat(&d.c),
        }
    }
}

impl TryFrom<&NahmDatumJson> for NahmDatum {
    type Error = Error;

    fn try_from(j: &NahmDatumJson) -> Result<Self> {
        let a = MatrixQ::try_from(&j.a)?;
        let b =
            j.b.iter()
                .map(|s| parse_rat(s))
                .collect::<Result<Vec<_>>>()?;
        let c = parse_rat(&j.c)?;
        NahmDatum::new(a, b, c)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::liealg::{cartan_matrix, nahm_matrix, DynkinSpec, Family};
    use crate::qseries::rat;

    fn datum(a: &[&[(i64, i64)]], b: &[(i64, i64)], c: (i64, i64)) -> NahmDatum {
        let a = MatrixQ::from_rows(
            a.iter()
                .map(|r| r.iter().map(|&(n, d)| Rat::from((n, d))).collect())
                .collect(),
        )
        .unwrap();
        NahmDatum::new(
            a,
            b.iter().map(|&(n, d)| Rat::from((n, d))).collect(),
            Rat::from(c),
        )
        .unwrap()
    }

    fn coset_k4() -> MatrixQ {
        let a1 = DynkinSpec::new(Family::A, 1).unwrap();
        let a3 = DynkinSpec::new(Family::A, 3).unwrap();
        nahm_matrix(a1, a3)
    }

    /// Independent rank-1 oracle: direct summation with map-based series
    /// arithmetic, sharing no code with the production path.
    fn rank1_oracle(a: (i64, i64), b: (i64, i64), c: (i64, i64), order: u32) -> BTreeMap<Rat, Rat> {
        let a = Rat::from(a);
        let b = Rat::from(b);
        let c = Rat::from(c);
        // Find the minimal exponent by scanning far enough out.
        let exps: Vec<Rat> = (0..500)
            .map(|n| {
                let n = Rat::from(n);
                Rat::from(&a * &n) * &n / Rat::from(2) + Rat::from(&b * &n) + c.clone()
            })
            .collect();
        let min_exp = exps.iter().min().unwrap().clone();
        let bound = Rat::from(&min_exp + Rat::from(order));

        let mut acc: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (n, e) in exps.iter().enumerate() {
            if *e > bound {
                continue;
            }
            // 1/(q)_n = prod_j 1/(1-q^j) via geometric series on a map.
            let budget = Rat::from(&bound - e);
            let budget = budget.floor().numer().to_i64().unwrap();
            let mut factor: BTreeMap<i64, Rat> = BTreeMap::new();
            factor.insert(0, Rat::from(1));
            for j in 1..=n as i64 {
                let mut next: BTreeMap<i64, Rat> = BTreeMap::new();
                for (&deg, coeff) in &factor {
                    let mut t = 0;
                    while deg + j * t <= budget {
                        *next.entry(deg + j * t).or_default() += coeff;
                        t += 1;
                    }
                }
                factor = next;
            }
            for (deg, coeff) in factor {
                if deg <= budget {
                    let exp = Rat::from(e + Rat::from(deg));
                    *acc.entry(exp).or_default() += coeff;
                }
            }
        }
        acc.retain(|_, v| v.cmp0() != std::cmp::Ordering::Equal);
        acc
    }

    #[test]
    fn golden_rogers_ramanujan_character() {
        // A = (2), B = (0), C = -1/60 from the (5,2) minimal model.
        let d = datum(&[&[(2, 1)]], &[(0, 1)], (-1, 60));
        let f = nahm_sum(&d, 10).unwrap();
        let (lead, c) = f.leading().unwrap();
        assert_eq!(lead, rat(-1, 60));
        assert_eq!(*c, Rat::from(1));
        let expected = [1i64, 1, 1, 1, 2, 2, 3];
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(
                f.bracket_coeff(i as u32).unwrap(),
                Rat::from(*e),
                "order {i}"
            );
        }
    }

    #[test]
    fn golden_negative_b_doubles_leading_term() {
        // A = (1), B = (-1/2), C = 1/24: n = 0 and n = 1 both land on 1/24.
        let d = datum(&[&[(1, 1)]], &[(-1, 2)], (1, 24));
        let f = nahm_sum(&d, 8).unwrap();
        let (lead, c) = f.leading().unwrap();
        assert_eq!(lead, rat(1, 24));
        assert_eq!(*c, Rat::from(2));
        let expected = [2i64, 2, 2, 4, 4];
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(
                f.bracket_coeff(i as u32).unwrap(),
                Rat::from(*e),
                "order {i}"
            );
        }
    }

    #[test]
    fn order_zero_keeps_only_the_minimum() {
        let d = datum(&[&[(2, 1)]], &[(0, 1)], (0, 1));
        let f = nahm_sum(&d, 0).unwrap();
        assert_eq!(f.known_upper(), rat(0, 1));
        assert_eq!(f.coeff_at(&rat(0, 1)).unwrap(), Rat::from(1));

        // Negative B: the leading exponent is the minimum over all n.
        let d = datum(&[&[(2, 1)]], &[(-2, 1)], (0, 1));
        let f = nahm_sum(&d, 0).unwrap();
        // exponent n^2 - 2n is minimised at n = 1 with value -1.
        let (lead, _) = f.leading().unwrap();
        assert_eq!(lead, rat(-1, 1));
    }

    #[test]
    fn shift_identity_in_c() {
        let d1 = datum(&[&[(3, 2)]], &[(1, 3)], (-1, 48));
        let d2 = datum(&[&[(3, 2)]], &[(1, 3)], (7, 8));
        let f1 = nahm_sum(&d1, 12).unwrap();
        let f2 = nahm_sum(&d2, 12).unwrap();
        let delta = Rat::from(rat(-1, 48) - rat(7, 8));
        let shifted = f2.shift(&delta);
        assert!(f1.agrees_through(&shifted, &Rat::from(&rat(-1, 48) + Rat::from(12))));
    }

    #[test]
    fn rank1_oracle_agrees_with_enumerator() {
        for (a, b, c) in [
            ((2, 1), (0, 1), (-1, 60)),
            ((1, 1), (-1, 2), (1, 24)),
            ((3, 2), (-5, 2), (0, 1)),
            ((1, 2), (1, 3), (2, 7)),
        ] {
            let order = 12u32;
            let d = datum(&[&[a]], &[b], c);
            let f = nahm_sum(&d, order).unwrap();
            let oracle = rank1_oracle(a, b, c, order);
            for (exp, coeff) in &oracle {
                assert_eq!(
                    f.coeff_at(exp).unwrap(),
                    *coeff,
                    "A={a:?} B={b:?} C={c:?} exponent {exp}"
                );
            }
            // Conversely every nonzero term of f within the oracle bound matches.
            for (exp, coeff) in f.terms() {
                assert_eq!(oracle.get(&exp).cloned().unwrap_or_default(), *coeff);
            }
        }
    }

    #[test]
    fn monotone_truncation_of_nahm_sum() {
        let a1 = DynkinSpec::new(Family::A, 1).unwrap();
        let a3 = DynkinSpec::new(Family::A, 3).unwrap();
        let a = nahm_matrix(a1, a3);
        let d = NahmDatum::new(a, vec![rat(-1, 2), rat(-1, 1), rat(-1, 2)], rat(1, 24)).unwrap();
        let small = nahm_sum(&d, 6).unwrap();
        let large = nahm_sum(&d, 14).unwrap();
        assert!(small.agrees_through(&large, &small.known_upper()));
    }

    #[test]
    fn coset_matrix_accepted_non_pd_rejected() {
        let ok = NahmDatum::new(
            coset_k4(),
            vec![Rat::new(), Rat::new(), Rat::new()],
            Rat::new(),
        );
        assert!(ok.is_ok());

        let bad = MatrixQ::from_rows(vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(1, 1)]])
            .unwrap();
        assert!(matches!(
            NahmDatum::new(bad, vec![Rat::new(), Rat::new()], Rat::new()),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn cartan_pochhammer_cross_check() {
        // Smoke test that exponents use A/2 correctly: A = C(A1) kron C(T1)^{-1} = (2),
        // so the n-th exponent is n^2 + C.
        let t1 = cartan_matrix(DynkinSpec::new(Family::T, 1).unwrap());
        assert_eq!(*t1.get(0, 0), rat(1, 1));
        let d = datum(&[&[(2, 1)]], &[(0, 1)], (0, 1));
        assert_eq!(d.exponent(&[3]), rat(9, 1));
    }

    #[test]
    fn datum_json_round_trip() {
        let d = NahmDatum::new(
            coset_k4(),
            vec![rat(-1, 2), rat(-1, 1), rat(-1, 2)],
            rat(1, 24),
        )
        .unwrap();
        let j = NahmDatumJson::from(&d);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"B\":[\"-1/2\",\"-1\",\"-1/2\"]"));
        let back: NahmDatumJson = serde_json::from_str(&text).unwrap();
        assert_eq!(NahmDatum::try_from(&back).unwrap(), d);
    }
}
