//! The search pipeline: enumerate candidate `B` vectors over a rational
//! grid, screen them with the two asymptotic formulas (an f64 prefilter
//! followed by the full working-precision check), then verify survivors by
//! exact series comparison against the predicted character combinations.
//!
//! Also home to the closed-form `B` catalogues, the duality transform and
//! the two infinite-family identities used as regression anchors.

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::characters::{
    combination_series, minimal_targets, predicted_combinations, TargetCombination,
};
use crate::error::{Error, Result};
use crate::liealg::{cartan_matrix, nahm_matrix, DynkinSpec, Family, MatrixQ};
use crate::nahmsum::{nahm_sum, NahmDatum};
use crate::qseries::{dedekind_eta, fmt_rat, rat, theta_lattice, PuiseuxSeries, Rat, SeriesCmp};
use crate::tba::{
    asymptotic_c_value, asymptotic_residual_value, tba_solution, PrecisionConfig, TBASolution,
};

/// Which matrix family (and target set) a search runs over.
#[derive(Clone, Debug)]
pub enum SearchFamily {
    /// `A = C(A_1) kron C(T_n)^{-1}` against (2n+3, 2) minimal characters.
    Minimal { n: u32 },
    /// `A = C(A_1) kron C(A_{k-1})^{-1}` against level-k coset combinations.
    Coset { k: u32 },
    /// User-supplied matrix and target list.
    Explicit {
        a: MatrixQ,
        targets: Vec<TargetCombination>,
    },
}

impl SearchFamily {
    pub fn matrix(&self) -> MatrixQ {
        let a1 = DynkinSpec::new(Family::A, 1).expect("rank 1");
        match self {
            SearchFamily::Minimal { n } => {
                nahm_matrix(a1, DynkinSpec::new(Family::T, *n).expect("valid rank"))
            }
            SearchFamily::Coset { k } => {
                assert!(*k >= 2, "coset searches need k >= 2");
                nahm_matrix(a1, DynkinSpec::new(Family::A, *k - 1).expect("valid rank"))
            }
            SearchFamily::Explicit { a, .. } => a.clone(),
        }
    }

    pub fn targets(&self) -> Vec<TargetCombination> {
        match self {
            SearchFamily::Minimal { n } => minimal_targets(*n),
            SearchFamily::Coset { k } => predicted_combinations(*k),
            SearchFamily::Explicit { targets, .. } => targets.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub family: SearchFamily,
    /// Closed interval searched per coordinate; `None` uses -8..8, narrowed
    /// to -2..2 from rank 4 up.
    pub range: Option<(Rat, Rat)>,
    /// Grid denominators, swept in the order given with lowest-terms dedup.
    pub denominators: Vec<u32>,
    /// Truncation order for the exact series comparison.
    pub order: u32,
    /// Working-precision bound on the second asymptotic formula.
    pub filter_tol: f64,
    /// f64 prefilter bound (safely above f64 round-off of true zeros).
    pub prefilter_tol: f64,
    pub precision: PrecisionConfig,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
}

impl SearchConfig {
    pub fn new(family: SearchFamily) -> Self {
        SearchConfig {
            family,
            range: None,
            denominators: vec![1, 2, 3, 4],
            order: 20,
            filter_tol: 1e-30,
            prefilter_tol: 1e-8,
            precision: PrecisionConfig::default(),
            jobs: None,
        }
    }

    pub fn effective_range(&self, rank: usize) -> (Rat, Rat) {
        match &self.range {
            Some((lo, hi)) => (lo.clone(), hi.clone()),
            None if rank >= 4 => (rat(-2, 1), rat(2, 1)),
            None => (rat(-8, 1), rat(8, 1)),
        }
    }
}

/// One confirmed match.
#[derive(Clone, Debug)]
pub struct MatchRecord {
    pub b: Vec<Rat>,
    pub c: Rat,
    pub matched: String,
    pub verified_order: u32,
    /// Screening values: the floating `C` and the asymptotic residual.
    pub filter_values: (String, String),
}

/// Wire format pinned by the result-file schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchRecordJson {
    #[serde(rename = "B")]
    pub b: Vec<String>,
    #[serde(rename = "C")]
    pub c: String,
    pub matched: String,
    pub order: u32,
    pub residual: String,
}

impl From<&MatchRecord> for MatchRecordJson {
    fn from(r: &MatchRecord) -> Self {
        MatchRecordJson {
            b: r.b.iter().map(fmt_rat).collect(),
            c: fmt_rat(&r.c),
            matched: r.matched.clone(),
            order: r.verified_order,
            residual: r.filter_values.1.clone(),
        }
    }
}

/// CSV summary line per record: `B;C;matched` with rationals as `p/q`.
pub fn records_to_csv(records: &[MatchRecord]) -> String {
    let mut out = String::from("B,C,matched\n");
    for r in records {
        let b = r.b.iter().map(fmt_rat).collect::<Vec<_>>().join(" ");
        out.push_str(&format!("{},{},{}\n", b, fmt_rat(&r.c), r.matched));
    }
    out
}

/// Integer grid of one denominator: numerators for `p/d` in `[lo, hi]`.
fn grid_numerators(lo: &Rat, hi: &Rat, d: u32) -> Vec<i64> {
    let lo_scaled = Rat::from(lo * Rat::from(d)).ceil();
    let hi_scaled = Rat::from(hi * Rat::from(d)).floor();
    let lo_i = lo_scaled.numer().to_i64().expect("grid bound overflow");
    let hi_i = hi_scaled.numer().to_i64().expect("grid bound overflow");
    (lo_i..=hi_i).collect()
}

fn gcd_i64(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// True when `nums / d` is already representable over an earlier sweep
/// denominator (lowest-terms dedup across the denominator schedule).
fn seen_earlier(nums: &[i64], d: u32, earlier: &[u32]) -> bool {
    let mut lcm: i64 = 1;
    for &p in nums {
        let den = d as i64 / gcd_i64(p, d as i64);
        lcm = lcm / gcd_i64(lcm, den) * den;
    }
    earlier.iter().any(|&e| e as i64 % lcm == 0)
}

/// All candidate `B` vectors in deterministic order: denominators in sweep
/// order, lexicographic within one denominator, duplicates across
/// denominators emitted once.
pub fn enumerate_candidates(cfg: &SearchConfig, rank: usize) -> Vec<Vec<Rat>> {
    let (lo, hi) = cfg.effective_range(rank);
    let mut out = Vec::new();
    for (pos, &d) in cfg.denominators.iter().enumerate() {
        let nums = grid_numerators(&lo, &hi, d);
        let earlier = &cfg.denominators[..pos];
        let total = nums
            .len()
            .checked_pow(rank as u32)
            .expect("grid size overflow");
        for idx in 0..total {
            let p = decode(idx, &nums, rank);
            if seen_earlier(&p, d, earlier) {
                continue;
            }
            out.push(p.iter().map(|&n| Rat::from((n, d as i64))).collect());
        }
    }
    out
}

fn decode(mut idx: usize, nums: &[i64], rank: usize) -> Vec<i64> {
    let mut p = vec![0i64; rank];
    for slot in (0..rank).rev() {
        p[slot] = nums[idx % nums.len()];
        idx /= nums.len();
    }
    p
}

/// Working-precision screen: pass iff the second asymptotic formula
/// vanishes within `filter_tol` and the first reconstructs to a rational.
pub fn screen_candidate(b: &[Rat], sol: &TBASolution, cfg: &SearchConfig) -> (bool, Option<Rat>) {
    let residual = crate::tba::asymptotic_residual(b, sol, &cfg.precision).abs();
    if residual > cfg.filter_tol {
        return (false, None);
    }
    let (_, recon) = crate::tba::asymptotic_c(b, sol, &cfg.precision);
    match recon {
        Some(c) => (true, Some(c)),
        None => (false, None),
    }
}

/// Finds the unique target whose series equals `f` on the full common known
/// range, requiring at least `min_orders` integer orders of agreement above
/// the leading exponent. Two hits signal a too-low truncation order.
pub fn match_series(
    f: &PuiseuxSeries,
    targets: &[(TargetCombination, PuiseuxSeries)],
    min_orders: u32,
) -> Result<Option<(String, u32)>> {
    let mut found: Option<(String, u32)> = None;
    for (combo, series) in targets {
        let lead_f = f.leading().map(|(e, _)| e);
        let lead_t = series.leading().map(|(e, _)| e);
        let (Some(lead_f), Some(lead_t)) = (lead_f, lead_t) else {
            continue;
        };
        if lead_f != lead_t {
            continue;
        }
        match f.compare(series)? {
            SeriesCmp::Differs { .. } => continue,
            SeriesCmp::Equal { through } => {
                let depth = Rat::from(&through - &lead_f);
                if depth < rat(min_orders as i64, 1) {
                    continue;
                }
                let verified = depth.floor().numer().to_u32().unwrap_or(min_orders);
                if let Some((first, _)) = &found {
                    return Err(Error::AmbiguousMatch {
                        first: first.clone(),
                        second: combo.name.clone(),
                    });
                }
                found = Some((combo.name.clone(), verified));
            }
        }
    }
    Ok(found)
}

/// Runs the full pipeline and returns every match in deterministic order
/// (denominator sweep position, then lexicographic grid order).
pub fn run_search(cfg: &SearchConfig) -> Result<Vec<MatchRecord>> {
    let mut records = Vec::new();
    run_search_streaming(cfg, &mut |batch| records.extend_from_slice(batch))?;
    Ok(records)
}

/// Streaming variant: completed per-denominator batches are handed to
/// `sink` as they finish, so partial results survive a later error.
pub fn run_search_streaming(
    cfg: &SearchConfig,
    sink: &mut dyn FnMut(&[MatchRecord]),
) -> Result<()> {
    let pool = match cfg.jobs {
        Some(jobs) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?,
        ),
        None => None,
    };
    run_search_inner(cfg, sink, pool.as_ref())
}

fn run_search_inner(
    cfg: &SearchConfig,
    sink: &mut dyn FnMut(&[MatchRecord]),
    pool: Option<&rayon::ThreadPool>,
) -> Result<()> {
    let a = cfg.family.matrix();
    let rank = a.rows();
    let (lo, hi) = cfg.effective_range(rank);
    let sol = tba_solution(&a, &cfg.precision)?;
    let tables64 = sol.tables_f64();
    let tables = sol.tables();
    let bits = cfg.precision.bits();

    // Targets once, with margin over the comparison order.
    let target_series: Vec<(TargetCombination, PuiseuxSeries)> = cfg
        .family
        .targets()
        .into_iter()
        .map(|t| {
            let s = combination_series(&t, cfg.order as usize + 4)?;
            Ok((t, s))
        })
        .collect::<Result<Vec<_>>>()?;

    for (pos, &d) in cfg.denominators.iter().enumerate() {
        let nums = grid_numerators(&lo, &hi, d);
        if nums.is_empty() {
            continue;
        }
        let earlier = &cfg.denominators[..pos];
        let total = nums
            .len()
            .checked_pow(rank as u32)
            .expect("grid size overflow");
        let scan = || -> Vec<(usize, Result<MatchRecord>)> {
            (0..total)
                .into_par_iter()
                .filter_map(|idx| {
                    let p = decode(idx, &nums, rank);
                    if seen_earlier(&p, d, earlier) {
                        return None;
                    }
                    // Stage 1: f64 prefilter on the vanishing formula.
                    let b64: Vec<f64> = p.iter().map(|&n| n as f64 / d as f64).collect();
                    let quick = asymptotic_residual_value(&tables64, &b64).abs();
                    if !quick.is_finite() || quick > cfg.prefilter_tol {
                        return None;
                    }
                    // Stage 2: full-precision screen plus C reconstruction.
                    let b: Vec<Rat> = p.iter().map(|&n| Rat::from((n, d as i64))).collect();
                    let bf: Vec<Float> = b.iter().map(|r| Float::with_val(bits, r)).collect();
                    let residual = asymptotic_residual_value(&tables, &bf).abs();
                    if residual > cfg.filter_tol {
                        return None;
                    }
                    let c_value = asymptotic_c_value(&tables, &bf);
                    let c = crate::qseries::rational_reconstruct(
                        &c_value,
                        cfg.precision.recon_max_denominator,
                        cfg.precision.recon_tol,
                    )?;
                    // Stage 3: exact series comparison.
                    let outcome =
                        (|| {
                            let datum = NahmDatum::new(a.clone(), b.clone(), c.clone())?;
                            let f = nahm_sum(&datum, cfg.order)?;
                            Ok(match_series(&f, &target_series, cfg.order)?.map(
                                |(name, verified)| MatchRecord {
                                    b: b.clone(),
                                    c: c.clone(),
                                    matched: name,
                                    verified_order: verified,
                                    filter_values: (
                                        c_value.to_string_radix(10, Some(30)),
                                        format!("{:e}", residual.to_f64()),
                                    ),
                                },
                            ))
                        })();
                    match outcome {
                        Ok(Some(record)) => Some((idx, Ok(record))),
                        Ok(None) => None,
                        Err(e) => Some((idx, Err(e))),
                    }
                })
                .collect()
        };
        let mut hits = match pool {
            Some(p) => p.install(scan),
            None => scan(),
        };
        hits.sort_by_key(|(idx, _)| *idx);
        let mut batch = Vec::new();
        let mut first_error = None;
        for (_, outcome) in hits {
            match outcome {
                Ok(record) => batch.push(record),
                Err(e) if first_error.is_none() => first_error = Some(e),
                Err(_) => {}
            }
        }
        sink(&batch);
        if let Some(e) = first_error {
            return Err(e);
        }
    }
    Ok(())
}

/// Re-verifies a match at a deeper truncation order; used by the soundness
/// tests and the verify command.
pub fn verify_record(
    a: &MatrixQ,
    rec: &MatchRecord,
    cfg: &SearchConfig,
    extra: u32,
) -> Result<bool> {
    let datum = NahmDatum::new(a.clone(), rec.b.clone(), rec.c.clone())?;
    let order = rec.verified_order + extra;
    let f = nahm_sum(&datum, order)?;
    let targets: Vec<(TargetCombination, PuiseuxSeries)> = cfg
        .family
        .targets()
        .into_iter()
        .filter(|t| t.name == rec.matched)
        .map(|t| {
            let s = combination_series(&t, order as usize + 4)?;
            Ok((t, s))
        })
        .collect::<Result<Vec<_>>>()?;
    if targets.is_empty() {
        return Ok(false);
    }
    Ok(match match_series(&f, &targets, order)? {
        Some((name, _)) => name == rec.matched,
        None => false,
    })
}

/// Closed-form staircase catalogue for the minimal-model family: n+1
/// vectors of length n, the zero vector and then suffixes 1, 1..2, up to
/// 1..n pushed in from the right.
pub fn known_b_minimal(n: u32) -> Vec<Vec<Rat>> {
    let n = n as usize;
    (0..=n)
        .map(|j| {
            let mut v = vec![Rat::new(); n];
            for (step, slot) in (n - j..n).enumerate() {
                v[slot] = Rat::from(step as u64 + 1);
            }
            v
        })
        .collect()
}

/// Closed-form catalogue for the coset family: the zero vector plus the
/// k-1 columns of `-C(A_{k-1})^{-1}`.
pub fn known_b_coset(k: u32) -> Vec<Vec<Rat>> {
    assert!(k >= 2);
    let r = (k - 1) as usize;
    let inv = cartan_matrix(DynkinSpec::new(Family::A, k - 1).expect("valid rank"))
        .invert()
        .expect("Cartan matrices are invertible");
    let mut out = vec![vec![Rat::new(); r]];
    for col in 0..r {
        out.push(
            (0..r)
                .map(|row| Rat::from(-inv.get(row, col).clone()))
                .collect(),
        );
    }
    out
}

/// Duality transform `A* = A^{-1}`, `B* = A^{-1} B`,
/// `C* = B^t A^{-1} B / 2 - r/24 - C`.
pub fn dual_transform(a: &MatrixQ, b: &[Rat], c: &Rat) -> Result<(MatrixQ, Vec<Rat>, Rat)> {
    let a_inv = a.invert()?;
    let b_star = a_inv.mul_vec(b)?;
    let mut quad = Rat::new();
    for (bi, vi) in b.iter().zip(&b_star) {
        quad += Rat::from(bi * vi);
    }
    let c_star = quad / Rat::from(2) - Rat::from((a.rows() as u64, 24u64)) - c.clone();
    Ok((a_inv, b_star, c_star))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyVariant {
    /// `B = (3j/2, 0, -3j/2)`, matching `eta^{-1} sum q^{3 n^2 / 4}`.
    Even,
    /// `B = ((3j+1)/2, 0, -(3j+1)/2)`, matching
    /// `eta^{-1} sum q^{3 (n + 1/3)^2 / 4}`.
    Odd,
}

#[derive(Clone, Debug)]
pub struct InfiniteFamilyCheck {
    pub b: Vec<Rat>,
    pub c: Rat,
    pub lhs: PuiseuxSeries,
    pub rhs: PuiseuxSeries,
    pub equal: bool,
}

/// One member of the two infinite `B`-families of the k = 4 coset matrix,
/// compared exactly against its eta-quotient closed form.
pub fn infinite_family_identity(
    j: i64,
    variant: FamilyVariant,
    order: u32,
    precision: &PrecisionConfig,
) -> Result<InfiniteFamilyCheck> {
    let a1 = DynkinSpec::new(Family::A, 1).expect("rank 1");
    let a3 = DynkinSpec::new(Family::A, 3).expect("rank 3");
    let a = nahm_matrix(a1, a3);
    let (b, theta_shift) = match variant {
        FamilyVariant::Even => (vec![rat(3 * j, 2), Rat::new(), rat(-3 * j, 2)], rat(0, 1)),
        FamilyVariant::Odd => (
            vec![rat(3 * j + 1, 2), Rat::new(), rat(-3 * j - 1, 2)],
            rat(1, 3),
        ),
    };
    let sol = tba_solution(&a, precision)?;
    let (_, c) = crate::tba::asymptotic_c(&b, &sol, precision);
    let c = c.ok_or_else(|| Error::invalid("family member has no rational C"))?;

    let datum = NahmDatum::new(a, b.clone(), c.clone())?;
    let lhs = nahm_sum(&datum, order)?;
    let margin = order as usize + 2;
    let rhs = theta_lattice(&rat(3, 4), &theta_shift, margin)
        .mul(&dedekind_eta(margin).invert()?)
        .normalized();
    let through = match (lhs.leading(), rhs.leading()) {
        (Some((lf, _)), Some((lr, _))) if lf == lr => Rat::from(&lf + rat(order as i64, 1)),
        _ => {
            return Ok(InfiniteFamilyCheck {
                b,
                c,
                lhs,
                rhs,
                equal: false,
            });
        }
    };
    let equal = lhs.agrees_through(&rhs, &through);
    Ok(InfiniteFamilyCheck {
        b,
        c,
        lhs,
        rhs,
        equal,
    })
}

#[cfg(test)]
mod tests;
