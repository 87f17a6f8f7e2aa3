//! High-precision solution of the constant TBA equations
//! `x_i = prod_j (1 - x_j)^{A_ij}`, the matrix `F`, the two asymptotic
//! formulas used to screen candidate `B` vectors, and the Rogers
//! dilogarithm cross-check of the effective central charge.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::MatrixQ;
use crate::qseries::{rational_reconstruct, Rat};

mod formulas;

pub use formulas::{asymptotic_c_value, asymptotic_residual_value, AsymptoticTables, Real};

/// Working precision and solver limits.
#[derive(Clone, Debug)]
pub struct PrecisionConfig {
    /// Decimal digits carried by every high-precision value.
    pub working_digits: u32,
    /// Componentwise residual required of the TBA solution.
    pub solver_tol: f64,
    pub max_iterations: u64,
    /// Continued-fraction reconstruction: largest denominator considered.
    pub recon_max_denominator: u64,
    /// Continued-fraction reconstruction: acceptance tolerance.
    pub recon_tol: f64,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            working_digits: 60,
            solver_tol: 1e-50,
            max_iterations: 100_000,
            recon_max_denominator: 10_000,
            recon_tol: 1e-30,
        }
    }
}

impl PrecisionConfig {
    pub fn with_digits(digits: u32) -> Self {
        PrecisionConfig {
            working_digits: digits,
            ..Default::default()
        }
    }

    pub fn bits(&self) -> u32 {
        assert!(
            self.working_digits >= 30,
            "working precision below 30 digits"
        );
        (self.working_digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32
    }

    fn float(&self, v: f64) -> Float {
        Float::with_val(self.bits(), v)
    }
}

/// The solution of the TBA equations for one matrix `A`, shared read-only
/// by every candidate-B evaluation.
#[derive(Clone, Debug)]
pub struct TBASolution {
    pub x: Vec<Float>,
    pub f: Vec<Vec<Float>>,
    pub residual: Float,
}

impl TBASolution {
    pub fn rank(&self) -> usize {
        self.x.len()
    }

    /// Precomputed rational-function tables at working precision.
    pub fn tables(&self) -> AsymptoticTables<Float> {
        AsymptoticTables::build(&self.x, &self.f)
    }

    /// The same tables in f64, for cheap prefiltering.
    pub fn tables_f64(&self) -> AsymptoticTables<f64> {
        let x: Vec<f64> = self.x.iter().map(|v| v.to_f64()).collect();
        let f: Vec<Vec<f64>> = self
            .f
            .iter()
            .map(|row| row.iter().map(|v| v.to_f64()).collect())
            .collect();
        AsymptoticTables::build(&x, &f)
    }
}

/// Solves `x_i = prod_j (1 - x_j)^{A_ij}` for the solution in `(0,1)^r` by
/// damped fixed-point iteration from `x = 1/2`, halving the damping factor
/// whenever a step fails to reduce the residual.
pub fn solve_x(a: &MatrixQ, cfg: &PrecisionConfig) -> Result<(Vec<Float>, Float)> {
    if !a.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let r = a.rows();
    let bits = cfg.bits();
    let af: Vec<Vec<Float>> = (0..r)
        .map(|i| (0..r).map(|j| Float::with_val(bits, a.get(i, j))).collect())
        .collect();

    let map = |x: &[Float]| -> Option<Vec<Float>> {
        let ln1m: Vec<Float> = x
            .iter()
            .map(|xi| Float::with_val(bits, 1 - xi.clone()).ln())
            .collect();
        let mut out = Vec::with_capacity(r);
        for row in &af {
            let mut s = Float::with_val(bits, 0);
            for (aij, l) in row.iter().zip(&ln1m) {
                s += Float::with_val(bits, aij * l);
            }
            let g = s.exp();
            if !g.is_finite() {
                return None;
            }
            out.push(g);
        }
        Some(out)
    };
    let residual_of = |x: &[Float], gx: &[Float]| -> Float {
        let mut worst = Float::with_val(bits, 0);
        for (xi, gi) in x.iter().zip(gx) {
            let d = Float::with_val(bits, xi - gi).abs();
            if d > worst {
                worst = d;
            }
        }
        worst
    };

    let mut x: Vec<Float> = (0..r).map(|_| cfg.float(0.5)).collect();
    let mut gx = map(&x).ok_or_else(|| Error::invalid("TBA map undefined at start"))?;
    let mut res = residual_of(&x, &gx);
    let mut best = (x.clone(), gx.clone(), res.clone());
    let mut theta = 0.5f64;
    let mut iterations = 0u64;
    // The residual need not fall monotonically far from the fixed point, so
    // steps are accepted unless they leave (0,1)^r or blow well past the
    // best residual seen; on failure the damping is halved and the iterate
    // restarts from the best point.
    while res > cfg.solver_tol {
        iterations += 1;
        if iterations > cfg.max_iterations || theta < 1e-12 {
            return Err(Error::NoConvergence {
                iterations,
                residual: format!("{:e}", best.2.to_f64()),
            });
        }
        let candidate: Vec<Float> = x
            .iter()
            .zip(&gx)
            .map(|(xi, gi)| {
                Float::with_val(bits, xi * (1.0 - theta)) + Float::with_val(bits, gi * theta)
            })
            .collect();
        let accepted = if candidate.iter().all(|c| *c > 0.0 && *c < 1.0) {
            match map(&candidate) {
                Some(gc) => {
                    let rc = residual_of(&candidate, &gc);
                    let blown = rc > Float::with_val(bits, &best.2 * 4u32);
                    if !blown {
                        x = candidate;
                        gx = gc;
                        res = rc;
                        if res < best.2 {
                            best = (x.clone(), gx.clone(), res.clone());
                        }
                    }
                    !blown
                }
                None => false,
            }
        } else {
            false
        };
        if !accepted {
            theta /= 2.0;
            x = best.0.clone();
            gx = best.1.clone();
            res = best.2.clone();
        }
    }
    Ok((x, res))
}

/// `F = (A^{-1} + diag(x_i / (1 - x_i)))^{-1}` at working precision.
pub fn f_matrix(a: &MatrixQ, x: &[Float], cfg: &PrecisionConfig) -> Result<Vec<Vec<Float>>> {
    let r = a.rows();
    if x.len() != r {
        return Err(Error::DimensionMismatch("x length vs matrix rank".into()));
    }
    let bits = cfg.bits();
    let a_inv = a.invert()?;
    let mut m: Vec<Vec<Float>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| Float::with_val(bits, a_inv.get(i, j)))
                .collect()
        })
        .collect();
    for (i, xi) in x.iter().enumerate() {
        let ratio = Float::with_val(bits, xi / Float::with_val(bits, 1 - xi.clone()));
        m[i][i] += ratio;
    }
    invert_float(&m, bits)
}

fn invert_float(m: &[Vec<Float>], bits: u32) -> Result<Vec<Vec<Float>>> {
    let n = m.len();
    let mut a: Vec<Vec<Float>> = m.to_vec();
    let mut inv: Vec<Vec<Float>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Float::with_val(bits, u32::from(i == j)))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| {
                a[p][col]
                    .clone()
                    .abs()
                    .partial_cmp(&a[q][col].clone().abs())
                    .unwrap()
            })
            .unwrap();
        if a[pivot_row][col].clone().abs().is_zero() {
            return Err(Error::SingularMatrix);
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &pivot;
            inv[col][j] /= &pivot;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col].clone();
            if factor.clone().abs().is_zero() {
                continue;
            }
            for j in 0..n {
                let sa = Float::with_val(bits, &factor * &a[col][j]);
                a[row][j] -= sa;
                let si = Float::with_val(bits, &factor * &inv[col][j]);
                inv[row][j] -= si;
            }
        }
    }
    Ok(inv)
}

/// Convenience: solve the TBA equations and assemble the full solution.
pub fn tba_solution(a: &MatrixQ, cfg: &PrecisionConfig) -> Result<TBASolution> {
    let (x, residual) = solve_x(a, cfg)?;
    let f = f_matrix(a, &x, cfg)?;
    Ok(TBASolution { x, f, residual })
}

/// First asymptotic formula: the value of `C` determined by `B`, together
/// with its continued-fraction rational reconstruction (when one exists
/// within the configured denominator bound and tolerance).
pub fn asymptotic_c(b: &[Rat], sol: &TBASolution, cfg: &PrecisionConfig) -> (Float, Option<Rat>) {
    let tables = sol.tables();
    let bf: Vec<Float> = b.iter().map(|r| Float::with_val(cfg.bits(), r)).collect();
    let value = asymptotic_c_value(&tables, &bf);
    let recon = rational_reconstruct(&value, cfg.recon_max_denominator, cfg.recon_tol);
    (value, recon)
}

/// Second asymptotic formula: a quantity that vanishes for `B`-values
/// compatible with modularity. Candidates are screened by `|value|`.
pub fn asymptotic_residual(b: &[Rat], sol: &TBASolution, cfg: &PrecisionConfig) -> Float {
    let tables = sol.tables();
    let bf: Vec<Float> = b.iter().map(|r| Float::with_val(cfg.bits(), r)).collect();
    asymptotic_residual_value(&tables, &bf)
}

/// Rogers dilogarithm `L(y) = Li_2(y) + log(y) log(1-y) / 2`.
pub fn rogers_dilog(y: &Float) -> Float {
    let bits = y.prec();
    let li2 = y.clone().li2();
    let ln_y = y.clone().ln();
    let ln_1my = Float::with_val(bits, 1 - y.clone()).ln();
    li2 + ln_y * ln_1my / 2u32
}

/// `(6/pi^2) sum_i L(x_i)`: the effective central charge read off the TBA
/// solution, to be compared with the Lie-theoretic formula.
pub fn dilog_ceff(x: &[Float]) -> Float {
    assert!(!x.is_empty());
    let bits = x[0].prec();
    let mut acc = Float::with_val(bits, 0);
    for xi in x {
        acc += rogers_dilog(xi);
    }
    let pi = Float::with_val(bits, Constant::Pi);
    let pi2 = pi.pow(2);
    acc * 6u32 / pi2
}

/// `|dilog_ceff(x) - expected|` as an f64, for threshold checks.
pub fn ceff_deviation(x: &[Float], expected: &Rat) -> f64 {
    let got = dilog_ceff(x);
    let expect = Float::with_val(got.prec(), expected);
    Float::with_val(got.prec(), &got - &expect).abs().to_f64()
}

/// CLI-facing report of a TBA solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TbaReportJson {
    pub x: Vec<String>,
    pub residual: String,
    pub ceff_dilog: String,
    pub ceff_formula: Option<String>,
}

pub fn tba_report(
    sol: &TBASolution,
    cfg: &PrecisionConfig,
    ceff_formula: Option<&Rat>,
) -> TbaReportJson {
    TbaReportJson {
        x: sol
            .x
            .iter()
            .map(|v| v.to_string_radix(10, Some(cfg.working_digits as usize)))
            .collect(),
        residual: format!("{:e}", sol.residual.to_f64()),
        ceff_dilog: dilog_ceff(&sol.x).to_string_radix(10, Some(cfg.working_digits as usize)),
        ceff_formula: ceff_formula.map(|r| r.to_string()),
    }
}
