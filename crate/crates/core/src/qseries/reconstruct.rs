//! Rational reconstruction of high-precision reals by continued fractions.

use rug::{Float, Integer, Rational};

use super::Rat;

/// Returns the continued-fraction convergent `p/q` of `x` with
/// `q <= max_denominator` and `|x - p/q| <= tol`, if one exists.
///
/// Convergents are visited in order of increasing denominator, so when
/// several qualify the smallest denominator wins. Returns `None` when no
/// convergent within the denominator bound is close enough.
pub fn rational_reconstruct(x: &Float, max_denominator: u64, tol: f64) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let target = x.to_rational()?;
    let tol = Rat::from_f64(tol)?.abs();
    let max_den = Integer::from(max_denominator);

    // p_k = a_k p_{k-1} + p_{k-2}, q_k likewise; seeded with the usual
    // h_{-1} = 1, h_{-2} = 0 and k_{-1} = 0, k_{-2} = 1.
    let mut p_prev = Integer::from(0);
    let mut q_prev = Integer::from(1);
    let mut p = Integer::from(1);
    let mut q = Integer::from(0);
    let mut state = target.clone();
    loop {
        let a = Rational::from(state.floor_ref());
        let a_int = a.numer().clone();
        let p_next = Integer::from(&a_int * &p) + &p_prev;
        let q_next = Integer::from(&a_int * &q) + &q_prev;
        if q_next > max_den {
            return None;
        }
        let convergent = Rational::from((p_next.clone(), q_next.clone()));
        let err = Rational::from(&target - &convergent).abs();
        if err <= tol {
            return Some(convergent);
        }
        let frac = Rational::from(&state - &a);
        if frac.cmp0() == std::cmp::Ordering::Equal {
            // Exact rational reached but it was not within tolerance.
            return None;
        }
        state = frac.recip();
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
    }
}
