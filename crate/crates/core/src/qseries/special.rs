//! q-Pochhammer symbols, the Dedekind eta function and lattice theta sums.

use super::{den_u64, is_zero, lcm_u64, PuiseuxSeries, Rat};

/// Finite q-Pochhammer `(q)_n = prod_{j=1}^n (1 - q^j)` as an exact
/// polynomial, stored through order `max(order, n(n+1)/2)`.
pub fn pochhammer(n: u32, order: usize) -> PuiseuxSeries {
    let degree = (n as usize * (n as usize + 1)) / 2;
    let len = degree.max(order) + 1;
    let mut coeffs = vec![Rat::new(); len];
    coeffs[0] = Rat::from(1);
    let mut top = 0usize;
    for j in 1..=n as usize {
        top += j;
        // multiply in place by (1 - q^j), highest coefficient first
        for i in (0..=top.saturating_sub(j)).rev() {
            if !is_zero(&coeffs[i]) {
                let c = coeffs[i].clone();
                coeffs[i + j] -= c;
            }
        }
    }
    PuiseuxSeries::from_parts(1, 0, coeffs)
}

/// Dedekind eta `q^{1/24} prod_{n>=1} (1 - q^n)`, with the product expanded
/// by Euler's pentagonal number theorem through integer order `order`.
pub fn dedekind_eta(order: usize) -> PuiseuxSeries {
    let mut coeffs = vec![Rat::new(); 24 * order + 1];
    let mut j: i64 = 0;
    loop {
        let mut contributed = false;
        for jj in [j, -j] {
            let g = jj * (3 * jj - 1) / 2;
            if g <= order as i64 && g >= 0 {
                let sign = if jj.rem_euclid(2) == 0 { 1 } else { -1 };
                coeffs[24 * g as usize] += Rat::from(sign);
                contributed = true;
            }
            if jj == 0 {
                break;
            }
        }
        if !contributed && j > 0 {
            break;
        }
        j += 1;
    }
    PuiseuxSeries::from_parts(24, 1, coeffs)
}

/// Exact truncation of the lattice theta sum `sum_{j in Z} q^{a (j+b)^2}`,
/// known through `order` integer orders above its smallest exponent. The
/// summation range is chosen so that every omitted term lies strictly above
/// the known bound.
pub fn theta_lattice(a: &Rat, b: &Rat, order: usize) -> PuiseuxSeries {
    assert!(
        a.cmp0() == std::cmp::Ordering::Greater,
        "theta parameter a must be positive"
    );
    // The exponent a(j+b)^2 is minimised at one of the two integers nearest -b.
    let minus_b = Rat::from(-b.clone());
    let j_lo = Rat::from(minus_b.floor_ref())
        .numer()
        .to_i64()
        .expect("theta shift overflow");
    let e_min = (j_lo..=j_lo + 1)
        .map(|j| theta_exponent(a, b, j))
        .min()
        .expect("nonempty");
    let bound = Rat::from(&e_min + Rat::from(order as u64));

    // Collect contributing lattice points outward from the centre.
    let mut terms: Vec<Rat> = Vec::new();
    for dir in [0i64, 1] {
        let mut j = j_lo + dir;
        loop {
            let e = theta_exponent(a, b, j);
            if e > bound {
                break;
            }
            terms.push(e);
            j += if dir == 0 { -1 } else { 1 };
        }
    }

    let mut den = den_u64(&e_min);
    for e in &terms {
        den = lcm_u64(den, den_u64(e));
    }
    let offset_steps = steps_of(&e_min, den);
    let len = (order as usize) * den as usize + 1;
    let mut coeffs = vec![Rat::new(); len];
    for e in &terms {
        let idx = steps_of(e, den) - offset_steps;
        if (0..len as i64).contains(&idx) {
            coeffs[idx as usize] += Rat::from(1);
        }
    }
    PuiseuxSeries::from_parts(den, offset_steps, coeffs)
}

fn theta_exponent(a: &Rat, b: &Rat, j: i64) -> Rat {
    let shifted = Rat::from(b + Rat::from(j));
    let sq = Rat::from(&shifted * &shifted);
    Rat::from(a * &sq)
}

fn steps_of(e: &Rat, den: u64) -> i64 {
    let scaled = Rat::from(e * Rat::from(den));
    debug_assert!(scaled.is_integer());
    scaled.numer().to_i64().expect("lattice step overflow")
}
