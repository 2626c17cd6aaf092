//! Traces, rational characteristic polynomials and integrality.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::FieldElement;

/// `Tr_{L/Q}(a)` where `L` is the tower level `j` (coordinates of length `D·2^j`).
fn level_trace(a: &FieldElement, j: usize) -> BigRational {
    let base = &a.tower.base;
    let s: BigInt = a.num[..base.degree]
        .iter()
        .zip(&base.power_sums)
        .map(|(c, p)| c * p)
        .sum();
    BigRational::new(s << j, a.den.clone())
}

/// Trace of `a` over the rationals, taken in the full tower.
pub fn trace(a: &FieldElement) -> BigRational {
    level_trace(a, a.tower.level_count())
}

/// Characteristic polynomial over Q of multiplication by `a` on the smallest
/// tower level containing it; monic, lowest degree first.
pub(crate) fn level_charpoly(a: &FieldElement) -> Vec<BigRational> {
    let j = a.level();
    let n = a.tower.base_degree() << j;
    // power sums s_k = Tr(a^k), then Newton's identities
    let mut sums = Vec::with_capacity(n);
    let mut pw = a.clone();
    for k in 1..=n {
        sums.push(level_trace(&pw, j));
        if k < n {
            pw = pw.mul(a);
        }
    }
    let mut e = vec![BigRational::one()];
    for k in 1..=n {
        let mut acc = BigRational::zero();
        for i in 1..=k {
            let t = &e[k - i] * &sums[i - 1];
            if i % 2 == 1 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        e.push(acc / BigRational::from_integer(BigInt::from(k)));
    }
    // χ(x) = Σ (-1)^k e_k x^{n-k}
    (0..=n)
        .map(|deg| {
            let k = n - deg;
            if k.is_multiple_of(2) {
                e[k].clone()
            } else {
                -e[k].clone()
            }
        })
        .collect()
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Characteristic polynomial over Q of multiplication by `a` on the whole tower
/// (monic of degree `dimension`, lowest degree first).
pub fn rational_charpoly(a: &FieldElement) -> Vec<BigRational> {
    let mut p = level_charpoly(a);
    let mut reps = a.tower.level_count() - a.level();
    while reps > 0 {
        p = poly_mul(&p, &p);
        reps -= 1;
    }
    p
}

/// True iff `a` is an algebraic integer.
pub fn is_algebraic_integer(a: &FieldElement) -> bool {
    // the basis θ^i ∏ g_j consists of algebraic integers
    if a.den.is_one() {
        return true;
    }
    level_charpoly(a).iter().all(|c| c.is_integer())
}
