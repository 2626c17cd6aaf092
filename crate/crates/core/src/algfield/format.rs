//! Rendering elements in the weight-expression grammar.
//!
//! Base-field parts are written in the Dickson basis, i.e. as rational
//! combinations of `cos(pi*a/b)`, which keeps the output short and readable.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::FieldElement;
use crate::poly;

fn rational_str(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Terms `(coefficient, atom)` of a base-field element; an empty atom is the constant term.
fn base_terms(coeffs: &[BigRational], conductor: u64) -> Vec<(BigRational, String)> {
    let d = coeffs.len();
    let mut c = coeffs.to_vec();
    let table = poly::dickson_table(d.saturating_sub(1));
    let mut k = vec![BigRational::zero(); d];
    for j in (1..d).rev() {
        let kj = c[j].clone();
        if kj.is_zero() {
            continue;
        }
        for (i, v) in table[j].coeffs().iter().enumerate() {
            c[i] -= &kj * BigRational::from_integer(v.clone());
        }
        k[j] = kj;
    }
    k[0] = c[0].clone();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut out = Vec::new();
    if !k[0].is_zero() {
        out.push((k[0].clone(), String::new()));
    }
    for (j, kj) in k.iter().enumerate().skip(1) {
        if kj.is_zero() {
            continue;
        }
        // V_j(θ) = 2cos(2πj/N) = 2cos(π·2j/N)
        let g = (2 * j as u64).gcd(&conductor);
        out.push((
            kj * &two,
            format!("cos(pi*{}/{})", 2 * j as u64 / g, conductor / g),
        ));
    }
    out
}

fn join_terms(terms: &[(BigRational, String)]) -> String {
    let mut s = String::new();
    for (i, (c, atom)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if atom.is_empty() {
            s.push_str(&rational_str(&mag));
        } else if mag.is_one() {
            s.push_str(atom);
        } else {
            s.push_str(&rational_str(&mag));
            s.push('*');
            s.push_str(atom);
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

pub(crate) fn to_expr(a: &FieldElement) -> String {
    let tower = &a.tower;
    let d = tower.base_degree();
    let levels = a.level();
    let mut terms: Vec<(BigRational, String)> = Vec::new();
    for mask in 0..(1usize << levels) {
        let block: Vec<BigRational> = a.num[mask * d..(mask + 1) * d]
            .iter()
            .map(|c| BigRational::new(c.clone(), a.den.clone()))
            .collect();
        if block.iter().all(|c| c.is_zero()) {
            continue;
        }
        let roots: Vec<String> = (0..levels)
            .filter(|j| mask >> j & 1 == 1)
            .map(|j| {
                let lvl = &tower.levels[j];
                let r = FieldElement::from_parts(
                    lvl.radicand.tower.clone(),
                    pad(&lvl.scaled, lvl.radicand.tower.dimension()),
                    BigInt::one(),
                );
                format!("sqrt({})", to_expr(&r))
            })
            .collect();
        let bt = base_terms(&block, tower.conductor());
        if roots.is_empty() {
            terms.extend(bt);
            continue;
        }
        let root_str = roots.join("*");
        if bt.len() == 1 {
            let (c, atom) = &bt[0];
            let atom = if atom.is_empty() {
                root_str
            } else {
                format!("{atom}*{root_str}")
            };
            terms.push((c.clone(), atom));
        } else {
            terms.push((
                BigRational::one(),
                format!("({})*{root_str}", join_terms(&bt)),
            ));
        }
    }
    join_terms(&terms)
}

fn pad(c: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut v = c.to_vec();
    v.resize(len, BigInt::zero());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algfield::FieldTower;

    #[test]
    fn test_render_basic() {
        let t = FieldTower::cyclotomic(24);
        assert_eq!(FieldElement::cos_pi(&t, 1, 12).to_string(), "cos(pi*1/12)");
        assert_eq!(FieldElement::from_ratio(&t, -3, 4).to_string(), "-3/4");
        assert_eq!(FieldElement::zero(&t).to_string(), "0");
        let x = &FieldElement::one(&t)
            - &FieldElement::cos_pi(&t, 1, 4).scale(&BigRational::from_integer(BigInt::from(2)));
        assert_eq!(x.to_string(), "1 - 2*cos(pi*1/4)");
    }

    #[test]
    fn test_render_sqrt() {
        let base = FieldTower::cyclotomic(12);
        let (_t, s) = base
            .adjoin_sqrt(&FieldElement::from_ratio(&base, 2, 3))
            .unwrap();
        assert_eq!(s.to_string(), "1/3*sqrt(6)");
    }
}
