//! Deciding whether an element is a square, and extracting the root.
//!
//! Tower levels reduce to the level below: `(u + v g)² = x0 + x1 g` forces
//! `u² = (x0 ± √(x0² − r x1²)) / 2`. In the base field the ring of integers is
//! `Z[θ]`, so a square root of an integral element has integral coordinates in
//! the Dickson basis `1, V_1(θ), …`; non-squares are usually rejected first by
//! a quadratic non-residue at a prime that splits completely.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::embed::RealEmbedding;
use super::{FieldElement, FieldError, FieldTower};
use crate::poly;

/// Largest base degree for which sign patterns are enumerated.
const MAX_ENUM_DEGREE: usize = 24;
/// Number of split primes tried for a non-residue certificate.
const QNR_PRIMES: usize = 24;

/// A square root of `a` in its own tower, positive at the designated embedding,
/// or `None` if `a` is not a square there.
pub fn try_sqrt(a: &FieldElement) -> Result<Option<FieldElement>, FieldError> {
    if a.is_zero() {
        return Ok(Some(a.clone()));
    }
    if a.sign() < 0 {
        return Ok(None);
    }
    let r = sqrt_level(&a.tower, a.tower.level_count(), a)?;
    Ok(r.map(|s| if s.sign() < 0 { s.neg() } else { s }))
}

fn split(x: &FieldElement, j: usize) -> (FieldElement, FieldElement) {
    let h = x.tower.base_degree() << (j - 1);
    let dim = x.tower.dimension();
    let mut lo = vec![BigInt::zero(); dim];
    let mut hi = vec![BigInt::zero(); dim];
    lo[..h].clone_from_slice(&x.num[..h]);
    hi[..h].clone_from_slice(&x.num[h..2 * h]);
    (
        FieldElement::from_parts(x.tower.clone(), lo, x.den.clone()),
        FieldElement::from_parts(x.tower.clone(), hi, x.den.clone()),
    )
}

fn sqrt_level(
    tower: &Arc<FieldTower>,
    j: usize,
    x: &FieldElement,
) -> Result<Option<FieldElement>, FieldError> {
    if x.is_zero() {
        return Ok(Some(x.clone()));
    }
    if j == 0 {
        return base_sqrt(x);
    }
    let (x0, x1) = split(x, j);
    let mut g_num = vec![BigInt::zero(); tower.dimension()];
    g_num[tower.base_degree() << (j - 1)] = BigInt::one();
    let g = FieldElement::from_parts(tower.clone(), g_num, BigInt::one());
    let mut r_num = tower.levels[j - 1].scaled.clone();
    r_num.resize(tower.dimension(), BigInt::zero());
    let r = FieldElement::from_parts(tower.clone(), r_num, BigInt::one());
    if x1.is_zero() {
        if let Some(u) = sqrt_level(tower, j - 1, &x0)? {
            return Ok(Some(u));
        }
        if let Some(v) = sqrt_level(tower, j - 1, &x0.div(&r)?)? {
            return Ok(Some(v.mul(&g)));
        }
        return Ok(None);
    }
    let norm = x0.square().sub(&r.mul(&x1.square()));
    let Some(w) = sqrt_level(tower, j - 1, &norm)? else {
        return Ok(None);
    };
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for w in [w.clone(), w.neg()] {
        let h = x0.add(&w).scale(&half);
        if h.is_zero() {
            continue;
        }
        if let Some(u) = sqrt_level(tower, j - 1, &h)? {
            let v = x1.scale(&half).div(&u)?;
            let y = u.add(&v.mul(&g));
            if &y.square() == x {
                return Ok(Some(y));
            }
        }
    }
    Ok(None)
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

fn base_sqrt(x: &FieldElement) -> Result<Option<FieldElement>, FieldError> {
    let tower = &x.tower;
    let b = x.block(0);
    if let Some(q) = b.as_rational() {
        if let Some(s) = rational_sqrt(&q) {
            return Ok(Some(FieldElement::from_rational(tower, &s)));
        }
        if q.is_negative() || b.tower.base_degree() == 1 {
            return Ok(None);
        }
    }
    let base = b.tower.clone();
    let n = base.conductor();
    let d = base.base_degree();
    // b = B/den is a square iff B·den is; the latter lies in Z[θ]
    let int: Vec<BigInt> = b.num.iter().map(|c| c * &b.den).collect();
    if has_nonresidue(&int, n) {
        return Ok(None);
    }
    let conj: Vec<f64> = (0..d)
        .map(|i| {
            let e = RealEmbedding {
                tower: base.clone(),
                root_index: i,
                signs: Vec::new(),
            };
            let v = FieldElement::from_parts(base.clone(), int.clone(), BigInt::one());
            e.eval(&v, 64)
        })
        .map(|iv| {
            if iv.sign() == Some(std::cmp::Ordering::Less) {
                f64::NAN
            } else {
                iv.to_f64().max(0.0)
            }
        })
        .collect();
    if conj.iter().any(|v| v.is_nan()) {
        return Ok(None);
    }
    if d > MAX_ENUM_DEGREE {
        return Err(FieldError::UndecidedSquare(b.to_string()));
    }
    match enumerate_dickson(&base, &int, &conj) {
        Some(Some(c)) => {
            let root = FieldElement::from_parts(base.clone(), c, b.den.clone());
            Ok(Some(root.lift_to(tower)))
        }
        Some(None) => Ok(None),
        None => Err(FieldError::UndecidedSquare(b.to_string())),
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut dd = n - 1;
    let mut s = 0;
    while dd.is_multiple_of(2) {
        dd /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, dd, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Look for a prime `p ≡ 1 (mod N)` and a root `ρ` of the base polynomial mod `p`
/// at which the element is a quadratic non-residue; this proves it is not a square.
fn has_nonresidue(int: &[BigInt], n: u64) -> bool {
    let factors = prime_factors(n);
    let mut found = 0;
    let mut p = (1u64 << 20) / n * n + 1;
    while found < QNR_PRIMES {
        p += n;
        if !is_prime(p) {
            continue;
        }
        found += 1;
        let Some(zeta) = (2..p)
            .map(|g| pow_mod(g, (p - 1) / n, p))
            .find(|&z| factors.iter().all(|&q| pow_mod(z, n / q, p) != 1))
        else {
            continue;
        };
        let coeffs: Vec<u64> = int
            .iter()
            .map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap())
            .collect();
        for m in (1..n.div_ceil(2)).filter(|m| m.gcd(&n) == 1) {
            let zm = pow_mod(zeta, m, p);
            let rho = (zm + pow_mod(zm, p - 2, p)) % p;
            let mut v = 0u64;
            for &c in coeffs.iter().rev() {
                v = (mul_mod(v, rho, p) + c) % p;
            }
            if v != 0 && pow_mod(v, (p - 1) / 2, p) == p - 1 {
                return true;
            }
        }
    }
    false
}

/// Search all sign patterns of the conjugate square roots for an integral
/// Dickson coordinate vector. `None` means the numerics were too coarse to decide.
fn enumerate_dickson(
    base: &Arc<FieldTower>,
    int: &[BigInt],
    conj: &[f64],
) -> Option<Option<Vec<BigInt>>> {
    let d = conj.len();
    let n = base.conductor();
    let ms = base.base_galois_indices();
    // W[i][j] = V_j(ρ_i) with V_0 replaced by 1
    let w: Vec<Vec<f64>> = ms
        .iter()
        .map(|&m| {
            (0..d)
                .map(|j| {
                    if j == 0 {
                        1.0
                    } else {
                        2.0 * (2.0 * std::f64::consts::PI * (j as u64 * m) as f64 / n as f64).cos()
                    }
                })
                .collect()
        })
        .collect();
    let winv = invert(&w)?;
    let y: Vec<f64> = conj.iter().map(|v| v.sqrt()).collect();
    let bound = (0..d)
        .map(|j| (0..d).map(|i| winv[j][i].abs() * y[i]).sum::<f64>())
        .fold(0.0, f64::max);
    if bound.is_nan() || bound >= 2f64.powi(36) {
        return None;
    }
    let fixed = base.designated_root_index();
    let free: Vec<usize> = (0..d).filter(|&i| i != fixed).collect();
    let mut eps = vec![1.0f64; d];
    let compute = |eps: &[f64]| -> Vec<f64> {
        (0..d)
            .map(|j| (0..d).map(|i| winv[j][i] * eps[i] * y[i]).sum())
            .collect()
    };
    let mut k = compute(&eps);
    let total: u64 = 1 << free.len();
    let dickson = poly::dickson_table(d.saturating_sub(1));
    for step in 0..total {
        if step > 0 {
            let bit = step.trailing_zeros() as usize;
            let i = free[bit];
            eps[i] = -eps[i];
            if step % 256 == 0 {
                k = compute(&eps);
            } else {
                for (j, kj) in k.iter_mut().enumerate() {
                    *kj += 2.0 * eps[i] * y[i] * winv[j][i];
                }
            }
        }
        if k.iter().all(|v| (v - v.round()).abs() < 0.1) {
            // convert Dickson coordinates to the power basis and verify exactly
            let mut c = vec![BigInt::zero(); d];
            for (j, kj) in k.iter().enumerate() {
                let kj = BigInt::from(kj.round() as i64);
                if kj.is_zero() {
                    continue;
                }
                if j == 0 {
                    c[0] += kj;
                } else {
                    for (i, v) in dickson[j].coeffs().iter().enumerate() {
                        c[i] += &kj * v;
                    }
                }
            }
            let cand = FieldElement::from_parts(base.clone(), c.clone(), BigInt::one());
            if cand.square().num == int {
                return Some(Some(c));
            }
        }
    }
    Some(None)
}

fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv =
            (col..n).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        let p = a[col][col];
        a[col].iter_mut().for_each(|v| *v /= p);
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    a[r].iter_mut()
                        .zip(&pivot_row)
                        .for_each(|(v, pv)| *v -= f * pv);
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}
