//! Exact arithmetic in towers `K = Q(2cos(2π/N))(√r₁, …, √r_t)`.
//!
//! An element is stored as an integer coordinate vector over the tensor basis
//! `θ^i · ∏_{j∈S} g_j` together with one positive common denominator, where
//! `θ = 2cos(2π/N)` and `g_j` is the square root of the integral rescaling of
//! the j-th radicand. Coordinates are indexed by `S·D + i` with bit `j` of `S`
//! marking `g_{j+1}`.

mod charpoly;
mod embed;
mod format;
mod square;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::interval::{Dyadic, Interval};
use crate::poly::{self, IntPoly, Sturm};

pub use charpoly::{is_algebraic_integer, rational_charpoly, trace};
pub use embed::{
    apply_embedding, embedding_fixes, real_embeddings, EmbeddingEnumeration, RealEmbedding,
};
pub use square::try_sqrt;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("radicand {0} is not positive at the designated embedding")]
    NonRealRadicand(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("could not decide whether {0} is a square")]
    UndecidedSquare(String),
}

/// Arithmetic operation selector for [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub(crate) struct BaseRoot {
    galois_index: u64,
    /// Isolating interval with a strict sign change of the base polynomial.
    interval: Mutex<Interval>,
}

pub(crate) struct BaseField {
    conductor: u64,
    poly: IntPoly,
    degree: usize,
    roots: Vec<BaseRoot>,
    designated: usize,
    /// Power sums `Tr(θ^i)` for `i < degree`.
    power_sums: Vec<BigInt>,
}

pub(crate) struct Level {
    /// Radicand as given, an element of the preceding tower.
    radicand: FieldElement,
    /// Integral rescaling `radicand * scale²`, coordinates over the preceding level.
    scaled: Vec<BigInt>,
    scale: BigInt,
}

/// A real cyclotomic base field extended by a chain of square roots.
pub struct FieldTower {
    base: Arc<BaseField>,
    levels: Vec<Level>,
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldTower")
            .field("conductor", &self.base.conductor)
            .field("base_poly", &self.base.poly.to_string())
            .field(
                "radicands",
                &self
                    .levels
                    .iter()
                    .map(|l| l.radicand.to_string())
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl FieldTower {
    /// The base field `Q(2cos(2π/N))` with no square roots adjoined.
    pub fn cyclotomic(conductor: u64) -> Arc<FieldTower> {
        Arc::new(FieldTower {
            base: Arc::new(BaseField::new(conductor)),
            levels: Vec::new(),
        })
    }

    pub fn conductor(&self) -> u64 {
        self.base.conductor
    }

    pub fn base_poly(&self) -> &IntPoly {
        &self.base.poly
    }

    pub fn base_degree(&self) -> usize {
        self.base.degree
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn dimension(&self) -> usize {
        self.base.degree << self.levels.len()
    }

    /// The radicands in adjunction order.
    pub fn radicands(&self) -> Vec<FieldElement> {
        self.levels.iter().map(|l| l.radicand.clone()).collect()
    }

    /// Isolating interval for the designated root `2cos(2π/N)`.
    pub fn base_root_interval(&self) -> Interval {
        self.base.roots[self.base.designated]
            .interval
            .lock()
            .unwrap()
            .clone()
    }

    /// Galois indices `m` of the base roots `2cos(2πm/N)`, in ascending root order.
    pub fn base_galois_indices(&self) -> Vec<u64> {
        self.base.roots.iter().map(|r| r.galois_index).collect()
    }

    pub fn designated_root_index(&self) -> usize {
        self.base.designated
    }

    /// True when `self` is `other` or an intermediate level of `other`.
    pub fn is_prefix_of(&self, other: &FieldTower) -> bool {
        if self.base.conductor != other.base.conductor || self.levels.len() > other.levels.len() {
            return false;
        }
        self.levels
            .iter()
            .zip(&other.levels)
            .all(|(a, b)| a.scaled == b.scaled)
    }

    pub fn same_as(&self, other: &FieldTower) -> bool {
        std::ptr::eq(self, other)
            || (self.levels.len() == other.levels.len() && self.is_prefix_of(other))
    }

    /// The tower truncated to its first `levels` square roots.
    pub fn truncated(self: &Arc<Self>, levels: usize) -> Arc<FieldTower> {
        if levels == self.levels.len() {
            return self.clone();
        }
        if levels == 0 {
            return Arc::new(FieldTower {
                base: self.base.clone(),
                levels: Vec::new(),
            });
        }
        self.levels[levels - 1]
            .radicand
            .tower
            .extended_with(&self.levels[levels - 1])
    }

    fn extended_with(self: &Arc<Self>, level: &Level) -> Arc<FieldTower> {
        let mut levels: Vec<Level> = self
            .levels
            .iter()
            .map(|l| Level {
                radicand: l.radicand.clone(),
                scaled: l.scaled.clone(),
                scale: l.scale.clone(),
            })
            .collect();
        levels.push(Level {
            radicand: level.radicand.clone(),
            scaled: level.scaled.clone(),
            scale: level.scale.clone(),
        });
        Arc::new(FieldTower {
            base: self.base.clone(),
            levels,
        })
    }

    /// Adjoin `√r`. If `r` is already a square the tower is returned unchanged.
    ///
    /// Returns the (possibly new) tower and the positive square root of `r` in it.
    pub fn adjoin_sqrt(
        self: &Arc<Self>,
        r: &FieldElement,
    ) -> Result<(Arc<FieldTower>, FieldElement), FieldError> {
        let r = r.lift_to(self);
        if r.sign() <= 0 {
            return Err(FieldError::NonRealRadicand(r.to_string()));
        }
        if let Some(s) = try_sqrt(&r)? {
            return Ok((self.clone(), s));
        }
        let scale = r.den.clone();
        let scaled: Vec<BigInt> = r.num.iter().map(|c| c * &scale).collect();
        let level = Level {
            radicand: r,
            scaled,
            scale,
        };
        let tower = self.extended_with(&level);
        let root = tower.sqrt_generator(tower.levels.len() - 1);
        Ok((tower, root))
    }

    /// `√r_j` for the j-th radicand (0-based).
    pub fn sqrt_generator(self: &Arc<Self>, j: usize) -> FieldElement {
        let mut num = vec![BigInt::zero(); self.dimension()];
        num[(1usize << j) * self.base.degree] = BigInt::one();
        FieldElement::from_parts(self.clone(), num, self.levels[j].scale.clone())
    }

    fn base_mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let d = self.base.degree;
        if is_zero_slice(a) || is_zero_slice(b) {
            return vec![BigInt::zero(); d];
        }
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        self.base.reduce(prod)
    }

    /// Product of two coordinate slices of level `j` (length `D·2^j`).
    fn mul_rec(&self, j: usize, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        if j == 0 {
            return self.base_mul(a, b);
        }
        let h = a.len() / 2;
        let (a0, a1) = a.split_at(h);
        let (b0, b1) = b.split_at(h);
        let a1z = is_zero_slice(a1);
        let b1z = is_zero_slice(b1);
        let (c0, c1) = match (a1z, b1z) {
            (true, true) => (self.mul_rec(j - 1, a0, b0), vec![BigInt::zero(); h]),
            (true, false) => (self.mul_rec(j - 1, a0, b0), self.mul_rec(j - 1, a0, b1)),
            (false, true) => (self.mul_rec(j - 1, a0, b0), self.mul_rec(j - 1, a1, b0)),
            (false, false) => {
                let p0 = self.mul_rec(j - 1, a0, b0);
                let p1 = self.mul_rec(j - 1, a1, b1);
                let cross = if is_zero_slice(a0) || is_zero_slice(b0) {
                    vec_add(&self.mul_rec(j - 1, a0, b1), &self.mul_rec(j - 1, a1, b0))
                } else {
                    let s = self.mul_rec(j - 1, &vec_add(a0, a1), &vec_add(b0, b1));
                    vec_sub(&vec_sub(&s, &p0), &p1)
                };
                let c0 = vec_add(&p0, &self.mul_rec(j - 1, &p1, &self.levels[j - 1].scaled));
                (c0, cross)
            }
        };
        let mut out = c0;
        out.extend(c1);
        out
    }

    /// Inverse of a nonzero integer coordinate slice at level `j`, as `(numerator, denominator)`.
    fn inv_rec(&self, j: usize, a: &[BigInt]) -> (Vec<BigInt>, BigInt) {
        if j == 0 {
            return self.base.inverse(a);
        }
        let h = a.len() / 2;
        let (a0, a1) = a.split_at(h);
        if is_zero_slice(a1) {
            let (n, d) = self.inv_rec(j - 1, a0);
            let mut out = n;
            out.resize(2 * h, BigInt::zero());
            return (out, d);
        }
        // (a0 + a1 g)^-1 = (a0 - a1 g) / (a0² - r a1²)
        let norm = vec_sub(
            &self.mul_rec(j - 1, a0, a0),
            &self.mul_rec(
                j - 1,
                &self.mul_rec(j - 1, a1, a1),
                &self.levels[j - 1].scaled,
            ),
        );
        let (ninv, nden) = self.inv_rec(j - 1, &norm);
        let mut conj = a0.to_vec();
        conj.extend(a1.iter().map(|c| -c));
        let mut padded = ninv;
        padded.resize(2 * h, BigInt::zero());
        (self.mul_rec(j, &conj, &padded), nden)
    }
}

impl BaseField {
    fn new(conductor: u64) -> BaseField {
        let poly = poly::min_poly_two_cos(conductor);
        let degree = poly.degree().unwrap();
        let roots = isolate_base_roots(conductor, &poly);
        let designated = roots.len() - 1;
        let power_sums = power_sums(&poly);
        BaseField {
            conductor,
            poly,
            degree,
            roots,
            designated,
            power_sums,
        }
    }

    /// Reduce a coefficient vector modulo the monic base polynomial.
    fn reduce(&self, mut prod: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.degree;
        let p = self.poly.coeffs();
        for k in (d..prod.len()).rev() {
            if prod[k].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut prod[k]);
            for i in 0..d {
                if !p[i].is_zero() {
                    prod[k - d + i] -= &c * &p[i];
                }
            }
        }
        prod.truncate(d);
        prod.resize(d, BigInt::zero());
        prod
    }

    /// Inverse modulo the base polynomial by an integer extended Euclidean scheme:
    /// each remainder `r_i` is kept together with a cofactor `s_i` so that
    /// `r_i ≡ s_i · a`, with joint content removed after every step.
    fn inverse(&self, a: &[BigInt]) -> (Vec<BigInt>, BigInt) {
        let mut r0 = self.poly.clone();
        let mut s0 = IntPoly::zero();
        let mut r1 = IntPoly::new(a.to_vec());
        let mut s1 = IntPoly::one();
        assert!(!r1.is_zero(), "inverse of zero");
        while r1.degree().unwrap() > 0 {
            let (q, r, mult) = pseudo_divmod(&r0, &r1);
            let s = s0.scale(&mult).sub(&q.mul(&s1));
            let s = IntPoly::new(self.reduce(pad(s.coeffs(), self.degree)));
            let g = r.content().gcd(&s.content());
            let (r, s) = if g.is_zero() || g.is_one() {
                (r, s)
            } else {
                (
                    IntPoly::new(r.coeffs().iter().map(|c| c / &g).collect()),
                    IntPoly::new(s.coeffs().iter().map(|c| c / &g).collect()),
                )
            };
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        let c = r1.coeff(0);
        let mut num = pad(s1.coeffs(), self.degree);
        let mut den = c;
        if den.is_negative() {
            den = -den;
            num.iter_mut().for_each(|x| *x = -&*x);
        }
        (num, den)
    }

    /// Refine the i-th root interval to width at most `2^-bits` and return it.
    fn root_interval(&self, i: usize, bits: u64) -> Interval {
        let mut guard = self.roots[i].interval.lock().unwrap();
        if guard.width_below_pow2(bits as i64) {
            return guard.clone();
        }
        let refined = refine_root(&self.poly, &guard, bits);
        *guard = refined.clone();
        refined
    }
}

/// Pseudo-division `lc(b)^k a = q b + r`; returns `(q, r, lc(b)^k)`.
fn pseudo_divmod(a: &IntPoly, b: &IntPoly) -> (IntPoly, IntPoly, BigInt) {
    let db = b.degree().unwrap();
    let lb = b.leading().unwrap().clone();
    let mut r = a.clone();
    let mut q = IntPoly::zero();
    let mut mult = BigInt::one();
    while let Some(dr) = r.degree() {
        if dr < db {
            break;
        }
        let lr = r.leading().unwrap().clone();
        let mono = IntPoly::monomial(dr - db).scale(&lr);
        q = q.scale(&lb).add(&mono);
        r = r.scale(&lb).sub(&b.mul(&mono));
        mult *= &lb;
    }
    (q, r, mult)
}

fn pad(c: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut v = c.to_vec();
    if v.len() < len {
        v.resize(len, BigInt::zero());
    }
    v
}

fn power_sums(p: &IntPoly) -> Vec<BigInt> {
    // Newton: p_k = -(k a_{d-k} + sum_{i=1}^{k-1} a_{d-i} p_{k-i}) for a monic polynomial
    let d = p.degree().unwrap();
    let a = |i: isize| -> BigInt {
        if i < 0 {
            BigInt::zero()
        } else {
            p.coeff(i as usize)
        }
    };
    let mut ps = vec![BigInt::from(d)];
    for k in 1..d {
        let mut s = BigInt::from(k) * a(d as isize - k as isize);
        for i in 1..k {
            s += a(d as isize - i as isize) * &ps[k - i];
        }
        ps.push(-s);
    }
    ps
}

fn dyadic_from_f64(v: f64) -> Dyadic {
    if v == 0.0 {
        return Dyadic::zero();
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    Dyadic::new(BigInt::from(m) * sign, e)
}

fn isolate_base_roots(conductor: u64, p: &IntPoly) -> Vec<BaseRoot> {
    let d = p.degree().unwrap();
    if d == 1 {
        // conductors 1, 2, 3, 4, 6: the root is the integer -c0
        let r = Dyadic::from_bigint(-p.coeff(0));
        let m = if conductor == 1 { 0 } else { 1 };
        return vec![BaseRoot {
            galois_index: m,
            interval: Mutex::new(Interval::point(r)),
        }];
    }
    let mut approx: Vec<(f64, u64)> = (1..conductor.div_ceil(2))
        .filter(|m| m.gcd(&conductor) == 1)
        .map(|m| {
            (
                2.0 * (2.0 * std::f64::consts::PI * m as f64 / conductor as f64).cos(),
                m,
            )
        })
        .collect();
    approx.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    debug_assert_eq!(approx.len(), d);
    let min_gap = approx
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(f64::INFINITY, f64::min);
    let eps = (min_gap / 3.0).min(2f64.powi(-20));
    let eps = dyadic_from_f64(eps);
    let mut roots = Vec::with_capacity(d);
    for &(x, m) in &approx {
        let c = dyadic_from_f64(x);
        let lo = c.sub(&eps);
        let hi = c.add(&eps);
        let sl = p.sign_at(&lo);
        let sh = p.sign_at(&hi);
        if sl == std::cmp::Ordering::Equal || sh == std::cmp::Ordering::Equal || sl == sh {
            return isolate_by_sturm(p, &approx);
        }
        roots.push(BaseRoot {
            galois_index: m,
            interval: Mutex::new(Interval::new(lo, hi)),
        });
    }
    roots
}

/// Fallback isolation by Sturm bisection on [-2, 2].
fn isolate_by_sturm(p: &IntPoly, approx: &[(f64, u64)]) -> Vec<BaseRoot> {
    let sturm = Sturm::new(p);
    let mut out = Vec::new();
    let mut stack = vec![(Dyadic::from_i64(-3), Dyadic::from_i64(3))];
    while let Some((a, b)) = stack.pop() {
        let c = sturm.count_in(&a, &b);
        if c == 0 {
            continue;
        }
        if c == 1
            && p.sign_at(&a) != std::cmp::Ordering::Equal
            && p.sign_at(&b) != std::cmp::Ordering::Equal
        {
            out.push(Interval::new(a, b));
            continue;
        }
        let mid = a.add(&b).mul_pow2(-1);
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }
    out.sort_by(|x, y| x.lo().cmp(y.lo()));
    out.into_iter()
        .map(|iv| {
            let x = iv.to_f64();
            let m = approx
                .iter()
                .min_by(|a, b| (a.0 - x).abs().partial_cmp(&(b.0 - x).abs()).unwrap())
                .unwrap()
                .1;
            BaseRoot {
                galois_index: m,
                interval: Mutex::new(iv),
            }
        })
        .collect()
}

/// Shrink an isolating interval to width at most `2^-bits` by Newton steps
/// certified with exact endpoint signs, bisecting whenever Newton misbehaves.
fn refine_root(p: &IntPoly, iv: &Interval, bits: u64) -> Interval {
    use std::cmp::Ordering::Equal;
    let dp = p.derivative();
    let mut lo = iv.lo().clone();
    let mut hi = iv.hi().clone();
    let mut s_lo = p.sign_at(&lo);
    let target = bits as i64;
    let wp = bits + 32;
    loop {
        if hi.sub(&lo).magnitude_log2() <= -target || lo == hi {
            return Interval::new(lo, hi);
        }
        // Newton from the midpoint
        let mut x = lo.add(&hi).mul_pow2(-1);
        let mut ok = true;
        for _ in 0..64 {
            let (fv, kf) = p.value_at(&x);
            let (dv, kd) = dp.value_at(&x);
            if dv.is_zero() {
                ok = false;
                break;
            }
            if fv.is_zero() {
                break;
            }
            // f/f' = (fv / 2^kf) / (dv / 2^kd)
            let step =
                Dyadic::from_ratio(&(fv << kd), &(dv << kf), wp, crate::interval::Round::Down);
            x = x.sub(&step).round(wp + 8, crate::interval::Round::Down);
            if x < lo || x > hi {
                ok = false;
                break;
            }
            if step.is_zero() || step.magnitude_log2() < -(target + 4) {
                break;
            }
        }
        if ok {
            let eps = Dyadic::pow2(-(target + 2));
            let a = x.sub(&eps);
            let b = x.add(&eps);
            if a >= lo && b <= hi {
                let sa = p.sign_at(&a);
                let sb = p.sign_at(&b);
                if sa != Equal && sb != Equal && sa != sb {
                    return Interval::new(a, b);
                }
            }
        }
        // a few bisection steps
        for _ in 0..4 {
            let mid = lo.add(&hi).mul_pow2(-1);
            let sm = p.sign_at(&mid);
            if sm == Equal {
                return Interval::point(mid);
            }
            if sm == s_lo {
                lo = mid;
                s_lo = sm;
            } else {
                hi = mid;
            }
        }
    }
}

fn is_zero_slice(a: &[BigInt]) -> bool {
    a.iter().all(|c| c.is_zero())
}

fn vec_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn vec_sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// An element of a [`FieldTower`].
#[derive(Clone)]
pub struct FieldElement {
    tower: Arc<FieldTower>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl FieldElement {
    fn from_parts(tower: Arc<FieldTower>, mut num: Vec<BigInt>, mut den: BigInt) -> FieldElement {
        debug_assert_eq!(num.len(), tower.dimension());
        assert!(!den.is_zero());
        if den.is_negative() {
            den = -den;
            num.iter_mut().for_each(|c| *c = -&*c);
        }
        let mut g = den.clone();
        for c in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            num.iter_mut().for_each(|c| *c = &*c / &g);
            den /= &g;
        }
        FieldElement { tower, num, den }
    }

    pub fn zero(tower: &Arc<FieldTower>) -> FieldElement {
        FieldElement {
            tower: tower.clone(),
            num: vec![BigInt::zero(); tower.dimension()],
            den: BigInt::one(),
        }
    }

    pub fn one(tower: &Arc<FieldTower>) -> FieldElement {
        FieldElement::from_int(tower, 1)
    }

    pub fn from_int(tower: &Arc<FieldTower>, v: i64) -> FieldElement {
        FieldElement::from_rational(tower, &BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(tower: &Arc<FieldTower>, n: i64, d: i64) -> FieldElement {
        FieldElement::from_rational(tower, &BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(tower: &Arc<FieldTower>, q: &BigRational) -> FieldElement {
        let mut num = vec![BigInt::zero(); tower.dimension()];
        num[0] = q.numer().clone();
        FieldElement::from_parts(tower.clone(), num, q.denom().clone())
    }

    /// Build from rational coordinates over the tensor basis.
    pub fn from_coords(tower: &Arc<FieldTower>, coords: &[BigRational]) -> FieldElement {
        assert_eq!(
            coords.len(),
            tower.dimension(),
            "coordinate vector has the wrong length"
        );
        let den = coords.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let num = coords
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        FieldElement::from_parts(tower.clone(), num, den)
    }

    /// `θ = 2cos(2π/N)`.
    pub fn theta(tower: &Arc<FieldTower>) -> FieldElement {
        let d = tower.base_degree();
        if d == 1 {
            return FieldElement::from_rational(
                tower,
                &BigRational::from_integer(-tower.base_poly().coeff(0)),
            );
        }
        let mut num = vec![BigInt::zero(); tower.dimension()];
        num[1] = BigInt::one();
        FieldElement::from_parts(tower.clone(), num, BigInt::one())
    }

    /// `2cos(2πk/N)` as the Dickson polynomial `V_k(θ)`.
    pub fn two_cos(tower: &Arc<FieldTower>, k: i64) -> FieldElement {
        let n = tower.conductor() as i64;
        let k = k.rem_euclid(n);
        let k = k.min(n - k) as usize;
        let v = poly::dickson(k);
        let theta = FieldElement::theta(tower);
        // Horner on V_k(θ) with reduction
        let mut acc = FieldElement::zero(tower);
        for c in v.coeffs().iter().rev() {
            acc = &(&acc * &theta)
                + &FieldElement::from_rational(tower, &BigRational::from_integer(c.clone()));
        }
        acc
    }

    /// `cos(π a / b)`; `2b` must divide the conductor.
    pub fn cos_pi(tower: &Arc<FieldTower>, a: i64, b: i64) -> FieldElement {
        let n = tower.conductor() as i64;
        assert!(
            b != 0 && n % (2 * b) == 0,
            "cos(π·{a}/{b}) does not lie in Q(2cos(2π/{n}))"
        );
        let k = a * (n / (2 * b));
        FieldElement::two_cos(tower, k).scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    /// Base-field element `sum c_i θ^i`.
    pub fn from_base_poly(tower: &Arc<FieldTower>, coeffs: &[BigRational]) -> FieldElement {
        let d = tower.base_degree();
        let theta = FieldElement::theta(tower);
        if coeffs.len() <= d && d > 1 {
            let mut c = coeffs.to_vec();
            c.resize(tower.dimension(), BigRational::zero());
            return FieldElement::from_coords(tower, &c);
        }
        let mut acc = FieldElement::zero(tower);
        for c in coeffs.iter().rev() {
            acc = &(&acc * &theta) + &FieldElement::from_rational(tower, c);
        }
        acc
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn coords(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    /// Integer numerator coordinates; the element equals `numerator / denominator`.
    pub fn numerator(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        is_zero_slice(&self.num)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && is_zero_slice(&self.num[1..])
    }

    /// True when every coordinate except the constant one vanishes.
    pub fn is_rational(&self) -> bool {
        is_zero_slice(&self.num[1..])
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.num[0].clone(), self.den.clone()))
    }

    /// Smallest tower level containing the element (0 = base field).
    pub fn level(&self) -> usize {
        let d = self.tower.base_degree();
        let mut j = self.tower.level_count();
        while j > 0 && is_zero_slice(&self.num[(d << (j - 1))..(d << j)]) {
            j -= 1;
        }
        j
    }

    pub fn in_base(&self) -> bool {
        self.level() == 0
    }

    /// The element viewed in an extension of its tower.
    pub fn lift_to(&self, tower: &Arc<FieldTower>) -> FieldElement {
        if Arc::ptr_eq(&self.tower, tower) {
            return self.clone();
        }
        assert!(
            self.tower.is_prefix_of(tower),
            "element does not belong to a subfield of the target tower"
        );
        let mut num = self.num.clone();
        num.resize(tower.dimension(), BigInt::zero());
        FieldElement {
            tower: tower.clone(),
            num,
            den: self.den.clone(),
        }
    }

    /// Bring two elements into a common tower.
    fn unify(&self, other: &FieldElement) -> (FieldElement, FieldElement) {
        if Arc::ptr_eq(&self.tower, &other.tower) {
            return (self.clone(), other.clone());
        }
        if self.tower.is_prefix_of(&other.tower) {
            (self.lift_to(&other.tower), other.clone())
        } else if other.tower.is_prefix_of(&self.tower) {
            (self.clone(), other.lift_to(&self.tower))
        } else {
            panic!("elements belong to unrelated towers");
        }
    }

    fn same_tower(&self, other: &FieldElement) -> bool {
        Arc::ptr_eq(&self.tower, &other.tower)
    }

    fn add_impl(&self, other: &FieldElement, negate: bool) -> FieldElement {
        if !self.same_tower(other) {
            let (a, b) = self.unify(other);
            return a.add_impl(&b, negate);
        }
        let (la, lb) = if self.den == other.den {
            (BigInt::one(), BigInt::one())
        } else {
            let g = self.den.gcd(&other.den);
            (&other.den / &g, &self.den / &g)
        };
        let den = &self.den * &la;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(x, y)| {
                let y = if lb.is_one() { y.clone() } else { y * &lb };
                let x = if la.is_one() { x.clone() } else { x * &la };
                if negate {
                    x - y
                } else {
                    x + y
                }
            })
            .collect();
        FieldElement::from_parts(self.tower.clone(), num, den)
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.add_impl(other, false)
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.add_impl(other, true)
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            tower: self.tower.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> FieldElement {
        let num = self.num.iter().map(|c| c * q.numer()).collect();
        FieldElement::from_parts(self.tower.clone(), num, &self.den * q.denom())
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        if !self.same_tower(other) {
            let (a, b) = self.unify(other);
            return a.mul(&b);
        }
        if self.is_zero() || other.is_zero() {
            return FieldElement::zero(&self.tower);
        }
        if let Some(q) = self.as_rational() {
            return other.scale(&q);
        }
        if let Some(q) = other.as_rational() {
            return self.scale(&q);
        }
        let j = self.level().max(other.level());
        let len = self.tower.base_degree() << j;
        let mut num = self.tower.mul_rec(j, &self.num[..len], &other.num[..len]);
        num.resize(self.tower.dimension(), BigInt::zero());
        FieldElement::from_parts(self.tower.clone(), num, &self.den * &other.den)
    }

    pub fn square(&self) -> FieldElement {
        self.mul(self)
    }

    pub fn pow(&self, mut e: u32) -> FieldElement {
        let mut base = self.clone();
        let mut acc = FieldElement::one(&self.tower);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(FieldElement::from_rational(&self.tower, &q.recip()));
        }
        let j = self.level();
        let len = self.tower.base_degree() << j;
        let (mut n, d) = self.tower.inv_rec(j, &self.num[..len]);
        n.resize(self.tower.dimension(), BigInt::zero());
        // (num/den)^-1 = den * n / d
        let n = n.into_iter().map(|c| c * &self.den).collect();
        Ok(FieldElement::from_parts(self.tower.clone(), n, d))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Sign at the designated embedding.
    pub fn sign(&self) -> i32 {
        RealEmbedding::identity(&self.tower).sign(self)
    }

    /// Decimal value at the designated embedding with `digits` certified digits.
    pub fn decimal(&self, digits: usize) -> String {
        apply_embedding(&RealEmbedding::identity(&self.tower), self, digits).to_decimal(digits)
    }

    pub fn to_f64(&self) -> f64 {
        apply_embedding(&RealEmbedding::identity(&self.tower), self, 17).to_f64()
    }

    /// Coefficients `c_i` of the mask-`s` block as a base-field element.
    pub(crate) fn block(&self, s: usize) -> FieldElement {
        let d = self.tower.base_degree();
        let base = self.tower.truncated(0);
        FieldElement::from_parts(
            base,
            self.num[s * d..(s + 1) * d].to_vec(),
            self.den.clone(),
        )
    }
}

/// Exact field arithmetic.
pub fn arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement, FieldError> {
    Ok(match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b)?,
    })
}

/// Build `Q(2cos(2π/N))(√r₁, …)`. Each radicand may live in the base field or in
/// any tower sharing the conductor whose radicands form a prefix of the ones
/// adjoined so far; radicands that are already squares are absorbed.
pub fn make_tower(
    conductor: u64,
    radicands: &[FieldElement],
) -> Result<Arc<FieldTower>, FieldError> {
    let mut tower = FieldTower::cyclotomic(conductor);
    for r in radicands {
        assert!(
            r.tower.is_prefix_of(&tower),
            "radicand does not lie in the tower built so far"
        );
        tower = tower.adjoin_sqrt(&r.lift_to(&tower))?.0;
    }
    Ok(tower)
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        if self.same_tower(other) || self.tower.same_as(&other.tower) {
            return self.den == other.den && self.num == other.num;
        }
        if self.tower.is_prefix_of(&other.tower) || other.tower.is_prefix_of(&self.tower) {
            let (a, b) = self.unify(other);
            return a.den == b.den && a.num == b.num;
        }
        false
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({})", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format::to_expr(self))
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        FieldElement::add(self, rhs)
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        FieldElement::sub(self, rhs)
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        FieldElement::mul(self, rhs)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    pub(crate) fn sqrt3_tower() -> Arc<FieldTower> {
        FieldTower::cyclotomic(12)
    }

    #[test]
    fn test_make_tower_rationals() {
        let t = make_tower(1, &[]).unwrap();
        assert_eq!(t.dimension(), 1);
        let two = FieldElement::theta(&t);
        assert_eq!(two, FieldElement::from_int(&t, 2));
    }

    #[test]
    fn test_sqrt3_squared() {
        let t = sqrt3_tower();
        let s = FieldElement::theta(&t);
        assert_eq!(&s * &s, FieldElement::from_int(&t, 3));
    }

    #[test]
    fn test_golden_ratio_identity() {
        let t = FieldTower::cyclotomic(5);
        // √5 = 2θ + 1 for θ = 2cos(2π/5)
        let sqrt5 = &FieldElement::theta(&t).scale(&q(2, 1)) + &FieldElement::one(&t);
        assert_eq!(&sqrt5 * &sqrt5, FieldElement::from_int(&t, 5));
        let phi = (&sqrt5 + &FieldElement::one(&t)).scale(&q(1, 2));
        let psi = (&sqrt5 - &FieldElement::one(&t)).scale(&q(1, 2));
        assert!((&phi * &psi).is_one());
    }

    #[test]
    fn test_k12_dimension_and_a12() {
        let base = sqrt3_tower();
        let sqrt3 = FieldElement::theta(&base);
        let r = &FieldElement::from_int(&base, 3) + &sqrt3;
        let k12 = make_tower(12, &[FieldElement::from_int(&base, 2), r]).unwrap();
        assert_eq!(k12.dimension(), 8);
        let a2 =
            (&FieldElement::from_int(&k12, 3) + &sqrt3.lift_to(&k12.truncated(0))).scale(&q(1, 3));
        let (t, a) = k12.adjoin_sqrt(&a2).unwrap();
        // √((3+√3)/3) = √(3+√3)/√3 already lies in K_12
        assert_eq!(t.dimension(), 8);
        assert_eq!(a.square(), a2.lift_to(&t));
    }

    #[test]
    fn test_non_real_radicand() {
        let base = sqrt3_tower();
        let r = &FieldElement::theta(&base) - &FieldElement::from_int(&base, 3);
        assert!(matches!(
            make_tower(12, &[r]),
            Err(FieldError::NonRealRadicand(_))
        ));
    }

    #[test]
    fn test_inverse_in_tower() {
        let base = FieldTower::cyclotomic(7);
        let theta = FieldElement::theta(&base);
        let (t, s) = base
            .adjoin_sqrt(&(&theta + &FieldElement::from_int(&base, 3)))
            .unwrap();
        let x = &(&s + &theta.lift_to(&t)) + &FieldElement::from_ratio(&t, 1, 3);
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        assert_eq!(
            FieldElement::zero(&t).inv(),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn test_two_cos_values() {
        let t = FieldTower::cyclotomic(24);
        let c = FieldElement::cos_pi(&t, 1, 4);
        assert_eq!(c.square(), FieldElement::from_ratio(&t, 1, 2));
        let c6 = FieldElement::cos_pi(&t, 1, 6);
        assert_eq!(c6.square(), FieldElement::from_ratio(&t, 3, 4));
        assert!(
            (FieldElement::cos_pi(&t, 1, 12).to_f64() - (std::f64::consts::PI / 12.0).cos()).abs()
                < 1e-15
        );
    }

    #[test]
    fn test_root_intervals_refine() {
        let t = FieldTower::cyclotomic(31);
        let iv = t.base.root_interval(t.base.designated, 200);
        assert!(iv.width_below_pow2(200));
        let v = 2.0 * (2.0 * std::f64::consts::PI / 31.0).cos();
        assert!((iv.to_f64() - v).abs() < 1e-15);
    }
}
