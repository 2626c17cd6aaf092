//! Dense integer polynomials, cyclotomic folding and Sturm sequences.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::interval::Dyadic;

/// Polynomial with arbitrary-precision integer coefficients, lowest degree first.
///
/// The coefficient vector is kept trimmed, so the leading coefficient is nonzero
/// unless the polynomial is zero (empty vector).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::from_i64(&[1])
    }

    /// x^k
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        IntPoly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        IntPoly::new(out)
    }

    /// Multiply by x^k - 1.
    fn mul_binomial(&self, k: usize) -> IntPoly {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + k];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i + k] += c;
            out[i] -= c;
        }
        IntPoly::new(out)
    }

    /// Exact division by x^k - 1; panics if the division is not exact.
    fn div_binomial(&self, k: usize) -> IntPoly {
        // self = q * (x^k - 1) gives q_i = a_{i+k} + q_{i+k}, read from the top down.
        let n = self.coeffs.len();
        assert!(n > k, "binomial does not divide");
        let qlen = n - k;
        let mut q = vec![BigInt::zero(); qlen];
        for i in (0..qlen).rev() {
            q[i] = self.coeffs[i + k].clone();
            if i + k < qlen {
                let above = q[i + k].clone();
                q[i] += above;
            }
        }
        let q = IntPoly::new(q);
        debug_assert_eq!(q.mul_binomial(k), *self);
        q
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide by the content and make the leading coefficient positive.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Evaluate at an integer.
    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// `2^(k*deg) * p(m / 2^k)` as an integer, for a dyadic point `m * 2^-k` with `k >= 0`.
    pub(crate) fn eval_scaled(&self, m: &BigInt, k: u64) -> BigInt {
        let Some(d) = self.degree() else {
            return BigInt::zero();
        };
        let mut acc = self.coeffs[d].clone();
        for i in (0..d).rev() {
            acc = acc * m + (&self.coeffs[i] << (k * (d - i) as u64));
        }
        acc
    }

    /// Exact sign of the polynomial at a dyadic point.
    pub fn sign_at(&self, x: &Dyadic) -> Ordering {
        let (m, k) = x.as_fraction_pow2();
        self.eval_scaled(&m, k).sign_ord()
    }

    /// Exact value at a dyadic point, as `(numerator, k)` meaning `numerator / 2^(k*deg)`.
    pub(crate) fn value_at(&self, x: &Dyadic) -> (BigInt, u64) {
        let (m, k) = x.as_fraction_pow2();
        (
            self.eval_scaled(&m, k),
            k * self.degree().unwrap_or(0) as u64,
        )
    }

    /// Pseudo-remainder of `self` by `other`, sign-corrected so that it is a
    /// positive multiple of the true remainder.
    pub fn signed_pseudo_rem(&self, other: &IntPoly) -> IntPoly {
        let db = other.degree().expect("division by zero polynomial");
        let lb = other.leading().unwrap().clone();
        let mut r = self.clone();
        let mut steps = 0usize;
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.leading().unwrap().clone();
            let shifted = other.mul(&IntPoly::monomial(dr - db)).scale(&lr);
            r = r.scale(&lb).sub(&shifted);
            steps += 1;
        }
        if lb.is_negative() && steps % 2 == 1 {
            r = r.neg();
        }
        r
    }

    /// Greatest common divisor up to a constant, as a primitive polynomial.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let r = a.signed_pseudo_rem(&b).primitive();
            a = b;
            b = r;
        }
        a.primitive()
    }

    /// Squarefree part `p / gcd(p, p')`, primitive.
    pub fn squarefree(&self) -> IntPoly {
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.primitive();
        }
        exact_div(&self.primitive(), &g).primitive()
    }
}

trait SignOrd {
    fn sign_ord(&self) -> Ordering;
}

impl SignOrd for BigInt {
    fn sign_ord(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

/// Exact division of integer polynomials over the rationals, rescaled to integers.
fn exact_div(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = b.degree().unwrap();
    let lb = BigRational::from_integer(b.leading().unwrap().clone());
    let mut r: Vec<BigRational> = a
        .coeffs
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    let da = a.degree().unwrap();
    let mut q = vec![BigRational::zero(); da - db + 1];
    for i in (0..=da - db).rev() {
        let c = &r[i + db] / &lb;
        for (j, bc) in b.coeffs.iter().enumerate() {
            r[i + j] -= &c * BigRational::from_integer(bc.clone());
        }
        q[i] = c;
    }
    let den = q.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    IntPoly::new(
        q.iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect(),
    )
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}x", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}x^{i}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

/// Euler's totient.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn mobius(mut n: u64) -> i32 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// The n-th cyclotomic polynomial, as the Möbius product of binomials x^d - 1.
pub fn cyclotomic(n: u64) -> IntPoly {
    assert!(n >= 1);
    let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut p = IntPoly::one();
    for &d in &divisors {
        if mobius(n / d) == 1 {
            p = p.mul_binomial(d as usize);
        }
    }
    for &d in &divisors {
        if mobius(n / d) == -1 {
            p = p.div_binomial(d as usize);
        }
    }
    p
}

/// Dickson polynomials V_k with V_0 = 2, V_1 = x, V_k = x V_{k-1} - V_{k-2},
/// so that V_k(2cos t) = 2cos(kt).
pub fn dickson(k: usize) -> IntPoly {
    dickson_table(k).pop().unwrap()
}

/// V_0, ..., V_k.
pub fn dickson_table(k: usize) -> Vec<IntPoly> {
    let mut out = vec![IntPoly::from_i64(&[2])];
    if k >= 1 {
        out.push(IntPoly::from_i64(&[0, 1]));
    }
    let x = IntPoly::from_i64(&[0, 1]);
    for i in 2..=k {
        let next = x.mul(&out[i - 1]).sub(&out[i - 2]);
        out.push(next);
    }
    out
}

/// Monic integer minimal polynomial of 2cos(2π/N).
///
/// For N ≥ 3 the cyclotomic polynomial is palindromic of even degree 2m and
/// equals x^m ψ(x + 1/x); writing x^k + x^-k = V_k(y) gives ψ directly.
pub fn min_poly_two_cos(n: u64) -> IntPoly {
    assert!(n >= 1, "conductor must be positive");
    match n {
        1 => return IntPoly::from_i64(&[-2, 1]),
        2 => return IntPoly::from_i64(&[2, 1]),
        _ => {}
    }
    let phi = cyclotomic(n);
    let m = phi.degree().unwrap() / 2;
    let v = dickson_table(m);
    let mut psi = IntPoly::new(vec![phi.coeff(m)]);
    for (k, vk) in v.iter().enumerate().skip(1) {
        psi = psi.add(&vk.scale(&phi.coeff(m + k)));
    }
    psi
}

/// Sturm sequence of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct Sturm {
    seq: Vec<IntPoly>,
}

impl Sturm {
    pub fn new(p: &IntPoly) -> Self {
        let p0 = p.primitive();
        let mut seq = vec![p0.clone()];
        if p0.degree().unwrap_or(0) == 0 {
            return Sturm { seq };
        }
        seq.push(p0.derivative().primitive());
        loop {
            let n = seq.len();
            let r = seq[n - 2].signed_pseudo_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            let r = r.neg();
            let g = r.content();
            seq.push(IntPoly::new(r.coeffs.iter().map(|c| c / &g).collect()));
        }
        Sturm { seq }
    }

    fn variations(&self, x: &Dyadic) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for p in &self.seq {
            let s = p.sign_at(x);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct real roots in the half-open interval (a, b].
    pub fn count_in(&self, a: &Dyadic, b: &Dyadic) -> usize {
        self.variations(a) - self.variations(b)
    }

    fn variations_at_infinity(&self, negative: bool) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for p in &self.seq {
            let d = p.degree().unwrap_or(0);
            let mut s = p.leading().map_or(Ordering::Equal, |c| c.sign_ord());
            if negative && d % 2 == 1 {
                s = s.reverse();
            }
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Total number of distinct real roots.
    pub fn count_real(&self) -> usize {
        self.variations_at_infinity(true) - self.variations_at_infinity(false)
    }
}

/// Cauchy bound: every root has absolute value below `2^k` for the returned k.
pub fn root_bound_log2(p: &IntPoly) -> i64 {
    let lead = p.leading().expect("zero polynomial").abs();
    let max = p.coeffs.iter().map(|c| c.abs()).max().unwrap();
    let ratio = max / lead + 1u32;
    ratio.bits() as i64 + 1
}
