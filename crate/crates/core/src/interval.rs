//! Dyadic numbers and outward-rounded interval arithmetic.
//!
//! Every operation takes a working precision in bits; results are rounded
//! outward to that many significant bits, so the exact value always lies in
//! the returned interval.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

static START_PRECISION: AtomicU32 = AtomicU32::new(64);

/// Starting precision (bits) for refinement loops.
pub fn start_precision() -> u64 {
    START_PRECISION.load(AtomicOrdering::Relaxed) as u64
}

/// Override the starting precision used by refinement loops (clamped to at least 16 bits).
pub fn set_start_precision(bits: u32) {
    START_PRECISION.store(bits.max(16), AtomicOrdering::Relaxed);
}

/// Rounding direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// The number `mantissa * 2^exponent`, normalized so the mantissa is odd (or zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn new(m: BigInt, e: i64) -> Self {
        if m.is_zero() {
            return Dyadic { m, e: 0 };
        }
        let tz = m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            Dyadic {
                m: m >> tz,
                e: e + tz as i64,
            }
        } else {
            Dyadic { m, e }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            m: BigInt::zero(),
            e: 0,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }

    /// `2^k`
    pub fn pow2(k: i64) -> Self {
        Dyadic {
            m: BigInt::one(),
            e: k,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }

    pub fn exponent(&self) -> i64 {
        self.e
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn signum(&self) -> Ordering {
        self.m.cmp(&BigInt::zero())
    }

    /// `(numerator, k)` with value `numerator / 2^k` and `k >= 0`.
    pub fn as_fraction_pow2(&self) -> (BigInt, u64) {
        if self.e >= 0 {
            (&self.m << self.e as u64, 0)
        } else {
            (self.m.clone(), (-self.e) as u64)
        }
    }

    pub fn to_rational(&self) -> BigRational {
        let (n, k) = self.as_fraction_pow2();
        BigRational::new(n, BigInt::one() << k)
    }

    /// Position of the leading bit: `|self|` lies in `[2^(h-1), 2^h)`.
    pub fn magnitude_log2(&self) -> i64 {
        self.m.bits() as i64 + self.e
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            m: -&self.m,
            e: self.e,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            m: self.m.abs(),
            e: self.e,
        }
    }

    pub fn add(&self, o: &Dyadic) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as u64;
        let b = &o.m << (o.e - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, o: &Dyadic) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Dyadic) -> Self {
        Dyadic::new(&self.m * &o.m, self.e + o.e)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            m: self.m.clone(),
            e: self.e + k,
        }
    }

    /// Round to at most `prec` significant bits in the given direction.
    pub fn round(&self, prec: u64, dir: Round) -> Self {
        let bits = self.m.bits();
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        let m = match dir {
            Round::Down => floor_shr(&self.m, shift),
            Round::Up => -floor_shr(&-&self.m, shift),
        };
        Dyadic::new(m, self.e + shift as i64)
    }

    /// `num / den` rounded to `prec` significant bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u64, dir: Round) -> Self {
        assert!(!den.is_zero(), "division by zero");
        if num.is_zero() {
            return Dyadic::zero();
        }
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        // scale so the quotient has about prec+2 bits
        let s = prec as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let (n, d) = if s >= 0 {
            (num << s as u64, den)
        } else {
            (num, den << (-s) as u64)
        };
        let q = match dir {
            Round::Down => n.div_floor(&d),
            Round::Up => -(-n).div_floor(&d),
        };
        Dyadic::new(q, -s).round(prec, dir)
    }

    pub fn div(&self, o: &Dyadic, prec: u64, dir: Round) -> Self {
        let (a, ka) = self.as_fraction_pow2();
        let (b, kb) = o.as_fraction_pow2();
        // (a / 2^ka) / (b / 2^kb) = (a 2^kb) / (b 2^ka)
        Dyadic::from_ratio(&(a << kb), &(b << ka), prec, dir)
    }

    pub fn from_rational(q: &BigRational, prec: u64, dir: Round) -> Self {
        Dyadic::from_ratio(q.numer(), q.denom(), prec, dir)
    }

    /// Square root of a non-negative dyadic, rounded to `prec` bits.
    pub fn sqrt(&self, prec: u64, dir: Round) -> Self {
        assert!(!self.m.is_negative(), "square root of a negative number");
        if self.is_zero() {
            return Dyadic::zero();
        }
        // make the exponent even and the mantissa at least 2*prec+4 bits
        let mut shift = (2 * prec as i64 + 4 - self.m.bits() as i64).max(0);
        if (self.e - shift) % 2 != 0 {
            shift += 1;
        }
        let big = &self.m << shift as u64;
        let mut r = big.sqrt();
        if dir == Round::Up && &r * &r != big {
            r += 1u32;
        }
        Dyadic::new(r, (self.e - shift) / 2).round(prec, dir)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.m.bits() as i64;
        let shift = (bits - 60).max(0);
        let top = floor_shr(&self.m, shift as u64)
            .to_f64()
            .unwrap_or(f64::NAN);
        top * 2f64.powi((self.e + shift).clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// Decimal rendering rounded to nearest with `digits` digits after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scaled =
            self.to_rational() * BigRational::from_integer(BigInt::from(10u32).pow(digits as u32));
        let rounded = scaled.round().to_integer();
        format_fixed(&rounded, digits)
    }
}

/// Format `n / 10^digits`.
pub(crate) fn format_fixed(n: &BigInt, digits: usize) -> String {
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let s = if s.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = s.split_at(s.len() - digits);
    let body = if digits == 0 {
        int.to_string()
    } else {
        format!("{int}.{frac}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn floor_shr(m: &BigInt, shift: u64) -> BigInt {
    let d = BigInt::one() << shift;
    m.div_floor(&d)
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).signum()
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.m, self.e)
    }
}

/// Closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(d: Dyadic) -> Self {
        Interval {
            lo: d.clone(),
            hi: d,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Interval::point(Dyadic::from_i64(v))
    }

    pub fn from_bigint(v: &BigInt, prec: u64) -> Self {
        let d = Dyadic::from_bigint(v.clone());
        Interval::new(d.round(prec, Round::Down), d.round(prec, Round::Up))
    }

    pub fn from_rational(q: &BigRational, prec: u64) -> Self {
        Interval::new(
            Dyadic::from_rational(q, prec, Round::Down),
            Dyadic::from_rational(q, prec, Round::Up),
        )
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.add(&self.hi).mul_pow2(-1)
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() != Ordering::Greater && self.hi.signum() != Ordering::Less
    }

    /// Sign of every point of the interval, if it is uniform.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.signum() == Ordering::Greater {
            Some(Ordering::Greater)
        } else if self.hi.signum() == Ordering::Less {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn is_disjoint(&self, o: &Interval) -> bool {
        self.hi < o.lo || o.hi < self.lo
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval::new(
            self.lo.clone().min(o.lo.clone()),
            self.hi.clone().max(o.hi.clone()),
        )
    }

    /// True when the width is at most `2^-bits`.
    pub fn width_below_pow2(&self, bits: i64) -> bool {
        let w = self.width();
        w.is_zero() || w.magnitude_log2() <= -bits
    }

    /// True when the width is at most `10^-digits`.
    pub fn width_below_decimal(&self, digits: usize) -> bool {
        let w = self.width().to_rational();
        w * BigRational::from_integer(BigInt::from(10u32).pow(digits as u32)) <= BigRational::one()
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn add(&self, o: &Interval, prec: u64) -> Interval {
        Interval {
            lo: self.lo.add(&o.lo).round(prec, Round::Down),
            hi: self.hi.add(&o.hi).round(prec, Round::Up),
        }
    }

    pub fn sub(&self, o: &Interval, prec: u64) -> Interval {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Interval, prec: u64) -> Interval {
        let ps = [
            self.lo.mul(&o.lo),
            self.lo.mul(&o.hi),
            self.hi.mul(&o.lo),
            self.hi.mul(&o.hi),
        ];
        let lo = ps.iter().min().unwrap().round(prec, Round::Down);
        let hi = ps.iter().max().unwrap().round(prec, Round::Up);
        Interval { lo, hi }
    }

    pub fn square(&self, prec: u64) -> Interval {
        let a = self.lo.mul(&self.lo);
        let b = self.hi.mul(&self.hi);
        if self.contains_zero() {
            Interval {
                lo: Dyadic::zero(),
                hi: a.max(b).round(prec, Round::Up),
            }
        } else {
            Interval {
                lo: a.clone().min(b.clone()).round(prec, Round::Down),
                hi: a.max(b).round(prec, Round::Up),
            }
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Interval {
        Interval {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
        }
    }

    /// Panics if `o` contains zero.
    pub fn div(&self, o: &Interval, prec: u64) -> Interval {
        assert!(
            !o.contains_zero(),
            "interval division by an interval containing zero"
        );
        let ends = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let lo = ends
            .iter()
            .map(|(a, b)| a.div(b, prec, Round::Down))
            .min()
            .unwrap();
        let hi = ends
            .iter()
            .map(|(a, b)| a.div(b, prec, Round::Up))
            .max()
            .unwrap();
        Interval { lo, hi }
    }

    pub fn div_int(&self, k: &BigInt, prec: u64) -> Interval {
        self.div(&Interval::point(Dyadic::from_bigint(k.clone())), prec)
    }

    /// Square root; negative parts of the interval are clamped to zero.
    pub fn sqrt(&self, prec: u64) -> Interval {
        assert!(
            self.hi.signum() != Ordering::Less,
            "square root of a negative interval"
        );
        let lo = if self.lo.signum() == Ordering::Greater {
            self.lo.sqrt(prec, Round::Down)
        } else {
            Dyadic::zero()
        };
        Interval {
            lo,
            hi: self.hi.sqrt(prec, Round::Up),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    /// Midpoint rendered with `digits` decimals.
    pub fn to_decimal(&self, digits: usize) -> String {
        self.mid().to_decimal(digits)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            self.lo.to_decimal(20),
            self.hi.to_decimal(20)
        )
    }
}

/// Repeatedly evaluate `f` at doubling precision until the interval is no wider than `10^-digits`.
pub fn refine_to_digits(digits: usize, mut f: impl FnMut(u64) -> Interval) -> Interval {
    let mut prec = start_precision().max((digits as f64 * 3.33) as u64 + 16);
    loop {
        let iv = f(prec);
        if iv.width_below_decimal(digits) {
            return iv;
        }
        prec *= 2;
    }
}

/// `sum y^(2k+1)/(2k+1)` for `0 <= y <= 1/2`, with a rigorous tail bound.
fn atanh_series(y: &Interval, prec: u64) -> Interval {
    debug_assert!(y.lo().signum() != Ordering::Less);
    let wp = prec + 16;
    let y2 = y.square(wp);
    let mut pow = y.clone();
    let mut sum = Interval::from_i64(0);
    let mut k: u64 = 0;
    loop {
        let term = pow.div_int(&BigInt::from(2 * k + 1), wp);
        sum = sum.add(&term, wp);
        pow = pow.mul(&y2, wp);
        k += 1;
        // tail <= y^(2k+1) / (1 - y^2) <= (4/3) y^(2k+1) <= 2 * pow.hi
        if pow.hi().is_zero() || pow.hi().magnitude_log2() < -(wp as i64) - 2 {
            let tail = pow.hi().mul_pow2(1);
            return Interval::new(sum.lo().clone(), sum.hi().add(&tail))
                .add(&Interval::from_i64(0), prec);
        }
    }
}

/// ln 2
pub fn ln2(prec: u64) -> Interval {
    let wp = prec + 8;
    let third = Interval::from_rational(&BigRational::new(BigInt::one(), BigInt::from(3)), wp);
    atanh_series(&third, wp)
        .mul_pow2(1)
        .add(&Interval::from_i64(0), prec)
}

fn ln_point(v: &Dyadic, ln2v: &Interval, prec: u64) -> Interval {
    assert!(
        v.signum() == Ordering::Greater,
        "logarithm of a non-positive number"
    );
    let wp = prec + 16;
    let s = v.magnitude_log2() - 1;
    let w = Interval::point(v.mul_pow2(-s));
    let one = Interval::from_i64(1);
    let y = w.sub(&one, wp).div(&w.add(&one, wp), wp);
    let y = if y.lo().signum() == Ordering::Less {
        Interval::new(Dyadic::zero(), y.hi().clone())
    } else {
        y
    };
    let main = atanh_series(&y, wp).mul_pow2(1);
    let shift = ln2v.mul(&Interval::from_i64(s), wp);
    main.add(&shift, prec)
}

/// Natural logarithm of a positive interval.
pub fn ln(x: &Interval, prec: u64) -> Interval {
    let l2 = ln2(prec + 16);
    let a = ln_point(x.lo(), &l2, prec);
    let b = if x.lo() == x.hi() {
        a.clone()
    } else {
        ln_point(x.hi(), &l2, prec)
    };
    Interval::new(a.lo().clone(), b.hi().clone())
}

/// Inverse hyperbolic cosine on `[1, ∞)`.
pub fn acosh(x: &Interval, prec: u64) -> Interval {
    assert!(x.hi() >= &Dyadic::from_i64(1), "acosh argument below 1");
    let wp = prec + 16;
    let one = Interval::from_i64(1);
    let t = x.square(wp).sub(&one, wp);
    let t = if t.lo().signum() == Ordering::Less {
        Interval::new(Dyadic::zero(), t.hi().clone())
    } else {
        t
    };
    let arg = x.add(&t.sqrt(wp), wp);
    let arg = if arg.lo() < &Dyadic::from_i64(1) {
        Interval::new(Dyadic::from_i64(1), arg.hi().clone())
    } else {
        arg
    };
    let r = ln(&arg, prec);
    if r.lo().signum() == Ordering::Less {
        Interval::new(Dyadic::zero(), r.hi().clone())
    } else {
        r
    }
}

/// `atan(1/k)` for an integer `k >= 2`.
fn atan_inv(k: u64, prec: u64) -> Interval {
    let wp = prec + 16;
    let k = BigInt::from(k);
    let k2 = &k * &k;
    let mut den_pow = k.clone();
    let mut sum = Interval::from_i64(0);
    let mut j: u64 = 0;
    loop {
        let den = &den_pow * BigInt::from(2 * j + 1);
        let term = Interval::from_rational(&BigRational::new(BigInt::one(), den), wp);
        sum = if j.is_multiple_of(2) {
            sum.add(&term, wp)
        } else {
            sum.sub(&term, wp)
        };
        den_pow *= &k2;
        j += 1;
        if den_pow.bits() > wp + 4 {
            let tail = Dyadic::from_ratio(&BigInt::one(), &den_pow, 8, Round::Up);
            let widen = Interval::new(tail.neg(), tail);
            return sum.add(&widen, prec);
        }
    }
}

/// π by Machin's formula.
pub fn pi(prec: u64) -> Interval {
    let wp = prec + 8;
    let a = atan_inv(5, wp).mul_pow2(4);
    let b = atan_inv(239, wp).mul_pow2(2);
    a.sub(&b, prec)
}

/// Taylor series of `cos x` (or `sin x` when `odd`) for `|x| <= 4`.
fn trig_series(x: &Interval, odd: bool, prec: u64) -> Interval {
    let wp = prec + 16;
    let x2 = x.square(wp);
    let mut term = if odd {
        x.clone()
    } else {
        Interval::from_i64(1)
    };
    let mut n: u64 = if odd { 1 } else { 0 };
    let mut sum = Interval::from_i64(0);
    let mut k = 0u64;
    loop {
        sum = if k.is_multiple_of(2) {
            sum.add(&term, wp)
        } else {
            sum.sub(&term, wp)
        };
        term = term
            .mul(&x2, wp)
            .div_int(&BigInt::from((n + 1) * (n + 2)), wp);
        n += 2;
        k += 1;
        let mag = term.lo().abs().max(term.hi().abs());
        // once terms shrink below 2^-wp they also decrease geometrically, so the
        // alternating tail is bounded by the first omitted term
        if n > 8 && (mag.is_zero() || mag.magnitude_log2() < -(wp as i64)) {
            return sum.add(&Interval::new(mag.neg(), mag), prec);
        }
    }
}

/// `cos(π a / b)` for `0 <= a/b <= 1`.
pub fn cos_pi_ratio(a: i64, b: i64, prec: u64) -> Interval {
    let x = pi_ratio(a, b, prec + 8);
    trig_series(&x, false, prec)
}

/// `sin(π a / b)` for `0 <= a/b <= 1`.
pub fn sin_pi_ratio(a: i64, b: i64, prec: u64) -> Interval {
    let x = pi_ratio(a, b, prec + 8);
    trig_series(&x, true, prec)
}

fn pi_ratio(a: i64, b: i64, prec: u64) -> Interval {
    assert!(b > 0 && a >= 0 && a <= b, "argument outside [0, π]");
    pi(prec + 4)
        .mul(&Interval::from_i64(a), prec + 4)
        .div_int(&BigInt::from(b), prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(iv: &Interval, v: f64, tol: f64) -> bool {
        (iv.to_f64() - v).abs() < tol
    }

    #[test]
    fn test_round_directions() {
        let d = Dyadic::from_i64(-13); // -1101b
        assert_eq!(d.round(2, Round::Down), Dyadic::from_i64(-16));
        assert_eq!(d.round(2, Round::Up), Dyadic::from_i64(-12));
        let d = Dyadic::from_i64(13);
        assert_eq!(d.round(2, Round::Down), Dyadic::from_i64(12));
        assert_eq!(d.round(2, Round::Up), Dyadic::from_i64(16));
    }

    #[test]
    fn test_sqrt_encloses() {
        let two = Interval::from_i64(2);
        let r = two.sqrt(100);
        assert!(r.square(300).contains(&Dyadic::from_i64(2)));
        assert!(r.width_below_pow2(95));
    }

    #[test]
    fn test_division() {
        let one = Interval::from_i64(1);
        let three = Interval::from_i64(3);
        let t = one.div(&three, 80);
        let back = t.mul(&three, 200);
        assert!(back.contains(&Dyadic::from_i64(1)));
        assert!(approx(&t, 1.0 / 3.0, 1e-15));
    }

    #[test]
    fn test_pi_and_logs() {
        let p = pi(200);
        assert!(p.width_below_pow2(190));
        assert!(p
            .to_decimal(30)
            .starts_with("3.1415926535897932384626433832"));
        assert!(ln2(100)
            .to_decimal(24)
            .starts_with("0.69314718055994530941"));
        let l = ln(&Interval::from_i64(10), 100);
        assert!(approx(&l, 10f64.ln(), 1e-14));
        let a = acosh(&Interval::from_i64(2), 100);
        assert!(approx(&a, 2f64.acosh(), 1e-14));
    }

    #[test]
    fn test_trig() {
        assert!(approx(&cos_pi_ratio(1, 3, 80), 0.5, 1e-20));
        assert!(approx(&sin_pi_ratio(1, 6, 80), 0.5, 1e-20));
        assert!(approx(
            &cos_pi_ratio(2, 5, 80),
            (0.4 * std::f64::consts::PI).cos(),
            1e-15
        ));
        assert!(cos_pi_ratio(1, 2, 80).contains_zero());
    }

    #[test]
    fn test_decimal_format() {
        assert_eq!(Dyadic::from_i64(-3).mul_pow2(-1).to_decimal(3), "-1.500");
        assert_eq!(Dyadic::pow2(-4).to_decimal(2), "0.06");
        assert_eq!(format_fixed(&BigInt::from(5), 3), "0.005");
    }

    #[test]
    fn test_refine_to_digits() {
        let iv = refine_to_digits(40, pi);
        assert!(iv.width_below_decimal(40));
    }
}
