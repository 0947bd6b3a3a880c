//! Exact arithmetic in the real quadratic field Q(√5).
//!
//! Elements are stored as `u + v·φ` with rational `u`, `v`, where
//! `φ = (1 + √5)/2`. In this basis every power of φ has integer
//! coordinates (`φ^k = F_k·φ + F_{k-1}`), and `√5 = 2φ - 1`.
//!
//! All values are kept in canonical form (both coordinates in lowest
//! terms), so equality is structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rat = BigRational;

/// Number of extra decimal digits carried by the √5 approximation in
/// [`GoldenNum::to_decimal`] before the exact correction step.
const GUARD_DIGITS: usize = 8;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero in Q(sqrt 5)")]
    DivisionByZero,
}

/// An element `u + v·φ` of Q(√5).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GoldenNum {
    u: Rat,
    v: Rat,
}

impl GoldenNum {
    pub fn new(u: Rat, v: Rat) -> Self {
        // BigRational normalizes on construction and after every operation.
        GoldenNum { u, v }
    }

    pub fn from_ints(u: i64, v: i64) -> Self {
        GoldenNum::new(Rat::from_integer(u.into()), Rat::from_integer(v.into()))
    }

    pub fn from_bigints(u: BigInt, v: BigInt) -> Self {
        GoldenNum::new(Rat::from_integer(u), Rat::from_integer(v))
    }

    pub fn from_rat(r: Rat) -> Self {
        GoldenNum::new(r, Rat::zero())
    }

    pub fn zero() -> Self {
        GoldenNum::from_ints(0, 0)
    }

    pub fn one() -> Self {
        GoldenNum::from_ints(1, 0)
    }

    /// The golden ratio φ.
    pub fn phi() -> Self {
        GoldenNum::from_ints(0, 1)
    }

    /// √5, represented as `2φ - 1`.
    pub fn sqrt5() -> Self {
        GoldenNum::from_ints(-1, 2)
    }

    /// Rational coordinate `u`.
    pub fn u(&self) -> &Rat {
        &self.u
    }

    /// Coefficient `v` of φ.
    pub fn v(&self) -> &Rat {
        &self.v
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    /// The Galois conjugate, sending √5 to -√5.
    ///
    /// `conj(φ) = 1 - φ`, hence `conj(u + vφ) = (u + v) - vφ`.
    pub fn conj(&self) -> Self {
        GoldenNum::new(&self.u + &self.v, -&self.v)
    }

    /// Field norm `x·conj(x) = u² + uv - v²`.
    pub fn norm(&self) -> Rat {
        &self.u * &self.u + &self.u * &self.v - &self.v * &self.v
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let c = self.conj();
        Ok(GoldenNum::new(c.u / &n, c.v / n))
    }

    pub fn checked_div(&self, rhs: &GoldenNum) -> Result<Self, FieldError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        GoldenNum::new(&self.u * r, &self.v * r)
    }

    /// Exact φ^k for any integer `k`, by square-and-multiply on integer
    /// coordinates. Negative powers use `φ^{-k} = (-1)^k conj(φ^k)`.
    pub fn phi_pow(k: i64) -> Self {
        let (x, y) = phi_pow_coords(k.unsigned_abs());
        let pos = GoldenNum::from_bigints(x, y);
        if k >= 0 {
            pos
        } else if k % 2 == 0 {
            pos.conj()
        } else {
            -pos.conj()
        }
    }

    /// Exact sign of the real number `u + vφ`, using only rational
    /// arithmetic.
    pub fn signum(&self) -> i8 {
        let su = rat_sign(&self.u);
        let sv = rat_sign(&self.v);
        if sv == 0 {
            return su;
        }
        if su == 0 || su == sv {
            return sv;
        }
        // Mixed signs: x = v·(φ - t) with t = -u/v > 0.
        let t = -(&self.u / &self.v);
        let s = Rat::from_integer(2.into()) * t - Rat::one();
        // φ > t  <=>  √5 > 2t - 1  <=>  (2t - 1 < 0) or (2t - 1)² < 5
        let phi_above = s.is_negative() || &s * &s < Rat::from_integer(5.into());
        if phi_above {
            sv
        } else {
            -sv
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact comparison of two field elements as real numbers.
    pub fn cmp_real(&self, other: &GoldenNum) -> Ordering {
        (self - other).signum().cmp(&0)
    }

    /// Exact `trunc(x·10^digits)` (rounded toward zero).
    pub fn scaled_trunc(&self, digits: usize) -> BigInt {
        let scale = Rat::from_integer(pow10(digits));
        let y = self.scale(&scale);
        let mut n = approx_floor(&y, digits);
        // Correct the approximation to the exact floor.
        while (&y - &GoldenNum::from_bigints(n.clone(), BigInt::zero())).signum() < 0 {
            n -= 1;
        }
        loop {
            let next: BigInt = &n + 1;
            if (&y - &GoldenNum::from_bigints(next.clone(), BigInt::zero())).signum() >= 0 {
                n = next;
            } else {
                break;
            }
        }
        let exact = (&y - &GoldenNum::from_bigints(n.clone(), BigInt::zero())).is_zero();
        if n.is_negative() && !exact {
            n + 1
        } else {
            n
        }
    }

    /// Decimal expansion truncated toward zero with exactly `digits`
    /// fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        format_scaled(&self.scaled_trunc(digits), digits)
    }
}

fn rat_sign(r: &Rat) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Integer coordinates `(x, y)` with `φ^k = x + yφ`.
fn phi_pow_coords(mut k: u64) -> (BigInt, BigInt) {
    let mut acc = (BigInt::one(), BigInt::zero());
    let mut base = (BigInt::zero(), BigInt::one());
    while k > 0 {
        if k & 1 == 1 {
            acc = mul_coords(&acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = mul_coords(&base, &base);
        }
    }
    acc
}

fn mul_coords(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    let yy = &a.1 * &b.1;
    (&a.0 * &b.0 + &yy, &a.0 * &b.1 + &a.1 * &b.0 + yy)
}

pub(crate) fn pow10(digits: usize) -> BigInt {
    num_traits::pow(BigInt::from(10u32), digits)
}

/// Floor estimate of `y = u + vφ` using a truncated √5, off by at most one.
fn approx_floor(y: &GoldenNum, digits: usize) -> BigInt {
    // |v|·10^-g must stay below 10^-GUARD_DIGITS; bits/3 over-estimates log10.
    let v_digits = (y.v.numer().bits() / 3) as usize + 1;
    let g = digits + GUARD_DIGITS + v_digits;
    let big = BigUint::from(5u32) * num_traits::pow(BigUint::from(10u32), 2 * g);
    let sqrt5_scaled = Rat::from_integer(BigInt::from(big.sqrt()));
    let guard = Rat::from_integer(pow10(g));
    // y = ((2u + v) + v√5) / 2
    let two = Rat::from_integer(2.into());
    let approx =
        ((&two * &y.u + &y.v) * &guard + &y.v * sqrt5_scaled) / (two * guard);
    approx.floor().to_integer()
}

/// Renders an integer `n` as `n / 10^digits` with exactly `digits`
/// fractional digits.
pub(crate) fn format_scaled(n: &BigInt, digits: usize) -> String {
    let neg = n.is_negative();
    let mut s = n.magnitude().to_str_radix(10);
    if s.len() <= digits {
        s = "0".repeat(digits + 1 - s.len()) + &s;
    }
    let split = s.len() - digits;
    let mut out = String::with_capacity(s.len() + 2);
    if neg {
        out.push('-');
    }
    out.push_str(&s[..split]);
    if digits > 0 {
        out.push('.');
        out.push_str(&s[split..]);
    }
    out
}

/// Decimal expansion of a rational, truncated toward zero.
pub fn rat_to_decimal(r: &Rat, digits: usize) -> String {
    let scaled = r.numer() * pow10(digits);
    // BigInt division truncates toward zero.
    format_scaled(&(scaled / r.denom()), digits)
}

/// Renders a rational as `p` or `p/q`.
pub fn rat_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Largest `d ≥ 0` with `|x| ≤ 10^-d`, capped at `limit`. Zero maps to
/// `limit`.
pub fn decimal_exponent(x: &GoldenNum, limit: usize) -> usize {
    let ax = x.abs();
    if ax.is_zero() {
        return limit;
    }
    let fits = |d: usize| {
        let eps = Rat::new(BigInt::one(), pow10(d));
        ax.cmp_real(&GoldenNum::from_rat(eps)) != Ordering::Greater
    };
    if !fits(0) {
        return 0;
    }
    // fits is monotone: find the last d in [0, limit] that fits.
    let (mut lo, mut hi) = (0usize, limit);
    if fits(hi) {
        return hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

impl fmt::Display for GoldenNum {
    /// φ-basis rendering: `u + v·φ`, with fractional coordinates in
    /// parentheses after the first term, e.g. `-1/4 + (1/2)·φ`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v_abs = self.v.abs();
        let v_str = if v_abs.is_integer() {
            rat_string(&v_abs)
        } else {
            format!("({})", rat_string(&v_abs))
        };
        let op = if self.v.is_negative() { '-' } else { '+' };
        write!(f, "{} {} {}·φ", rat_string(&self.u), op, v_str)
    }
}

impl From<Rat> for GoldenNum {
    fn from(r: Rat) -> Self {
        GoldenNum::from_rat(r)
    }
}

impl<'a> Add<&'a GoldenNum> for &'a GoldenNum {
    type Output = GoldenNum;
    fn add(self, rhs: &GoldenNum) -> GoldenNum {
        GoldenNum::new(&self.u + &rhs.u, &self.v + &rhs.v)
    }
}

impl<'a> Sub<&'a GoldenNum> for &'a GoldenNum {
    type Output = GoldenNum;
    fn sub(self, rhs: &GoldenNum) -> GoldenNum {
        GoldenNum::new(&self.u - &rhs.u, &self.v - &rhs.v)
    }
}

impl<'a> Mul<&'a GoldenNum> for &'a GoldenNum {
    type Output = GoldenNum;
    /// Uses φ² = φ + 1.
    fn mul(self, rhs: &GoldenNum) -> GoldenNum {
        let vv = &self.v * &rhs.v;
        GoldenNum::new(
            &self.u * &rhs.u + &vv,
            &self.u * &rhs.v + &rhs.u * &self.v + vv,
        )
    }
}

impl Neg for &GoldenNum {
    type Output = GoldenNum;
    fn neg(self) -> GoldenNum {
        GoldenNum::new(-&self.u, -&self.v)
    }
}

impl Neg for GoldenNum {
    type Output = GoldenNum;
    fn neg(self) -> GoldenNum {
        GoldenNum::new(-self.u, -self.v)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GoldenNum> for GoldenNum {
            type Output = GoldenNum;
            fn $m(self, rhs: GoldenNum) -> GoldenNum {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a GoldenNum> for GoldenNum {
            type Output = GoldenNum;
            fn $m(self, rhs: &GoldenNum) -> GoldenNum {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<GoldenNum> for &'a GoldenNum {
            type Output = GoldenNum;
            fn $m(self, rhs: GoldenNum) -> GoldenNum {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Reduced rational `p/q` from machine integers. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(p.into(), q.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(u: (i64, i64), v: (i64, i64)) -> GoldenNum {
        GoldenNum::new(rat(u.0, u.1), rat(v.0, v.1))
    }

    #[test]
    fn add_examples() {
        assert_eq!(GoldenNum::from_ints(0, 1) + GoldenNum::from_ints(1, -1), GoldenNum::one());
        assert_eq!(
            GoldenNum::from_ints(-3, 3) + GoldenNum::from_ints(3, -1),
            GoldenNum::from_ints(0, 2)
        );
    }

    #[test]
    fn mul_examples() {
        let phi = GoldenNum::phi();
        assert_eq!(&phi * &phi, GoldenNum::from_ints(1, 1));
        assert_eq!(&phi * &GoldenNum::from_ints(-1, 1), GoldenNum::one());
    }

    #[test]
    fn inv_examples() {
        assert_eq!(GoldenNum::phi().inv().unwrap(), GoldenNum::from_ints(-1, 1));
        assert_eq!(GoldenNum::one().inv().unwrap(), GoldenNum::one());
        let inv_sqrt5 = GoldenNum::sqrt5().inv().unwrap();
        assert_eq!(inv_sqrt5, g((-1, 5), (2, 5)));
        assert_eq!(&inv_sqrt5 * &GoldenNum::sqrt5(), GoldenNum::one());
        assert_eq!(GoldenNum::zero().inv(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn conj_and_norm_examples() {
        let c = GoldenNum::phi().conj();
        assert_eq!(c, GoldenNum::from_ints(1, -1));
        // conj(φ) is also a root of x² - x - 1.
        assert!((&(&c * &c) - &c - GoldenNum::one()).is_zero());
        assert_eq!(GoldenNum::from_ints(7, 0).conj(), GoldenNum::from_ints(7, 0));
        assert_eq!(GoldenNum::phi().norm(), rat(-1, 1));
        assert_eq!(GoldenNum::sqrt5().norm(), rat(-5, 1));
        assert_eq!(GoldenNum::zero().norm(), rat(0, 1));
    }

    #[test]
    fn phi_pow_examples() {
        assert_eq!(GoldenNum::phi_pow(0), GoldenNum::one());
        assert_eq!(GoldenNum::phi_pow(1), GoldenNum::phi());
        assert_eq!(GoldenNum::phi_pow(2), GoldenNum::from_ints(1, 1));
        assert_eq!(GoldenNum::phi_pow(-2), GoldenNum::from_ints(2, -1));
        assert_eq!(GoldenNum::phi_pow(-2), GoldenNum::phi_pow(2).inv().unwrap());
        assert_eq!(GoldenNum::phi_pow(-1), GoldenNum::from_ints(-1, 1));
    }

    #[test]
    fn sign_examples() {
        assert_eq!(GoldenNum::from_ints(-1, 1).signum(), 1);
        assert_eq!(GoldenNum::from_ints(2, -1).signum(), 1);
        assert_eq!(GoldenNum::zero().signum(), 0);
        assert_eq!(GoldenNum::from_ints(1, -1).signum(), -1);
        assert_eq!(GoldenNum::from_ints(-2, 1).signum(), -1);
        // 8/5 < φ < 13/8
        assert_eq!(g((-8, 5), (1, 1)).signum(), 1);
        assert_eq!(g((-13, 8), (1, 1)).signum(), -1);
    }

    #[test]
    fn decimal_examples() {
        assert_eq!(GoldenNum::phi().to_decimal(10), "1.6180339887");
        assert_eq!(GoldenNum::from_ints(3, -1).to_decimal(10), "1.3819660112");
        assert_eq!(GoldenNum::from_ints(2, 0).to_decimal(3), "2.000");
        assert_eq!(GoldenNum::from_ints(0, -1).to_decimal(4), "-1.6180");
        assert_eq!(GoldenNum::from_ints(1, -1).to_decimal(4), "-0.6180");
        assert_eq!(rat_to_decimal(&rat(-1, 3), 4), "-0.3333");
        assert_eq!(rat_to_decimal(&rat(9, 5), 2), "1.80");
    }

    #[test]
    fn display_uses_phi_basis() {
        assert_eq!(GoldenNum::from_ints(-3, 3).to_string(), "-3 + 3·φ");
        assert_eq!(GoldenNum::from_ints(3, -1).to_string(), "3 - 1·φ");
        assert_eq!(g((-1, 4), (1, 2)).to_string(), "-1/4 + (1/2)·φ");
        assert_eq!(GoldenNum::one().to_string(), "1 + 0·φ");
    }

    #[test]
    fn decimal_exponent_brackets_value() {
        let x = GoldenNum::from_rat(rat(3, 10_000));
        assert_eq!(decimal_exponent(&x, 50), 3);
        assert_eq!(decimal_exponent(&GoldenNum::zero(), 50), 50);
        assert_eq!(decimal_exponent(&GoldenNum::from_ints(2, 0), 50), 0);
        assert_eq!(decimal_exponent(&GoldenNum::from_rat(rat(1, 100)), 50), 2);
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-60i64..60, 1i64..40).prop_map(|(p, q)| rat(p, q))
    }

    fn golden() -> impl Strategy<Value = GoldenNum> {
        (small_rat(), small_rat()).prop_map(|(u, v)| GoldenNum::new(u, v))
    }

    proptest! {
        #[test]
        fn field_axioms(x in golden(), y in golden(), z in golden()) {
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x + &GoldenNum::zero(), x.clone());
            prop_assert_eq!(&x * &GoldenNum::one(), x.clone());
        }

        #[test]
        fn inverse_and_norm(x in golden()) {
            prop_assume!(!x.is_zero());
            prop_assert_eq!(&x * &x.inv().unwrap(), GoldenNum::one());
            let n = &x * &x.conj();
            prop_assert!(n.is_rational());
            prop_assert_eq!(n.u().clone(), x.norm());
            prop_assert!(!x.norm().is_zero());
        }

        #[test]
        fn conj_is_homomorphism(x in golden(), y in golden()) {
            prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
            prop_assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
            prop_assert_eq!(x.conj().conj(), x);
        }

        #[test]
        fn phi_pow_is_exponential(j in -200i64..=200, k in -200i64..=200) {
            prop_assert_eq!(
                &GoldenNum::phi_pow(j) * &GoldenNum::phi_pow(k),
                GoldenNum::phi_pow(j + k)
            );
        }

    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn sign_matches_decimal(x in golden()) {
            prop_assume!(!x.is_zero());
            // 50-digit evaluation of (2u + v + v·√5)/2 with a floor-sqrt
            // of 5·10^100; the truncation error is below |v|·10^-50.
            let s = BigInt::from(10u32).pow(50);
            let root = BigInt::from((BigUint::from(5u32) * BigUint::from(10u32).pow(100)).sqrt());
            let approx = (Rat::from_integer(2.into()) * x.u() + x.v()) * Rat::from_integer(s.clone())
                + x.v() * Rat::from_integer(root);
            prop_assert!(approx.abs() > x.v().abs() * Rat::from_integer(2.into()));
            let expect = if approx.is_negative() { -1 } else { 1 };
            prop_assert_eq!(x.signum(), expect);
        }
    }
}
