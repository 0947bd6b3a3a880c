//! Exact closed forms of the telescoping Fibonacci/Lucas products.
//!
//! For `m = 2^s·a` with `m` even,
//!
//! ```text
//!   ∏_{n ≥ s} (1 + F_b / F_{2^n a + b}) = (1 - (-1)^b φ^{-m-2b}) / (1 - φ^{-m})
//!   ∏_{n ≥ s} (1 + L_b / L_{2^n a + b}) = (1 + (-1)^b φ^{-m-2b}) / (1 - φ^{-m})
//! ```
//!
//! Each factor splits as `(1 + φ^{-2^n a})` times a ratio that telescopes,
//! and `∏_{n ≥ s}(1 + x^{2^n}) = 1/(1 - x^{2^s})` for `|x| < 1`.

use num_traits::{One, Zero};

use crate::fiblucas::{fib, lucas};
use crate::products::{factor, Family, ProductSpec, DEFAULT_INDEX_CAP};
use crate::quadfield::{GoldenNum, Rat};

/// Where a closed-form value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Derivation {
    /// `c = 0`: every factor is 1.
    Trivial,
    /// Telescoped Fibonacci product with `c = F_b`.
    FibonacciTelescope,
    /// Telescoped Lucas product with `c = L_b`.
    LucasTelescope,
    /// Stored value of `∏_{n≥1}(1 + c/L_{2^n})` for `c ∈ {-1, 2}`.
    StoredConstant,
}

impl Derivation {
    pub fn label(self) -> &'static str {
        match self {
            Derivation::Trivial => "trivial",
            Derivation::FibonacciTelescope => "fibonacci-telescope",
            Derivation::LucasTelescope => "lucas-telescope",
            Derivation::StoredConstant => "stored-constant",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub value: GoldenNum,
    /// Start index of the product this value equals.
    pub valid_from: u64,
    pub derivation: Derivation,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ClosedFormError {
    #[error(
        "start = 0 with odd a = {a}: the first factor breaks the sign pattern; \
         use the from-zero variant, which multiplies the n = 0 factor onto the start = 1 value"
    )]
    OddFromZero { a: u64 },
    #[error("exponent 2^{start}·{a} + 2·{b} exceeds the index cap {cap}")]
    IndexCap { a: u64, b: u64, start: u64, cap: u64 },
    #[error("no stored constant for c = {0}; only c = -1 and c = 2 are algebraic here")]
    NotStoredConstant(i64),
}

/// `(m, 2b)` with `m = 2^start·a`, checked against the index cap.
fn exponents(a: u64, b: u64, start: u64) -> Result<(i64, i64), ClosedFormError> {
    let cap_err = || ClosedFormError::IndexCap { a, b, start, cap: DEFAULT_INDEX_CAP };
    if start >= 63 {
        return Err(cap_err());
    }
    let m = (1u64 << start).checked_mul(a).ok_or_else(cap_err)?;
    let two_b = b.checked_mul(2).ok_or_else(cap_err)?;
    match m.checked_add(two_b) {
        Some(top) if top <= DEFAULT_INDEX_CAP => Ok((m as i64, two_b as i64)),
        _ => Err(cap_err()),
    }
}

fn telescoped(a: u64, b: u64, start: u64, family: Family) -> Result<ClosedForm, ClosedFormError> {
    if start == 0 && a % 2 == 1 {
        return Err(ClosedFormError::OddFromZero { a });
    }
    let (m, two_b) = exponents(a, b, start)?;
    let mut tail = GoldenNum::phi_pow(-m - two_b);
    if b % 2 == 1 {
        tail = -tail;
    }
    let numer = match family {
        Family::Fibonacci => GoldenNum::one() - tail,
        Family::Lucas => GoldenNum::one() + tail,
    };
    let denom = GoldenNum::one() - GoldenNum::phi_pow(-m);
    // m ≥ 1 so φ^{-m} ≠ 1.
    let value = numer.checked_div(&denom).expect("1 - φ^-m is nonzero");
    let derivation = match family {
        Family::Fibonacci => Derivation::FibonacciTelescope,
        Family::Lucas => Derivation::LucasTelescope,
    };
    Ok(ClosedForm { value, valid_from: start, derivation })
}

/// `∏_{n ≥ start} (1 + F_b / F_{2^n a + b})`. Needs `2^start·a` even.
pub fn fib_closed(a: u64, b: u64, start: u64) -> Result<ClosedForm, ClosedFormError> {
    telescoped(a, b, start, Family::Fibonacci)
}

/// `∏_{n ≥ start} (1 + L_b / L_{2^n a + b})`. Needs `2^start·a` even.
pub fn lucas_closed(a: u64, b: u64, start: u64) -> Result<ClosedForm, ClosedFormError> {
    telescoped(a, b, start, Family::Lucas)
}

fn from_zero(a: u64, b: u64, family: Family) -> Result<ClosedForm, ClosedFormError> {
    let from_one = telescoped(a, b, 1, family)?;
    let w = |k: u64| family.term(k);
    let first = Rat::new(w(b) + w(a + b), w(a + b));
    Ok(ClosedForm { value: from_one.value.scale(&first), valid_from: 0, ..from_one })
}

/// Full product from `n = 0`: the `n = 0` factor times the `start = 1` value.
pub fn fib_closed_from_zero(a: u64, b: u64) -> Result<ClosedForm, ClosedFormError> {
    from_zero(a, b, Family::Fibonacci)
}

pub fn lucas_closed_from_zero(a: u64, b: u64) -> Result<ClosedForm, ClosedFormError> {
    from_zero(a, b, Family::Lucas)
}

/// `∏_{n≥1} (1 + c / L_{2^n})` for the two algebraic values `c = -1`
/// (`√5/4`) and `c = 2` (`√5`).
pub fn lucas_stored_constant(c: i64) -> Result<ClosedForm, ClosedFormError> {
    let value = match c {
        -1 => GoldenNum::sqrt5().scale(&Rat::new(1.into(), 4.into())),
        2 => GoldenNum::sqrt5(),
        other => return Err(ClosedFormError::NotStoredConstant(other)),
    };
    Ok(ClosedForm { value, valid_from: 1, derivation: Derivation::StoredConstant })
}

/// The stored constant moved to an arbitrary start index by multiplying in
/// (or dividing out) the boundary factors. Zero factors are skipped.
pub fn lucas_unity_closed(c: i64, start: u64) -> Result<ClosedForm, ClosedFormError> {
    let base = lucas_stored_constant(c)?;
    let spec = ProductSpec::new(Family::Lucas, 1, 0, 2, c, start).expect("a = 1, r = 2 is valid");
    let exact_factor = |n: u64| factor(&spec, n).expect("small index");
    let mut value = base.value;
    if start == 0 {
        let f = exact_factor(0);
        if !f.is_zero() {
            value = value.scale(&f);
        }
    } else {
        for n in 1..start {
            let f = exact_factor(n);
            if !f.is_zero() {
                value = value.scale(&f.recip());
            }
        }
    }
    Ok(ClosedForm { value, valid_from: start, derivation: Derivation::StoredConstant })
}

/// Checks the per-factor splitting exactly, with `m = 2^n·a`:
///
/// ```text
///   1 + F_b/F_{m+b} = (1 + φ^-m)(1 - (-1)^b φ^{-m-2b}) / (1 - (-1)^b φ^{-2m-2b})
///   1 + L_b/L_{m+b} = (1 + φ^-m)(1 + (-1)^b φ^{-m-2b}) / (1 + (-1)^b φ^{-2m-2b})
/// ```
pub fn per_factor_identity_check(a: u64, b: u64, n: u64, family: Family) -> bool {
    let Ok((m, two_b)) = exponents(a, b, n) else {
        return false;
    };
    let lhs_rat = match family {
        Family::Fibonacci => {
            let d = fib(m + b as i64);
            Rat::new(fib(b as i64) + &d, d)
        }
        Family::Lucas => {
            let d = lucas(m as u64 + b);
            Rat::new(lucas(b) + &d, d)
        }
    };
    let lhs = GoldenNum::from_rat(lhs_rat);

    let sign = |x: GoldenNum| if b % 2 == 1 { -x } else { x };
    let inner = sign(GoldenNum::phi_pow(-m - two_b));
    let outer = sign(GoldenNum::phi_pow(-2 * m - two_b));
    let one = GoldenNum::one();
    let (num, den) = match family {
        Family::Fibonacci => (&one - &inner, &one - &outer),
        Family::Lucas => (&one + &inner, &one + &outer),
    };
    let Ok(ratio) = num.checked_div(&den) else {
        return false;
    };
    let rhs = (one + GoldenNum::phi_pow(-m)) * ratio;
    lhs == rhs
}

/// Checks `∏_{n=1}^{N} (1 + x^{2^n}) = (1 - x^{2^{N+1}}) / (1 - x²)` over the
/// rationals. Returns `false` for `x = ±1`, where the right side is undefined.
pub fn finite_telescope_check(x: &Rat, terms: u32) -> bool {
    let one = Rat::one();
    let x2 = x * x;
    if x2 == one {
        return false;
    }
    let mut lhs = Rat::one();
    let mut power = x2.clone(); // x^{2^n}, starting at n = 1
    for _ in 0..terms {
        lhs *= &one + &power;
        power = &power * &power;
    }
    // power is now x^{2^{N+1}}
    let rhs = (&one - power) / (&one - x2);
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::{partial_product, tail_bound};
    use crate::quadfield::{decimal_exponent, rat};

    /// Partial product to `N` matches `value` within the tail bound.
    fn agrees_with_partial(family: Family, a: u64, b: u64, start: u64, value: &GoldenNum) -> bool {
        let c = i64::try_from(family.term(b)).unwrap();
        let spec = ProductSpec::new(family, a, b, 2, c, start).unwrap();
        let n = 10;
        let p = GoldenNum::from_rat(partial_product(&spec, n).unwrap().value);
        let bound = tail_bound(&spec, n).unwrap().bound;
        let diff = (value - &p).abs();
        (p.abs().scale(&bound) - diff.clone()).signum() >= 0 && decimal_exponent(&diff, 60) >= 50
    }

    #[test]
    fn fib_closed_examples() {
        let v = fib_closed(1, 1, 1).unwrap();
        assert_eq!(v.value, GoldenNum::from_ints(-3, 3));
        assert_eq!(v.value, GoldenNum::phi().inv().unwrap().scale(&rat(3, 1)));
        assert_eq!(v.derivation, Derivation::FibonacciTelescope);
        assert_eq!(fib_closed(1, 0, 1).unwrap().value, GoldenNum::one());
        let v = fib_closed(1, 2, 1).unwrap().value;
        assert_eq!(v.to_decimal(6), "1.527864");
        assert!(agrees_with_partial(Family::Fibonacci, 1, 2, 1, &v));
    }

    #[test]
    fn lucas_closed_examples() {
        assert_eq!(lucas_closed(1, 1, 1).unwrap().value, GoldenNum::from_ints(3, -1));
        assert_eq!(lucas_closed(1, 0, 1).unwrap().value, GoldenNum::sqrt5());
        let v = lucas_closed(2, 0, 1).unwrap().value;
        let p4 = GoldenNum::phi_pow(-4);
        let expect = (GoldenNum::one() + p4.clone()).checked_div(&(GoldenNum::one() - p4)).unwrap();
        assert_eq!(v, expect);
        assert!(agrees_with_partial(Family::Lucas, 2, 0, 1, &v));
    }

    #[test]
    fn odd_a_from_zero_is_rejected() {
        assert_eq!(fib_closed(1, 1, 0), Err(ClosedFormError::OddFromZero { a: 1 }));
        assert_eq!(lucas_closed(3, 2, 0), Err(ClosedFormError::OddFromZero { a: 3 }));
        assert!(fib_closed(2, 1, 0).is_ok());
        assert!(matches!(fib_closed(1, 1, 40), Err(ClosedFormError::IndexCap { .. })));
    }

    #[test]
    fn from_zero_examples() {
        assert_eq!(fib_closed_from_zero(1, 1).unwrap().value, GoldenNum::from_ints(-6, 6));
        assert_eq!(fib_closed_from_zero(2, 0).unwrap().value, fib_closed(2, 0, 0).unwrap().value);
        let v = fib_closed_from_zero(1, 2).unwrap().value;
        assert_eq!(v, fib_closed(1, 2, 1).unwrap().value.scale(&rat(3, 2)));
        assert!(agrees_with_partial(Family::Fibonacci, 1, 2, 0, &v));
        assert!(agrees_with_partial(Family::Fibonacci, 1, 1, 0, &fib_closed_from_zero(1, 1).unwrap().value));
        for a in 1..=4 {
            for b in 0..=4 {
                let v = lucas_closed_from_zero(a, b).unwrap().value;
                assert!(agrees_with_partial(Family::Lucas, a, b, 0, &v), "a={a} b={b}");
                if a % 2 == 0 {
                    assert_eq!(v, lucas_closed(a, b, 0).unwrap().value);
                }
            }
        }
    }

    #[test]
    fn stored_constants() {
        assert_eq!(lucas_stored_constant(-1).unwrap().value, GoldenNum::new(rat(-1, 4), rat(1, 2)));
        assert_eq!(lucas_stored_constant(2).unwrap().value, GoldenNum::from_ints(-1, 2));
        assert_eq!(lucas_stored_constant(0), Err(ClosedFormError::NotStoredConstant(0)));
        // c = 2 coincides with the telescoped Lucas value for b = 0.
        assert_eq!(lucas_stored_constant(2).unwrap().value, lucas_closed(1, 0, 1).unwrap().value);
    }

    #[test]
    fn stored_constant_moves_with_start() {
        for c in [-1, 2] {
            for start in 0..=3 {
                let v = lucas_unity_closed(c, start).unwrap().value;
                let spec = ProductSpec::new(Family::Lucas, 1, 0, 2, c, start).unwrap();
                let p = GoldenNum::from_rat(partial_product(&spec, 10).unwrap().value);
                let bound = tail_bound(&spec, 10).unwrap().bound;
                assert!((p.abs().scale(&bound) - (&v - &p).abs()).signum() >= 0, "c={c} start={start}");
            }
        }
        // L_1 = 1 makes the n = 0 factor of c = -1 vanish: skipped.
        assert_eq!(lucas_unity_closed(-1, 0).unwrap().value, lucas_stored_constant(-1).unwrap().value);
        assert_eq!(lucas_unity_closed(2, 0).unwrap().value, GoldenNum::sqrt5().scale(&rat(3, 1)));
    }

    #[test]
    fn per_factor_examples() {
        assert!(per_factor_identity_check(1, 1, 1, Family::Fibonacci));
        assert!(per_factor_identity_check(1, 0, 2, Family::Lucas));
        assert!(per_factor_identity_check(2, 3, 1, Family::Fibonacci));
        // 3/2 = (1+φ^-2)(1+φ^-4)/(1+φ^-6)
        let one = GoldenNum::one();
        let rhs = (&one + &GoldenNum::phi_pow(-2)) * (&one + &GoldenNum::phi_pow(-4));
        let rhs = rhs.checked_div(&(&one + &GoldenNum::phi_pow(-6))).unwrap();
        assert_eq!(rhs, GoldenNum::from_rat(rat(3, 2)));
        // The sign step fails for odd m.
        assert!(!per_factor_identity_check(1, 1, 0, Family::Fibonacci));
    }

    #[test]
    fn finite_telescope_examples() {
        assert!(finite_telescope_check(&rat(1, 2), 3));
        let lhs = rat(5, 4) * rat(17, 16) * rat(257, 256);
        assert_eq!(lhs, (rat(1, 1) - rat(1, 65536)) / rat(3, 4));
        assert!(finite_telescope_check(&rat(0, 1), 7));
        assert!(finite_telescope_check(&rat(-2, 3), 5));
        assert!(finite_telescope_check(&rat(5, 2), 4));
        assert!(!finite_telescope_check(&rat(1, 1), 3));
        assert!(!finite_telescope_check(&rat(-1, 1), 3));
    }

    #[test]
    fn peeling_one_factor_is_exact() {
        for a in 1..=4u64 {
            for b in 0..=4u64 {
                for start in 1..=3u64 {
                    for family in [Family::Fibonacci, Family::Lucas] {
                        let here = telescoped(a, b, start, family).unwrap().value;
                        let next = telescoped(a, b, start + 1, family).unwrap().value;
                        let w = |k: u64| family.term(k);
                        let idx = (1u64 << start) * a + b;
                        let f = Rat::new(w(b) + w(idx), w(idx));
                        assert_eq!(here, next.scale(&f), "{family} a={a} b={b} start={start}");
                        assert_eq!(here.signum(), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn specializations() {
        assert_eq!(
            fib_closed(1, 1, 1).unwrap().value,
            GoldenNum::phi().inv().unwrap().scale(&rat(3, 1))
        );
        assert_eq!(lucas_closed(1, 1, 1).unwrap().value, GoldenNum::from_ints(3, 0) - GoldenNum::phi());
    }
}
