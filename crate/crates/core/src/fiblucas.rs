//! Fibonacci and Lucas numbers at large indices.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::quadfield::GoldenNum;

/// `(F_k, F_{k+1})` by fast doubling:
/// `F_{2j} = F_j(2F_{j+1} - F_j)`, `F_{2j+1} = F_j² + F_{j+1}²`.
pub fn fib_pair(k: u64) -> (BigInt, BigInt) {
    let mut a = BigInt::zero();
    let mut b = BigInt::one();
    if k == 0 {
        return (a, b);
    }
    let top = 63 - k.leading_zeros();
    for bit in (0..=top).rev() {
        // (a, b) = (F_j, F_{j+1}) -> (F_{2j}, F_{2j+1})
        let two_b = &b << 1;
        let c = &a * (two_b - &a);
        let d = &a * &a + &b * &b;
        if (k >> bit) & 1 == 1 {
            b = &c + &d;
            a = d;
        } else {
            a = c;
            b = d;
        }
    }
    (a, b)
}

/// `F_k` for any integer `k`, with `F_{-n} = (-1)^{n+1} F_n`.
pub fn fib(k: i64) -> BigInt {
    let f = fib_pair(k.unsigned_abs()).0;
    if k < 0 && k % 2 == 0 {
        -f
    } else {
        f
    }
}

/// `L_k = 2F_{k+1} - F_k`.
pub fn lucas(k: u64) -> BigInt {
    let (f, f1) = fib_pair(k);
    (f1 << 1) - f
}

/// `L_k` for any integer `k`, with `L_{-n} = (-1)^n L_n`.
pub fn lucas_signed(k: i64) -> BigInt {
    let l = lucas(k.unsigned_abs());
    if k < 0 && k % 2 != 0 {
        -l
    } else {
        l
    }
}

/// Checks both Binet identities at index `k` exactly in Q(√5):
/// `(φ + φ^{-1})·F_k = φ^k - (-φ^{-1})^k` and `L_k = φ^k + (-1)^k φ^{-k}`.
pub fn binet_check(k: i64) -> bool {
    let pk = GoldenNum::phi_pow(k);
    let pmk = GoldenNum::phi_pow(-k);
    let signed_pmk = if k % 2 == 0 { pmk } else { -pmk };

    let denom = GoldenNum::phi() + GoldenNum::phi_pow(-1);
    let f = GoldenNum::from_bigints(fib(k), BigInt::zero());
    let fib_ok = &denom * &f == &pk - &signed_pmk;

    let l = GoldenNum::from_bigints(lucas_signed(k), BigInt::zero());
    let lucas_ok = l == &pk + &signed_pmk;
    fib_ok && lucas_ok
}

/// Smallest index `k ≥ 1` with `F_k ≥ bound`.
pub fn first_fib_at_least(bound: &BigInt) -> u64 {
    let (mut k, mut a, mut b) = (1u64, BigInt::one(), BigInt::one());
    while &a < bound {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
        k += 1;
    }
    k
}
