//! Product specifications, exact partial products and rigorous tail bounds.
//!
//! A [`ProductSpec`] describes
//!
//! ```text
//!   ∏_{n ≥ start} (1 + c / W_{a·r^n + b}),   W ∈ {F, L}
//! ```
//!
//! Factors that are exactly zero (`W = -c`) are skipped and reported,
//! unless strict mode is requested.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::fiblucas::{fib_pair, lucas};
use crate::par::{self, Exec};
use crate::quadfield::Rat;

/// Default ceiling on sequence indices touched by partial products.
/// `F_{2^22}` already has about 876 000 digits.
pub const DEFAULT_INDEX_CAP: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Fibonacci,
    Lucas,
}

impl Family {
    /// `W_k`: `F_k` or `L_k`.
    pub fn term(self, k: u64) -> BigInt {
        match self {
            Family::Fibonacci => fib_pair(k).0,
            Family::Lucas => lucas(k),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Family::Fibonacci => "fib",
            Family::Lucas => "lucas",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for Family {
    type Err = ProductError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fib" | "f" | "fibonacci" => Ok(Family::Fibonacci),
            "lucas" | "l" => Ok(Family::Lucas),
            other => Err(ProductError::InvalidSpec(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("invalid product: {0}")]
    InvalidSpec(String),
    #[error("index {index} exceeds the index cap {cap}")]
    IndexCap { index: BigUint, cap: u64 },
    #[error("upper index {upto} is below the start index {start}")]
    EmptyRange { upto: u64, start: u64 },
    #[error("tail bound precondition violated: {0}")]
    TailPrecondition(String),
}

/// One infinite product `∏_{n ≥ start} (1 + c / W_{a·r^n + b})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductSpec {
    family: Family,
    a: u64,
    b: u64,
    r: u64,
    c: i64,
    start: u64,
}

impl ProductSpec {
    /// Requires `a ≥ 1` and `r ≥ 2`, which keeps every index `a·r^n + b ≥ 1`.
    pub fn new(family: Family, a: u64, b: u64, r: u64, c: i64, start: u64) -> Result<Self, ProductError> {
        if a < 1 {
            return Err(ProductError::InvalidSpec(format!("a must be >= 1, got {a}")));
        }
        if r < 2 {
            return Err(ProductError::InvalidSpec(format!("r must be >= 2, got {r}")));
        }
        Ok(ProductSpec { family, a, b, r, c, start })
    }

    pub fn family(&self) -> Family {
        self.family
    }
    pub fn a(&self) -> u64 {
        self.a
    }
    pub fn b(&self) -> u64 {
        self.b
    }
    pub fn r(&self) -> u64 {
        self.r
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn with_start(&self, start: u64) -> Self {
        ProductSpec { start, ..self.clone() }
    }
}

impl fmt::Display for ProductSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} a={} b={} r={} c={} start={}",
            self.family, self.a, self.b, self.r, self.c, self.start
        )
    }
}

#[derive(Clone, Debug)]
pub struct ProductOptions {
    pub index_cap: u64,
    /// A zero factor makes the whole product zero instead of being skipped.
    pub strict_zero: bool,
    pub exec: Exec,
}

impl Default for ProductOptions {
    fn default() -> Self {
        ProductOptions { index_cap: DEFAULT_INDEX_CAP, strict_zero: false, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialProductReport {
    pub value: Rat,
    pub last_n: u64,
    pub factors_included: u64,
    /// Indices `n` whose factor was exactly zero.
    pub skipped: Vec<u64>,
}

/// Upper bound on `|P_∞ / P_N - 1|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailBound {
    pub bound: Rat,
}

/// `a·r^n + b`.
pub fn term_index(spec: &ProductSpec, n: u64) -> BigUint {
    let rn = num_traits::pow(BigUint::from(spec.r), n as usize);
    BigUint::from(spec.a) * rn + BigUint::from(spec.b)
}

fn index_within(spec: &ProductSpec, n: u64, cap: u64) -> Result<u64, ProductError> {
    let idx = term_index(spec, n);
    match idx.to_u64() {
        Some(k) if k <= cap => Ok(k),
        _ => Err(ProductError::IndexCap { index: idx, cap }),
    }
}

/// `1 + c / W_{a·r^n + b}`; zero when `W = -c`.
pub fn factor(spec: &ProductSpec, n: u64) -> Result<Rat, ProductError> {
    let k = index_within(spec, n, u64::MAX)?;
    Ok(factor_at_index(spec, k))
}

fn factor_at_index(spec: &ProductSpec, k: u64) -> Rat {
    let w = spec.family.term(k);
    Rat::new(&w + spec.c, w)
}

pub fn partial_product(spec: &ProductSpec, upto_n: u64) -> Result<PartialProductReport, ProductError> {
    partial_product_with(spec, upto_n, &ProductOptions::default())
}

/// Exact product of the factors for `start ≤ n ≤ upto_n`.
pub fn partial_product_with(
    spec: &ProductSpec,
    upto_n: u64,
    opts: &ProductOptions,
) -> Result<PartialProductReport, ProductError> {
    if upto_n < spec.start {
        return Err(ProductError::EmptyRange { upto: upto_n, start: spec.start });
    }
    // Indices increase with n, so checking the last one covers the range.
    index_within(spec, upto_n, opts.index_cap)?;

    let factors = par::map_range(opts.exec, spec.start, upto_n + 1, |n| {
        // In range: checked above.
        let k = term_index(spec, n).to_u64().unwrap();
        (n, factor_at_index(spec, k))
    });

    let skipped: Vec<u64> = factors.iter().filter(|(_, f)| f.is_zero()).map(|(n, _)| *n).collect();
    let nonzero: Vec<Rat> = factors.into_iter().filter(|(_, f)| !f.is_zero()).map(|(_, f)| f).collect();
    let factors_included = nonzero.len() as u64;

    let value = if opts.strict_zero && !skipped.is_empty() {
        Rat::zero()
    } else {
        par::reduce_tree(opts.exec, nonzero, Rat::one(), |x, y| x * y)
    };

    Ok(PartialProductReport { value, last_n: upto_n, factors_included, skipped })
}

/// Rigorous bound on the relative truncation error after `after_n`.
///
/// With `m = a·r^{N+1} + b` and `F_m ≥ 2|c|`, every remaining factor lies
/// in `[1/2, 3/2]` and, since `W_k ≥ F_k`,
///
/// ```text
///   |log(1 + c/W_k)| ≤ 2|c|/F_k
///   Σ_{n>N} 1/F_{m_n} ≤ 2/F_m          (gaps ≥ 2 and F_{k+2} ≥ 2F_k)
///   S ≤ 4|c|/F_m,   e^S - 1 ≤ 2S  (S ≤ 1/2)
/// ```
///
/// `F_m` is replaced by the largest power of two below it, so the bound
/// is `8|c| / 2^{bits(F_m) - 1}`: cheap to multiply against large
/// partial products, and within a factor 2 of the unrounded value.
pub fn tail_bound(spec: &ProductSpec, after_n: u64) -> Result<TailBound, ProductError> {
    tail_bound_with(spec, after_n, &ProductOptions::default())
}

pub fn tail_bound_with(spec: &ProductSpec, after_n: u64, opts: &ProductOptions) -> Result<TailBound, ProductError> {
    if after_n < spec.start {
        return Err(ProductError::EmptyRange { upto: after_n, start: spec.start });
    }
    if spec.c == 0 {
        return Ok(TailBound { bound: Rat::zero() });
    }
    let m = index_within(spec, after_n + 1, opts.index_cap)?;
    let c_abs = BigInt::from(spec.c).abs();
    let f_m = fib_pair(m).0;
    if f_m < &c_abs * 2 {
        return Err(ProductError::TailPrecondition(format!(
            "first omitted index {m} has F_{m} = {f_m} < 2|c| = {}",
            &c_abs * 2
        )));
    }
    // 2^k ≤ F_m
    let k = f_m.bits() - 1;
    let sum = Rat::new(&c_abs * 4, BigInt::one() << k);
    if sum > Rat::new(1.into(), 2.into()) {
        return Err(ProductError::TailPrecondition(format!(
            "log-sum estimate 4|c|/2^{k} exceeds 1/2"
        )));
    }
    Ok(TailBound { bound: sum * Rat::from_integer(2.into()) })
}
