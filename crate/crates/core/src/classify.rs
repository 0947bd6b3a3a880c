//! Algebraic-versus-transcendental classification of constant-coefficient
//! products `∏ (1 + c / W_{a·r^n + b})`.
//!
//! Fibonacci: algebraic iff `c = 0`, or `r = 2` and `c = F_b`.
//! Lucas: additionally algebraic when `r = 2`, `b = 0` and `c` is the
//! eventual constant trace `ω^{2^n} + ω^{-2^n}` of some root of unity ω.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::closedform::{
    fib_closed, fib_closed_from_zero, lucas_closed, lucas_closed_from_zero, lucas_unity_closed, ClosedForm,
    Derivation,
};
use crate::fiblucas::first_fib_at_least;
use crate::par::{self, Exec};
use crate::products::{term_index, Family, ProductSpec};
use crate::quadfield::GoldenNum;

/// Orders scanned when establishing the root-of-unity trace set.
pub const TRACE_ORDER_LIMIT: u64 = 100;

/// Default number of leading factors inspected for exact zeros.
pub const DEFAULT_SCAN_HORIZON: u64 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Algebraic,
    Transcendental,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    #[serde(rename = "i_c_zero")]
    CZero,
    #[serde(rename = "ii_c_matches")]
    CMatches,
    #[serde(rename = "iii_root_of_unity")]
    RootOfUnity,
    #[serde(rename = "none")]
    None,
}

impl Case {
    pub fn label(self) -> &'static str {
        match self {
            Case::CZero => "i_c_zero",
            Case::CMatches => "ii_c_matches",
            Case::RootOfUnity => "iii_root_of_unity",
            Case::None => "none",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Algebraic => "Algebraic",
            Status::Transcendental => "Transcendental",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub case: Case,
    /// Known exact value, for the product from `spec.start()`.
    pub closed_form: Option<ClosedForm>,
    /// Indices `n` (within the scan horizon) where the factor is zero.
    pub degenerate_factors: Vec<u64>,
}

impl Verdict {
    pub fn closed_value(&self) -> Option<&GoldenNum> {
        self.closed_form.as_ref().map(|cf| &cf.value)
    }
}

/// `2cos(2πe/m)` when it is a rational integer.
///
/// That happens exactly when `e/m mod 1` is one of
/// `0, 1/6, 1/4, 1/3, 1/2, 2/3, 3/4, 5/6`.
fn integral_trace(e: u64, m: u64) -> Option<i64> {
    let g = e.gcd(&m);
    let (p, q) = (e / g, m / g);
    match (q, p) {
        (1, _) => Some(2),
        (2, 1) => Some(-2),
        (3, 1 | 2) => Some(-1),
        (4, 1 | 3) => Some(0),
        (6, 1 | 5) => Some(1),
        _ => None,
    }
}

/// Integer traces that are constant on some squaring cycle of order `m`.
fn traces_for_order(m: u64) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    let mut on_seen_cycle = vec![false; m as usize];
    for e in 0..m {
        // Within m steps the orbit e -> 2e (mod m) is on its cycle.
        let mut x = e;
        for _ in 0..m {
            x = (2 * x) % m;
        }
        if on_seen_cycle[x as usize] {
            continue;
        }
        let mut cycle = vec![x];
        let mut y = (2 * x) % m;
        while y != x {
            cycle.push(y);
            y = (2 * y) % m;
        }
        for &z in &cycle {
            on_seen_cycle[z as usize] = true;
        }
        let traces: Vec<Option<i64>> = cycle.iter().map(|&z| integral_trace(z, m)).collect();
        if let Some(Some(t)) = traces.first() {
            if traces.iter().all(|x| *x == Some(*t)) {
                out.insert(*t);
            }
        }
    }
    out
}

/// Integers `c` such that some root of unity of order `≤ max_order` has
/// `ω^{2^n} + ω^{-2^n} = c` for all large `n`. Exact: no floating point.
pub fn unity_trace_cycles(max_order: u64) -> BTreeSet<i64> {
    unity_trace_cycles_with(max_order, Exec::default())
}

pub fn unity_trace_cycles_with(max_order: u64, exec: Exec) -> BTreeSet<i64> {
    par::map_range(exec, 1, max_order + 1, traces_for_order).into_iter().flatten().collect()
}

/// The case (iii) coefficient set, established once by orbit enumeration.
///
/// Panics if the enumeration ever disagrees with `{-1, 2}`: the stored
/// constants and closed forms only cover those two values.
pub fn unity_traces() -> &'static BTreeSet<i64> {
    static TRACES: OnceLock<BTreeSet<i64>> = OnceLock::new();
    TRACES.get_or_init(|| {
        let found = unity_trace_cycles(TRACE_ORDER_LIMIT);
        let expected: BTreeSet<i64> = [-1, 2].into_iter().collect();
        assert_eq!(found, expected, "root-of-unity trace set changed; classification is unsound");
        found
    })
}

pub fn classify(spec: &ProductSpec) -> Verdict {
    classify_with(spec, DEFAULT_SCAN_HORIZON)
}

pub fn classify_with(spec: &ProductSpec, horizon: u64) -> Verdict {
    let degenerate_factors = degenerate_factors(spec, horizon);
    let (case, closed_form) = decide(spec);
    let status = if case == Case::None { Status::Transcendental } else { Status::Algebraic };
    Verdict { status, case, closed_form, degenerate_factors }
}

fn decide(spec: &ProductSpec) -> (Case, Option<ClosedForm>) {
    let (family, a, b, c, start) = (spec.family(), spec.a(), spec.b(), spec.c(), spec.start());
    if c == 0 {
        let cf = ClosedForm { value: GoldenNum::one(), valid_from: start, derivation: Derivation::Trivial };
        return (Case::CZero, Some(cf));
    }
    if spec.r() != 2 {
        return (Case::None, None);
    }
    if coefficient_matches(family, b, c) {
        let cf = match (family, start == 0 && a % 2 == 1) {
            (Family::Fibonacci, false) => fib_closed(a, b, start),
            (Family::Fibonacci, true) => fib_closed_from_zero(a, b),
            (Family::Lucas, false) => lucas_closed(a, b, start),
            (Family::Lucas, true) => lucas_closed_from_zero(a, b),
        };
        return (Case::CMatches, cf.ok());
    }
    if family == Family::Lucas && b == 0 && unity_traces().contains(&c) {
        let cf = if a == 1 { lucas_unity_closed(c, start).ok() } else { None };
        return (Case::RootOfUnity, cf);
    }
    (Case::None, None)
}

/// `c == W_b`, without computing `W_b` when it is certainly larger.
fn coefficient_matches(family: Family, b: u64, c: i64) -> bool {
    if c <= 0 {
        // F_b ≥ 0 with F_b = 0 only at b = 0 (handled as c = 0); L_b ≥ 1.
        return false;
    }
    let c = BigInt::from(c);
    // W_b ≥ F_b, so any b with F_b > c cannot match.
    if b >= first_fib_at_least(&(&c + 1)) {
        return false;
    }
    family.term(b) == c
}

/// Indices `start ≤ n ≤ horizon` with `W_{a·r^n + b} = -c`.
fn degenerate_factors(spec: &ProductSpec, horizon: u64) -> Vec<u64> {
    let c = BigInt::from(spec.c());
    if !c.is_negative() {
        return Vec::new();
    }
    // W_k ≥ F_k > |c| from this index on.
    let beyond = first_fib_at_least(&(c.abs() + 1));
    let mut out = Vec::new();
    for n in spec.start()..=horizon {
        let k = match term_index(spec, n).to_u64() {
            Some(k) if k < beyond => k,
            _ => break,
        };
        if spec.family().term(k) == -&c {
            out.push(n);
        }
    }
    out
}
