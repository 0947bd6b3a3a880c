//! Verification of closed forms against partial products, and the JSON
//! shapes emitted by the command-line front end.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, Case, Status, Verdict};
use crate::par::{self, Exec};
use crate::products::{partial_product_with, tail_bound_with, ProductError, ProductOptions, ProductSpec};
use crate::quadfield::{decimal_exponent, rat_to_decimal, GoldenNum, Rat};

/// Version tag carried by every JSON object.
pub const SCHEMA_VERSION: &str = "1";

/// Extra digits searched beyond the display precision when measuring
/// agreement.
const AGREEMENT_SLACK: usize = 10;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("no closed form: product is transcendental")]
    Transcendental,
    #[error("no closed form: algebraic, value unknown")]
    ValueUnknown,
    #[error(transparent)]
    Product(#[from] ProductError),
}

impl VerifyError {
    pub fn from_verdict(v: &Verdict) -> Self {
        match v.status {
            Status::Transcendental => VerifyError::Transcendental,
            Status::Algebraic => VerifyError::ValueUnknown,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    #[serde(flatten)]
    pub spec: ProductSpec,
    pub n: u64,
    pub case: Case,
    /// Display-only decimal renderings, truncated toward zero.
    pub partial: String,
    pub closed: String,
    /// Largest `d` with `|partial - closed| ≤ 10^-d` (searched up to a cap).
    pub agreement_digits: usize,
    /// Largest `d` with `tail bound ≤ 10^-d` (the same cap applies when the bound is zero).
    pub tail_bound_digits: usize,
    pub skipped: Vec<u64>,
    /// `|partial - closed| ≤ bound·|partial|`, decided exactly.
    pub pass: bool,
}

/// Largest `d` with `x ≤ 10^-d` for `x ≥ 0`; `limit` when `x = 0`.
fn rat_decimal_exponent(x: &Rat, limit: usize) -> usize {
    if x.is_zero() {
        return limit;
    }
    let len = |n: &num_bigint::BigInt| n.magnitude().to_str_radix(10).len();
    // x ∈ [10^{lp-lq-1}, 10^{lp-lq+1}), so the answer is near lq - lp.
    let guess = len(x.denom()) as i64 - len(x.numer()) as i64 + 1;
    let fits = |d: i64| d <= 0 || *x <= Rat::new(1.into(), crate::quadfield::pow10(d as usize));
    let mut d = guess.max(0);
    while d > 0 && !fits(d) {
        d -= 1;
    }
    d as usize
}

/// Evaluates the partial product to `n`, the tail bound after `n` and the
/// known closed form, and checks them against each other exactly.
pub fn verify(
    spec: &ProductSpec,
    n: u64,
    digits: usize,
    opts: &ProductOptions,
) -> Result<VerificationReport, VerifyError> {
    let verdict = classify(spec);
    let Some(closed_form) = verdict.closed_form.as_ref() else {
        return Err(VerifyError::from_verdict(&verdict));
    };
    let partial = partial_product_with(spec, n, opts)?;
    let bound = tail_bound_with(spec, n, opts)?.bound;

    let closed = if opts.strict_zero && !partial.skipped.is_empty() {
        GoldenNum::zero()
    } else {
        closed_form.value.clone()
    };
    let p = GoldenNum::from_rat(partial.value.clone());
    let diff = (&closed - &p).abs();
    let allowed = p.abs().scale(&bound);
    let pass = (allowed - diff.clone()).signum() >= 0;

    let tail_bound_digits = rat_decimal_exponent(&bound, digits + AGREEMENT_SLACK);
    let limit = digits.max(tail_bound_digits) + AGREEMENT_SLACK;
    let agreement_digits = decimal_exponent(&diff, limit);

    Ok(VerificationReport {
        schema: SCHEMA_VERSION.to_string(),
        spec: spec.clone(),
        n,
        case: verdict.case,
        partial: rat_to_decimal(&partial.value, digits),
        closed: closed.to_decimal(digits),
        agreement_digits,
        tail_bound_digits,
        skipped: partial.skipped,
        pass,
    })
}

/// [`verify`] over many specs; results keep input order.
pub fn verify_batch(
    specs: &[ProductSpec],
    n: u64,
    digits: usize,
    opts: &ProductOptions,
    exec: Exec,
) -> Vec<Result<VerificationReport, VerifyError>> {
    par::map(exec, specs, |s| verify(s, n, digits, opts))
}

/// [`classify`] over many specs; results keep input order.
pub fn classify_batch(specs: &[ProductSpec], exec: Exec) -> Vec<Verdict> {
    par::map(exec, specs, classify)
}

/// Coordinates of a field element as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenJson {
    pub u_num: String,
    pub u_den: String,
    pub v_num: String,
    pub v_den: String,
}

impl From<&GoldenNum> for GoldenJson {
    fn from(x: &GoldenNum) -> Self {
        GoldenJson {
            u_num: x.u().numer().to_string(),
            u_den: x.u().denom().to_string(),
            v_num: x.v().numer().to_string(),
            v_den: x.v().denom().to_string(),
        }
    }
}

impl GoldenJson {
    pub fn to_golden(&self) -> Option<GoldenNum> {
        let r = |n: &str, d: &str| -> Option<Rat> {
            let d: num_bigint::BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n.parse().ok()?, d))
        };
        Some(GoldenNum::new(r(&self.u_num, &self.u_den)?, r(&self.v_num, &self.v_den)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub schema: String,
    pub status: Status,
    pub case: Case,
    pub closed_form: Option<GoldenJson>,
    pub degenerate: Vec<u64>,
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        VerdictJson {
            schema: SCHEMA_VERSION.to_string(),
            status: v.status,
            case: v.case,
            closed_form: v.closed_value().map(GoldenJson::from),
            degenerate: v.degenerate_factors.clone(),
        }
    }
}
