//! Exact evaluation, verification and classification of the infinite
//! products
//!
//! ```text
//!   ∏_{n ≥ start} (1 + c / F_{a·r^n + b})   and   ∏_{n ≥ start} (1 + c / L_{a·r^n + b})
//! ```
//!
//! Closed forms live in Q(√5) ([`quadfield`]); partial products are exact
//! rationals with a rigorous truncation bound ([`products`]).

pub mod classify;
pub mod closedform;
pub mod fiblucas;
pub mod par;
pub mod products;
pub mod quadfield;
pub mod report;

pub use classify::{classify, unity_trace_cycles, Case, Status, Verdict};
pub use closedform::{ClosedForm, ClosedFormError, Derivation};
pub use par::Exec;
pub use products::{
    partial_product, tail_bound, Family, PartialProductReport, ProductError, ProductOptions, ProductSpec, TailBound,
};
pub use quadfield::{GoldenNum, Rat};
pub use report::{verify, VerificationReport, VerifyError};
