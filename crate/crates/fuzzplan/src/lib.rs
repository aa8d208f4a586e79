//! Design and evaluation of fuzzy multiple deferred state acceptance
//! sampling plans for attributes.
//!
//! A lot is accepted outright when its sample shows at most `c1` defectives,
//! rejected beyond `c2`, and otherwise deferred to the record of the `m`
//! preceding lots, at least `k` of which must have been accepted at the
//! first stage. When the process defect fraction is known only as a fuzzy
//! number, every performance measure becomes an interval-valued band indexed
//! by the cut level. This crate provides:
//!
//! - crisp acceptance kernels for single, double and deferred-state plans
//!   ([`kernels`]);
//! - fuzzy fractions, cut extraction and the facilitator-shift family
//!   ([`fuzzy`]);
//! - acceptance and total-inspection bands plus the inspection-error
//!   transform ([`fuzzyprob`]);
//! - operating-characteristic band sweeps ([`bands`]);
//! - ASN-minimal two-point plan design and family comparison ([`design`]);
//! - a deterministic lot-stream simulator validating the analytics
//!   ([`simulate`]).
//!
//! The `fuzzplan` binary exposes all of it behind JSON configs with CSV and
//! JSON reports.

pub mod bands;
pub mod design;
pub mod error;
pub mod fuzzy;
pub mod fuzzyprob;
pub mod interval;
pub mod kernels;
mod optim;
pub mod report;
pub mod simulate;

pub use error::{Error, Result};
pub use fuzzy::{FuzzyFraction, FuzzyNumber, PentagonalFuzzy, TriangularFuzzy};
pub use interval::Interval;
pub use kernels::{DistModel, DspParams, PlanParams, SspParams};
