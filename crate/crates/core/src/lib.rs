//! Exact decision procedures for the Feder–Gitler degree sets of self maps of
//! quaternionic projective space.
//!
//! Two independent routes decide whether `k` satisfies the congruences
//! C_1..C_n: the p-local valuation tests in [`congruence`] (with the closed
//! form `D_p ∪ p^e Z_(p)`), and the Adams-operation endomorphism test in
//! [`ktheory`]. [`report`] and [`verify`] back the command-line tool.

pub mod congruence;
pub mod error;
pub mod ktheory;
pub mod padic;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
