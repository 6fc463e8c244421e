//! Exact arithmetic for the Dwork family
//! `X_1^{n+1} + ... + X_{n+1}^{n+1} - (n+1) t X_1 ... X_{n+1}`:
//! unit roots, Hasse invariants, formal group laws and horizontal sections.

mod check;
mod error;
pub mod formal_group;
pub mod geometry;
pub mod horizontal;
pub mod padic;
pub mod ring;
pub mod series;
pub mod unit_root;

pub use check::{all_passed, CheckOutcome};
pub use error::{Error, Result};

/// Truncated series over `Q`.
pub type QSeries = series::TruncatedSeries<num_rational::BigRational>;
/// Polynomials over `Q`.
pub type QPoly = series::Poly<num_rational::BigRational>;
/// Truncated series over `Z/p^N`.
pub type PadicSeries = series::TruncatedSeries<padic::PadicInt>;
/// Formal group laws over `Q`.
pub type QFormalGroupLaw = formal_group::FormalGroupLaw<ring::Rationals>;
/// Formal group laws over `Q[t]`.
pub type SymbolicFormalGroupLaw = formal_group::FormalGroupLaw<series::PolyRing<ring::Rationals>>;
