//! Closed-form bounds, the survival DPs they dominate, and Monte Carlo
//! estimates of `ψ` for concrete instances.
//!
//! Everything on a verification path is exact. Bounds with half-integer
//! exponents of 27/8 live in `Q(√6)` (see [`QSqrt6`]).

mod bounds;
mod certificate;
mod claims;
mod dp;
mod estimate;
mod surd;

pub use bounds::{f_large, f_small, g3_alt, g_large, g_small, small_regime, Regime};
pub use certificate::{
    global_bound_check, large_route_sweep, n_of_u0, six_pow_quarter, CertificateTerm,
    ControlledSweep, GlobalBoundReport, LargeRouteRow, NodeCertificate, ProfileParams,
};
pub use claims::{verify_bound_claims, ClaimReport, ClaimResult, ClaimWitness};
pub use dp::{dp_m_large, dp_m_small, BoundTable, Grid, TableKind};
pub use estimate::{estimate_psi, PsiEstimate};
pub use surd::QSqrt6;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Serializes a rational as its `num/den` string.
pub fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

/// `base^e` for any integer `e`; `base` must be nonzero when `e < 0`.
pub fn rpow(base: &Rational, e: i64) -> Rational {
    let e = i32::try_from(e).expect("exponent out of i32 range");
    base.pow(e)
}
