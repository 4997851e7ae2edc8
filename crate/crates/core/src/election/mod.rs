//! The election data model: exact rationals, candidate sets, profiles and the
//! PAV objective.

mod candidates;
mod profile;
mod score;

pub use candidates::{subsets_of_size, subsets_up_to, CandidateSet, Members, MAX_CANDIDATES};
pub use profile::{ActiveSet, ElectionInstance, Profile, Restriction};
pub(crate) use profile::IntegerWeights;
pub use score::{
    harmonic, harmonic_table, pav_score, restrict_profile, swap_delta, swap_delta_for_ballot,
    utility,
};

use num_bigint::BigInt;

/// Exact fraction in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// `n / d` as an exact rational.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
