//! Tileability analysis for Wang tile sets and integral polygon prototile sets.
//!
//! The library builds the gluing 2-complex of a prototile set (one 2-cell per
//! prototile, one 1-cell per edge class), computes the cone of non-negative
//! 2-cycles with exact rational arithmetic, glues branched surfaces out of
//! integral cycles to evaluate a Thurston-type norm, and combines the pieces
//! into a tileability verdict pipeline: cone emptiness certificates, enforced
//! pattern counts, periodic tiling extraction from flat torus surfaces, and
//! asymptotic norm tables as evidence in the undecided case.
//!
//! All decision procedures run over [`Rat`]; the generic linear algebra in
//! [`linalg`] also instantiates at `f64` when exactness is not required.

pub mod asymptotic;
pub mod budget;
pub mod homology;
pub mod linalg;
pub mod reduction;
pub mod refinement;
pub mod report;
pub mod surface;
pub mod tileset;
pub mod verify;

/// Exact scalar used by all decision procedures.
pub type Rat = num_rational::BigRational;

/// Arbitrary precision integer matching [`Rat`]'s numerator/denominator type.
pub type Int = num_bigint::BigInt;

/// Shorthand for building a [`Rat`] from a machine integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Shorthand for building a [`Rat`] fraction from machine integers.
pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}
