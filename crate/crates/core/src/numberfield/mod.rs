//! Exact arithmetic in Z, Z[i], Q and Q(i), with ideals of Z and Z[i].

mod factor;
mod gaussian;
mod ideal;
mod lattice;
mod mobius;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use factor::{
    factor_gaussian, factor_gaussian_with, factor_integer, factor_integer_with, factor_u64,
    is_probable_prime, primes_up_to, sqrt_minus_one_mod, FactorBudget, GaussianFactorization,
    IntegerFactorization,
};
pub use gaussian::{log_abs, log_biguint, GaussianInteger, GaussianRational};
pub use ideal::{FactoredIdeal, GaussianIdeal};
pub use lattice::{coset_min_norm, lemma_k_gap, min_nonzero_norm, GapError};
pub use mobius::{ideal_divisors, mobius, mobius_sum_and_euler_product};

/// The two rings the library works over: Z, or Z[i].
///
/// The same tag serves as the endomorphism order of a curve and as the ring
/// of integers of its field of definition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    Z,
    Zi,
}

impl Order {
    /// Whether `g` lies in this ring.
    pub fn contains(self, g: &GaussianInteger) -> bool {
        match self {
            Order::Z => g.is_rational(),
            Order::Zi => true,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Z => "Z",
            Order::Zi => "Zi",
        })
    }
}

impl FromStr for Order {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "Z" | "z" => Ok(Order::Z),
            "Zi" | "zi" | "Z[i]" => Ok(Order::Zi),
            other => Err(ParseError::new(other, "expected Z or Zi")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?}: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: String,
}

impl ParseError {
    pub fn new(input: &str, reason: &str) -> Self {
        ParseError {
            input: input.to_string(),
            reason: reason.to_string(),
        }
    }
}
