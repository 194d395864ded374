//! Short vectors in cosets of ideals, and the norm-gap estimate.

use num_bigint::BigUint;
use num_integer::Integer;

use super::{GaussianIdeal, GaussianInteger, Order};

/// An element of `α + I` of minimal norm, ties broken by the canonical
/// order on `Order`-elements.
///
/// With `γ` the generator, `N(α + λγ) = N(γ)|α/γ + λ|^2`, and rounding
/// `α/γ` already gets below `N(γ)/2`. Every element at least that short
/// has `λ` within one step of the rounded quotient, so a 5x5 window around
/// it is exhaustive.
pub fn coset_min_norm(order: Order, alpha: &GaussianInteger, ideal: &GaussianIdeal) -> GaussianInteger {
    let gamma = ideal.generator();
    if gamma.is_zero() {
        return alpha.clone();
    }
    if gamma.divides(alpha) {
        return GaussianInteger::zero();
    }
    match order {
        Order::Z => {
            assert!(alpha.is_rational() && gamma.is_rational(), "Z coset with non-rational data");
            let r = alpha.re.mod_floor(&gamma.re);
            let a = GaussianInteger::from_int(r.clone());
            let b = GaussianInteger::from_int(r - &gamma.re);
            a.min(b)
        }
        Order::Zi => {
            let (centre, _) = alpha.div_rem_round(gamma);
            let mut best: Option<GaussianInteger> = None;
            for dr in -2i64..=2 {
                for di in -2i64..=2 {
                    let lambda = &centre + &GaussianInteger::new(dr, di);
                    let cand = alpha - &(&lambda * gamma);
                    if best.as_ref().is_none_or(|b| cand < *b) {
                        best = Some(cand);
                    }
                }
            }
            best.expect("window is nonempty")
        }
    }
}

/// Smallest norm of a nonzero element of the ideal.
pub fn min_nonzero_norm(ideal: &GaussianIdeal) -> BigUint {
    ideal.norm()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GapError {
    #[error("need N(beta) < N(alpha), got {beta} >= {alpha}")]
    NormNotSmaller { alpha: BigUint, beta: BigUint },
    #[error("need N(beta*g+f) >= N(alpha*g+f), got {shifted_beta} < {shifted_alpha}")]
    NegativeGap { shifted_alpha: BigUint, shifted_beta: BigUint },
}

/// The gap `N(βg+f) - N(αg+f)` and whether it stays within `4|fg||α|`,
/// checked as `gap^2 <= 16 N(f) N(g) N(α)`.
pub fn lemma_k_gap(
    f: &GaussianInteger,
    g: &GaussianInteger,
    alpha: &GaussianInteger,
    beta: &GaussianInteger,
) -> Result<(BigUint, bool), GapError> {
    let (na, nb) = (alpha.norm(), beta.norm());
    if nb >= na {
        return Err(GapError::NormNotSmaller { alpha: na, beta: nb });
    }
    let sa = (&(alpha * g) + f).norm();
    let sb = (&(beta * g) + f).norm();
    if sb < sa {
        return Err(GapError::NegativeGap {
            shifted_alpha: sa,
            shifted_beta: sb,
        });
    }
    let gap = sb - sa;
    let bound = BigUint::from(16u32) * f.norm() * g.norm() * na;
    let ok = &gap * &gap <= bound;
    Ok((gap, ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64) -> GaussianInteger {
        GaussianInteger::new(a, b)
    }

    #[test]
    fn coset_examples() {
        let five = GaussianIdeal::from_int(5);
        assert_eq!(coset_min_norm(Order::Zi, &g(7, 0), &five), g(2, 0));
        assert_eq!(coset_min_norm(Order::Z, &g(7, 0), &five), g(2, 0));
        assert_eq!(coset_min_norm(Order::Zi, &g(10, 5), &five), g(0, 0));
        assert_eq!(coset_min_norm(Order::Zi, &g(1, 0), &GaussianIdeal::from_int(10)), g(1, 0));
    }

    #[test]
    fn coset_matches_brute_force() {
        let ideals = [g(5, 0), g(2, 1), g(3, 3), g(4, -1)];
        for gamma in ideals {
            let ideal = GaussianIdeal::new(&gamma);
            for a in -9..=9 {
                for b in -9..=9 {
                    let alpha = g(a, b);
                    let mut best = None::<GaussianInteger>;
                    for x in -12..=12 {
                        for y in -12..=12 {
                            let c = &alpha + &(&g(x, y) * &gamma);
                            if best.as_ref().is_none_or(|b| c < *b) {
                                best = Some(c);
                            }
                        }
                    }
                    assert_eq!(coset_min_norm(Order::Zi, &alpha, &ideal), best.unwrap());
                }
            }
        }
    }

    #[test]
    fn gap_examples() {
        assert_eq!(lemma_k_gap(&g(-10, 0), &g(1, 0), &g(1, 0), &g(0, 0)), Ok((BigUint::from(19u32), true)));
        assert!(matches!(
            lemma_k_gap(&g(0, 0), &g(1, 0), &g(2, 0), &g(2, 0)),
            Err(GapError::NormNotSmaller { .. })
        ));
        assert!(matches!(
            lemma_k_gap(&g(0, 0), &g(1, 0), &g(2, 0), &g(1, 0)),
            Err(GapError::NegativeGap { .. })
        ));
    }
}
