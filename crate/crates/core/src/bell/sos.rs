//! Sum-of-squares certificates `β·1 - B = Σ c_i (1 - G̃_i)²`.
//!
//! A generator touching party 0 becomes `G̃ = (A_0 ± A_1)/√2 ⊗ …` with
//! prefactor `w/√2`; any other generator becomes `G̃ = ⊗ A` with prefactor
//! `w/2`. Squaring `(A_0 ± A_1)/√2` leaves `±{A_0, A_1}/2`, which cancels
//! between the two party-0 types exactly when their total weights agree.
//! The shift is then `2√2 W + Σ_{other} w`.

use serde::Serialize;

use super::{check_dims, monomials_operator, BellExpression, Coeff, Monomial, ObservableSet};
use crate::dense::{self, c};
use crate::error::{Error, Result};
use crate::pauli::Letter;
use crate::stabilizer::StabilizerSet;

#[derive(Clone, Debug, Serialize)]
pub struct SosSquare {
    pub prefactor: Coeff,
    /// `G̃` as a combination of monomials.
    pub gtilde: Vec<(Monomial, Coeff)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SosRecipe {
    pub shift: Coeff,
    pub squares: Vec<SosSquare>,
}

pub fn sos_recipe(set: &StabilizerSet, weights: &[Coeff]) -> Result<SosRecipe> {
    if weights.len() != set.k() {
        return Err(Error::Precondition(format!("{} weights for {} generators", weights.len(), set.k())));
    }
    let mut w_x = Coeff::ZERO;
    let mut w_z = Coeff::ZERO;
    let mut others = Coeff::ZERO;
    let mut squares = Vec::with_capacity(set.k());
    for (i, (op, &w)) in set.generators().iter().zip(weights).enumerate() {
        if op.has_y() {
            return Err(Error::ContainsY(i));
        }
        let gt = super::gtilde(op)?;
        let square = match op.letter(0) {
            Letter::X => {
                w_x += w;
                SosSquare { prefactor: w * Coeff::inv_sqrt2(), gtilde: gt }
            }
            Letter::Z => {
                w_z += w;
                SosSquare { prefactor: w * Coeff::inv_sqrt2(), gtilde: gt }
            }
            _ => {
                others += w;
                SosSquare { prefactor: w * Coeff::ratio(1, 2), gtilde: gt }
            }
        };
        squares.push(square);
    }
    if w_x != w_z {
        return Err(Error::Precondition(format!(
            "party-0 weights unbalanced (X-type {w_x}, Z-type {w_z}); no square decomposition of this shape"
        )));
    }
    let shift = Coeff::ints(0, 2) * w_x + others;
    Ok(SosRecipe { shift, squares })
}

/// Spectral norm of `shift·1 - B - Σ c (1 - G̃)²` for the given observables.
pub fn verify_sos(
    expr: &BellExpression,
    obs: &ObservableSet,
    shift: f64,
    recipe: &SosRecipe,
    dense_limit: usize,
) -> Result<f64> {
    let total = check_dims(expr.n_parties(), obs, dense_limit)?;
    for (i, sq) in recipe.squares.iter().enumerate() {
        if !sq.prefactor.is_positive() || sq.gtilde.is_empty() {
            return Err(Error::Precondition(format!("square {i} in recipe is malformed")));
        }
        if sq.gtilde.iter().any(|(m, _)| m.iter().any(|&(p, s)| p >= expr.n_parties() || s > 1)) {
            return Err(Error::Precondition(format!("square {i} references a missing observable")));
        }
    }
    let b = super::bell_operator(expr, obs, dense_limit)?;
    let id = dense::eye(total);
    let mut m = &id * c(shift) - b;
    for sq in &recipe.squares {
        let terms: Vec<(Monomial, f64)> = sq.gtilde.iter().map(|(mono, k)| (mono.clone(), k.to_f64())).collect();
        let d = &id - monomials_operator(&terms, obs, total);
        m -= (&d * &d) * c(sq.prefactor.to_f64());
    }
    // Symmetrize against round-off before the Hermitian eigen-solve.
    let m = (&m + m.adjoint()) * c(0.5);
    Ok(dense::hermitian_norm(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{canonical_observables, family_stabilizer, synth_max_inequality, Family};

    #[test]
    fn max_family_recipe_shape() {
        let (set, w) = family_stabilizer(Family::Max, 5).unwrap();
        let r = sos_recipe(&set, &w).unwrap();
        assert_eq!(r.shift, Coeff::ints(2, 2));
        let pre: Vec<Coeff> = r.squares.iter().map(|s| s.prefactor).collect();
        let h = Coeff::ratio(1, 2);
        assert_eq!(pre, vec![Coeff::inv_sqrt2(), Coeff::inv_sqrt2(), h, h]);
    }

    #[test]
    fn cyclic_recipe_shape() {
        let (set, w) = family_stabilizer(Family::Cyclic, 6).unwrap();
        let r = sos_recipe(&set, &w).unwrap();
        assert_eq!(r.shift, Coeff::ints(1, 4));
        let pre: Vec<Coeff> = r.squares.iter().map(|s| s.prefactor).collect();
        assert_eq!(pre[1], Coeff::SQRT2);
        assert_eq!(pre[3], Coeff::inv_sqrt2());
    }

    #[test]
    fn canonical_residual_and_wrong_shift() {
        let e = synth_max_inequality(3).unwrap();
        let (set, w) = family_stabilizer(Family::Max, 3).unwrap();
        let r = sos_recipe(&set, &w).unwrap();
        let obs = canonical_observables(3);
        assert!(verify_sos(&e, &obs, r.shift.to_f64(), &r, 12).unwrap() < 1e-12);
        assert!((verify_sos(&e, &obs, r.shift.to_f64() + 0.1, &r, 12).unwrap() - 0.1).abs() < 1e-9);
    }

    #[test]
    fn unbalanced_weights_refused() {
        let set = StabilizerSet::from_words(&["XX", "ZZ"]).unwrap();
        assert!(sos_recipe(&set, &[Coeff::ONE, Coeff::int(2)]).is_err());
    }
}
