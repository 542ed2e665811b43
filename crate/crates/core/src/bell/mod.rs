//! Bell expressions built from stabilizer generators.
//!
//! Party 0 measures `A_0, A_1` with `X -> A_0 + A_1`, `Z -> A_0 - A_1`; every
//! other party uses `X -> A_0`, `Z -> A_1`. Party indices are zero-based.
//! Coefficients are exact elements of `Q[√2]`; floating point only appears
//! when matrices are formed.

mod classical;
mod coeff;
mod sos;

pub use classical::{classical_bound, ClassicalResult, DEFAULT_BRUTE_LIMIT};
pub use coeff::Coeff;
pub use sos::{sos_recipe, verify_sos, SosRecipe, SosSquare};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constructions::{construction2_generators, k_min, max_generators};
use crate::dense::{self, c, CMat};
use crate::error::{Error, Result};
use crate::pauli::Letter;
use crate::stabilizer::{basis_matrix, codeword_basis, StabilizerSet};

/// Observable choice `(party, setting)` with setting 0 or 1.
pub type Factor = (usize, u8);

/// A product of observables on distinct parties, sorted by party.
pub type Monomial = Vec<Factor>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub parties: Monomial,
    pub coeff: Coeff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BellExpressionRepr", into = "BellExpressionRepr")]
pub struct BellExpression {
    n_parties: usize,
    terms: BTreeMap<Monomial, Coeff>,
    classical_bound: Option<Coeff>,
    quantum_bound: Option<Coeff>,
}

#[derive(Serialize, Deserialize)]
struct BellExpressionRepr {
    n_parties: usize,
    terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    classical_bound: Option<Coeff>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quantum_bound: Option<Coeff>,
}

impl TryFrom<BellExpressionRepr> for BellExpression {
    type Error = Error;
    fn try_from(r: BellExpressionRepr) -> Result<Self> {
        let mut e = BellExpression::new(r.n_parties);
        for t in r.terms {
            e.add_term(t.parties, t.coeff)?;
        }
        e.set_bounds(r.classical_bound, r.quantum_bound)?;
        Ok(e)
    }
}

impl From<BellExpression> for BellExpressionRepr {
    fn from(e: BellExpression) -> Self {
        BellExpressionRepr {
            n_parties: e.n_parties,
            terms: e.terms().collect(),
            classical_bound: e.classical_bound,
            quantum_bound: e.quantum_bound,
        }
    }
}

impl BellExpression {
    pub fn new(n_parties: usize) -> Self {
        BellExpression { n_parties, terms: BTreeMap::new(), classical_bound: None, quantum_bound: None }
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    /// Adds `coeff` to the monomial, dropping it if the sum vanishes.
    pub fn add_term(&mut self, mut parties: Monomial, coeff: Coeff) -> Result<()> {
        if parties.is_empty() {
            return Err(Error::Precondition("Bell term must touch at least one party".into()));
        }
        parties.sort_unstable();
        for w in parties.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Precondition(format!("party {} appears twice in one term", w[0].0)));
            }
        }
        for &(p, s) in &parties {
            if p >= self.n_parties || s > 1 {
                return Err(Error::Precondition(format!("bad factor ({p}, {s}) for {} parties", self.n_parties)));
            }
        }
        let entry = self.terms.entry(parties.clone()).or_insert(Coeff::ZERO);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&parties);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|(p, c)| Term { parties: p.clone(), coeff: *c })
    }

    pub fn term_map(&self) -> &BTreeMap<Monomial, Coeff> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn classical_bound(&self) -> Option<Coeff> {
        self.classical_bound
    }

    pub fn quantum_bound(&self) -> Option<Coeff> {
        self.quantum_bound
    }

    pub fn set_bounds(&mut self, classical: Option<Coeff>, quantum: Option<Coeff>) -> Result<()> {
        if let (Some(cb), Some(qb)) = (classical, quantum) {
            if cb > qb {
                return Err(Error::Precondition(format!("classical bound {cb} exceeds quantum bound {qb}")));
            }
        }
        self.classical_bound = classical;
        self.quantum_bound = quantum;
        Ok(())
    }

    /// Value on a deterministic strategy, `values[p][s] = ±1`.
    pub fn evaluate_deterministic(&self, values: &[[i8; 2]]) -> Coeff {
        self.terms
            .iter()
            .map(|(mono, coeff)| {
                let sign: i64 = mono.iter().map(|&(p, s)| values[p][s as usize] as i64).product();
                *coeff * Coeff::int(sign)
            })
            .fold(Coeff::ZERO, |a, b| a + b)
    }
}

/// Expands one generator into monomials with integer coefficients.
fn assign_generator(op: &crate::pauli::PauliOp) -> Result<Vec<(Monomial, i64)>> {
    let mut rest = Vec::new();
    for q in 1..op.n() {
        match op.letter(q) {
            Letter::I => {}
            Letter::X => rest.push((q, 0)),
            Letter::Z => rest.push((q, 1)),
            Letter::Y => unreachable!("checked by caller"),
        }
    }
    let sign = if op.is_negative() { -1 } else { 1 };
    let with = |s: u8| {
        let mut m = vec![(0, s)];
        m.extend_from_slice(&rest);
        m
    };
    Ok(match op.letter(0) {
        Letter::I => vec![(rest, sign)],
        Letter::X => vec![(with(0), sign), (with(1), sign)],
        Letter::Z => vec![(with(0), sign), (with(1), -sign)],
        Letter::Y => unreachable!("checked by caller"),
    })
}

/// `Σ_i w_i <G_i>` under the observable assignment.
pub fn bell_from_stabilizers(set: &StabilizerSet, weights: &[Coeff]) -> Result<BellExpression> {
    if weights.len() != set.k() {
        return Err(Error::Precondition(format!("{} weights for {} generators", weights.len(), set.k())));
    }
    let mut expr = BellExpression::new(set.n());
    for (i, (op, w)) in set.generators().iter().zip(weights).enumerate() {
        if op.has_y() {
            return Err(Error::ContainsY(i));
        }
        if !w.is_positive() {
            return Err(Error::Precondition(format!("weight {w} of generator {i} is not positive")));
        }
        if op.is_identity_word() {
            return Err(Error::Precondition(format!("generator {i} is the identity")));
        }
        for (mono, sign) in assign_generator(op)? {
            expr.add_term(mono, *w * Coeff::int(sign))?;
        }
    }
    Ok(expr)
}

/// `G̃` for one generator: party 0 contributes `(A_0 ± A_1)/√2`, every other
/// party `A_0` for `X` and `A_1` for `Z`.
pub fn gtilde(op: &crate::pauli::PauliOp) -> Result<Vec<(Monomial, Coeff)>> {
    if op.has_y() {
        return Err(Error::Precondition(format!("{op} contains Y; no observable assignment")));
    }
    let h = Coeff::inv_sqrt2();
    Ok(assign_generator(op)?
        .into_iter()
        .map(|(mono, sign)| {
            let scale = if mono.first().is_some_and(|f| f.0 == 0) { h } else { Coeff::ONE };
            (mono, scale * Coeff::int(sign))
        })
        .collect())
}

/// Dense `G̃` for the given observables.
pub fn gtilde_operator(op: &crate::pauli::PauliOp, obs: &ObservableSet, dense_limit: usize) -> Result<CMat> {
    let total = check_dims(op.n(), obs, dense_limit)?;
    let terms: Vec<(Monomial, f64)> = gtilde(op)?.into_iter().map(|(m, k)| (m, k.to_f64())).collect();
    Ok(monomials_operator(&terms, obs, total))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Max,
    Cyclic,
    Chsh,
}

/// Generators and weights behind a family member.
pub fn family_stabilizer(family: Family, n: usize) -> Result<(StabilizerSet, Vec<Coeff>)> {
    match family {
        Family::Max => {
            let set = max_generators(n)?;
            let w = vec![Coeff::ONE; set.k()];
            Ok((set, w))
        }
        Family::Cyclic => {
            if n % 2 == 1 || n < 6 {
                return Err(Error::Precondition(format!("cyclic family needs even N >= 6, got {n}")));
            }
            let set = construction2_generators(n, true)?;
            let mut w = vec![Coeff::ONE; set.k()];
            w[1] = Coeff::int(2);
            Ok((set, w))
        }
        Family::Chsh => {
            if n != 2 {
                return Err(Error::Precondition(format!("CHSH is bipartite, got N={n}")));
            }
            Ok((StabilizerSet::from_words(&["XX", "ZZ"])?, vec![Coeff::ONE; 2]))
        }
    }
}

/// Maximal-construction inequality with `β_C = k_min`, `β_Q = 2(√2-1) + k_min`.
pub fn synth_max_inequality(n: usize) -> Result<BellExpression> {
    let (set, w) = family_stabilizer(Family::Max, n)?;
    let mut e = bell_from_stabilizers(&set, &w)?;
    let k = k_min(n)? as i64;
    e.set_bounds(Some(Coeff::int(k)), Some(Coeff::ints(k - 2, 2)))?;
    Ok(e)
}

/// Cyclic construction-2 inequality with `β_C = N/2 + 2`, `β_Q = N/2 + 2(2√2-1)`.
pub fn synth_cyclic_inequality(n: usize) -> Result<BellExpression> {
    let (set, w) = family_stabilizer(Family::Cyclic, n)?;
    let mut e = bell_from_stabilizers(&set, &w)?;
    let half = (n / 2) as i64;
    e.set_bounds(Some(Coeff::int(half + 2)), Some(Coeff::ints(half - 2, 4)))?;
    Ok(e)
}

pub fn chsh() -> Result<BellExpression> {
    let (set, w) = family_stabilizer(Family::Chsh, 2)?;
    let mut e = bell_from_stabilizers(&set, &w)?;
    e.set_bounds(Some(Coeff::int(2)), Some(Coeff::ints(0, 2)))?;
    Ok(e)
}

pub fn synth(family: Family, n: usize) -> Result<BellExpression> {
    match family {
        Family::Max => synth_max_inequality(n),
        Family::Cyclic => synth_cyclic_inequality(n),
        Family::Chsh => chsh(),
    }
}

pub const INVOLUTION_TOL: f64 = 1e-10;

/// Two dichotomic observables per party.
#[derive(Clone, Debug)]
pub struct ObservableSet {
    ops: Vec<[CMat; 2]>,
}

impl ObservableSet {
    pub fn new(ops: Vec<[CMat; 2]>) -> Result<Self> {
        for (p, pair) in ops.iter().enumerate() {
            let d = pair[0].nrows();
            for (s, a) in pair.iter().enumerate() {
                if !a.is_square() || a.nrows() != d {
                    return Err(Error::Precondition(format!("observable ({p}, {s}) has wrong shape")));
                }
                let herm = dense::hermitian_defect(a);
                let inv = dense::max_abs(&(a * a - dense::eye(d)));
                if herm > INVOLUTION_TOL || inv > INVOLUTION_TOL {
                    return Err(Error::Numerical {
                        what: format!("observable ({p}, {s}) is not a Hermitian involution"),
                        residual: herm.max(inv),
                    });
                }
            }
        }
        Ok(ObservableSet { ops })
    }

    pub fn n_parties(&self) -> usize {
        self.ops.len()
    }

    pub fn local_dim(&self, party: usize) -> usize {
        self.ops[party][0].nrows()
    }

    pub fn total_dim(&self) -> u128 {
        self.ops.iter().map(|p| p[0].nrows() as u128).product()
    }

    pub fn get(&self, party: usize, setting: u8) -> &CMat {
        &self.ops[party][setting as usize]
    }
}

/// Party 0: `(X ± Z)/√2`; others `X`, `Z`.
pub fn canonical_observables(n: usize) -> ObservableSet {
    let r = c(std::f64::consts::FRAC_1_SQRT_2);
    let (x, z) = (dense::pauli_x(), dense::pauli_z());
    let mut ops = vec![[(&x + &z) * r, (&x - &z) * r]];
    ops.extend((1..n).map(|_| [x.clone(), z.clone()]));
    ObservableSet::new(ops).expect("canonical observables are involutions")
}

pub(crate) fn check_dims(n_parties: usize, obs: &ObservableSet, dense_limit: usize) -> Result<usize> {
    if obs.n_parties() != n_parties {
        return Err(Error::WidthMismatch { expected: n_parties, found: obs.n_parties() });
    }
    let total = obs.total_dim();
    let limit = 1u128 << dense_limit.min(100);
    if total > limit {
        return Err(Error::Limit { what: "Hilbert space dimension", size: total as usize, limit: limit as usize });
    }
    Ok(total as usize)
}

/// Dense operator of a monomial list with real coefficients.
pub(crate) fn monomials_operator(
    terms: &[(Monomial, f64)],
    obs: &ObservableSet,
    total: usize,
) -> CMat {
    let mut out = CMat::zeros(total, total);
    for (mono, coeff) in terms {
        let factors: Vec<CMat> = (0..obs.n_parties())
            .map(|p| match mono.iter().find(|f| f.0 == p) {
                Some(&(_, s)) => obs.get(p, s).clone(),
                None => dense::eye(obs.local_dim(p)),
            })
            .collect();
        out += dense::kron_all(factors.iter()) * c(*coeff);
    }
    out
}

/// `Σ coeff × ⊗ observables`, identity on absent parties.
pub fn bell_operator(expr: &BellExpression, obs: &ObservableSet, dense_limit: usize) -> Result<CMat> {
    let total = check_dims(expr.n_parties(), obs, dense_limit)?;
    let terms: Vec<(Monomial, f64)> = expr.terms().map(|t| (t.parties, t.coeff.to_f64())).collect();
    let b = monomials_operator(&terms, obs, total);
    let defect = dense::hermitian_defect(&b);
    if defect > INVOLUTION_TOL {
        return Err(Error::Numerical { what: "Bell operator is not Hermitian".into(), residual: defect });
    }
    Ok(b)
}

/// Largest eigenvalue of the Bell operator.
pub fn max_eigenvalue(expr: &BellExpression, obs: &ObservableSet, dense_limit: usize) -> Result<f64> {
    let b = bell_operator(expr, obs, dense_limit)?;
    Ok(dense::hermitian_eigenvalues(&b).last().copied().unwrap_or(0.0))
}

/// Range `(min, max)` of `<ψ|B|ψ>` over unit vectors of the stabilized
/// subspace, with canonical observables.
pub fn quantum_value_on_subspace(
    expr: &BellExpression,
    set: &StabilizerSet,
    dense_limit: usize,
) -> Result<(f64, f64)> {
    if set.n() != expr.n_parties() {
        return Err(Error::WidthMismatch { expected: expr.n_parties(), found: set.n() });
    }
    let b = bell_operator(expr, &canonical_observables(set.n()), dense_limit)?;
    let v = basis_matrix(&codeword_basis(set, dense_limit)?);
    let projected = v.adjoint() * b * &v;
    let vals = dense::hermitian_eigenvalues(&projected);
    Ok((vals[0], vals[vals.len() - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::pauli_to_dense;

    #[test]
    fn chsh_terms() {
        let e = chsh().unwrap();
        let got: Vec<(Monomial, Coeff)> = e.terms().map(|t| (t.parties, t.coeff)).collect();
        assert_eq!(
            got,
            vec![
                (vec![(0, 0), (1, 0)], Coeff::ONE),
                (vec![(0, 0), (1, 1)], Coeff::ONE),
                (vec![(0, 1), (1, 0)], Coeff::ONE),
                (vec![(0, 1), (1, 1)], -Coeff::ONE),
            ]
        );
        assert_eq!(e, synth_max_inequality(2).unwrap());
    }

    #[test]
    fn three_party_terms() {
        // <(A0+A1)B0> + <(A0-A1)B1C1> + <B0C0>
        let e = synth_max_inequality(3).unwrap();
        assert_eq!(e.len(), 5);
        assert_eq!(e.term_map()[&vec![(0, 1), (1, 1), (2, 1)]], -Coeff::ONE);
        assert_eq!(e.term_map()[&vec![(1, 0), (2, 0)]], Coeff::ONE);
        assert_eq!(e.quantum_bound(), Some(Coeff::ints(1, 2)));
    }

    #[test]
    fn y_refused() {
        let set = StabilizerSet::from_words(&["YY", "ZZ"]).unwrap();
        assert!(matches!(bell_from_stabilizers(&set, &[Coeff::ONE, Coeff::ONE]), Err(Error::ContainsY(0))));
    }

    #[test]
    fn canonical_operator_is_weighted_generator_sum() {
        for n in 2..=6 {
            let set = max_generators(n).unwrap();
            let b = bell_operator(&synth_max_inequality(n).unwrap(), &canonical_observables(n), 12).unwrap();
            let mut expect = CMat::zeros(1 << n, 1 << n);
            for (i, g) in set.generators().iter().enumerate() {
                let w = if i < 2 { std::f64::consts::SQRT_2 } else { 1.0 };
                expect += pauli_to_dense(g) * c(w);
            }
            assert!(dense::max_abs(&(b - expect)) < 1e-12, "N={n}");
        }
    }

    #[test]
    fn empty_expression_gives_zero() {
        let b = bell_operator(&BellExpression::new(2), &canonical_observables(2), 12).unwrap();
        assert_eq!(dense::max_abs(&b), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let e = synth_cyclic_inequality(6).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(serde_json::from_str::<BellExpression>(&s).unwrap(), e);
    }

    #[test]
    fn bounds_ordering_enforced() {
        let mut e = chsh().unwrap();
        assert!(e.set_bounds(Some(Coeff::int(3)), Some(Coeff::int(2))).is_err());
    }
}
