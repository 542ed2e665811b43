//! Maximally violating behaviours of the maximal-family inequality and the
//! dimension of the face of the quantum set they span.
//!
//! Adding the `N - k_min` operators `±H_{i,j}` to the maximal family pins a
//! single state for each sign pattern. Every such state violates the
//! inequality maximally, and the behaviours restricted to the products of
//! `H̃` operators plus one `G̃` are affinely independent.

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{bell_operator, canonical_observables, gtilde, synth_max_inequality, Coeff, Monomial, ObservableSet};
use crate::constructions::{h_operators, k_min, max_generators};
use crate::dense::{self, CMat, CVec};
use crate::error::{Error, Result};
use crate::pauli::PauliOp;
use crate::stabilizer::{codeword_basis, StabilizerSet};

pub const VIOLATION_TOL: f64 = 1e-9;
pub const RANK_TOL: f64 = 1e-8;

/// Maximal family together with `H_j` carrying sign `-` where `signs[j]`.
pub fn signed_stabilizer(n: usize, signs: &[bool]) -> Result<StabilizerSet> {
    let extra = n - k_min(n)?;
    if signs.len() != extra {
        return Err(Error::Precondition(format!("expected {extra} signs for N={n}, got {}", signs.len())));
    }
    let base = max_generators(n)?;
    if extra == 0 {
        return Ok(base);
    }
    let hs = h_operators(n)?;
    base.extended(hs.into_iter().zip(signs).map(|(h, &neg)| if neg { h.negated() } else { h }))
}

/// A correlator, or a fixed combination of correlators such as a `G̃` that
/// touches party 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelatorLabel {
    pub name: String,
    pub terms: Vec<(Monomial, Coeff)>,
}

impl CorrelatorLabel {
    /// Label for `G̃` of a Pauli word, under the usual assignment.
    pub fn from_pauli(name: impl Into<String>, op: &PauliOp) -> Result<Self> {
        Ok(CorrelatorLabel { name: name.into(), terms: gtilde(op)? })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Behaviour {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

fn label_operator(label: &CorrelatorLabel, obs: &ObservableSet, dense_limit: usize) -> Result<CMat> {
    let total = crate::bell::check_dims(obs.n_parties(), obs, dense_limit)?;
    let terms: Vec<(Monomial, f64)> = label.terms.iter().map(|(m, k)| (m.clone(), k.to_f64())).collect();
    Ok(crate::bell::monomials_operator(&terms, obs, total))
}

/// Expectation values of every label on a pure state.
pub fn behaviour(
    state: &CVec,
    obs: &ObservableSet,
    labels: &[CorrelatorLabel],
    dense_limit: usize,
) -> Result<Behaviour> {
    if obs.total_dim() != state.len() as u128 {
        return Err(Error::WidthMismatch { expected: obs.total_dim() as usize, found: state.len() });
    }
    let norm2 = state.norm_squared();
    let mut values = Vec::with_capacity(labels.len());
    for l in labels {
        if l.terms.iter().any(|(m, _)| m.iter().any(|&(p, s)| p >= obs.n_parties() || s > 1)) {
            return Err(Error::Precondition(format!("label {} references a missing observable", l.name)));
        }
        let v = dense::expectation(&label_operator(l, obs, dense_limit)?, state) / norm2;
        if v.abs() > 1.0 + 1e-9 {
            return Err(Error::Numerical { what: format!("correlator {} outside [-1, 1]", l.name), residual: v.abs() - 1.0 });
        }
        values.push(v);
    }
    Ok(Behaviour { labels: labels.iter().map(|l| l.name.clone()).collect(), values })
}

/// All nonempty products of `H̃` operators, then `G̃_{g}` (one-based `g`).
pub fn face_labels(n: usize, g: usize) -> Result<Vec<CorrelatorLabel>> {
    let set = max_generators(n)?;
    if g == 0 || g > set.k() {
        return Err(Error::Precondition(format!("generator index {g} out of 1..={}", set.k())));
    }
    let extra = n - k_min(n)?;
    let hs = if extra > 0 { h_operators(n)? } else { vec![] };
    let mut labels = Vec::with_capacity(1 << extra);
    for mask in 1u64..(1u64 << extra) {
        let mut prod = PauliOp::identity(n);
        let mut name = String::from("H");
        for (j, h) in hs.iter().enumerate() {
            if mask >> j & 1 == 1 {
                prod = prod.multiply(h)?;
                name.push_str(&format!("[{}]", j + 1));
            }
        }
        labels.push(CorrelatorLabel::from_pauli(name, &prod)?);
    }
    labels.push(CorrelatorLabel::from_pauli(format!("G{g}"), &set.generators()[g - 1])?);
    Ok(labels)
}

/// Default `G̃` label: the last generator, which avoids party 0 once `k >= 3`.
pub fn default_g_label(n: usize) -> Result<usize> {
    k_min(n)
}

#[derive(Clone, Debug, Serialize)]
pub struct SignedState {
    pub signs: Vec<bool>,
    pub bell_value: f64,
    pub violation_gap: f64,
    pub behaviour: Behaviour,
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceReport {
    pub n: usize,
    pub k_min: usize,
    pub g_label: usize,
    pub expected_dimension: usize,
    pub dimension: usize,
    pub quantum_bound: f64,
    pub max_violation_gap: f64,
    pub max_overlap: f64,
    pub states: Vec<SignedState>,
}

impl FaceReport {
    pub fn matches(&self) -> bool {
        self.dimension == self.expected_dimension
    }
}

/// Numerical rank with singular values below `tol · max(1, σ_max)` dropped.
pub fn real_rank(m: &nalgebra::DMatrix<f64>, tol: f64) -> usize {
    let sv = dense::singular_values(m);
    let scale = sv.iter().copied().fold(1.0, f64::max);
    sv.iter().filter(|&&s| s > tol * scale).count()
}

pub fn face_analysis(n: usize, g_label: usize, dense_limit: usize) -> Result<FaceReport> {
    let k = k_min(n)?;
    let extra = n - k;
    if n > dense_limit {
        return Err(Error::Limit { what: "qubits for dense face analysis", size: n, limit: dense_limit });
    }
    let labels = face_labels(n, g_label)?;
    let obs = canonical_observables(n);
    let expr = synth_max_inequality(n)?;
    let beta_q = expr.quantum_bound().expect("set by synthesis").to_f64();
    let b = bell_operator(&expr, &obs, dense_limit)?;
    let hs = if extra > 0 { h_operators(n)? } else { vec![] };
    let h_ops: Vec<CMat> =
        hs.iter().map(|h| crate::bell::gtilde_operator(h, &obs, dense_limit)).collect::<Result<_>>()?;

    let results: Vec<(SignedState, CVec)> = (0u64..(1u64 << extra))
        .into_par_iter()
        .map(|mask| {
            let signs: Vec<bool> = (0..extra).map(|j| mask >> j & 1 == 1).collect();
            let set = signed_stabilizer(n, &signs)?;
            let basis = codeword_basis(&set, dense_limit)?;
            if basis.len() != 1 {
                return Err(Error::Numerical {
                    what: format!("signed stabilizer {signs:?} fixes {} states", basis.len()),
                    residual: basis.len() as f64,
                });
            }
            let psi = basis.into_iter().next().expect("one state");
            let bell_value = dense::expectation(&b, &psi);
            let gap = (bell_value - beta_q).abs();
            if gap > VIOLATION_TOL {
                return Err(Error::Numerical {
                    what: format!("state for signs {signs:?} misses the maximal violation"),
                    residual: gap,
                });
            }
            for (j, h) in h_ops.iter().enumerate() {
                let want = if signs[j] { -1.0 } else { 1.0 };
                let got = dense::expectation(h, &psi);
                if (got - want).abs() > VIOLATION_TOL {
                    return Err(Error::Numerical {
                        what: format!("<H_{}> does not follow its sign for {signs:?}", j + 1),
                        residual: (got - want).abs(),
                    });
                }
            }
            let behaviour = behaviour(&psi, &obs, &labels, dense_limit)?;
            Ok((SignedState { signs, bell_value, violation_gap: gap, behaviour }, psi))
        })
        .collect::<Result<_>>()?;

    let mut max_overlap: f64 = 0.0;
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            max_overlap = max_overlap.max(results[i].1.dotc(&results[j].1).norm());
        }
    }
    let rows = results.len() - 1;
    let diffs = nalgebra::DMatrix::from_fn(rows, labels.len(), |r, col| {
        results[r + 1].0.behaviour.values[col] - results[0].0.behaviour.values[col]
    });
    let dimension = real_rank(&diffs, RANK_TOL);
    let states: Vec<SignedState> = results.into_iter().map(|(s, _)| s).collect();
    let max_violation_gap = states.iter().map(|s| s.violation_gap).fold(0.0, f64::max);
    Ok(FaceReport {
        n,
        k_min: k,
        g_label,
        expected_dimension: (1usize << extra) - 1,
        dimension,
        quantum_bound: beta_q,
        max_violation_gap,
        max_overlap,
        states,
    })
}

/// Affine dimension of the constructed maximally violating family.
pub fn face_dimension(n: usize, dense_limit: usize) -> Result<usize> {
    Ok(face_analysis(n, default_g_label(n)?, dense_limit)?.dimension)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::validate;

    #[test]
    fn signed_sets_have_dimension_one() {
        for n in [4, 5, 7] {
            let extra = n - k_min(n).unwrap();
            let signs = vec![true; extra];
            let r = validate(&signed_stabilizer(n, &signs).unwrap()).unwrap();
            assert_eq!(r.subspace_dim(), Some(1), "N={n}");
        }
        assert!(signed_stabilizer(7, &[true]).is_err());
    }

    #[test]
    fn small_face_dimensions() {
        assert_eq!(face_dimension(3, 12).unwrap(), 0);
        assert_eq!(face_dimension(4, 12).unwrap(), 1);
        assert_eq!(face_dimension(6, 12).unwrap(), 3);
    }

    #[test]
    fn seven_qubit_family() {
        let r = face_analysis(7, 4, 12).unwrap();
        assert_eq!(r.states.len(), 8);
        assert_eq!(r.dimension, 7);
        assert!(r.max_overlap < 1e-10);
        assert!(r.max_violation_gap < 1e-9);
    }

    #[test]
    fn h_products_factorize() {
        let r = face_analysis(7, 4, 12).unwrap();
        for s in &r.states {
            let h: Vec<f64> = s.signs.iter().map(|&neg| if neg { -1.0 } else { 1.0 }).collect();
            for (name, v) in s.behaviour.labels.iter().zip(&s.behaviour.values) {
                if let Some(idx) = name.strip_prefix('H') {
                    let expect: f64 = idx
                        .trim_matches(|ch| ch == '[' || ch == ']')
                        .split("][")
                        .map(|j| h[j.parse::<usize>().unwrap() - 1])
                        .product();
                    assert!((v - expect).abs() < 1e-10);
                } else {
                    assert!((v - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn rank_independent_of_g_choice() {
        let a = face_analysis(6, 3, 12).unwrap().dimension;
        let b = face_analysis(6, 4, 12).unwrap().dimension;
        assert_eq!(a, b);
    }
}
