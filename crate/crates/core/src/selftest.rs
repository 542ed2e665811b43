//! Numerical self-testing ingredients.
//!
//! Only the checkable parts are covered: bringing an anticommuting pair of
//! involutions to the form `X ⊗ 1`, `Z ⊗ 1`, and checking that a state is
//! stabilized by the generators rebuilt from measured observables. Nothing
//! here says anything about purifications or ancillas.

use serde::Serialize;

use crate::bell::{canonical_observables, gtilde_operator, ObservableSet};
use crate::constructions::max_generators;
use crate::dense::{self, c, CMat, CVec};
use crate::error::{Error, Result};
use crate::stabilizer::{codeword_basis, projector, StabilizerSet};

pub const INPUT_TOL: f64 = 1e-10;
pub const OUTPUT_TOL: f64 = 1e-8;

/// Hermitian `Xt`, `Zt` with `Xt² = Zt² = 1` and `{Xt, Zt} = 0`.
#[derive(Clone, Debug)]
pub struct InvolutionPair {
    xt: CMat,
    zt: CMat,
}

impl InvolutionPair {
    pub fn new(xt: CMat, zt: CMat) -> Result<Self> {
        let d = xt.nrows();
        if !xt.is_square() || zt.shape() != xt.shape() {
            return Err(Error::Precondition("pair must be square matrices of equal size".into()));
        }
        let id = dense::eye(d);
        let checks = [
            ("Xt Hermitian", dense::hermitian_defect(&xt)),
            ("Zt Hermitian", dense::hermitian_defect(&zt)),
            ("Xt² = 1", dense::max_abs(&(&xt * &xt - &id))),
            ("Zt² = 1", dense::max_abs(&(&zt * &zt - &id))),
            ("{Xt, Zt} = 0", dense::max_abs(&(&xt * &zt + &zt * &xt))),
        ];
        for (what, residual) in checks {
            if residual > INPUT_TOL {
                return Err(Error::Numerical { what: format!("involution pair: {what}"), residual });
            }
        }
        Ok(InvolutionPair { xt, zt })
    }

    pub fn dim(&self) -> usize {
        self.xt.nrows()
    }

    pub fn xt(&self) -> &CMat {
        &self.xt
    }

    pub fn zt(&self) -> &CMat {
        &self.zt
    }
}

/// Unitary `U` with `U Xt U† = X ⊗ 1` and `U Zt U† = Z ⊗ 1`.
///
/// With `u_a` an orthonormal basis of the `+1` eigenspace of `Xt`, `Zt u_a`
/// spans the `-1` eigenspace, and `U†` sends `|+, a>` to `u_a` and `|-, a>`
/// to `Zt u_a`.
pub fn canonicalize_pair(p: &InvolutionPair) -> Result<CMat> {
    let d = p.dim();
    if d % 2 == 1 {
        return Err(Error::Precondition(format!("anticommuting involutions need even dimension, got {d}")));
    }
    let half = d / 2;
    let (vals, vecs) = dense::hermitian_eigen(&p.xt);
    let plus: Vec<usize> = (0..d).filter(|&i| vals[i] > 0.0).collect();
    if plus.len() != half {
        return Err(Error::Numerical {
            what: format!("+1 eigenspace of Xt has dimension {} instead of {half}", plus.len()),
            residual: (plus.len() as f64 - half as f64).abs(),
        });
    }
    let r = c(std::f64::consts::FRAC_1_SQRT_2);
    let mut w = CMat::zeros(d, d);
    for (a, &col) in plus.iter().enumerate() {
        let mut u: CVec = vecs.column(col).into_owned();
        dense::fix_phase(&mut u);
        let zu = &p.zt * &u;
        w.set_column(a, &((&u + &zu) * r));
        w.set_column(half + a, &((&u - &zu) * r));
    }
    let u = w.adjoint();
    let (x_err, z_err) = canonical_errors(p, &u);
    let err = x_err.max(z_err);
    if err > OUTPUT_TOL {
        return Err(Error::Numerical { what: "canonicalized pair deviates from X⊗1, Z⊗1".into(), residual: err });
    }
    Ok(u)
}

/// `(‖U Xt U† - X⊗1‖, ‖U Zt U† - Z⊗1‖)` entrywise maxima.
pub fn canonical_errors(p: &InvolutionPair, u: &CMat) -> (f64, f64) {
    let id = dense::eye(p.dim() / 2);
    let x = dense::kron(&dense::pauli_x(), &id);
    let z = dense::kron(&dense::pauli_z(), &id);
    let conj = |m: &CMat| u * m * u.adjoint();
    (dense::max_abs(&(conj(&p.xt) - x)), dense::max_abs(&(conj(&p.zt) - z)))
}

/// The pair a party's observables induce: `((A_0+A_1)/√2, (A_0-A_1)/√2)` for
/// party 0 and `(A_0, A_1)` elsewhere.
pub fn site_pair(obs: &ObservableSet, party: usize) -> Result<InvolutionPair> {
    let (a0, a1) = (obs.get(party, 0), obs.get(party, 1));
    if party == 0 {
        let r = c(std::f64::consts::FRAC_1_SQRT_2);
        InvolutionPair::new((a0 + a1) * r, (a0 - a1) * r)
    } else {
        InvolutionPair::new(a0.clone(), a1.clone())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationReport {
    /// `‖G̃_i ψ - ψ‖` per generator.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub passed: bool,
    /// `<ψ|P|ψ>` for the qubit projector, when every party is a qubit.
    pub projector_fidelity: Option<f64>,
}

pub fn verify_stabilization(
    obs: &ObservableSet,
    state: &CVec,
    set: &StabilizerSet,
    dense_limit: usize,
) -> Result<StabilizationReport> {
    if obs.n_parties() != set.n() {
        return Err(Error::WidthMismatch { expected: set.n(), found: obs.n_parties() });
    }
    if obs.total_dim() != state.len() as u128 {
        return Err(Error::WidthMismatch { expected: obs.total_dim() as usize, found: state.len() });
    }
    let residuals = set
        .generators()
        .iter()
        .map(|g| Ok((gtilde_operator(g, obs, dense_limit)? * state - state).norm()))
        .collect::<Result<Vec<f64>>>()?;
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let qubits = (0..obs.n_parties()).all(|p| obs.local_dim(p) == 2);
    let projector_fidelity = if qubits {
        let p = projector(set, dense_limit)?;
        Some(dense::expectation(&p, state) / state.norm_squared())
    } else {
        None
    };
    Ok(StabilizationReport { residuals, max_residual, passed: max_residual <= OUTPUT_TOL, projector_fidelity })
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestSummary {
    pub n: usize,
    pub codewords: usize,
    pub reports: Vec<StabilizationReport>,
    /// Round-trip error of canonicalizing each party's induced pair.
    pub site_errors: Vec<f64>,
    pub passed: bool,
    pub scope: &'static str,
}

pub const SCOPE_NOTE: &str = "certifies the canonical qubit realization and the algebraic relations \
     (anticommuting involution pairs, stabilization of every codeword); statements about arbitrary \
     purifications are outside what a finite computation can check";

/// Canonical observables against every codeword of the maximal family.
pub fn canonical_pipeline(n: usize, dense_limit: usize) -> Result<SelftestSummary> {
    let set = max_generators(n)?;
    let obs = canonical_observables(n);
    let basis = codeword_basis(&set, dense_limit)?;
    let reports =
        basis.iter().map(|psi| verify_stabilization(&obs, psi, &set, dense_limit)).collect::<Result<Vec<_>>>()?;
    let site_errors = (0..n)
        .map(|p| {
            let pair = site_pair(&obs, p)?;
            let u = canonicalize_pair(&pair)?;
            let (ex, ez) = canonical_errors(&pair, &u);
            Ok(ex.max(ez))
        })
        .collect::<Result<Vec<f64>>>()?;
    let passed = reports.iter().all(|r| r.passed) && site_errors.iter().all(|&e| e <= OUTPUT_TOL);
    Ok(SelftestSummary { n, codewords: basis.len(), reports, site_errors, passed, scope: SCOPE_NOTE })
}
