//! End-to-end certificate for the maximal family at one `N`.

use gess_core::bell::{
    classical_bound, family_stabilizer, max_eigenvalue, quantum_value_on_subspace, sos_recipe, synth_max_inequality,
    verify_sos, BellExpression, Coeff, Family,
};
use gess_core::constructions::{k_min, max_generators};
use gess_core::error::{Error, Result};
use gess_core::faces::{default_g_label, face_analysis};
use gess_core::gme::{is_gme_oracle, is_gme_rank, pair_vectors, DEFAULT_ORACLE_LIMIT};
use gess_core::random::{random_observables, rng_from_seed};
use gess_core::stabilizer::{validate, StabilizerSet};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct Stage {
    pub name: &'static str,
    pub status: Status,
    pub detail: Value,
}

#[derive(Debug, Serialize)]
pub struct ExactValue {
    pub exact: String,
    pub value: f64,
}

impl From<Coeff> for ExactValue {
    fn from(c: Coeff) -> Self {
        ExactValue { exact: c.to_string(), value: c.to_f64() }
    }
}

#[derive(Debug, Serialize)]
pub struct Failure {
    pub stage: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct Certificate {
    pub n: usize,
    pub k_min: usize,
    pub dense_limit: usize,
    pub brute_limit: usize,
    pub trials: usize,
    pub seed: u64,
    pub generators: Vec<String>,
    pub beta_c: Option<ExactValue>,
    pub beta_q: Option<ExactValue>,
    pub face_dimension: Option<usize>,
    pub stages: Vec<Stage>,
    pub passed: bool,
    pub failure: Option<Failure>,
}

enum Outcome {
    Pass(Value),
    Skip(String),
}

fn mismatch(stage: &str, expected: f64, actual: f64) -> Error {
    Error::BoundMismatch { stage: stage.to_string(), expected, actual }
}

struct Pipeline {
    stages: Vec<Stage>,
    failure: Option<(Failure, Error)>,
}

impl Pipeline {
    fn run(&mut self, name: &'static str, f: impl FnOnce() -> Result<Outcome>) {
        if self.failure.is_some() {
            self.stages.push(Stage { name, status: Status::Skipped, detail: json!("earlier stage failed") });
            return;
        }
        match f() {
            Ok(Outcome::Pass(detail)) => self.stages.push(Stage { name, status: Status::Pass, detail }),
            Ok(Outcome::Skip(why)) => self.stages.push(Stage { name, status: Status::Skipped, detail: json!(why) }),
            Err(e) => {
                self.stages.push(Stage { name, status: Status::Fail, detail: json!(e.to_string()) });
                self.failure = Some((Failure { stage: name, message: e.to_string() }, e));
            }
        }
    }
}

/// Runs every stage; the returned error, if any, is the first failure.
pub fn certify(n: usize, cfg: &RunConfig) -> (Certificate, Option<Error>) {
    let mut p = Pipeline { stages: Vec::new(), failure: None };
    let mut set: Option<StabilizerSet> = None;
    let mut expr: Option<BellExpression> = None;
    let mut face_dimension = None;
    let k = k_min(n).unwrap_or(0);
    let tol = cfg.tol;

    p.run("construct", || {
        let s = max_generators(n)?;
        let words = s.words();
        set = Some(s);
        Ok(Outcome::Pass(json!({ "generators": words })))
    });
    p.run("validate", || {
        let s = set.as_ref().expect("constructed");
        let r = validate(s)?;
        if !r.is_valid() || !r.independent || s.k() != k || r.subspace_dim_log2 != Some(n - k) {
            return Err(Error::InvalidStabilizer(format!(
                "abelian={} independent={} minus_identity_free={} k={} dim_log2={:?}",
                r.abelian, r.independent, r.minus_identity_free, s.k(), r.subspace_dim_log2
            )));
        }
        Ok(Outcome::Pass(json!({ "k": s.k(), "subspace_dim_log2": n - k })))
    });
    p.run("gme", || {
        let s = set.as_ref().expect("constructed");
        let rank = is_gme_rank(s)?;
        let dim_k = pair_vectors(s)?.dim;
        let oracle = if n <= DEFAULT_ORACLE_LIMIT { Some(is_gme_oracle(s)?) } else { None };
        if !rank || oracle == Some(false) {
            return Err(Error::Precondition(format!("not GME: rank criterion {rank}, oracle {oracle:?}")));
        }
        Ok(Outcome::Pass(json!({ "dim_k": dim_k, "rank_criterion": rank, "oracle": oracle })))
    });
    p.run("synth", || {
        let e = synth_max_inequality(n)?;
        let terms = e.len();
        expr = Some(e);
        Ok(Outcome::Pass(json!({ "terms": terms })))
    });
    p.run("classical", || {
        let e = expr.as_ref().expect("synthesized");
        if n > cfg.brute_limit {
            return Ok(Outcome::Skip(format!("N={n} above brute-force limit {}", cfg.brute_limit)));
        }
        let r = classical_bound(e, cfg.brute_limit)?;
        let claimed = e.classical_bound().expect("set by synthesis");
        if r.value != claimed {
            return Err(mismatch("classical bound", claimed.to_f64(), r.value_f64));
        }
        Ok(Outcome::Pass(json!({ "value": r.value.to_string(), "witness": r.witness })))
    });
    p.run("sos", || {
        if n > cfg.dense_limit {
            return Ok(Outcome::Skip(format!("N={n} above dense limit {}", cfg.dense_limit)));
        }
        let e = expr.as_ref().expect("synthesized");
        let (s, w) = family_stabilizer(Family::Max, n)?;
        let recipe = sos_recipe(&s, &w)?;
        let shift = recipe.shift.to_f64();
        let residuals: Vec<f64> = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = rng_from_seed(cfg.seed.wrapping_add(t));
                let obs = random_observables(&mut rng, &vec![2; n]);
                verify_sos(e, &obs, shift, &recipe, cfg.dense_limit)
            })
            .collect::<Result<_>>()?;
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        if worst > tol {
            return Err(Error::Numerical { what: "sum-of-squares identity".into(), residual: worst });
        }
        Ok(Outcome::Pass(json!({ "trials": cfg.trials, "max_residual": worst, "shift": recipe.shift.to_string() })))
    });
    p.run("quantum", || {
        if n > cfg.dense_limit {
            return Ok(Outcome::Skip(format!("N={n} above dense limit {}", cfg.dense_limit)));
        }
        let e = expr.as_ref().expect("synthesized");
        let beta_q = e.quantum_bound().expect("set by synthesis").to_f64();
        let top = max_eigenvalue(e, &gess_core::bell::canonical_observables(n), cfg.dense_limit)?;
        let (lo, hi) = quantum_value_on_subspace(e, set.as_ref().expect("constructed"), cfg.dense_limit)?;
        for (what, v) in [("max eigenvalue", top), ("subspace minimum", lo), ("subspace maximum", hi)] {
            if (v - beta_q).abs() > tol {
                return Err(mismatch(what, beta_q, v));
            }
        }
        Ok(Outcome::Pass(json!({ "max_eigenvalue": top, "subspace_min": lo, "subspace_max": hi })))
    });
    p.run("faces", || {
        if n > cfg.dense_limit {
            return Ok(Outcome::Skip(format!("N={n} above dense limit {}", cfg.dense_limit)));
        }
        let r = face_analysis(n, default_g_label(n)?, cfg.dense_limit)?;
        if !r.matches() {
            return Err(mismatch("face dimension", r.expected_dimension as f64, r.dimension as f64));
        }
        face_dimension = Some(r.dimension);
        Ok(Outcome::Pass(json!({
            "dimension": r.dimension,
            "states": r.states.len(),
            "max_violation_gap": r.max_violation_gap,
            "max_overlap": r.max_overlap,
        })))
    });

    let (failure, err) = match p.failure {
        Some((f, e)) => (Some(f), Some(e)),
        None => (None, None),
    };
    let cert = Certificate {
        n,
        k_min: k,
        dense_limit: cfg.dense_limit,
        brute_limit: cfg.brute_limit,
        trials: cfg.trials,
        seed: cfg.seed,
        generators: set.as_ref().map(|s| s.words()).unwrap_or_default(),
        beta_c: expr.as_ref().and_then(|e| e.classical_bound()).map(Into::into),
        beta_q: expr.as_ref().and_then(|e| e.quantum_bound()).map(Into::into),
        face_dimension,
        passed: failure.is_none(),
        stages: p.stages,
        failure,
    };
    (cert, err)
}
