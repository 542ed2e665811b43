//! Genuine multipartite entanglement of stabilizer subspaces.
//!
//! Two deciders are provided. The rank criterion computes the span `K(S)` of
//! the pair vectors `v_ij` (positions where generators `i` and `j` anticommute
//! locally) and asks whether it is the whole even-weight space, i.e. has
//! dimension `N - 1`. The oracle walks every nontrivial bipartition and looks
//! for a pair vector with odd overlap. The two must always agree.

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::pauli::{Letter, PauliOp};
use crate::stabilizer::{validate, StabilizerSet};

pub const DEFAULT_ORACLE_LIMIT: usize = 24;

/// A bipartition `Q | Q̄` as the indicator vector of `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartitionVec {
    phi: BitVec,
}

impl BipartitionVec {
    pub fn new(phi: BitVec) -> Self {
        BipartitionVec { phi }
    }

    pub fn phi(&self) -> &BitVec {
        &self.phi
    }

    pub fn is_nontrivial(&self) -> bool {
        !self.phi.is_zero() && self.phi.count_ones() != self.phi.len()
    }

    /// Representative with qubit 0 on the `Q̄` side.
    pub fn canonical(&self) -> Self {
        if !self.phi.is_empty() && self.phi.get(0) {
            BipartitionVec { phi: self.phi.xor(&BitVec::ones(self.phi.len())) }
        } else {
            self.clone()
        }
    }
}

/// The pair vectors of a generator set and the dimension of their span.
#[derive(Clone, Debug)]
pub struct KSubspace {
    pub vectors: Gf2Matrix,
    pub dim: usize,
}

/// `v_ij` for all `i < j` in lexicographic order.
pub fn pair_vectors(set: &StabilizerSet) -> Result<KSubspace> {
    let gens = set.generators();
    let mut rows = Gf2Matrix::new(set.n());
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let v = gens[i].local_anticommute_mask(&gens[j])?;
            if v.count_ones() % 2 == 1 {
                return Err(Error::NonCommuting(i, j));
            }
            rows.push(v)?;
        }
    }
    let dim = rows.rank();
    Ok(KSubspace { vectors: rows, dim })
}

/// Parity of `|phi ∧ v|`; 1 means the bipartition is odd on `v`.
pub fn h_form(phi: &BipartitionVec, v: &BitVec) -> Result<bool> {
    if phi.phi.len() != v.len() {
        return Err(Error::WidthMismatch { expected: phi.phi.len(), found: v.len() });
    }
    Ok(phi.phi.dot(v))
}

fn require_stabilizer(set: &StabilizerSet) -> Result<()> {
    let report = validate(set)?;
    if !report.is_valid() {
        return Err(Error::InvalidStabilizer(format!(
            "abelian={}, minus_identity_free={}",
            report.abelian, report.minus_identity_free
        )));
    }
    Ok(())
}

/// GME iff `dim K(S) = N - 1`.
pub fn is_gme_rank(set: &StabilizerSet) -> Result<bool> {
    require_stabilizer(set)?;
    Ok(pair_vectors(set)?.dim == set.n() - 1)
}

/// Exhaustive check that every nontrivial bipartition is odd on some `v_ij`.
pub fn is_gme_oracle(set: &StabilizerSet) -> Result<bool> {
    is_gme_oracle_with_limit(set, DEFAULT_ORACLE_LIMIT)
}

pub fn is_gme_oracle_with_limit(set: &StabilizerSet, limit: usize) -> Result<bool> {
    let n = set.n();
    if n > limit || n > 63 {
        return Err(Error::Limit { what: "qubit count for bipartition oracle", size: n, limit: limit.min(63) });
    }
    require_stabilizer(set)?;
    let k = pair_vectors(set)?;
    let rows: Vec<u64> = k.vectors.rows().iter().map(BitVec::as_u64).filter(|&r| r != 0).collect();
    if n < 2 {
        return Ok(true);
    }
    // Canonical representatives keep bit 0 clear: phi = m << 1 for m in 1..2^(n-1).
    let count = 1u64 << (n - 1);
    let all_odd = (1..count).into_par_iter().all(|m| {
        let phi = m << 1;
        rows.iter().any(|&v| (phi & v).count_ones() % 2 == 1)
    });
    Ok(all_odd)
}

/// Summary printed by `check-gme`.
#[derive(Clone, Debug, Serialize)]
pub struct GmeSummary {
    pub n: usize,
    pub k: usize,
    pub dim_k: usize,
    pub rank_criterion: bool,
    pub oracle: Option<bool>,
}

pub fn summarize(set: &StabilizerSet, oracle_limit: usize) -> Result<GmeSummary> {
    let rank_criterion = is_gme_rank(set)?;
    let dim_k = pair_vectors(set)?.dim;
    let oracle = if set.n() <= oracle_limit { Some(is_gme_oracle_with_limit(set, oracle_limit)?) } else { None };
    Ok(GmeSummary { n: set.n(), k: set.k(), dim_k, rank_criterion, oracle })
}

/// Graph-state generators `X_i ∏_{j ∈ N(i)} Z_j`.
pub fn graph_state_generators(adjacency: &[Vec<bool>]) -> Result<StabilizerSet> {
    let n = adjacency.len();
    for (i, row) in adjacency.iter().enumerate() {
        if row.len() != n {
            return Err(Error::WidthMismatch { expected: n, found: row.len() });
        }
        if row[i] {
            return Err(Error::Precondition(format!("self-loop at vertex {i}")));
        }
        for (j, &edge) in row.iter().enumerate() {
            if edge != adjacency[j][i] {
                return Err(Error::Precondition(format!("adjacency not symmetric at ({i}, {j})")));
            }
        }
    }
    let gens = (0..n)
        .map(|i| {
            let letters: Vec<Letter> = (0..n)
                .map(|j| {
                    if j == i {
                        Letter::X
                    } else if adjacency[i][j] {
                        Letter::Z
                    } else {
                        Letter::I
                    }
                })
                .collect();
            PauliOp::from_letters(&letters, false)
        })
        .collect();
    StabilizerSet::new(n, gens)
}

/// Adjacency matrix from an edge list on `n` vertices.
pub fn adjacency_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_qubit() -> StabilizerSet {
        StabilizerSet::from_words(&["XZZX1", "1XZZX", "X1XZZ", "ZX1XZ"]).unwrap()
    }

    #[test]
    fn five_qubit_pair_vectors_verbatim() {
        let k = pair_vectors(&five_qubit()).unwrap();
        let rows: Vec<String> = k.vectors.rows().iter().map(|r| r.to_string()).collect();
        // (1,2) (1,3) (1,4) (2,3) (2,4) (3,4)
        assert_eq!(rows, ["01010", "00110", "11000", "00101", "00011", "10010"]);
        assert_eq!(k.dim, 4);
    }

    #[test]
    fn xx_zz_on_three_qubits() {
        let set = StabilizerSet::from_words(&["XX1", "ZZ1"]).unwrap();
        let k = pair_vectors(&set).unwrap();
        assert_eq!(k.vectors.n_rows(), 1);
        assert_eq!(k.vectors.rows()[0].to_string(), "110");
        assert!(!is_gme_rank(&set).unwrap());
        assert!(!is_gme_oracle(&set).unwrap());
    }

    #[test]
    fn single_generator_has_empty_k() {
        let k = pair_vectors(&StabilizerSet::from_words(&["XZX"]).unwrap()).unwrap();
        assert_eq!((k.vectors.n_rows(), k.dim), (0, 0));
    }

    #[test]
    fn h_form_examples() {
        let phi = |s: &str| BipartitionVec::new(s.parse().unwrap());
        let v = |s: &str| s.parse::<BitVec>().unwrap();
        assert!(h_form(&phi("100"), &v("110")).unwrap());
        assert!(!h_form(&phi("110"), &v("110")).unwrap());
        // phi = e_{i1}, v = e_{i0} + e_{i1}
        assert!(h_form(&phi("00010"), &v("01010")).unwrap());
        assert!(h_form(&phi("01"), &v("011")).is_err());
    }

    #[test]
    fn canonical_bipartition() {
        let b = BipartitionVec::new("1101".parse().unwrap());
        assert_eq!(b.canonical().phi().to_string(), "0010");
        assert!(b.is_nontrivial());
        assert!(!BipartitionVec::new("111".parse().unwrap()).is_nontrivial());
    }

    #[test]
    fn chsh_stabilizer_is_gme() {
        let set = StabilizerSet::from_words(&["XX", "ZZ"]).unwrap();
        assert!(is_gme_rank(&set).unwrap());
        assert!(is_gme_oracle(&set).unwrap());
    }

    #[test]
    fn five_qubit_code_is_gme() {
        assert!(is_gme_rank(&five_qubit()).unwrap());
        assert!(is_gme_oracle(&five_qubit()).unwrap());
    }

    #[test]
    fn graph_generators() {
        let path = graph_state_generators(&adjacency_from_edges(3, &[(0, 1), (1, 2)])).unwrap();
        assert_eq!(path.words(), ["+XZ1", "+ZXZ", "+1ZX"]);
        let k3 = graph_state_generators(&adjacency_from_edges(3, &[(0, 1), (1, 2), (0, 2)])).unwrap();
        assert!(is_gme_rank(&k3).unwrap());
        let split = graph_state_generators(&adjacency_from_edges(4, &[(0, 1), (2, 3)])).unwrap();
        assert!(!is_gme_rank(&split).unwrap());
        assert!(!is_gme_oracle(&split).unwrap());
    }

    #[test]
    fn graph_input_checks() {
        let mut adj = adjacency_from_edges(3, &[(0, 1)]);
        adj[1][0] = false;
        assert!(graph_state_generators(&adj).is_err());
        let mut adj = adjacency_from_edges(2, &[]);
        adj[1][1] = true;
        assert!(graph_state_generators(&adj).is_err());
    }

    #[test]
    fn invalid_sets_rejected() {
        let bad = StabilizerSet::from_words(&["XX", "-XX"]).unwrap();
        assert!(matches!(is_gme_rank(&bad), Err(Error::InvalidStabilizer(_))));
        let wide = StabilizerSet::new(30, vec![PauliOp::identity(30)]).unwrap();
        assert!(matches!(is_gme_oracle(&wide), Err(Error::Limit { .. })));
    }
}
