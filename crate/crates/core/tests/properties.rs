//! Property tests against independent oracles: dense matrices, brute-force
//! subgroup enumeration and reduced-state purity.

use std::collections::HashSet;

use gess_core::bits::BitVec;
use gess_core::constructions::{blockwise_letters, closed_form_letters, k_min, max_generators};
use gess_core::dense::{self, c, CMat, CVec};
use gess_core::gf2::Gf2Matrix;
use gess_core::gme::{graph_state_generators, is_gme_oracle, is_gme_rank};
use gess_core::pauli::{Letter, PauliOp};
use gess_core::random::{random_connected_graph, random_stabilizer, rng_from_seed};
use gess_core::stabilizer::{codeword_basis, validate, StabilizerSet};
use num_complex::Complex64;
use proptest::prelude::*;

fn letter_matrix(l: Letter) -> CMat {
    match l {
        Letter::I => dense::eye(2),
        Letter::X => CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        Letter::Y => CMat::from_row_slice(2, 2, &[c(0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), c(0.0)]),
        Letter::Z => CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
    }
}

/// Textbook matrix of an operator: `i^s` times the Kronecker product of its letters.
fn oracle_dense(op: &PauliOp) -> CMat {
    let mut m = CMat::from_element(1, 1, Complex64::new(0.0, 1.0).powu(op.sign_exp() as u32));
    for l in op.letters() {
        m = m.kronecker(&letter_matrix(l));
    }
    m
}

fn op_from(codes: &[u8], sign: u8) -> PauliOp {
    let word: String = codes.iter().map(|&k| ['1', 'X', 'Y', 'Z'][k as usize]).collect();
    let prefix = ["+", "+i", "-", "-i"][sign as usize];
    format!("{prefix}{word}").parse().unwrap()
}

fn pauli_pair(max_n: usize) -> impl Strategy<Value = (PauliOp, PauliOp)> {
    (1..=max_n).prop_flat_map(|n| {
        (prop::collection::vec(0u8..4, n), 0u8..4, prop::collection::vec(0u8..4, n), 0u8..4)
            .prop_map(|(a, sa, b, sb)| (op_from(&a, sa), op_from(&b, sb)))
    })
}

/// Rank as log2 of the size of the span, by closure under addition.
fn span_rank(rows: &[BitVec]) -> usize {
    let mut span: HashSet<BitVec> = HashSet::new();
    span.insert(BitVec::zeros(rows.first().map_or(0, |r| r.len())));
    for r in rows {
        let next: Vec<BitVec> = span.iter().map(|s| s.xor(r)).collect();
        span.extend(next);
    }
    span.len().trailing_zeros() as usize
}

/// Dimension of the joint +1 eigenspace: trace of the product of `(1 + g)/2`.
fn dense_fixed_dim(set: &StabilizerSet) -> f64 {
    let d = 1usize << set.n();
    let mut p = dense::eye(d);
    for g in set.generators() {
        p = &p * (dense::eye(d) + oracle_dense(g)) * c(0.5);
    }
    p.trace().re
}

/// Purity of the reduced state on the qubits in `mask` (qubit 0 is the most significant index bit).
fn reduced_purity(psi: &CVec, n: usize, mask: u32) -> f64 {
    let keep: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
    let rest: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 0).collect();
    let index = |a: usize, b: usize| {
        let mut idx = 0usize;
        for (t, &q) in keep.iter().enumerate() {
            idx |= (a >> t & 1) << (n - 1 - q);
        }
        for (t, &q) in rest.iter().enumerate() {
            idx |= (b >> t & 1) << (n - 1 - q);
        }
        idx
    };
    let m = CMat::from_fn(1 << keep.len(), 1 << rest.len(), |a, b| psi[index(a, b)]);
    let rho = &m * m.adjoint();
    (&rho * &rho).trace().re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn product_matches_dense((a, b) in pauli_pair(4)) {
        let prod = a.multiply(&b).unwrap();
        let want = oracle_dense(&a) * oracle_dense(&b);
        prop_assert!(dense::max_abs(&(oracle_dense(&prod) - want)) < 1e-12);
        prop_assert!(dense::max_abs(&(dense::pauli_to_dense(&prod) - oracle_dense(&prod))) < 1e-12);
    }

    #[test]
    fn commutation_matches_dense((a, b) in pauli_pair(4)) {
        let (ma, mb) = (oracle_dense(&a), oracle_dense(&b));
        let commutator = dense::max_abs(&(&ma * &mb - &mb * &ma));
        prop_assert_eq!(a.commutes(&b).unwrap(), commutator < 1e-12);
    }

    #[test]
    fn text_round_trip((a, _) in pauli_pair(6)) {
        prop_assume!(a.is_hermitian());
        let text = gess_core::pauli::format_text(std::slice::from_ref(&a));
        let back = gess_core::pauli::parse_text(&text).unwrap();
        prop_assert_eq!(back, vec![a]);
    }

    #[test]
    fn gf2_rank_matches_span(rows in prop::collection::vec(any::<u16>(), 0..9)) {
        let bits: Vec<BitVec> = rows.iter().map(|&r| BitVec::from_u64(12, r as u64 & 0xfff)).collect();
        let m = Gf2Matrix::from_rows(12, bits.clone()).unwrap();
        prop_assert_eq!(m.rank(), span_rank(&bits));
        for k in m.kernel().rows() {
            prop_assert!(m.mul_vec(k).is_zero());
        }
    }

    #[test]
    fn validation_matches_dense_trace(
        n in 1usize..=4,
        seed in any::<u64>(),
        count in 1usize..=5,
    ) {
        // Random Hermitian words, commuting or not, with random signs.
        let mut rng = rng_from_seed(seed);
        let gens: Vec<PauliOp> = (0..count)
            .map(|_| {
                let codes: Vec<u8> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, 0u8..4)).collect();
                op_from(&codes, if rand::Rng::gen::<bool>(&mut rng) { 2 } else { 0 })
            })
            .collect();
        let set = StabilizerSet::new(n, gens).unwrap();
        let r = validate(&set).unwrap();
        let abelian = set.generators().iter().enumerate().all(|(i, a)| {
            set.generators()[i + 1..].iter().all(|b| {
                let (ma, mb) = (oracle_dense(a), oracle_dense(b));
                dense::max_abs(&(&ma * &mb - &mb * &ma)) < 1e-12
            })
        });
        prop_assert_eq!(r.abelian, abelian);
        if abelian {
            let dim = dense_fixed_dim(&set);
            prop_assert!((dim - r.subspace_dim().unwrap() as f64).abs() < 1e-9, "{dim} vs {:?}", r);
        } else {
            prop_assert!(!r.is_valid());
        }
    }
}

#[test]
fn blockwise_matches_closed_form() {
    for n in 2..=300 {
        let a = blockwise_letters(n).unwrap().unwrap();
        let b = closed_form_letters(n).unwrap().unwrap();
        assert_eq!(a, b, "N={n}");
    }
}

#[test]
fn k_min_is_smallest_fitting_count() {
    for n in 2..=2000usize {
        let brute = (1..).find(|&k: &usize| k * (k - 1) / 2 >= n - 1).unwrap();
        assert_eq!(k_min(n).unwrap(), brute, "N={n}");
    }
}

#[test]
fn gme_sets_need_at_least_k_min_generators() {
    let mut rng = rng_from_seed(77);
    let mut gme_seen = 0;
    for trial in 0..600 {
        let n = 3 + trial % 6;
        let k = 1 + trial % n;
        let set = random_stabilizer(&mut rng, n, k, trial % 2 == 0);
        let gme = is_gme_rank(&set).unwrap();
        assert_eq!(gme, is_gme_oracle(&set).unwrap());
        if gme {
            gme_seen += 1;
            assert!(k >= k_min(n).unwrap(), "N={n} k={k}");
            let dim_log2 = validate(&set).unwrap().subspace_dim_log2.unwrap();
            assert!(dim_log2 <= n - k_min(n).unwrap());
        }
    }
    assert!(gme_seen > 50);
}

#[test]
fn stabilizer_states_gme_iff_no_pure_marginal() {
    // For k = N the subspace is one state; it is GME exactly when no
    // bipartition has a pure reduced state.
    let mut rng = rng_from_seed(5);
    let mut seen = [0usize; 2];
    for trial in 0..250 {
        let n = 2 + trial % 4;
        let set = if trial % 3 == 0 {
            graph_state_generators(&random_connected_graph(&mut rng, n, 0.3)).unwrap()
        } else {
            random_stabilizer(&mut rng, n, n, true)
        };
        let psi = &codeword_basis(&set, 8).unwrap()[0];
        let entangled_everywhere = (1u32..(1 << n) - 1).all(|mask| reduced_purity(psi, n, mask) < 1.0 - 1e-9);
        let gme = is_gme_rank(&set).unwrap();
        assert_eq!(gme, entangled_everywhere, "{:?}", set.words());
        seen[gme as usize] += 1;
    }
    assert!(seen[0] > 10 && seen[1] > 10, "{seen:?}");
}

#[test]
fn maximal_family_fixed_space_matches_dense_trace() {
    for n in 2..=8 {
        let set = max_generators(n).unwrap();
        let want = (1u64 << (n - k_min(n).unwrap())) as f64;
        assert!((dense_fixed_dim(&set) - want).abs() < 1e-9, "N={n}");
    }
}
