//! Seeded random instances: Pauli words, stabilizer sets, unitaries and
//! dichotomic observables.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::bell::ObservableSet;
use crate::dense::{c, CMat, CVec};
use crate::gf2::Gf2Matrix;
use crate::pauli::{Letter, PauliOp};
use crate::stabilizer::StabilizerSet;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform Hermitian Pauli word with a random sign.
pub fn random_pauli<R: Rng>(rng: &mut R, n: usize) -> PauliOp {
    let letters: Vec<Letter> =
        (0..n).map(|_| [Letter::I, Letter::X, Letter::Y, Letter::Z][rng.gen_range(0..4)]).collect();
    PauliOp::from_letters(&letters, rng.gen())
}

/// Random word over `{1, X, Z}`.
pub fn random_xz_pauli<R: Rng>(rng: &mut R, n: usize) -> PauliOp {
    let letters: Vec<Letter> = (0..n).map(|_| [Letter::I, Letter::X, Letter::Z][rng.gen_range(0..3)]).collect();
    PauliOp::from_letters(&letters, false)
}

/// `k` independent, pairwise commuting Hermitian generators on `n` qubits,
/// drawn by rejection. With independent commuting generators no sign choice
/// can produce `-1`, so the result always validates.
pub fn random_stabilizer<R: Rng>(rng: &mut R, n: usize, k: usize, allow_y: bool) -> StabilizerSet {
    assert!(k <= n, "at most n independent commuting generators");
    loop {
        let mut gens: Vec<PauliOp> = Vec::with_capacity(k);
        let mut rows = Gf2Matrix::new(2 * n);
        let mut attempts = 0;
        while gens.len() < k && attempts < 2000 {
            attempts += 1;
            let mut op = if allow_y { random_pauli(rng, n) } else { random_xz_pauli(rng, n) };
            if op.is_identity_word() {
                continue;
            }
            if !allow_y && rng.gen::<bool>() {
                op = op.negated();
            }
            if !gens.iter().all(|g| g.commutes(&op).expect("same width")) {
                continue;
            }
            let mut trial = rows.clone();
            trial.push(op.symplectic_row()).expect("width 2n");
            if trial.rank() == gens.len() + 1 {
                rows = trial;
                gens.push(op);
            }
        }
        if gens.len() == k {
            return StabilizerSet::new(n, gens).expect("Hermitian and equal width");
        }
    }
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, extra_p: f64) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for v in 1..n {
        let u = rng.gen_range(0..v);
        adj[u][v] = true;
        adj[v][u] = true;
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(extra_p) {
                adj[u][v] = true;
                adj[v][u] = true;
            }
        }
    }
    adj
}

fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) / std::f64::consts::SQRT_2
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c(1.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `U diag(±1) U†` with a random signature.
pub fn random_involution<R: Rng>(rng: &mut R, d: usize) -> CMat {
    let u = random_unitary(rng, d);
    let signs = DVector::from_fn(d, |_, _| if rng.gen::<bool>() { c(1.0) } else { c(-1.0) });
    &u * CMat::from_diagonal(&signs) * u.adjoint()
}

/// Random observables with the given local dimension per party.
pub fn random_observables<R: Rng>(rng: &mut R, dims: &[usize]) -> ObservableSet {
    let ops = dims.iter().map(|&d| [random_involution(rng, d), random_involution(rng, d)]).collect();
    ObservableSet::new(ops).expect("conjugated signatures are involutions")
}

pub fn random_state<R: Rng>(rng: &mut R, d: usize) -> CVec {
    let v = CVec::from_fn(d, |_, _| gaussian(rng));
    let norm = v.norm();
    v / c(norm)
}

/// Tensor product of random single-qubit states.
pub fn random_product_state<R: Rng>(rng: &mut R, n: usize) -> CVec {
    (0..n).fold(CVec::from_element(1, c(1.0)), |acc, _| acc.kronecker(&random_state(rng, 2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{eye, max_abs};
    use crate::stabilizer::validate;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = rng_from_seed(1);
        for d in [1, 2, 3, 6] {
            let u = random_unitary(&mut rng, d);
            assert!(max_abs(&(u.adjoint() * &u - eye(d))) < 1e-12);
        }
    }

    #[test]
    fn stabilizers_validate() {
        let mut rng = rng_from_seed(7);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let k = rng.gen_range(1..=n);
            let set = random_stabilizer(&mut rng, n, k, true);
            let r = validate(&set).unwrap();
            assert!(r.is_valid() && r.independent && set.k() == k);
        }
    }

    #[test]
    fn seeded_reproducibility() {
        let a = random_stabilizer(&mut rng_from_seed(3), 5, 3, false);
        let b = random_stabilizer(&mut rng_from_seed(3), 5, 3, false);
        assert_eq!(a, b);
    }
}
