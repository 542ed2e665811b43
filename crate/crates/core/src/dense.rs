//! Small dense complex linear algebra for qubit-sized checks.
//!
//! Qubit 0 is the most significant tensor factor, so a basis index `b` has
//! qubit `k` in state `(b >> (n - 1 - k)) & 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::pauli::PauliOp;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn eye(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a, I: IntoIterator<Item = &'a CMat>>(factors: I) -> CMat {
    let mut it = factors.into_iter();
    let first = it.next().cloned().unwrap_or_else(|| eye(1));
    it.fold(first, |acc, f| acc.kronecker(f))
}

/// Phase `i^p` as a complex number.
pub fn i_pow(p: u8) -> Complex64 {
    match p % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

/// Image of a computational basis state under a Pauli word: `P|b> = coeff |b'>`.
#[inline]
fn pauli_action(x_mask: usize, z_mask: usize, phase: u8, b: usize) -> (usize, Complex64) {
    // i^p X^x Z^z |b> = i^p (-1)^{z·b} |b ⊕ x>
    let sign = (z_mask & b).count_ones() % 2;
    (b ^ x_mask, i_pow(phase + 2 * sign as u8))
}

fn masks(op: &PauliOp) -> (usize, usize) {
    let n = op.n();
    let to_mask = |bits: &crate::bits::BitVec| {
        bits.iter_ones().fold(0usize, |m, k| m | (1 << (n - 1 - k)))
    };
    (to_mask(op.x_bits()), to_mask(op.z_bits()))
}

/// Dense `2^n x 2^n` matrix of a Pauli word.
pub fn pauli_to_dense(op: &PauliOp) -> CMat {
    let dim = 1usize << op.n();
    let (xm, zm) = masks(op);
    let mut m = CMat::zeros(dim, dim);
    for b in 0..dim {
        let (row, coeff) = pauli_action(xm, zm, op.phase_exp(), b);
        m[(row, b)] = coeff;
    }
    m
}

/// `P v` without forming the matrix.
pub fn apply_pauli(op: &PauliOp, v: &CVec) -> CVec {
    let (xm, zm) = masks(op);
    let mut out = CVec::zeros(v.len());
    for (b, amp) in v.iter().enumerate() {
        let (row, coeff) = pauli_action(xm, zm, op.phase_exp(), b);
        out[row] += coeff * amp;
    }
    out
}

/// `P M` column by column.
pub fn apply_pauli_mat(op: &PauliOp, m: &CMat) -> CMat {
    let (xm, zm) = masks(op);
    let mut out = CMat::zeros(m.nrows(), m.ncols());
    for b in 0..m.nrows() {
        let (row, coeff) = pauli_action(xm, zm, op.phase_exp(), b);
        for col in 0..m.ncols() {
            out[(row, col)] += coeff * m[(b, col)];
        }
    }
    out
}

pub fn is_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn to_faer_real(m: &CMat) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

fn to_faer(m: &CMat) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
/// Real symmetric inputs take the cheaper real path.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if is_real(m) {
        let evd = to_faer_real(m).self_adjoint_eigen(faer::Side::Lower).expect("symmetric eigensolver diverged");
        let vals = evd.S().column_vector().iter().copied().collect();
        let u = evd.U();
        (vals, CMat::from_fn(n, n, |i, j| c(u[(i, j)])))
    } else {
        let evd = to_faer(m).self_adjoint_eigen(faer::Side::Lower).expect("Hermitian eigensolver diverged");
        let vals = evd.S().column_vector().iter().map(|z| z.re).collect();
        let u = evd.U();
        (vals, CMat::from_fn(n, n, |i, j| u[(i, j)]))
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut vals = if is_real(m) {
        to_faer_real(m).self_adjoint_eigenvalues(faer::Side::Lower).expect("symmetric eigensolver diverged")
    } else {
        to_faer(m).self_adjoint_eigenvalues(faer::Side::Lower).expect("Hermitian eigensolver diverged")
    };
    vals.sort_by(f64::total_cmp);
    vals
}

/// Singular values of a real matrix, descending.
pub fn singular_values(m: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let f = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let mut sv = f.singular_values().expect("SVD diverged");
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(m: &CMat) -> f64 {
    let vals = hermitian_eigenvalues(m);
    vals.first().map_or(0.0, |lo| lo.abs()).max(vals.last().map_or(0.0, |hi| hi.abs()))
}

/// `<v|M|v>` real part.
pub fn expectation(m: &CMat, v: &CVec) -> f64 {
    v.dotc(&(m * v)).re
}

/// Multiplies `v` by a phase so that its largest-modulus entry (first one on
/// ties) is real and positive.
pub fn fix_phase(v: &mut CVec) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > best_norm + 1e-12 {
            best = i;
            best_norm = z.norm();
        }
    }
    if best_norm > 0.0 {
        let phase = v[best].conj() / best_norm;
        *v *= phase;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_pauli_matches_kron() {
        let op: PauliOp = "-XZY".parse().unwrap();
        let expect = kron_all([&pauli_x(), &pauli_z(), &pauli_y()]) * c(-1.0);
        assert!(max_abs(&(pauli_to_dense(&op) - expect)) < 1e-15);
    }

    #[test]
    fn apply_matches_dense() {
        let op: PauliOp = "+YX1Z".parse().unwrap();
        let v = CVec::from_fn(16, |i, _| Complex64::new(i as f64, 1.0 - i as f64));
        let d = pauli_to_dense(&op) * &v;
        assert!((apply_pauli(&op, &v) - d).norm() < 1e-12);
    }

    #[test]
    fn eigen_sorted_and_orthonormal() {
        let m = pauli_to_dense(&"XX".parse().unwrap()) + pauli_to_dense(&"ZZ".parse().unwrap());
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] + 2.0).abs() < 1e-12 && (vals[3] - 2.0).abs() < 1e-12);
        assert!(max_abs(&(vecs.adjoint() * &vecs - eye(4))) < 1e-12);
        let y = pauli_y();
        assert_eq!(hermitian_eigenvalues(&y).len(), 2);
        assert!((hermitian_norm(&y) - 1.0).abs() < 1e-12);
    }
}
