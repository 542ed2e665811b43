//! Generator sets, their validation, and the stabilized subspace at small N.

use serde::{Deserialize, Serialize};

use crate::dense::{self, CMat, CVec};
use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::pauli::{PauliList, PauliOp};

pub const DEFAULT_DENSE_LIMIT: usize = 12;
pub const DEFAULT_KERNEL_CAP: u64 = 1 << 20;

/// An ordered list of Hermitian, sign `±1` generators on `n` qubits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StabilizerSet {
    n: usize,
    generators: Vec<PauliOp>,
}

impl StabilizerSet {
    pub fn new(n: usize, generators: Vec<PauliOp>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.n() != n {
                return Err(Error::WidthMismatch { expected: n, found: g.n() });
            }
            if !g.is_hermitian() {
                return Err(Error::NotHermitian(i));
            }
        }
        Ok(StabilizerSet { n, generators })
    }

    /// Parses signed words; all must share a width.
    pub fn from_words(words: &[&str]) -> Result<Self> {
        let ops = words.iter().map(|w| w.parse()).collect::<Result<Vec<PauliOp>>>()?;
        let n = ops.first().map(PauliOp::n).ok_or(Error::EmptyWord)?;
        Self::new(n, ops)
    }

    pub fn from_ops(ops: Vec<PauliOp>) -> Result<Self> {
        let n = ops
            .first()
            .map(PauliOp::n)
            .ok_or_else(|| Error::Precondition("empty generator list".into()))?;
        Self::new(n, ops)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliOp] {
        &self.generators
    }

    pub fn words(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.to_string()).collect()
    }

    /// This set followed by `extra`.
    pub fn extended(&self, extra: impl IntoIterator<Item = PauliOp>) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.extend(extra);
        Self::new(self.n, gens)
    }

    /// Stacked `(x | z)` rows, one per generator.
    pub fn symplectic_matrix(&self) -> Gf2Matrix {
        Gf2Matrix::from_rows(2 * self.n, self.generators.iter().map(|g| g.symplectic_row()).collect())
            .expect("rows share width 2n")
    }

    pub fn to_list(&self) -> PauliList {
        PauliList { n: self.n, paulis: self.generators.clone() }
    }
}

impl Serialize for StabilizerSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_list().serialize(s)
    }
}

impl<'de> Deserialize<'de> for StabilizerSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let list = PauliList::deserialize(d)?;
        StabilizerSet::new(list.n, list.paulis).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    pub k: usize,
    pub abelian: bool,
    pub independent: bool,
    pub minus_identity_free: bool,
    /// GF(2) rank of the symplectic rows.
    pub rank: usize,
    /// `N - rank` when the set stabilizes something, `None` for the zero space.
    pub subspace_dim_log2: Option<usize>,
    /// First non-commuting pair, if any.
    pub non_commuting: Option<(usize, usize)>,
}

impl ValidationReport {
    /// `2^(N-rank)`, or 0 for an invalid set; `None` if it overflows `u128`.
    pub fn subspace_dim(&self) -> Option<u128> {
        match self.subspace_dim_log2 {
            None => Some(0),
            Some(e) if e < 128 => Some(1u128 << e),
            Some(_) => None,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.subspace_dim_log2.is_some()
    }
}

/// Checks commutation, independence and absence of `-1` in the generated group.
///
/// Relations among generators are found in the left kernel of the symplectic
/// matrix; every nonzero kernel element is a subset whose product is `±1`
/// up to phase, and its ordered product decides whether that phase is `-1`.
pub fn validate_with_cap(set: &StabilizerSet, kernel_cap: u64) -> Result<ValidationReport> {
    if set.k() == 0 {
        return Err(Error::Precondition("empty generator list".into()));
    }
    let gens = set.generators();
    let mut non_commuting = None;
    'outer: for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if !gens[i].commutes(&gens[j])? {
                non_commuting = Some((i, j));
                break 'outer;
            }
        }
    }
    let abelian = non_commuting.is_none();

    let sym = set.symplectic_matrix();
    let rank = sym.rank();
    let independent = rank == set.k();

    let relations = sym.left_kernel();
    let kdim = relations.n_rows();
    if kdim >= 64 || (1u64 << kdim) > kernel_cap {
        return Err(Error::KernelCap { dim: kdim, cap: kernel_cap });
    }
    let mut phase_trouble = false;
    if kdim > 0 {
        // Gray-code walk over all nonzero combinations of the relation basis.
        let mut combo = crate::bits::BitVec::zeros(set.k());
        for step in 1u64..(1u64 << kdim) {
            let flip = step.trailing_zeros() as usize;
            combo.xor_assign(&relations.rows()[flip]);
            let product = ordered_product(gens, &combo)?;
            debug_assert!(product.is_identity_word());
            if product.phase_exp() != 0 {
                phase_trouble = true;
                break;
            }
        }
    }
    // A non-abelian group always contains -1 (G_i G_j G_i G_j = -1).
    let minus_identity_free = abelian && !phase_trouble;
    debug_assert!(!independent || !phase_trouble);

    Ok(ValidationReport {
        n: set.n(),
        k: set.k(),
        abelian,
        independent,
        minus_identity_free,
        rank,
        subspace_dim_log2: minus_identity_free.then(|| set.n() - rank),
        non_commuting,
    })
}

pub fn validate(set: &StabilizerSet) -> Result<ValidationReport> {
    validate_with_cap(set, DEFAULT_KERNEL_CAP)
}

/// Product of the selected generators in list order.
pub fn ordered_product(gens: &[PauliOp], select: &crate::bits::BitVec) -> Result<PauliOp> {
    let n = gens.first().map_or(0, PauliOp::n);
    select.iter_ones().try_fold(PauliOp::identity(n), |acc, i| acc.multiply(&gens[i]))
}

fn require_valid(set: &StabilizerSet, dense_limit: usize) -> Result<ValidationReport> {
    if set.n() > dense_limit {
        return Err(Error::Limit { what: "qubit count for dense projector", size: set.n(), limit: dense_limit });
    }
    let report = validate(set)?;
    if !report.is_valid() {
        return Err(Error::InvalidStabilizer(format!(
            "abelian={}, minus_identity_free={}",
            report.abelian, report.minus_identity_free
        )));
    }
    Ok(report)
}

/// `∏_i (1 + G_i) / 2` as a dense matrix.
pub fn projector(set: &StabilizerSet, dense_limit: usize) -> Result<CMat> {
    require_valid(set, dense_limit)?;
    let dim = 1usize << set.n();
    let mut p = dense::eye(dim);
    for g in set.generators() {
        let gp = dense::apply_pauli_mat(g, &p);
        p = (p + gp) * dense::c(0.5);
    }
    Ok(p)
}

/// Orthonormal basis of the stabilized subspace.
///
/// `P|b>` and `P|b'>` are parallel when `b ⊕ b'` lies in the span of the
/// generators' X parts and have disjoint support otherwise, so one nonzero
/// `P|b>` per coset of that span gives an orthogonal basis. Cosets are visited
/// in increasing order of their smallest `b`; each vector is phase-fixed so
/// its largest entry is real and positive.
pub fn codeword_basis(set: &StabilizerSet, dense_limit: usize) -> Result<Vec<CVec>> {
    let report = require_valid(set, dense_limit)?;
    let n = set.n();
    let dim = 1usize << n;
    let mask_of = |bits: &crate::bits::BitVec| bits.iter_ones().fold(0usize, |m, k| m | (1 << (n - 1 - k)));
    let mut x_basis: Vec<usize> = Vec::new();
    for g in set.generators() {
        let mut x = mask_of(g.x_bits());
        for &b in &x_basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            x_basis.push(x);
            x_basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    let mut covered = vec![false; dim];
    let mut basis = Vec::new();
    for b in 0..dim {
        if covered[b] {
            continue;
        }
        let mut cur = b;
        covered[cur] = true;
        for step in 1usize..(1 << x_basis.len()) {
            cur ^= x_basis[step.trailing_zeros() as usize];
            covered[cur] = true;
        }
        let mut v = CVec::zeros(dim);
        v[b] = dense::ONE;
        for g in set.generators() {
            v = (&v + dense::apply_pauli(g, &v)) * dense::c(0.5);
        }
        let norm = v.norm();
        if norm > 1e-9 {
            v /= dense::c(norm);
            dense::fix_phase(&mut v);
            basis.push(v);
        }
    }
    let expected = 1usize << report.subspace_dim_log2.unwrap_or(0);
    if basis.len() != expected {
        return Err(Error::Numerical {
            what: format!("found {} codewords, expected {expected}", basis.len()),
            residual: (basis.len() as f64 - expected as f64).abs(),
        });
    }
    Ok(basis)
}

/// Columns of the basis stacked into a `2^N x dim` matrix.
pub fn basis_matrix(basis: &[CVec]) -> CMat {
    let rows = basis.first().map_or(0, |v| v.len());
    CMat::from_fn(rows, basis.len(), |r, col| basis[col][r])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::c;

    fn five_qubit() -> StabilizerSet {
        StabilizerSet::from_words(&["XZZX1", "1XZZX", "X1XZZ", "ZX1XZ"]).unwrap()
    }

    #[test]
    fn five_qubit_code_report() {
        let r = validate(&five_qubit()).unwrap();
        assert!(r.abelian && r.independent && r.minus_identity_free);
        assert_eq!(r.subspace_dim(), Some(2));
    }

    #[test]
    fn xx_and_minus_xx_stabilize_nothing() {
        let r = validate(&StabilizerSet::from_words(&["+XX", "-XX"]).unwrap()).unwrap();
        assert!(r.abelian);
        assert!(!r.independent);
        assert!(!r.minus_identity_free);
        assert_eq!(r.subspace_dim(), Some(0));
    }

    #[test]
    fn single_z_stabilizes_zero_state() {
        let set = StabilizerSet::from_words(&["+Z"]).unwrap();
        assert_eq!(validate(&set).unwrap().subspace_dim(), Some(1));
        let basis = codeword_basis(&set, 12).unwrap();
        assert!((basis[0][0] - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn dependent_but_consistent() {
        let set = StabilizerSet::from_words(&["XX", "ZZ", "-YY"]).unwrap();
        let r = validate(&set).unwrap();
        assert!(!r.independent && r.minus_identity_free);
        assert_eq!(r.subspace_dim(), Some(1));
        let set = StabilizerSet::from_words(&["XX", "ZZ", "YY"]).unwrap();
        assert!(!validate(&set).unwrap().minus_identity_free);
    }

    #[test]
    fn non_abelian_reported() {
        let r = validate(&StabilizerSet::from_words(&["X1", "Z1"]).unwrap()).unwrap();
        assert_eq!(r.non_commuting, Some((0, 1)));
        assert!(!r.minus_identity_free);
    }

    #[test]
    fn kernel_cap_enforced() {
        let words = vec!["+Z"; 6];
        let set = StabilizerSet::from_words(&words).unwrap();
        assert!(matches!(validate_with_cap(&set, 16), Err(Error::KernelCap { dim: 5, .. })));
        assert!(validate_with_cap(&set, 32).unwrap().is_valid());
    }

    #[test]
    fn width_and_hermiticity_checked() {
        assert!(StabilizerSet::from_words(&["XX", "Z"]).is_err());
        assert!(matches!(StabilizerSet::from_words(&["+iXZ"]), Err(Error::NotHermitian(0))));
    }

    #[test]
    fn projector_properties() {
        let set = five_qubit();
        let p = projector(&set, 12).unwrap();
        assert!(dense::max_abs(&(&p * &p - &p)) < 1e-12);
        assert!((p.trace().re - 2.0).abs() < 1e-9);
        for g in set.generators() {
            assert!(dense::max_abs(&(dense::apply_pauli_mat(g, &p) - &p)) < 1e-9);
        }
        let basis = codeword_basis(&set, 12).unwrap();
        assert_eq!(basis.len(), 2);
        assert!((basis[0].dotc(&basis[1])).norm() < 1e-10);
    }

    #[test]
    fn dense_limit_enforced() {
        let set = StabilizerSet::from_words(&["ZZZZ"]).unwrap();
        assert!(matches!(projector(&set, 3), Err(Error::Limit { .. })));
        let bad = StabilizerSet::from_words(&["XX", "-XX"]).unwrap();
        assert!(matches!(projector(&bad, 12), Err(Error::InvalidStabilizer(_))));
    }
}
