//! Explicit generator families.
//!
//! * GHZ: `X^{⊗N}` plus nearest-neighbour `ZZ`.
//! * Construction 2 for even `N`, open and cyclic, stabilizing `2^{N/2-1}` dimensions.
//! * The maximal family `G_1..G_k`, `k = k_min(N)`, stabilizing a GME subspace
//!   of dimension `2^{N-k}`. It is assembled twice, once from the compact
//!   tensor-power formula and once block by block, and the two must agree.
//! * The extra operators `H_{i,j}` that complete the maximal family to a
//!   one-dimensional stabilizer.
//!
//! Qubits and generators are numbered from 1 inside this module to keep the
//! index arithmetic readable; `PauliOp` positions are zero-based.

use std::collections::HashMap;
use std::ops::RangeInclusive;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliOp};
use crate::stabilizer::StabilizerSet;

/// Smallest `k` with `N - 1 <= k(k-1)/2`, i.e. `⌈(1 + √(8N-7)) / 2⌉`.
pub fn k_min(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::Precondition(format!("k_min needs N >= 2, got {n}")));
    }
    let by_inequality = (1..).find(|&k| n - 1 <= k * (k - 1) / 2).expect("unbounded search");
    let by_formula = ((1.0 + ((8 * n - 7) as f64).sqrt()) / 2.0).ceil() as usize;
    debug_assert_eq!(by_inequality, by_formula, "k_min closed form drifted at N={n}");
    Ok(by_inequality)
}

/// `X` for odd `i`, `Z` for even `i`.
pub fn p_letter(i: usize) -> Letter {
    if i % 2 == 1 {
        Letter::X
    } else {
        Letter::Z
    }
}

/// The blocks `C_1..C_k` of consecutive qubits (one-based, inclusive).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    n: usize,
    blocks: Vec<RangeInclusive<usize>>,
}

impl BlockPartition {
    pub fn new(n: usize) -> Result<Self> {
        let k = k_min(n)?;
        let mut blocks = Vec::with_capacity(k);
        for i in 1..=k {
            let range = if i == k {
                2 + (k - 1) * (k - 2) / 2..=n
            } else if i <= 2 {
                i..=i
            } else {
                2 + (i - 1) * (i - 2) / 2..=1 + i * (i - 1) / 2
            };
            blocks.push(range);
        }
        let p = BlockPartition { n, blocks };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        let k = self.k();
        let mut expected_start = 1;
        for l in 1..=k {
            let want = match l {
                1 => 1,
                l if l == k => self.n - (k - 1) * (k - 2) / 2 - 1,
                l => l - 1,
            };
            let block = &self.blocks[l - 1];
            if self.size(l) != want || *block.start() != expected_start {
                return Err(Error::Precondition(format!("block C_{l} malformed for N={}", self.n)));
            }
            expected_start = block.end() + 1;
        }
        if expected_start != self.n + 1 {
            return Err(Error::Precondition(format!("blocks do not cover 1..={}", self.n)));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// Qubits of block `C_l`, one-based.
    pub fn block(&self, l: usize) -> RangeInclusive<usize> {
        self.blocks[l - 1].clone()
    }

    pub fn size(&self, l: usize) -> usize {
        let b = &self.blocks[l - 1];
        b.end() + 1 - b.start()
    }

    pub fn sizes(&self) -> Vec<usize> {
        (1..=self.k()).map(|l| self.size(l)).collect()
    }
}

pub fn ghz_generators(n: usize) -> Result<StabilizerSet> {
    if n < 2 {
        return Err(Error::Precondition(format!("GHZ construction needs N >= 2, got {n}")));
    }
    let mut gens = vec![PauliOp::from_support(n, Letter::X, &(0..n).collect::<Vec<_>>())];
    gens.extend((0..n - 1).map(|q| PauliOp::from_support(n, Letter::Z, &[q, q + 1])));
    StabilizerSet::new(n, gens)
}

/// Word with the listed one-based positions set; later entries overwrite.
fn word_from(n: usize, entries: &[(usize, Letter)]) -> PauliOp {
    let mut letters = vec![Letter::I; n];
    for &(q, l) in entries {
        letters[q - 1] = l;
    }
    PauliOp::from_letters(&letters, false)
}

/// Construction 2 for even `N >= 4`; the cyclic variant needs `N >= 6` and
/// wraps `X_0 = X_N`, `X_{N+1} = X_1`.
pub fn construction2_generators(n: usize, cyclic: bool) -> Result<StabilizerSet> {
    if n % 2 == 1 {
        return Err(Error::Precondition(format!("construction 2 is defined for even N only, got {n}")));
    }
    if n < 4 || (cyclic && n < 6) {
        let min = if cyclic { 6 } else { 4 };
        return Err(Error::Precondition(format!("construction 2 needs N >= {min}, got {n}")));
    }
    use Letter::{X, Z};
    let half = n / 2;
    let mut gens = vec![PauliOp::from_support(n, X, &(0..n).collect::<Vec<_>>())];
    let wrap = |q: usize| if q == 0 { n } else if q == n + 1 { 1 } else { q };
    for i in 2..=half + 1 {
        let (a, b, c, d) = (2 * i as isize - 4, 2 * i - 3, 2 * i - 2, 2 * i - 1);
        let op = if cyclic {
            word_from(n, &[(wrap(a as usize), X), (b, Z), (c, Z), (wrap(d), X)])
        } else if i == 2 {
            word_from(n, &[(1, Z), (2, Z), (3, X)])
        } else if i == half + 1 {
            word_from(n, &[(n - 2, X), (n - 1, Z), (n, Z)])
        } else {
            word_from(n, &[(a as usize, X), (b, Z), (c, Z), (d, X)])
        };
        gens.push(op);
    }
    StabilizerSet::new(n, gens)
}

/// Appends `count` copies of `letter`, rejecting negative exponents.
fn push_run(out: &mut Vec<Letter>, letter: Letter, count: i64, what: &str) -> std::result::Result<(), String> {
    if count < 0 {
        return Err(format!("negative exponent {count} in {what}"));
    }
    out.extend(std::iter::repeat_n(letter, count as usize));
    Ok(())
}

/// The compact tensor-power formula for `G_1^max .. G_k^max`.
pub fn closed_form_letters(n: usize) -> Result<std::result::Result<Vec<Vec<Letter>>, String>> {
    let k = k_min(n)? as i64;
    let n_i = n as i64;
    let mut gens = Vec::new();
    for i in 1..=(k - 2) {
        let mut w = Vec::with_capacity(n);
        let what = format!("G_{i}");
        let res = (|| {
            push_run(&mut w, Letter::I, (i - 1) * (i - 2) / 2, &what)?;
            push_run(&mut w, p_letter(i as usize), i + 1, &what)?;
            let q_max = k_min(n + i as usize).map_err(|e| e.to_string())? as i64 - 1;
            for q in i + 2..=q_max {
                push_run(&mut w, Letter::I, q - 3, &what)?;
                push_run(&mut w, p_letter(q as usize + 1), 2, &what)?;
            }
            let gamma = (q_max * q_max - q_max - 2 * i + 4) / 2;
            if gamma != w.len() as i64 {
                return Err(format!("{what}: gamma={gamma} but {} qubits placed", w.len()));
            }
            push_run(&mut w, Letter::I, n_i - gamma, &what)
        })();
        if let Err(msg) = res {
            return Ok(Err(msg));
        }
        gens.push(w);
    }
    let mut w = Vec::with_capacity(n);
    let lead = (k - 2) * (k - 3) / 2;
    let res = push_run(&mut w, Letter::I, lead, "G_{k-1}")
        .and_then(|_| push_run(&mut w, p_letter(k as usize - 1), k, "G_{k-1}"))
        .and_then(|_| push_run(&mut w, Letter::I, n_i - lead - k, "G_{k-1}"));
    if let Err(msg) = res {
        return Ok(Err(msg));
    }
    gens.push(w);
    let mut w = Vec::with_capacity(n);
    let lead = (k - 1) * (k - 2) / 2;
    let res = push_run(&mut w, Letter::I, lead, "G_k")
        .and_then(|_| push_run(&mut w, p_letter(k as usize), n_i - lead, "G_k"));
    if let Err(msg) = res {
        return Ok(Err(msg));
    }
    gens.push(w);
    Ok(Ok(gens))
}

/// One block segment: `lead` identities, `count` copies of `P`, `trail` identities.
fn segment(
    out: &mut Vec<Letter>,
    size: usize,
    lead: i64,
    letter: Letter,
    count: i64,
    trail: i64,
    what: &str,
) -> std::result::Result<(), String> {
    if lead + count + trail != size as i64 {
        return Err(format!("{what}: segment {lead}+{count}+{trail} does not fill block of size {size}"));
    }
    push_run(out, Letter::I, lead, what)?;
    push_run(out, letter, count, what)?;
    push_run(out, Letter::I, trail, what)
}

/// The same generators assembled from the per-block case tables.
///
/// Inside block `C_l` only `G_l` carries `P_l`; every other generator carries
/// `P_{l+1}` or identity there. For `i <= k-2` the generator touches the last
/// qubit of `C_{i-1}`, all of `C_i`, the first qubit of `C_{i+1}`, and one
/// adjacent pair in each later block, the pair in `C_k` being present only
/// when it fits (the trailing-identity count is nonnegative).
pub fn blockwise_letters(n: usize) -> Result<std::result::Result<Vec<Vec<Letter>>, String>> {
    let blocks = BlockPartition::new(n)?;
    let k = blocks.k() as i64;
    let n_i = n as i64;
    let mut gens = Vec::with_capacity(k as usize);
    for i in 1..=k {
        let mut w = Vec::with_capacity(n);
        for l in 1..=k {
            let size = blocks.size(l as usize);
            let sz = size as i64;
            let what = format!("G_{i} on C_{l}");
            let res = if i <= k - 2 {
                if l <= i - 2 {
                    segment(&mut w, size, sz, Letter::I, 0, 0, &what)
                } else if l == i - 1 {
                    segment(&mut w, size, sz - 1, p_letter(i as usize), 1, 0, &what)
                } else if l == i {
                    segment(&mut w, size, 0, p_letter(i as usize), sz, 0, &what)
                } else if l == i + 1 {
                    segment(&mut w, size, 0, p_letter(l as usize + 1), 1, i - 1, &what)
                } else if l < k {
                    segment(&mut w, size, l - i - 2, p_letter(l as usize + 1), 2, i - 1, &what)
                } else {
                    let trail = i - k * (k - 1) / 2 + n_i - 2;
                    if trail >= 0 {
                        segment(&mut w, size, k - i - 2, p_letter(k as usize - 1), 2, trail, &what)
                    } else {
                        segment(&mut w, size, k - k * (k - 1) / 2 + n_i - 2, Letter::I, 0, 0, &what)
                    }
                }
            } else if i == k - 1 {
                if l <= k - 3 {
                    segment(&mut w, size, sz, Letter::I, 0, 0, &what)
                } else if l == k - 2 {
                    segment(&mut w, size, sz - 1, p_letter(i as usize), 1, 0, &what)
                } else if l == k - 1 {
                    segment(&mut w, size, 0, p_letter(i as usize), sz, 0, &what)
                } else {
                    segment(&mut w, size, 0, p_letter(i as usize), 1, k - k * (k - 1) / 2 + n_i - 3, &what)
                }
            } else if l <= k - 2 {
                segment(&mut w, size, sz, Letter::I, 0, 0, &what)
            } else if l == k - 1 {
                segment(&mut w, size, sz - 1, p_letter(k as usize), 1, 0, &what)
            } else {
                segment(&mut w, size, 0, p_letter(k as usize), k - k * (k - 1) / 2 + n_i - 2, 0, &what)
            };
            if let Err(msg) = res {
                return Ok(Err(msg));
            }
        }
        gens.push(w);
    }
    Ok(Ok(gens))
}

fn to_set(n: usize, letters: Vec<Vec<Letter>>) -> Result<StabilizerSet> {
    StabilizerSet::new(n, letters.iter().map(|w| PauliOp::from_letters(w, false)).collect())
}

fn render(r: &std::result::Result<Vec<Vec<Letter>>, String>) -> Vec<String> {
    match r {
        Ok(ws) => ws.iter().map(|w| w.iter().map(|l| l.as_char()).collect()).collect(),
        Err(msg) => vec![format!("<failed: {msg}>")],
    }
}

/// The block-table form on its own.
pub fn blockwise_generators(n: usize) -> Result<StabilizerSet> {
    match blockwise_letters(n)? {
        Ok(ws) => to_set(n, ws),
        Err(msg) => Err(Error::Precondition(format!("block form failed for N={n}: {msg}"))),
    }
}

/// The compact formula on its own.
pub fn closed_form_generators(n: usize) -> Result<StabilizerSet> {
    match closed_form_letters(n)? {
        Ok(ws) => to_set(n, ws),
        Err(msg) => Err(Error::Precondition(format!("closed form failed for N={n}: {msg}"))),
    }
}

fn max_cache() -> &'static Mutex<HashMap<usize, StabilizerSet>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, StabilizerSet>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `G_1^max .. G_k^max` for `N >= 2`. Both assembly routes are run and any
/// disagreement is returned as [`Error::ConstructionMismatch`].
pub fn max_generators(n: usize) -> Result<StabilizerSet> {
    if let Some(hit) = max_cache().lock().expect("cache poisoned").get(&n) {
        return Ok(hit.clone());
    }
    let closed = closed_form_letters(n)?;
    let blocks = blockwise_letters(n)?;
    let set = match (&closed, &blocks) {
        (Ok(a), Ok(b)) if a == b => to_set(n, a.clone())?,
        _ => {
            return Err(Error::ConstructionMismatch { n, closed: render(&closed), blocks: render(&blocks) });
        }
    };
    max_cache().lock().expect("cache poisoned").insert(n, set.clone());
    Ok(set)
}

/// One of the completing operators, with its `(i, j)` label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HOperator {
    pub i: usize,
    pub j: usize,
    pub op: PauliOp,
}

/// `H_{i,j} = P_{i+1} ⊗ P_{i+1}` on qubits `j, j+1` of block `C_{i+2}`.
///
/// Block `C_{i+2}` contributes one operator per adjacent pair, so the count is
/// `Σ_{b>=3} (|C_b| - 1) = N - k_min(N)`.
pub fn h_operators_labeled(n: usize) -> Result<Vec<HOperator>> {
    let k = k_min(n)?;
    let extra = n - k;
    if extra == 0 {
        return Err(Error::Precondition(format!("N - k_min(N) = 0 for N={n}; no H operators")));
    }
    let blocks = BlockPartition::new(n)?;
    let mut out = Vec::with_capacity(extra);
    for b in 3..=k {
        let i = b - 2;
        let offset = (i * i + i + 2) / 2;
        debug_assert_eq!(offset + 1, *blocks.block(b).start());
        for j in 1..blocks.size(b) {
            let q = offset + j;
            let op = word_from(n, &[(q, p_letter(i + 1)), (q + 1, p_letter(i + 1))]);
            out.push(HOperator { i, j, op });
        }
    }
    // The last block index actually used must be the largest i with i(i-1)/2 < N - k.
    let i_max = (1..).take_while(|&i| i * (i - 1) / 2 < extra).last().unwrap_or(0);
    let last_i = out.last().map_or(0, |h| h.i);
    if out.len() != extra || last_i != i_max {
        return Err(Error::Precondition(format!(
            "H construction produced {} operators up to i={last_i}, expected {extra} up to i={i_max}",
            out.len()
        )));
    }
    Ok(out)
}

pub fn h_operators(n: usize) -> Result<Vec<PauliOp>> {
    Ok(h_operators_labeled(n)?.into_iter().map(|h| h.op).collect())
}

/// Sufficient independence test: every operator owns a qubit where it has a
/// Pauli (X or Z) that no other operator shares, the others having the
/// complementary letter or identity there. `false` is inconclusive.
/// Positions carrying `Y` in any operator never count.
pub fn unique_matrix_independent(ops: &[PauliOp]) -> bool {
    let Some(n) = ops.first().map(PauliOp::n) else {
        return true;
    };
    ops.iter().enumerate().all(|(a, op)| {
        (0..n).any(|q| {
            let mine = op.letter(q);
            if !matches!(mine, Letter::X | Letter::Z) {
                return false;
            }
            ops.iter().enumerate().filter(|&(b, _)| b != a).all(|(_, other)| {
                let theirs = other.letter(q);
                theirs == Letter::I || (theirs != mine && theirs != Letter::Y)
            })
        })
    })
}
