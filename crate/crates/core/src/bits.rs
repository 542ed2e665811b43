//! Fixed-width bit vectors packed into `u64` limbs.
//!
//! Bit `k` of the vector is bit `k % 64` of limb `k / 64`. Bits past `len`
//! in the last limb are always zero, so equality and hashing can compare
//! limbs directly.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const LIMB: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVec {
    len: usize,
    limbs: Vec<u64>,
}

fn limbs_for(len: usize) -> usize {
    len.div_ceil(LIMB)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, limbs: vec![0; limbs_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVec { len, limbs: vec![u64::MAX; limbs_for(len)] };
        v.clear_tail();
        v
    }

    /// The standard basis vector `e_k`.
    pub fn unit(len: usize, k: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(k, true);
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut limbs = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % LIMB == 0 {
                limbs.push(0);
            }
            if b {
                limbs[len / LIMB] |= 1 << (len % LIMB);
            }
            len += 1;
        }
        BitVec { len, limbs }
    }

    /// Builds a vector from the low `len` bits of `word` (bit 0 is position 0).
    pub fn from_u64(len: usize, word: u64) -> Self {
        assert!(len <= LIMB);
        let mut v = BitVec { len, limbs: vec![word; limbs_for(len)] };
        v.clear_tail();
        v
    }

    /// Low 64 bits as an integer, for the small-N fast paths.
    pub fn as_u64(&self) -> u64 {
        self.limbs.first().copied().unwrap_or(0)
    }

    fn clear_tail(&mut self) {
        let r = self.len % LIMB;
        if r != 0 {
            if let Some(last) = self.limbs.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    #[inline]
    pub fn get(&self, k: usize) -> bool {
        debug_assert!(k < self.len);
        (self.limbs[k / LIMB] >> (k % LIMB)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, k: usize, value: bool) {
        assert!(k < self.len, "bit {k} out of range for width {}", self.len);
        let mask = 1u64 << (k % LIMB);
        if value {
            self.limbs[k / LIMB] |= mask;
        } else {
            self.limbs[k / LIMB] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, k: usize) {
        assert!(k < self.len);
        self.limbs[k / LIMB] ^= 1u64 << (k % LIMB);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            limbs: self.limbs.iter().zip(&other.limbs).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn or(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            limbs: self.limbs.iter().zip(&other.limbs).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn count_ones(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    /// Number of positions where both vectors are set.
    pub fn and_count(&self, other: &BitVec) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.limbs.iter().zip(&other.limbs).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    /// Parity of the standard dot product over Z_2.
    pub fn dot(&self, other: &BitVec) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.limbs.iter().zip(&other.limbs) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.limbs
            .iter()
            .enumerate()
            .find(|(_, &l)| l != 0)
            .map(|(i, l)| i * LIMB + l.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.limbs.iter().enumerate().flat_map(|(i, &limb)| {
            let mut l = limb;
            std::iter::from_fn(move || {
                if l == 0 {
                    None
                } else {
                    let t = l.trailing_zeros() as usize;
                    l &= l - 1;
                    Some(i * LIMB + t)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|k| self.get(k))
    }

    /// Concatenation `self | other`, used for symplectic `(x|z)` rows.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        BitVec::from_bools(self.iter().chain(other.iter()))
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Error;

    /// Parses a string of `0`/`1` characters; position 0 is the first character.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::UnknownChar(other)),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitVec::from_bools)
    }
}
