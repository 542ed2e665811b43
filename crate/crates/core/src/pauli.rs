//! N-qubit Pauli operators in symplectic form with exact phase tracking.
//!
//! A [`PauliOp`] stores `i^phase · ⊗_k X^{x_k} Z^{z_k}` with the X factor to the
//! left of the Z factor on every qubit, so `Y = i·XZ` carries one unit of
//! phase. Multiplication only needs the overlap between the left Z bits and
//! the right X bits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    x: BitVec,
    z: BitVec,
    phase: u8,
}

/// Single-qubit factor of a word, ignoring phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::I => '1',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        PauliOp { x: BitVec::zeros(n), z: BitVec::zeros(n), phase: 0 }
    }

    /// Builds `i^phase · X^x Z^z` from raw parts.
    pub fn from_parts(x: BitVec, z: BitVec, phase: u8) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::WidthMismatch { expected: x.len(), found: z.len() });
        }
        Ok(PauliOp { x, z, phase: phase % 4 })
    }

    /// Hermitian word from letters with sign `(-1)^negative`.
    pub fn from_letters(letters: &[Letter], negative: bool) -> Self {
        let n = letters.len();
        let mut op = PauliOp::identity(n);
        let mut ys = 0u8;
        for (k, l) in letters.iter().enumerate() {
            match l {
                Letter::I => {}
                Letter::X => op.x.set(k, true),
                Letter::Z => op.z.set(k, true),
                Letter::Y => {
                    op.x.set(k, true);
                    op.z.set(k, true);
                    ys = (ys + 1) % 4;
                }
            }
        }
        op.phase = (ys + if negative { 2 } else { 0 }) % 4;
        op
    }

    /// `P` on each listed qubit (zero-based), identity elsewhere.
    pub fn from_support(n: usize, letter: Letter, qubits: &[usize]) -> Self {
        let mut letters = vec![Letter::I; n];
        for &q in qubits {
            letters[q] = letter;
        }
        PauliOp::from_letters(&letters, false)
    }

    /// Parses the subscript notation `X1Z2Z3X4` (one-based qubit indices)
    /// on `n` qubits, with an optional leading sign.
    pub fn from_sparse(s: &str, n: usize) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (negative, body) = split_sign(&compact)?;
        if negative.is_imaginary() {
            return Err(Error::Precondition("imaginary sign in sparse form".into()));
        }
        let mut letters = vec![Letter::I; n];
        let mut chars = body.chars().peekable();
        if chars.peek().is_none() {
            return Err(Error::EmptyWord);
        }
        while let Some(c) = chars.next() {
            let letter = parse_letter(c)?;
            let mut digits = String::new();
            while let Some(d) = chars.peek().copied().filter(char::is_ascii_digit) {
                digits.push(d);
                chars.next();
            }
            let q: usize = digits
                .parse()
                .map_err(|_| Error::Precondition(format!("missing qubit index after {c}")))?;
            if q == 0 || q > n {
                return Err(Error::Precondition(format!("qubit index {q} outside 1..={n}")));
            }
            letters[q - 1] = letter;
        }
        let mut op = PauliOp::from_letters(&letters, false);
        op.phase = (op.phase + negative.phase()) % 4;
        Ok(op)
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    /// Exponent `p` in `i^p · X^x Z^z`.
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn y_count(&self) -> usize {
        self.x.and_count(&self.z)
    }

    pub fn has_y(&self) -> bool {
        self.y_count() > 0
    }

    /// Exponent `s` such that the word equals `i^s` times a tensor product of
    /// X, Y, Z and identity.
    pub fn sign_exp(&self) -> u8 {
        ((self.phase as usize + 4 - self.y_count() % 4) % 4) as u8
    }

    pub fn is_hermitian(&self) -> bool {
        self.sign_exp().is_multiple_of(2)
    }

    /// `-1` when the Hermitian word carries a minus sign.
    pub fn is_negative(&self) -> bool {
        self.sign_exp() == 2
    }

    pub fn is_identity_word(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn letter(&self, k: usize) -> Letter {
        match (self.x.get(k), self.z.get(k)) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (false, true) => Letter::Z,
            (true, true) => Letter::Y,
        }
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n()).map(|k| self.letter(k)).collect()
    }

    pub fn support(&self) -> BitVec {
        self.x.or(&self.z)
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones()
    }

    /// The same word with its sign flipped.
    pub fn negated(&self) -> Self {
        PauliOp { phase: (self.phase + 2) % 4, ..self.clone() }
    }

    fn check_width(&self, other: &PauliOp) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::WidthMismatch { expected: self.n(), found: other.n() });
        }
        Ok(())
    }

    /// Exact group product `self · other`.
    pub fn multiply(&self, other: &PauliOp) -> Result<PauliOp> {
        self.check_width(other)?;
        // Z^{z1} X^{x2} = (-1)^{z1·x2} X^{x2} Z^{z1} on every qubit.
        let swaps = self.z.and_count(&other.x) % 2;
        let phase = ((self.phase + other.phase) as usize + 2 * swaps) % 4;
        Ok(PauliOp { x: self.x.xor(&other.x), z: self.z.xor(&other.z), phase: phase as u8 })
    }

    pub fn commutes(&self, other: &PauliOp) -> Result<bool> {
        self.check_width(other)?;
        Ok(self.local_anticommute_mask_unchecked(other).count_ones().is_multiple_of(2))
    }

    /// Bit `k` is set iff the single-qubit factors at position `k` anticommute.
    pub fn local_anticommute_mask(&self, other: &PauliOp) -> Result<BitVec> {
        self.check_width(other)?;
        Ok(self.local_anticommute_mask_unchecked(other))
    }

    fn local_anticommute_mask_unchecked(&self, other: &PauliOp) -> BitVec {
        let mut m = self.x.and(&other.z);
        m.xor_assign(&self.z.and(&other.x));
        m
    }

    /// Symplectic row `(x | z)` of length `2n`.
    pub fn symplectic_row(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    /// Word letters without sign, e.g. `XZ1`.
    pub fn word(&self) -> String {
        (0..self.n()).map(|k| self.letter(k).as_char()).collect()
    }
}

pub fn multiply(a: &PauliOp, b: &PauliOp) -> Result<PauliOp> {
    a.multiply(b)
}

pub fn commutes(a: &PauliOp, b: &PauliOp) -> Result<bool> {
    a.commutes(b)
}

pub fn local_anticommute_mask(a: &PauliOp, b: &PauliOp) -> Result<BitVec> {
    a.local_anticommute_mask(b)
}

#[derive(Clone, Copy)]
enum Sign {
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl Sign {
    fn phase(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::PlusI => 1,
            Sign::Minus => 2,
            Sign::MinusI => 3,
        }
    }

    fn is_imaginary(self) -> bool {
        matches!(self, Sign::PlusI | Sign::MinusI)
    }
}

fn split_sign(s: &str) -> Result<(Sign, &str)> {
    let (neg, rest) = match s.as_bytes().first() {
        Some(b'+') => (false, &s[1..]),
        Some(b'-') => (true, &s[1..]),
        _ => (false, s),
    };
    // An `i` prefix only counts when a word follows it.
    if let Some(after) = rest.strip_prefix('i') {
        if !after.is_empty() {
            return Ok((if neg { Sign::MinusI } else { Sign::PlusI }, after));
        }
    }
    Ok((if neg { Sign::Minus } else { Sign::Plus }, rest))
}

fn parse_letter(c: char) -> Result<Letter> {
    match c {
        'X' => Ok(Letter::X),
        'Y' => Ok(Letter::Y),
        'Z' => Ok(Letter::Z),
        '1' => Ok(Letter::I),
        other => Err(Error::UnknownChar(other)),
    }
}

impl FromStr for PauliOp {
    type Err = Error;

    /// Parses `[+|-][i]WORD` with WORD over `{X, Y, Z, 1}`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (sign, body) = split_sign(&compact)?;
        if body.is_empty() {
            return Err(Error::EmptyWord);
        }
        let letters = body.chars().map(parse_letter).collect::<Result<Vec<_>>>()?;
        let mut op = PauliOp::from_letters(&letters, false);
        op.phase = (op.phase + sign.phase()) % 4;
        Ok(op)
    }
}

pub fn pauli_from_string(s: &str) -> Result<PauliOp> {
    s.parse()
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.sign_exp() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{sign}{}", self.word())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl Serialize for PauliOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Generator list exchanged as JSON: `{"n": 5, "paulis": ["+XZZX1", ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PauliList {
    pub n: usize,
    pub paulis: Vec<PauliOp>,
}

/// Parses the line-oriented text format: one signed word per line, `#`
/// starts a comment, blank lines are skipped.
pub fn parse_text(text: &str) -> Result<Vec<PauliOp>> {
    let mut out: Vec<PauliOp> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let op: PauliOp = line
            .parse()
            .map_err(|e: Error| Error::Parse { line: idx + 1, msg: e.to_string() })?;
        if let Some(first) = out.first() {
            if first.n() != op.n() {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("word has {} qubits, expected {}", op.n(), first.n()),
                });
            }
        }
        out.push(op);
    }
    Ok(out)
}

pub fn format_text(ops: &[PauliOp]) -> String {
    ops.iter().map(|p| format!("{p}\n")).collect()
}

/// Accepts either the JSON form or the text form, deciding on the first
/// non-blank character.
pub fn parse_any(text: &str) -> Result<Vec<PauliOp>> {
    if text.trim_start().starts_with('{') {
        let list: PauliList = serde_json::from_str(text)?;
        if let Some(bad) = list.paulis.iter().find(|p| p.n() != list.n) {
            return Err(Error::WidthMismatch { expected: list.n, found: bad.n() });
        }
        Ok(list.paulis)
    } else {
        parse_text(text)
    }
}
