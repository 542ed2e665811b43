//! Exhaustive local deterministic bound.
//!
//! Observable `(p, s)` is bit `2p + s` of an assignment, set meaning `-1`.
//! Party 0 is eliminated analytically: for fixed other parties the value is
//! `R + |S_0| + |S_1|`, where `S_s` collects the terms containing `(0, s)`.
//! The remaining bits are walked in Gray-code order so each step touches only
//! the terms containing the flipped bit.

use rayon::prelude::*;
use serde::Serialize;

use super::{BellExpression, Coeff};
use crate::error::{Error, Result};

pub const DEFAULT_BRUTE_LIMIT: usize = 14;

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalResult {
    pub value: Coeff,
    pub value_f64: f64,
    /// `witness[p] = [A_0, A_1]` with entries ±1.
    pub witness: Vec<[i8; 2]>,
}

struct Compiled {
    /// Relevant bits outside party 0, as `(party, setting)`.
    vars: Vec<(usize, u8)>,
    /// Per term: mask over `vars`, target slot (0: rest, 1: S_0, 2: S_1), coefficient.
    masks: Vec<u64>,
    slots: Vec<usize>,
    coeffs: Vec<f64>,
    by_var: Vec<Vec<usize>>,
}

fn compile(expr: &BellExpression) -> Compiled {
    let mut vars: Vec<(usize, u8)> = expr
        .term_map()
        .keys()
        .flat_map(|m| m.iter().copied().filter(|f| f.0 != 0))
        .collect();
    vars.sort_unstable();
    vars.dedup();
    let mut masks = Vec::new();
    let mut slots = Vec::new();
    let mut coeffs = Vec::new();
    let mut by_var = vec![Vec::new(); vars.len()];
    for (t, (mono, coeff)) in expr.term_map().iter().enumerate() {
        let mut mask = 0u64;
        let mut slot = 0;
        for f in mono {
            if f.0 == 0 {
                slot = 1 + f.1 as usize;
            } else {
                let v = vars.binary_search(f).expect("var collected above");
                mask |= 1 << v;
                by_var[v].push(t);
            }
        }
        masks.push(mask);
        slots.push(slot);
        coeffs.push(coeff.to_f64());
    }
    Compiled { vars, masks, slots, coeffs, by_var }
}

/// Best `(value, assignment)` over assignments `hi << low_bits | g` for all `g`.
fn search_chunk(c: &Compiled, hi: u64, low_bits: usize) -> (f64, u64) {
    let mut assign = hi << low_bits;
    let mut sign: Vec<f64> = c.masks.iter().map(|&m| if (m & assign).count_ones() % 2 == 1 { -1.0 } else { 1.0 }).collect();
    let mut sums = [0.0f64; 3];
    for t in 0..c.masks.len() {
        sums[c.slots[t]] += sign[t] * c.coeffs[t];
    }
    let value = |s: &[f64; 3]| s[0] + s[1].abs() + s[2].abs();
    let mut best = (value(&sums), assign);
    for step in 1u64..(1u64 << low_bits) {
        let bit = step.trailing_zeros() as usize;
        assign ^= 1 << bit;
        for &t in &c.by_var[bit] {
            sums[c.slots[t]] -= 2.0 * sign[t] * c.coeffs[t];
            sign[t] = -sign[t];
        }
        let v = value(&sums);
        if v > best.0 {
            best = (v, assign);
        }
    }
    best
}

/// Exact maximum over all `4^N` deterministic strategies.
pub fn classical_bound(expr: &BellExpression, brute_limit: usize) -> Result<ClassicalResult> {
    let n = expr.n_parties();
    if n > brute_limit {
        return Err(Error::Limit { what: "parties for classical brute force", size: n, limit: brute_limit });
    }
    if n == 0 {
        return Ok(ClassicalResult { value: Coeff::ZERO, value_f64: 0.0, witness: vec![] });
    }
    let c = compile(expr);
    let r = c.vars.len();
    if r > 62 {
        return Err(Error::Limit { what: "relevant observables", size: r, limit: 62 });
    }
    let high_bits = r.min(6);
    let low_bits = r - high_bits;
    let (_, assign) = (0u64..(1u64 << high_bits))
        .into_par_iter()
        .map(|hi| search_chunk(&c, hi, low_bits))
        .reduce(|| (f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });

    let mut witness = vec![[1i8, 1i8]; n];
    for (v, &(p, s)) in c.vars.iter().enumerate() {
        if assign >> v & 1 == 1 {
            witness[p][s as usize] = -1;
        }
    }
    // Party 0 takes the sign of its aggregated coefficient, computed exactly.
    for s in 0..2u8 {
        let mut agg = Coeff::ZERO;
        for (mono, coeff) in expr.term_map() {
            if mono.first() == Some(&(0, s)) {
                let sign: i64 = mono[1..].iter().map(|&(p, t)| witness[p][t as usize] as i64).product();
                agg += *coeff * Coeff::int(sign);
            }
        }
        witness[0][s as usize] = if agg.signum() < 0 { -1 } else { 1 };
    }
    let value = expr.evaluate_deterministic(&witness);
    Ok(ClassicalResult { value, value_f64: value.to_f64(), witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{chsh, synth_max_inequality};

    /// Plain enumeration of all 4^N strategies, exact arithmetic.
    fn naive(expr: &BellExpression) -> Coeff {
        let n = expr.n_parties();
        let mut best = None;
        for a in 0u64..(1 << (2 * n)) {
            let values: Vec<[i8; 2]> = (0..n)
                .map(|p| [1 - 2 * (a >> (2 * p) & 1) as i8, 1 - 2 * (a >> (2 * p + 1) & 1) as i8])
                .collect();
            let v = expr.evaluate_deterministic(&values);
            if best.is_none_or(|b| v > b) {
                best = Some(v);
            }
        }
        best.unwrap()
    }

    #[test]
    fn chsh_is_two() {
        let r = classical_bound(&chsh().unwrap(), 14).unwrap();
        assert_eq!(r.value, Coeff::int(2));
        assert_eq!(chsh().unwrap().evaluate_deterministic(&r.witness), Coeff::int(2));
    }

    #[test]
    fn single_marginal() {
        let mut e = BellExpression::new(1);
        e.add_term(vec![(0, 0)], Coeff::ONE).unwrap();
        assert_eq!(classical_bound(&e, 14).unwrap().value, Coeff::ONE);
    }

    #[test]
    fn matches_naive_enumeration() {
        for n in 2..=5 {
            let e = synth_max_inequality(n).unwrap();
            assert_eq!(classical_bound(&e, 14).unwrap().value, naive(&e), "N={n}");
        }
        let mut e = BellExpression::new(3);
        e.add_term(vec![(1, 0)], Coeff::ints(1, 1)).unwrap();
        e.add_term(vec![(1, 1), (2, 0)], -Coeff::SQRT2).unwrap();
        e.add_term(vec![(0, 1), (2, 1)], Coeff::ratio(3, 2)).unwrap();
        e.add_term(vec![(0, 0), (1, 0), (2, 1)], Coeff::int(-1)).unwrap();
        assert_eq!(classical_bound(&e, 14).unwrap().value, naive(&e));
    }

    #[test]
    fn limit_enforced() {
        let e = synth_max_inequality(5).unwrap();
        assert!(matches!(classical_bound(&e, 4), Err(Error::Limit { .. })));
    }
}
