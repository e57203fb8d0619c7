//! Exact Gaussian averages over the holonomy variables.
//!
//! The average is taken against the normalized weight
//! `|β|^{1/2} (4π)^{-p/2} exp(−¼⟨ω, βω⟩)`, whose covariance is
//! `Cov(ωⁱ, ωʲ) = 2βⁱʲ`. Two independent engines compute moments: Wick
//! pairing over perfect matchings, and normal ordering of annihilators
//! against `exp(βʲᵏ b*_j b*_k)|0⟩`.

use std::collections::{BTreeMap, HashMap};

use num::{One, Zero};

use crate::rational::{int, QMatrix, Rational};
use crate::series::{OmegaPolynomial, TSeries};

/// Multiset of holonomy indices `{i₁, …, i_m}` naming `⟨ω^{i₁}…ω^{i_m}⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MomentKey {
    indices: Vec<usize>,
}

impl MomentKey {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        MomentKey { indices }
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        let indices = exps
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
            .collect();
        MomentKey { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn is_even(&self) -> bool {
        self.indices.len().is_multiple_of(2)
    }

    fn counts(&self, p: usize) -> Vec<u32> {
        let mut c = vec![0u32; p];
        for &i in &self.indices {
            c[i] += 1;
        }
        c
    }
}

/// Pairing covariance `2βⁱʲ`.
fn covariance(beta_inv: &QMatrix, i: usize, j: usize) -> Rational {
    &beta_inv[(i, j)] * int(2)
}

/// Sum over perfect matchings of the product of pair covariances.
/// Odd keys give zero.
pub fn wick_moment(key: &MomentKey, beta_inv: &QMatrix) -> Rational {
    let mut memo = HashMap::new();
    wick_counts(&key.counts(beta_inv.rows()), beta_inv, &mut memo)
}

/// Matchings are grouped by the partner of the first remaining index: pairing
/// it with another copy of itself (`c_i − 1` ways) or with index `j`
/// (`c_j` ways).
fn wick_counts(
    counts: &[u32],
    beta_inv: &QMatrix,
    memo: &mut HashMap<Vec<u32>, Rational>,
) -> Rational {
    let total: u32 = counts.iter().sum();
    if total == 0 {
        return Rational::one();
    }
    if total % 2 == 1 {
        return Rational::zero();
    }
    if let Some(v) = memo.get(counts) {
        return v.clone();
    }
    let i = counts.iter().position(|&c| c > 0).expect("non-empty");
    let mut rest = counts.to_vec();
    rest[i] -= 1;
    let mut acc = Rational::zero();
    for j in 0..counts.len() {
        let ways = rest[j];
        if ways == 0 || beta_inv[(i, j)].is_zero() {
            continue;
        }
        let mut sub = rest.clone();
        sub[j] -= 1;
        acc += covariance(beta_inv, i, j) * int(ways as i64) * wick_counts(&sub, beta_inv, memo);
    }
    memo.insert(counts.to_vec(), acc.clone());
    acc
}

/// Vacuum expectation `⟨0| b^{i₁}…b^{i_m} exp(βʲᵏ b*_j b*_k) |0⟩` by normal
/// ordering, rescaled by the degree-two calibration against [`wick_moment`].
pub fn fock_moment(key: &MomentKey, beta_inv: &QMatrix) -> Rational {
    if !key.is_even() {
        return Rational::zero();
    }
    let raw = fock_raw(key, beta_inv);
    let pairs = key.degree() / 2;
    if pairs == 0 {
        return raw;
    }
    raw * num::pow(fock_calibration(beta_inv), pairs)
}

/// Per-pair factor that aligns the operator average with the Wick engine on
/// `⟨ω¹ω¹⟩`. With the commutator `[bʲ, b*_k] = δʲ_k` it comes out as exactly one.
pub fn fock_calibration(beta_inv: &QMatrix) -> Rational {
    if beta_inv.rows() == 0 {
        return Rational::one();
    }
    let key = MomentKey::new(vec![0, 0]);
    wick_moment(&key, beta_inv) / fock_raw(&key, beta_inv)
}

fn fock_raw(key: &MomentKey, beta_inv: &QMatrix) -> Rational {
    let p = beta_inv.rows();
    // Σ coeff · Π (b*_k)^{n_k} exp(Q)|0⟩, keyed by creator counts n_k
    let mut state: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    state.insert(vec![0; p], Rational::one());
    let word = key.indices();
    for (pos, &i) in word.iter().enumerate().rev() {
        let remaining = pos as u32; // annihilators still to act after this one
        let mut next: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (creators, coeff) in &state {
            // b^i past (b*_i)^n leaves n (b*_i)^{n-1}
            let n_i = creators[i];
            if n_i > 0 {
                let mut c = creators.clone();
                c[i] -= 1;
                *next.entry(c).or_insert_with(Rational::zero) += coeff * int(n_i as i64);
            }
            // b^i on exp(Q)|0⟩ gives 2βⁱᵏ b*_k exp(Q)|0⟩
            let held: u32 = creators.iter().sum();
            if held + 1 > remaining {
                continue; // could never be annihilated again
            }
            for k in 0..p {
                let b = &beta_inv[(i, k)];
                if b.is_zero() {
                    continue;
                }
                let mut c = creators.clone();
                c[k] += 1;
                *next.entry(c).or_insert_with(Rational::zero) += coeff * b * int(2);
            }
        }
        next.retain(|_, v| !v.is_zero());
        state = next;
    }
    // ⟨0|b* = 0 and ⟨0|exp(Q)|0⟩ = 1
    state.remove(&vec![0; p]).unwrap_or_else(Rational::zero)
}

/// Averages every monomial with the Wick engine and sums by `t`-grade.
pub fn average(poly: &OmegaPolynomial, beta_inv: &QMatrix) -> TSeries {
    let mut coeffs = vec![Rational::zero(); poly.order + 1];
    let mut memo = HashMap::new();
    for (m, c) in poly.terms() {
        if m.degree() % 2 == 1 {
            continue;
        }
        let moment = wick_counts(&m.exps, beta_inv, &mut memo);
        if !moment.is_zero() {
            coeffs[m.grade] += c * moment;
        }
    }
    TSeries::from_coeffs(coeffs)
}
