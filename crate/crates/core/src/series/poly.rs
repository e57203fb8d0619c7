use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num::{One, Zero};

use crate::rational::Rational;
use crate::series::TSeries;

/// Key of one term: its power of `t` and the exponents of `ω¹…ωᵖ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub grade: usize,
    pub exps: Vec<u32>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

/// Polynomial in the holonomy variables `ω` with exact coefficients, each
/// term carrying its `t`-grade; terms above `order` are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaPolynomial {
    pub p: usize,
    pub order: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl OmegaPolynomial {
    pub fn zero(p: usize, order: usize) -> Self {
        OmegaPolynomial {
            p,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(p: usize, order: usize) -> Self {
        let mut s = Self::zero(p, order);
        s.add_term(0, vec![0; p], Rational::one());
        s
    }

    /// Adds `coeff · t^grade · ω^exps`; silently dropped above the truncation order.
    pub fn add_term(&mut self, grade: usize, exps: Vec<u32>, coeff: Rational) {
        assert_eq!(exps.len(), self.p);
        if grade > self.order || coeff.is_zero() {
            return;
        }
        match self.terms.entry(Monomial { grade, exps }) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, grade: usize, exps: &[u32]) -> Rational {
        self.terms
            .get(&Monomial {
                grade,
                exps: exps.to_vec(),
            })
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let mut out = Self::zero(self.p, self.order.min(other.order));
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(m.grade, m.exps.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero(self.p, self.order);
        if s.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect();
        out
    }

    /// Product truncated at the smaller order; pairs whose grades exceed it
    /// are never formed.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let order = self.order.min(other.order);
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            if ma.grade > order {
                continue;
            }
            for (mb, cb) in other.terms.range(
                ..Monomial {
                    grade: order - ma.grade + 1,
                    exps: Vec::new(),
                },
            ) {
                let exps = ma.exps.iter().zip(&mb.exps).map(|(x, y)| x + y).collect();
                *acc.entry(Monomial {
                    grade: ma.grade + mb.grade,
                    exps,
                })
                .or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        OmegaPolynomial {
            p: self.p,
            order,
            terms: acc,
        }
    }

    /// The `ω = 0` slice as a series in `t`.
    pub fn at_omega_zero(&self) -> TSeries {
        let mut coeffs = vec![Rational::zero(); self.order + 1];
        for (m, c) in &self.terms {
            if m.exps.iter().all(|&e| e == 0) {
                coeffs[m.grade] += c;
            }
        }
        TSeries::from_coeffs(coeffs)
    }

    pub fn max_grade(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.grade).max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn truncated_product() {
        // (1 + t ω²)² = 1 + 2t ω² + t² ω⁴, truncated at order 1
        let mut a = OmegaPolynomial::one(1, 1);
        a.add_term(1, vec![2], int(1));
        let sq = a.mul(&a);
        assert_eq!(sq.len(), 2);
        assert_eq!(sq.coeff(1, &[2]), int(2));
        assert_eq!(sq.coeff(2, &[4]), int(0));
    }

    #[test]
    fn cancellation_removes_terms() {
        let mut a = OmegaPolynomial::zero(2, 3);
        a.add_term(1, vec![1, 1], frac(1, 2));
        a.add_term(2, vec![2, 2], int(1));
        a.add_term(1, vec![1, 1], frac(-1, 2));
        assert_eq!(a.len(), 1);
        assert_eq!(a.at_omega_zero(), TSeries::zero(3));
    }
}
