use num::{One, Zero};

use crate::rational::{int, to_f64, Rational};

/// Formal power series in `t`, truncated after `t^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TSeries {
    coeffs: Vec<Rational>,
}

impl TSeries {
    pub fn zero(order: usize) -> Self {
        TSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// Panics on an empty coefficient list.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least the constant term"
        );
        TSeries { coeffs }
    }

    /// `exp(c·t)` truncated at `order`.
    pub fn exp_linear(c: &Rational, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut term = Rational::one();
        coeffs.push(term.clone());
        for k in 1..=order {
            term = term * c / int(k as i64);
            coeffs.push(term.clone());
        }
        TSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        TSeries {
            coeffs: (0..=order)
                .map(|k| &self.coeffs[k] + &other.coeffs[k])
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        TSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Cauchy product, truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }

    /// `exp(self)`; requires a vanishing constant term.
    pub fn exp(&self) -> Self {
        assert!(self.coeffs[0].is_zero(), "exp needs a zero constant term");
        // e' = s' e  ⇒  k e_k = Σ_{j=1}^{k} j s_j e_{k-j}
        let order = self.order();
        let mut e = vec![Rational::zero(); order + 1];
        e[0] = Rational::one();
        for k in 1..=order {
            let mut acc = Rational::zero();
            for j in 1..=k {
                acc += int(j as i64) * &self.coeffs[j] * &e[k - j];
            }
            e[k] = acc / int(k as i64);
        }
        TSeries { coeffs: e }
    }

    /// `log(self)`; requires constant term one.
    pub fn log(&self) -> Self {
        assert!(self.coeffs[0].is_one(), "log needs constant term 1");
        // s' = s l'  ⇒  k l_k = k s_k − Σ_{j=1}^{k-1} j l_j s_{k-j}
        let order = self.order();
        let mut l = vec![Rational::zero(); order + 1];
        for k in 1..=order {
            let mut acc = int(k as i64) * &self.coeffs[k];
            for j in 1..k {
                acc -= int(j as i64) * &l[j] * &self.coeffs[k - j];
            }
            l[k] = acc / int(k as i64);
        }
        TSeries { coeffs: l }
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + to_f64(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn exp_log_inverse() {
        let s = TSeries::from_coeffs(vec![int(0), frac(1, 2), frac(-1, 3), int(2)]);
        assert_eq!(s.exp().log(), s);
    }

    #[test]
    fn exp_linear_matches_exp() {
        let c = frac(3, 2);
        let lin = TSeries::from_coeffs(vec![int(0), c.clone(), int(0), int(0), int(0)]);
        assert_eq!(lin.exp(), TSeries::exp_linear(&c, 4));
    }

    #[test]
    fn product_truncates_to_min_order() {
        let a = TSeries::from_coeffs(vec![int(1), int(1), int(1)]);
        let b = TSeries::from_coeffs(vec![int(1), int(2)]);
        assert_eq!(a.mul(&b), TSeries::from_coeffs(vec![int(1), int(3)]));
        assert!((a.eval_f64(0.5) - 1.75).abs() < 1e-15);
    }
}
