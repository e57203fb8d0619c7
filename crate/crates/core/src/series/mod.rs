//! Formal power series machinery for the group-average generating function.
//!
//! The integrand is a product of `det(sinh X / X)^{±1/2}` factors. Since
//! `log det = tr log`, each factor is `exp(±½ Σ_m c_m tr X^{2m})` with `c_m`
//! the Taylor coefficients of `log(sinh z / z)`. Traces of powers of
//! `D(ω) = ωⁱD_i` and `F(ω) = ωⁱF_i` are expanded exactly into monomials, so
//! no eigenvalues (which are imaginary for compact type) ever appear.

mod poly;
mod traces;
mod tseries;

pub use poly::{Monomial, OmegaPolynomial};
pub use traces::{necklace_count, power_trace_polynomial};
pub use tseries::TSeries;

use num::{BigInt, One, Zero};

use crate::curvature::HolonomyRealization;
use crate::error::{Error, Result};
use crate::rational::{frac, int, Rational};

/// Bernoulli numbers `B_0..=B_m` with `B_1 = −1/2`, from
/// `Σ_{j=0}^{m} binom(m+1, j) B_j = 0`.
pub fn bernoulli_numbers(m: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(m + 1);
    b.push(Rational::one());
    for k in 1..=m {
        // binom(k+1, j) built up incrementally
        let mut binom = BigInt::one();
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += Rational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(k + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / int(k as i64 + 1));
    }
    b
}

pub fn bernoulli(m: usize) -> Rational {
    bernoulli_numbers(m).pop().expect("at least B_0")
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `c_1..=c_K`, the coefficients of `z^{2m}` in `log(sinh z / z)`, from the
/// closed form `c_m = 2^{2m} B_{2m} / (2m · (2m)!)`.
pub fn log_sinh_ratio_series(order: usize) -> Vec<Rational> {
    let b = bernoulli_numbers(2 * order);
    (1..=order)
        .map(|m| {
            let num = Rational::from_integer(BigInt::one() << (2 * m)) * &b[2 * m];
            num / Rational::from_integer(BigInt::from(2 * m) * factorial(2 * m))
        })
        .collect()
}

/// Same coefficients as [`log_sinh_ratio_series`], by formal logarithm of
/// `sinh z / z = Σ z^{2k} / (2k+1)!` in the variable `u = z²`.
pub fn log_sinh_ratio_series_formal(order: usize) -> Vec<Rational> {
    let s = TSeries::from_coeffs(
        (0..=order)
            .map(|k| Rational::new(BigInt::one(), factorial(2 * k + 1)))
            .collect(),
    );
    s.log().into_coeffs().into_iter().skip(1).collect()
}

/// Cap on the number of index words the trace expansion may enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpansionBudget {
    pub max_words: u64,
}

impl ExpansionBudget {
    pub const ENV_VAR: &'static str = "HEATGEN_BUDGET";
    pub const DEFAULT_WORDS: u64 = 100_000_000;

    pub fn new(max_words: u64) -> Self {
        ExpansionBudget { max_words }
    }

    /// Default budget, overridden by `HEATGEN_BUDGET` when it parses.
    pub fn from_env() -> Self {
        std::env::var(Self::ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Self::new)
            .unwrap_or_default()
    }

    pub fn check(&self, p: usize, order: usize) -> Result<()> {
        let words = estimated_words(p, order);
        if words > self.max_words {
            return Err(Error::OrderTooLarge {
                words,
                budget: self.max_words,
            });
        }
        Ok(())
    }
}

impl Default for ExpansionBudget {
    fn default() -> Self {
        ExpansionBudget::new(Self::DEFAULT_WORDS)
    }
}

/// `Σ_{m=1}^{K} p^{2m}`, saturating.
pub fn estimated_words(p: usize, order: usize) -> u64 {
    let p2 = (p as u64).saturating_mul(p as u64);
    let mut term = 1u64;
    let mut total = 0u64;
    for _ in 0..order {
        term = term.saturating_mul(p2);
        total = total.saturating_add(term);
    }
    total
}

/// Log of the integrand after the rescaling `ω → √t ω`:
///
/// `L(t, ω) = Σ_{m=1}^{K} t^m (c_m / 2^{2m}) [½ tr F(ω)^{2m} − ½ tr D(ω)^{2m}]`.
pub fn integrand_log_expansion(
    hol: &HolonomyRealization,
    order: usize,
    budget: ExpansionBudget,
) -> Result<OmegaPolynomial> {
    let p = hol.p;
    let mut out = OmegaPolynomial::zero(p, order);
    if p == 0 || order == 0 {
        return Ok(out);
    }
    budget.check(p, order)?;
    let c = log_sinh_ratio_series(order);
    for m in 1..=order {
        let weight = &c[m - 1] / Rational::from_integer(BigInt::one() << (2 * m)) * frac(1, 2);
        for (exps, v) in power_trace_polynomial(&hol.f, 2 * m) {
            out.add_term(m, exps, &weight * v);
        }
        for (exps, v) in power_trace_polynomial(&hol.d, 2 * m) {
            out.add_term(m, exps, -(&weight * v));
        }
    }
    Ok(out)
}

/// `exp{(R/8 + R_H/6) t} · exp{L(t, ω)}` truncated at `t^K`, with
/// `exp L = Σ_{j≤K} L^j / j!`.
pub fn exponentiate_with_prefactor(
    log_integrand: &OmegaPolynomial,
    scalar: &Rational,
    holonomy_scalar: &Rational,
    order: usize,
) -> OmegaPolynomial {
    let p = log_integrand.p;
    let order = order.min(log_integrand.order);
    let mut l = OmegaPolynomial::zero(p, order);
    for (m, c) in log_integrand.terms() {
        debug_assert!(m.grade >= 1, "log integrand has no constant term");
        l.add_term(m.grade, m.exps.clone(), c.clone());
    }

    let mut exp_l = OmegaPolynomial::one(p, order);
    let mut power = OmegaPolynomial::one(p, order);
    for j in 1..=order {
        power = power.mul(&l).scale(&frac(1, j as i64));
        if power.is_empty() {
            break;
        }
        exp_l = exp_l.add(&power);
    }

    let rate = scalar * frac(1, 8) + holonomy_scalar * frac(1, 6);
    let mut prefactor = OmegaPolynomial::zero(p, order);
    for (k, c) in TSeries::exp_linear(&rate, order)
        .into_coeffs()
        .into_iter()
        .enumerate()
    {
        prefactor.add_term(k, vec![0; p], c);
    }
    prefactor.mul(&exp_l)
}
