//! Floating-point evaluation of the group-average integrand at finite `t`.
//!
//! `det(sinh X / X)` is evaluated without eigenvalues: a Taylor series for
//! `sinh(Y)/Y` and `cosh(Y)` at `Y = X / 2^s`, then `s` doubling steps
//! `sinhc(2Y) = sinhc(Y) cosh(Y)`, `cosh(2Y) = 2cosh²(Y) − 1`, then an LU
//! determinant. The integration domain is cut to the ball where the largest
//! singular value of `√t D(ω)/2` stays below `π − margin`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;

use crate::curvature::{curvature_scalars, HolonomyRealization, SpaceSpec};
use crate::error::{Error, Result};
use crate::rational::to_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericParams {
    /// Monte Carlo sample count.
    pub samples: u64,
    /// Gauss–Hermite nodes per dimension.
    pub nodes: usize,
    pub seed: u64,
    /// Distance kept from the first pole, in units of the eigenvalue phase.
    pub margin: f64,
}

impl Default for NumericParams {
    fn default() -> Self {
        NumericParams {
            samples: 100_000,
            nodes: 32,
            seed: 0,
            margin: 0.01,
        }
    }
}

/// Estimate of `(4πt)^{n/2} U^diag(t)` at one `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericEstimate {
    pub value: f64,
    /// Standard error of the mean (Monte Carlo) or the difference between two
    /// quadrature rules.
    pub std_error: f64,
    pub method: Method,
    /// Samples (or quadrature nodes) evaluated.
    pub evaluations: u64,
    /// Samples or nodes that fell outside the truncation ball.
    pub outside: u64,
    /// Samples redrawn because they landed on a pole.
    pub singular_hits: u64,
    /// Upper bound on the Gaussian mass outside the truncation ball.
    pub truncation_bound: f64,
}

/// `det(sinh X / X)` for a square matrix.
pub fn det_sinhc(x: &DMatrix<f64>) -> f64 {
    if x.is_empty() {
        return 1.0;
    }
    sinhc(x).determinant()
}

/// Matrix function `sinh(X)/X = Σ X^{2k}/(2k+1)!` by scaling and doubling.
pub fn sinhc(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let ident = DMatrix::<f64>::identity(n, n);
    let norm = x.norm();
    let mut steps = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        steps += 1;
    }
    let y = x * scale;
    let y2 = &y * &y;
    // ‖Y‖ ≤ 1/2: 12 terms put the remainder far below f64 resolution
    let mut s = ident.clone();
    let mut c = ident.clone();
    let mut pow = ident.clone();
    let mut fact_odd = 1.0; // (2k+1)!
    let mut fact_even = 1.0; // (2k)!
    for k in 1..=12 {
        pow = &pow * &y2;
        let kk = k as f64;
        fact_even *= (2.0 * kk - 1.0) * (2.0 * kk);
        fact_odd *= (2.0 * kk) * (2.0 * kk + 1.0);
        s += &pow / fact_odd;
        c += &pow / fact_even;
    }
    for _ in 0..steps {
        s = &s * &c;
        c = (&c * &c) * 2.0 - &ident;
    }
    s
}

fn spectral_norm(x: &DMatrix<f64>) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.clone().svd(false, false).singular_values.max()
}

fn combine(gens: &[DMatrix<f64>], omega: &[f64], dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for (g, &w) in gens.iter().zip(omega) {
        if w != 0.0 {
            m += g * w;
        }
    }
    m
}

enum Sample {
    Outside,
    Singular,
    Value(f64),
}

struct Integrand {
    n: usize,
    p: usize,
    d: Vec<DMatrix<f64>>,
    f: Vec<DMatrix<f64>>,
    /// `ω = √2 · L u` maps standard normals to covariance `2β⁻¹`.
    chol: DMatrix<f64>,
    rate: f64,
    t: f64,
    margin: f64,
}

impl Integrand {
    fn new(spec: &SpaceSpec, hol: &HolonomyRealization, t: f64, margin: f64) -> Result<Self> {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::NonPositiveT(t));
        }
        let curv = curvature_scalars(spec, hol)?;
        let rate = to_f64(&curv.scalar) / 8.0 + to_f64(&curv.holonomy_scalar) / 6.0;
        let beta_inv = spec
            .beta
            .inverse()
            .ok_or_else(|| Error::InvalidSpec("beta is singular".into()))?
            .to_f64();
        let chol = if spec.p == 0 {
            DMatrix::zeros(0, 0)
        } else {
            beta_inv
                .cholesky()
                .ok_or_else(|| Error::InvalidSpec("beta is not positive definite".into()))?
                .l()
        };
        Ok(Integrand {
            n: spec.n,
            p: spec.p,
            d: hol.d.iter().map(|m| m.to_f64()).collect(),
            f: hol.f.iter().map(|m| m.to_f64()).collect(),
            chol,
            rate,
            t,
            margin,
        })
    }

    fn omega_from_normal(&self, u: &[f64]) -> Vec<f64> {
        let v = &self.chol * DVector::from_column_slice(u) * 2f64.sqrt();
        v.iter().copied().collect()
    }

    fn eval(&self, omega: &[f64]) -> Sample {
        let s = self.t.sqrt() / 2.0;
        let xd = combine(&self.d, omega, self.n) * s;
        if spectral_norm(&xd) >= PI - self.margin {
            return Sample::Outside;
        }
        let det_d = det_sinhc(&xd);
        if !det_d.is_finite() || det_d <= 0.0 {
            return Sample::Singular;
        }
        let xf = combine(&self.f, omega, self.p) * s;
        // det over the holonomy algebra is a product of (sin φ/φ)² pairs, so ≥ 0
        let det_f = det_sinhc(&xf).max(0.0);
        Sample::Value((det_f / det_d).sqrt())
    }

    fn prefactor(&self) -> f64 {
        (self.rate * self.t).exp()
    }

    /// Chi-square tail bound on the Gaussian mass outside the ball.
    fn truncation_bound(&self) -> f64 {
        if self.p == 0 {
            return 0.0;
        }
        let sd: f64 = self
            .d
            .iter()
            .map(|m| spectral_norm(m).powi(2))
            .sum::<f64>()
            .sqrt();
        if sd == 0.0 {
            return 0.0;
        }
        // ‖D(ω)‖ ≤ ‖ω‖ s_D, and ‖ω‖² ≤ 2 ‖L‖² ‖u‖²
        let rho = 2.0 * (PI - self.margin) / (self.t.sqrt() * sd);
        let lmax = spectral_norm(&self.chol).powi(2);
        let x = rho * rho / (2.0 * lmax);
        let p = self.p as f64;
        if x <= p {
            return 1.0;
        }
        let r = x / p;
        (0.5 * p * (r.ln() + 1.0 - r)).exp()
    }
}

/// Evaluates `exp{(R/8 + R_H/6)t} ⟨det_𝔥(…F…)^{1/2} det_TM(…D…)^{-1/2}⟩` at finite `t`.
pub fn numeric_average(
    spec: &SpaceSpec,
    hol: &HolonomyRealization,
    t: f64,
    method: Method,
    params: &NumericParams,
) -> Result<NumericEstimate> {
    let integrand = Integrand::new(spec, hol, t, params.margin)?;
    if spec.p == 0 {
        return Ok(NumericEstimate {
            value: integrand.prefactor(),
            std_error: 0.0,
            method,
            evaluations: 1,
            outside: 0,
            singular_hits: 0,
            truncation_bound: 0.0,
        });
    }
    match method {
        Method::Quadrature => quadrature(&integrand, params.nodes),
        Method::MonteCarlo => monte_carlo(&integrand, params.samples, params.seed),
    }
}

/// Probabilists' Gauss–Hermite rule (weight `e^{−x²/2}/√(2π)`) by Golub–Welsch.
pub fn gauss_hermite(m: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(m, m, |r, c| {
        if r + 1 == c || c + 1 == r {
            (r.max(c) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

fn quadrature(integrand: &Integrand, nodes: usize) -> Result<NumericEstimate> {
    let p = integrand.p;
    if p > 3 {
        return Err(Error::QuadratureDimension(p));
    }
    let nodes = nodes.max(4);
    let fine = tensor_rule(integrand, nodes);
    let coarse = tensor_rule(integrand, nodes / 2 + 1);
    let pre = integrand.prefactor();
    Ok(NumericEstimate {
        value: pre * fine.sum,
        std_error: pre * (fine.sum - coarse.sum).abs(),
        method: Method::Quadrature,
        evaluations: fine.evaluations,
        outside: fine.outside,
        singular_hits: fine.singular,
        truncation_bound: integrand.truncation_bound(),
    })
}

struct RuleResult {
    sum: f64,
    evaluations: u64,
    outside: u64,
    singular: u64,
}

fn tensor_rule(integrand: &Integrand, m: usize) -> RuleResult {
    let p = integrand.p;
    let (x, w) = gauss_hermite(m);
    let total = m.pow(p as u32);
    let parts: Vec<(f64, u64, u64)> = (0..total)
        .into_par_iter()
        .map(|code| {
            let mut u = Vec::with_capacity(p);
            let mut weight = 1.0;
            let mut c = code;
            for _ in 0..p {
                u.push(x[c % m]);
                weight *= w[c % m];
                c /= m;
            }
            match integrand.eval(&integrand.omega_from_normal(&u)) {
                Sample::Value(v) => (weight * v, 0, 0),
                Sample::Outside => (0.0, 1, 0),
                Sample::Singular => (0.0, 0, 1),
            }
        })
        .collect();
    // ordered sum keeps the result independent of the thread count
    RuleResult {
        sum: parts.iter().map(|p| p.0).sum(),
        evaluations: total as u64,
        outside: parts.iter().map(|p| p.1).sum(),
        singular: parts.iter().map(|p| p.2).sum(),
    }
}

const BATCH: u64 = 10_000;

#[derive(Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    outside: u64,
    singular: u64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return Moments {
                outside: self.outside + other.outside,
                singular: self.singular + other.singular,
                ..other
            };
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64,
            outside: self.outside + other.outside,
            singular: self.singular + other.singular,
        }
    }
}

/// Each batch of `BATCH` samples owns ChaCha stream `batch` of `seed`, so the
/// estimate does not depend on how batches are scheduled across threads.
fn monte_carlo(integrand: &Integrand, samples: u64, seed: u64) -> Result<NumericEstimate> {
    let samples = samples.max(2);
    let batches = samples.div_ceil(BATCH);
    let hit_limit = samples;
    let parts: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BATCH.min(samples - b * BATCH);
            let mut mom = Moments::default();
            let mut u = vec![0.0; integrand.p];
            let mut drawn = 0;
            while drawn < count {
                for x in u.iter_mut() {
                    *x = StandardNormal.sample(&mut rng);
                }
                match integrand.eval(&integrand.omega_from_normal(&u)) {
                    Sample::Value(v) => mom.push(v),
                    Sample::Outside => {
                        mom.push(0.0);
                        mom.outside += 1;
                    }
                    Sample::Singular => {
                        mom.singular += 1;
                        if mom.singular > hit_limit {
                            break;
                        }
                        continue;
                    }
                }
                drawn += 1;
            }
            mom
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    if total.singular > hit_limit {
        return Err(Error::SingularityHit {
            hits: total.singular,
            limit: hit_limit,
        });
    }
    let var = total.m2 / (total.n - 1) as f64;
    let pre = integrand.prefactor();
    Ok(NumericEstimate {
        value: pre * total.mean,
        std_error: pre * (var / total.n as f64).sqrt(),
        method: Method::MonteCarlo,
        evaluations: total.n,
        outside: total.outside,
        singular_hits: total.singular,
        truncation_bound: integrand.truncation_bound(),
    })
}

/// Per-sample comparison of `det_𝒢 sinhc(C(ω)/2)` against the product of the
/// tangent and holonomy factors.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationReport {
    pub checked: usize,
    pub tolerance: f64,
    pub max_rel_error: f64,
    /// `(sample index, relative error)` for samples over tolerance.
    pub failures: Vec<(usize, f64)>,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub const FACTORIZATION_TOL: f64 = 1e-10;

pub fn check_det_factorization(
    hol: &HolonomyRealization,
    omega_samples: &[Vec<f64>],
    tol: f64,
) -> FactorizationReport {
    let (n, p) = (hol.n, hol.p);
    let big_n = n + p;
    let c_hol: Vec<DMatrix<f64>> = hol.c[n..].iter().map(|m| m.to_f64()).collect();
    let d: Vec<DMatrix<f64>> = hol.d.iter().map(|m| m.to_f64()).collect();
    let f: Vec<DMatrix<f64>> = hol.f.iter().map(|m| m.to_f64()).collect();
    let mut max_rel_error: f64 = 0.0;
    let mut failures = Vec::new();
    for (idx, omega) in omega_samples.iter().enumerate() {
        let lhs = det_sinhc(&(combine(&c_hol, omega, big_n) * 0.5));
        let rhs =
            det_sinhc(&(combine(&d, omega, n) * 0.5)) * det_sinhc(&(combine(&f, omega, p) * 0.5));
        let rel = (lhs - rhs).abs() / lhs.abs();
        let rel = if rel.is_nan() { f64::INFINITY } else { rel };
        max_rel_error = max_rel_error.max(rel);
        if rel >= tol {
            failures.push((idx, rel));
        }
    }
    FactorizationReport {
        checked: omega_samples.len(),
        tolerance: tol,
        max_rel_error,
        failures,
    }
}

/// Random `ω` with dyadic rational entries `k/1024` in `[−1, 1]`, exactly
/// representable in `f64`.
pub fn random_omega_samples(p: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-1024i32, 1024).expect("valid range");
    (0..count)
        .map(|_| {
            (0..p)
                .map(|_| dist.sample(&mut rng) as f64 / 1024.0)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::curvature::derive_holonomy;

    #[test]
    fn sinhc_of_rotation_generator() {
        // X = θ J with J² = −I: sinhc(X) = (sin θ / θ) I, det = (sin θ/θ)²
        for theta in [0.1f64, 1.0, 2.5, 3.1] {
            let x = DMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]);
            let expected = (theta.sin() / theta).powi(2);
            assert!((det_sinhc(&x) - expected).abs() < 1e-13, "θ = {theta}");
        }
    }

    #[test]
    fn sinhc_of_diagonal() {
        let x = DMatrix::from_diagonal(&DVector::from_vec(vec![0.3, -2.0, 4.0]));
        let expected: f64 = [0.3f64, -2.0, 4.0].iter().map(|&v| v.sinh() / v).product();
        assert!((det_sinhc(&x) - expected).abs() / expected < 1e-13);
    }

    #[test]
    fn gauss_hermite_moments() {
        let (x, w) = gauss_hermite(10);
        let moment = |k: i32| -> f64 { x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum() };
        assert!((moment(0) - 1.0).abs() < 1e-13);
        assert!((moment(2) - 1.0).abs() < 1e-13);
        assert!((moment(4) - 3.0).abs() < 1e-12);
        assert!((moment(6) - 15.0).abs() < 1e-11);
    }

    #[test]
    fn flat_average_is_exactly_one() {
        let spec = builtin("flat4").unwrap();
        let hol = derive_holonomy(&spec).unwrap();
        for method in [Method::Quadrature, Method::MonteCarlo] {
            let est = numeric_average(&spec, &hol, 0.3, method, &NumericParams::default()).unwrap();
            assert_eq!(est.value, 1.0);
        }
    }

    #[test]
    fn rejects_non_positive_t() {
        let spec = builtin("S2").unwrap();
        let hol = derive_holonomy(&spec).unwrap();
        let err = numeric_average(
            &spec,
            &hol,
            0.0,
            Method::MonteCarlo,
            &NumericParams::default(),
        );
        assert!(matches!(err, Err(Error::NonPositiveT(_))));
    }

    #[test]
    fn quadrature_refused_above_three_dimensions() {
        let spec = builtin("S4").unwrap();
        let hol = derive_holonomy(&spec).unwrap();
        let err = numeric_average(
            &spec,
            &hol,
            0.1,
            Method::Quadrature,
            &NumericParams::default(),
        );
        assert!(matches!(err, Err(Error::QuadratureDimension(6))));
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let spec = builtin("S2").unwrap();
        let hol = derive_holonomy(&spec).unwrap();
        let params = NumericParams {
            samples: 25_000,
            seed: 7,
            ..NumericParams::default()
        };
        let a = numeric_average(&spec, &hol, 0.05, Method::MonteCarlo, &params).unwrap();
        let b = numeric_average(&spec, &hol, 0.05, Method::MonteCarlo, &params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluations, 25_000);
    }

    #[test]
    fn factorization_on_s2() {
        let hol = derive_holonomy(&builtin("S2").unwrap()).unwrap();
        let samples = random_omega_samples(1, 100, 1);
        let report = check_det_factorization(&hol, &samples, FACTORIZATION_TOL);
        assert!(report.passed(), "{report:?}");
        let flat = derive_holonomy(&builtin("flat2").unwrap()).unwrap();
        let report =
            check_det_factorization(&flat, &random_omega_samples(0, 3, 1), FACTORIZATION_TOL);
        assert!(report.passed());
    }
}
