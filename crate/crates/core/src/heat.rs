//! Heat kernel coefficients `a_k` and their cross-checks.
//!
//! The pipeline is derive holonomy → expand the log-integrand → exponentiate
//! with the `exp{(R/8 + R_H/6)t}` prefactor → Gaussian-average term by term.
//! The coefficients are reported with `(4πt)^{-n/2}` factored out.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num::{Signed, Zero};

use crate::catalog::decompose;
use crate::curvature::{
    curvature_scalars, derive_holonomy, validate_symmetric_space, CurvatureReport,
    HolonomyRealization, Riemann, SpaceSpec,
};
use crate::error::{Error, Result};
use crate::gaussian::average;
use crate::numeric::{
    check_det_factorization, numeric_average, random_omega_samples, Method, NumericParams,
    FACTORIZATION_TOL,
};
use crate::rational::{format_rational, frac, to_f64, QMatrix, Rational};
use crate::report::Check;
use crate::series::{
    exponentiate_with_prefactor, integrand_log_expansion, log_sinh_ratio_series,
    log_sinh_ratio_series_formal, ExpansionBudget, TSeries,
};

#[derive(Clone, Debug)]
pub struct HeatReport {
    pub space: String,
    pub order: usize,
    /// `a_0..=a_K`.
    pub coefficients: Vec<Rational>,
    pub checks: Vec<Check>,
    pub validation: Vec<Check>,
    pub elapsed: Duration,
}

impl HeatReport {
    pub fn passed(&self) -> bool {
        self.validation.iter().chain(&self.checks).all(|c| c.pass)
    }

    pub fn series(&self) -> TSeries {
        TSeries::from_coeffs(self.coefficients.clone())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// A datum with its derived algebra, validated and ready for the pipeline.
#[derive(Clone, Debug)]
pub struct PreparedSpace {
    pub spec: SpaceSpec,
    pub hol: HolonomyRealization,
    pub curvature: CurvatureReport,
    pub validation: Vec<Check>,
}

impl PreparedSpace {
    pub fn new(spec: &SpaceSpec) -> Result<Self> {
        let hol = derive_holonomy(spec)?;
        let report = validate_symmetric_space(spec, &hol);
        if !report.passed() {
            let msg = report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| format!("{}: {}", c.name, c.detail))
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Error::Validation(msg));
        }
        let curvature = curvature_scalars(spec, &hol)?;
        Ok(PreparedSpace {
            spec: spec.clone(),
            hol,
            curvature,
            validation: report.checks,
        })
    }

    pub fn beta_inv(&self) -> QMatrix {
        self.spec
            .beta
            .inverse()
            .expect("beta validated positive definite")
    }

    /// Exact `a_0..=a_K`.
    pub fn coefficients(&self, order: usize, budget: ExpansionBudget) -> Result<TSeries> {
        let log_integrand = integrand_log_expansion(&self.hol, order, budget)?;
        let integrand = exponentiate_with_prefactor(
            &log_integrand,
            &self.curvature.scalar,
            &self.curvature.holonomy_scalar,
            order,
        );
        Ok(average(&integrand, &self.beta_inv()))
    }
}

/// Runs the full pipeline on a datum that must pass validation.
pub fn heat_coefficients(
    spec: &SpaceSpec,
    order: usize,
    budget: ExpansionBudget,
) -> Result<HeatReport> {
    let start = Instant::now();
    let prepared = PreparedSpace::new(spec)?;
    let series = prepared.coefficients(order, budget)?;
    Ok(HeatReport {
        space: spec.name.clone(),
        order,
        coefficients: series.into_coeffs(),
        checks: Vec::new(),
        validation: prepared.validation,
        elapsed: start.elapsed(),
    })
}

/// Local coefficients from curvature contractions, with `ΔR = 0`:
/// `a₁ = R/6`, `a₂ = R²/72 − Ric²/180 + Riem²/180`.
pub fn gilkey_reference(spec: &SpaceSpec, curv: &CurvatureReport) -> (Rational, Rational) {
    let n = spec.n;
    let gi = spec.g.inverse().expect("g validated positive definite");
    let r = &curv.scalar;

    // R_ab R^ab
    let ric_up = gi.mul(&curv.ricci).mul(&gi);
    let ric_sq = curv.ricci.trace_of_product(&ric_up.transpose());

    // R_abcd R^abcd, raising one index at a time
    let mut t = curv.riemann.clone();
    for _ in 0..4 {
        t = rotate_and_raise(&t, &gi);
    }
    let mut riem_sq = Rational::zero();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let x = curv.riemann.get(a, b, c, d);
                    if !x.is_zero() {
                        riem_sq += x * t.get(a, b, c, d);
                    }
                }
            }
        }
    }

    let a1 = r * frac(1, 6);
    let a2 = r * r * frac(1, 72) - ric_sq * frac(1, 180) + riem_sq * frac(1, 180);
    (a1, a2)
}

/// `T'_{bcd}{}^{a} = g^{ae} T_{ebcd}` stored with the raised slot moved last,
/// so four applications raise every index and restore the order.
fn rotate_and_raise(t: &Riemann, g_inv: &QMatrix) -> Riemann {
    let n = t.n;
    Riemann::from_fn(n, |b, c, d, a| {
        (0..n).fold(Rational::zero(), |acc, e| {
            let gi = &g_inv[(a, e)];
            if gi.is_zero() {
                acc
            } else {
                acc + gi * t.get(e, b, c, d)
            }
        })
    })
}

/// Cauchy convolution of coefficient lists, `a_k(M₁×M₂) = Σ_{i+j=k} a_i(M₁) a_j(M₂)`.
pub fn convolve(factors: &[Vec<Rational>], order: usize) -> Result<Vec<Rational>> {
    let mut acc = TSeries::one(order);
    for f in factors {
        if f.len() < order + 1 {
            return Err(Error::OrderMismatch {
                have: f.len().saturating_sub(1),
                want: order,
            });
        }
        acc = acc.mul(&TSeries::from_coeffs(f[..=order].to_vec()));
    }
    Ok(acc.into_coeffs())
}

pub fn product_factorize(reports: &[HeatReport], order: usize) -> Result<Vec<Rational>> {
    let lists: Vec<Vec<Rational>> = reports.iter().map(|r| r.coefficients.clone()).collect();
    convolve(&lists, order)
}

fn gamma_half_integer(twice: u32) -> f64 {
    // Γ(twice/2) for twice ≥ 1
    if twice.is_multiple_of(2) {
        (1..twice / 2).map(f64::from).product()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while (2.0 * x) as u32 != twice {
            g *= x;
            x += 1.0;
        }
        g
    }
}

pub fn sphere_volume(n: usize) -> f64 {
    2.0 * PI.powf((n as f64 + 1.0) / 2.0) / gamma_half_integer(n as u32 + 1)
}

/// Heat kernel diagonal of the unit round `Sⁿ` from its spectrum,
/// `Vol⁻¹ Σ_l mult(l) e^{−t l(l+n−1)}`.
pub fn sphere_spectral_trace(n: usize, t: f64) -> Result<f64> {
    if !(2..=6).contains(&n) {
        return Err(Error::InvalidSpec(format!(
            "sphere spectral oracle supports n in 2..=6, got {n}"
        )));
    }
    constant_curvature_spectral_trace(n, 1.0, t)
}

/// As [`sphere_spectral_trace`] for the sphere of sectional curvature `κ`:
/// eigenvalues scale by `κ`, volume by `κ^{-n/2}`.
pub fn constant_curvature_spectral_trace(n: usize, kappa: f64, t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::NonPositiveT(t));
    }
    let nf = n as f64;
    let mut binom = 1.0; // C(l+n-2, l)
    let mut total = 0.0;
    let mut prev = f64::INFINITY;
    for l in 0u64.. {
        let lf = l as f64;
        if l > 0 {
            binom *= (lf + nf - 2.0) / lf;
        }
        let mult = (2.0 * lf + nf - 1.0) / (nf - 1.0) * binom;
        let term = mult * (-t * kappa * lf * (lf + nf - 1.0)).exp();
        total += term;
        if term < prev && term < 1e-16 * total {
            break;
        }
        prev = term;
    }
    Ok(total * kappa.powf(nf / 2.0) / sphere_volume(n))
}

/// Fits `(4πt)^{n/2} U(t) ≈ a₀ + a₁t + a₂t² + a₃t³` at four small `t`, to
/// validate the spectrum and multiplicity formulas against `1` and `n(n−1)/6`.
pub fn spectral_leading_fit(n: usize) -> Result<(f64, f64)> {
    let ts: [f64; 4] = [0.004, 0.008, 0.012, 0.016];
    let vander = nalgebra::DMatrix::from_fn(4, 4, |r, c| ts[r].powi(c as i32));
    let mut y = nalgebra::DVector::zeros(4);
    for (i, &t) in ts.iter().enumerate() {
        y[i] = sphere_spectral_trace(n, t)? * (4.0 * PI * t).powf(n as f64 / 2.0);
    }
    let coef = vander
        .lu()
        .solve(&y)
        .ok_or_else(|| Error::InternalInconsistency("singular fit".into()))?;
    Ok((coef[0], coef[1]))
}

/// Sectional curvature `κ` when `R_abcd = κ (g_ac g_bd − g_ad g_bc)` with `κ > 0`.
pub fn constant_curvature(spec: &SpaceSpec, curv: &CurvatureReport) -> Option<Rational> {
    let n = spec.n;
    if n < 2 {
        return None;
    }
    let kappa = &curv.scalar / Rational::from_integer((n * (n - 1)).into());
    if !kappa.is_positive() {
        return None;
    }
    let g = &spec.g;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let model = &kappa * (&g[(a, c)] * &g[(b, d)] - &g[(a, d)] * &g[(b, c)]);
                    if curv.riemann.get(a, b, c, d) != &model {
                        return None;
                    }
                }
            }
        }
    }
    Some(kappa)
}

#[derive(Clone, Debug)]
pub struct CompareOptions {
    pub budget: ExpansionBudget,
    pub numeric: NumericParams,
    /// `None` picks quadrature for `p ≤ 3` and Monte Carlo otherwise.
    pub method: Option<Method>,
    pub spectral_rel_tol: f64,
    pub factorization_samples: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            budget: ExpansionBudget::default(),
            numeric: NumericParams::default(),
            method: None,
            spectral_rel_tol: 1e-3,
            factorization_samples: 100,
        }
    }
}

pub fn default_method(p: usize) -> Method {
    if p <= 3 {
        Method::Quadrature
    } else {
        Method::MonteCarlo
    }
}

/// `|a_K| t^K`, the last retained term, used as the truncation remainder heuristic.
pub fn remainder_heuristic(coeffs: &[Rational], t: f64) -> f64 {
    match coeffs.len() {
        0 | 1 => 0.0,
        len => to_f64(&coeffs[len - 1]).abs() * t.powi(len as i32 - 1),
    }
}

/// Computes `a_0..a_K` and runs every applicable oracle. Failures, including
/// pipeline errors, become report entries.
pub fn compare(
    spec: &SpaceSpec,
    order: usize,
    t_grid: &[f64],
    opts: &CompareOptions,
) -> HeatReport {
    let start = Instant::now();
    let mut report = HeatReport {
        space: spec.name.clone(),
        order,
        coefficients: Vec::new(),
        checks: Vec::new(),
        validation: Vec::new(),
        elapsed: Duration::ZERO,
    };
    let prepared = match PreparedSpace::new(spec) {
        Ok(p) => p,
        Err(e) => {
            report
                .validation
                .push(Check::new("validation", false, e.to_string()));
            report.elapsed = start.elapsed();
            return report;
        }
    };
    report.validation = prepared.validation.clone();
    let checks = &mut report.checks;

    match prepared.coefficients(order, opts.budget) {
        Ok(series) => report.coefficients = series.into_coeffs(),
        Err(e) => {
            checks.push(Check::new("pipeline", false, e.to_string()));
            report.elapsed = start.elapsed();
            return report;
        }
    }
    let a = &report.coefficients;
    let curv = &prepared.curvature;

    checks.push(Check::new(
        "a0",
        a[0] == Rational::from_integer(1.into()),
        format!("a0 = {}", format_rational(&a[0])),
    ));

    let (g1, g2) = gilkey_reference(spec, curv);
    if order >= 1 {
        checks.push(Check::new(
            "a1_vs_curvature",
            a[1] == g1,
            format!(
                "pipeline {}, R/6 = {}",
                format_rational(&a[1]),
                format_rational(&g1)
            ),
        ));
    }
    if order >= 2 {
        checks.push(Check::new(
            "a2_vs_curvature",
            a[2] == g2,
            format!(
                "pipeline {}, contraction {}",
                format_rational(&a[2]),
                format_rational(&g2)
            ),
        ));
    }

    let rate = &curv.scalar * frac(1, 8) + &curv.holonomy_scalar * frac(1, 6);
    let rg_rate = &curv.isometry_scalar * frac(1, 6);
    let at_zero = integrand_log_expansion(&prepared.hol, order, opts.budget).map(|l| {
        exponentiate_with_prefactor(&l, &curv.scalar, &curv.holonomy_scalar, order).at_omega_zero()
    });
    let prefactor_ok = rate == rg_rate
        && at_zero
            .as_ref()
            .is_ok_and(|s| *s == TSeries::exp_linear(&rg_rate, order));
    checks.push(Check::new(
        "prefactor_identity",
        prefactor_ok,
        format!(
            "R/8 + R_H/6 = {}, R_G/6 = {}",
            format_rational(&rate),
            format_rational(&rg_rate)
        ),
    ));

    checks.push(Check::new(
        "log_sinh_series",
        log_sinh_ratio_series(order.max(1)) == log_sinh_ratio_series_formal(order.max(1)),
        "Bernoulli closed form vs formal logarithm",
    ));

    let samples = random_omega_samples(spec.p, opts.factorization_samples, opts.numeric.seed);
    let fact = check_det_factorization(&prepared.hol, &samples, FACTORIZATION_TOL);
    checks.push(Check::new(
        "det_factorization",
        fact.passed(),
        format!(
            "{} samples, max relative error {:.3e}",
            fact.checked, fact.max_rel_error
        ),
    ));

    let series = TSeries::from_coeffs(a.clone());
    let method = opts.method.unwrap_or_else(|| default_method(spec.p));
    for &t in t_grid {
        let name = format!("numeric_average(t={t})");
        let exact = series.eval_f64(t);
        let remainder = remainder_heuristic(a, t);
        match numeric_average(spec, &prepared.hol, t, method, &opts.numeric) {
            Ok(est) => {
                let tol = 3.0 * est.std_error + remainder + est.truncation_bound + 1e-12;
                let diff = (exact - est.value).abs();
                checks.push(Check::new(
                    name,
                    diff <= tol,
                    format!(
                        "series {exact:.16e}, numeric {:.16e} +- {:.3e}, |diff| {diff:.3e} <= {tol:.3e}",
                        est.value, est.std_error
                    ),
                ));
            }
            Err(e) => checks.push(Check::new(name, false, e.to_string())),
        }
    }

    if let Some(kappa) = constant_curvature(spec, curv).filter(|_| (2..=6).contains(&spec.n)) {
        let n = spec.n;
        let kappa = to_f64(&kappa);
        for &t in t_grid {
            let name = format!("spectral(t={t})");
            match constant_curvature_spectral_trace(n, kappa, t) {
                Ok(oracle) => {
                    let asym = (4.0 * PI * t).powf(-(n as f64) / 2.0) * series.eval_f64(t);
                    let rel = (asym - oracle).abs() / oracle.abs();
                    checks.push(Check::new(
                        name,
                        rel < opts.spectral_rel_tol,
                        format!(
                            "series {asym:.16e}, spectrum {oracle:.16e}, relative error {rel:.3e}"
                        ),
                    ));
                }
                Err(e) => checks.push(Check::new(name, false, e.to_string())),
            }
        }
    }

    let factors = decompose(spec);
    if factors.len() > 1 {
        let lists: Result<Vec<Vec<Rational>>> = factors
            .iter()
            .map(|f| {
                PreparedSpace::new(f)?
                    .coefficients(order, opts.budget)
                    .map(TSeries::into_coeffs)
            })
            .collect();
        let check = match lists.and_then(|l| convolve(&l, order)) {
            Ok(conv) => Check::new(
                "product_factorization",
                &conv == a,
                format!(
                    "{} factors; convolution {}",
                    factors.len(),
                    join_rationals(&conv)
                ),
            ),
            Err(e) => Check::new("product_factorization", false, e.to_string()),
        };
        checks.push(check);
    }

    report.elapsed = start.elapsed();
    report
}

pub fn join_rationals(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("[{}]", parts.join(", "))
}
