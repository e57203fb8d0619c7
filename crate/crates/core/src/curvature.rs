//! Curvature data of a symmetric space and the Lie-algebraic structure it induces.
//!
//! The Riemann tensor of a compact symmetric space is stored in factored form,
//! `R_abcd = β_ik Eⁱ_ab Eᵏ_cd`, with `p` antisymmetric generators `Eⁱ`. From
//! that datum we derive the tangent representation of the holonomy algebra
//! `D_i`, its structure constants `F^j_ik`, and the adjoint representation
//! `C_A` of the isometry algebra on `T_xM ⊕ 𝔥`. Everything is exact.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{frac, rank, solve_in_span, QMatrix, Rational};
use crate::report::Check;

/// Raw curvature datum of a symmetric space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceSpec {
    pub name: String,
    /// Tangent dimension.
    pub n: usize,
    /// Holonomy dimension.
    pub p: usize,
    /// Frame metric `g_ab`.
    pub g: QMatrix,
    /// Holonomy metric `β_ik`.
    pub beta: QMatrix,
    /// Curvature generators `Eⁱ_ab`.
    pub e: Vec<QMatrix>,
}

impl SpaceSpec {
    /// Builds a datum and checks its type invariants.
    pub fn new(
        name: impl Into<String>,
        g: QMatrix,
        beta: QMatrix,
        e: Vec<QMatrix>,
    ) -> Result<Self> {
        let spec = SpaceSpec {
            name: name.into(),
            n: g.rows(),
            p: beta.rows(),
            g,
            beta,
            e,
        };
        spec.check_invariants()?;
        Ok(spec)
    }

    pub fn check_invariants(&self) -> Result<()> {
        let (n, p) = (self.n, self.p);
        if n == 0 {
            return Err(Error::InvalidSpec(
                "tangent dimension n must be positive".into(),
            ));
        }
        if p > n * (n - 1) / 2 {
            return Err(Error::InvalidSpec(format!(
                "p = {p} exceeds n(n-1)/2 = {}",
                n * (n - 1) / 2
            )));
        }
        if self.g.rows() != n || self.g.cols() != n {
            return Err(Error::InvalidSpec(format!("g must be {n}x{n}")));
        }
        if self.beta.rows() != p || self.beta.cols() != p {
            return Err(Error::InvalidSpec(format!("beta must be {p}x{p}")));
        }
        if self.e.len() != p {
            return Err(Error::InvalidSpec(format!(
                "expected {p} curvature generators, found {}",
                self.e.len()
            )));
        }
        if !self.g.is_positive_definite() {
            return Err(Error::InvalidSpec(
                "g must be symmetric with positive leading principal minors".into(),
            ));
        }
        if p > 0 && !self.beta.is_positive_definite() {
            return Err(Error::InvalidSpec(
                "beta must be symmetric with positive leading principal minors".into(),
            ));
        }
        for (i, e) in self.e.iter().enumerate() {
            if e.rows() != n || e.cols() != n {
                return Err(Error::InvalidSpec(format!("E[{i}] must be {n}x{n}")));
            }
            if let Some((a, b)) = e.antisymmetry_violation() {
                return Err(Error::InvalidSpec(format!(
                    "E[{i}] is not antisymmetric at ({a},{b})"
                )));
            }
        }
        let flat: Vec<Vec<Rational>> = self.e.iter().map(|m| m.as_slice().to_vec()).collect();
        let r = rank(&flat);
        if r < p {
            return Err(Error::InvalidSpec(format!(
                "curvature generators are linearly dependent (rank {r} < {p}): redundant holonomy generators"
            )));
        }
        Ok(())
    }

    pub fn is_flat(&self) -> bool {
        self.p == 0
    }
}

/// Holonomy and isometry algebra data derived from a [`SpaceSpec`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HolonomyRealization {
    pub n: usize,
    pub p: usize,
    /// Tangent representation `(D_i)^a_b`.
    pub d: Vec<QMatrix>,
    /// Adjoint representation `(F_i)^j_k = F^j_ik`.
    pub f: Vec<QMatrix>,
    /// Block-diagonal metric `γ_AB = diag(g, β)`.
    pub gamma: QMatrix,
    /// Adjoint generators of the isometry algebra, `(C_A)^B_C = C^B_AC`.
    pub c: Vec<QMatrix>,
}

impl HolonomyRealization {
    /// Structure constant `F^j_ik`.
    pub fn f_const(&self, j: usize, i: usize, k: usize) -> &Rational {
        &self.f[i][(j, k)]
    }

    /// Structure constant `C^A_BC`.
    pub fn c_const(&self, a: usize, b: usize, c: usize) -> &Rational {
        &self.c[b][(a, c)]
    }

    pub fn big_n(&self) -> usize {
        self.n + self.p
    }
}

/// Computes `D_i = −β_ik g⁻¹ Eᵏ`, the structure constants by exact linear
/// solve, and the adjoint generators of the isometry algebra.
pub fn derive_holonomy(spec: &SpaceSpec) -> Result<HolonomyRealization> {
    let (n, p) = (spec.n, spec.p);
    let g_inv = spec
        .g
        .inverse()
        .ok_or_else(|| Error::InvalidSpec("g is singular".into()))?;

    let g_inv_e: Vec<QMatrix> = spec.e.iter().map(|e| g_inv.mul(e)).collect();
    let d: Vec<QMatrix> = (0..p)
        .map(|i| {
            let mut acc = QMatrix::zeros(n, n);
            for (k, ge) in g_inv_e.iter().enumerate() {
                let b = &spec.beta[(i, k)];
                if !b.is_zero() {
                    acc = acc.add(&ge.scale(b));
                }
            }
            acc.scale(&-Rational::one())
        })
        .collect();

    let basis: Vec<Vec<Rational>> = d.iter().map(|m| m.as_slice().to_vec()).collect();
    let r = rank(&basis);
    if r < p {
        return Err(Error::DegenerateBasis { rank: r, p });
    }

    let mut f = vec![QMatrix::zeros(p, p); p];
    for i in 0..p {
        for k in (i + 1)..p {
            let comm = d[i].commutator(&d[k]);
            let coeffs = solve_in_span(&basis, comm.as_slice())
                .ok_or(Error::CommutatorOutsideSpan { i, k })?;
            for (j, x) in coeffs.into_iter().enumerate() {
                f[k][(j, i)] = -x.clone();
                f[i][(j, k)] = x;
            }
        }
    }

    let big_n = n + p;
    let mut gamma = QMatrix::zeros(big_n, big_n);
    gamma.set_block(0, 0, &spec.g);
    gamma.set_block(n, n, &spec.beta);

    let mut c = Vec::with_capacity(big_n);
    for a in 0..n {
        let mut m = QMatrix::zeros(big_n, big_n);
        for i in 0..p {
            for b in 0..n {
                // (C_a)^b_i = −D^b_ia,  (C_a)^i_b = Eⁱ_ab
                m[(b, n + i)] = -d[i][(b, a)].clone();
                m[(n + i, b)] = spec.e[i][(a, b)].clone();
            }
        }
        c.push(m);
    }
    for i in 0..p {
        let mut m = QMatrix::zeros(big_n, big_n);
        m.set_block(0, 0, &d[i]);
        m.set_block(n, n, &f[i]);
        c.push(m);
    }

    Ok(HolonomyRealization {
        n,
        p,
        d,
        f,
        gamma,
        c,
    })
}

/// Pass/fail list of the algebraic identities a symmetric-space datum must satisfy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_names(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const CHECK_HOLONOMY: &str = "holonomy_closure";
pub const CHECK_INVARIANCE: &str = "curvature_invariance";
pub const CHECK_INTEGRABILITY: &str = "integrability";
pub const CHECK_JACOBI: &str = "jacobi_identity";
pub const CHECK_ADJOINT: &str = "adjoint_commutators";
pub const CHECK_RIEMANN: &str = "riemann_symmetries";

/// Runs every exact identity check. Failures are report entries, never errors.
pub fn validate_symmetric_space(spec: &SpaceSpec, hol: &HolonomyRealization) -> ValidationReport {
    let riemann = Riemann::reconstruct(spec);
    let checks = vec![
        check_holonomy(spec, hol),
        check_invariance(spec, hol),
        check_integrability(spec, &riemann),
        check_jacobi(hol),
        check_adjoint(hol),
        check_riemann_symmetries(&riemann),
    ];
    ValidationReport { checks }
}

fn verdict(name: &str, first_failure: Option<String>, ok_detail: &str) -> Check {
    match first_failure {
        None => Check::new(name, true, ok_detail),
        Some(detail) => Check::new(name, false, detail),
    }
}

fn check_holonomy(spec: &SpaceSpec, hol: &HolonomyRealization) -> Check {
    let fail = (|| {
        if hol.n != spec.n || hol.p != spec.p || hol.d.len() != spec.p || hol.f.len() != spec.p {
            return Some("realization dimensions do not match the datum".to_string());
        }
        let Some(g_inv) = spec.g.inverse() else {
            return Some("g is singular".to_string());
        };
        for i in 0..spec.p {
            let mut expected = QMatrix::zeros(spec.n, spec.n);
            for k in 0..spec.p {
                expected = expected.add(&g_inv.mul(&spec.e[k]).scale(&spec.beta[(i, k)]));
            }
            if hol.d[i] != expected.scale(&-Rational::one()) {
                return Some(format!("D[{i}] does not match -beta_ik g^-1 E^k"));
            }
            if !hol.d[i].trace().is_zero() {
                return Some(format!("D[{i}] is not traceless"));
            }
        }
        for i in 0..spec.p {
            for k in 0..spec.p {
                let mut rhs = QMatrix::zeros(spec.n, spec.n);
                for j in 0..spec.p {
                    let fj = hol.f_const(j, i, k);
                    if fj != &-hol.f_const(j, k, i).clone() {
                        return Some(format!(
                            "F^{j}_{i}{k} is not antisymmetric in its lower pair"
                        ));
                    }
                    if !fj.is_zero() {
                        rhs = rhs.add(&hol.d[j].scale(fj));
                    }
                }
                if hol.d[i].commutator(&hol.d[k]) != rhs {
                    return Some(format!("[D_{i}, D_{k}] != F^j_{i}{k} D_j"));
                }
            }
        }
        None
    })();
    verdict(
        CHECK_HOLONOMY,
        fail,
        "D traceless, F antisymmetric, [D_i,D_k] = F^j_ik D_j",
    )
}

/// `Eⁱ_bc D^c_ka − Eⁱ_ac D^c_kb = Eʲ_ab Fⁱ_jk`: the curvature is invariant under its holonomy.
fn check_invariance(spec: &SpaceSpec, hol: &HolonomyRealization) -> Check {
    let (n, p) = (spec.n, spec.p);
    let mut fail = None;
    'outer: for i in 0..p {
        for k in 0..p {
            for a in 0..n {
                for b in 0..n {
                    let mut lhs = Rational::zero();
                    for c in 0..n {
                        lhs += &spec.e[i][(b, c)] * &hol.d[k][(c, a)];
                        lhs -= &spec.e[i][(a, c)] * &hol.d[k][(c, b)];
                    }
                    let mut rhs = Rational::zero();
                    for j in 0..p {
                        rhs += &spec.e[j][(a, b)] * hol.f_const(i, j, k);
                    }
                    if lhs != rhs {
                        fail = Some(format!(
                            "mismatch at i={i}, k={k}, a={a}, b={b}: lhs {lhs}, rhs {rhs}"
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    verdict(
        CHECK_INVARIANCE,
        fail,
        "E^i_bc D^c_ka - E^i_ac D^c_kb = E^j_ab F^i_jk",
    )
}

fn check_integrability(spec: &SpaceSpec, riemann: &Riemann) -> Check {
    let n = spec.n;
    let Some(g_inv) = spec.g.inverse() else {
        return Check::new(CHECK_INTEGRABILITY, false, "g is singular");
    };
    let up = riemann.raise_first(&g_inv);
    // (R·R)[f,g,x,y,z,w] = Σ_e R_fgex R^e_yzw
    let rr = |f: usize, g: usize, x: usize, y: usize, z: usize, w: usize| -> Rational {
        let mut acc = Rational::zero();
        for e in 0..n {
            let a = riemann.get(f, g, e, x);
            if !a.is_zero() {
                acc += a * up.get(e, y, z, w);
            }
        }
        acc
    };
    let mut fail = None;
    'outer: for f in 0..n {
        for g in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let v = rr(f, g, a, b, c, d) - rr(f, g, b, a, c, d)
                                + rr(f, g, c, d, a, b)
                                - rr(f, g, d, c, a, b);
                            if !v.is_zero() {
                                fail = Some(format!(
                                    "nonzero at (f,g,a,b,c,d) = ({f},{g},{a},{b},{c},{d}): {v}"
                                ));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    verdict(
        CHECK_INTEGRABILITY,
        fail,
        "curvature commutes with its own action",
    )
}

fn check_jacobi(hol: &HolonomyRealization) -> Check {
    let big_n = hol.big_n();
    let cc = |a, b, c| hol.c_const(a, b, c);
    let mut fail = None;
    'outer: for a in 0..big_n {
        for b in 0..big_n {
            for c in 0..big_n {
                for f in 0..big_n {
                    let mut acc = Rational::zero();
                    for e in 0..big_n {
                        let x = cc(e, a, b);
                        if !x.is_zero() {
                            acc += x * cc(f, c, e);
                        }
                        let y = cc(e, b, c);
                        if !y.is_zero() {
                            acc += y * cc(f, a, e);
                        }
                        let z = cc(e, c, a);
                        if !z.is_zero() {
                            acc += z * cc(f, b, e);
                        }
                    }
                    if !acc.is_zero() {
                        fail = Some(format!("violated at (A,B,C,F) = ({a},{b},{c},{f}): {acc}"));
                        break 'outer;
                    }
                }
            }
        }
    }
    verdict(CHECK_JACOBI, fail, "C^E_AB C^F_CE + cyclic = 0")
}

fn check_adjoint(hol: &HolonomyRealization) -> Check {
    let big_n = hol.big_n();
    let mut fail = None;
    'outer: for a in 0..big_n {
        for b in (a + 1)..big_n {
            let mut rhs = QMatrix::zeros(big_n, big_n);
            for c in 0..big_n {
                let k = hol.c_const(c, a, b);
                if !k.is_zero() {
                    rhs = rhs.add(&hol.c[c].scale(k));
                }
            }
            if hol.c[a].commutator(&hol.c[b]) != rhs {
                fail = Some(format!("[C_{a}, C_{b}] != C^C_{a}{b} C_C"));
                break 'outer;
            }
        }
    }
    verdict(CHECK_ADJOINT, fail, "[C_A, C_B] = C^C_AB C_C")
}

fn check_riemann_symmetries(r: &Riemann) -> Check {
    verdict(
        CHECK_RIEMANN,
        r.symmetry_violation(),
        "antisymmetry, pair symmetry, first Bianchi",
    )
}

/// Rank-4 tensor with all indices lowered unless stated otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Riemann {
    pub n: usize,
    data: Vec<Rational>,
}

impl Riemann {
    /// `R_abcd = β_ik Eⁱ_ab Eᵏ_cd`.
    pub fn reconstruct(spec: &SpaceSpec) -> Self {
        let n = spec.n;
        let mut data = vec![Rational::zero(); n.pow(4)];
        for i in 0..spec.p {
            for k in 0..spec.p {
                let b = &spec.beta[(i, k)];
                if b.is_zero() {
                    continue;
                }
                for a in 0..n {
                    for bb in 0..n {
                        let x = &spec.e[i][(a, bb)];
                        if x.is_zero() {
                            continue;
                        }
                        let bx = b * x;
                        for c in 0..n {
                            for d in 0..n {
                                let y = &spec.e[k][(c, d)];
                                if !y.is_zero() {
                                    data[((a * n + bb) * n + c) * n + d] += &bx * y;
                                }
                            }
                        }
                    }
                }
            }
        }
        Riemann { n, data }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(n.pow(4));
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        data.push(f(a, b, c, d));
                    }
                }
            }
        }
        Riemann { n, data }
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> &Rational {
        let n = self.n;
        &self.data[((a * n + b) * n + c) * n + d]
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Riemann {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `R^a_bcd = g^ae R_ebcd`.
    pub fn raise_first(&self, g_inv: &QMatrix) -> Self {
        let n = self.n;
        Riemann::from_fn(n, |a, b, c, d| {
            (0..n).fold(Rational::zero(), |acc, e| {
                acc + &g_inv[(a, e)] * self.get(e, b, c, d)
            })
        })
    }

    pub fn symmetry_violation(&self) -> Option<String> {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let r = self.get(a, b, c, d);
                        if r != &-self.get(b, a, c, d).clone() {
                            return Some(format!("R_{a}{b}{c}{d} != -R_{b}{a}{c}{d}"));
                        }
                        if r != &-self.get(a, b, d, c).clone() {
                            return Some(format!("R_{a}{b}{c}{d} != -R_{a}{b}{d}{c}"));
                        }
                        if r != self.get(c, d, a, b) {
                            return Some(format!("R_{a}{b}{c}{d} != R_{c}{d}{a}{b}"));
                        }
                        let bianchi = r + self.get(a, c, d, b) + self.get(a, d, b, c);
                        if !bianchi.is_zero() {
                            return Some(format!(
                                "first Bianchi identity fails at ({a},{b},{c},{d})"
                            ));
                        }
                    }
                }
            }
        }
        None
    }
}

/// Curvature contractions of a validated datum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureReport {
    pub riemann: Riemann,
    pub ricci: QMatrix,
    /// Scalar curvature `R`.
    pub scalar: Rational,
    /// Scalar curvature of the holonomy group, `R_H = −¼ β^ik F^m_il F^l_km`.
    pub holonomy_scalar: Rational,
    /// Scalar curvature of the isometry group, `R_G = −¼ γ^AB C^C_AD C^D_BC`.
    pub isometry_scalar: Rational,
}

/// `R_abcd`, Ricci, `R`, `R_H` and `R_G`. `R_G` is computed from its definition
/// and compared against `¾R + R_H`.
pub fn curvature_scalars(spec: &SpaceSpec, hol: &HolonomyRealization) -> Result<CurvatureReport> {
    let n = spec.n;
    let g_inv = spec
        .g
        .inverse()
        .ok_or_else(|| Error::InvalidSpec("g is singular".into()))?;
    let riemann = Riemann::reconstruct(spec);

    // R_ab = R^c_acb = g^cd R_dacb
    let ricci = QMatrix::from_fn(n, n, |a, b| {
        let mut acc = Rational::zero();
        for c in 0..n {
            for d in 0..n {
                let gi = &g_inv[(c, d)];
                if !gi.is_zero() {
                    acc += gi * riemann.get(d, a, c, b);
                }
            }
        }
        acc
    });
    let scalar = g_inv.trace_of_product(&ricci);

    let holonomy_scalar = if spec.p == 0 {
        Rational::zero()
    } else {
        let beta_inv = spec
            .beta
            .inverse()
            .ok_or_else(|| Error::InvalidSpec("beta is singular".into()))?;
        killing_contraction(&beta_inv, &hol.f)
    };

    let gamma_inv = hol
        .gamma
        .inverse()
        .ok_or_else(|| Error::InvalidSpec("gamma is singular".into()))?;
    let isometry_scalar = killing_contraction(&gamma_inv, &hol.c);

    let expected = frac(3, 4) * &scalar + &holonomy_scalar;
    if isometry_scalar != expected {
        return Err(Error::InternalInconsistency(format!(
            "R_G = {isometry_scalar} from the isometry algebra, but 3R/4 + R_H = {expected}"
        )));
    }

    Ok(CurvatureReport {
        riemann,
        ricci,
        scalar,
        holonomy_scalar,
        isometry_scalar,
    })
}

/// `−¼ h^AB tr(X_A X_B)` for adjoint generators `X_A` and inverse metric `h^AB`.
fn killing_contraction(metric_inv: &QMatrix, gens: &[QMatrix]) -> Rational {
    let mut acc = Rational::zero();
    for a in 0..gens.len() {
        for b in 0..gens.len() {
            let h = &metric_inv[(a, b)];
            if !h.is_zero() {
                acc += h * gens[a].trace_of_product(&gens[b]);
            }
        }
    }
    -acc * frac(1, 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn s2() -> SpaceSpec {
        SpaceSpec::new(
            "S2",
            QMatrix::identity(2),
            QMatrix::identity(1),
            vec![QMatrix::from_i64(&[&[0, 1], &[-1, 0]])],
        )
        .unwrap()
    }

    #[test]
    fn s2_holonomy() {
        let hol = derive_holonomy(&s2()).unwrap();
        assert_eq!(hol.d[0], QMatrix::from_i64(&[&[0, -1], &[1, 0]]));
        assert!(hol.f[0].is_zero());
        assert_eq!(hol.c.len(), 3);
        assert_eq!(hol.gamma, QMatrix::identity(3));
    }

    #[test]
    fn s2_scalars() {
        let spec = s2();
        let hol = derive_holonomy(&spec).unwrap();
        assert!(validate_symmetric_space(&spec, &hol).passed());
        let c = curvature_scalars(&spec, &hol).unwrap();
        assert_eq!(c.scalar, int(2));
        assert_eq!(c.holonomy_scalar, int(0));
        assert_eq!(c.isometry_scalar, frac(3, 2));
        assert_eq!(c.ricci, QMatrix::identity(2));
    }

    #[test]
    fn flat_is_degenerate_but_valid() {
        let spec =
            SpaceSpec::new("flat2", QMatrix::identity(2), QMatrix::zeros(0, 0), vec![]).unwrap();
        let hol = derive_holonomy(&spec).unwrap();
        assert!(hol.d.is_empty() && hol.f.is_empty());
        assert_eq!(hol.c.len(), 2);
        assert!(hol.c.iter().all(QMatrix::is_zero));
        assert!(validate_symmetric_space(&spec, &hol).passed());
        let c = curvature_scalars(&spec, &hol).unwrap();
        assert_eq!(c.scalar, int(0));
        assert_eq!(c.isometry_scalar, int(0));
    }

    #[test]
    fn rejects_bad_generators() {
        let not_anti = QMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let err = SpaceSpec::new(
            "x",
            QMatrix::identity(2),
            QMatrix::identity(1),
            vec![not_anti],
        )
        .unwrap_err();
        assert!(
            err.to_string().contains("E[0] is not antisymmetric"),
            "{err}"
        );

        let e = QMatrix::from_i64(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]);
        let err = SpaceSpec::new(
            "x",
            QMatrix::identity(3),
            QMatrix::identity(2),
            vec![e.clone(), e.scale(&int(2))],
        )
        .unwrap_err();
        assert!(err.to_string().contains("linearly dependent"), "{err}");

        let err = SpaceSpec::new(
            "x",
            QMatrix::identity(2),
            QMatrix::from_i64(&[&[-1]]),
            vec![QMatrix::from_i64(&[&[0, 1], &[-1, 0]])],
        )
        .unwrap_err();
        assert!(err.to_string().contains("beta"), "{err}");
    }

    #[test]
    fn commutator_outside_span() {
        // two of the three so(3) generators do not close
        let e12 = QMatrix::from_i64(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 0]]);
        let e13 = QMatrix::from_i64(&[&[0, 0, 1], &[0, 0, 0], &[-1, 0, 0]]);
        let spec = SpaceSpec::new(
            "x",
            QMatrix::identity(3),
            QMatrix::identity(2),
            vec![e12, e13],
        )
        .unwrap();
        assert!(matches!(
            derive_holonomy(&spec),
            Err(Error::CommutatorOutsideSpan { i: 0, k: 1 })
        ));
    }

    #[test]
    fn riemann_symmetry_detector() {
        let bad = Riemann::from_fn(2, |a, b, c, d| {
            if (a, b, c, d) == (0, 1, 0, 1) {
                int(1)
            } else {
                int(0)
            }
        });
        assert!(bad.symmetry_violation().is_some());
    }
}
