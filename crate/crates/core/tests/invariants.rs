use num::{BigInt, One, Zero};
use proptest::prelude::*;

use heatgen::catalog::{builtin, from_json, to_json};
use heatgen::curvature::SpaceSpec;
use heatgen::gaussian::{average, fock_moment, wick_moment, MomentKey};
use heatgen::heat::{convolve, PreparedSpace};
use heatgen::rational::{frac, int};
use heatgen::series::{power_trace_polynomial, ExpansionBudget, OmegaPolynomial, TSeries};
use heatgen::{QMatrix, Rational};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| frac(n, d))
}

fn small_matrix(dim: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(small_rational(), dim * dim)
        .prop_map(move |v| QMatrix::from_fn(dim, dim, |r, c| v[r * dim + c].clone()))
}

/// Symmetric, strictly diagonally dominant with positive diagonal.
fn spd(dim: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec((-2i64..=2, 1i64..=3), dim * dim).prop_map(move |v| {
        QMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                int(dim as i64 + 1)
            } else {
                let (a, b) = v[r.min(c) * dim + r.max(c)];
                frac(a, b * 2)
            }
        })
    })
}

fn pow_int(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_polynomial_evaluates_to_matrix_power_trace(
        mats in prop::collection::vec(small_matrix(3), 1..=3),
        omega in prop::collection::vec(-3i64..=3, 3),
        len in 0usize..=5,
    ) {
        let k = mats.len();
        let poly = power_trace_polynomial(&mats, len);
        let at: Rational = poly
            .iter()
            .map(|(exps, c)| {
                exps.iter().enumerate().fold(c.clone(), |acc, (i, &e)| acc * pow_int(&int(omega[i]), e))
            })
            .sum();
        let combo = (0..k).fold(QMatrix::zeros(3, 3), |acc, i| acc.add(&mats[i].scale(&int(omega[i]))));
        let power = (0..len).fold(QMatrix::identity(3), |acc, _| acc.mul(&combo));
        prop_assert_eq!(at, power.trace());
    }

    #[test]
    fn wick_and_fock_agree(beta_inv in spd(3), idx in prop::collection::vec(0usize..3, 0..=6)) {
        let key = MomentKey::new(idx);
        prop_assert_eq!(wick_moment(&key, &beta_inv), fock_moment(&key, &beta_inv));
    }

    #[test]
    fn moments_are_relabelling_invariant(
        beta_inv in spd(3),
        idx in prop::collection::vec(0usize..3, 0..=6),
        perm in Just([0usize, 1, 2]).prop_shuffle(),
    ) {
        let permuted = QMatrix::from_fn(3, 3, |r, c| beta_inv[(perm[r], perm[c])].clone());
        let inverse: Vec<usize> = (0..3).map(|i| perm.iter().position(|&p| p == i).unwrap()).collect();
        let relabelled = MomentKey::new(idx.iter().map(|&i| inverse[i]).collect());
        prop_assert_eq!(
            wick_moment(&MomentKey::new(idx.clone()), &beta_inv),
            wick_moment(&relabelled, &permuted)
        );
    }

    #[test]
    fn moments_scale_homogeneously(beta_inv in spd(2), idx in prop::collection::vec(0usize..2, 0..=6), c in 1i64..=5) {
        let key = MomentKey::new(idx);
        let scaled = wick_moment(&key, &beta_inv.scale(&int(c)));
        let expect = wick_moment(&key, &beta_inv) * pow_int(&int(c), key.degree() as u32 / 2);
        prop_assert_eq!(scaled, expect);
    }

    #[test]
    fn average_is_linear(
        terms_a in prop::collection::vec((0usize..=2, 0u32..=4, 0u32..=4, small_rational()), 0..6),
        terms_b in prop::collection::vec((0usize..=2, 0u32..=4, 0u32..=4, small_rational()), 0..6),
        s in small_rational(),
        beta_inv in spd(2),
    ) {
        let build = |terms: &[(usize, u32, u32, Rational)]| {
            let mut p = OmegaPolynomial::zero(2, 2);
            for (grade, e0, e1, c) in terms {
                p.add_term(*grade, vec![*e0, *e1], c.clone());
            }
            p
        };
        let (a, b) = (build(&terms_a), build(&terms_b));
        let lhs = average(&a.add(&b.scale(&s)), &beta_inv);
        let rhs = average(&a, &beta_inv).add(&average(&b, &beta_inv).scale(&s));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn series_log_inverts_exp(tail in prop::collection::vec(small_rational(), 1..=5)) {
        let mut coeffs = vec![Rational::zero()];
        coeffs.extend(tail);
        let s = TSeries::from_coeffs(coeffs);
        prop_assert_eq!(s.exp().log(), s);
    }

    #[test]
    fn convolution_is_commutative(
        a in prop::collection::vec(small_rational(), 4),
        b in prop::collection::vec(small_rational(), 4),
    ) {
        prop_assert_eq!(convolve(&[a.clone(), b.clone()], 3).unwrap(), convolve(&[b, a], 3).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Multiplying `β` by `c` is the sphere of radius `1/√c`: curvature scales
    /// by `c` and `a_k` by `c^k`.
    #[test]
    fn curvature_scaling(name in prop::sample::select(vec!["S2", "S3", "S2xS2"]), num in 1i64..=5, den in 1i64..=3) {
        let base = builtin(name).unwrap();
        let c = frac(num, den);
        let scaled = SpaceSpec::new("scaled", base.g.clone(), base.beta.scale(&c), base.e.clone()).unwrap();
        let p0 = PreparedSpace::new(&base).unwrap();
        let p1 = PreparedSpace::new(&scaled).unwrap();
        prop_assert_eq!(&p1.curvature.scalar, &(&p0.curvature.scalar * &c));
        let a0 = p0.coefficients(3, ExpansionBudget::default()).unwrap().into_coeffs();
        let a1 = p1.coefficients(3, ExpansionBudget::default()).unwrap().into_coeffs();
        for k in 0..=3 {
            prop_assert_eq!(&a1[k], &(&a0[k] * pow_int(&c, k as u32)));
        }
    }

    #[test]
    fn space_file_round_trip(
        name in prop::sample::select(vec!["S2", "S3", "S4", "S2xS3", "flat2"]),
        gnum in 1i64..=7,
        gden in 1i64..=5,
    ) {
        let base = builtin(name).unwrap();
        let g = base.g.scale(&frac(gnum, gden));
        let spec = SpaceSpec::new(name, g, base.beta.clone(), base.e.clone()).unwrap();
        let back = from_json(&to_json(&spec), false).unwrap();
        prop_assert_eq!(back, spec);
    }
}

#[test]
fn bigint_fallback_matches_small_path() {
    // entries large enough that an 8-fold product overflows i128
    let big = Rational::from_integer(BigInt::from(1u64 << 40));
    let m = QMatrix::from_fn(2, 2, |r, c| if r == c { big.clone() } else { int(1) });
    let poly = power_trace_polynomial(std::slice::from_ref(&m), 8);
    let direct = (0..8)
        .fold(QMatrix::identity(2), |acc, _| acc.mul(&m))
        .trace();
    assert_eq!(poly.get(&vec![8]).cloned().unwrap_or_default(), direct);
}
