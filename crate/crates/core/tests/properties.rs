use bconv_core::criterion::{general_criterion, threshold_f, CriterionInput};
use bconv_core::polyalg::{count_roots_in_disk, find_roots, mahler_measure, reciprocal_adjoint, DEFAULT_ROOT_TOL};
use bconv_core::smooth::{detail, DiscreteMeasure};
use bconv_core::IntPolynomial;
use proptest::prelude::*;

/// Nonzero constant and leading coefficients, so no root sits at zero.
fn int_poly(max_deg: usize) -> impl Strategy<Value = IntPolynomial> {
    (1..=max_deg).prop_flat_map(|n| {
        (
            prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]),
            prop::collection::vec(-3i64..=3, n - 1),
            prop::sample::select(vec![-2i64, -1, 1, 2]),
        )
            .prop_map(|(c0, mid, lead)| {
                let mut c = vec![c0];
                c.extend(mid);
                c.push(lead);
                IntPolynomial::from_i64s(&c).unwrap()
            })
    })
}

fn measure() -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((-1.0f64..1.0, 0.1f64..1.0), 1..6).prop_map(|atoms| {
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let pts: Vec<f64> = atoms.iter().map(|a| a.0).collect();
        let w: Vec<f64> = atoms.iter().map(|a| a.1 / total).collect();
        DiscreteMeasure::from_reals(&pts, &w).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_forms_round_trip(p in int_poly(10)) {
        let human: IntPolynomial = p.to_string().parse().unwrap();
        prop_assert_eq!(&human, &p);
        let csv = IntPolynomial::parse_csv(&p.to_csv()).unwrap();
        prop_assert_eq!(&csv, &p);
    }

    #[test]
    fn mahler_is_multiplicative_and_reflection_invariant(p in int_poly(5), q in int_poly(5)) {
        let mp = mahler_measure(&p).unwrap();
        let mq = mahler_measure(&q).unwrap();
        let mpq = mahler_measure(&p.mul(&q)).unwrap();
        prop_assert!((mpq - mp * mq).abs() <= 1e-9 * mpq);
        let mr = mahler_measure(&p.reversed()).unwrap();
        prop_assert!((mr - mp).abs() <= 1e-9 * mp);
        prop_assert!(mp >= 1.0 - 1e-12);
    }

    #[test]
    fn adjoint_is_an_involution(p in int_poly(8)) {
        prop_assert_eq!(reciprocal_adjoint(&reciprocal_adjoint(&p)), p);
    }

    #[test]
    fn disk_count_matches_root_moduli(p in int_poly(8)) {
        let roots = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
        let moduli: Vec<(f64, usize)> = roots.records().iter().map(|r| (r.modulus, r.multiplicity)).collect();
        // radii well away from every root modulus
        for radius in [0.37f64, 1.13, 2.71] {
            if moduli.iter().any(|m| (m.0 - radius).abs() < 1e-6) {
                continue;
            }
            let want: usize = moduli.iter().filter(|m| m.0 < radius).map(|m| m.1).sum();
            match count_roots_in_disk(&p, radius) {
                Ok(c) => prop_assert_eq!(c.count, want),
                Err(e) => prop_assert_eq!(e.kind(), "BoundaryRoot"),
            }
        }
    }

    #[test]
    fn convolution_preserves_mass(a in measure(), b in measure()) {
        let c = a.convolve(&b).unwrap();
        prop_assert!((c.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(c.len() <= a.len() * b.len());
    }

    #[test]
    fn detail_is_a_normalised_contraction(mu in measure(), r in 0.05f64..2.0) {
        let d = detail(&mu, r).unwrap();
        prop_assert!(d.value > 0.0);
        prop_assert!(d.value <= 1.0 + d.error + 1e-9);
    }

    #[test]
    fn detail_is_scale_covariant(mu in measure(), r in 0.05f64..1.0, a in 0.2f64..5.0) {
        let x = detail(&mu, r).unwrap();
        let y = detail(&mu.dilate(a), a * r).unwrap();
        prop_assert!((x.value - y.value).abs() <= x.error + y.error + 1e-8);
    }

    #[test]
    fn threshold_is_monotone(l1 in 0.51f64..0.999, dl in 1e-3f64..0.05) {
        let l2 = (l1 + dl).min(0.9999);
        prop_assert!(threshold_f(l2).unwrap() > threshold_f(l1).unwrap());
    }

    #[test]
    fn criterion_margin_is_consistent(
        d in 1u32..3, log_m in 0.1f64..3.0, h in 0.0f64..3.0, lam in 0.01f64..0.99
    ) {
        let r = general_criterion(CriterionInput::new(d, log_m, h, lam).unwrap());
        prop_assert_eq!(r.margin, r.rhs - r.lhs);
        prop_assert_eq!(r.passes, r.lhs < r.rhs);
    }
}
