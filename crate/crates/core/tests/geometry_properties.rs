use proptest::prelude::*;
use s3flow::geometry::{
    connection_form, curvature_blocks, ricci_ambient, ricci_ambient_round, ricci_bar,
    second_fundamental_round, TwoParamJet,
};

fn jet() -> impl Strategy<Value = TwoParamJet> {
    (
        0.05f64..5.0,
        0.05f64..5.0,
        -3.0f64..3.0,
        -3.0f64..3.0,
        -3.0f64..3.0,
        -3.0f64..3.0,
    )
        .prop_map(|(a1, a2, d1, d2, dd1, dd2)| {
            TwoParamJet::new(a1, a2, d1, d2).with_second(dd1, dd2)
        })
}

fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn connection_form_is_skew(j in jet()) {
        let w = connection_form(&j).unwrap();
        for i in 0..4 {
            for k in 0..4 {
                prop_assert_eq!(w.coeff(i, i, k), 0.0);
                for l in 0..4 {
                    prop_assert_eq!(w.coeff(i, l, k), -w.coeff(l, i, k));
                }
            }
        }
    }

    #[test]
    fn connection_form_has_2_3_symmetry(j in jet()) {
        let w = connection_form(&j).unwrap();
        let s = w.swap_23();
        for i in 0..4 {
            for l in 0..4 {
                for k in 0..4 {
                    prop_assert!(close(w.coeff(i, l, k), s.coeff(i, l, k), 1e-12));
                }
            }
        }
    }

    #[test]
    fn curvature_has_2_3_symmetry(j in jet()) {
        let b = curvature_blocks(&j).unwrap();
        let s = b.swap_23();
        for (i, l) in b.keys() {
            for p in 0..4 {
                for q in 0..4 {
                    prop_assert!(close(b.coeff(i, l, p, q), s.coeff(i, l, p, q), 1e-12));
                }
            }
        }
    }

    #[test]
    fn ricci_bar_scales_inversely_quadratically(a1 in 0.05f64..5.0, a2 in 0.05f64..5.0, lambda in 0.1f64..10.0) {
        let r = ricci_bar(a1, a2).unwrap();
        let s = ricci_bar(lambda * a1, lambda * a2).unwrap();
        let l2 = lambda * lambda;
        prop_assert!(close(s.ric11 * l2, r.ric11, 1e-12));
        prop_assert!(close(s.ric22 * l2, r.ric22, 1e-12));
        prop_assert!(close(s.ric33 * l2, r.ric33, 1e-12));
    }

    #[test]
    fn round_sphere_is_isotropic(tau in 0.05f64..20.0) {
        let r = ricci_bar(tau, tau).unwrap();
        let expected = 4.0 / (tau * tau);
        for v in [r.ric11, r.ric22, r.ric33] {
            prop_assert!(close(v, expected, 1e-12));
        }
        let b = second_fundamental_round(tau).unwrap();
        prop_assert!(close(b.orthonormal, -1.0 / tau, 1e-15));
    }

    #[test]
    fn round_jets_agree_with_closed_form(f in 0.05f64..5.0, df in -3.0f64..3.0, ddf in -3.0f64..3.0) {
        let general = ricci_ambient(&TwoParamJet::round(f, df, Some(ddf))).unwrap();
        let round = ricci_ambient_round(f, df, ddf).unwrap();
        prop_assert!(close(general.ric00.unwrap(), round.ric00.unwrap(), 1e-12));
        for (x, y) in [
            (general.ric11, round.ric11),
            (general.ric22, round.ric22),
            (general.ric33, round.ric33),
            (general.scalar, round.scalar),
        ] {
            prop_assert!(close(x, y, 1e-12));
        }
    }
}

#[test]
fn flat_cone_has_no_curvature() {
    for t in [0.1, 0.5, 1.0, 3.0, 10.0] {
        let b = curvature_blocks(&TwoParamJet::round(t, 1.0, Some(0.0))).unwrap();
        assert!(b.max_abs() <= 1e-14 / (t * t), "t = {t}");
    }
}
