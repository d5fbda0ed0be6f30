mod common;

use common::{q, rng};
use mvlab_core::cones::{decalibration_fiber, pencil_classify, residual_calibration, twisted_pair, PencilClass};
use mvlab_core::matrix::Mat;
use mvlab_core::projective::{pullback_cone, Quadric3, SpaceConic};
use mvlab_core::scalar::{ExactField, Rational};
use mvlab_core::scene;
use proptest::prelude::*;

fn pair(kind: u8, r: &mut impl rand::Rng) -> (Quadric3<Rational>, Quadric3<Rational>) {
    match kind {
        0 => (scene::random_cone(r), scene::random_cone(r)),
        1 => scene::twisted_cubic_cones(r),
        _ => {
            let cal = scene::random_calibrated_config::<Rational>(r, 2);
            let cams = cal.config().cameras();
            (pullback_cone(&cams[0], &cal.image_conics()[0]).unwrap(), pullback_cone(&cams[1], &cal.image_conics()[1]).unwrap())
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classification_is_invariant(seed in any::<u64>(), kind in 0u8..3, k in prop_oneof![-5i64..=-1, 2i64..=5]) {
        let mut r = rng(seed);
        let (a, b) = pair(kind, &mut r);
        let class = pencil_classify(&a, &b).unwrap().class;
        let expected = [PencilClass::IrreducibleQuartic, PencilClass::CubicPlusLine, PencilClass::TwoSmoothConics][kind as usize];
        prop_assert_eq!(class, expected);
        prop_assert_eq!(pencil_classify(&b, &a).unwrap().class, class);
        let scaled = Quadric3::new(a.matrix().scale(&q(k))).unwrap();
        prop_assert_eq!(pencil_classify(&scaled, &b).unwrap().class, class);
        let h = scene::random_homography::<Rational>(&mut r, 4);
        prop_assert_eq!(pencil_classify(&a.congruence(&h), &b.congruence(&h)).unwrap().class, class);
    }

    #[test]
    fn fibers_are_small_and_contained(seed in any::<u64>(), n in 2usize..4) {
        let mut r = rng(seed);
        let cal = scene::random_calibrated_config::<Rational>(&mut r, n);
        let fiber = decalibration_fiber(cal.config(), cal.image_conics()).unwrap();
        prop_assert!(fiber.len() <= 2);
        for c in &fiber.conics {
            for (p, d) in cal.config().cameras().iter().zip(cal.image_conics()) {
                let cone = pullback_cone(p, d).unwrap();
                let cone = Quadric3::new(cone.matrix().map(ExactField::to_gaussian)).unwrap();
                prop_assert!(c.lies_on(&cone));
            }
        }
    }

    #[test]
    fn residual_is_a_fixed_point_free_involution(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cal = scene::random_calibrated_config::<Rational>(&mut r, 2);
        let once = residual_calibration(&cal).unwrap();
        prop_assert!(once != cal);
        prop_assert_eq!(residual_calibration(&once).unwrap(), cal);
    }

    #[test]
    fn twisted_pair_coordinate_change(seed in any::<u64>(), unit in any::<bool>()) {
        let mut r = rng(seed);
        let rot = scene::random_rotation::<Rational>(&mut r);
        let t: Vec<Rational> = if unit {
            scene::random_unit_vector(&mut r)
        } else {
            let t: Vec<Rational> = (0..3).map(|_| q(scene::small_int(&mut r))).collect();
            if t.iter().all(|x| *x == q(0)) { vec![q(1), q(2), q(3)] } else { t }
        };
        let tp = twisted_pair(&rot, &t).unwrap();
        prop_assert_eq!(tp.r_t.mul(&tp.r_t), Mat::identity(4));
        let g = tp.camera_involution.clone().unwrap();
        prop_assert_eq!(tp.p1.transform(&g), tp.p1.clone());
        prop_assert_eq!(tp.p2_twisted.transform(&g), tp.p2.clone());
        prop_assert_eq!(SpaceConic::absolute().transport(&g), tp.residual_conic().unwrap());
        if unit {
            prop_assert_eq!(SpaceConic::absolute().transport(&tp.h.inverse()), tp.residual_conic().unwrap());
        }
    }
}
