use hdcoding::map::{
    apply_f, apply_f_inv, jacobian, mirror, orbit, orbit_float, ExactPoint, ForwardTermination, MapConfig, Point,
};
use hdcoding::scalar::{rat, rational_to_f64, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-60i64..=60, 1i64..=24).prop_map(|(n, d)| rat(n, d))
}

fn point() -> impl Strategy<Value = ExactPoint> {
    (rational(), rational()).prop_map(|(x, y)| Point::new(x, y))
}

fn cfg() -> MapConfig {
    MapConfig::default()
}

proptest! {
    #[test]
    fn jacobian_determinant_is_one(p in point()) {
        prop_assume!(!p.y.is_zero());
        prop_assert!(jacobian(&p, &cfg()).unwrap().det().is_one());
    }

    #[test]
    fn inverse_undoes_forward(p in point()) {
        prop_assume!(!p.y.is_zero());
        let q = apply_f(&p, &cfg()).unwrap();
        prop_assert_eq!(apply_f_inv(&q, &cfg()).unwrap(), p);
    }

    #[test]
    fn forward_undoes_inverse(p in point()) {
        prop_assume!(!(&p.x + &p.y).is_zero());
        let q = apply_f_inv(&p, &cfg()).unwrap();
        prop_assert_eq!(apply_f(&q, &cfg()).unwrap(), p);
    }

    #[test]
    fn mirror_commutes_with_both_directions(p in point()) {
        if !p.y.is_zero() {
            prop_assert_eq!(apply_f(&mirror(&p), &cfg()).unwrap(), mirror(&apply_f(&p, &cfg()).unwrap()));
        }
        if !(&p.x + &p.y).is_zero() {
            prop_assert_eq!(apply_f_inv(&mirror(&p), &cfg()).unwrap(), mirror(&apply_f_inv(&p, &cfg()).unwrap()));
        }
    }

    // Homogeneous orbit iteration against one reduced-rational step at a time.
    #[test]
    fn orbit_matches_single_steps(p in point()) {
        let o = orbit(&p, 6, 6, &cfg()).unwrap();
        let mut q = p.clone();
        for r in o.forward.iter().skip(1) {
            q = apply_f(&q, &cfg()).unwrap();
            prop_assert_eq!(r, &q);
        }
        let mut q = p.clone();
        for r in &o.backward {
            q = apply_f_inv(&q, &cfg()).unwrap();
            prop_assert_eq!(r, &q);
        }
        if let ForwardTermination::HitYZero(t) = o.forward_termination {
            prop_assert!(o.forward[t as usize].y.is_zero());
        }
    }

    #[test]
    fn float_orbit_tracks_exact_orbit(p in point()) {
        let exact = orbit(&p, 3, 0, &cfg()).unwrap();
        prop_assume!(exact.forward.len() == 4);
        // keep away from the discontinuity, where float and exact may part ways
        prop_assume!(exact.forward.iter().all(|q| rational_to_f64(&q.y).abs() > 1e-3));
        let f = orbit_float(&p.to_f64(), 3, 0, &cfg()).unwrap();
        prop_assert_eq!(f.forward.len(), 4);
        for (a, b) in exact.forward.iter().zip(&f.forward) {
            let (x, y) = (rational_to_f64(&a.x), rational_to_f64(&a.y));
            let scale = 1.0 + x.abs().max(y.abs());
            prop_assert!((x - b.x).abs() <= 1e-6 * scale && (y - b.y).abs() <= 1e-6 * scale, "{a:?} vs {b:?}");
        }
    }
}
