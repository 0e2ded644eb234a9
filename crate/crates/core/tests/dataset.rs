use proptest::prelude::*;
use qisc_core::dataset::{heading, normalize_input, sample_field, FieldBounds, HeadingConvention};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Empirical means of 10⁵ draws sit within three standard errors of the
/// interval midpoints; the standard error of a uniform mean is
/// `(hi − lo) / sqrt(12 n)`.
#[test]
fn field_means_match_uniform_midpoints() {
    let bounds = FieldBounds::default();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let n = 100_000;
    let mut sums = [0.0; 3];
    for _ in 0..n {
        let b = sample_field(&mut rng, &bounds);
        for (axis, ([lo, hi], v)) in bounds.axes().iter().zip(b).enumerate() {
            assert!(v > *lo && v < *hi);
            sums[axis] += v;
        }
    }
    let expected_mid = [0.0, -500.0, -2500.0];
    for (axis, [lo, hi]) in bounds.axes().into_iter().enumerate() {
        assert_eq!((lo + hi) / 2.0, expected_mid[axis]);
        let mean = sums[axis] / n as f64;
        let se = (hi - lo) / (12.0 * n as f64).sqrt();
        assert!(
            (mean - expected_mid[axis]).abs() < 3.0 * se,
            "axis {axis}: {mean}"
        );
    }
}

#[test]
fn fixed_seed_reproduces_draws() {
    let bounds = FieldBounds::default();
    let draw = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..100)
            .map(|_| sample_field(&mut rng, &bounds))
            .collect::<Vec<_>>()
    };
    assert_eq!(draw(5), draw(5));
    assert_ne!(draw(5), draw(6));
}

fn conv() -> HeadingConvention {
    HeadingConvention::default()
}

proptest! {
    #[test]
    fn heading_ignores_bz(bx in -43e3..43e3f64, by in -18e3..17e3f64, bz1 in -67e3..62e3f64, bz2 in -67e3..62e3f64) {
        prop_assume!(bx != 0.0 || by != 0.0);
        prop_assert_eq!(heading([bx, by, bz1], conv()).unwrap(), heading([bx, by, bz2], conv()).unwrap());
    }

    #[test]
    fn heading_is_scale_invariant(bx in -43e3..43e3f64, by in -18e3..17e3f64, exp in -20i32..20, c in 0.01..100.0f64) {
        prop_assume!(bx != 0.0 || by != 0.0);
        let h = heading([bx, by, 0.0], conv()).unwrap();
        // power-of-two factors scale both arguments exactly
        let p = 2f64.powi(exp);
        prop_assert_eq!(heading([p * bx, p * by, 0.0], conv()).unwrap(), h);
        prop_assert!((heading([c * bx, c * by, 0.0], conv()).unwrap() - h).abs() < 1e-9);
    }

    #[test]
    fn input_normalization_is_odd_and_bounded(bx in -43e3..43e3f64, by in -18e3..17e3f64, bz in -62e3..62e3f64) {
        let b = FieldBounds::default();
        let x = normalize_input([bx, by, bz], &b).unwrap();
        let neg = normalize_input([-bx, -by, -bz], &b).unwrap();
        for i in 0..3 {
            prop_assert_eq!(neg[i], -x[i]);
            prop_assert!(x[i].abs() <= std::f64::consts::PI);
        }
    }
}
