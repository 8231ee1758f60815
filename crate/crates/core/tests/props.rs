//! Property tests for the structural invariants.

use proptest::prelude::*;

use pdeid::dictionary::build_dictionary;
use pdeid::io::{read_field_csv, write_field_csv};
use pdeid::lasso::soft_threshold;
use pdeid::simulate::{add_noise, NoiseSpec};
use pdeid::spline::{estimate_derivatives, SplineSystem};
use pdeid::terms::enumerate_terms;
use pdeid::{Field, Grid1D};

fn arb_axis(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    (len, proptest::collection::vec(0.05f64..1.0, 64), -5.0f64..5.0).prop_map(
        |(n, steps, start)| {
            let mut x = start;
            (0..n)
                .map(|i| {
                    x += steps[i % steps.len()];
                    x
                })
                .collect()
        },
    )
}

fn arb_field() -> impl Strategy<Value = Field> {
    (arb_axis(4..10), arb_axis(4..10), proptest::collection::vec(-10.0f64..10.0, 100))
        .prop_map(|(x, t, vals)| {
            let grid = Grid1D::new(x, t).unwrap();
            let need = grid.m() * grid.n();
            let values = (0..need).map(|i| vals[i % vals.len()]).collect();
            Field::new(grid, values).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn csv_round_trip_is_lossless(field in arb_field()) {
        let mut buf = Vec::new();
        write_field_csv(&field, &mut buf).unwrap();
        let back = read_field_csv(std::io::BufReader::new(buf.as_slice())).unwrap();
        prop_assert_eq!(back.grid(), field.grid());
        prop_assert_eq!(back.values(), field.values());
    }

    #[test]
    fn term_enumeration_respects_its_bounds(p in 1usize..5, q in 0usize..4) {
        let labels = enumerate_terms(p, q).unwrap();
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            prop_assert!(l.total_power() <= p);
            prop_assert!(l.max_order() <= q);
            prop_assert!(l.factors().len() <= 2);
            prop_assert!(seen.insert(l.to_string()), "duplicate {}", l);
        }
        prop_assert!(labels[0].is_intercept());
    }

    #[test]
    fn soft_threshold_shrinks_toward_zero(x in -100.0f64..100.0, a in 0.0f64..50.0) {
        let s = soft_threshold(x, a);
        prop_assert!(s.abs() <= x.abs() + 1e-12);
        if s != 0.0 {
            prop_assert_eq!(s.signum(), x.signum());
            prop_assert!((x.abs() - s.abs() - a).abs() <= 1e-12);
        } else {
            prop_assert!(x.abs() <= a + 1e-12);
        }
    }

    #[test]
    fn noise_is_a_pure_function_of_seed(sigma in 0.0f64..2.0, seed in any::<u64>()) {
        let grid = Grid1D::uniform(5, 5, 1.0, 0.1).unwrap();
        let field = Field::from_fn(grid, |x, t| x - t).unwrap();
        let spec = NoiseSpec::new(sigma, seed).unwrap();
        let a = add_noise(&field, &spec);
        let b = add_noise(&field, &spec);
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn affine_slices_are_spline_fixed_points(
        knots in arb_axis(5..20),
        alpha in 0.05f64..1.0,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let sys = SplineSystem::new(&knots, alpha, None).unwrap();
        let slice: Vec<f64> = knots.iter().map(|&x| a + b * x).collect();
        let fit = sys.fit_slice(&slice).unwrap();
        let scale = 1.0 + slice.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..knots.len() {
            prop_assert!((fit.value[i] - slice[i]).abs() <= 1e-9 * scale);
            prop_assert!((fit.first[i] - b).abs() <= 1e-9 * scale);
            prop_assert!(fit.second[i].abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn dictionary_predictions_are_scale_invariant(field in arb_field(), seed in any::<u64>()) {
        let est = estimate_derivatives(&field, 0.9, 0.9).unwrap();
        let dict = build_dictionary(&est, 2, 2).unwrap();
        // A reproducible pseudo-random coefficient vector.
        let mut state = seed | 1;
        let mut beta_scaled = Vec::with_capacity(dict.k());
        for _ in 0..dict.k() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            beta_scaled.push(((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0);
        }
        let beta_raw = dict.descale_coefficients(&beta_scaled).unwrap();
        // Support is unchanged by de-scaling (scales are positive).
        for j in 0..dict.k() {
            prop_assert_eq!(beta_scaled[j] == 0.0, beta_raw[j] == 0.0);
        }
        let magnitude: f64 = (0..dict.k()).map(|j| dict.raw_rms()[j]).fold(1.0, f64::max);
        for row in (0..dict.rows()).step_by(11) {
            let scaled: f64 =
                (0..dict.k()).map(|j| dict.x_scaled(row, j) * beta_scaled[j]).sum();
            let raw = dict.predict_row_raw(row, &beta_raw);
            prop_assert!((scaled - raw).abs() <= 1e-12 * magnitude.max(scaled.abs()));
        }
    }
}
