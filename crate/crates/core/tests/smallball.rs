mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use common::*;
use deloc_core::ensembles::DistributionSpec;
use deloc_core::linalg::{real_embedding_vector, SubspaceBasis};
use deloc_core::rng::Seed;
use deloc_core::smallball::*;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

const U: DistributionSpec = DistributionSpec::Uniform { a: -0.5, b: 0.5 };

fn sample_scalars(d: &DistributionSpec, n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| d.sample(&mut r)).collect()
}

#[test]
fn levy_uniform_quarter() {
    let s = Samples::from_scalars(&sample_scalars(&U, 100_000, 40));
    let l = levy_concentration(&s, 0.25).unwrap();
    assert!((l - 0.5).abs() <= 0.02, "{l}");
}

#[test]
fn levy_gaussian_unit() {
    let g = DistributionSpec::Gaussian {
        mean: 0.0,
        sigma: 1.0,
    };
    let s = Samples::from_scalars(&sample_scalars(&g, 100_000, 41));
    let l = levy_concentration(&s, 1.0).unwrap();
    // 2Φ(1) - 1.
    assert!((l - 0.682_689_492_137_086).abs() <= 0.01, "{l}");
}

#[test]
fn real_and_complex_estimators_agree_exactly() {
    let mut r = rng(42);
    let pts: Vec<DVector<Complex64>> = (0..400)
        .map(|_| {
            DVector::from_fn(2, |_, _| {
                Complex64::new(r.random::<f64>(), r.random::<f64>())
            })
        })
        .collect();
    let real: Vec<DVector<f64>> = pts.iter().map(real_embedding_vector).collect();
    let samples = Samples::from_vectors(&real).unwrap();
    for radius in [0.0, 0.1, 0.3, 0.7, 2.0] {
        let a = levy_concentration_with(&samples, radius, 150).unwrap();
        let b = levy_concentration_complex(&pts, radius, 150).unwrap();
        assert_eq!(a, b, "r = {radius}");
    }
}

#[test]
fn char_fn_matches_quadrature() {
    // E e^{2iX} for X uniform on [-1/2, 1/2] by the midpoint rule.
    let m = 200_000;
    let h = 1.0 / m as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for k in 0..m {
        let u = -0.5 + (k as f64 + 0.5) * h;
        re += (2.0 * u).cos() * h;
        im += (2.0 * u).sin() * h;
    }
    let got = char_fn(&U, 2.0);
    assert!((got.re - re).abs() < 1e-9 && (got.im - im).abs() < 1e-9);
    assert!((got.re - 1f64.sin()).abs() < 1e-12);
}

#[test]
fn plancherel_for_uniform() {
    // ∫|φ|² = 2π ∫ f² = 2π; sin²-averaged tail beyond X contributes 4/X.
    let x_max = 4000.0;
    let steps = 4_000_000;
    let h = x_max / steps as f64;
    let mut half = 0.0;
    for k in 0..steps {
        let x = (k as f64 + 0.5) * h;
        half += char_fn(&U, x).norm_sqr() * h;
    }
    let total = 2.0 * half + 4.0 / x_max;
    assert!((total - 2.0 * PI).abs() < 1e-3, "{total}");
}

/// Root of `sin(u)/u = t` on (0, π) by Newton's method.
fn sinc_root(t: f64) -> f64 {
    let mut u: f64 = 1.0;
    for _ in 0..100 {
        let f = u.sin() / u - t;
        let df = (u * u.cos() - u.sin()) / (u * u);
        u -= f / df;
    }
    u
}

#[test]
fn superlevel_at_point_nine() {
    let rep = superlevel_measure(&U, 0.9, 10.0).unwrap();
    let want = 2.0 * (2.0 * sinc_root(0.9));
    assert!(
        (rep.measure - want).abs() < 1e-6,
        "{} vs {want}",
        rep.measure
    );
    assert!((rep.measure - 3.16).abs() < 0.05);
}

#[test]
fn superlevel_bounds_on_grid() {
    let g = DistributionSpec::Gaussian {
        mean: 0.0,
        sigma: 1.0,
    }
    .rescaled_to_unit_density()
    .unwrap();
    for d in [U, g] {
        for i in 1..=7 {
            let t = i as f64 / 10.0;
            assert!(superlevel_measure(&d, t, 10.0).unwrap().holds_small);
        }
        for i in 0..=4 {
            let t = 0.75 + 0.05 * i as f64;
            assert!(superlevel_measure(&d, t, 10.0).unwrap().holds_large);
        }
    }
}

#[test]
fn single_uniform_with_smoothing() {
    let spec = WeightedSumSpec::new(vec![U], vec![1.0]).with_smoothing(1e-3);
    let curve = weighted_sum_density(&spec, &[-0.01, 0.0, 0.01]).unwrap();
    assert!((curve.values[1] - 1.0).abs() <= 1e-3, "{}", curve.values[1]);
}

#[test]
fn two_uniform_center_is_sqrt2() {
    let spec = WeightedSumSpec::new(vec![U, U], vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
    let curve = weighted_sum_density(&spec, &[0.0]).unwrap();
    assert!((curve.values[0] - 2f64.sqrt()).abs() <= 1e-3);
}

#[test]
fn three_uniform_matches_irwin_hall() {
    let w = 1.0 / 3f64.sqrt();
    let spec = WeightedSumSpec::new(vec![U; 3], vec![w; 3]);
    let pts = [-0.45, -0.3, -0.15, 0.0, 0.15, 0.3, 0.45, 0.6];
    let curve = weighted_sum_density(&spec, &pts).unwrap();
    // Σ X_j/√3 = (IH₃ - 3/2)/√3.
    for (y, f) in pts.iter().zip(&curve.values) {
        let want = 3f64.sqrt() * irwin_hall_density(3, 3f64.sqrt() * y + 1.5);
        assert!((f - want).abs() <= 1e-3, "f({y}) = {f}, want {want}");
    }
    assert!((curve.values[3] - 1.299_038).abs() <= 1e-3);
}

#[test]
fn density_normalizes_and_ignores_order() {
    let g = DistributionSpec::Gaussian {
        mean: 0.2,
        sigma: 1.0,
    };
    let w = DistributionSpec::Uniform { a: -1.0, b: 2.0 };
    let weights = vec![0.6, 0.48, 0.64];
    let spec = WeightedSumSpec::new(vec![U, w, g], weights.clone());
    let swapped = WeightedSumSpec::new(vec![g, U, w], vec![weights[2], weights[0], weights[1]]);
    let grid = density_grid(&spec, 801).unwrap();
    let a = weighted_sum_density(&spec, &grid).unwrap();
    let b = weighted_sum_density(&swapped, &grid).unwrap();
    assert!(
        (a.trapezoid_mass() - 1.0).abs() <= 1e-3,
        "{}",
        a.trapezoid_mass()
    );
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() < 1e-9);
    }
    assert!(a.values.iter().all(|&v| v >= 0.0));
}

#[test]
fn projection_sups() {
    let e = SubspaceBasis::spanned_by(2, &[DVector::from_vec(vec![1.0, 1.0])]).unwrap();
    let r = projection_density_sup(&[U, U], &e, ProjectionMethod::Fourier, 2.0).unwrap();
    assert!((r.sup - 2f64.sqrt()).abs() <= 1e-3, "{}", r.sup);
    assert!(r.holds);

    let plane = SubspaceBasis::<f64>::coordinates(4, &[0, 2]).unwrap();
    let h = projection_density_sup(
        &[U; 4],
        &plane,
        ProjectionMethod::Histogram {
            samples: 400_000,
            bin: 0.05,
            seed: Seed::new(3, 0),
        },
        1.0,
    )
    .unwrap();
    assert!((h.sup - 1.0).abs() <= 4.0 * h.std_error + 0.02, "{h:?}");
}

#[test]
fn small_ball_matches_chi_square() {
    let g = DistributionSpec::Gaussian {
        mean: 0.0,
        sigma: 1.0,
    };
    let x = DVector::from_fn(6, |i, _| {
        Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)
    });
    let r = small_ball_gx(4, 6, &g, &x, 0.5, 10_000, 77, 3.0).unwrap();
    // ‖Gx‖² ~ χ²₄ and the event is χ²₄ ≤ θ² l = 1.
    let want = chi_square_cdf_even(4, 1.0);
    assert!((want - 0.0902).abs() < 1e-4);
    assert!((r.empirical - want).abs() <= 0.01, "{}", r.empirical);
    assert!(r.empirical <= r.bound);
}

#[test]
fn small_ball_uniform_below_bound() {
    let d = DistributionSpec::Uniform {
        a: -3f64.sqrt(),
        b: 3f64.sqrt(),
    };
    let mut rr = rng(5);
    let v: Vec<f64> = (0..10).map(|_| StandardNormal.sample(&mut rr)).collect();
    let x = DVector::from_vec(v)
        .normalize()
        .map(|t| Complex64::new(t, 0.0));
    let r = small_ball_gx(8, 10, &d, &x, 0.1, 10_000, 78, 3.0).unwrap();
    assert!(r.empirical <= r.bound, "{r:?}");
    assert!(r.row_empirical <= r.row_bound.unwrap());
}

#[test]
fn tensorization_z1z2_at_documented_point() {
    let rows = tensorization_audit(
        TensorizationKind::Z1Z2 { d: 5.0, m: 4.0 },
        &[0.02, 0.05, 0.1, 0.15, 0.2],
        1_000_000,
        Seed::new(12, 0),
        DEFAULT_M_GUARD,
    )
    .unwrap();
    let at = rows.iter().find(|r| r.t == 0.1).unwrap();
    assert!((at.bound - 0.01024).abs() < 1e-12);
    assert!(rows.iter().all(|r| r.holds), "{rows:?}");
}

#[test]
fn tensorization_product_grid() {
    let rows = tensorization_audit(
        TensorizationKind::product(4, 1.0),
        &[0.05, 0.1, 0.2, 0.3, 0.4],
        1_000_000,
        Seed::new(13, 0),
        DEFAULT_M_GUARD,
    )
    .unwrap();
    assert!(rows.iter().all(|r| r.holds), "{rows:?}");
}

#[test]
fn randomizing_coordinates_holds() {
    let e = SubspaceBasis::random_complex(6, 2, Seed::new(14, 0)).unwrap();
    let r = randomize_coordinates_audit(&U, &e, None, 0.3, 100_000, Seed::new(15, 0)).unwrap();
    assert!(r.holds, "{r:?}");
    let y = DVector::from_fn(6, |i, _| 0.1 * i as f64);
    let r = randomize_coordinates_audit(&U, &e, Some(&y), 0.3, 20_000, Seed::new(15, 1)).unwrap();
    assert!(r.holds, "{r:?}");
}

#[test]
fn randomizing_trivial_cases() {
    let full = SubspaceBasis::<Complex64>::full(3);
    let big = randomize_coordinates_audit(&U, &full, None, 100.0, 500, Seed::new(1, 0)).unwrap();
    assert_eq!((big.lhs, big.rhs), (1.0, 1.0));
    let zero = randomize_coordinates_audit(&U, &full, None, 0.0, 500, Seed::new(1, 1)).unwrap();
    assert!(zero.lhs <= 1.0 / 500.0 && zero.holds);
}
