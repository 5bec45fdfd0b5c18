use deloc_core::deloc::{localization_event, min_mass};
use deloc_core::ensembles::DistributionSpec;
use deloc_core::graphs::{nodal_domains, parse_edge_list, write_edge_list, GraphSample};
use deloc_core::linalg::*;
use deloc_core::smallball::{char_fn, levy_concentration, Samples};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn matrix(max: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(-10.0..10.0f64, r * c).prop_map(move |v| DMatrix::from_vec(r, c, v))
    })
}

fn unit_vector(max: usize) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-1.0..1.0f64, 2..=max)
        .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
        .prop_map(|v| DVector::from_vec(v).normalize())
}

fn graph(max_n: usize) -> impl Strategy<Value = GraphSample> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |pairs| {
            let edges: Vec<_> = pairs.into_iter().filter(|(u, w)| u != w).collect();
            GraphSample::from_edges(n, &edges).unwrap()
        })
    })
}

fn distribution() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        (-3.0..0.0f64, 0.1..3.0f64).prop_map(|(a, w)| DistributionSpec::Uniform { a, b: a + w }),
        (-2.0..2.0f64, 0.1..3.0f64)
            .prop_map(|(mean, sigma)| DistributionSpec::Gaussian { mean, sigma }),
        Just(DistributionSpec::BernoulliSym),
        (0.01..0.99f64).prop_map(|p| DistributionSpec::Bernoulli { p }),
        (-5.0..5.0f64).prop_map(|c| DistributionSpec::PointMass { c }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singular_values_are_sorted_and_frobenius(m in matrix(8)) {
        let s = singular_values(&m);
        prop_assert_eq!(s.len(), m.nrows().min(m.ncols()));
        for w in s.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        prop_assert!(s.iter().all(|&x| x >= 0.0));
        let sq: f64 = s.iter().map(|x| x * x).sum();
        prop_assert!((sq - m.norm_squared()).abs() <= 1e-10 * m.norm_squared().max(1e-300));
        prop_assert!((s[0] - operator_norm(&m)).abs() <= 1e-12 * s[0].max(1.0));
        let full = SubspaceBasis::<f64>::full(m.ncols());
        let r = restricted_smin(&m, &full).unwrap();
        if m.nrows() >= m.ncols() {
            prop_assert!((r - smallest_singular_value(&m)).abs() <= 1e-10 * s[0].max(1.0));
        } else {
            // A wide matrix has a kernel on the sphere.
            prop_assert_eq!(r, 0.0);
        }
    }

    #[test]
    fn min_mass_is_monotone_and_sign_invariant(v in unit_vector(20), flips in prop::collection::vec(any::<bool>(), 20)) {
        let n = v.len();
        let mut prev = -1.0;
        for k in 1..=n {
            let eps = k as f64 / n as f64;
            let m = min_mass(&v, eps).unwrap().mass;
            prop_assert!(m >= prev);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&m));
            prev = m;
        }
        let flipped = DVector::from_fn(n, |i, _| if flips[i] { -v[i] } else { v[i] });
        let phase = v.map(|x| Complex64::from_polar(x, 0.0) * Complex64::from_polar(1.0, 0.7));
        for k in 1..=n {
            let eps = k as f64 / n as f64;
            let a = min_mass(&v, eps).unwrap().mass;
            prop_assert_eq!(a, min_mass(&flipped, eps).unwrap().mass);
            prop_assert!((a - min_mass(&phase, eps).unwrap().mass).abs() < 1e-12);
        }
    }

    #[test]
    fn localization_is_monotone_in_delta(m in matrix(6), d1 in 0.0..0.5f64, d2 in 0.0..0.5f64) {
        prop_assume!(m.nrows() == m.ncols() && m.nrows() >= 2);
        let sym = (&m + m.transpose()) * 0.5;
        let data = eigenpairs(&sym, SymmetryHint::Symmetric).unwrap();
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let a = localization_event(&data, 0.5, lo).unwrap();
        let b = localization_event(&data, 0.5, hi).unwrap();
        prop_assert!(!a.event || b.event);
        prop_assert_eq!(a.event, a.witness.as_ref().is_some_and(|w| w.mass < lo));
    }

    #[test]
    fn levy_monotone_shift_and_scale(
        raw in prop::collection::vec(-512i32..512, 2..200),
        r1 in 0u32..64, r2 in 0u32..64,
        shift in -50i32..50,
        scale_exp in -2i32..3,
        negate in any::<bool>(),
    ) {
        // Dyadic data keeps shifts and power-of-two scalings exact.
        let xs: Vec<f64> = raw.iter().map(|&k| k as f64 / 64.0).collect();
        let s = Samples::from_scalars(&xs);
        let (ra, rb) = (r1.min(r2) as f64 / 16.0, r1.max(r2) as f64 / 16.0);
        let la = levy_concentration(&s, ra).unwrap();
        prop_assert!(la <= levy_concentration(&s, rb).unwrap());
        let shifted = s.map(|x| x + shift as f64);
        prop_assert_eq!(la, levy_concentration(&shifted, ra).unwrap());
        let a = 2f64.powi(scale_exp) * if negate { -1.0 } else { 1.0 };
        let scaled = s.map(|x| a * x);
        prop_assert_eq!(la, levy_concentration(&scaled, a.abs() * ra).unwrap());
    }

    #[test]
    fn levy_multi_monotone(pts in prop::collection::vec(-4i32..4, 6..120), r1 in 0u32..20, r2 in 0u32..20) {
        let data: Vec<f64> = pts.iter().map(|&k| k as f64 / 4.0).collect();
        let n = data.len() / 3 * 3;
        let s = Samples::new(3, data[..n].to_vec()).unwrap();
        let (ra, rb) = (r1.min(r2) as f64 / 8.0, r1.max(r2) as f64 / 8.0);
        prop_assert!(levy_concentration(&s, ra).unwrap() <= levy_concentration(&s, rb).unwrap());
    }

    #[test]
    fn char_fn_contract(d in distribution(), x in -50.0..50.0f64) {
        let z = char_fn(&d, x);
        prop_assert!(z.norm() <= 1.0 + 1e-15);
        prop_assert!((char_fn(&d, 0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        prop_assert!((char_fn(&d, -x) - z.conj()).norm() < 1e-15);
    }

    #[test]
    fn nodal_domains_partition(g in graph(30), seed in 0u64..1000, tol in prop_oneof![Just(0.0), Just(1e-12), Just(0.3)]) {
        let n = g.n();
        let v = DVector::from_fn(n, |i, _| (((i as u64 + 1) * (seed + 7)) % 11) as f64 - 5.0);
        let d = nodal_domains(&g, &v, tol).unwrap();
        let mut count = vec![0; n];
        for dom in d.positive_domains.iter().chain(&d.negative_domains) {
            let sign = v[dom[0]].signum();
            for &u in dom {
                count[u] += 1;
                prop_assert_eq!(v[u].signum(), sign);
            }
            // Connected: a traversal inside the domain reaches all of it.
            let mut reached = vec![dom[0]];
            let mut i = 0;
            while i < reached.len() {
                for &w in g.neighbors(reached[i]) {
                    if dom.contains(&w) && !reached.contains(&w) {
                        reached.push(w);
                    }
                }
                i += 1;
            }
            prop_assert_eq!(reached.len(), dom.len());
        }
        for &u in &d.zero_set {
            count[u] += 1;
        }
        prop_assert!(count.iter().all(|&c| c == 1));
        if tol == 0.0 && v.iter().all(|&x| x != 0.0) {
            prop_assert!(d.zero_set.is_empty());
        }
    }

    #[test]
    fn edge_list_round_trip_and_identity(g in graph(25), picks in prop::collection::vec(any::<bool>(), 25)) {
        let back = parse_edge_list(&write_edge_list(&g)).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        let j: Vec<usize> = (0..g.n()).filter(|&i| picks[i]).collect();
        let k = j.len();
        prop_assert_eq!(g.non_edges_inside(&j) + g.edges_inside(&j), k * k.saturating_sub(1) / 2);
        let total = g.n() * (g.n() - 1) / 2;
        prop_assert_eq!(g.non_edges().len() + g.edge_count(), total);
    }

    #[test]
    fn real_embedding_preserves_norm_and_products(
        re in prop::collection::vec(-3.0..3.0f64, 12),
        im in prop::collection::vec(-3.0..3.0f64, 12),
        zr in prop::collection::vec(-3.0..3.0f64, 3),
        zi in prop::collection::vec(-3.0..3.0f64, 3),
    ) {
        let b = DMatrix::from_fn(4, 3, |i, j| Complex64::new(re[3 * i + j], im[3 * i + j]));
        let z = DVector::from_fn(3, |i, _| Complex64::new(zr[i], zi[i]));
        let rz = real_embedding_vector(&z);
        prop_assert!((rz.norm() - z.norm()).abs() <= 1e-15 * z.norm().max(1.0));
        let lhs = real_embedding_matrix(&b) * rz;
        let rhs = real_embedding_vector(&(&b * &z));
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + b.norm() * z.norm()));
    }

    #[test]
    fn distance_to_span_is_bounded(x in prop::collection::vec(-2.0..2.0f64, 5), s in prop::collection::vec(-2.0..2.0f64, 10)) {
        let x = DVector::from_vec(x);
        let span = vec![DVector::from_vec(s[..5].to_vec()), DVector::from_vec(s[5..].to_vec())];
        let d = distance_to_span(&x, &span).unwrap();
        prop_assert!(d >= 0.0 && d <= x.norm() + 1e-12);
        prop_assert!(distance_to_span(&span[0], &span).unwrap() <= 1e-10 * span[0].norm().max(1.0));
    }
}
