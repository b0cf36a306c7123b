use num_complex::Complex64;
use proptest::prelude::*;
use qrange_core::geometry::{diameter, hausdorff, hull_2d, min_distance, planar};
use qrange_core::linalg::{inner, norm, CMatrix};
use qrange_core::model::tuple_norm;
use qrange_core::random;
use qrange_core::range::{cloud_joint, point_norm, tsing_disk, CloudMeta, PointCloud};
use qrange_core::sampler::{pair_rng, sample_sq};
use qrange_core::semi_hilbert::{a_adjoint, a_inner, a_norm, build_aspace, sample_sq_a, DEFAULT_RANK_TOL};
use qrange_core::{ComplexMatrix, FieldMode, QParam, Seed};

fn q_strategy() -> impl Strategy<Value = QParam> {
    (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, th)| QParam::new(Complex64::from_polar(r, th)).unwrap())
}

fn mode_strategy() -> impl Strategy<Value = FieldMode> {
    prop_oneof![Just(FieldMode::Complex), Just(FieldMode::Real)]
}

fn cloud(points: Vec<Vec<Complex64>>) -> PointCloud {
    let meta = CloudMeta {
        n: 1,
        q: Complex64::new(0.0, 0.0),
        seed: 0,
        sample_count: points.len(),
        generator: "test".into(),
    };
    PointCloud::new(points[0].len(), points, meta).unwrap()
}

fn planar_cloud() -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..40).prop_map(|v| cloud(v.into_iter().map(|(a, b)| vec![Complex64::new(a, b)]).collect()))
}

fn mat_close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm() + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_pairs_satisfy_constraints(n in 2usize..7, q in q_strategy(), seed in any::<u64>(), mode in mode_strategy()) {
        let q = if mode == FieldMode::Real { QParam::real(q.modulus()).unwrap() } else { q };
        for p in sample_sq(n, q, 20, Seed(seed), mode).unwrap() {
            prop_assert!(p.residual() < 1e-12);
            prop_assert!((norm(&p.x) - 1.0).abs() < 1e-12 && (norm(&p.y) - 1.0).abs() < 1e-12);
            prop_assert!((inner(&p.x, &p.y) - q.value()).norm() < 1e-12);
            if mode == FieldMode::Real {
                prop_assert!(p.x.iter().chain(p.y.iter()).all(|c| c.im == 0.0));
            }
        }
    }

    #[test]
    fn cloud_points_obey_cauchy_schwarz(n in 2usize..6, d in 1usize..4, q in q_strategy(), seed in any::<u64>()) {
        let t = random::gaussian_tuple(&mut pair_rng(Seed(seed), 0), n, d);
        let bound = tuple_norm(&t) + 1e-10;
        let c = cloud_joint(&t, q, 200, Seed(seed), FieldMode::Complex).unwrap();
        prop_assert!(c.points.iter().all(|p| point_norm(p) <= bound));
    }

    #[test]
    fn values_lie_in_their_tsing_disk(n in 2usize..6, q in q_strategy(), seed in any::<u64>()) {
        let m = random::gaussian_matrix(&mut pair_rng(Seed(seed), 0), n);
        for p in sample_sq(n, q, 20, Seed(seed), FieldMode::Complex).unwrap() {
            let disk = tsing_disk(&m, q, &p.x);
            let v = inner(&m.apply(&p.x), &p.y);
            prop_assert!(disk.contains(v, 1e-10 * (1.0 + m.spectral_norm())));
        }
    }

    #[test]
    fn hausdorff_is_a_metric(a in planar_cloud(), b in planar_cloud(), c in planar_cloud()) {
        let ab = hausdorff(&a, &b).unwrap();
        prop_assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        prop_assert!((ab - hausdorff(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(ab <= hausdorff(&a, &c).unwrap() + hausdorff(&c, &b).unwrap() + 1e-12);
        for p in &a.points {
            prop_assert!(min_distance(&b, p).unwrap() <= ab + 1e-12);
        }
    }

    #[test]
    fn hull_contains_points_and_fits_diameter(a in planar_cloud()) {
        let pts = planar(&a);
        let hull = hull_2d(&pts);
        prop_assert!(pts.iter().all(|&p| hull.contains(p, 1e-9)));
        let diam = diameter(&a.real_coords());
        for v in &hull.vertices {
            prop_assert!(pts.iter().any(|p| p == v));
            for w in &hull.vertices {
                prop_assert!(((v[0] - w[0]).powi(2) + (v[1] - w[1]).powi(2)).sqrt() <= diam + 1e-12);
            }
        }
    }

    #[test]
    fn a_adjoint_calculus(n in 2usize..6, kernel in 0usize..2, seed in any::<u64>(), alpha_re in -2.0f64..2.0, alpha_im in -2.0f64..2.0) {
        let mut rng = pair_rng(Seed(seed), 1);
        let rank = (n - kernel).max(1);
        let s = build_aspace(&random::psd_matrix(&mut rng, n, rank), DEFAULT_RANK_TOL).unwrap();
        let t = random::kernel_preserving_matrix(&mut rng, &s);
        let u = random::kernel_preserving_matrix(&mut rng, &s);
        let a = s.a().as_matrix();
        let ts = a_adjoint(&t, &s).unwrap();
        let us = a_adjoint(&u, &s).unwrap();
        prop_assert!(mat_close(&(a * ts.as_matrix()), &(t.as_matrix().adjoint() * a), 1e-10));
        let alpha = Complex64::new(alpha_re, alpha_im);
        let sum = ComplexMatrix::new(t.as_matrix() + u.as_matrix() * alpha).unwrap();
        let sum_s = a_adjoint(&sum, &s).unwrap();
        prop_assert!(mat_close(sum_s.as_matrix(), &(ts.as_matrix() + us.as_matrix() * alpha.conj()), 1e-10));
        let prod = ComplexMatrix::new(t.as_matrix() * u.as_matrix()).unwrap();
        let prod_s = a_adjoint(&prod, &s).unwrap();
        prop_assert!(mat_close(prod_s.as_matrix(), &(us.as_matrix() * ts.as_matrix()), 1e-10));
    }

    #[test]
    fn a_inner_product_is_positive_and_bounded(n in 2usize..6, seed in any::<u64>()) {
        let mut rng = pair_rng(Seed(seed), 2);
        let s = build_aspace(&random::psd_matrix(&mut rng, n, n - 1), DEFAULT_RANK_TOL).unwrap();
        let x = qrange_core::linalg::gaussian_vector(&mut rng, n, FieldMode::Complex);
        let y = qrange_core::linalg::gaussian_vector(&mut rng, n, FieldMode::Complex);
        prop_assert!(a_inner(&s, &x, &x).re >= -1e-12 * (1.0 + s.a().spectral_norm()) * norm(&x).powi(2));
        prop_assert!((a_inner(&s, &x, &y) - a_inner(&s, &y, &x).conj()).norm() < 1e-10 * (1.0 + norm(&x) * norm(&y) * s.a().spectral_norm()));
        prop_assert!(a_inner(&s, &x, &y).norm() <= a_norm(&s, &x) * a_norm(&s, &y) * (1.0 + 1e-10) + 1e-12);
        for k in s.kernel_basis() {
            prop_assert!(a_norm(&s, k) < 1e-7 * (1.0 + s.a().spectral_norm()).sqrt());
        }
    }

    #[test]
    fn a_pairs_satisfy_a_constraints(n in 3usize..6, q in q_strategy(), seed in any::<u64>(), kappa in 0.0f64..100.0) {
        let mut rng = pair_rng(Seed(seed), 3);
        let s = build_aspace(&random::psd_matrix(&mut rng, n, n - 1), DEFAULT_RANK_TOL).unwrap();
        for p in sample_sq_a(&s, q, 10, Seed(seed), kappa).unwrap() {
            prop_assert!(p.residual(&s) < 1e-9 * (1.0 + kappa));
            prop_assert!((a_norm(&s, &p.y) - 1.0).abs() < 1e-9);
            prop_assert!((a_inner(&s, &p.x, &p.y) - q.value()).norm() < 1e-9 * (1.0 + kappa));
        }
    }
}
