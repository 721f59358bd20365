use proptest::prelude::*;

use projdim_core::liealg::{centralizer, classify_block_form, classify_flow, DeckMatrix};
use projdim_core::numkernel::{
    determinant, elimination_rank, kernel, matrix_exp, null_space, plane_fit, svd_rank, trace,
    Matrix, Vector,
};
use projdim_core::quotient::{descends, verify_free_action, QuotientSpace};
use projdim_core::sampling;
use projdim_core::sphere::{map_great_circle, ProjectiveMap, ProjectiveVectorField, SpherePoint};

fn small_int_matrix(max_dim: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
        prop::collection::vec(-1i32..=1, r * c)
            .prop_map(move |v| Matrix::from_iterator(r, c, v.into_iter().map(f64::from)))
    })
}

fn taylor_exp(a: &Matrix) -> Matrix {
    let d = a.nrows();
    let mut sum = Matrix::identity(d, d);
    let mut term = Matrix::identity(d, d);
    for k in 1..60 {
        term = &term * a / k as f64;
        sum += &term;
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_and_elimination_ranks_agree(m in small_int_matrix(6)) {
        let s = svd_rank(&m, 1e-9).unwrap();
        let e = elimination_rank(&m, 1e-9).unwrap();
        prop_assert_eq!(s, e);
        prop_assert_eq!(null_space(&m, 1e-9).unwrap().len(), m.ncols() - s);
    }

    #[test]
    fn kernel_vectors_are_orthonormal_and_annihilated(m in small_int_matrix(6)) {
        let k = kernel(&m, 1e-9).unwrap();
        let scale = m.norm().max(1.0);
        for (i, u) in k.basis.iter().enumerate() {
            prop_assert!((&m * u).norm() <= 1e-9 * scale);
            for (j, v) in k.basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((u.dot(v) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exponential_group_law(seed in any::<u64>(), d in 2usize..6, s in -1.0f64..1.0, t in -1.0f64..1.0) {
        let mut rng = sampling::rng(seed);
        let a = sampling::gaussian_matrix(&mut rng, d, d) * 0.7;
        let lhs = matrix_exp(&a, s + t).unwrap();
        let rhs = matrix_exp(&a, s).unwrap() * matrix_exp(&a, t).unwrap();
        prop_assert!((&lhs - &rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
        let det = determinant(&matrix_exp(&a, t).unwrap()).unwrap();
        prop_assert!((det - (t * trace(&a)).exp()).abs() <= 1e-10 * det.abs().max(1.0));
    }

    #[test]
    fn exponential_matches_series(seed in any::<u64>(), d in 1usize..6, scale in 0.01f64..3.0) {
        let mut rng = sampling::rng(seed);
        let a = sampling::gaussian_matrix(&mut rng, d, d);
        let a = &a * (scale / a.norm().max(1e-300));
        let e = matrix_exp(&a, 1.0).unwrap();
        let oracle = taylor_exp(&a);
        prop_assert!((&e - &oracle).norm() <= 1e-11 * oracle.norm());
    }

    #[test]
    fn plane_fit_is_rotation_invariant(seed in any::<u64>(), d in 3usize..7) {
        let mut rng = sampling::rng(seed);
        let pts: Vec<Vector> = (0..20)
            .map(|_| sampling::sphere_point(&mut rng, d).into_coords())
            .collect();
        let q = sampling::gaussian_matrix(&mut rng, d, d).qr().q();
        let rotated: Vec<Vector> = pts.iter().map(|p| &q * p).collect();
        let a = plane_fit(&pts).unwrap().residual;
        let b = plane_fit(&rotated).unwrap().residual;
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn block_forms_commute_with_deck(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = sampling::rng(seed);
        let a = sampling::block_form(&mut rng, n).matrix();
        let b = DeckMatrix::new(n).unwrap();
        let comm = b.matrix() * &a - &a * b.matrix();
        prop_assert!(comm.amax() <= 1e-12 * a.amax().max(1.0));
        let back = classify_block_form(&a, n).unwrap();
        prop_assert!(back.det_defect() < 1e-9);
    }

    #[test]
    fn projective_action_is_a_group_action(seed in any::<u64>(), d in 3usize..7) {
        let mut rng = sampling::rng(seed);
        let a = ProjectiveMap::new(sampling::special_linear(&mut rng, d)).unwrap();
        let b = ProjectiveMap::new(sampling::special_linear(&mut rng, d)).unwrap();
        let v = sampling::sphere_point(&mut rng, d);
        let lhs = a.compose(&b).apply(&v);
        let rhs = a.apply(&b.apply(&v));
        prop_assert!((lhs.coords() - rhs.coords()).norm() < 1e-9);
        let back = a.inverse().unwrap().apply(&a.apply(&v));
        prop_assert!((back.coords() - v.coords()).norm() < 1e-9);
    }

    #[test]
    fn flows_compose(seed in any::<u64>(), d in 3usize..6, s in -1.0f64..1.0, t in -1.0f64..1.0) {
        let mut rng = sampling::rng(seed);
        let field = ProjectiveVectorField::new(sampling::trace_free(&mut rng, d, 1.0)).unwrap();
        let v = sampling::sphere_point(&mut rng, d);
        let lhs = field.flow(s + t).unwrap().apply(&v);
        let rhs = field.flow(s).unwrap().apply(&field.flow(t).unwrap().apply(&v));
        prop_assert!((lhs.coords() - rhs.coords()).norm() < 1e-10);
        // the field is the derivative of its flow at zero
        let h = 1e-6;
        let fd = (field.flow(h).unwrap().apply(&v).into_coords()
            - field.flow(-h).unwrap().apply(&v).into_coords()) / (2.0 * h);
        prop_assert!((fd - field.at(&v)).norm() < 1e-7);
    }

    #[test]
    fn descent_is_closed_under_products_and_inverses(seed in any::<u64>(), n in 2usize..6) {
        let q = QuotientSpace::new(n).unwrap();
        let mut rng = sampling::rng(seed);
        let a = ProjectiveMap::new(sampling::block_form(&mut rng, n).matrix()).unwrap();
        let b = ProjectiveMap::new(sampling::block_form(&mut rng, n).matrix()).unwrap();
        prop_assert!(descends(&q, &a.compose(&b)).unwrap().descends);
        prop_assert!(descends(&q, &a.inverse().unwrap()).unwrap().descends);
    }
}

#[test]
fn centralizer_elements_exponentiate_into_block_group() {
    for n in 2..=8 {
        let c = centralizer(n).unwrap();
        assert_eq!(c.dim, n * n - 2 * n + 2);
        assert_eq!(c.svd_rank, c.elimination_rank);
        assert!(c.max_commutator(&DeckMatrix::new(n).unwrap()) < 1e-12);
        assert!(c.max_trace() < 1e-12);
        for x in &c.basis {
            for t in [0.1, 1.0] {
                let form = classify_flow(x, n, t).unwrap();
                assert!(form.det_defect() < 1e-8, "n = {n}");
            }
        }
    }
}

#[test]
fn great_circles_map_to_great_circles() {
    let mut rng = sampling::rng(2024);
    for n in [2, 3, 5] {
        for _ in 0..100 {
            let a = ProjectiveMap::new(sampling::special_linear(&mut rng, n + 1)).unwrap();
            let gc = sampling::great_circle(&mut rng, n + 1);
            let image = map_great_circle(&a, &gc, 64).unwrap();
            assert!(image.residual < 1e-9, "n = {n}: {}", image.residual);
        }
    }
}

#[test]
fn deck_displacement_is_bounded_below() {
    for n in 2..=8 {
        let q = QuotientSpace::new(n).unwrap();
        let report = verify_free_action(&q, 10_000, 42).unwrap();
        assert!(report.min_displacement >= 2f64.sqrt() - 1e-9, "n = {n}");
        assert_eq!(report.deck_order, 4);
        assert!(!report.involution);
    }
}

#[test]
fn generic_maps_do_not_descend() {
    let mut rng = sampling::rng(99);
    for n in 2..6 {
        let q = QuotientSpace::new(n).unwrap();
        for _ in 0..5 {
            let a = ProjectiveMap::new(sampling::special_linear(&mut rng, n + 1)).unwrap();
            let d = descends(&q, &a).unwrap();
            assert!(!d.descends);
            assert!(d.residual > 0.1);
        }
    }
}

#[test]
fn orbit_representatives_are_constant_on_orbits() {
    let q = QuotientSpace::new(3).unwrap();
    let mut rng = sampling::rng(8);
    for _ in 0..200 {
        let v: SpherePoint = sampling::sphere_point(&mut rng, 4);
        let bv = SpherePoint::new(q.deck().matrix() * v.coords()).unwrap();
        let r1 = projdim_core::canonical_representative(&q, &v).unwrap();
        let r2 = projdim_core::canonical_representative(&q, &bv).unwrap();
        assert_eq!(r1.representative(), r2.representative());
    }
}
