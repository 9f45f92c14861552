mod common;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use surface_rigidity::flextrace::{self, TraceParams};
use surface_rigidity::framework::{
    classify, flatten, pinned_rigidity_map, pinned_rigidity_matrix, rigidity_map, rigidity_matrix,
    unflatten,
};
use surface_rigidity::linalg::{numeric_rank, DEFAULT_RANK_TOL};
use surface_rigidity::surface::Point;
use surface_rigidity::{Framework, Graph, Surface};

fn surfaces() -> [Surface; 4] {
    [
        Surface::Sphere,
        Surface::Cylinder,
        Surface::Cone,
        Surface::default_ellipsoid(),
    ]
}

fn arb_surface() -> impl Strategy<Value = Surface> {
    (0usize..4).prop_map(|i| surfaces()[i])
}

fn arb_framework() -> impl Strategy<Value = Framework> {
    (arb_surface(), 2usize..=6, any::<u64>(), any::<u64>()).prop_map(|(s, n, gseed, cseed)| {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(gseed);
        let m = (gseed as usize) % (n * (n - 1) / 2 + 1);
        let g = common::random_graph(n, m, &mut rng);
        Framework::sample(g, s, cseed)
    })
}

fn same_distances(p: &[Point], q: &[Point]) -> bool {
    flextrace::max_distance_deviation(p, q) <= 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rigidity_matrix_matches_central_differences(fw in arb_framework()) {
        let (g, s) = (fw.graph(), fw.surface());
        let x = flatten(fw.config());
        let df = rigidity_matrix(g, s, fw.config());
        let step = 1e-5;
        for j in 0..x.len() {
            let mut e = DVector::zeros(x.len());
            e[j] = step;
            let col = (rigidity_map(g, s, &unflatten(&(&x + &e)))
                - rigidity_map(g, s, &unflatten(&(&x - &e))))
                / (2.0 * step);
            let scale = df.column(j).amax().max(1.0);
            prop_assert!((df.column(j) - col).amax() / scale <= 1e-6);
        }
    }

    #[test]
    fn trivial_flexes_are_tangent_flexes(fw in arb_framework()) {
        let df = rigidity_matrix(fw.graph(), fw.surface(), fw.config());
        for t in fw.surface().trivial_flex_basis(fw.config()).unwrap() {
            prop_assert!((&df * t).norm() <= 1e-9);
        }
    }

    #[test]
    fn independence_matches_pinned_rank(fw in arb_framework()) {
        prop_assume!(fw.surface().ell() == 0 || fw.n() >= 2);
        let r = classify(&fw).unwrap();
        let star = pinned_rigidity_matrix(fw.graph(), fw.surface(), fw.config());
        let full = fw.graph().m() + fw.n() + fw.surface().ell();
        prop_assert_eq!(r.is_independent, numeric_rank(&star, DEFAULT_RANK_TOL) == full);
    }

    #[test]
    fn rank_is_isometry_invariant(fw in arb_framework(), seed in any::<u64>()) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let iso = fw.surface().random_isometry(&mut rng);
        let moved = fw.with_config(iso.apply_all(fw.config())).unwrap();
        prop_assert_eq!(classify(&fw).unwrap().rank_df, classify(&moved).unwrap().rank_df);
    }

    #[test]
    fn standard_position_is_an_idempotent_surface_isometry(fw in arb_framework()) {
        let s = fw.surface();
        let std = s.to_standard_position(fw.config()).unwrap();
        prop_assert!(same_distances(fw.config(), &std));
        prop_assert!(std.iter().all(|p| s.h(p).abs() <= 1e-9));
        prop_assert!(s.is_standard_position(&std, 1e-9));
        let again = s.to_standard_position(&std).unwrap();
        let drift = std.iter().zip(&again).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(drift <= 1e-9);
    }

    #[test]
    fn gradient_matches_central_differences(s in arb_surface(), seed in any::<u64>()) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let p = s.sample_point(&mut rng);
        let step = 1e-5;
        let fd = Point::from_fn(|i, _| {
            let mut e = Point::zeros();
            e[i] = step;
            (s.h(&(p + e)) - s.h(&(p - e))) / (2.0 * step)
        });
        prop_assert!((s.grad_h(&p) - fd).norm() <= 1e-6 * s.grad_h(&p).norm());
    }
}

fn k4_cylinder() -> Framework {
    Framework::sample(Graph::complete(4), Surface::Cylinder, 11)
        .to_standard_position()
        .unwrap()
}

#[test]
fn every_path_point_satisfies_the_constraints() {
    let fw = k4_cylinder();
    let path = flextrace::trace(&fw, (0, 1), &TraceParams::default()).unwrap();
    assert!(path.closed);
    let reduced = fw.graph().without_edge(0);
    let target = pinned_rigidity_map(&reduced, fw.surface(), fw.config());
    for p in &path.points {
        assert!((pinned_rigidity_map(&reduced, fw.surface(), p) - &target).amax() <= 1e-10);
    }
}

#[test]
fn reversed_trace_visits_the_same_loop() {
    let fw = k4_cylinder();
    let params = TraceParams::default();
    let forward = flextrace::trace_oriented(&fw, (0, 1), &params, false).unwrap();
    let backward = flextrace::trace_oriented(&fw, (0, 1), &params, true).unwrap();
    assert!(forward.closed && backward.closed);
    // every point of the reversed run lies close to the forward polyline
    let fwd: Vec<DVector<f64>> = forward.points.iter().map(|p| flatten(p)).collect();
    for p in &backward.points {
        let x = flatten(p);
        let nearest = fwd.iter().map(|y| (y - &x).norm()).fold(f64::INFINITY, f64::min);
        assert!(nearest <= params.step, "distance {nearest}");
    }
    let f_range = |path: &flextrace::FlexPath| {
        let lo = path.edge_values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = path.edge_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (a, b) = (f_range(&forward), f_range(&backward));
    assert!((a.0 - b.0).abs() < 1e-3 && (a.1 - b.1).abs() < 1e-3);
}

#[test]
fn path_tangent_spans_the_pinned_null_space() {
    let fw = k4_cylinder();
    let t = flextrace::tangent_direction(&fw, (0, 1), None).unwrap();
    let reduced = fw.graph().without_edge(0);
    let star = pinned_rigidity_matrix(&reduced, fw.surface(), fw.config());
    assert!((&star * &t).norm() <= 1e-9);
    assert!((t.norm() - 1.0).abs() <= 1e-12);
    let stacked = DMatrix::from_rows(&[star.row(0).clone_owned(), t.transpose()]);
    assert_eq!(numeric_rank(&stacked, DEFAULT_RANK_TOL), 2);
}
