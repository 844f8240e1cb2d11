mod common;

use common::*;
use gasket::geometry::{apply_mobius, solve_root_quadruple, Complex, GasketSpec, MobiusMap};
use gasket::hyperbolic::{act, cosh_distance, H3Point};
use gasket::spatial::{GridIndex, NearestIndex};
use gasket::stats::{nn_spacing, pair_correlation, xi_grid, Region};
use proptest::prelude::*;

fn complex(range: f64) -> impl Strategy<Value = Complex> {
    (-range..range, -range..range).prop_map(|(a, b)| Complex::new(a, b))
}

fn mobius() -> impl Strategy<Value = MobiusMap> {
    (complex(2.0), complex(2.0), complex(2.0), complex(2.0)).prop_filter_map("singular", |(a, b, c, d)| {
        let det = a * d - b * c;
        (det.norm() > 0.1).then(|| MobiusMap::new(a, b, c, d).unwrap())
    })
}

fn h3_point() -> impl Strategy<Value = H3Point> {
    (complex(3.0), 0.05f64..3.0).prop_map(|(z, r)| H3Point::new(z, r).unwrap())
}

fn gasket_spec() -> impl Strategy<Value = GasketSpec> {
    (0.3f64..6.0, 0.3f64..6.0)
        .prop_filter("distinct", |(a, b)| (a - b).abs() > 0.3)
        .prop_map(|(a, b)| GasketSpec::new(a, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reflection_words_keep_descartes(spec in gasket_spec(), word in prop::collection::vec(0usize..4, 0..40)) {
        let mut q = solve_root_quadruple(&spec).unwrap();
        for &i in &word {
            let back = q.reflect(i).reflect(i);
            for k in 0..4 {
                let scale = q.circles[k].curvature.abs().max(1.0);
                prop_assert!((back.circles[k].curvature - q.circles[k].curvature).abs() <= 1e-9 * scale);
                let wb = back.circles[k].weighted_center();
                let wq = q.circles[k].weighted_center();
                prop_assert!((wb - wq).norm() <= 1e-9 * scale.max(wq.norm()));
            }
            q = q.reflect(i);
            let (r, tol) = q.descartes_residual();
            prop_assert!(r <= tol, "real residual {r} > {tol}");
            let (r, tol) = q.complex_descartes_residual();
            prop_assert!(r <= tol, "complex residual {r} > {tol}");
        }
    }

    #[test]
    fn mobius_preserves_tangency(spec in gasket_spec(), m in mobius()) {
        let q = solve_root_quadruple(&spec).unwrap();
        let images: Result<Vec<_>, _> = q.circles.iter().map(|c| apply_mobius(&m, c)).collect();
        let images = match images {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        let size = images.iter().map(|c| c.radius()).fold(0.0, f64::max);
        prop_assume!(size < 1e4);
        for i in 0..4 {
            for j in i + 1..4 {
                prop_assert!(images[i].tangency_residual(&images[j]) <= 1e-7 * size.max(1.0));
            }
        }
    }

    #[test]
    fn h3_action_is_isometric(m in mobius(), p in h3_point(), q in h3_point()) {
        let (mp, mq) = (act(&m, &p), act(&m, &q));
        prop_assert!(mp.r > 0.0 && mq.r > 0.0);
        let (a, b) = (cosh_distance(&p, &q), cosh_distance(&mp, &mq));
        prop_assert!(rel_close(a, b, 1e-7), "{a} vs {b}");
    }

    #[test]
    fn h3_action_composes(m in mobius(), n in mobius(), p in h3_point()) {
        let lhs = act(&m.compose(&n), &p);
        let rhs = act(&m, &act(&n, &p));
        let c = cosh_distance(&lhs, &rhs);
        prop_assert!(c - 1.0 <= 1e-8, "cosh d = {c}");
    }

    #[test]
    fn grid_index_matches_brute_force(
        pts in prop::collection::vec(complex(1.0), 0..150),
        cell in 0.01f64..2.0,
        radius in 0.0f64..1.5,
    ) {
        let idx = GridIndex::build(&pts, cell).unwrap();
        let mut brute = 0u64;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if (pts[i] - pts[j]).norm() < radius {
                    brute += 1;
                }
            }
        }
        prop_assert_eq!(idx.pairs_within(radius), brute);
        prop_assert_eq!(idx.pair_stream(radius).len() as u64, brute);
        let layered = NearestIndex::build(&pts, cell / 50.0).unwrap();
        if pts.len() >= 2 {
            for i in 0..pts.len() {
                let mut best = (f64::INFINITY, usize::MAX);
                for j in 0..pts.len() {
                    if j != i {
                        let d = (pts[i] - pts[j]).norm();
                        if (d, j) < best {
                            best = (d, j);
                        }
                    }
                }
                prop_assert_eq!(idx.nearest_neighbor(i).unwrap(), (best.1, best.0));
                prop_assert_eq!(layered.nearest_neighbor(i).unwrap(), (best.1, best.0));
            }
        }
    }

    #[test]
    fn curves_are_monotone_distributions(
        pts in prop::collection::vec(complex(1.0), 2..120),
        t in 0.0f64..4.0,
        region in prop::sample::select(vec!["plane", "halfplane:re>0", "disk:0,0,0.8"]),
    ) {
        let region: Region = region.parse().unwrap();
        let cs = point_set(&pts, t);
        prop_assume!(cs.points.iter().any(|p| region.contains(p.center)));
        let grid = xi_grid(0.0, 20.0, 0.25).unwrap();
        let p = pair_correlation(&cs, &region, &grid).unwrap();
        let q = nn_spacing(&cs, &region, &grid).unwrap();
        prop_assert!(p.is_nondecreasing());
        prop_assert!(q.is_nondecreasing());
        prop_assert!(p.values.iter().all(|&v| v >= 0.0));
        prop_assert!(q.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        prop_assert_eq!(p.values[0], 0.0);
        prop_assert_eq!(q.values[0], 0.0);
    }
}
