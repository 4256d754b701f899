use super::*;
use crate::fixtures;

fn points(c: &SpaceCurve, n: usize, seed: u64) -> Vec<CurvePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let base = C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let fib = c.fiber(base, Chart::Affine).unwrap();
            fib.points[rng.gen_range(0..fib.points.len())]
        })
        .collect()
}

fn request(c: &SpaceCurve, lambda: u8, m: usize, n: usize) -> CorrelatorRequest {
    CorrelatorRequest {
        lambda,
        b_points: points(c, m, 1),
        c_points: points(c, n, 2),
    }
}

#[test]
fn duplicated_points_give_zero() {
    let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    let mut req = request(&k, 2, 9, 0);
    assert!(bc_correlator(&k, &req).unwrap().relative_magnitude() > 1e-8);
    req.b_points[3] = req.b_points[7];
    assert!(bc_correlator(&k, &req).unwrap().relative_magnitude() <= 1e-12);
    let mut req = request(&k, 1, 5, 2);
    req.c_points.push(req.c_points[0]);
    req.b_points.push(points(&k, 1, 9)[0]);
    assert!(bc_correlator(&k, &req).unwrap().relative_magnitude() <= 1e-12);
}

#[test]
fn one_c_point_reduces_to_the_omega_determinant() {
    let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    let req = request(&k, 1, 4, 1);
    let got = bc_correlator(&k, &req).unwrap();
    let w = holomorphic_basis(&k).unwrap();
    let rows: Vec<Vec<C64>> = req
        .b_points
        .iter()
        .map(|p| eval_basis(&k, &w, p, Chart::Affine).unwrap().into_iter().map(|v| v.coeff).collect())
        .collect();
    assert_eq!(got.value, lu_det(&rows).det);
    assert_eq!((got.b_weight, got.c_weight), (1, 0));
}

#[test]
fn wrong_counts_are_rejected() {
    let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    assert!(bc_correlator(&k, &request(&k, 2, 9, 1)).is_err());
    assert!(bc_correlator(&k, &request(&k, 1, 3, 0)).is_err());
    assert!(bc_correlator(&k, &request(&k, 3, 3, 0)).is_err());
    let mut req = request(&k, 2, 10, 1);
    req.b_points[0] = req.c_points[0];
    assert!(matches!(bc_correlator(&k, &req), Err(Error::Pole(_))));
}

#[test]
fn column_shifts_leave_the_determinant_alone() {
    let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    for req in [request(&k, 2, 11, 2), request(&k, 1, 6, 3)] {
        let r = spurious_invariance_check(&k, &req, 4).unwrap();
        assert!(r.rel_delta <= 1e-10, "{r:?}");
        let zero = shifted_correlator(&k, &req, [C64::new(0.0, 0.0); 4]).unwrap();
        assert_eq!(zero.value, r.base);
    }
}

#[test]
fn simple_pole_under_collision() {
    let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    let req = request(&k, 2, 10, 1);
    let e = collision_exponent(&k, &req, 0, 0, C64::new(1e-3, 5e-4)).unwrap();
    assert!((e - 1.0).abs() < 0.05, "{e}");
}

#[test]
fn green_vanishes_when_its_poles_merge() {
    let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    let pts = points(&k, 2, 6);
    let cfg = GridConfig {
        base_cells: 6,
        max_depth: 1,
        target_rel_error: 1e-2,
        ..GridConfig::default()
    };
    let req = GreenRequest {
        p: pts[0],
        q: pts[1],
        qp: pts[1],
        quadrature: cfg,
    };
    let g = green_function(&k, &req).unwrap();
    assert_eq!(g.value.raw, C64::new(0.0, 0.0));
    assert!(g.gram_det.norm() > 0.0);
}
