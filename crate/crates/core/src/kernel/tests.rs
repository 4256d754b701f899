use super::*;
use crate::curve::{HyperellipticCurve, PlaneCurve};
use crate::fixtures;
use crate::polyexpr::parse;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const XS: [&str; 3] = ["x1", "x2", "x3"];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn pt(k: &SpaceCurve, x: [f64; 3]) -> CurvePoint {
    k.point([r(x[0]), r(x[1]), r(x[2])]).unwrap()
}

fn random_point(k: &SpaceCurve, rng: &mut ChaCha8Rng) -> CurvePoint {
    let base = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
    let fib = k.fiber(base, Chart::Affine).unwrap();
    fib.points[rng.gen_range(0..fib.points.len())]
}

/// The point on the same sheet as `p` above `x1 + dz`.
fn nudge(k: &SpaceCurve, p: &CurvePoint, dz: C64) -> CurvePoint {
    let mut x = p.x;
    x[0] += dz;
    k.newton_fixed_x1(x, 50).unwrap()
}

#[test]
fn hand_values_on_the_literal_fixture() {
    let k = fixtures::literal();
    let x = pt(&k, [2.0, -2.0, -1.0]);
    let y = pt(&k, [-1.0, -1.0, 1.0]);
    assert_eq!(numerators(&k, &x, &y)[0], r(-12.0));
    assert_eq!(k.j1(&x.x), r(-21.0));
    for v in [KernelVariant::Compact, KernelVariant::Genus4] {
        let got = kernel_eval(&k, &x, &y, v).unwrap().coeff;
        assert!((got - 2.0 / 21.0).norm() < 1e-14, "{v}: {got}");
    }
    let k2 = quadratic_kernel(&k, &x, &y).unwrap();
    assert_eq!(k2.weight, 2);
    assert!((k2.coeff + 2.0 / 441.0).norm() < 1e-15);
    assert_eq!(numerators(&k, &x, &x), [r(0.0); 3]);
}

#[test]
fn shared_coordinate_is_finite_and_matches_the_limit() {
    let k = fixtures::literal();
    let x = pt(&k, [-2.0, -1.0, 2.0]);
    let y = pt(&k, [-1.0, -1.0, 1.0]);
    assert_eq!(numerators(&k, &x, &y)[0], r(0.0));
    for v in [KernelVariant::Symmetric, KernelVariant::Compact, KernelVariant::Genus4] {
        let at = kernel_eval(&k, &x, &y, v).unwrap().coeff;
        assert!(at.is_finite());
        // Richardson extrapolation of the direct formula along y's sheet.
        let h = 1e-3;
        let k1 = kernel_eval(&k, &x, &nudge(&k, &y, c(h, h)), v).unwrap().coeff;
        let k2 = kernel_eval(&k, &x, &nudge(&k, &y, c(h / 2.0, h / 2.0)), v).unwrap().coeff;
        let lim = 2.0 * k2 - k1;
        assert!((at - lim).norm() < 1e-6 * (1.0 + at.norm()), "{v}: {at} vs {lim}");
    }
}

#[test]
fn two_shared_coordinates_are_finite_and_match_the_limit() {
    // Above x1 = 0 the template forces x2 x3 = 0; the three points with
    // x2 = 0 share two coordinates pairwise.
    let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    let fib = k.fiber(r(0.0), Chart::Affine).unwrap();
    let flat: Vec<_> = fib.points.iter().filter(|p| p.x[1].norm() < 1e-12).collect();
    assert_eq!(flat.len(), 3);
    let (x, y) = (flat[0], flat[1]);
    for v in [KernelVariant::Symmetric, KernelVariant::Compact, KernelVariant::Genus4] {
        let at = kernel_eval(&k, x, y, v).unwrap().coeff;
        let h = 1e-4;
        let k1 = kernel_eval(&k, x, &nudge(&k, y, c(h, h)), v).unwrap().coeff;
        let k2 = kernel_eval(&k, x, &nudge(&k, y, c(h / 2.0, h / 2.0)), v).unwrap().coeff;
        let lim = 2.0 * k2 - k1;
        assert!((at - lim).norm() < 1e-6 * (1.0 + at.norm()), "{v}: {at} vs {lim}");
    }
}

#[test]
fn compact_and_genus4_agree_with_each_other_and_with_p_form() {
    let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    let ev = KernelEvaluator::new(&k);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let x = random_point(&k, &mut rng);
        let y = random_point(&k, &mut rng);
        let a = ev.eval(&x, &y, KernelVariant::Compact).unwrap().coeff;
        let b = ev.eval(&x, &y, KernelVariant::Genus4).unwrap().coeff;
        assert!((a - b).norm() < 1e-10 * a.norm().max(1.0), "{a} vs {b}");
        let p = ev.p_form(&x.x, &y.x).unwrap() / (k.j1(&x.x) * (x.x[0] - y.x[0]));
        assert!((p - b).norm() < 1e-10 * b.norm().max(1.0));
        let q = ev.quadratic(&x, &y).unwrap().coeff;
        assert!((q * k.j1(&x.x) - b).norm() < 1e-12 * b.norm().max(1.0));
    }
}

#[test]
fn simple_pole_with_unit_residue() {
    let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let y = random_point(&k, &mut rng);
    for v in [KernelVariant::Symmetric, KernelVariant::Compact, KernelVariant::Genus4] {
        let mut errs = Vec::new();
        for h in [1e-2, 1e-3, 1e-4] {
            let x = nudge(&k, &y, c(h, 0.0));
            let kv = kernel_eval(&k, &x, &y, v).unwrap().coeff;
            errs.push((kv * h - 1.0).norm());
        }
        assert!(errs[2] < 1e-3, "{v}: {errs:?}");
        assert!(errs[2] < errs[0], "{v}: {errs:?}");
    }
}

#[test]
fn branched_cover_matches_compact() {
    let k = SpaceCurve::new(
        parse("x2^2 - x1^3 + 1", &XS).unwrap(),
        parse("x3^2 - x2 - 2", &XS).unwrap(),
    )
    .unwrap();
    let ev = KernelEvaluator::new(&k);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x = random_point(&k, &mut rng);
        let y = random_point(&k, &mut rng);
        let a = ev.eval(&x, &y, KernelVariant::Compact).unwrap().coeff;
        let b = ev.eval(&x, &y, KernelVariant::BranchedCover).unwrap().coeff;
        assert!((a - b).norm() < 1e-10 * a.norm().max(1.0));
    }
    let lit = fixtures::literal();
    let x = pt(&lit, [2.0, -2.0, -1.0]);
    let y = pt(&lit, [-1.0, -1.0, 1.0]);
    assert!(kernel_eval(&lit, &x, &y, KernelVariant::BranchedCover).is_err());
}

#[test]
fn coincident_points_and_branch_charts_are_errors() {
    let k = fixtures::literal();
    let y = pt(&k, [-1.0, -1.0, 1.0]);
    assert!(matches!(kernel_eval(&k, &y, &y, KernelVariant::Compact), Err(Error::Pole(_))));
    let x = pt(&k, [2.0, -2.0, -1.0]);
    assert!(third_kind(&k, &y, &y, &x, KernelVariant::Compact).is_err());
    assert_eq!(third_kind(&k, &x, &y, &y, KernelVariant::Genus4).unwrap().coeff, r(0.0));
}

#[test]
fn cauchy_values() {
    assert_eq!(cauchy(r(2.0), r(1.0)).unwrap().coeff, r(1.0));
    assert!((cauchy(c(1.0, 1.0), r(1.0)).unwrap().coeff - c(0.0, -1.0)).norm() < 1e-16);
    assert!(cauchy(r(1.0), r(1.0)).is_err());
}

#[test]
fn parabola_kernel() {
    let p = PlaneCurve::new(parse("x2^2 - x1", &["x1", "x2"]).unwrap()).unwrap();
    let a = plane_weierstrass(&p, [r(4.0), r(2.0)], [r(1.0), r(1.0)]).unwrap();
    assert!((a.coeff - 0.25).norm() < 1e-15);
    let b = plane_weierstrass(&p, [r(1.0), r(1.0)], [r(4.0), r(-2.0)]).unwrap();
    assert!((b.coeff - 1.0 / 6.0).norm() < 1e-15);
    let same_base = plane_weierstrass(&p, [r(1.0), r(1.0)], [r(1.0), r(-1.0)]).unwrap();
    assert!((same_base.coeff - 0.25).norm() < 1e-15);
    let close = plane_weierstrass(&p, [r(1.0201), r(1.01)], [r(1.0), r(-1.0)]).unwrap();
    assert!((close.coeff - 1.0 / (2.01 * 2.02)).norm() < 1e-12);
    assert!(plane_weierstrass(&p, [r(0.0), r(0.0)], [r(1.0), r(1.0)]).is_err());
}

#[test]
fn hyperelliptic_second_kind() {
    let h = HyperellipticCurve::new(vec![r(1.0), r(0.0), r(0.0), r(0.0), r(1.0)]).unwrap();
    assert_eq!(hyperelliptic_r(&h, r(2.0), r(3.0)), r(37.0));
    let xp = c(0.4, 0.7);
    for t in [1e-3, 1e-4] {
        let v = hyperelliptic_tau(&h, xp + t, xp, (1, 1)).unwrap().coeff;
        assert!((v * t * t + 1.0).norm() < 10.0 * t);
    }
    let a = hyperelliptic_tau(&h, c(1.3, -0.2), xp, (1, -1)).unwrap().coeff;
    let b = hyperelliptic_tau(&h, c(1.3, -0.2), xp, (-1, 1)).unwrap().coeff;
    assert!((a - b).norm() < 1e-14 * a.norm());
    assert!(hyperelliptic_tau(&h, xp, xp, (1, 1)).is_err());
}

#[test]
fn asymptotic_coefficients() {
    let k = fixtures::literal();
    let y = pt(&k, [-1.0, -1.0, 1.0]);
    let a = asymptotic_coeffs(&k, &y).unwrap();
    assert_eq!(a[2], r(1.0));
    let bare = crate::curve::TemplateCoeffs::new().curve().unwrap();
    // The formula is pointwise; the point need not lie on this degenerate curve.
    let y = CurvePoint {
        x: [c(0.7, 0.2), c(-0.3, 1.1), c(0.5, -0.4)],
        residual: 0.0,
    };
    let a = asymptotic_coeffs(&bare, &y).unwrap();
    assert_eq!(&a[..3], &[r(0.0); 3]);
    assert!((a[3] - 7.0 * y.x[2] * y.x[2] / y.x[0]).norm() < 1e-14);
}

#[test]
fn chart_transformation_law() {
    let v = DifferentialValue::affine(c(0.3, 0.1), 2);
    let x1 = c(1.5, -0.5);
    let w = v.in_chart(Chart::Infinity, x1);
    assert!((w.coeff - v.coeff * (x1 * x1).powu(2)).norm() < 1e-14);
    assert!((w.in_chart(Chart::Affine, x1).coeff - v.coeff).norm() < 1e-14);
    assert_eq!("g4".parse::<KernelVariant>().unwrap(), KernelVariant::Genus4);
    assert!("nope".parse::<KernelVariant>().is_err());
}
