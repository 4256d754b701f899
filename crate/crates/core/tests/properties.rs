use std::sync::OnceLock;

use proptest::prelude::*;
use weierkern::correlator::nudge;
use weierkern::curve::{Chart, CurvePoint, PathSpec, SpaceCurve};
use weierkern::fixtures;
use weierkern::kernel::{KernelEvaluator, KernelVariant};
use weierkern::linalg::lu_det;
use weierkern::polyexpr::{parse, resultant};
use weierkern::{MultiPoly, C64};

const NAMES: [&str; 3] = ["x1", "x2", "x3"];

fn smooth() -> &'static SpaceCurve {
    static CURVE: OnceLock<SpaceCurve> = OnceLock::new();
    CURVE.get_or_init(|| fixtures::smooth(fixtures::SMOOTH_SEED).unwrap())
}

fn complex(range: f64) -> impl Strategy<Value = C64> {
    (-range..range, -range..range).prop_map(|(re, im)| C64::new(re, im))
}

fn poly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
    let term = (prop::collection::vec(0u16..4, nvars), complex(3.0));
    prop::collection::vec(term, 0..6).prop_map(move |terms| MultiPoly::from_terms(nvars, terms).unwrap())
}

fn poly_in_x2() -> impl Strategy<Value = MultiPoly> {
    (poly(2), 1u16..4, 0u16..3, complex(3.0)).prop_map(|(p, e2, e1, c)| {
        p.checked_add(&MultiPoly::from_terms(2, [(vec![e1, e2], c + 0.5)]).unwrap()).unwrap()
    })
}

fn point_on(k: &'static SpaceCurve) -> impl Strategy<Value = CurvePoint> {
    (complex(1.5), 0usize..6).prop_filter_map("fiber", move |(base, sheet)| {
        let fib = k.fiber(base, Chart::Affine).ok()?;
        (!fib.degenerate && fib.points.len() == 6).then(|| fib.points[sheet])
    })
}

fn matrix(n: usize) -> impl Strategy<Value = Vec<Vec<C64>>> {
    prop::collection::vec(prop::collection::vec(complex(2.0), n), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_then_parse_is_identity(p in poly(3)) {
        let text = p.to_string_with(&NAMES);
        prop_assert_eq!(parse(&text, &NAMES).unwrap(), p);
    }

    #[test]
    fn partials_match_finite_differences(p in poly(3), z in prop::array::uniform3(complex(1.5))) {
        let h = 1e-6;
        for v in 0..3 {
            let exact = p.partial(v).eval(&z).unwrap();
            let mut zp = z;
            let mut zm = z;
            zp[v] += h;
            zm[v] -= h;
            let fd = (p.eval(&zp).unwrap() - p.eval(&zm).unwrap()) / (2.0 * h);
            let tol = 1e-5 * (1.0 + p.eval(&z).unwrap().norm()) * (1.0 + p.coeff_scale());
            prop_assert!((exact - fd).norm() <= tol, "var {}: {} vs {}", v, exact, fd);
        }
    }

    #[test]
    fn product_rule_holds_coefficientwise(p in poly(3), q in poly(3), v in 0usize..3) {
        let lhs = p.checked_mul(&q).unwrap().partial(v);
        let rhs = p.partial(v).checked_mul(&q).unwrap().checked_add(&p.checked_mul(&q.partial(v)).unwrap()).unwrap();
        let diff = lhs.checked_sub(&rhs).unwrap();
        let scale = 1.0 + lhs.coeff_scale();
        prop_assert!(diff.terms().all(|(_, c)| c.norm() <= 1e-12 * scale));
    }

    #[test]
    fn evaluation_is_a_ring_map(p in poly(3), q in poly(3), z in prop::array::uniform3(complex(1.5))) {
        let (a, b) = (p.eval(&z).unwrap(), q.eval(&z).unwrap());
        let sum = p.checked_add(&q).unwrap().eval(&z).unwrap();
        let prod = p.checked_mul(&q).unwrap().eval(&z).unwrap();
        prop_assert!((sum - (a + b)).norm() <= 1e-9 * (1.0 + a.norm() + b.norm()));
        prop_assert!((prod - a * b).norm() <= 1e-9 * (1.0 + a.norm() * b.norm()));
    }

    #[test]
    fn resultant_vanishes_at_common_roots(p in poly_in_x2(), q in poly_in_x2(), root in prop::array::uniform2(complex(1.0))) {
        // Shift both so they share `root`.
        let p = p.checked_sub(&MultiPoly::constant(2, p.eval(&root).unwrap())).unwrap();
        let q = q.checked_sub(&MultiPoly::constant(2, q.eval(&root).unwrap())).unwrap();
        let r = resultant(&p, &q, 1).unwrap();
        // Sylvester entries scale like the input coefficients.
        let scale = p.coeff_scale().powi(q.degree_in(1) as i32)
            * q.coeff_scale().powi(p.degree_in(1) as i32)
            * (1.0 + root[0].norm()).powi(r.total_degree() as i32);
        prop_assert!(r.eval(&root).unwrap().norm() <= 1e-8 * scale);
    }
}
proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fiber_points_are_tangent_to_both_surfaces(p in point_on(smooth())) {
        let k = smooth();
        prop_assert!(p.residual <= k.tolerance());
        let (gf, gg) = k.gradients(&p.x);
        let j = k.jacobians(&p.x);
        let dot = |a: &[C64; 3]| (0..3).map(|i| a[i] * j[i]).sum::<C64>().norm();
        let size = |a: &[C64; 3]| a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = size(&j) * size(&gf).max(size(&gg));
        prop_assert!(dot(&gf) <= 1e-8 * scale && dot(&gg) <= 1e-8 * scale);
    }

    #[test]
    fn chart_map_is_an_involution(x in prop::array::uniform3(complex(3.0))) {
        prop_assume!(x[0].norm() > 1e-3);
        let back = SpaceCurve::from_chart(Chart::Infinity, &SpaceCurve::to_chart(Chart::Infinity, &x));
        for i in 0..3 {
            prop_assert!((back[i] - x[i]).norm() <= 1e-12 * (1.0 + x[i].norm()));
        }
    }

    #[test]
    fn monodromy_respects_reversal_and_concatenation(a in complex(2.0), b in complex(2.0), c in complex(2.0)) {
        let k = smooth();
        let ab = PathSpec::new(Chart::Affine, vec![a, b]);
        let bc = PathSpec::new(Chart::Affine, vec![b, c]);
        let (Ok(m_ab), Ok(m_bc), Ok(m_ba)) = (k.monodromy(&ab), k.monodromy(&bc), k.monodromy(&ab.reversed())) else {
            return Ok(());
        };
        prop_assert!(m_ab.then(&m_ba).is_identity());
        if let Ok(m_ac) = k.monodromy(&ab.then(&bc)) {
            prop_assert_eq!(m_ac, m_ab.then(&m_bc));
        }
    }

    #[test]
    fn compact_matches_genus4_and_poles_are_normalized(x in point_on(smooth()), y in point_on(smooth())) {
        let k = smooth();
        prop_assume!(x.dist(&y) > 1e-2);
        let ev = KernelEvaluator::new(k);
        let g4 = ev.eval(&x, &y, KernelVariant::Genus4).unwrap().coeff;
        let compact = ev.eval(&x, &y, KernelVariant::Compact).unwrap().coeff;
        prop_assert!((compact - g4).norm() <= 1e-10 * g4.norm().max(compact.norm()));
        for v in [KernelVariant::Symmetric, KernelVariant::Compact, KernelVariant::Genus4] {
            let errs: Vec<f64> = [1e-3, 1e-4, 1e-5]
                .iter()
                .map(|&h| {
                    let near = nudge(k, &y, C64::new(h, 0.0)).unwrap();
                    (ev.eval(&near, &y, v).unwrap().coeff * h - 1.0).norm()
                })
                .collect();
            let c = errs[0] / 1e-3;
            prop_assert!(errs[1] <= 2.0 * c * 1e-4 + 1e-9 && errs[2] <= 2.0 * c * 1e-5 + 1e-9, "{}: {:?}", v, errs);
        }
    }

    #[test]
    fn determinant_ignores_column_shifts(m in matrix(5), from in 0usize..5, to in 0usize..5, s in complex(2.0)) {
        prop_assume!(from != to);
        let base = lu_det(&m).det;
        let shifted: Vec<Vec<C64>> = m
            .iter()
            .map(|r| {
                let mut r = r.clone();
                let add = s * r[from];
                r[to] += add;
                r
            })
            .collect();
        let scale: f64 = m.iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).product();
        prop_assert!((lu_det(&shifted).det - base).norm() <= 1e-10 * scale);
    }

    #[test]
    fn determinant_scales_with_the_column_factor(m in matrix(4), s in complex(2.0)) {
        let base = lu_det(&m).det;
        let scaled: Vec<Vec<C64>> = m.iter().map(|r| r.iter().map(|z| z * s).collect()).collect();
        let scale: f64 = m.iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).product::<f64>() * s.norm().powi(4);
        prop_assert!((lu_det(&scaled).det - base * s.powu(4)).norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
    }
}
