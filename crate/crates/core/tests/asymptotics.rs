//! Large-`y1` behaviour of the genus-4 kernel, checked against the kernel
//! itself: `J¹(x) K(x, y) - Σ m_i(x) A_i(y)` with `m = (1, x1, x2, x3)`
//! must stay bounded as `y1 → ∞` on every branch.

use weierkern::curve::{Chart, CurvePoint, SpaceCurve};
use weierkern::fixtures;
use weierkern::kernel::{asymptotic_coeffs, KernelEvaluator, KernelVariant};
use weierkern::C64;

/// `A4` from expanding `K` directly: the same shape as the shipped one
/// with unit coefficients on `y3²` and `y3 h1`.
fn expanded_a4(k: &SpaceCurve, y: &CurvePoint) -> C64 {
    let t = k.template_coeffs().unwrap();
    let [y1, y2, y3] = y.x;
    let h = |i| t.h(i).eval(&y.x).unwrap();
    (-t.get(2, 0, 2) * y2 * y2 + y3 * y3 + y3 * h(1) + h(2)) / y1
}

/// Worst remainder over `xs` for each point above `y1`, with the shipped
/// `A4` and with the expanded one; also whether `x3` diverges there.
fn remainders(k: &SpaceCurve, xs: &[CurvePoint], y1: C64) -> Vec<(f64, f64, bool)> {
    let ev = KernelEvaluator::new(k);
    let fib = k.fiber(1.0 / y1, Chart::Infinity).unwrap();
    assert!(!fib.degenerate && fib.points.len() == 6);
    fib.points
        .iter()
        .map(|y| {
            let a = asymptotic_coeffs(k, y).unwrap();
            let alt = expanded_a4(k, y);
            let (mut shipped, mut expanded) = (0.0f64, 0.0f64);
            for x in xs {
                let q = ev.eval(x, y, KernelVariant::Genus4).unwrap().coeff * k.j1(&x.x);
                let s = a[0] + x.x[0] * a[1] + x.x[1] * a[2];
                shipped = shipped.max((q - s - x.x[2] * a[3]).norm());
                expanded = expanded.max((q - s - x.x[2] * alt).norm());
            }
            (shipped, expanded, y.x[2].norm() > y.x[1].norm())
        })
        .collect()
}

#[test]
fn shipped_a4_disagrees_with_the_expanded_kernel_on_x3_branches() {
    let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    let xs: Vec<CurvePoint> = (0..12)
        .map(|i| {
            let b = C64::new(-1.1 + 0.2 * i as f64, 0.4 - 0.07 * i as f64);
            k.fiber(b, Chart::Affine).unwrap().points[i % 6]
        })
        .collect();
    let dir = C64::new(0.8, 0.6);
    let near = remainders(&k, &xs, dir * 1e2);
    let far = remainders(&k, &xs, dir * 1e4);
    assert_eq!(near.iter().filter(|r| r.2).count(), 3);
    for (n, f) in near.iter().zip(&far) {
        println!("x3 divergent {}: shipped {:.2e} -> {:.2e}, expanded {:.2e} -> {:.2e}", f.2, n.0, f.0, n.1, f.1);
        assert!(n.1 < 10.0 && f.1 < 10.0);
        if f.2 {
            // The shipped coefficients leave a remainder growing like y1.
            assert!(f.0 > 50.0 * n.0);
        } else {
            assert!(f.0 < 10.0);
        }
    }
}
