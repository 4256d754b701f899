use super::*;
use crate::diffbasis::{eval_basis, holomorphic_basis};
use crate::fixtures;
use crate::linalg::hermitian_eigenvalues;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn unit_disc_area() {
    let one = |_: C64| Ok(vec![c(1.0, 0.0)]);
    let r = disc_integral(&one, 1, &[], &GridConfig::default()).unwrap();
    assert!((r[0].value - PI).norm() < 1e-10);
    assert!(r[0].converged);
}

#[test]
fn integrable_singularities_converge() {
    // ∫_{|z|≤1} |z - a|^{-1} dA with a inside the disc, against a radial
    // reference computed in polar coordinates about a.
    let a = c(0.3, -0.2);
    let f = |z: C64| Ok(vec![c(1.0 / (z - a).norm(), 0.0)]);
    let got = disc_integral(&f, 1, &[a], &GridConfig::default()).unwrap()[0];
    // The integral equals ∫_0^{2π} ρ(θ) dθ, ρ the distance from a to the
    // unit circle along direction θ.
    let n = 20000;
    let want: f64 = (0..n)
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
            let d = c(t.cos(), t.sin());
            let b = (a.conj() * d).re;
            -b + (b * b - a.norm_sqr() + 1.0).sqrt()
        })
        .sum::<f64>()
        * 2.0
        * PI
        / n as f64;
    assert!((got.value.re - want).abs() < 1e-5 * want, "{} vs {want}", got.value);
    assert!((got.value.re - want).abs() <= got.est_error);
}

#[test]
fn chart_split_radius_does_not_matter() {
    // ∫_{P¹} dA/(1+|z|²)² = π, split at |z| = 1 and at |z| = 2.
    let cfg = GridConfig::default();
    let rho = |z: C64| 1.0 / (1.0 + z.norm_sqr()).powi(2);
    let split = |s: f64| {
        let inner = |u: C64| Ok(vec![c(s * s * rho(u * s), 0.0)]);
        // z = 1/w with |w| ≤ 1/s; dA_z = dA_w/|w|⁴.
        let outer = |u: C64| {
            let w = u / s;
            Ok(vec![c(rho(w.inv()) / (s * s * w.norm_sqr().powi(2)), 0.0)])
        };
        disc_integral(&inner, 1, &[], &cfg).unwrap()[0].value
            + disc_integral(&outer, 1, &[], &cfg).unwrap()[0].value
    };
    let (a, b) = (split(1.0), split(2.0));
    assert!((a - PI).norm() < 1e-4 * PI);
    assert!((a - b).norm() < 1e-4 * PI);
}

#[test]
fn gram_matrix_is_hermitian_positive_definite() {
    let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    let w = holomorphic_basis(&k).unwrap();
    let si = SurfaceIntegrator::new(&k, GridConfig::default()).unwrap();
    let forms = |p: &CurvePoint| eval_basis(&k, &w, p, Chart::Affine);
    let m = si.gram(&forms).unwrap();
    let vals: Vec<Vec<C64>> = m.iter().map(|r| r.iter().map(|q| q.value).collect()).collect();
    for i in 0..4 {
        for j in 0..4 {
            let tol = m[i][j].est_error + m[j][i].est_error + 1e-12;
            assert!((vals[i][j] - vals[j][i].conj()).norm() <= tol.max(1e-8 * vals[i][i].norm()));
        }
    }
    let eig = hermitian_eigenvalues(&vals);
    assert!(eig.iter().all(|&e| e > 0.0), "{eig:?}");
}

#[test]
fn monte_carlo_zero_form_and_jacobian() {
    let k = fixtures::literal();
    let zero = |_: &CurvePoint| Ok(DifferentialValue::affine(c(0.0, 0.0), 1));
    let smooth = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
    let r = surface_integral_mc(&smooth, zero, zero, 600, 1e-3, 1).unwrap();
    assert_eq!(r.value, c(0.0, 0.0));
    let y = [c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)];
    assert_eq!(k.j1(&y), c(-6.0, 0.0));
    assert!(surface_integral_mc(&smooth, zero, zero, 600, 0.0, 1).is_err());
}
