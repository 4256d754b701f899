use super::taylor::Taylor;
use super::{DifferentialValue, NEAR_TOL};
use crate::curve::{CurvePoint, HyperellipticCurve, PlaneCurve, SpaceCurve};
use crate::error::{Error, Result};
use crate::polyexpr::C64;

/// `dx1 / (x1 - y1)`.
pub fn cauchy(x1: C64, y1: C64) -> Result<DifferentialValue> {
    if x1 == y1 {
        return Err(Error::Pole("Cauchy kernel at coincident points".into()));
    }
    Ok(DifferentialValue::affine((x1 - y1).inv(), 1))
}

/// `f(y1, x2) dx1 / ((x2 - y2) f_x2(x) (x1 - y1))` on a plane curve.
pub fn plane_weierstrass(c: &PlaneCurve, x: [C64; 2], y: [C64; 2]) -> Result<DifferentialValue> {
    let fx2 = c.f_x2(&x);
    let scale = 1.0 + x.iter().chain(&y).map(|z| z.norm()).fold(0.0, f64::max);
    if fx2.norm() <= 1e-14 * (1.0 + c.f().eval_abs_terms(&x)) {
        return Err(Error::ChartSingular(
            "f_x2 vanishes at x: branch point of this projection".into(),
        ));
    }
    let near = [
        (x[0] - y[0]).norm() < NEAR_TOL * scale,
        (x[1] - y[1]).norm() < NEAR_TOL * scale,
    ];
    let coeff = match near {
        [false, false] => {
            c.eval(&[y[0], x[1]]) / ((x[1] - y[1]) * fx2 * (x[0] - y[0]))
        }
        [true, false] => {
            // f(y1, x2) = (y1 - x1)·D₁f at x
            let t = Taylor::new(c.f());
            -t.divided(&x, 0, y[0]) / ((x[1] - y[1]) * fx2)
        }
        [false, true] => {
            // f(y1, x2) = (x2 - y2)·D₂f at y
            let t = Taylor::new(c.f());
            t.divided(&y, 1, x[1]) / (fx2 * (x[0] - y[0]))
        }
        [true, true] => return Err(Error::Pole("plane kernel at coincident points".into())),
    };
    Ok(DifferentialValue::affine(coeff, 1))
}

pub fn hyperelliptic_r(h: &HyperellipticCurve, x1: C64, x1p: C64) -> C64 {
    h.r(x1, x1p)
}

/// `τ = -(y y' + R(x, x')) dx / (2 (x - x')² y y')`, where `y = ±√P(x)` and
/// `y' = ±√P(x')` on the sheets given by `signs`.
pub fn hyperelliptic_tau(h: &HyperellipticCurve, x1: C64, x1p: C64, signs: (i8, i8)) -> Result<DifferentialValue> {
    if x1 == x1p {
        return Err(Error::Pole("second-kind differential at its pole".into()));
    }
    let y = h.y(x1, signs.0);
    let yp = h.y(x1p, signs.1);
    if y.norm() == 0.0 || yp.norm() == 0.0 {
        return Err(Error::ChartSingular("y vanishes: branch point of y² = P(x)".into()));
    }
    let yy = y * yp;
    let d = x1 - x1p;
    let coeff = -(yy + h.r(x1, x1p)) / (2.0 * d * d * yy);
    Ok(DifferentialValue::affine(coeff, 1))
}

/// The four coefficient functions multiplying `ω₁..ω₄(x)` in the part of
/// the genus-4 kernel that diverges as `y1 → ∞`.
pub fn asymptotic_coeffs(c: &SpaceCurve, y: &CurvePoint) -> Result<[C64; 4]> {
    let t = c
        .template_coeffs()
        .ok_or_else(|| Error::Invalid("asymptotic coefficients need the genus-4 template".into()))?;
    let [y1, y2, y3] = y.x;
    if y1.norm() == 0.0 {
        return Err(Error::Pole("asymptotic coefficients at y1 = 0".into()));
    }
    let a = |i, k, l| t.get(i, k, l);
    let h1 = t.h(1).eval_unchecked(&y.x);
    let h2 = t.h(2).eval_unchecked(&y.x);
    let a1 = -(a(3, 0, 3) * y2.powu(3) + a(3, 0, 2) * y2 * y2) / y1;
    let a2 = -a(3, 0, 3) * y2.powu(3) / (y1 * y1) - a(3, 1, 2) * y2 * y2 / y1;
    let a3 = -a(3, 0, 3) * y2 * y2 / y1;
    let a4 = (-a(2, 0, 2) * y2 * y2 + 7.0 * y3 * y3 + 3.0 * y3 * h1 + h2) / y1;
    Ok([a1, a2, a3, a4])
}
