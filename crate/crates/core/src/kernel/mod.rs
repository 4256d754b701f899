//! Weierstrass-type kernels and other differentials, evaluated pointwise.
//!
//! Every value is the coefficient of `dx1` (or `dx1²`) at the first point.
//! Ratios whose numerator vanishes on the curve are evaluated through exact
//! divided differences once two points nearly share a coordinate, so the
//! removable `0/0` forms stay finite.

mod special;
mod taylor;

use std::fmt;
use std::str::FromStr;

pub use special::{
    asymptotic_coeffs, cauchy, hyperelliptic_r, hyperelliptic_tau, plane_weierstrass,
};

use crate::curve::{Chart, CurvePoint, SpaceCurve};
use crate::error::{Error, Result};
use crate::polyexpr::C64;
use taylor::Taylor;

/// Relative distance below which two coordinates count as coincident.
pub const NEAR_TOL: f64 = 1e-7;

/// Coefficient of `dx1^weight` (or `dx1'^weight` in the infinity chart).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DifferentialValue {
    pub coeff: C64,
    pub weight: u8,
    pub chart: Chart,
}

impl DifferentialValue {
    pub fn affine(coeff: C64, weight: u8) -> Self {
        DifferentialValue {
            coeff,
            weight,
            chart: Chart::Affine,
        }
    }

    /// The same differential expressed in `chart`, at a point with affine
    /// base coordinate `x1`. Uses `dx1 = -x1² dx1'`.
    pub fn in_chart(self, chart: Chart, x1: C64) -> Self {
        if chart == self.chart {
            return self;
        }
        let jac = (-x1 * x1).powu(self.weight as u32);
        let coeff = match chart {
            Chart::Infinity => self.coeff * jac,
            Chart::Affine => self.coeff / jac,
        };
        DifferentialValue {
            coeff,
            weight: self.weight,
            chart,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelVariant {
    Symmetric,
    Compact,
    BranchedCover,
    Genus4,
}

impl KernelVariant {
    pub const ALL: [KernelVariant; 4] = [
        KernelVariant::Symmetric,
        KernelVariant::Compact,
        KernelVariant::BranchedCover,
        KernelVariant::Genus4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelVariant::Symmetric => "sym",
            KernelVariant::Compact => "compact",
            KernelVariant::BranchedCover => "cover",
            KernelVariant::Genus4 => "g4",
        }
    }
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown kernel variant `{s}` (sym|compact|cover|g4)")))
    }
}

/// `(N¹, N², N³)` at a pair of points, straight from their definition.
pub fn numerators(c: &SpaceCurve, x: &CurvePoint, y: &CurvePoint) -> [C64; 3] {
    let (x, y) = (&x.x, &y.x);
    let (f, g) = (c.f(), c.g());
    let mut out = [C64::new(0.0, 0.0); 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let (a, b) = mixed_points(k, x, y);
        *slot = f.eval_unchecked(&a) * g.eval_unchecked(&b) - f.eval_unchecked(&b) * g.eval_unchecked(&a);
    }
    out
}

/// Coordinate roles in `N^k = f(A)g(B) - f(B)g(A)`: `A` is `y` with
/// coordinate `a` taken from `x`, `B` is `x` with coordinate `b` taken from
/// `y`, and `A`, `B` differ only in coordinate `i`.
const ROLES: [(usize, usize, usize); 3] = [(0, 2, 1), (1, 0, 2), (2, 1, 0)];

fn mixed_points(k: usize, x: &[C64; 3], y: &[C64; 3]) -> ([C64; 3], [C64; 3]) {
    let (_, a, b) = ROLES[k];
    let mut pa = *y;
    pa[a] = x[a];
    let mut pb = *x;
    pb[b] = y[b];
    (pa, pb)
}

pub fn kernel_eval(c: &SpaceCurve, x: &CurvePoint, y: &CurvePoint, variant: KernelVariant) -> Result<DifferentialValue> {
    KernelEvaluator::new(c).eval(x, y, variant)
}

/// `ν_{y,y'}(x) = K(x,y) - K(x,y')`.
pub fn third_kind(
    c: &SpaceCurve,
    x: &CurvePoint,
    y: &CurvePoint,
    yp: &CurvePoint,
    variant: KernelVariant,
) -> Result<DifferentialValue> {
    KernelEvaluator::new(c).third_kind(x, y, yp, variant)
}

/// `K₂(x,y) = K(x,y) / J¹(x)` with the genus-4 kernel; weight 2.
pub fn quadratic_kernel(c: &SpaceCurve, x: &CurvePoint, y: &CurvePoint) -> Result<DifferentialValue> {
    KernelEvaluator::new(c).quadratic(x, y)
}

/// Kernel evaluation with the derivative tables of one curve cached.
#[derive(Clone, Debug)]
pub struct KernelEvaluator<'a> {
    curve: &'a SpaceCurve,
    tf: Taylor,
    tg: Taylor,
    template: bool,
    cover: bool,
}

impl<'a> KernelEvaluator<'a> {
    pub fn new(curve: &'a SpaceCurve) -> Self {
        KernelEvaluator {
            curve,
            tf: Taylor::new(curve.f()),
            tg: Taylor::new(curve.g()),
            template: curve.template_coeffs().is_some(),
            cover: !curve.f().depends_on(2) && !curve.g().depends_on(0),
        }
    }

    pub fn curve(&self) -> &'a SpaceCurve {
        self.curve
    }

    pub fn eval(&self, x: &CurvePoint, y: &CurvePoint, variant: KernelVariant) -> Result<DifferentialValue> {
        let mut near = near_flags(&x.x, &y.x);
        if near.iter().all(|&n| n) {
            // Close to the pole in every coordinate the direct formulas are
            // still accurate to about eps/distance; only a shared coordinate
            // stops them.
            if (0..3).any(|i| x.x[i] == y.x[i] || (x.x[i] - y.x[i]).norm() <= 1e-13 * (1.0 + y.x[i].norm())) {
                return Err(Error::Pole("kernel evaluated at coincident points".into()));
            }
            near = [false; 3];
        }
        let coeff = match variant {
            KernelVariant::Symmetric => {
                let j1 = self.j1_checked(&x.x)?;
                let mut sum = C64::new(0.0, 0.0);
                for k in 0..3 {
                    sum += self.n_over_pi(k, &x.x, &y.x, near)?;
                }
                sum / (3.0 * j1)
            }
            KernelVariant::Compact => self.compact(&x.x, &y.x, near)?,
            KernelVariant::BranchedCover => self.branched_cover(&x.x, &y.x, near)?,
            KernelVariant::Genus4 => self.genus4(&x.x, &y.x, near)?,
        };
        Ok(DifferentialValue::affine(coeff, 1))
    }

    pub fn third_kind(
        &self,
        x: &CurvePoint,
        y: &CurvePoint,
        yp: &CurvePoint,
        variant: KernelVariant,
    ) -> Result<DifferentialValue> {
        if y.x == yp.x {
            return Ok(DifferentialValue::affine(C64::new(0.0, 0.0), 1));
        }
        let a = self.eval(x, y, variant)?;
        let b = self.eval(x, yp, variant)?;
        Ok(DifferentialValue::affine(a.coeff - b.coeff, 1))
    }

    pub fn quadratic(&self, x: &CurvePoint, y: &CurvePoint) -> Result<DifferentialValue> {
        let k = self.eval(x, y, KernelVariant::Genus4)?;
        let j1 = self.j1_checked(&x.x)?;
        Ok(DifferentialValue::affine(k.coeff / j1, 2))
    }

    /// `P(x, y)` with `K = P dx1 / (J¹(x)(x1 - y1))` on the genus-4
    /// template, from the exact Taylor rewriting of the two ratios.
    pub fn p_form(&self, x: &[C64; 3], y: &[C64; 3]) -> Result<C64> {
        self.require_template()?;
        let fy = self.tf.divided(y, 2, x[2]);
        let fx = self.tf.divided(x, 1, y[1]);
        Ok(y[1] * fx - x[2] * fy)
    }

    fn j1_checked(&self, x: &[C64; 3]) -> Result<C64> {
        let (df, dg) = self.curve.gradients(x);
        let j1 = df[1] * dg[2] - df[2] * dg[1];
        let scale = (df[1] * dg[2]).norm() + (df[2] * dg[1]).norm();
        if j1.norm() <= 1e-14 * scale || j1.norm() == 0.0 {
            return Err(Error::ChartSingular(format!(
                "J¹ vanishes at ({}, {}, {}); use another base coordinate",
                x[0], x[1], x[2]
            )));
        }
        Ok(j1)
    }

    fn require_template(&self) -> Result<()> {
        if self.template {
            Ok(())
        } else {
            Err(Error::Invalid(
                "the genus-4 kernel needs g = x2 x3 - x1 and f monic cubic in x3".into(),
            ))
        }
    }

    /// `N^k / Π` with `Π = (x1-y1)(x2-y2)(x3-y3)`.
    fn n_over_pi(&self, k: usize, x: &[C64; 3], y: &[C64; 3], near: [bool; 3]) -> Result<C64> {
        let (i, a, b) = ROLES[k];
        if !near.iter().any(|&n| n) {
            let (pa, pb) = mixed_points(k, x, y);
            let (f, g) = (self.curve.f(), self.curve.g());
            let n = f.eval_unchecked(&pa) * g.eval_unchecked(&pb) - f.eval_unchecked(&pb) * g.eval_unchecked(&pa);
            return Ok(n / pi(x, y));
        }
        // On the curve f(A) = (x_a - y_a)·D_a f(y) and f(B) = (y_b - x_b)·D_b f(x).
        let dfa = self.tf.divided(y, a, x[a]);
        let dga = self.tg.divided(y, a, x[a]);
        if !near[i] {
            let dfb = self.tf.divided(x, b, y[b]);
            let dgb = self.tg.divided(x, b, y[b]);
            return Ok(-(dfa * dgb - dfb * dga) / (x[i] - y[i]));
        }
        if near[b] {
            // Only coordinate `a` differs. Along the curve N^k ≈ δ_i δ_a J^b
            // while the two small factors of Π are δ_i δ_b, and δ_a / δ_b is
            // the tangent ratio J^a / J^b.
            return Ok(self.curve.jacobians(x)[a] / (x[a] - y[a]));
        }
        let (pa, _) = mixed_points(k, x, y);
        let dfi = self.tf.divided(&pa, i, x[i]);
        let dgi = self.tg.divided(&pa, i, x[i]);
        Ok((dfa * dgi - dga * dfi) / (x[b] - y[b]))
    }

    fn compact(&self, x: &[C64; 3], y: &[C64; 3], near: [bool; 3]) -> Result<C64> {
        let j1 = self.j1_checked(x)?;
        Ok(self.n_over_pi(0, x, y, near)? / j1)
    }

    fn branched_cover(&self, x: &[C64; 3], y: &[C64; 3], near: [bool; 3]) -> Result<C64> {
        if !self.cover {
            return Err(Error::Invalid(
                "the branched-cover kernel needs f(x1, x2) and g(x2, x3)".into(),
            ));
        }
        let (df, dg) = self.curve.gradients(x);
        let den = df[1] * dg[2];
        if den.norm() == 0.0 {
            return Err(Error::ChartSingular("F_x2 G_x3 vanishes at x".into()));
        }
        let (f, g) = (self.curve.f(), self.curve.g());
        if !near.iter().any(|&n| n) {
            let fv = f.eval_unchecked(&[x[0], y[1], x[2]]);
            let gv = g.eval_unchecked(&[x[0], y[1], x[2]]);
            return Ok(-fv * gv / (den * pi(x, y)));
        }
        // f(x1, y2) vanishes when x1 = y1 or x2 = y2; g(y2, x3) when
        // x3 = y3 or x2 = y2. Each absorbs one coincident factor.
        let choice = [(0, 1), (0, 2), (1, 2)]
            .into_iter()
            .find(|&(jf, kg)| (0..3).all(|c| !near[c] || c == jf || c == kg))
            .ok_or_else(|| Error::Pole("points share all coordinates".into()))?;
        let (jf, kg) = choice;
        let fpart = if jf == 0 {
            self.tf.divided(y, 0, x[0])
        } else {
            -self.tf.divided(x, 1, y[1])
        };
        let gpart = if kg == 2 {
            self.tg.divided(y, 2, x[2])
        } else {
            -self.tg.divided(x, 1, y[1])
        };
        let r = 3 - jf - kg;
        Ok(-fpart * gpart / (den * (x[r] - y[r])))
    }

    fn genus4(&self, x: &[C64; 3], y: &[C64; 3], near: [bool; 3]) -> Result<C64> {
        self.require_template()?;
        let j1 = self.j1_checked(x)?;
        if !near.iter().any(|&n| n) {
            let f = self.curve.f();
            let t3 = x[2] * f.eval_unchecked(&[y[0], y[1], x[2]]) / (x[2] - y[2]);
            let t2 = y[1] * f.eval_unchecked(&[x[0], y[1], x[2]]) / (x[1] - y[1]);
            return Ok(-(t3 + t2) / ((x[0] - y[0]) * j1));
        }
        if near[0] {
            // Same base value on another sheet: the compact kernel coincides
            // with this one on the template and resolves the 0/0 in x1.
            return self.compact(x, y, near);
        }
        Ok(self.p_form(x, y)? / (j1 * (x[0] - y[0])))
    }
}

fn pi(x: &[C64; 3], y: &[C64; 3]) -> C64 {
    (x[0] - y[0]) * (x[1] - y[1]) * (x[2] - y[2])
}

fn near_flags(x: &[C64; 3], y: &[C64; 3]) -> [bool; 3] {
    let scale = 1.0 + x.iter().chain(y).map(|z| z.norm()).fold(0.0, f64::max);
    std::array::from_fn(|i| (x[i] - y[i]).norm() < NEAR_TOL * scale)
}

#[cfg(test)]
mod tests;
