//! Algebraic curves `f = g = 0` in C³: genus, the genus-4 template,
//! Jacobians, fibers over the base coordinate, sheet continuation, branch
//! points and points at infinity.

mod branch;
mod fiber;
mod plane;
mod template;
mod track;

use std::sync::OnceLock;


use crate::error::{Error, Result};
use crate::polyexpr::{MultiPoly, C64};

pub use branch::{BranchPoint, ProjectivePoint, SmoothnessReport};
pub use fiber::Fiber;
pub use plane::{HyperellipticCurve, PlaneCurve};
pub use template::{literal_fixture, TemplateCoeffs};
pub use track::{PathSpec, Permutation};

use fiber::Elimination;

/// Default tolerance on the relative residual of a curve point.
pub const ON_CURVE_TOL: f64 = 1e-9;
/// Base values closer than this are treated as the same branch point.
pub const BRANCH_MERGE_TOL: f64 = 1e-7;
/// Minimum distance a tracked path keeps from branch points.
pub const PATH_CLEARANCE: f64 = 1e-3;

/// Genus `1 + d_F d_G (d_F + d_G - 4) / 2` of a smooth complete intersection.
pub fn genus(d_f: u32, d_g: u32) -> Result<u32> {
    let bad = |reason: &str| Error::InvalidDegrees {
        d_f,
        d_g,
        reason: reason.to_string(),
    };
    if d_f == 0 || d_g == 0 {
        return Err(bad("degrees must be positive"));
    }
    let twice = d_f as i64 * d_g as i64 * (d_f as i64 + d_g as i64 - 4);
    if twice % 2 != 0 {
        return Err(bad("d_F d_G (d_F + d_G - 4) is odd"));
    }
    let g = 1 + twice / 2;
    if g < 0 {
        return Err(bad("negative genus"));
    }
    Ok(g as u32)
}

/// Coordinate chart on the base line: `x1` itself, or `x1' = 1/x1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    Affine,
    Infinity,
}

impl Chart {
    /// Base-coordinate value of an affine point in this chart.
    pub fn base(self, x1: C64) -> C64 {
        match self {
            Chart::Affine => x1,
            Chart::Infinity => x1.inv(),
        }
    }

    /// The affine `x1` above a base value of this chart.
    pub fn affine_x1(self, base: C64) -> C64 {
        self.base(base)
    }

    /// `dx1/d(base)`: 1 in the affine chart, `-1/x1'^2` at infinity.
    pub fn dx1_dbase(self, base: C64) -> C64 {
        match self {
            Chart::Affine => C64::new(1.0, 0.0),
            Chart::Infinity => -(base * base).inv(),
        }
    }
}

/// A point of the curve in affine coordinates with its relative residual
/// `max(|f|/(1+|f|_abs), |g|/(1+|g|_abs))`, where `|p|_abs` sums the term
/// magnitudes at the point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub x: [C64; 3],
    pub residual: f64,
}

impl CurvePoint {
    pub fn x1(&self) -> C64 {
        self.x[0]
    }

    pub fn dist(&self, other: &CurvePoint) -> f64 {
        (0..3).map(|i| (self.x[i] - other.x[i]).norm()).fold(0.0, f64::max)
    }
}

/// The curve `f(x1,x2,x3) = g(x1,x2,x3) = 0`.
#[derive(Debug)]
pub struct SpaceCurve {
    f: MultiPoly,
    g: MultiPoly,
    d_f: u32,
    d_g: u32,
    tol: f64,
    grad_f: [MultiPoly; 3],
    grad_g: [MultiPoly; 3],
    elimination: OnceLock<Result<Elimination>>,
    infinity: OnceLock<Box<SpaceCurve>>,
}

impl Clone for SpaceCurve {
    fn clone(&self) -> Self {
        // Caches are rebuilt on demand.
        SpaceCurve::build(self.f.clone(), self.g.clone(), self.d_f, self.d_g, self.tol)
    }
}

impl SpaceCurve {
    pub fn new(f: MultiPoly, g: MultiPoly) -> Result<Self> {
        for p in [&f, &g] {
            if p.nvars() != 3 {
                return Err(Error::Arity {
                    expected: 3,
                    got: p.nvars(),
                });
            }
            if p.is_constant() {
                return Err(Error::Invalid("curve equations must be nonconstant".into()));
            }
        }
        let (d_f, d_g) = (f.total_degree(), g.total_degree());
        genus(d_f, d_g)?;
        Ok(Self::build(f, g, d_f, d_g, ON_CURVE_TOL))
    }

    fn build(f: MultiPoly, g: MultiPoly, d_f: u32, d_g: u32, tol: f64) -> Self {
        let grad_f = [f.partial(0), f.partial(1), f.partial(2)];
        let grad_g = [g.partial(0), g.partial(1), g.partial(2)];
        SpaceCurve {
            f,
            g,
            d_f,
            d_g,
            tol,
            grad_f,
            grad_g,
            elimination: OnceLock::new(),
            infinity: OnceLock::new(),
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn f(&self) -> &MultiPoly {
        &self.f
    }

    pub fn g(&self) -> &MultiPoly {
        &self.g
    }

    pub fn degrees(&self) -> (u32, u32) {
        (self.d_f, self.d_g)
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn genus(&self) -> u32 {
        genus(self.d_f, self.d_g).expect("checked at construction")
    }

    /// Largest coefficient magnitude of `f` and `g`.
    pub fn coeff_scale(&self) -> f64 {
        self.f.coeff_scale().max(self.g.coeff_scale())
    }

    /// Relative residual of `x`; see [`CurvePoint`].
    pub fn residual(&self, x: &[C64; 3]) -> f64 {
        let rf = self.f.eval_unchecked(x).norm() / (1.0 + self.f.eval_abs_terms(x));
        let rg = self.g.eval_unchecked(x).norm() / (1.0 + self.g.eval_abs_terms(x));
        rf.max(rg)
    }

    /// Wraps `x` as a curve point after checking the residual.
    pub fn point(&self, x: [C64; 3]) -> Result<CurvePoint> {
        let residual = self.residual(&x);
        if !(residual <= self.tol) {
            return Err(Error::OffCurve { residual });
        }
        Ok(CurvePoint { x, residual })
    }

    /// `(∇f, ∇g)` at `x`.
    pub fn gradients(&self, x: &[C64; 3]) -> ([C64; 3], [C64; 3]) {
        let df = std::array::from_fn(|i| self.grad_f[i].eval_unchecked(x));
        let dg = std::array::from_fn(|i| self.grad_g[i].eval_unchecked(x));
        (df, dg)
    }

    /// `J^i = ε^{ikl} ∂_k f ∂_l g` with `ε^{123} = 1`.
    pub fn jacobians(&self, x: &[C64; 3]) -> [C64; 3] {
        let (df, dg) = self.gradients(x);
        cross(&df, &dg)
    }

    /// `J^1` alone.
    pub fn j1(&self, x: &[C64; 3]) -> C64 {
        let (df, dg) = self.gradients(x);
        df[1] * dg[2] - df[2] * dg[1]
    }

    /// Newton's method on `(f, g)` in `(x2, x3)` with `x1` held fixed.
    pub fn newton_fixed_x1(&self, x: [C64; 3], max_iter: usize) -> Result<CurvePoint> {
        let mut x = x;
        let target = 1e-15;
        for _ in 0..max_iter {
            let res = self.residual(&x);
            if res <= target {
                return Ok(CurvePoint { x, residual: res });
            }
            let fv = self.f.eval_unchecked(&x);
            let gv = self.g.eval_unchecked(&x);
            let (df, dg) = self.gradients(&x);
            let det = df[1] * dg[2] - df[2] * dg[1];
            if det.norm() == 0.0 || !det.is_finite() {
                break;
            }
            let d2 = (fv * dg[2] - gv * df[2]) / det;
            let d3 = (gv * df[1] - fv * dg[1]) / det;
            x[1] -= d2;
            x[2] -= d3;
            let step = d2.norm().max(d3.norm());
            let size = 1.0 + x[1].norm().max(x[2].norm());
            if step <= 4.0 * f64::EPSILON * size {
                let res = self.residual(&x);
                return Ok(CurvePoint { x, residual: res });
            }
        }
        let residual = self.residual(&x);
        if residual <= self.tol {
            return Ok(CurvePoint { x, residual });
        }
        Err(Error::NewtonDiverged(format!(
            "residual {residual:e} after {max_iter} iterations"
        )))
    }

    /// Projects a nearby triple onto the curve keeping `x1` fixed.
    pub fn polish(&self, x: [C64; 3]) -> Result<CurvePoint> {
        let p = self.newton_fixed_x1(x, 50)?;
        if p.residual > self.tol {
            return Err(Error::OffCurve {
                residual: p.residual,
            });
        }
        Ok(p)
    }

    /// The curve in the chart `(x1', X2, X3) = (1/x1, x2/x1, x3/x1)`:
    /// `f̂ = x1'^{d_F} f(1/x1', X2/x1', X3/x1')` and likewise for `g`.
    pub fn chart_curve(&self, chart: Chart) -> &SpaceCurve {
        match chart {
            Chart::Affine => self,
            Chart::Infinity => self.infinity.get_or_init(|| {
                let hat = |p: &MultiPoly| {
                    let h = p.homogenize().expect("three variables");
                    h.substitute_value(1, C64::new(1.0, 0.0))
                        .drop_var(1)
                        .expect("x1 substituted")
                };
                Box::new(SpaceCurve::build(
                    hat(&self.f),
                    hat(&self.g),
                    self.d_f,
                    self.d_g,
                    self.tol,
                ))
            }),
        }
    }

    /// Affine point to chart coordinates.
    pub fn to_chart(chart: Chart, x: &[C64; 3]) -> [C64; 3] {
        match chart {
            Chart::Affine => *x,
            Chart::Infinity => {
                let t = x[0].inv();
                [t, x[1] * t, x[2] * t]
            }
        }
    }

    /// Chart coordinates back to an affine point (the involution above).
    pub fn from_chart(chart: Chart, x: &[C64; 3]) -> [C64; 3] {
        Self::to_chart(chart, x)
    }

    fn elimination(&self) -> Result<&Elimination> {
        self.elimination
            .get_or_init(|| Elimination::new(self))
            .as_ref()
            .map_err(Clone::clone)
    }
}

pub(crate) fn cross(a: &[C64; 3], b: &[C64; 3]) -> [C64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
