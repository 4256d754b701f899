//! Contour residues, Laurent coefficients and pole orders of differentials,
//! by the trapezoidal rule on circles in a base chart.
//!
//! The contour is lifted to the curve by continuation from an anchor point,
//! so the integrand is always evaluated on one consistent sheet. Around a
//! branch point of multiplicity `ν` the lift closes only after `ν` turns;
//! that is allowed in multi-sheet mode and the integral runs over all turns.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::curve::{Chart, CurvePoint, SpaceCurve};
use crate::error::{Error, Result};
use crate::kernel::DifferentialValue;
use crate::polyexpr::C64;

pub const DEFAULT_NODES: usize = 64;
pub const DEFAULT_RADIUS: f64 = 1e-2;
pub const DEFAULT_TOL: f64 = 1e-8;
const MAX_POLE_ORDER: usize = 6;

#[derive(Clone, Debug)]
pub struct ContourSpec {
    pub center: C64,
    pub radius: f64,
    pub nodes: usize,
    pub chart: Chart,
    /// Selects the sheet: the lift starts at the point above the first node
    /// nearest to the anchor in chart coordinates.
    pub sheet_anchor: CurvePoint,
    pub multi_sheet: bool,
    pub tol: f64,
}

impl ContourSpec {
    pub fn new(chart: Chart, center: C64, sheet_anchor: CurvePoint) -> Self {
        ContourSpec {
            center,
            radius: DEFAULT_RADIUS,
            nodes: DEFAULT_NODES,
            chart,
            sheet_anchor,
            multi_sheet: false,
            tol: DEFAULT_TOL,
        }
    }

    pub fn radius(mut self, r: f64) -> Self {
        self.radius = r;
        self
    }

    pub fn nodes(mut self, n: usize) -> Self {
        self.nodes = n;
        self
    }

    pub fn multi_sheet(mut self, on: bool) -> Self {
        self.multi_sheet = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::Invalid(format!("contour radius must be positive, got {}", self.radius)));
        }
        if self.nodes < 16 {
            return Err(Error::Invalid(format!("need at least 16 nodes, got {}", self.nodes)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourResult {
    pub value: C64,
    /// Change under halving the node count.
    pub est_error: f64,
    pub nodes_used: usize,
    /// Turns of the base circle needed for the lift to close.
    pub turns: usize,
}

/// Integrand samples along a lifted contour: `F` in the chart's base
/// coordinate at `center + r e^{iθ_j}`, `θ_j = 2πj/M` for each turn.
struct Samples {
    values: Vec<C64>,
    /// Offsets `z_j - center`.
    offsets: Vec<C64>,
    turns: usize,
    max_abs: f64,
}

/// The lift of the contour: curve points above `2·nodes` equispaced base
/// values per turn, continued from the anchor.
pub fn lift_contour(c: &SpaceCurve, spec: &ContourSpec) -> Result<(Vec<CurvePoint>, usize)> {
    spec.validate()?;
    let m = 2 * spec.nodes;
    let node = |j: usize| spec.center + C64::from_polar(spec.radius, TAU * j as f64 / m as f64);
    let fib = c.fiber(node(0), spec.chart)?;
    let anchor = SpaceCurve::to_chart(spec.chart, &spec.sheet_anchor.x);
    let local = |p: &CurvePoint| SpaceCurve::to_chart(spec.chart, &p.x);
    let dist = |a: &[C64; 3], b: &[C64; 3]| (0..3).map(|k| (a[k] - b[k]).norm()).fold(0.0, f64::max);
    let start = fib
        .points
        .iter()
        .min_by(|p, q| dist(&local(p), &anchor).total_cmp(&dist(&local(q), &anchor)))
        .ok_or_else(|| Error::Invalid("empty fiber at the first contour node".into()))?;
    let cc = c.chart_curve(spec.chart);
    let y0 = local(start);
    let scale = 1.0 + y0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let max_turns = fib.points.len().max(1);
    let mut y = y0;
    let mut points = Vec::with_capacity(m);
    for turn in 1..=max_turns {
        for j in 0..m {
            points.push(CurvePoint {
                x: SpaceCurve::from_chart(spec.chart, &y),
                residual: cc.residual(&y),
            });
            y = cc.track_segment(y, node(j + 1), spec.radius * 0.5)?;
        }
        if dist(&y, &y0) <= 1e-8 * scale {
            return Ok((points, turn));
        }
        if !spec.multi_sheet {
            return Err(Error::Invalid(
                "the contour encloses a branch point; request multi-sheet mode".into(),
            ));
        }
    }
    Err(Error::NoConvergence(format!(
        "lifted contour did not close after {max_turns} turns"
    )))
}

fn sample<F>(c: &SpaceCurve, spec: &ContourSpec, f: &F) -> Result<Samples>
where
    F: Fn(&CurvePoint) -> Result<DifferentialValue> + Sync,
{
    let (points, turns) = lift_contour(c, spec)?;
    let m = 2 * spec.nodes;
    let offsets: Vec<C64> = (0..points.len())
        .map(|j| C64::from_polar(spec.radius, TAU * (j % m) as f64 / m as f64))
        .collect();
    let values = points
        .par_iter()
        .map(|p| f(p).map(|v| v.in_chart(spec.chart, p.x1()).coeff))
        .collect::<Result<Vec<_>>>()?;
    let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(Samples {
        values,
        offsets,
        turns,
        max_abs,
    })
}

impl Samples {
    /// Trapezoidal `(1/2πi)∮ F (z-c)^{-k-1} dz` using every `stride`-th node.
    fn coeff(&self, k: i32, stride: usize) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut count = 0usize;
        for (v, w) in self.values.iter().zip(&self.offsets).step_by(stride) {
            acc += v * w.powi(-k);
            count += 1;
        }
        acc * (self.turns as f64 / count as f64)
    }

    fn result(&self, k: i32, spec: &ContourSpec) -> Result<ContourResult> {
        let fine = self.coeff(k, 1);
        let coarse = self.coeff(k, 2);
        let est_error = (fine - coarse).norm();
        let scale = self.max_abs * spec.radius.powi(-k);
        if est_error > 10.0 * spec.tol * scale.max(fine.norm()).max(f64::MIN_POSITIVE) {
            return Err(Error::NoConvergence(format!(
                "node doubling changed the coefficient by {est_error:e}"
            )));
        }
        Ok(ContourResult {
            value: fine,
            est_error,
            nodes_used: self.values.len(),
            turns: self.turns,
        })
    }
}

pub fn contour_residue<F>(c: &SpaceCurve, f: F, spec: &ContourSpec) -> Result<ContourResult>
where
    F: Fn(&CurvePoint) -> Result<DifferentialValue> + Sync,
{
    laurent_coeff(c, f, spec, -1)
}

/// `(1/2πi)∮ F (z - center)^{-k-1} dz`.
pub fn laurent_coeff<F>(c: &SpaceCurve, f: F, spec: &ContourSpec, k: i32) -> Result<ContourResult>
where
    F: Fn(&CurvePoint) -> Result<DifferentialValue> + Sync,
{
    sample(c, spec, &f)?.result(k, spec)
}

/// Coefficient of `t^k` in the local coordinate `t` with `z - center = t^ν`,
/// `ν` the number of turns the lifted contour needs. A weight-`w` value
/// `F dz^w` has coefficient `F (ν t^{ν-1})^w` in `t`, so `k = -1` is the
/// residue of a differential and vanishes for holomorphic ones of any
/// weight, branch points included.
pub fn local_coeff<F>(c: &SpaceCurve, f: F, spec: &ContourSpec, k: i32) -> Result<ContourResult>
where
    F: Fn(&CurvePoint) -> Result<DifferentialValue> + Sync,
{
    let (points, turns) = lift_contour(c, spec)?;
    let n = points.len();
    let nu = turns as f64;
    let rho = spec.radius.powf(1.0 / nu);
    let ts: Vec<C64> = (0..n).map(|j| C64::from_polar(rho, TAU * j as f64 / n as f64)).collect();
    let values = points
        .par_iter()
        .zip(&ts)
        .map(|(p, &t)| {
            let v = f(p)?.in_chart(spec.chart, p.x1());
            Ok(v.coeff * (nu * t.powf(nu - 1.0)).powu(v.weight as u32))
        })
        .collect::<Result<Vec<C64>>>()?;
    let coeff = |stride: usize| {
        let mut acc = C64::new(0.0, 0.0);
        let mut count = 0usize;
        for (v, t) in values.iter().zip(&ts).step_by(stride) {
            acc += v * t.powi(-k);
            count += 1;
        }
        acc / count as f64
    };
    let fine = coeff(1);
    let est_error = (fine - coeff(2)).norm();
    let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = max_abs * rho.powi(-k);
    if est_error > 10.0 * spec.tol * scale.max(fine.norm()).max(f64::MIN_POSITIVE) {
        return Err(Error::NoConvergence(format!(
            "node doubling changed the local coefficient by {est_error:e}"
        )));
    }
    Ok(ContourResult {
        value: fine,
        est_error,
        nodes_used: n,
        turns,
    })
}

/// Largest `m ≥ 1` whose coefficient `c_{-m}` is significant against the
/// size of `F` on the contour, or 0 when `F` is regular.
pub fn pole_order<F>(c: &SpaceCurve, f: F, spec: &ContourSpec) -> Result<usize>
where
    F: Fn(&CurvePoint) -> Result<DifferentialValue> + Sync,
{
    let s = sample(c, spec, &f)?;
    order_from(|k| s.coeff(k, 1), s.max_abs, spec)
}

fn order_from(coeff: impl Fn(i32) -> C64, max_abs: f64, spec: &ContourSpec) -> Result<usize> {
    let significant = |m: usize| coeff(-(m as i32)).norm() * spec.radius.powi(-(m as i32)) >= spec.tol * max_abs;
    if significant(MAX_POLE_ORDER + 1) {
        return Err(Error::NoConvergence(format!(
            "pole order exceeds {MAX_POLE_ORDER}"
        )));
    }
    Ok((1..=MAX_POLE_ORDER).rev().find(|&m| significant(m)).unwrap_or(0))
}

/// Laurent coefficient of a plain function of one variable around `center`.
pub fn laurent_scalar(f: impl Fn(C64) -> C64 + Sync, center: C64, radius: f64, nodes: usize, k: i32) -> ContourResult {
    let m = 2 * nodes;
    let offsets: Vec<C64> = (0..m).map(|j| C64::from_polar(radius, TAU * j as f64 / m as f64)).collect();
    let values: Vec<C64> = offsets.par_iter().map(|w| f(center + w)).collect();
    let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let s = Samples {
        values,
        offsets,
        turns: 1,
        max_abs,
    };
    let fine = s.coeff(k, 1);
    ContourResult {
        value: fine,
        est_error: (fine - s.coeff(k, 2)).norm(),
        nodes_used: m,
        turns: 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffbasis::{eval_basis, holomorphic_basis};
    use crate::fixtures;
    use crate::kernel::{hyperelliptic_tau, KernelEvaluator, KernelVariant};
    use crate::curve::HyperellipticCurve;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn scalar_contours() {
        let r = laurent_scalar(|z| (z - 2.0).inv(), c(2.0, 0.0), 0.5, 32, -1);
        assert!((r.value - 1.0).norm() < 1e-14);
        let r2 = laurent_scalar(|z| (z * z).inv(), c(0.0, 0.0), 0.5, 32, -2);
        assert!((r2.value - 1.0).norm() < 1e-14);
        let r1 = laurent_scalar(|z| (z * z).inv(), c(0.0, 0.0), 0.5, 32, -1);
        assert!(r1.value.norm() < 1e-14);
    }

    #[test]
    fn kernel_residue_at_its_pole() {
        let k = fixtures::literal();
        let y = k.point([c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let ev = KernelEvaluator::new(&k);
        let spec = ContourSpec::new(Chart::Affine, y.x1(), y);
        let res = contour_residue(&k, |x| ev.eval(x, &y, KernelVariant::Genus4), &spec).unwrap();
        assert!((res.value - 1.0).norm() < 1e-8, "{:?}", res);
        assert_eq!(pole_order(&k, |x| ev.eval(x, &y, KernelVariant::Genus4), &spec).unwrap(), 1);
        // K₂ has c₋₁ = ω₁(y) and no double pole.
        let omega1 = 1.0 / k.j1(&y.x);
        let r1 = laurent_coeff(&k, |x| ev.quadratic(x, &y), &spec, -1).unwrap();
        assert!((r1.value - omega1).norm() < 1e-8);
        let r2 = laurent_coeff(&k, |x| ev.quadratic(x, &y), &spec, -2).unwrap();
        assert!(r2.value.norm() < 1e-8);
    }

    #[test]
    fn holomorphic_differential_is_regular() {
        let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
        let basis = holomorphic_basis(&k).unwrap();
        let p = k.fiber(c(0.2, 0.3), Chart::Affine).unwrap().points[1];
        let spec = ContourSpec::new(Chart::Affine, p.x1(), p).radius(0.05);
        let f = |x: &CurvePoint| Ok(eval_basis(&k, &basis, x, Chart::Affine)?[0]);
        assert!(contour_residue(&k, f, &spec).unwrap().value.norm() < 1e-10);
        assert_eq!(pole_order(&k, f, &spec).unwrap(), 0);
    }

    #[test]
    fn local_coordinate_sees_no_pole_at_a_branch_point() {
        let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
        let b = &k.branch_points(0).unwrap()[0];
        let anchor = k.point(b.point).unwrap();
        let spec = ContourSpec::new(Chart::Affine, b.base, anchor).radius(1e-2).multi_sheet(true);
        let q = crate::diffbasis::quadratic_basis(&k).unwrap();
        for i in 0..q.len() {
            let r = local_coeff(&k, |x| Ok(eval_basis(&k, &q, x, Chart::Affine)?[i]), &spec, -1).unwrap();
            assert_eq!(r.turns, 2);
            assert!(r.value.norm() < 1e-8, "phi_{i}: {:?}", r);
        }
        // Away from branch points t = x1 - center and nothing changes.
        let p = k.fiber(c(0.3, 0.4), Chart::Affine).unwrap().points[0];
        let ev = KernelEvaluator::new(&k);
        let spec = ContourSpec::new(Chart::Affine, p.x1(), p);
        let a = local_coeff(&k, |x| ev.eval(x, &p, KernelVariant::Compact), &spec, -1).unwrap();
        let b = contour_residue(&k, |x| ev.eval(x, &p, KernelVariant::Compact), &spec).unwrap();
        assert!((a.value - b.value).norm() < 1e-12);
        assert!((a.value - 1.0).norm() < 1e-8);
    }

    #[test]
    fn multi_sheet_loop_closes_after_two_turns() {
        let k = fixtures::smooth(fixtures::SMOOTH_SEED).unwrap();
        let b = &k.branch_points(0).unwrap()[0];
        let anchor = k.point(b.point).unwrap();
        let spec = ContourSpec::new(Chart::Affine, b.base, anchor).radius(1e-3);
        assert!(lift_contour(&k, &spec).is_err());
        let (_, turns) = lift_contour(&k, &spec.clone().multi_sheet(true)).unwrap();
        assert_eq!(turns, 2);
    }

    #[test]
    fn second_kind_differential_has_a_pure_double_pole() {
        let h = HyperellipticCurve::new(vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]).unwrap();
        let xp = c(0.3, -0.6);
        let tau = |z: C64| hyperelliptic_tau(&h, z, xp, (1, 1)).map(|v| v.coeff).unwrap_or(c(f64::NAN, 0.0));
        let m2 = laurent_scalar(tau, xp, 1e-2, 64, -2);
        assert!((m2.value + 1.0).norm() < 1e-8);
        let m1 = laurent_scalar(tau, xp, 1e-2, 64, -1);
        assert!(m1.value.norm() < 1e-8);
    }
}
