//! Sheet continuation along paths in the base coordinate, and monodromy.

use std::f64::consts::TAU;

use super::{Chart, CurvePoint, SpaceCurve};
use crate::error::{Error, Result};
use crate::polyexpr::C64;

/// A polyline in the base coordinate of `chart`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSpec {
    pub chart: Chart,
    pub waypoints: Vec<C64>,
    pub max_step: f64,
}

impl PathSpec {
    pub fn new(chart: Chart, waypoints: Vec<C64>) -> Self {
        PathSpec {
            chart,
            waypoints,
            max_step: 0.05,
        }
    }

    /// Closed polygon with `nodes` vertices on the circle `|z - center| = radius`,
    /// starting and ending at `center + radius·e^{i·start_angle}`.
    pub fn circle(chart: Chart, center: C64, radius: f64, nodes: usize, start_angle: f64) -> Self {
        let waypoints = (0..=nodes)
            .map(|k| center + C64::from_polar(radius, start_angle + TAU * k as f64 / nodes as f64))
            .collect();
        PathSpec {
            chart,
            waypoints,
            max_step: radius * 0.5,
        }
    }

    pub fn reversed(&self) -> Self {
        let mut p = self.clone();
        p.waypoints.reverse();
        p
    }

    /// This path followed by `other`, which must start where this one ends.
    pub fn then(&self, other: &PathSpec) -> Self {
        let mut p = self.clone();
        p.waypoints.extend(other.waypoints.iter().skip(1));
        p.max_step = self.max_step.min(other.max_step);
        p
    }

    pub fn start(&self) -> C64 {
        self.waypoints[0]
    }

    pub fn end(&self) -> C64 {
        *self.waypoints.last().expect("nonempty path")
    }
}

/// Permutation of a canonically sorted fiber: sheet `i` ends on sheet `map[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    pub map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Permutation) -> Self {
        Permutation {
            map: self.map.iter().map(|&j| other.map[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            map[j] = i;
        }
        Permutation { map }
    }

    /// Cycle lengths in decreasing order, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.map.len()];
        let mut out = Vec::new();
        for s in 0..self.map.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.map[i];
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// `Σ (cycle length - 1)`: the ramification carried by the loop.
    pub fn ramification(&self) -> usize {
        self.cycle_type().iter().map(|l| l - 1).sum()
    }

    pub fn is_transposition(&self) -> bool {
        self.ramification() == 1 && self.cycle_type()[0] == 2
    }
}

impl SpaceCurve {
    /// Analytic continuation of `start` along `path`.
    pub fn continue_point(&self, start: &CurvePoint, path: &PathSpec) -> Result<CurvePoint> {
        if path.waypoints.is_empty() {
            return Err(Error::Invalid("empty path".into()));
        }
        let base0 = path.chart.base(start.x1());
        if (base0 - path.start()).norm() > 1e-9 * (1.0 + base0.norm()) {
            return Err(Error::Invalid(format!(
                "path starts at {} but the point lies over {}",
                path.start(),
                base0
            )));
        }
        let cc = self.chart_curve(path.chart);
        let mut y = SpaceCurve::to_chart(path.chart, &start.x);
        y[0] = path.start();
        for w in path.waypoints.windows(2) {
            y = cc.track_segment(y, w[1], path.max_step)?;
        }
        let x = SpaceCurve::from_chart(path.chart, &y);
        let p = CurvePoint {
            x,
            residual: self.residual(&x),
        };
        if p.residual > self.tol {
            return Err(Error::NewtonDiverged(format!(
                "continued point has residual {:e}",
                p.residual
            )));
        }
        Ok(p)
    }

    /// Sheet permutation induced by a closed path, relative to the canonical
    /// order of the fiber over its start.
    pub fn monodromy(&self, path: &PathSpec) -> Result<Permutation> {
        if (path.start() - path.end()).norm() > 1e-12 * (1.0 + path.start().norm()) {
            return Err(Error::Invalid("monodromy needs a closed path".into()));
        }
        let fib = self.fiber(path.start(), path.chart)?;
        if fib.degenerate {
            return Err(Error::Invalid("loop starts on a degenerate fiber".into()));
        }
        let ends = fib
            .points
            .iter()
            .map(|p| self.continue_point(p, path))
            .collect::<Result<Vec<_>>>()?;
        match_points(&fib.points, &ends)
    }

    /// Predictor-corrector tracking of the chart-local point `y` (whose
    /// first coordinate is the base value) to base value `target`.
    pub(crate) fn track_segment(&self, mut y: [C64; 3], target: C64, max_step: f64) -> Result<[C64; 3]> {
        let a = y[0];
        let span = target - a;
        let len = span.norm();
        if len == 0.0 {
            return Ok(y);
        }
        let mut s = 0.0f64;
        let mut h = (max_step / len).min(1.0);
        let min_h = 1e-13 * (1.0 + a.norm()) / len;
        while s < 1.0 {
            h = h.min(1.0 - s);
            let j1_now = self.j1(&y);
            let step = self.rk4(&y, span * h);
            let accepted = step.and_then(|pred| {
                let mut z = pred;
                z[0] = a + span * (s + h);
                let dj = (self.j1(&z) - j1_now).norm();
                if !(dj <= 0.3 * j1_now.norm()) {
                    return None;
                }
                let moved = (1..3).map(|k| (z[k] - y[k]).norm()).fold(0.0, f64::max);
                self.correct(z, moved).map(|(w, iters)| (w, iters))
            });
            match accepted {
                Some((w, iters)) => {
                    y = w;
                    s += h;
                    if iters <= 2 {
                        h *= 1.5;
                    }
                    h = h.min(max_step / len);
                }
                None => {
                    h *= 0.5;
                    if h < min_h {
                        return Err(Error::StepUnderflow {
                            at: format!("{}", a + span * s),
                        });
                    }
                }
            }
        }
        y[0] = target;
        Ok(y)
    }

    /// Tangent `(1, J²/J¹, J³/J¹)` times `dz`.
    fn tangent(&self, y: &[C64; 3], dz: C64) -> Option<[C64; 3]> {
        let j = self.jacobians(y);
        if j[0].norm() == 0.0 {
            return None;
        }
        Some([dz, dz * j[1] / j[0], dz * j[2] / j[0]])
    }

    fn rk4(&self, y: &[C64; 3], dz: C64) -> Option<[C64; 3]> {
        let add = |a: &[C64; 3], b: &[C64; 3], s: f64| -> [C64; 3] {
            [a[0] + b[0] * s, a[1] + b[1] * s, a[2] + b[2] * s]
        };
        let k1 = self.tangent(y, dz)?;
        let k2 = self.tangent(&add(y, &k1, 0.5), dz)?;
        let k3 = self.tangent(&add(y, &k2, 0.5), dz)?;
        let k4 = self.tangent(&add(y, &k3, 1.0), dz)?;
        let out: [C64; 3] = std::array::from_fn(|i| {
            y[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) / 6.0
        });
        out.iter().all(|z| z.is_finite()).then_some(out)
    }

    /// Newton corrector with a contraction test; `None` when the prediction
    /// is not safely inside the basin of the tracked sheet.
    fn correct(&self, mut z: [C64; 3], moved: f64) -> Option<([C64; 3], usize)> {
        let size = 1.0 + z[1].norm().max(z[2].norm());
        let mut prev = f64::INFINITY;
        for it in 1..=8 {
            let fv = self.f().eval_unchecked(&z);
            let gv = self.g().eval_unchecked(&z);
            let (df, dg) = self.gradients(&z);
            let det = df[1] * dg[2] - df[2] * dg[1];
            if det.norm() == 0.0 {
                return None;
            }
            let d2 = (fv * dg[2] - gv * df[2]) / det;
            let d3 = (gv * df[1] - fv * dg[1]) / det;
            let dn = d2.norm().max(d3.norm());
            if !dn.is_finite() {
                return None;
            }
            if it == 1 && dn > 0.05 * moved + 1e-10 * size {
                return None;
            }
            if it > 1 && dn > 0.25 * prev && dn > 1e-13 * size {
                return None;
            }
            z[1] -= d2;
            z[2] -= d3;
            if dn <= 1e-15 * size {
                return Some((z, it));
            }
            prev = dn;
        }
        (self.residual(&z) <= self.tol).then_some((z, 8))
    }
}

/// Matches tracked end points to a reference fiber one-to-one.
pub(crate) fn match_points(reference: &[CurvePoint], ends: &[CurvePoint]) -> Result<Permutation> {
    let scale = reference
        .iter()
        .map(|p| p.x.iter().map(|z| z.norm()).fold(1.0, f64::max))
        .fold(1.0, f64::max);
    let mut map = Vec::with_capacity(ends.len());
    let mut used = vec![false; reference.len()];
    for e in ends {
        let (j, d) = reference
            .iter()
            .enumerate()
            .map(|(j, r)| (j, r.dist(e)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::Invalid("empty fiber".into()))?;
        if d > 1e-6 * scale || used[j] {
            return Err(Error::NoConvergence(
                "continued points do not match the fiber one-to-one".into(),
            ));
        }
        used[j] = true;
        map.push(j);
    }
    Ok(Permutation { map })
}
