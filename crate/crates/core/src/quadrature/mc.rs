//! Monte Carlo evaluation of the three-dimensional form of a surface
//! integral: the curve is replaced by the Gaussian-smeared constraint
//! `δ_ε(f) δ_ε(g) |J(f,g; x2,x3)|²` in each chart.
//!
//! `x1` is drawn uniformly from the unit disc. Around every sheet point
//! `x*` the step in `(x2, x3)` is drawn as `M⁻¹ ε ξ` with `M = ∂(f,g)/∂(x2,x3)`
//! and `ξ` a standard complex Gaussian pair, and all sheets are combined
//! with the balance heuristic so that overlapping proposals near branch
//! points are not double counted.

use num_complex::ComplexFloat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::QuadratureResult;
use crate::curve::{Chart, CurvePoint, SpaceCurve};
use crate::error::{Error, Result};
use crate::kernel::DifferentialValue;
use crate::polyexpr::C64;

const CHUNK: usize = 256;

struct Proposal {
    center: [C64; 3],
    m: [[C64; 2]; 2],
    det: C64,
}

impl Proposal {
    fn step(&self, w: [C64; 2]) -> [C64; 2] {
        let [[a, b], [c, d]] = self.m;
        [(d * w[0] - b * w[1]) / self.det, (a * w[1] - c * w[0]) / self.det]
    }

    /// `|det M|² exp(-|M(x - x*)|²/ε²)`, the proposal density up to the
    /// common factor `(πε²)⁻²`.
    fn density(&self, x: &[C64; 3], eps2: f64) -> f64 {
        let d = [x[1] - self.center[1], x[2] - self.center[2]];
        let w0 = self.m[0][0] * d[0] + self.m[0][1] * d[1];
        let w1 = self.m[1][0] * d[0] + self.m[1][1] * d[1];
        self.det.norm_sqr() * (-(w0.norm_sqr() + w1.norm_sqr()) / eps2).exp()
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

fn uniform_disc(rng: &mut ChaCha8Rng) -> C64 {
    loop {
        let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm_sqr() <= 1.0 && z.norm_sqr() > 0.0 {
            return z;
        }
    }
}

/// `(i/2)∫ α ∧ β̄` estimated from `samples` smeared points (one per sheet
/// per base draw) with Gaussian width `eps` in `(f, g)`.
pub fn surface_integral_mc<A, B>(c: &SpaceCurve, alpha: A, beta: B, samples: usize, eps: f64, seed: u64) -> Result<QuadratureResult>
where
    A: Fn(&CurvePoint) -> Result<DifferentialValue> + Sync,
    B: Fn(&CurvePoint) -> Result<DifferentialValue> + Sync,
{
    if !(eps > 0.0) {
        return Err(Error::Invalid(format!("regularization must be positive, got {eps}")));
    }
    let degree = c.fiber_degree()?;
    let draws = (samples / degree.max(1)).max(2);
    let eps2 = eps * eps;
    let mut out = QuadratureResult {
        value: C64::new(0.0, 0.0),
        est_error: 0.0,
        nodes_used: 0,
        refinement_depth: 0,
        converged: true,
    };
    let mut var = 0.0;
    for (ci, chart) in [Chart::Affine, Chart::Infinity].into_iter().enumerate() {
        let n = draws / 2;
        let chunks = n.div_ceil(CHUNK);
        let sums: Vec<(C64, f64, usize)> = (0..chunks)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((ci * chunks + k) as u64);
                let count = CHUNK.min(n - k * CHUNK);
                let mut s = C64::new(0.0, 0.0);
                let mut s2 = 0.0;
                for _ in 0..count {
                    let v = one_draw(c, &alpha, &beta, chart, eps2, &mut rng)?;
                    s += v;
                    s2 += v.norm_sqr();
                }
                Ok((s, s2, count * degree))
            })
            .collect::<Result<_>>()?;
        let (s, s2, used) = sums
            .into_iter()
            .fold((C64::new(0.0, 0.0), 0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
        let nf = n as f64;
        let mean = s / nf;
        let area = std::f64::consts::PI;
        out.value += mean * area;
        var += area * area * (s2 / nf - mean.norm_sqr()).max(0.0) / nf;
        out.nodes_used += used;
    }
    out.est_error = var.sqrt();
    if out.est_error > 0.5 * out.value.abs() && out.value.abs() > 0.0 {
        out.converged = false;
        return Err(Error::NoConvergence(format!(
            "Monte Carlo variance blowup: {} ± {} with ε = {eps} and {samples} samples",
            out.value, out.est_error
        )));
    }
    Ok(out)
}

fn one_draw<A, B>(c: &SpaceCurve, alpha: &A, beta: &B, chart: Chart, eps2: f64, rng: &mut ChaCha8Rng) -> Result<C64>
where
    A: Fn(&CurvePoint) -> Result<DifferentialValue> + Sync,
    B: Fn(&CurvePoint) -> Result<DifferentialValue> + Sync,
{
    let hat = c.chart_curve(chart);
    let base = uniform_disc(rng);
    let fib = c.fiber(base, chart)?;
    let props: Vec<Proposal> = fib
        .points
        .iter()
        .map(|p| {
            let center = SpaceCurve::to_chart(chart, &p.x);
            let (df, dg) = hat.gradients(&center);
            let m = [[df[1], df[2]], [dg[1], dg[2]]];
            Proposal {
                center,
                m,
                det: m[0][0] * m[1][1] - m[0][1] * m[1][0],
            }
        })
        .collect();
    let eps = eps2.sqrt();
    let mut acc = C64::new(0.0, 0.0);
    for p in &props {
        if p.det.norm() == 0.0 {
            continue;
        }
        let d = p.step([gaussian(rng) * eps, gaussian(rng) * eps]);
        let xs = [p.center[0], p.center[1] + d[0], p.center[2] + d[1]];
        let q: f64 = props.iter().map(|t| t.density(&xs, eps2)).sum();
        let fv = hat.f().eval_unchecked(&xs);
        let gv = hat.g().eval_unchecked(&xs);
        let target = hat.j1(&xs).norm_sqr() * (-(fv.norm_sqr() + gv.norm_sqr()) / eps2).exp();
        if target == 0.0 {
            continue;
        }
        let pt = CurvePoint {
            x: SpaceCurve::from_chart(chart, &xs),
            residual: 0.0,
        };
        let a = alpha(&pt)?.in_chart(chart, pt.x[0]).coeff;
        let b = beta(&pt)?.in_chart(chart, pt.x[0]).coeff;
        acc += a * b.conj() * (target / q);
    }
    Ok(acc)
}
