//! Branch points, points at infinity and the smoothness check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Chart, PathSpec, SpaceCurve, BRANCH_MERGE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{poly_roots, singular_values, solve};
use crate::polyexpr::{resultant, MultiPoly, C64};

/// A finite branch point of the projection to the base coordinate.
#[derive(Clone, Debug)]
pub struct BranchPoint {
    /// Base-coordinate value.
    pub base: C64,
    /// A ramification point above it (where `J¹ = 0`), in `(x1, x2, x3)` order.
    pub point: [C64; 3],
    /// `Σ (ν - 1)` over the points above `base`, read off the monodromy of a
    /// small loop; zero for singular points the projection merely crosses.
    pub multiplicity: usize,
}

/// A point `[ξ0 : ξ1 : ξ2 : ξ3]` of the projective closure with `ξ0 = 0`.
#[derive(Clone, Debug)]
pub struct ProjectivePoint {
    pub coords: [C64; 4],
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct SmoothnessReport {
    pub passed: bool,
    pub points_checked: usize,
    /// Smallest second singular value of the row-normalized 2×4 homogeneous
    /// Jacobian over all checked points.
    pub min_singular_value: f64,
    pub threshold: f64,
    pub failures: Vec<String>,
}

const RANK_THRESHOLD: f64 = 1e-7;

impl SpaceCurve {
    /// The curve with coordinates permuted so that `index` becomes the base.
    fn with_base(&self, index: usize) -> Result<SpaceCurve> {
        let map: [usize; 3] = match index {
            0 => return Ok(self.clone()),
            1 => [1, 0, 2],
            2 => [2, 1, 0],
            _ => {
                return Err(Error::IndexOutOfRange(format!(
                    "coordinate index {index} (expected 0, 1 or 2)"
                )))
            }
        };
        SpaceCurve::new(self.f().remap(3, &map), self.g().remap(3, &map))
    }

    /// Finite branch points over coordinate `index` (0 for `x1`).
    ///
    /// Candidates are the roots of the discriminant of the projected plane
    /// curve; each is confirmed by Newton's method on `(f, g, J¹)` and its
    /// multiplicity is measured by the monodromy of a small loop. Singular
    /// points and crossings of the projection show up with multiplicity 0.
    pub fn branch_points(&self, index: usize) -> Result<Vec<BranchPoint>> {
        let curve = self.with_base(index)?;
        let swap = |x: [C64; 3]| -> [C64; 3] {
            match index {
                1 => [x[1], x[0], x[2]],
                2 => [x[2], x[1], x[0]],
                _ => x,
            }
        };
        let mut out = curve.branch_points_x1()?;
        for b in &mut out {
            b.point = swap(b.point);
        }
        Ok(out)
    }

    fn branch_points_x1(&self) -> Result<Vec<BranchPoint>> {
        let plane = self.projection()?;
        let disc = resultant(plane, &plane.partial(1), 1)?;
        if disc.is_zero() {
            return Err(Error::Elimination(
                "discriminant vanishes identically (not a reduced complete intersection)".into(),
            ));
        }
        let coeffs = disc.to_univariate(0)?;
        let candidates = poly_roots(&coeffs)
            .ok_or_else(|| Error::NoConvergence("discriminant roots".into()))?;
        let j1 = self.j1_poly();
        let grad_j1 = [j1.partial(0), j1.partial(1), j1.partial(2)];
        let mut found: Vec<([C64; 3], C64)> = Vec::new();
        for a in candidates {
            // Repeated discriminant roots are only accurate to a power of
            // the working precision; Newton lands on the true point anyway.
            let Ok((pts, _)) = self.local_fiber(a) else { continue };
            let Some(start) = pts.iter().min_by(|p, q| {
                self.j1_rel(p).total_cmp(&self.j1_rel(q))
            }) else {
                continue;
            };
            let Some(x) = self.newton_three(*start, &j1, &grad_j1) else { continue };
            if found
                .iter()
                .any(|(_, b)| (*b - x[0]).norm() <= BRANCH_MERGE_TOL * (1.0 + b.norm()))
            {
                continue;
            }
            found.push((x, x[0]));
        }
        let bases: Vec<C64> = found.iter().map(|f| f.1).collect();
        let mut out = Vec::with_capacity(found.len());
        for (i, (x, b)) in found.iter().enumerate() {
            let nearest = bases
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, c)| (c - b).norm())
                .fold(f64::INFINITY, f64::min);
            let radius = (0.4 * nearest).min(0.05 * (1.0 + b.norm()));
            let multiplicity = self.local_ramification(*b, radius)?;
            out.push(BranchPoint {
                base: *b,
                point: *x,
                multiplicity,
            });
        }
        out.sort_by(|p, q| p.base.re.total_cmp(&q.base.re).then(p.base.im.total_cmp(&q.base.im)));
        Ok(out)
    }

    /// Ramification over `base`, from the monodromy of a loop of `radius`.
    pub fn local_ramification(&self, base: C64, radius: f64) -> Result<usize> {
        let mut path = PathSpec::circle(Chart::Affine, base, radius, 24, 0.3);
        path.max_step = radius * 0.25;
        Ok(self.monodromy(&path)?.ramification())
    }

    /// Ramification over `x1 = ∞`, from a loop enclosing all finite
    /// branch points.
    pub fn ramification_at_infinity(&self, finite: &[BranchPoint]) -> Result<usize> {
        let reach = finite.iter().map(|b| b.base.norm()).fold(1.0, f64::max);
        let mut path = PathSpec::circle(Chart::Affine, C64::new(0.0, 0.0), 2.0 * reach, 96, 0.1);
        path.max_step = 0.05 * reach;
        Ok(self.monodromy(&path)?.ramification())
    }

    /// `J¹` as a polynomial.
    pub fn j1_poly(&self) -> MultiPoly {
        let (f2, f3) = (self.f().partial(1), self.f().partial(2));
        let (g2, g3) = (self.g().partial(1), self.g().partial(2));
        &(&f2 * &g3) - &(&f3 * &g2)
    }

    fn j1_rel(&self, x: &[C64; 3]) -> f64 {
        let (df, dg) = self.gradients(x);
        let n = |v: &[C64; 3]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        self.j1(x).norm() / (1e-300 + n(&df) * n(&dg))
    }

    /// Newton on the square system `f = g = J¹ = 0`. At singular points of
    /// the curve the system is degenerate and convergence is only linear,
    /// so a looser stopping rule applies after the quadratic phase.
    fn newton_three(&self, mut x: [C64; 3], j1: &MultiPoly, grad_j1: &[MultiPoly; 3]) -> Option<[C64; 3]> {
        for it in 0..200 {
            let rhs = [
                self.f().eval_unchecked(&x),
                self.g().eval_unchecked(&x),
                j1.eval_unchecked(&x),
            ];
            let (df, dg) = self.gradients(&x);
            let dj: Vec<C64> = grad_j1.iter().map(|p| p.eval_unchecked(&x)).collect();
            let rows = vec![df.to_vec(), dg.to_vec(), dj];
            let Some(d) = solve(&rows, &rhs) else {
                // Exactly singular Jacobian: accept if already on the solution.
                return self.three_ok(&x, j1).then_some(x);
            };
            let dn = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for k in 0..3 {
                x[k] -= d[k];
            }
            let size = 1.0 + x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if !dn.is_finite() || dn > 1e6 * size {
                return None;
            }
            if dn <= 1e-14 * size || (it > 40 && dn <= 1e-11 * size) {
                return self.three_ok(&x, j1).then_some(x);
            }
        }
        None
    }

    fn three_ok(&self, x: &[C64; 3], j1: &MultiPoly) -> bool {
        let scale = 1.0 + j1.eval_abs_terms(x);
        self.residual(x) <= 1e-10 && j1.eval_unchecked(x).norm() <= 1e-8 * scale
    }

    /// Points of the closure at `ξ0 = 0`, with multiplicities summing to
    /// `d_F d_G`.
    pub fn points_at_infinity(&self) -> Result<Vec<ProjectivePoint>> {
        let hat = self.chart_curve(Chart::Infinity);
        let plane = hat.projection()?;
        let at0 = plane.substitute_value(0, C64::new(0.0, 0.0)).to_univariate(1)?;
        let mut coeffs = at0;
        let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if top == 0.0 {
            return Err(Error::Elimination(
                "the system at infinity is not zero-dimensional".into(),
            ));
        }
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= 1e-14 * top {
            coeffs.pop();
        }
        let roots = poly_roots(&coeffs).ok_or_else(|| Error::NoConvergence("roots at infinity".into()))?;
        let zero = C64::new(0.0, 0.0);
        let mut out: Vec<ProjectivePoint> = Vec::new();
        let mut reps: Vec<C64> = Vec::new();
        for u in roots {
            if let Some(k) = reps.iter().position(|r| (r - u).norm() <= 1e-5 * (1.0 + u.norm())) {
                out[k].multiplicity += 1;
                continue;
            }
            let pts = hat.lift_at(zero, u)?;
            reps.push(u);
            out.push(ProjectivePoint {
                coords: [zero, C64::new(1.0, 0.0), pts[1], pts[2]],
                multiplicity: 1,
            });
        }
        let counted: usize = out.iter().map(|p| p.multiplicity).sum();
        let expected = (self.degrees().0 * self.degrees().1) as usize;
        if counted < expected {
            let extra = self.infinity_points_without_x1()?;
            let n = extra.len();
            for (i, mut p) in extra.into_iter().enumerate() {
                if i + 1 == n {
                    p.multiplicity = expected - counted - (n - 1);
                }
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Points at infinity with `ξ1 = 0`: common zeros on the line `[x2 : x3]`
    /// of the top-degree forms restricted to `x1 = 0`.
    fn infinity_points_without_x1(&self) -> Result<Vec<ProjectivePoint>> {
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let restrict = |p: &MultiPoly| p.leading_form().substitute_value(0, zero);
        let (a, b) = (restrict(self.f()), restrict(self.g()));
        let mut out = Vec::new();
        let on_line = |x2: C64, x3: C64| {
            let pt = [zero, x2, x3];
            let sa = 1.0 + a.eval_abs_terms(&pt);
            let sb = 1.0 + b.eval_abs_terms(&pt);
            a.eval_unchecked(&pt).norm() <= 1e-8 * sa && b.eval_unchecked(&pt).norm() <= 1e-8 * sb
        };
        if on_line(one, zero) {
            out.push(ProjectivePoint {
                coords: [zero, zero, one, zero],
                multiplicity: 1,
            });
        }
        let ua = a.substitute_value(2, one).to_univariate(1)?;
        if ua.iter().any(|c| c.norm() > 0.0) {
            for x2 in poly_roots(&ua).unwrap_or_default() {
                if on_line(x2, one) && !out.iter().any(|p| (p.coords[2] - x2).norm() < 1e-6) {
                    out.push(ProjectivePoint {
                        coords: [zero, zero, x2, one],
                        multiplicity: 1,
                    });
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Elimination(
                "points at infinity are missing from both charts".into(),
            ));
        }
        Ok(out)
    }

    /// Numerical rank test of the 2×4 homogeneous Jacobian at `samples`
    /// seeded fiber points, the ramification points and the points at
    /// infinity.
    pub fn smoothness_check(&self, samples: usize, seed: u64) -> SmoothnessReport {
        let mut report = SmoothnessReport {
            passed: true,
            points_checked: 0,
            min_singular_value: f64::INFINITY,
            threshold: RANK_THRESHOLD,
            failures: Vec::new(),
        };
        let hf = self.f().homogenize().expect("three variables");
        let hg = self.g().homogenize().expect("three variables");
        let grad_hf: Vec<MultiPoly> = (0..4).map(|i| hf.partial(i)).collect();
        let grad_hg: Vec<MultiPoly> = (0..4).map(|i| hg.partial(i)).collect();
        let check = |xi: [C64; 4], label: String, report: &mut SmoothnessReport| {
            let row = |gr: &[MultiPoly]| -> Vec<C64> {
                let v: Vec<C64> = gr.iter().map(|p| p.eval_unchecked(&xi)).collect();
                let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if n == 0.0 {
                    v
                } else {
                    v.iter().map(|z| z / n).collect()
                }
            };
            let sv = singular_values(&[row(&grad_hf), row(&grad_hg)]);
            let s2 = sv.get(1).copied().unwrap_or(0.0);
            report.points_checked += 1;
            report.min_singular_value = report.min_singular_value.min(s2);
            if !(s2 > RANK_THRESHOLD) {
                report.passed = false;
                report.failures.push(format!("rank drop at {label} (σ₂ = {s2:.3e})"));
            }
        };
        let one = C64::new(1.0, 0.0);
        let affine = |x: &[C64; 3]| [one, x[0], x[1], x[2]];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let base = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            match self.fiber(base, Chart::Affine) {
                Ok(fib) => {
                    for p in &fib.points {
                        check(affine(&p.x), format!("fiber point over {base}"), &mut report);
                    }
                }
                Err(e) => {
                    report.passed = false;
                    report.failures.push(format!("fiber over {base}: {e}"));
                }
            }
        }
        match self.branch_points(0) {
            Ok(bps) => {
                for b in &bps {
                    check(affine(&b.point), format!("ramification point over {}", b.base), &mut report);
                }
            }
            Err(e) => {
                report.passed = false;
                report.failures.push(format!("branch points: {e}"));
            }
        }
        match self.points_at_infinity() {
            Ok(pts) => {
                for p in &pts {
                    if p.multiplicity > 1 {
                        report.passed = false;
                        report
                            .failures
                            .push(format!("point at infinity of multiplicity {}", p.multiplicity));
                    }
                    check(p.coords, "point at infinity".into(), &mut report);
                }
            }
            Err(e) => {
                report.passed = false;
                report.failures.push(format!("points at infinity: {e}"));
            }
        }
        report
    }

    /// The fiber point above `x1` whose projection is nearest to `u`.
    fn lift_at(&self, x1: C64, u: C64) -> Result<[C64; 3]> {
        let (pts, _) = self.local_fiber(x1)?;
        let c = super::fiber::slope();
        pts.into_iter()
            .min_by(|p, q| {
                let dp = (p[1] + c * p[2] - u).norm();
                let dq = (q[1] + c * q[2] - u).norm();
                dp.total_cmp(&dq)
            })
            .ok_or_else(|| Error::Elimination("empty fiber at infinity".into()))
    }
}
