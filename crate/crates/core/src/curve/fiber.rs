//! Fibers over the base coordinate by elimination.
//!
//! A generic linear coordinate `u = x2 + c·x3` is eliminated against `x3`,
//! giving a plane curve `R(x1, u) = 0` whose roots in `u` are in bijection
//! with the fiber for generic `x1`. Each root is lifted back by solving the
//! two equations for `x3` and the lift is Newton-polished on `(f, g)`.


use super::{Chart, CurvePoint, SpaceCurve};
use crate::error::{Error, Result};
use crate::linalg::poly_roots;
use crate::polyexpr::{horner, resultant, MultiPoly, C64};

/// Slope of the projection `u = x2 + c·x3`.
const PROJECTION_SLOPE: C64 = C64::new(0.537_719_2, 0.284_117_6);

pub(crate) fn slope() -> C64 {
    PROJECTION_SLOPE
}

#[derive(Debug)]
pub(crate) struct Elimination {
    /// `R = Σ_k r[k](x1) u^k`, each `r[k]` as coefficients in `x1`.
    r: Vec<Vec<C64>>,
    /// `f` and `g` with `x2 = u - c·x3`, in variables `(x1, u, x3)`,
    /// split by powers of `x3`.
    f_u: Vec<MultiPoly>,
    g_u: Vec<MultiPoly>,
    /// The projected plane curve `R(x1, u)` in variables `(x1, u)`.
    plane: MultiPoly,
}

impl Elimination {
    pub(crate) fn new(curve: &SpaceCurve) -> Result<Self> {
        let shift = &MultiPoly::var(3, 1) - &MultiPoly::var(3, 2).scale(PROJECTION_SLOPE);
        let f_u = curve.f().substitute(1, &shift)?;
        let g_u = curve.g().substitute(1, &shift)?;
        let res = resultant(&f_u, &g_u, 2)?;
        if res.is_zero() {
            return Err(Error::Elimination(
                "projection resultant vanishes identically".into(),
            ));
        }
        if !res.depends_on(1) {
            return Err(Error::Elimination(
                "curve contains a component over a single base value".into(),
            ));
        }
        let plane = res.drop_var(2)?;
        let r = plane
            .univariate_coeffs(1)
            .iter()
            .map(|c| c.to_univariate(0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Elimination {
            r,
            f_u: f_u.univariate_coeffs(2),
            g_u: g_u.univariate_coeffs(2),
            plane,
        })
    }

    pub(crate) fn degree(&self) -> usize {
        self.r.len() - 1
    }

    pub(crate) fn plane(&self) -> &MultiPoly {
        &self.plane
    }

    fn u_coeffs(&self, x1: C64) -> Vec<C64> {
        self.r.iter().map(|c| horner(c, x1)).collect()
    }
}

/// All points of the curve above one base value.
#[derive(Clone, Debug)]
pub struct Fiber {
    pub chart: Chart,
    pub base: C64,
    pub points: Vec<CurvePoint>,
    /// Set when the base value sits on (or within merge tolerance of) a
    /// branch point; the points are then clustered and may be fewer.
    pub degenerate: bool,
}

impl SpaceCurve {
    /// Number of fiber points above a generic base value.
    pub fn fiber_degree(&self) -> Result<usize> {
        Ok(self.elimination()?.degree())
    }

    /// The projected plane curve `R(x1, u)` with `u = x2 + c·x3`.
    pub fn projection(&self) -> Result<&MultiPoly> {
        Ok(self.elimination()?.plane())
    }

    /// Fiber above `base` in `chart`, in canonical order (argument, then
    /// modulus, of `x3`).
    pub fn fiber(&self, base: C64, chart: Chart) -> Result<Fiber> {
        if chart == Chart::Infinity && base.norm() == 0.0 {
            return Err(Error::Pole(
                "the fiber over x1' = 0 lies at infinity; use points_at_infinity".into(),
            ));
        }
        let (local, degenerate) = self.chart_curve(chart).local_fiber(base)?;
        let mut points = Vec::with_capacity(local.len());
        for y in local {
            let x = SpaceCurve::from_chart(chart, &y);
            points.push(CurvePoint {
                x,
                residual: self.residual(&x),
            });
        }
        sort_canonical(&mut points);
        Ok(Fiber {
            chart,
            base,
            points,
            degenerate,
        })
    }

    /// Fiber of this curve (taken as its own affine chart) above `x1`,
    /// unsorted; also reports whether the fiber is degenerate.
    pub(crate) fn local_fiber(&self, x1: C64) -> Result<(Vec<[C64; 3]>, bool)> {
        let el = self.elimination()?;
        let mut coeffs = el.u_coeffs(x1);
        let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let full = coeffs.len() - 1;
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= 1e-14 * top {
            coeffs.pop();
        }
        let mut degenerate = coeffs.len() - 1 < full;
        let us = poly_roots(&coeffs)
            .ok_or_else(|| Error::NoConvergence("eigenvalues of the fiber polynomial".into()))?;
        let clusters = cluster_ranks(&us, 1e-6);
        let mut out: Vec<[C64; 3]> = Vec::with_capacity(us.len());
        for (u, rank) in us.iter().zip(clusters) {
            let x3 = lift(el, x1, *u, rank)?;
            let guess = [x1, *u - PROJECTION_SLOPE * x3, x3];
            match self.newton_fixed_x1(guess, 50) {
                Ok(p) => out.push(p.x),
                Err(e) => {
                    // Near a branch point Newton converges slowly or not at
                    // all; the eigenvalue lift is then the best available.
                    if self.residual(&guess) <= self.tol.sqrt() {
                        degenerate = true;
                        out.push(guess);
                    } else {
                        return Err(e);
                    }
                }
            }
        }
        let scale = out
            .iter()
            .map(|x| x.iter().map(|z| z.norm()).fold(1.0, f64::max))
            .fold(1.0, f64::max);
        for i in 0..out.len() {
            for j in 0..i {
                let d = (0..3).map(|k| (out[i][k] - out[j][k]).norm()).fold(0.0, f64::max);
                if d <= 1e-6 * scale {
                    degenerate = true;
                }
            }
        }
        Ok((out, degenerate))
    }
}

/// For each root, its index within its cluster of nearly equal roots.
fn cluster_ranks(us: &[C64], rel: f64) -> Vec<usize> {
    let mut rank = vec![0; us.len()];
    for i in 0..us.len() {
        rank[i] = (0..i)
            .filter(|&j| (us[i] - us[j]).norm() <= rel * (1.0 + us[i].norm()))
            .count();
    }
    rank
}

/// Finds `x3` with `f = g = 0` above `(x1, u)`: roots of the equation of
/// lower positive degree in `x3`, ranked by how well they satisfy the other.
/// `rank` selects among the candidates when `u` is a repeated root.
fn lift(el: &Elimination, x1: C64, u: C64, rank: usize) -> Result<C64> {
    let at = |p: &[MultiPoly]| -> Vec<C64> {
        p.iter()
            .map(|c| c.eval_unchecked(&[x1, u, C64::new(0.0, 0.0)]))
            .collect()
    };
    let fc = trim(at(&el.f_u));
    let gc = trim(at(&el.g_u));
    let (solve, check) = match (fc.len() - 1, gc.len() - 1) {
        (0, 0) => {
            return Err(Error::Elimination(
                "both equations are constant in x3 above this point".into(),
            ))
        }
        (0, _) => (gc, fc),
        (_, 0) => (fc, gc),
        (a, b) if b <= a => (gc, fc),
        _ => (fc, gc),
    };
    let roots = poly_roots(&solve)
        .ok_or_else(|| Error::NoConvergence("eigenvalues in the lift".into()))?;
    let score = |z: &C64| {
        let scale: f64 = check
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm() * z.norm().powi(k as i32))
            .sum();
        horner(&check, *z).norm() / (1.0 + scale)
    };
    let mut ranked: Vec<(f64, C64)> = roots.iter().map(|z| (score(z), *z)).collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    ranked
        .get(rank.min(ranked.len().saturating_sub(1)))
        .map(|r| r.1)
        .ok_or_else(|| Error::Elimination("no lift above a projected root".into()))
}

fn trim(mut c: Vec<C64>) -> Vec<C64> {
    while c.len() > 1 && c.last().unwrap().norm() == 0.0 {
        c.pop();
    }
    c
}

pub(crate) fn sort_canonical(points: &mut [CurvePoint]) {
    points.sort_by(|a, b| {
        a.x[2]
            .arg()
            .total_cmp(&b.x[2].arg())
            .then(a.x[2].norm().total_cmp(&b.x[2].norm()))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::literal_fixture;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hand_fiber_at_minus_one() {
        let k = literal_fixture().curve().unwrap();
        assert_eq!(k.fiber_degree().unwrap(), 6);
        let fib = k.fiber(c(-1.0, 0.0), Chart::Affine).unwrap();
        assert_eq!(fib.points.len(), 6);
        assert!(!fib.degenerate);
        for p in &fib.points {
            assert!((p.x[2].powu(6) - 1.0).norm() < 1e-12);
            assert!((p.x[1] + p.x[2].inv()).norm() < 1e-12);
            assert!(p.residual < 1e-14);
        }
        assert!(fib
            .points
            .iter()
            .any(|p| (p.x[1] + 1.0).norm() < 1e-12 && (p.x[2] - 1.0).norm() < 1e-12));
    }

    #[test]
    fn generic_fiber_in_both_charts() {
        let k = literal_fixture().curve().unwrap();
        let a = k.fiber(c(0.3, -0.7), Chart::Affine).unwrap();
        assert_eq!(a.points.len(), 6);
        let b = k.fiber(c(0.3, -0.7).inv(), Chart::Infinity).unwrap();
        assert_eq!(b.points.len(), 6);
        for (p, q) in a.points.iter().zip(&b.points) {
            assert!(p.dist(q) < 1e-10);
        }
    }

    #[test]
    fn infinity_base_zero_is_rejected() {
        let k = literal_fixture().curve().unwrap();
        assert!(k.fiber(c(0.0, 0.0), Chart::Infinity).is_err());
    }
}
