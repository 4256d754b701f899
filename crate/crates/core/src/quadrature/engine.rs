//! Adaptive cubature of vector-valued functions over the closed unit disc.
//!
//! The disc is cut into cells of the polar rectangle `[0,1] × [0,2π]`.
//! Regular cells get a tensor Gauss–Legendre rule. A cell holding a point
//! singularity is split into four triangles with apex at the singularity
//! and each triangle is mapped from the unit square by
//! `p = P + w²·(V₁ + v(V₂ - V₁) - P)`; the Jacobian `2w³` cancels `1/r`
//! and turns `1/√r` behavior into a smooth function of `w`.
//!
//! Refinement is global: each round splits the cells whose embedded error
//! estimate is within a factor of four of the worst, until the summed
//! estimate meets the target. Cells split along their physically longer
//! side, so thin polar cells near a singularity do not waste depth.

use std::f64::consts::TAU;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;

use super::{GridConfig, QuadratureResult};
use crate::error::Result;
use crate::polyexpr::C64;

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Rule {
    fn new(n: usize) -> Rule {
        let gl = GaussLegendre::new(n.max(1).try_into().expect("nonzero"));
        let (x, w) = gl
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .unzip();
        Rule { x, w }
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
    depth: usize,
}

impl Cell {
    /// Halves the cell along its physically longer side, or both sides
    /// when they are comparable.
    fn split(&self) -> Vec<Cell> {
        let rm = 0.5 * (self.r0 + self.r1);
        let tm = 0.5 * (self.t0 + self.t1);
        let d = self.depth + 1;
        let radial = self.r1 - self.r0;
        let angular = rm * (self.t1 - self.t0);
        let cut_r = angular <= 2.0 * radial;
        let cut_t = radial <= 2.0 * angular;
        let rs: &[(f64, f64)] = if cut_r { &[(self.r0, rm), (rm, self.r1)] } else { &[(self.r0, self.r1)] };
        let ts: &[(f64, f64)] = if cut_t { &[(self.t0, tm), (tm, self.t1)] } else { &[(self.t0, self.t1)] };
        let mut out = Vec::with_capacity(4);
        for &(t0, t1) in ts {
            for &(r0, r1) in rs {
                out.push(Cell { r0, r1, t0, t1, depth: d });
            }
        }
        out
    }

    /// The singular points inside the closed cell, as `(r, θ)` with `θ`
    /// shifted by a period when that puts it inside.
    fn singular_in(&self, sing: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let eps = 1e-12;
        let mut out = Vec::new();
        for &(r, t) in sing {
            if r < self.r0 - eps || r > self.r1 + eps {
                continue;
            }
            for shift in [0.0, TAU, -TAU] {
                let ts = t + shift;
                if ts >= self.t0 - eps && ts <= self.t1 + eps {
                    out.push((r.clamp(self.r0, self.r1), ts.clamp(self.t0, self.t1)));
                    break;
                }
            }
        }
        out
    }
}

/// Cells split per refinement round at most, besides crowded ones.
const BATCH: usize = 512;

struct State {
    cell: Cell,
    hi: Vec<C64>,
    err: Vec<f64>,
    nodes: usize,
}

impl State {
    fn worst(&self) -> f64 {
        self.err.iter().copied().fold(0.0, f64::max)
    }
}

pub(crate) struct Engine<'a, F> {
    f: &'a F,
    dim: usize,
    /// Point singularities in `(r, θ)`.
    sing: Vec<(f64, f64)>,
    /// A singularity at the origin needs the radial substitution on every
    /// cell touching `r = 0` rather than a single apex.
    origin: bool,
    hi: Rule,
    lo: Rule,
    cfg: GridConfig,
}

impl<'a, F> Engine<'a, F>
where
    F: Fn(C64) -> Result<Vec<C64>> + Sync,
{
    /// `singular` holds points of the closed disc where `f` may blow up.
    pub(crate) fn new(f: &'a F, dim: usize, singular: &[C64], cfg: &GridConfig) -> Self {
        let mut sing: Vec<(f64, f64)> = Vec::new();
        let mut origin = false;
        for z in singular {
            if z.norm() > 1.0 + 1e-12 {
                continue;
            }
            if z.norm() < 1e-12 {
                origin = true;
                continue;
            }
            let p = (z.norm().min(1.0), z.arg().rem_euclid(TAU));
            let dup = sing.iter().any(|q| {
                let a = C64::from_polar(q.0, q.1);
                (a - z).norm() < cfg.exclusion_radius
            });
            if !dup {
                sing.push(p);
            }
        }
        Engine {
            f,
            dim,
            sing,
            origin,
            hi: Rule::new(cfg.order),
            lo: Rule::new(cfg.order.saturating_sub(2).max(2)),
            cfg: cfg.clone(),
        }
    }

    pub(crate) fn run(&self) -> Result<Vec<QuadratureResult>> {
        let n = self.cfg.base_cells.max(1);
        let cells: Vec<Cell> = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                Cell {
                    r0: i as f64 / n as f64,
                    r1: (i + 1) as f64 / n as f64,
                    t0: TAU * j as f64 / n as f64,
                    t1: TAU * (j + 1) as f64 / n as f64,
                    depth: 0,
                }
            })
            .collect();
        let mut live = self.evaluate(&cells)?;
        let mut nodes: usize = live.iter().map(|s| s.nodes).sum();
        let scale = (0..self.dim)
            .map(|k| pairwise_sum(&live.iter().map(|s| s.hi[k]).collect::<Vec<_>>()).norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let target = self.cfg.target_rel_error * scale;
        loop {
            let total = (0..self.dim)
                .map(|k| live.iter().map(|s| s.err[k]).sum::<f64>())
                .fold(0.0, f64::max);
            let splittable = |s: &State| s.cell.depth < self.cfg.max_depth;
            let crowded: Vec<usize> = (0..live.len())
                .filter(|&i| splittable(&live[i]) && live[i].cell.singular_in(&self.sing).len() > 1)
                .collect();
            let mut pick = crowded;
            if total > target {
                let worst = live
                    .iter()
                    .filter(|s| splittable(s))
                    .map(State::worst)
                    .fold(0.0, f64::max);
                let mut by_err: Vec<usize> = (0..live.len())
                    .filter(|&i| splittable(&live[i]) && live[i].worst() >= 0.25 * worst && worst > 0.0)
                    .collect();
                by_err.sort_by(|&a, &b| live[b].worst().total_cmp(&live[a].worst()).then(a.cmp(&b)));
                by_err.truncate(BATCH);
                pick.extend(by_err);
            }
            pick.sort_unstable();
            pick.dedup();
            if pick.is_empty() {
                break;
            }
            let children: Vec<Cell> = pick.iter().flat_map(|&i| live[i].cell.split()).collect();
            let fresh = self.evaluate(&children)?;
            nodes += fresh.iter().map(|s| s.nodes).sum::<usize>();
            let mut keep = Vec::with_capacity(live.len() + fresh.len());
            let mut it = pick.iter().peekable();
            for (i, s) in live.into_iter().enumerate() {
                if it.peek() == Some(&&i) {
                    it.next();
                } else {
                    keep.push(s);
                }
            }
            keep.extend(fresh);
            live = keep;
        }
        let depth = live.iter().map(|s| s.cell.depth).max().unwrap_or(0);
        let mut out = Vec::with_capacity(self.dim);
        for k in 0..self.dim {
            let value = pairwise_sum(&live.iter().map(|s| s.hi[k]).collect::<Vec<_>>());
            let est_error: f64 = live.iter().map(|s| s.err[k]).sum();
            out.push(QuadratureResult {
                value,
                est_error,
                nodes_used: nodes,
                refinement_depth: depth,
                converged: est_error <= target,
            });
        }
        Ok(out)
    }

    fn evaluate(&self, cells: &[Cell]) -> Result<Vec<State>> {
        cells
            .par_iter()
            .map(|c| {
                let hi = self.apply(c, &self.hi)?;
                let lo = self.apply(c, &self.lo)?;
                let err = hi.iter().zip(&lo).map(|(a, b)| (a - b).norm()).collect();
                Ok(State {
                    cell: *c,
                    hi,
                    err,
                    nodes: self.node_count(c),
                })
            })
            .collect()
    }

    fn node_count(&self, cell: &Cell) -> usize {
        let per = self.hi.x.len() * self.hi.x.len() + self.lo.x.len() * self.lo.x.len();
        if cell.singular_in(&self.sing).len() == 1 {
            4 * per
        } else {
            per
        }
    }

    fn apply(&self, cell: &Cell, rule: &Rule) -> Result<Vec<C64>> {
        let inside = cell.singular_in(&self.sing);
        if inside.len() == 1 {
            return self.duffy(cell, inside[0], rule);
        }
        let radial_sub = self.origin && cell.r0 == 0.0;
        let mut acc = vec![C64::new(0.0, 0.0); self.dim];
        let (dr, dt) = (cell.r1 - cell.r0, cell.t1 - cell.t0);
        for (&xr, &wr) in rule.x.iter().zip(&rule.w) {
            let (r, jr) = if radial_sub {
                (cell.r1 * xr * xr, 2.0 * cell.r1 * xr)
            } else {
                (cell.r0 + dr * xr, dr)
            };
            for (&xt, &wt) in rule.x.iter().zip(&rule.w) {
                let t = cell.t0 + dt * xt;
                let v = (self.f)(C64::from_polar(r, t))?;
                let w = wr * wt * jr * dt * r;
                for k in 0..self.dim {
                    acc[k] += v[k] * w;
                }
            }
        }
        Ok(acc)
    }

    fn duffy(&self, cell: &Cell, apex: (f64, f64), rule: &Rule) -> Result<Vec<C64>> {
        let corners = [
            (cell.r0, cell.t0),
            (cell.r1, cell.t0),
            (cell.r1, cell.t1),
            (cell.r0, cell.t1),
        ];
        let mut acc = vec![C64::new(0.0, 0.0); self.dim];
        for e in 0..4 {
            let v1 = corners[e];
            let v2 = corners[(e + 1) % 4];
            let a = (v1.0 - apex.0, v1.1 - apex.1);
            let b = (v2.0 - v1.0, v2.1 - v1.1);
            let det = (a.0 * b.1 - a.1 * b.0).abs();
            if det == 0.0 {
                continue;
            }
            for (&xw, &ww) in rule.x.iter().zip(&rule.w) {
                let s = xw * xw;
                let jac = 2.0 * xw * s * det;
                for (&xv, &wv) in rule.x.iter().zip(&rule.w) {
                    let r = apex.0 + s * (a.0 + xv * b.0);
                    let t = apex.1 + s * (a.1 + xv * b.1);
                    let v = (self.f)(C64::from_polar(r, t))?;
                    let w = ww * wv * jac * r;
                    for k in 0..self.dim {
                        acc[k] += v[k] * w;
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// Pairwise (cascade) summation in a fixed order.
pub(crate) fn pairwise_sum(v: &[C64]) -> C64 {
    match v.len() {
        0 => C64::new(0.0, 0.0),
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}
