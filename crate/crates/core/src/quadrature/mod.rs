//! Surface integrals `(i/2)∫ α ∧ β̄` over the compact curve.
//!
//! The base `P¹` is covered by the closed unit discs `|x1| ≤ 1` and
//! `|x1'| ≤ 1`. Over each disc the integrand is summed over the sheets of
//! the fiber, with coefficients taken in that chart, so that
//! `(i/2) α β̄ dz∧dz̄ = a b̄ dA`.

mod engine;
mod mc;

use crate::curve::{Chart, CurvePoint, SpaceCurve};
use crate::error::{Error, Result};
use crate::kernel::DifferentialValue;
use crate::polyexpr::C64;

pub use mc::surface_integral_mc;

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    /// Cells per side of the polar grid on each chart.
    pub base_cells: usize,
    pub max_depth: usize,
    pub target_rel_error: f64,
    /// Singular points closer than this are treated as one.
    pub exclusion_radius: f64,
    /// Gauss–Legendre order per direction; the estimate compares against
    /// order − 2.
    pub order: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            base_cells: 24,
            max_depth: 8,
            target_rel_error: 1e-4,
            exclusion_radius: 1e-4,
            order: 6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: C64,
    pub est_error: f64,
    pub nodes_used: usize,
    pub refinement_depth: usize,
    /// False when the depth budget ran out above the target error.
    pub converged: bool,
}

impl QuadratureResult {
    fn merge(a: QuadratureResult, b: QuadratureResult) -> QuadratureResult {
        QuadratureResult {
            value: a.value + b.value,
            est_error: a.est_error + b.est_error,
            nodes_used: a.nodes_used + b.nodes_used,
            refinement_depth: a.refinement_depth.max(b.refinement_depth),
            converged: a.converged && b.converged,
        }
    }
}

/// A family of differentials evaluated together at a curve point, in the
/// affine chart.
pub type Forms<'a> = dyn Fn(&CurvePoint) -> Result<Vec<DifferentialValue>> + Sync + 'a;

/// `∫_{|z|≤1} f dA` for a vector-valued `f`; `singular` lists points where
/// `f` may blow up integrably.
pub fn disc_integral<F>(f: &F, dim: usize, singular: &[C64], cfg: &GridConfig) -> Result<Vec<QuadratureResult>>
where
    F: Fn(C64) -> Result<Vec<C64>> + Sync,
{
    engine::Engine::new(f, dim, singular, cfg).run()
}

/// Reusable integration setup for one curve: branch points are located
/// once and become singular points of every integrand.
pub struct SurfaceIntegrator<'c> {
    curve: &'c SpaceCurve,
    cfg: GridConfig,
    degree: usize,
    branch: Vec<C64>,
    ramified_at_infinity: bool,
}

impl<'c> SurfaceIntegrator<'c> {
    pub fn new(curve: &'c SpaceCurve, cfg: GridConfig) -> Result<Self> {
        let finite = curve.branch_points(0)?;
        let ramified_at_infinity = curve.ramification_at_infinity(&finite)? > 0;
        Ok(SurfaceIntegrator {
            curve,
            cfg,
            degree: curve.fiber_degree()?,
            branch: finite.iter().map(|b| b.base).collect(),
            ramified_at_infinity,
        })
    }

    pub fn config(&self) -> &GridConfig {
        &self.cfg
    }

    /// `P_ij = (i/2)∫ α_i ∧ β̄_j` for every pair. `poles` are affine `x1`
    /// values above which some form may have a pole.
    pub fn pairings(&self, alpha: &Forms, beta: &Forms, poles: &[C64]) -> Result<Vec<Vec<QuadratureResult>>> {
        let mut total: Option<Vec<QuadratureResult>> = None;
        let mut shape = (0, 0);
        for chart in [Chart::Affine, Chart::Infinity] {
            let (na, nb) = self.shape(alpha, beta, chart)?;
            shape = (na, nb);
            let integrand = |z: C64| self.integrand(alpha, beta, chart, z, na, nb);
            let part = disc_integral(&integrand, na * nb, &self.singular(chart, poles), &self.cfg)?;
            total = Some(match total {
                None => part,
                Some(t) => t.into_iter().zip(part).map(|(a, b)| QuadratureResult::merge(a, b)).collect(),
            });
        }
        let flat = total.unwrap_or_default();
        Ok(flat.chunks(shape.1.max(1)).take(shape.0).map(|r| r.to_vec()).collect())
    }

    /// The Hermitian matrix `(i/2)∫ ω_i ∧ ω̄_j`.
    pub fn gram(&self, forms: &Forms) -> Result<Vec<Vec<QuadratureResult>>> {
        self.pairings(forms, forms, &[])
    }

    fn shape(&self, alpha: &Forms, beta: &Forms, chart: Chart) -> Result<(usize, usize)> {
        // Any regular point of the chart fixes the family sizes.
        let probe = C64::new(0.37, 0.21);
        let fib = self.curve.fiber(probe, chart)?;
        let p = fib
            .points
            .first()
            .ok_or_else(|| Error::Invalid("empty fiber".into()))?;
        Ok((alpha(p)?.len(), beta(p)?.len()))
    }

    fn singular(&self, chart: Chart, poles: &[C64]) -> Vec<C64> {
        let mut out = Vec::new();
        for &b in self.branch.iter().chain(poles) {
            match chart {
                Chart::Affine if b.norm() <= 1.0 + 1e-12 => out.push(b),
                Chart::Infinity if b.norm() >= 1.0 - 1e-12 => out.push(b.inv()),
                _ => {}
            }
        }
        // Kernel-built forms may have poles above x1 = ∞ as well.
        if chart == Chart::Infinity && (self.ramified_at_infinity || !poles.is_empty()) {
            out.push(C64::new(0.0, 0.0));
        }
        out
    }

    fn integrand(&self, alpha: &Forms, beta: &Forms, chart: Chart, z: C64, na: usize, nb: usize) -> Result<Vec<C64>> {
        let fib = self.curve.fiber(z, chart)?;
        if fib.points.len() != self.degree {
            return Err(Error::Invalid(format!(
                "fiber above {z} in {chart:?} chart has {} points, expected {}",
                fib.points.len(),
                self.degree
            )));
        }
        let mut acc = vec![C64::new(0.0, 0.0); na * nb];
        for p in &fib.points {
            let a: Vec<C64> = alpha(p)?.into_iter().map(|v| v.in_chart(chart, p.x[0]).coeff).collect();
            let b: Vec<C64> = beta(p)?.into_iter().map(|v| v.in_chart(chart, p.x[0]).coeff).collect();
            for i in 0..na {
                for j in 0..nb {
                    acc[i * nb + j] += a[i] * b[j].conj();
                }
            }
        }
        Ok(acc)
    }
}

/// `(i/2)∫ α ∧ β̄` for a single pair.
pub fn surface_integral<A, B>(c: &SpaceCurve, alpha: A, beta: B, poles: &[C64], cfg: &GridConfig) -> Result<QuadratureResult>
where
    A: Fn(&CurvePoint) -> Result<DifferentialValue> + Sync,
    B: Fn(&CurvePoint) -> Result<DifferentialValue> + Sync,
{
    let si = SurfaceIntegrator::new(c, cfg.clone())?;
    let a = |p: &CurvePoint| alpha(p).map(|v| vec![v]);
    let b = |p: &CurvePoint| beta(p).map(|v| vec![v]);
    Ok(si.pairings(&a, &b, poles)?[0][0])
}

#[cfg(test)]
mod tests;
