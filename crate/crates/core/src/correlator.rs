//! Determinant correlators of b-c systems on the genus-4 template and the
//! canonical third-kind Green function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curve::{Chart, CurvePoint, SpaceCurve};
use crate::diffbasis::{eval_basis, holomorphic_basis, quadratic_basis, DifferentialBasis};
use crate::error::{Error, Result};
use crate::kernel::{asymptotic_coeffs, DifferentialValue, KernelEvaluator, KernelVariant};
use crate::linalg::{lu_det, DetReport};
use crate::localanalysis::{contour_residue, ContourSpec};
use crate::polyexpr::C64;
use crate::quadrature::{GridConfig, QuadratureResult, SurfaceIntegrator};

#[derive(Clone, Debug)]
pub struct CorrelatorRequest {
    pub lambda: u8,
    pub b_points: Vec<CurvePoint>,
    pub c_points: Vec<CurvePoint>,
}

#[derive(Clone, Debug)]
pub struct CorrelatorResult {
    pub value: C64,
    pub condition: f64,
    /// Euclidean norm of each row, for judging a zero relative to the data.
    pub row_norms: Vec<f64>,
    /// Tensor weight carried in every b point.
    pub b_weight: i8,
    /// Tensor weight carried in every c point.
    pub c_weight: i8,
}

impl CorrelatorResult {
    /// `|det| / Π‖row‖`, which Hadamard's inequality bounds by 1.
    pub fn relative_magnitude(&self) -> f64 {
        let p: f64 = self.row_norms.iter().product();
        if p == 0.0 {
            0.0
        } else {
            self.value.norm() / p
        }
    }
}

struct Setup<'a> {
    ev: KernelEvaluator<'a>,
    basis: DifferentialBasis,
}

impl<'a> Setup<'a> {
    fn new(c: &'a SpaceCurve, req: &CorrelatorRequest) -> Result<Self> {
        let m = req.b_points.len();
        let n = req.c_points.len();
        let (basis, excess) = match req.lambda {
            2 => (quadratic_basis(c)?, 9),
            1 => (holomorphic_basis(c)?, 3),
            l => return Err(Error::Invalid(format!("lambda must be 1 or 2, got {l}"))),
        };
        if m != n + excess {
            return Err(Error::Invalid(format!(
                "lambda = {} needs m - n = {excess}, got m = {m}, n = {n}",
                req.lambda
            )));
        }
        if req.lambda == 1 && n == 0 {
            return Err(Error::Invalid("lambda = 1 needs at least one c point".into()));
        }
        Ok(Setup {
            ev: KernelEvaluator::new(c),
            basis,
        })
    }

    /// Kernel entries of one row: `K₂(p, q_β)` or `ν_{q_j, q_n}(p)`.
    fn kernel_row(&self, p: &CurvePoint, req: &CorrelatorRequest) -> Result<Vec<C64>> {
        let qs = &req.c_points;
        if req.lambda == 2 {
            qs.iter().map(|q| Ok(self.ev.quadratic(p, q)?.coeff)).collect()
        } else {
            let last = &qs[qs.len() - 1];
            qs[..qs.len() - 1]
                .iter()
                .map(|q| Ok(self.ev.third_kind(p, q, last, KernelVariant::Genus4)?.coeff))
                .collect()
        }
    }

    fn basis_row(&self, p: &CurvePoint) -> Result<Vec<C64>> {
        Ok(eval_basis(self.ev.curve(), &self.basis, p, Chart::Affine)?
            .into_iter()
            .map(|v| v.coeff)
            .collect())
    }

    fn matrix(&self, req: &CorrelatorRequest) -> Result<Vec<Vec<C64>>> {
        req.b_points
            .par_iter()
            .map(|p| {
                let mut row = self.kernel_row(p, req)?;
                row.extend(self.basis_row(p)?);
                Ok(row)
            })
            .collect()
    }

    /// Adds `Σ_i s_{iβ} · basis_i(p)` to every kernel column `β`, where
    /// `s` depends on the column through `shift`.
    fn shifted(&self, rows: &[Vec<C64>], nk: usize, shift: &dyn Fn(usize) -> Result<[C64; 4]>) -> Result<Vec<Vec<C64>>> {
        let nb = self.basis.len();
        let coeffs: Vec<[C64; 4]> = (0..nk).map(shift).collect::<Result<_>>()?;
        Ok(rows
            .iter()
            .map(|row| {
                let mut r = row.clone();
                for (beta, s) in coeffs.iter().enumerate() {
                    for i in 0..4 {
                        r[beta] += s[i] * row[row.len() - nb + i];
                    }
                }
                r
            })
            .collect())
    }
}

fn finish(d: DetReport, rows: &[Vec<C64>], lambda: u8) -> CorrelatorResult {
    CorrelatorResult {
        value: d.det,
        condition: d.condition,
        row_norms: rows
            .iter()
            .map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect(),
        b_weight: lambda as i8,
        c_weight: 1 - lambda as i8,
    }
}

/// `det[K₂(p_α, q_β) | φ_μ(p_α)]` for λ = 2 or
/// `det[ν_{q_j, q_n}(p_α) | ω_i(p_α)]` for λ = 1.
pub fn bc_correlator(c: &SpaceCurve, req: &CorrelatorRequest) -> Result<CorrelatorResult> {
    let s = Setup::new(c, req)?;
    let rows = s.matrix(req)?;
    Ok(finish(lu_det(&rows), &rows, req.lambda))
}

/// The correlator after adding `Σ_i coeffs_i · A_i(q_β) · φ_i(p)` (λ = 2)
/// or `Σ_i coeffs_i · ω_i(p)` (λ = 1) to every kernel column.
pub fn shifted_correlator(c: &SpaceCurve, req: &CorrelatorRequest, coeffs: [C64; 4]) -> Result<CorrelatorResult> {
    let s = Setup::new(c, req)?;
    let rows = s.matrix(req)?;
    let nk = rows.first().map_or(0, |r| r.len()) - s.basis.len();
    let shifted = s.shifted(&rows, nk, &|beta| {
        if req.lambda == 2 {
            let a = asymptotic_coeffs(c, &req.c_points[beta])?;
            Ok(std::array::from_fn(|i| coeffs[i] * a[i]))
        } else {
            Ok(coeffs)
        }
    })?;
    Ok(finish(lu_det(&shifted), &shifted, req.lambda))
}

#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub base: C64,
    pub shifted: C64,
    pub coeffs: [C64; 4],
    pub rel_delta: f64,
}

/// Shifts every kernel column by a random combination of basis columns
/// with coefficients in `[-1, 1]` and compares determinants.
pub fn spurious_invariance_check(c: &SpaceCurve, req: &CorrelatorRequest, seed: u64) -> Result<InvarianceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: [C64; 4] = std::array::from_fn(|_| C64::new(rng.gen_range(-1.0..=1.0), 0.0));
    let base = bc_correlator(c, req)?.value;
    let shifted = shifted_correlator(c, req, coeffs)?.value;
    let rel_delta = if base == shifted {
        0.0
    } else {
        (shifted - base).norm() / base.norm().max(shifted.norm())
    };
    Ok(InvarianceReport {
        base,
        shifted,
        coeffs,
        rel_delta,
    })
}

/// The point on the sheet of `q` above `x1(q) + dz`.
pub fn nudge(c: &SpaceCurve, q: &CurvePoint, dz: C64) -> Result<CurvePoint> {
    let mut x = q.x;
    x[0] += dz;
    c.newton_fixed_x1(x, 50)
}

/// Moves `b_points[alpha]` towards `c_points[beta]` along the sheet of the
/// latter at base offsets `h, h/10, h/100` and returns the least-squares
/// exponent `k` in `|det| ~ |Δx1|^{-k}`.
pub fn collision_exponent(c: &SpaceCurve, req: &CorrelatorRequest, alpha: usize, beta: usize, h: C64) -> Result<f64> {
    let q = req
        .c_points
        .get(beta)
        .ok_or_else(|| Error::IndexOutOfRange(format!("c point {beta}")))?;
    if alpha >= req.b_points.len() {
        return Err(Error::IndexOutOfRange(format!("b point {alpha}")));
    }
    let mut pts = Vec::new();
    for k in 0..3 {
        let dz = h / 10f64.powi(k);
        let mut r = req.clone();
        r.b_points[alpha] = nudge(c, q, dz)?;
        let v = bc_correlator(c, &r)?.value.norm();
        pts.push((dz.norm().ln(), v.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(-sxy / sxx)
}

#[derive(Clone, Debug)]
pub struct GreenRequest {
    pub p: CurvePoint,
    pub q: CurvePoint,
    pub qp: CurvePoint,
    pub quadrature: GridConfig,
}

/// The pairing rows of the 5×5 determinant for fixed `q, q'`.
pub struct GreenSystem<'a> {
    ev: KernelEvaluator<'a>,
    omega: DifferentialBasis,
    q: CurvePoint,
    qp: CurvePoint,
    /// Row `k`: `[(i/2)∫ν∧ω̄_k, (i/2)∫ω_1∧ω̄_k, ..., (i/2)∫ω_4∧ω̄_k]`.
    pub rows: Vec<Vec<QuadratureResult>>,
    pub gram_det: DetReport,
}

#[derive(Clone, Debug)]
pub struct GreenValue {
    /// The 5×5 determinant.
    pub raw: C64,
    /// `raw / det(Gram)`: residues ±1 at `q, q'`.
    pub normalized: DifferentialValue,
    pub condition: f64,
}

impl<'a> GreenSystem<'a> {
    pub fn new(c: &'a SpaceCurve, q: CurvePoint, qp: CurvePoint, cfg: &GridConfig) -> Result<Self> {
        let ev = KernelEvaluator::new(c);
        let omega = holomorphic_basis(c)?;
        let si = SurfaceIntegrator::new(c, cfg.clone())?;
        let alpha = |x: &CurvePoint| {
            let mut v = vec![ev.third_kind(x, &q, &qp, KernelVariant::Genus4)?];
            v.extend(eval_basis(c, &omega, x, Chart::Affine)?);
            Ok(v)
        };
        let beta = |x: &CurvePoint| eval_basis(c, &omega, x, Chart::Affine);
        let pairs = si.pairings(&alpha, &beta, &[q.x[0], qp.x[0]])?;
        // pairs[a][k] = ⟨alpha_a, ω_k⟩; the determinant rows are indexed by k.
        let rows: Vec<Vec<QuadratureResult>> = (0..4).map(|k| (0..5).map(|a| pairs[a][k]).collect()).collect();
        let gram: Vec<Vec<C64>> = rows.iter().map(|r| r[1..].iter().map(|x| x.value).collect()).collect();
        let gram_det = lu_det(&gram);
        if gram_det.det.norm() == 0.0 || !gram_det.condition.is_finite() {
            return Err(Error::SingularMatrix("Gram matrix of the holomorphic differentials".into()));
        }
        Ok(GreenSystem {
            ev,
            omega,
            q,
            qp,
            rows,
            gram_det,
        })
    }

    /// The first row `[ν_{q,q'}(p), ω_1(p), ..., ω_4(p)]`.
    fn first_row(&self, p: &CurvePoint) -> Result<Vec<C64>> {
        let c = self.ev.curve();
        let mut row = vec![self.ev.third_kind(p, &self.q, &self.qp, KernelVariant::Genus4)?.coeff];
        row.extend(eval_basis(c, &self.omega, p, Chart::Affine)?.into_iter().map(|v| v.coeff));
        Ok(row)
    }

    pub fn eval(&self, p: &CurvePoint) -> Result<GreenValue> {
        let mut m = vec![self.first_row(p)?];
        m.extend(self.rows.iter().map(|r| r.iter().map(|x| x.value).collect::<Vec<_>>()));
        let d = lu_det(&m);
        Ok(GreenValue {
            raw: d.det,
            normalized: DifferentialValue::affine(d.det / self.gram_det.det, 1),
            condition: d.condition,
        })
    }

    /// `(i/2)∫ G ∧ ω̄_k` for the normalized `G`, integrated afresh on `cfg`.
    pub fn periods(&self, cfg: &GridConfig) -> Result<Vec<QuadratureResult>> {
        let c = self.ev.curve();
        let si = SurfaceIntegrator::new(c, cfg.clone())?;
        let alpha = |x: &CurvePoint| Ok(vec![self.eval(x)?.normalized]);
        let beta = |x: &CurvePoint| eval_basis(c, &self.omega, x, Chart::Affine);
        Ok(si.pairings(&alpha, &beta, &[self.q.x[0], self.qp.x[0]])?.remove(0))
    }

    /// Residues of the normalized `G` at `q` and at `q'`.
    pub fn residues(&self, radius: f64) -> Result<(C64, C64)> {
        let c = self.ev.curve();
        let f = |x: &CurvePoint| Ok(self.eval(x)?.normalized);
        let at = |y: &CurvePoint| {
            let spec = ContourSpec::new(Chart::Affine, y.x[0], *y).radius(radius);
            contour_residue(c, f, &spec).map(|r| r.value)
        };
        Ok((at(&self.q)?, at(&self.qp)?))
    }
}

#[derive(Clone, Debug)]
pub struct GreenReport {
    pub value: GreenValue,
    pub gram_det: C64,
    pub gram_condition: f64,
}

/// The canonical third-kind Green function at `p`.
pub fn green_function(c: &SpaceCurve, req: &GreenRequest) -> Result<GreenReport> {
    for (y, name) in [(&req.q, "q"), (&req.qp, "q'")] {
        if req.p.dist(y) == 0.0 {
            return Err(Error::Pole(format!("Green function evaluated at its pole {name}")));
        }
    }
    let sys = GreenSystem::new(c, req.q, req.qp, &req.quadrature)?;
    Ok(GreenReport {
        value: sys.eval(&req.p)?,
        gram_det: sys.gram_det.det,
        gram_condition: sys.gram_det.condition,
    })
}

#[cfg(test)]
mod tests;
