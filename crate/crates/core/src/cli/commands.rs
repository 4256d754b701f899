use std::path::Path;

use serde_json::{json, Value};

use super::io::{self, cx, cxs, load_curve, on_curve, parse_scalar, parse_triple, point, quad, real, LoadedCurve};
use crate::correlator::{bc_correlator, spurious_invariance_check, CorrelatorRequest, GreenSystem};
use crate::curve::{genus, Chart};
use crate::diffbasis::{eval_basis, holomorphic_basis, quadratic_basis};
use crate::error::{Error, Result};
use crate::kernel::{KernelEvaluator, KernelVariant};
use crate::linalg::hermitian_eigenvalues;
use crate::localanalysis::{laurent_coeff, ContourSpec};
use crate::quadrature::{GridConfig, SurfaceIntegrator};

pub fn curve_check(file: &Path, samples: usize, seed: u64) -> Result<Value> {
    let c = match load_curve(file)? {
        LoadedCurve::Space(c) => c,
        LoadedCurve::Plane(p) => {
            let d = p.f().total_degree() as i64;
            return Ok(json!({
                "kind": "plane",
                "degree": d,
                "genus": (d - 1) * (d - 2) / 2,
                "smooth": p.is_smooth()?,
                "branch_points": cxs(&p.branch_points()?),
            }));
        }
    };
    let (df, dg) = c.degrees();
    let report = c.smoothness_check(samples, seed);
    let finite = c.branch_points(0)?;
    let at_inf = c.ramification_at_infinity(&finite)?;
    let total: usize = finite.iter().map(|b| b.multiplicity).sum();
    let inf = c.points_at_infinity()?;
    let deg = c.fiber_degree()?;
    let g = genus(df, dg)?;
    Ok(json!({
        "kind": "space",
        "degrees": [df, dg],
        "genus": g,
        "fiber_degree": deg,
        "smoothness": {
            "passed": report.passed,
            "points_checked": report.points_checked,
            "min_singular_value": real(report.min_singular_value),
            "threshold": real(report.threshold),
            "failures": report.failures,
        },
        "branch_points": finite.iter().map(|b| json!({
            "base": cx(b.base),
            "point": cxs(&b.point),
            "multiplicity": b.multiplicity,
        })).collect::<Vec<_>>(),
        "ramification_at_infinity": at_inf,
        "riemann_hurwitz": {
            "total": total + at_inf,
            "expected": 2 * g as usize + 2 * deg - 2,
        },
        "points_at_infinity": inf.iter().map(|p| json!({
            "coords": cxs(&p.coords),
            "multiplicity": p.multiplicity,
        })).collect::<Vec<_>>(),
        "bezout": df * dg,
    }))
}

pub fn curve_fiber(file: &Path, x1: &str, chart: Chart) -> Result<Value> {
    let base = parse_scalar(x1)?;
    match load_curve(file)? {
        LoadedCurve::Space(c) => {
            let fib = c.fiber(base, chart)?;
            Ok(json!({
                "chart": format!("{chart:?}").to_lowercase(),
                "base": cx(fib.base),
                "degenerate": fib.degenerate,
                "points": fib.points.iter().map(point).collect::<Vec<_>>(),
            }))
        }
        LoadedCurve::Plane(p) => {
            if chart != Chart::Affine {
                return Err(Error::Invalid("plane curve fibers use the affine chart".into()));
            }
            let pts = p.fiber(base)?;
            Ok(json!({
                "chart": "affine",
                "base": cx(base),
                "points": pts.iter().map(|x| json!({ "x": cxs(x), "residual": real(p.residual(x)) })).collect::<Vec<_>>(),
            }))
        }
    }
}

pub fn kernel_eval(file: &Path, variant: KernelVariant, x: &str, y: &str) -> Result<Value> {
    let c = load_curve(file)?.space()?;
    let x = on_curve(&c, parse_triple(x)?)?;
    let y = on_curve(&c, parse_triple(y)?)?;
    let v = KernelEvaluator::new(&c).eval(&x, &y, variant)?;
    Ok(json!({ "coeff": cx(v.coeff), "weight": v.weight, "variant": variant.name() }))
}

pub fn kernel_laurent(a: &super::ContourArgs, k: i32) -> Result<Value> {
    let c = load_curve(&a.file)?.space()?;
    let anchor = on_curve(&c, parse_triple(&a.anchor)?)?;
    let y = match &a.y {
        Some(s) => on_curve(&c, parse_triple(s)?)?,
        None => anchor,
    };
    let chart: Chart = a.chart.into();
    let spec = ContourSpec::new(chart, parse_scalar(&a.center)?, anchor)
        .radius(a.radius)
        .nodes(a.nodes)
        .multi_sheet(a.multi_sheet);
    let ev = KernelEvaluator::new(&c);
    let r = laurent_coeff(&c, |x| ev.eval(x, &y, a.variant), &spec, k)?;
    Ok(json!({
        "k": k,
        "value": cx(r.value),
        "est_error": real(r.est_error),
        "nodes_used": r.nodes_used,
        "turns": r.turns,
    }))
}

pub fn basis(file: &Path, weight: u8, at: Option<&str>) -> Result<Value> {
    let c = load_curve(file)?.space()?;
    let b = match weight {
        1 => holomorphic_basis(&c)?,
        2 => quadratic_basis(&c)?,
        w => return Err(Error::Invalid(format!("weight must be 1 or 2, got {w}"))),
    };
    let mut out = json!({
        "weight": b.weight,
        "denominator_power": b.weight,
        "numerators": b.numerator_strings(),
    });
    if let Some(s) = at {
        let p = on_curve(&c, parse_triple(s)?)?;
        let vals: Vec<_> = eval_basis(&c, &b, &p, Chart::Affine)?.into_iter().map(|v| v.coeff).collect();
        out["point"] = point(&p);
        out["values"] = cxs(&vals);
    }
    Ok(out)
}

pub fn periods(file: &Path, cfg: &GridConfig) -> Result<Value> {
    let c = load_curve(file)?.space()?;
    let w = holomorphic_basis(&c)?;
    let si = SurfaceIntegrator::new(&c, cfg.clone())?;
    let m = si.gram(&|p| eval_basis(&c, &w, p, Chart::Affine))?;
    let vals: Vec<Vec<_>> = m.iter().map(|r| r.iter().map(|q| q.value).collect()).collect();
    let n = vals.len();
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            defect = defect.max((vals[i][j] - vals[j][i].conj()).norm());
        }
    }
    Ok(json!({
        "gram": vals.iter().map(|r| cxs(r)).collect::<Vec<_>>(),
        "est_error": m.iter().map(|r| r.iter().map(|q| real(q.est_error)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "eigenvalues": hermitian_eigenvalues(&vals).into_iter().map(real).collect::<Vec<_>>(),
        "hermitian_defect": real(defect),
        "nodes_used": m[0][0].nodes_used,
        "refinement_depth": m[0][0].refinement_depth,
        "converged": m.iter().flatten().all(|q| q.converged),
    }))
}

pub fn correlator(file: &Path, lambda: u8, b: &Path, cfile: Option<&Path>, seed: u64) -> Result<Value> {
    let c = load_curve(file)?.space()?;
    let b_points = io::load_points(b)?
        .into_iter()
        .map(|x| on_curve(&c, x))
        .collect::<Result<Vec<_>>>()?;
    let c_points = match cfile {
        Some(p) => io::load_points(p)?
            .into_iter()
            .map(|x| on_curve(&c, x))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let req = CorrelatorRequest {
        lambda,
        b_points,
        c_points,
    };
    let r = bc_correlator(&c, &req)?;
    let inv = spurious_invariance_check(&c, &req, seed)?;
    Ok(json!({
        "lambda": lambda,
        "determinant": cx(r.value),
        "condition": real(r.condition),
        "relative_magnitude": real(r.relative_magnitude()),
        "b_weight": r.b_weight,
        "c_weight": r.c_weight,
        "invariance": {
            "coeffs": cxs(&inv.coeffs),
            "shifted": cx(inv.shifted),
            "rel_delta": real(inv.rel_delta),
        },
    }))
}

pub fn green(file: &Path, p: &str, q: &str, qp: &str, cfg: &GridConfig) -> Result<Value> {
    let c = load_curve(file)?.space()?;
    let p = on_curve(&c, parse_triple(p)?)?;
    let q = on_curve(&c, parse_triple(q)?)?;
    let qp = on_curve(&c, parse_triple(qp)?)?;
    if p.x == q.x || p.x == qp.x {
        return Err(Error::Pole("the Green function is evaluated at one of its poles".into()));
    }
    let sys = GreenSystem::new(&c, q, qp, cfg)?;
    let v = sys.eval(&p)?;
    let (rq, rqp) = sys.residues(crate::localanalysis::DEFAULT_RADIUS)?;
    let check = GridConfig {
        base_cells: cfg.base_cells.saturating_sub(4).max(4),
        ..cfg.clone()
    };
    let per = sys.periods(&check)?;
    let gram_norm = sys
        .rows
        .iter()
        .map(|r| r[1..].iter().map(|x| x.value.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    Ok(json!({
        "raw": cx(v.raw),
        "value": { "coeff": cx(v.normalized.coeff), "weight": v.normalized.weight },
        "condition": real(v.condition),
        "gram_det": cx(sys.gram_det.det),
        "residues": { "q": cx(rq), "qp": cx(rqp), "ratio": cx(rq / rqp) },
        "periods": per.iter().map(quad).collect::<Vec<_>>(),
        "period_bound": real(1e-3 * gram_norm),
    }))
}
