//! Seeded invariant checks that need no reference data and run in seconds.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::io::load_curve;
use crate::correlator::{bc_correlator, spurious_invariance_check, CorrelatorRequest};
use crate::curve::{Chart, CurvePoint, PathSpec, SpaceCurve};
use crate::diffbasis::{eval_basis, holomorphic_basis};
use crate::error::Result;
use crate::kernel::{KernelEvaluator, KernelVariant};
use crate::localanalysis::{contour_residue, ContourSpec};
use crate::polyexpr::C64;

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn random_points(c: &SpaceCurve, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<CurvePoint>> {
    (0..n)
        .map(|_| {
            let base = C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let fib = c.fiber(base, Chart::Affine)?;
            Ok(fib.points[rng.gen_range(0..fib.points.len())])
        })
        .collect()
}

fn outcome(name: &'static str, r: Result<(bool, String)>) -> Check {
    match r {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

pub fn run(file: &Path, seed: u64) -> Result<Value> {
    let c = load_curve(file)?.space()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let template = c.template_coeffs().is_some();
    let variant = if template { KernelVariant::Genus4 } else { KernelVariant::Compact };
    let ev = KernelEvaluator::new(&c);
    let mut checks = Vec::new();

    checks.push(outcome("fiber_cardinality", (|| {
        let deg = c.fiber_degree()?;
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let base = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let fib = c.fiber(base, Chart::Affine)?;
            if fib.points.len() != deg {
                return Ok((false, format!("{} points above {base}, expected {deg}", fib.points.len())));
            }
            worst = fib.points.iter().map(|p| p.residual).fold(worst, f64::max);
        }
        Ok((worst <= 1e-10, format!("degree {deg}, worst residual {worst:e}")))
    })()));

    let pts = random_points(&c, 12, &mut rng);
    checks.push(outcome("kernel_variants_agree", (|| {
        let pts = pts.clone()?;
        let other = if template { KernelVariant::Compact } else { KernelVariant::Symmetric };
        let mut worst = 0.0f64;
        for w in pts.chunks(2) {
            let a = ev.eval(&w[0], &w[1], variant)?.coeff;
            let b = ev.eval(&w[0], &w[1], other)?.coeff;
            worst = worst.max((a - b).norm() / a.norm().max(1.0));
        }
        Ok((worst <= 1e-10, format!("{variant} vs {other}: worst relative gap {worst:e}")))
    })()));

    checks.push(outcome("diagonal_residue", (|| {
        let pts = pts.clone()?;
        let mut worst = 0.0f64;
        for y in pts.iter().take(3) {
            let spec = ContourSpec::new(Chart::Affine, y.x[0], *y);
            let r = contour_residue(&c, |x| ev.eval(x, y, variant), &spec)?;
            worst = worst.max((r.value - 1.0).norm());
        }
        Ok((worst <= 1e-8, format!("worst |res - 1| = {worst:e}")))
    })()));

    checks.push(outcome("trivial_loop_monodromy", (|| {
        let center = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let path = PathSpec::circle(Chart::Affine, center, 1e-3, 16, 0.0);
        let branch = c.branch_points(0)?;
        if branch.iter().any(|b| (b.base - center).norm() < 1e-2) {
            return Ok((true, "skipped: loop center near a branch point".into()));
        }
        let perm = c.monodromy(&path)?;
        Ok((perm.is_identity(), format!("cycle type {:?}", perm.cycle_type())))
    })()));

    if template {
        checks.push(outcome("holomorphic_basis_regular", (|| {
            let pts = pts.clone()?;
            let w = holomorphic_basis(&c)?;
            let mut worst = 0.0f64;
            for y in pts.iter().take(3) {
                for i in 0..w.len() {
                    let spec = ContourSpec::new(Chart::Affine, y.x[0], *y);
                    let r = contour_residue(&c, |x| Ok(eval_basis(&c, &w, x, Chart::Affine)?[i]), &spec)?;
                    worst = worst.max(r.value.norm());
                }
            }
            Ok((worst <= 1e-8, format!("worst residue {worst:e}")))
        })()));

        checks.push(outcome("correlator_duplicate_zero", (|| {
            let mut req = CorrelatorRequest {
                lambda: 1,
                b_points: random_points(&c, 5, &mut rng)?,
                c_points: random_points(&c, 2, &mut rng)?,
            };
            req.b_points[4] = req.b_points[1];
            let r = bc_correlator(&c, &req)?;
            let rel = r.relative_magnitude();
            Ok((rel <= 1e-12, format!("relative magnitude {rel:e}")))
        })()));

        checks.push(outcome("correlator_column_shift", (|| {
            let req = CorrelatorRequest {
                lambda: 2,
                b_points: random_points(&c, 10, &mut rng)?,
                c_points: random_points(&c, 1, &mut rng)?,
            };
            let r = spurious_invariance_check(&c, &req, seed)?;
            Ok((r.rel_delta <= 1e-10, format!("relative change {:e}", r.rel_delta)))
        })()));
    }

    let all = checks.iter().all(|c| c.passed);
    Ok(json!({
        "seed": seed,
        "passed": all,
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "passed": c.passed,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    }))
}
