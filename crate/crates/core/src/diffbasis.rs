//! Holomorphic and quadratic differentials on the genus-4 template, stored
//! symbolically as a numerator polynomial over a power of `J¹`.

use crate::curve::{Chart, CurvePoint, SpaceCurve};
use crate::error::{Error, Result};
use crate::kernel::DifferentialValue;
use crate::polyexpr::{parse, MultiPoly, C64};

pub const VARIABLES: [&str; 3] = ["x1", "x2", "x3"];

/// `numerator · dx1^w / (J¹)^{j1_power}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisElement {
    pub numerator: MultiPoly,
    pub j1_power: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialBasis {
    pub weight: u8,
    pub elements: Vec<BasisElement>,
}

impl DifferentialBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Numerators as expression strings in `x1, x2, x3`.
    pub fn numerator_strings(&self) -> Vec<String> {
        self.elements
            .iter()
            .map(|e| e.numerator.to_string_with(&VARIABLES))
            .collect()
    }
}

fn basis_from(weight: u8, numerators: &[&str]) -> DifferentialBasis {
    let elements = numerators
        .iter()
        .map(|s| BasisElement {
            numerator: parse(s, &VARIABLES).expect("built-in numerator"),
            j1_power: weight,
        })
        .collect();
    DifferentialBasis { weight, elements }
}

fn require_template(c: &SpaceCurve) -> Result<()> {
    if c.template_coeffs().is_none() {
        return Err(Error::Invalid(
            "built-in bases exist only for the genus-4 template".into(),
        ));
    }
    Ok(())
}

/// `ω_i = (1, x1, x2, x3)·dx1 / J¹`.
pub fn holomorphic_basis(c: &SpaceCurve) -> Result<DifferentialBasis> {
    require_template(c)?;
    Ok(basis_from(1, &["1", "x1", "x2", "x3"]))
}

/// `φ_μ = (1, x1, x2, x3, x1², x2², x3², x1x2, x1x3)·dx1² / (J¹)²`; the
/// numerator `x2x3` is left out since it equals `x1` on the curve.
pub fn quadratic_basis(c: &SpaceCurve) -> Result<DifferentialBasis> {
    require_template(c)?;
    Ok(basis_from(
        2,
        &["1", "x1", "x2", "x3", "x1^2", "x2^2", "x3^2", "x1*x2", "x1*x3"],
    ))
}

/// A basis from user numerators over `(J¹)^weight`; holomorphy is not
/// assumed and has to be checked numerically.
pub fn custom_basis(weight: u8, numerators: Vec<MultiPoly>) -> Result<DifferentialBasis> {
    if !(1..=2).contains(&weight) {
        return Err(Error::Invalid(format!("weight must be 1 or 2, got {weight}")));
    }
    if let Some(p) = numerators.iter().find(|p| p.nvars() != 3) {
        return Err(Error::Arity {
            expected: 3,
            got: p.nvars(),
        });
    }
    let elements = numerators
        .into_iter()
        .map(|numerator| BasisElement {
            numerator,
            j1_power: weight,
        })
        .collect();
    Ok(DifferentialBasis { weight, elements })
}

pub fn eval_basis(c: &SpaceCurve, b: &DifferentialBasis, x: &CurvePoint, chart: Chart) -> Result<Vec<DifferentialValue>> {
    let (df, dg) = c.gradients(&x.x);
    let j1 = df[1] * dg[2] - df[2] * dg[1];
    let scale = (df[1] * dg[2]).norm() + (df[2] * dg[1]).norm();
    if j1.norm() == 0.0 || j1.norm() <= 1e-14 * scale {
        return Err(Error::ChartSingular(format!(
            "J¹ vanishes at ({}, {}, {}); use another base coordinate",
            x.x[0], x.x[1], x.x[2]
        )));
    }
    Ok(b.elements
        .iter()
        .map(|e| {
            let coeff = e.numerator.eval_unchecked(&x.x) / j1.powu(e.j1_power as u32);
            DifferentialValue::affine(coeff, b.weight).in_chart(chart, x.x[0])
        })
        .collect())
}

/// Coefficients of every basis element at `x`, affine chart.
pub fn eval_coeffs(c: &SpaceCurve, b: &DifferentialBasis, x: &CurvePoint) -> Result<Vec<C64>> {
    Ok(eval_basis(c, b, x, Chart::Affine)?.into_iter().map(|v| v.coeff).collect())
}
