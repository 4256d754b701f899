//! Sylvester resultants with fraction-free (Bareiss) elimination.

use super::{MultiPoly, C64};
use crate::error::{Error, Result};

/// Division `a / b` for a `b` known to divide `a`.
///
/// Works in graded-lex order, peeling terms off from whichever end of `b`
/// has the larger coefficient: dividing by a tiny extreme coefficient would
/// amplify rounding at every step. Terms of the running dividend that the
/// chosen term of `b` does not divide are set aside; with exact inputs that
/// set is empty, with floating-point inputs it only collects rounding noise.
pub fn exact_div(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
    if a.nvars() != b.nvars() {
        return Err(Error::Arity {
            expected: a.nvars(),
            got: b.nvars(),
        });
    }
    let (top, bottom) = match (b.terms().next_back(), b.terms().next()) {
        (Some((tm, tc)), Some((bm, bc))) => ((*tm, *tc), (*bm, *bc)),
        _ => return Err(Error::Invalid("division by the zero polynomial".into())),
    };
    let ascending = bottom.1.norm() > top.1.norm();
    let (lm, lc) = if ascending { bottom } else { top };
    let max_degree = a.total_degree();
    let mut rem = a.clone();
    let mut quot = MultiPoly::zero(a.nvars());
    loop {
        let next = if ascending { rem.terms().next() } else { rem.terms().next_back() };
        let Some((&m, &c)) = next else { break };
        match m.div(&lm) {
            // Ascending, nothing above the dividend's degree can be signal.
            Some(qm) if !ascending || m.degree() <= max_degree => {
                let qc = c / lc;
                quot.add_term(qm, qc);
                for (bm, bc) in b.terms() {
                    rem.add_term(qm.mul(bm), -qc * bc);
                }
                // Cancellation of the extreme term may leave round-off behind.
                if rem.coeff(&m) != C64::new(0.0, 0.0) {
                    let left = rem.coeff(&m);
                    rem.add_term(m, -left);
                }
            }
            _ => rem.add_term(m, -c),
        }
    }
    Ok(quot)
}

/// Resultant of `p` and `q` with respect to variable `var`: the Sylvester
/// determinant, evaluated by Bareiss elimination over polynomial entries.
/// The result does not depend on `var`.
pub fn resultant(p: &MultiPoly, q: &MultiPoly, var: usize) -> Result<MultiPoly> {
    if p.nvars() != q.nvars() {
        return Err(Error::Arity {
            expected: p.nvars(),
            got: q.nvars(),
        });
    }
    let n = p.nvars();
    let a = p.univariate_coeffs(var);
    let b = q.univariate_coeffs(var);
    let m = a.len() - 1;
    let k = b.len() - 1;
    match (m, k) {
        (0, 0) => return Err(Error::DegenerateResultant),
        (0, _) => return Ok(a[0].pow(k as u32)),
        (_, 0) => return Ok(b[0].pow(m as u32)),
        _ => {}
    }
    let size = m + k;
    let mut mat = vec![vec![MultiPoly::zero(n); size]; size];
    // Rows 0..m: shifts of q, then k shifts of p, highest coefficient first.
    // This equals (-1)^(mk) times the textbook Res(p, q), i.e. Res(q, p).
    for i in 0..m {
        for (j, c) in b.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..k {
        for (j, c) in a.iter().rev().enumerate() {
            mat[m + i][i + j] = c.clone();
        }
    }
    bareiss_det(n, mat)
}

/// Fraction-free determinant of a square matrix of polynomials.
pub(crate) fn bareiss_det(nvars: usize, mut mat: Vec<Vec<MultiPoly>>) -> Result<MultiPoly> {
    let size = mat.len();
    if size == 0 {
        return Ok(MultiPoly::constant(nvars, C64::new(1.0, 0.0)));
    }
    let mut negate = false;
    let mut prev = MultiPoly::constant(nvars, C64::new(1.0, 0.0));
    for kk in 0..size - 1 {
        if mat[kk][kk].is_zero() {
            // Prefer the pivot with the fewest terms to keep division cheap.
            let swap = (kk + 1..size)
                .filter(|&r| !mat[r][kk].is_zero())
                .min_by_key(|&r| mat[r][kk].num_terms());
            match swap {
                Some(r) => {
                    mat.swap(kk, r);
                    negate = !negate;
                }
                None => return Ok(MultiPoly::zero(nvars)),
            }
        }
        for i in kk + 1..size {
            for j in kk + 1..size {
                let mut num = &(&mat[kk][kk] * &mat[i][j]) - &(&mat[i][kk] * &mat[kk][j]);
                // Terms at the rounding level of the two products are noise; left
                // in, one can become the leading term of a later pivot.
                let bound = mat[kk][kk].coeff_sum() * mat[i][j].coeff_sum()
                    + mat[i][kk].coeff_sum() * mat[kk][j].coeff_sum();
                num.chop(16.0 * f64::EPSILON * bound);
                mat[i][j] = exact_div(&num, &prev)?;
            }
            mat[i][kk] = MultiPoly::zero(nvars);
        }
        prev = mat[kk][kk].clone();
    }
    let det = mat[size - 1][size - 1].clone();
    Ok(if negate { -&det } else { det })
}
