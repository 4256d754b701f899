//! Small dense complex linear algebra: polynomial roots by companion
//! eigenvalues, determinants by partially pivoted LU, Hermitian spectra.

use nalgebra::{DMatrix, Schur};

use crate::polyexpr::C64;

/// Roots of `Σ coeffs[k] z^k` as eigenvalues of the companion matrix.
///
/// Leading coefficients that are exactly zero are dropped, so the number of
/// roots is the true degree. Returns `None` when the eigen-solver fails.
pub fn poly_roots(coeffs: &[C64]) -> Option<Vec<C64>> {
    let mut deg = coeffs.len().checked_sub(1)?;
    while deg > 0 && coeffs[deg] == C64::new(0.0, 0.0) {
        deg -= 1;
    }
    match deg {
        0 => return Some(Vec::new()),
        1 => return Some(vec![-coeffs[0] / coeffs[1]]),
        2 => return Some(quadratic_roots(coeffs[2], coeffs[1], coeffs[0]).to_vec()),
        _ => {}
    }
    let mut roots = companion_eigenvalues(&coeffs[..=deg]);
    // The QR iteration can stall on highly symmetric inputs such as z^n - 1;
    // a shift of origin breaks the symmetry.
    for k in 1..=4 {
        if roots.is_some() {
            break;
        }
        let s = C64::new(0.37, 0.21) * k as f64;
        roots = companion_eigenvalues(&taylor_shift(&coeffs[..=deg], s))
            .map(|rs| rs.into_iter().map(|r| r + s).collect());
    }
    let mut roots = roots?;
    // A couple of Newton steps on the polynomial itself sharpen clustered roots.
    for r in roots.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = eval_with_derivative(&coeffs[..=deg], *r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.re.is_finite() || !step.im.is_finite() || step.norm() > 1e-3 * (1.0 + r.norm()) {
                break;
            }
            *r -= step;
        }
    }
    Some(roots)
}

fn companion_eigenvalues(coeffs: &[C64]) -> Option<Vec<C64>> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let mut m = DMatrix::<C64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let schur = Schur::try_new(m, f64::EPSILON, 400 * deg)?;
    let (_, t) = schur.unpack();
    Some((0..deg).map(|i| t[(i, i)]).collect())
}

/// Coefficients of `p(z + s)` from those of `p(z)`.
fn taylor_shift(coeffs: &[C64], s: C64) -> Vec<C64> {
    let mut out = coeffs.to_vec();
    let n = out.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = out[j + 1] * s;
            out[j] += t;
        }
    }
    out
}

fn quadratic_roots(a: C64, b: C64, c: C64) -> [C64; 2] {
    let disc = (b * b - a * c * 4.0).sqrt();
    // Choose the sign that avoids cancellation.
    let q = if (b.conj() * disc).re >= 0.0 {
        -(b + disc) * 0.5
    } else {
        -(b - disc) * 0.5
    };
    if q == C64::new(0.0, 0.0) {
        return [C64::new(0.0, 0.0); 2];
    }
    [q / a, c / q]
}

/// `(p(z), p'(z))` by Horner's scheme.
pub fn eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Determinant of a square complex matrix together with the 1-norm
/// condition number `‖A‖₁‖A⁻¹‖₁` (infinite when singular).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetReport {
    pub det: C64,
    pub condition: f64,
}

/// LU factorization with partial pivoting. `rows` is row-major.
pub fn lu_det(rows: &[Vec<C64>]) -> DetReport {
    let n = rows.len();
    if n == 0 {
        return DetReport {
            det: C64::new(1.0, 0.0),
            condition: 1.0,
        };
    }
    let mut a: Vec<Vec<C64>> = rows.to_vec();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .unwrap();
        if a[p][k].norm() == 0.0 {
            return DetReport {
                det: C64::new(0.0, 0.0),
                condition: f64::INFINITY,
            };
        }
        if p != k {
            a.swap(p, k);
            perm.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let l = a[i][k] / a[k][k];
            a[i][k] = l;
            for j in k + 1..n {
                let t = a[k][j];
                a[i][j] -= l * t;
            }
        }
    }
    // Columns of the inverse via forward/back substitution.
    let mut inv_norm1 = 0.0f64;
    for col in 0..n {
        let mut x: Vec<C64> = (0..n)
            .map(|i| {
                if perm[i] == col {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        for i in 0..n {
            for j in 0..i {
                let t = a[i][j] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = a[i][j] * x[j];
                x[i] -= t;
            }
            x[i] /= a[i][i];
        }
        inv_norm1 = inv_norm1.max(x.iter().map(|z| z.norm()).sum());
    }
    DetReport {
        det,
        condition: norm1 * inv_norm1,
    }
}

/// Solves `A x = b` for a small complex system (Gaussian elimination with
/// partial pivoting). Returns `None` if `A` is singular.
pub fn solve(rows: &[Vec<C64>], rhs: &[C64]) -> Option<Vec<C64>> {
    let n = rows.len();
    let mut a: Vec<Vec<C64>> = rows.to_vec();
    let mut b = rhs.to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))?;
        if a[p][k].norm() == 0.0 {
            return None;
        }
        a.swap(p, k);
        b.swap(p, k);
        for i in k + 1..n {
            let l = a[i][k] / a[k][k];
            for j in k..n {
                let t = a[k][j];
                a[i][j] -= l * t;
            }
            let t = b[k];
            b[i] -= l * t;
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let t = a[i][j] * b[j];
            b[i] -= t;
        }
        b[i] /= a[i][i];
    }
    Some(b)
}

/// Eigenvalues (ascending) of a Hermitian matrix given row-major.
pub fn hermitian_eigenvalues(rows: &[Vec<C64>]) -> Vec<f64> {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        // Symmetrize so that tiny quadrature asymmetries do not leak in.
        (rows[i][j] + rows[j][i].conj()) * 0.5
    });
    let eig = m.symmetric_eigen();
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Singular values (descending) of a small complex matrix.
pub fn singular_values(rows: &[Vec<C64>]) -> Vec<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    let m = DMatrix::from_fn(r, c, |i, j| rows[i][j]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}
