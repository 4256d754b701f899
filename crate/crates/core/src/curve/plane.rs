//! Plane curves `f(x1, x2) = 0` and hyperelliptic curves `y² = P(x1)`.

use super::BRANCH_MERGE_TOL;
use crate::error::{Error, Result};
use crate::linalg::poly_roots;
use crate::polyexpr::{horner, resultant, Monomial, MultiPoly, C64};

/// A plane curve viewed as a branched cover of the `x1`-line.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneCurve {
    f: MultiPoly,
    f2: MultiPoly,
}

impl PlaneCurve {
    pub fn new(f: MultiPoly) -> Result<Self> {
        if f.nvars() != 2 {
            return Err(Error::Arity {
                expected: 2,
                got: f.nvars(),
            });
        }
        if !f.depends_on(1) {
            return Err(Error::Invalid("plane curve must depend on x2".into()));
        }
        let f2 = f.partial(1);
        Ok(PlaneCurve { f, f2 })
    }

    pub fn f(&self) -> &MultiPoly {
        &self.f
    }

    /// `f^{(0,1)} = ∂f/∂x2`.
    pub fn f_x2(&self, x: &[C64; 2]) -> C64 {
        self.f2.eval_unchecked(x)
    }

    pub fn eval(&self, x: &[C64; 2]) -> C64 {
        self.f.eval_unchecked(x)
    }

    pub fn residual(&self, x: &[C64; 2]) -> f64 {
        self.f.eval_unchecked(x).norm() / (1.0 + self.f.eval_abs_terms(x))
    }

    /// The points `(x1, x2)` above `x1`, sorted by argument then modulus of `x2`.
    pub fn fiber(&self, x1: C64) -> Result<Vec<[C64; 2]>> {
        let coeffs = self.f.substitute_value(0, x1).to_univariate(1)?;
        let mut roots = poly_roots(&coeffs)
            .ok_or_else(|| Error::NoConvergence("plane fiber roots".into()))?;
        roots.sort_by(|a, b| a.arg().total_cmp(&b.arg()).then(a.norm().total_cmp(&b.norm())));
        Ok(roots.into_iter().map(|x2| [x1, x2]).collect())
    }

    /// Base values where `f = ∂f/∂x2 = 0`, from the discriminant in `x2`.
    pub fn branch_points(&self) -> Result<Vec<C64>> {
        let disc = resultant(&self.f, &self.f2, 1)?;
        if disc.is_zero() {
            return Err(Error::Elimination("discriminant vanishes identically".into()));
        }
        let roots = poly_roots(&disc.to_univariate(0)?)
            .ok_or_else(|| Error::NoConvergence("discriminant roots".into()))?;
        let mut out: Vec<C64> = Vec::new();
        for r in roots {
            if !out.iter().any(|b| (b - r).norm() <= BRANCH_MERGE_TOL * (1.0 + r.norm())) {
                out.push(r);
            }
        }
        out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(out)
    }

    /// A cover is smooth when `f`, `∂f/∂x1`, `∂f/∂x2` have no common zero;
    /// checked above every branch point.
    pub fn is_smooth(&self) -> Result<bool> {
        let f1 = self.f.partial(0);
        for b in self.branch_points()? {
            for x in self.fiber(b)? {
                let scale = 1.0 + self.f.eval_abs_terms(&x);
                let on_branch = self.f2.eval_unchecked(&x).norm() <= 1e-6 * scale;
                if on_branch && f1.eval_unchecked(&x).norm() <= 1e-8 * scale {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// `y² = P(x1)` with `P(x) = Σ A_k x^k`, `k = 0..=2g+2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperellipticCurve {
    pub a: Vec<C64>,
}

impl HyperellipticCurve {
    /// `a` holds `2g + 3` coefficients; the top one or the one below it
    /// must be nonzero.
    pub fn new(a: Vec<C64>) -> Result<Self> {
        let n = a.len();
        if n < 5 || n % 2 == 0 {
            return Err(Error::Invalid(format!(
                "need 2g+3 coefficients with g >= 1, got {n}"
            )));
        }
        let zero = C64::new(0.0, 0.0);
        if a[n - 1] == zero && a[n - 2] == zero {
            return Err(Error::Invalid("P has degree below 2g+1".into()));
        }
        Ok(HyperellipticCurve { a })
    }

    pub fn genus(&self) -> usize {
        (self.a.len() - 3) / 2
    }

    pub fn p(&self, x: C64) -> C64 {
        horner(&self.a, x)
    }

    /// `R(x, x') = Σ_j A_{2j} (x x')^j + ½ Σ_j A_{2j+1} (x + x') (x x')^j`.
    pub fn r(&self, x: C64, xp: C64) -> C64 {
        let prod = x * xp;
        let sum = x + xp;
        let mut acc = C64::new(0.0, 0.0);
        let mut pw = C64::new(1.0, 0.0);
        for (k, c) in self.a.iter().enumerate() {
            if k % 2 == 0 {
                acc += c * pw;
            } else {
                acc += c * sum * pw * 0.5;
                pw *= prod;
            }
        }
        acc
    }

    /// `y(x)` on the sheet `sign = ±1`, using the principal square root.
    pub fn y(&self, x: C64, sign: i8) -> C64 {
        let s = self.p(x).sqrt();
        if sign < 0 {
            -s
        } else {
            s
        }
    }

    /// The plane curve `x2² - P(x1)`.
    pub fn plane_curve(&self) -> PlaneCurve {
        let mut f = MultiPoly::zero(2);
        f.add_term(Monomial::from_slice(&[0, 2]), C64::new(1.0, 0.0));
        for (k, c) in self.a.iter().enumerate() {
            f.add_term(Monomial::from_slice(&[k as u16, 0]), -c);
        }
        PlaneCurve::new(f).expect("depends on x2")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyexpr::parse;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn parabola() {
        let p = PlaneCurve::new(parse("x2^2 - x1", &["x1", "x2"]).unwrap()).unwrap();
        let fib = p.fiber(c(4.0, 0.0)).unwrap();
        assert_eq!(fib.len(), 2);
        assert!(fib.iter().any(|x| (x[1] - 2.0).norm() < 1e-14));
        assert!(fib.iter().any(|x| (x[1] + 2.0).norm() < 1e-14));
        let b = p.branch_points().unwrap();
        assert_eq!(b.len(), 1);
        assert!(b[0].norm() < 1e-14);
        assert!(p.is_smooth().unwrap());
    }

    #[test]
    fn hyperelliptic_r() {
        let h = HyperellipticCurve::new(vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]).unwrap();
        assert_eq!(h.genus(), 1);
        assert_eq!(h.r(c(2., 0.), c(3., 0.)), c(37., 0.));
        let (a, b) = (c(0.3, -1.2), c(-0.8, 0.4));
        assert!((h.r(a, b) - h.r(b, a)).norm() < 1e-14);
        assert!((h.r(a, a) - h.p(a)).norm() < 1e-14);
    }

    #[test]
    fn hyperelliptic_branch_points_are_roots_of_p() {
        let h = HyperellipticCurve::new(vec![c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]).unwrap();
        let b = h.plane_curve().branch_points().unwrap();
        assert_eq!(b.len(), 4);
        for r in b {
            assert!(h.p(r).norm() < 1e-12);
        }
    }
}
