//! Sparse multivariate polynomials with complex coefficients.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is graded
//! lexicographic, so every iteration, printing and evaluation order is
//! deterministic. Coefficients are pruned only when they are exactly zero.

mod parse;
mod resultant;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use parse::{parse, parse_complex};
pub use resultant::{exact_div, resultant};

pub type C64 = Complex64;

/// Maximum number of variables a [`MultiPoly`] may carry.
pub const MAX_VARS: usize = 4;
/// Sanity bound on total degree.
pub const MAX_DEGREE: u32 = 64;

/// Exponent tuple. Slots past `nvars` are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(pub [u16; MAX_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; MAX_VARS])
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_slice(exps: &[u16]) -> Self {
        let mut e = [0; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exp(&self, i: usize) -> u16 {
        self.0[i]
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Monomial(e)
    }

    /// `self / other` if every exponent of `other` is ≤ the matching one.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            if *a < *b {
                return None;
            }
            *a -= *b;
        }
        Some(Monomial(e))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, C64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        assert!((1..=MAX_VARS).contains(&nvars), "nvars must be in 1..=4");
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(i), C64::new(1.0, 0.0));
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponents accumulate.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u16>, C64)>,
    {
        let mut p = Self::zero(nvars);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::Arity {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::Invalid("non-finite coefficient".into()));
            }
            p.add_term(Monomial::from_slice(&exps), c);
        }
        if p.total_degree() > MAX_DEGREE {
            return Err(Error::Invalid(format!(
                "total degree {} exceeds {MAX_DEGREE}",
                p.total_degree()
            )));
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> C64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn add_term(&mut self, m: Monomial, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(m).or_default();
        *entry += c;
        if *entry == C64::new(0.0, 0.0) {
            self.terms.remove(&m);
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(var) as u32).max().unwrap_or(0)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exp(var) > 0)
    }

    /// Drops every term whose coefficient has magnitude at most `tol`.
    pub fn chop(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() > tol);
    }

    /// Sum of coefficient magnitudes.
    pub fn coeff_sum(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Largest coefficient magnitude; 0 for the zero polynomial.
    pub fn coeff_scale(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(Monomial, C64)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, *c))
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, v) in &self.terms {
            out.add_term(*m, *v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, C64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn check_arity(&self, other: &MultiPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Arity {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<Self> {
        self.check_arity(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<Self> {
        self.check_arity(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<Self> {
        self.check_arity(other)?;
        Ok(self * other)
    }

    /// Evaluates at `point`, which must have exactly `nvars` entries.
    pub fn eval(&self, point: &[C64]) -> Result<C64> {
        if point.len() != self.nvars {
            return Err(Error::Arity {
                expected: self.nvars,
                got: point.len(),
            });
        }
        Ok(self.eval_unchecked(point))
    }

    /// Term-sum evaluation in graded-lex order using per-variable power tables.
    pub fn eval_unchecked(&self, point: &[C64]) -> C64 {
        let mut powers: [[C64; 8]; MAX_VARS] = [[C64::new(1.0, 0.0); 8]; MAX_VARS];
        for (v, z) in point.iter().enumerate().take(self.nvars) {
            for k in 1..8 {
                powers[v][k] = powers[v][k - 1] * z;
            }
        }
        let mut acc = C64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = *c;
            for v in 0..self.nvars {
                let e = m.0[v] as usize;
                if e < 8 {
                    t *= powers[v][e];
                } else {
                    t *= point[v].powu(e as u32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Σ |c|·|z^m| over the terms: the magnitude scale against which a
    /// residual `|p(z)|` is judged.
    pub fn eval_abs_terms(&self, point: &[C64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.norm();
                for (v, z) in point.iter().enumerate().take(self.nvars) {
                    t *= z.norm().powi(m.0[v] as i32);
                }
                t
            })
            .sum()
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Self {
        assert!(var < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut d = *m;
            d.0[var] -= 1;
            out.add_term(d, *c * e as f64);
        }
        out
    }

    /// Replaces variable `var` by the polynomial `q` (same arity).
    pub fn substitute(&self, var: usize, q: &MultiPoly) -> Result<Self> {
        self.check_arity(q)?;
        if var >= self.nvars {
            return Err(Error::Arity {
                expected: self.nvars,
                got: var + 1,
            });
        }
        let maxe = self.degree_in(var) as usize;
        let mut qpow = Vec::with_capacity(maxe + 1);
        qpow.push(Self::constant(self.nvars, C64::new(1.0, 0.0)));
        for k in 1..=maxe {
            let next = &qpow[k - 1] * q;
            qpow.push(next);
        }
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var] as usize;
            let mut rest = *m;
            rest.0[var] = 0;
            for (qm, qc) in &qpow[e].terms {
                out.add_term(rest.mul(qm), *c * qc);
            }
        }
        Ok(out)
    }

    /// Substitutes a numeric value for `var`; the variable stays in the
    /// arity but no longer appears.
    pub fn substitute_value(&self, var: usize, value: C64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut rest = *m;
            rest.0[var] = 0;
            out.add_term(rest, *c * value.powu(e as u32));
        }
        out
    }

    /// Coefficients in powers of `var`: `p = Σ_k coeffs[k] · var^k`.
    /// The zero polynomial yields `[0]`.
    pub fn univariate_coeffs(&self, var: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Self::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0[var] as usize;
            let mut rest = *m;
            rest.0[var] = 0;
            out[e].add_term(rest, *c);
        }
        out
    }

    /// Numeric coefficients of a polynomial that depends on `var` only.
    pub fn to_univariate(&self, var: usize) -> Result<Vec<C64>> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![C64::new(0.0, 0.0); deg + 1];
        for (m, c) in &self.terms {
            if (0..self.nvars).any(|v| v != var && m.0[v] > 0) {
                return Err(Error::Invalid(
                    "polynomial depends on more than one variable".into(),
                ));
            }
            out[m.0[var] as usize] += c;
        }
        Ok(out)
    }

    /// Homogenization by a new variable inserted at index 0:
    /// `F(ξ0, x..) = ξ0^d p(x/ξ0)` with `d` the total degree.
    pub fn homogenize(&self) -> Result<Self> {
        if self.nvars >= MAX_VARS {
            return Err(Error::Arity {
                expected: MAX_VARS - 1,
                got: self.nvars,
            });
        }
        let d = self.total_degree();
        let mut out = Self::zero(self.nvars + 1);
        for (m, c) in &self.terms {
            let mut e = [0u16; MAX_VARS];
            e[0] = (d - m.degree()) as u16;
            e[1..=self.nvars].copy_from_slice(&m.0[..self.nvars]);
            out.add_term(Monomial(e), *c);
        }
        Ok(out)
    }

    /// The homogeneous part of top total degree.
    pub fn leading_form(&self) -> Self {
        let d = self.total_degree();
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.degree() == d {
                out.add_term(*m, *c);
            }
        }
        out
    }

    /// Drops variable `var` (which must not occur), lowering the arity.
    pub fn drop_var(&self, var: usize) -> Result<Self> {
        if self.depends_on(var) {
            return Err(Error::Invalid(format!("variable {var} still occurs")));
        }
        let mut out = Self::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            let mut e = [0u16; MAX_VARS];
            let mut k = 0;
            for v in 0..self.nvars {
                if v != var {
                    e[k] = m.0[v];
                    k += 1;
                }
            }
            out.add_term(Monomial(e), *c);
        }
        Ok(out)
    }

    /// Re-indexes variables: variable `v` of `self` becomes `map[v]` in a
    /// polynomial of arity `nvars`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = [0u16; MAX_VARS];
            for v in 0..self.nvars {
                e[map[v]] += m.0[v];
            }
            out.add_term(Monomial(e), *c);
        }
        out
    }

    /// Canonical text form using the given variable names; `parse` reads it
    /// back to an identical polynomial.
    pub fn to_string_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono = format_monomial(m, names, self.nvars);
            let (negative, body) = format_coeff(*c, mono.is_empty());
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            match (body.is_empty(), mono.is_empty()) {
                (true, _) => out.push_str(&mono),
                (false, true) => out.push_str(&body),
                (false, false) => {
                    out.push_str(&body);
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }
}

fn format_monomial(m: &Monomial, names: &[&str], nvars: usize) -> String {
    let mut parts = Vec::new();
    for v in 0..nvars {
        match m.0[v] {
            0 => {}
            1 => parts.push(names[v].to_string()),
            e => parts.push(format!("{}^{}", names[v], e)),
        }
    }
    parts.join("*")
}

/// Returns (is-negative-real, body). Body is empty for a unit coefficient on
/// a non-constant monomial.
fn format_coeff(c: C64, constant: bool) -> (bool, String) {
    if c.im == 0.0 {
        let neg = c.re.is_sign_negative();
        let a = c.re.abs();
        if a == 1.0 && !constant {
            (neg, String::new())
        } else {
            (neg, format!("{a:?}").trim_end_matches(".0").to_string())
        }
    } else {
        let re = format!("{:?}", c.re).trim_end_matches(".0").to_string();
        let im_abs = format!("{:?}", c.im.abs())
            .trim_end_matches(".0")
            .to_string();
        let sign = if c.im.is_sign_negative() { '-' } else { '+' };
        (false, format!("({re}{sign}{im_abs}i)"))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.to_string_with(&refs))
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, *c);
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -*c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch");
        let mut acc: BTreeMap<Monomial, C64> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *acc.entry(ma.mul(mb)).or_default() += ca * cb;
            }
        }
        acc.retain(|_, c| *c != C64::new(0.0, 0.0));
        MultiPoly {
            nvars: self.nvars,
            terms: acc,
        }
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

/// Horner evaluation of a dense univariate coefficient vector (ascending).
pub fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn xs() -> [&'static str; 3] {
        ["x1", "x2", "x3"]
    }

    #[test]
    fn product_of_conjugate_linears() {
        let x = MultiPoly::var(1, 0);
        let one = MultiPoly::constant(1, c(1.0, 0.0));
        let p = &(&x + &one) * &(&x - &one);
        assert_eq!(p, parse("x1^2 - 1", &["x1"]).unwrap());
    }

    #[test]
    fn substitute_defining_relation_vanishes() {
        let g = parse("x2*x3 - x1", &xs()).unwrap();
        let q = parse("x2*x3", &xs()).unwrap();
        assert!(g.substitute(0, &q).unwrap().is_zero());
    }

    #[test]
    fn eval_examples() {
        let g = parse("x2*x3 - x1", &xs()).unwrap();
        assert_eq!(g.eval(&[c(2., 0.), c(1., 0.), c(2., 0.)]).unwrap(), c(0., 0.));
        let f = parse("x3^3 + x1^3 + x2^3 + 1", &xs()).unwrap();
        assert_eq!(f.eval(&[c(-1., 0.), c(-1., 0.), c(1., 0.)]).unwrap(), c(0., 0.));
        let sq = parse("x1^2", &["x1"]).unwrap();
        assert_eq!(sq.eval(&[c(1., 1.)]).unwrap(), c(0., 2.));
        assert!(matches!(
            sq.eval(&[c(1., 0.), c(2., 0.)]),
            Err(Error::Arity { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn partial_examples() {
        let g = parse("x2*x3 - x1", &xs()).unwrap();
        assert_eq!(g.partial(2), parse("x2", &xs()).unwrap());
        let f = parse("x3^3 + x1^3 + x2^3 + 1", &xs()).unwrap();
        assert_eq!(f.partial(1), parse("3*x2^2", &xs()).unwrap());
        let par = parse("x2^2 - x1", &["x1", "x2"]).unwrap();
        assert_eq!(par.partial(1), parse("2*x2", &["x1", "x2"]).unwrap());
    }

    #[test]
    fn homogenize_then_drop_xi0() {
        let f = parse("x3^3 + x1^3 + x2^3 + 1", &xs()).unwrap();
        let h = f.homogenize().unwrap();
        let at_infinity = h.substitute_value(0, c(0., 0.)).drop_var(0).unwrap();
        assert_eq!(at_infinity, parse("x3^3 + x1^3 + x2^3", &xs()).unwrap());
        assert_eq!(f.leading_form(), at_infinity);
    }

    #[test]
    fn univariate_collection() {
        let f = parse("x3^3 + 2*x1*x3^2 + x2*x3 + x1^3", &xs()).unwrap();
        let cs = f.univariate_coeffs(2);
        assert_eq!(cs.len(), 4);
        assert_eq!(cs[3], MultiPoly::constant(3, c(1., 0.)));
        assert_eq!(cs[2], parse("2*x1", &xs()).unwrap());
        assert_eq!(cs[1], parse("x2", &xs()).unwrap());
        assert_eq!(cs[0], parse("x1^3", &xs()).unwrap());

        let five = MultiPoly::constant(1, c(5., 0.));
        assert_eq!(five.univariate_coeffs(0), vec![five.clone()]);

        let p = parse("x1^2*x2 + x2", &["x1", "x2"]).unwrap();
        let cs = p.univariate_coeffs(1);
        assert!(cs[0].is_zero());
        assert_eq!(cs[1], parse("x1^2 + 1", &["x1", "x2"]).unwrap());
    }

    #[test]
    fn canonical_print() {
        let g = parse("x2*x3 - x1", &xs()).unwrap();
        assert_eq!(g.to_string(), "x2*x3 - x1");
        let p = parse("(1+2i)*x1^2 + 3", &["x1"]).unwrap();
        assert_eq!(p.to_string_with(&["x1"]), "(1+2i)*x1^2 + 3");
        assert_eq!(MultiPoly::zero(2).to_string(), "0");
    }

    #[test]
    fn pow_matches_repeated_product() {
        let p = parse("x1 + (0.5-1i)*x2", &["x1", "x2"]).unwrap();
        assert_eq!(p.pow(3), &(&p * &p) * &p);
        assert_eq!(p.pow(0), MultiPoly::constant(2, c(1., 0.)));
    }
}
