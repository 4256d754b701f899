//! The genus-4 template `g = x2 x3 - x1`, `f = x3³ + h1 x3² + h2 x3 + h3`
//! with `h_i(x1, x2) = Σ a^{(i)}_{kl} x1^k x2^l`.

use std::collections::BTreeMap;

use super::SpaceCurve;
use crate::error::{Error, Result};
use crate::polyexpr::{Monomial, MultiPoly, C64};

/// Coefficient table `a^{(i)}_{kl}` for `i = 1, 2, 3` and `k + l ≤ i`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TemplateCoeffs {
    entries: BTreeMap<(u8, u8, u8), C64>,
}

impl TemplateCoeffs {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `a^{(i)}_{kl}`.
    pub fn set(&mut self, i: u8, k: u8, l: u8, value: C64) -> Result<()> {
        if !(1..=3).contains(&i) || k + l > i {
            return Err(Error::IndexOutOfRange(format!(
                "a^({i})_{{{k}{l}}} needs 1 <= i <= 3 and k + l <= i"
            )));
        }
        if value == C64::new(0.0, 0.0) {
            self.entries.remove(&(i, k, l));
        } else {
            self.entries.insert((i, k, l), value);
        }
        Ok(())
    }

    pub fn with(mut self, i: u8, k: u8, l: u8, value: C64) -> Result<Self> {
        self.set(i, k, l, value)?;
        Ok(self)
    }

    pub fn get(&self, i: u8, k: u8, l: u8) -> C64 {
        self.entries
            .get(&(i, k, l))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn entries(&self) -> impl Iterator<Item = ((u8, u8, u8), C64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    /// `h_i` as a polynomial in `(x1, x2, x3)` (independent of `x3`).
    pub fn h(&self, i: u8) -> MultiPoly {
        let mut p = MultiPoly::zero(3);
        for (&(j, k, l), &c) in &self.entries {
            if j == i {
                p.add_term(Monomial::from_slice(&[k as u16, l as u16, 0]), c);
            }
        }
        p
    }

    /// `f = x3³ + h1 x3² + h2 x3 + h3`.
    pub fn f(&self) -> MultiPoly {
        let x3 = MultiPoly::var(3, 2);
        let mut f = x3.pow(3);
        for i in 1..=3u8 {
            f = &f + &(&self.h(i) * &x3.pow(3 - i as u32));
        }
        f
    }

    /// Builds the template curve.
    pub fn curve(&self) -> Result<SpaceCurve> {
        let g = &(&MultiPoly::var(3, 1) * &MultiPoly::var(3, 2)) - &MultiPoly::var(3, 0);
        SpaceCurve::new(self.f(), g)
    }
}

impl SpaceCurve {
    /// Recognizes the template shape and reads back its coefficient table.
    pub fn template_coeffs(&self) -> Option<TemplateCoeffs> {
        let g = &(&MultiPoly::var(3, 1) * &MultiPoly::var(3, 2)) - &MultiPoly::var(3, 0);
        if self.g() != &g {
            return None;
        }
        let f = self.f();
        if f.degree_in(2) != 3 || f.coeff(&Monomial::from_slice(&[0, 0, 3])) != C64::new(1.0, 0.0) {
            return None;
        }
        let mut t = TemplateCoeffs::new();
        for (m, c) in f.terms() {
            let (k, l, e3) = (m.exp(0), m.exp(1), m.exp(2));
            if e3 == 3 {
                if k + l != 0 {
                    return None;
                }
                continue;
            }
            let i = 3 - e3 as u8;
            t.set(i, k as u8, l as u8, *c).ok()?;
        }
        Some(t)
    }
}

/// The genus-4 template with `a^{(3)}_{30} = a^{(3)}_{03} = a^{(3)}_{00} = 1`,
/// i.e. `f = x3³ + x1³ + x2³ + 1`.
pub fn literal_fixture() -> TemplateCoeffs {
    let one = C64::new(1.0, 0.0);
    TemplateCoeffs::new()
        .with(3, 3, 0, one)
        .and_then(|t| t.with(3, 0, 3, one))
        .and_then(|t| t.with(3, 0, 0, one))
        .expect("indices in range")
}
