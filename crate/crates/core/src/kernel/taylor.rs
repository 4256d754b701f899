use crate::polyexpr::{MultiPoly, C64};

/// Scaled partial derivatives `∂_cⁿ p / n!` of a polynomial, for exact
/// divided differences along one coordinate.
#[derive(Clone, Debug)]
pub(crate) struct Taylor {
    towers: Vec<Vec<MultiPoly>>,
}

impl Taylor {
    pub(crate) fn new(p: &MultiPoly) -> Self {
        let towers = (0..p.nvars())
            .map(|c| {
                let mut out = Vec::new();
                let mut d = p.partial(c);
                let mut fact = 1.0;
                let mut n = 1.0;
                while !d.is_zero() {
                    out.push(d.scale(C64::new(1.0 / fact, 0.0)));
                    n += 1.0;
                    fact *= n;
                    d = d.partial(c);
                }
                out
            })
            .collect();
        Taylor { towers }
    }

    /// `(p(z with z_c = t) - p(z)) / (t - z_c)`, evaluated as a Taylor sum
    /// at `z` so that it stays accurate as `t → z_c`.
    pub(crate) fn divided(&self, z: &[C64], c: usize, t: C64) -> C64 {
        let h = t - z[c];
        let mut acc = C64::new(0.0, 0.0);
        for q in self.towers[c].iter().rev() {
            acc = acc * h + q.eval_unchecked(z);
        }
        acc
    }
}
