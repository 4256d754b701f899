//! Built-in curves: the literal genus-4 fixture and a seeded smooth
//! perturbation of it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{literal_fixture, SpaceCurve, TemplateCoeffs};
use crate::error::Result;
use crate::polyexpr::C64;

/// Seed of the smooth fixture used by the acceptance suite.
pub const SMOOTH_SEED: u64 = 7;

/// Magnitude of the random entries added to the literal table.
const PERTURBATION: f64 = 0.25;

/// `f = x3³ + x1³ + x2³ + 1`, `g = x2 x3 - x1`.
pub fn literal() -> SpaceCurve {
    literal_fixture().curve().expect("valid template")
}

/// The literal table plus seeded complex entries of modulus at most
/// `PERTURBATION` in every other slot `a^{(i)}_{kl}`.
pub fn perturbed_coeffs(seed: u64) -> TemplateCoeffs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = literal_fixture();
    for i in 1..=3u8 {
        for k in 0..=i {
            for l in 0..=(i - k) {
                if t.get(i, k, l) != C64::new(0.0, 0.0) {
                    continue;
                }
                let z = C64::from_polar(
                    PERTURBATION * rng.gen_range(0.2..1.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
                t.set(i, k, l, z).expect("k + l <= i");
            }
        }
    }
    t
}

pub fn smooth(seed: u64) -> Result<SpaceCurve> {
    perturbed_coeffs(seed).curve()
}
