//! Seeded random number generation. There is no global RNG state anywhere in
//! the crate; every random draw flows from an explicit 64-bit seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::space::NormKind;

pub type LabRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian direction normalized to unit `norm`. Retries on the (measure zero)
/// all-zero draw.
pub(crate) fn unit_vector(rng: &mut LabRng, dim: usize, norm: NormKind) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm.norm_of(&v);
        if n > 0.0 && n.is_finite() {
            v.iter_mut().for_each(|c| *c /= n);
            return v;
        }
    }
}
