//! Deterministic sampling: seeded random streams and a shifted Halton sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// An independent random stream derived from a 64-bit seed.
pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

const PRIMES: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    out
}

/// Halton points in `[0,1)^dim` with a Cranley–Patterson shift drawn from the
/// seed. Dimensions beyond the prime table fall back to the seeded stream.
pub struct Halton {
    shift: Vec<f64>,
    index: u64,
    fallback: ChaCha8Rng,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        let mut rng = stream(seed, 0x4841_4c54);
        let shift = (0..dim).map(|_| rng.random::<f64>()).collect();
        Halton {
            shift,
            index: 0,
            fallback: rng,
        }
    }
}

impl Iterator for Halton {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        self.index += 1;
        let i = self.index;
        let fallback = &mut self.fallback;
        Some(
            self.shift
                .iter()
                .enumerate()
                .map(|(d, s)| match PRIMES.get(d) {
                    Some(&p) => (radical_inverse(i, p) + s).fract(),
                    None => fallback.random::<f64>(),
                })
                .collect(),
        )
    }
}
