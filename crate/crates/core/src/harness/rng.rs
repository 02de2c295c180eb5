//! Counter-based 64-bit generator for seeded perturbations.
//!
//! Draw `i` of stream `seed` is
//!
//! ```text
//! z = seed + (i + 1) * 0x9E3779B97F4A7C15          (wrapping)
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9          (wrapping)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB          (wrapping)
//! z =  z ^ (z >> 31)
//! ```
//!
//! and the unit float is `(z >> 11) * 2^-53`. Any draw can be computed
//! without the ones before it.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix(seed: u64, counter: u64) -> u64 {
    let mut z = seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform in `[0, 1)`.
pub fn unit(seed: u64, counter: u64) -> f64 {
    (mix(seed, counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential view of one stream.
#[derive(Clone, Debug)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = mix(self.seed, self.counter);
        self.counter += 1;
        v
    }

    pub fn next_unit(&mut self) -> f64 {
        let v = unit(self.seed, self.counter);
        self.counter += 1;
        v
    }

    /// Uniform in `[a, b)`.
    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.next_unit()
    }
}
