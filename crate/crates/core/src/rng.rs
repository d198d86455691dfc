//! Seeded, platform-stable random number generation.
//!
//! The generator is SplitMix64: a 64-bit counter advanced by the golden
//! ratio increment and finalized with the murmur-style mix. It is fixed
//! here (rather than pulled from a crate) so that fixtures and simulation
//! reports are bit-identical across platforms and toolchain upgrades.
//! Gaussian variates come from the Marsaglia polar method.

use num_complex::Complex64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    spare_gaussian: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 {
            state: seed,
            spare_gaussian: None,
        }
    }

    /// Counter-based stream split: derives an independent generator for a
    /// given sub-stream index without consuming this generator's state.
    pub fn split(&self, counter: u64) -> SplitMix64 {
        SplitMix64::new(mix(self.state ^ mix(counter.wrapping_add(GOLDEN))))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal by the polar method (the spare variate is cached).
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(g) = self.spare_gaussian.take() {
            return g;
        }
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                self.spare_gaussian = Some(v * m);
                return u * m;
            }
        }
    }

    /// Standard complex normal: E |z|^2 = 1.
    pub fn next_complex_gaussian(&mut self) -> Complex64 {
        let scale = 0.5f64.sqrt();
        Complex64::new(self.next_gaussian() * scale, self.next_gaussian() * scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let mut a = SplitMix64::new(12345);
        let mut b = SplitMix64::new(12345);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn split_streams_differ() {
        let base = SplitMix64::new(7);
        let mut s1 = base.split(0);
        let mut s2 = base.split(1);
        assert_ne!(s1.next_u64(), s2.next_u64());
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = SplitMix64::new(99);
        let n = 20_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let g = rng.next_gaussian();
            sum += g;
            sum_sq += g * g;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }
}
