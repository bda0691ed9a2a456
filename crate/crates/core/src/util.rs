//! Small internal helpers: a deterministic PRNG and frequency sweeps.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// SplitMix64. Tiny, seedable, and good enough for sampling test points;
/// results must not depend on platform or thread count, so no external RNG.
pub(crate) struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub(crate) fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub(crate) fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// `exp(2 pi i j / n)`, computed from the angle so that the value for a
/// given `(j, n)` never depends on loop or thread order.
pub(crate) fn unit_root(j: usize, n: usize) -> Complex64 {
    let angle = core::f64::consts::TAU * (j as f64) / (n as f64);
    Complex64::new(angle.cos(), angle.sin())
}

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is active.
/// The output is ordered by index either way, so reductions over it are
/// independent of the thread count.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_is_reproducible() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let u = SplitMix64::new(42).next_f64();
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn unit_roots_lie_on_circle() {
        for j in 0..16 {
            let w = unit_root(j, 16);
            assert!((w.norm() - 1.0).abs() < 1e-15);
        }
        assert_eq!(unit_root(0, 8), Complex64::new(1.0, 0.0));
    }
}
