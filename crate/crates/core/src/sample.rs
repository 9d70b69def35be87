//! Deterministic domain sampling. Points come from a SplitMix64 stream so a
//! (seed, count) pair reproduces the same samples on every platform.

use crate::frame::Domain;

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Fraction of each side length kept as a margin so finite-difference
/// stencils at sampled points stay inside the closed box.
const MARGIN: f64 = 0.005;

/// `count` points drawn uniformly from the slightly shrunken domain box,
/// coordinates in declaration order.
pub fn sample_points(domain: &Domain, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| {
            (0..domain.dim())
                .map(|k| {
                    let [lo, hi] = domain.interval(k);
                    let pad = MARGIN * (hi - lo);
                    lo + pad + rng.next_f64() * (hi - lo - 2.0 * pad)
                })
                .collect()
        })
        .collect()
}

/// Consecutive non-overlapping pairs from a sample list.
pub fn sample_pairs(points: &[Vec<f64>]) -> Vec<(&Vec<f64>, &Vec<f64>)> {
    points.chunks_exact(2).map(|c| (&c[0], &c[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_deterministic() {
        let a: Vec<u64> = {
            let mut r = SplitMix64::new(42);
            (0..8).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = SplitMix64::new(42);
            (0..8).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        let c: Vec<u64> = {
            let mut r = SplitMix64::new(43);
            (0..8).map(|_| r.next_u64()).collect()
        };
        assert_ne!(a, c);
    }

    #[test]
    fn samples_stay_interior() {
        let domain = Domain::new(vec![[0.1, 10.0], [-10.0, 10.0]]).unwrap();
        let pts = sample_points(&domain, 200, 7);
        assert_eq!(pts.len(), 200);
        for p in &pts {
            assert!(p[0] > 0.1 && p[0] < 10.0);
            assert!(p[1] > -10.0 && p[1] < 10.0);
            // Margin keeps default FD stencils inside.
            assert!(p[0] - 0.1 > crate::fd::default_step(p[0]));
        }
    }

    #[test]
    fn pairs_are_consecutive() {
        let domain = Domain::new(vec![[0.0, 1.0]]).unwrap();
        let pts = sample_points(&domain, 5, 1);
        let pairs = sample_pairs(&pts);
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].0, &pts[0]);
        assert_eq!(pairs[0].1, &pts[1]);
        assert_eq!(pairs[1].0, &pts[2]);
    }
}
