//! Portable pseudo-random number generator.
//!
//! Every random choice in the crate goes through [`PortableRng`] so that a seed
//! produces the same instances and the same solver trajectories on any
//! platform. The algorithm is fixed:
//!
//! * seeding: one SplitMix64 step applied to the seed
//!   (`z += 0x9E3779B97F4A7C15; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
//!   z = (z ^ z>>27) * 0x94D049BB133111EB; z ^= z>>31`), with a zero result
//!   replaced by `0x9E3779B97F4A7C15`;
//! * step: xorshift64* (`x ^= x>>12; x ^= x<<25; x ^= x>>27`), output
//!   `x * 0x2545F4914F6CDD1D`, all arithmetic modulo 2^64;
//! * `below(n)`: draw `r` until `r >= (2^64 - n) mod n`, return `r mod n`;
//! * `unit_f64`: `(next >> 11) * 2^-53`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug)]
pub struct PortableRng {
    state: u64,
    seed: u64,
}

impl PortableRng {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(GOLDEN);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        Self {
            state: if z == 0 { GOLDEN } else { z },
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform integer in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % n;
            }
        }
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        lo + self.below((hi - lo) as u64 + 1) as i64
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `true` with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit_f64() < p
    }

    /// Fisher-Yates, from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }

    /// `count` distinct values from `0..n`, in draw order.
    pub fn sample_distinct(&mut self, n: usize, count: usize) -> Vec<usize> {
        assert!(count <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..count {
            let j = i + self.index(n - i);
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool
    }

    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        self.shuffle(&mut p);
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = PortableRng::new(4711);
        let mut b = PortableRng::new(4711);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = PortableRng::new(4712);
        assert_ne!(PortableRng::new(4711).next_u64(), c.next_u64());
    }

    #[test]
    fn below_is_in_range_and_roughly_uniform() {
        let mut rng = PortableRng::new(1);
        let mut counts = [0usize; 7];
        for _ in 0..70_000 {
            counts[rng.index(7)] += 1;
        }
        for c in counts {
            assert!((9_400..10_600).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn sample_distinct_is_distinct() {
        let mut rng = PortableRng::new(9);
        let mut s = rng.sample_distinct(50, 20);
        s.sort_unstable();
        s.dedup();
        assert_eq!(s.len(), 20);
        let mut p = rng.permutation(30);
        p.sort_unstable();
        assert_eq!(p, (0..30).collect::<Vec<_>>());
    }

    #[test]
    fn unit_interval() {
        let mut rng = PortableRng::new(3);
        for _ in 0..1000 {
            let x = rng.unit_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }
}
