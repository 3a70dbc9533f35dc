//! Deterministic splittable random number generator.
//!
//! Built on SplitMix64 (Sebastiano Vigna). Child streams are derived from the
//! parent seed plus a path label, so independent pieces of work can each own a
//! stream without sharing mutable state: identical seed + path always yields
//! the identical sequence, on every platform.

/// Splittable pseudo-random stream. Non-cryptographic.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
    seed: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over the label bytes; feeds child-seed derivation.
#[inline]
fn hash_label(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: mix64(seed.wrapping_add(GOLDEN)), seed }
    }

    /// Seed this stream was created from (root seed or derived child seed).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derive an independent child stream named by `label`.
    ///
    /// Derivation reads only the creation seed, never the consumption state,
    /// so the set of children is stable no matter how much of the parent
    /// stream has been used.
    pub fn child(&self, label: &str) -> Rng {
        Rng::new(mix64(self.seed ^ hash_label(label)))
    }

    /// Derive an indexed child stream, e.g. one per table or per cell.
    pub fn child_idx(&self, label: &str, idx: u64) -> Rng {
        Rng::new(mix64(self.seed ^ hash_label(label) ^ mix64(idx.wrapping_add(GOLDEN))))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    #[inline]
    pub fn f64(&mut self) -> f64 {
        const DEN: f64 = (1u64 << 53) as f64;
        ((self.next_u64() >> 11) as f64) / DEN
    }

    /// Uniform integer in [0, n). Rejection sampling keeps it exactly uniform.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Uniform integer in [lo, hi] inclusive.
    pub fn int_range(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "int_range lo > hi");
        let span = (hi - lo) as u64 + 1;
        lo + self.below(span) as i64
    }

    pub fn usize_range(&mut self, lo: usize, hi: usize) -> usize {
        self.int_range(lo as i64, hi as i64) as usize
    }

    /// Uniform real in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.f64()
    }

    /// Standard normal via Box-Muller (no cached second value, so cloning a
    /// stream never desynchronizes).
    pub fn normal(&mut self) -> f64 {
        let u1 = loop {
            let u = self.f64();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn normal_with(&mut self, mean: f64, std: f64) -> f64 {
        mean + std * self.normal()
    }

    /// Geometric: number of failures before the first success, P(success)=p.
    pub fn geometric(&mut self, p: f64) -> u64 {
        assert!(p > 0.0 && p <= 1.0);
        let mut k = 0;
        while self.f64() >= p {
            k += 1;
        }
        k
    }

    /// Exponential with rate 1.
    pub fn exp1(&mut self) -> f64 {
        let u = loop {
            let u = self.f64();
            if u > 0.0 {
                break u;
            }
        };
        -u.ln()
    }

    /// Symmetric Dirichlet(1,...,1): normalized i.i.d. exponentials.
    pub fn dirichlet_ones(&mut self, k: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..k).map(|_| self.exp1()).collect();
        let s: f64 = v.iter().sum();
        for x in &mut v {
            *x /= s;
        }
        v
    }

    /// Index draw from explicit probabilities (assumed to sum to ~1).
    pub fn multinomial(&mut self, probs: &[f64]) -> usize {
        let u = self.f64();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// `k` distinct indices drawn uniformly from [0, n), in draw order.
    pub fn choose_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below((n - i) as u64) as usize;
            idx.swap(i, j);
        }
        idx.truncate(k);
        idx
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_seed_identical_sequence() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn children_are_independent_of_consumption() {
        let mut a = Rng::new(7);
        let b = Rng::new(7);
        let _ = a.next_u64();
        let _ = a.next_u64();
        let mut ca = a.child("x");
        let mut cb = b.child("x");
        for _ in 0..10 {
            assert_eq!(ca.next_u64(), cb.next_u64());
        }
    }

    #[test]
    fn distinct_labels_distinct_streams() {
        let r = Rng::new(1);
        assert_ne!(r.child("a").next_u64(), r.child("b").next_u64());
        assert_ne!(r.child_idx("t", 0).next_u64(), r.child_idx("t", 1).next_u64());
    }

    #[test]
    fn below_is_in_range_and_covers() {
        let mut r = Rng::new(3);
        let mut seen = [false; 5];
        for _ in 0..1000 {
            let v = r.below(5) as usize;
            assert!(v < 5);
            seen[v] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn normal_moments() {
        let mut r = Rng::new(11);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| r.normal()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn dirichlet_sums_to_one() {
        let mut r = Rng::new(5);
        let w = r.dirichlet_ones(7);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn choose_indices_distinct() {
        let mut r = Rng::new(9);
        for _ in 0..100 {
            let k = r.usize_range(0, 10);
            let picked = r.choose_indices(10, k);
            let mut sorted = picked.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), picked.len());
        }
    }
}
