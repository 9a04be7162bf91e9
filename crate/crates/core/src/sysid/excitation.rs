//! Identification excitation: per-heater staircase levels gated by PRBS bits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Maximal-length Fibonacci LFSR.
#[derive(Debug, Clone)]
pub struct Prbs {
    state: u32,
    degree: u32,
    taps: u32,
}

impl Prbs {
    /// `x^9 + x^5 + 1`, period 511.
    pub fn prbs9(seed: u32) -> Self {
        Self::new(9, 1 | (1 << 5), seed)
    }

    /// `x^11 + x^9 + 1`, period 2047.
    pub fn prbs11(seed: u32) -> Self {
        Self::new(11, 1 | (1 << 9), seed)
    }

    fn new(degree: u32, taps: u32, seed: u32) -> Self {
        let mask = (1u32 << degree) - 1;
        let state = if seed & mask == 0 { 1 } else { seed & mask };
        Self { state, degree, taps }
    }

    pub fn period(&self) -> usize {
        (1usize << self.degree) - 1
    }

    pub fn next_bit(&mut self) -> bool {
        let feedback = (self.state & self.taps).count_ones() & 1;
        let out = self.state & 1;
        self.state = (self.state >> 1) | (feedback << (self.degree - 1));
        out == 1
    }
}

/// Staircase-plus-PRBS power schedule for `max_power.len()` heaters.
///
/// Each heater holds a random level in `[0, 1]` of its limit for `stair_len`
/// samples; the level is gated on and off by two independent PRBS streams
/// (logical AND), each bit held for `bit_len` samples.
pub fn staircase_prbs(max_power: &[f64], samples: usize, stair_len: usize, bit_len: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates: Vec<(Prbs, Prbs)> = (0..max_power.len())
        .map(|_| (Prbs::prbs11(rng.random()), Prbs::prbs9(rng.random())))
        .collect();
    let mut levels: Vec<f64> = max_power.iter().map(|_| rng.random::<f64>()).collect();
    let mut bits = vec![false; max_power.len()];
    let stair_len = stair_len.max(1);
    let bit_len = bit_len.max(1);
    let mut rows = Vec::with_capacity(samples);
    for k in 0..samples {
        if k % stair_len == 0 && k > 0 {
            levels.iter_mut().for_each(|l| *l = rng.random::<f64>());
        }
        if k % bit_len == 0 {
            for (b, (g1, g2)) in bits.iter_mut().zip(gates.iter_mut()) {
                *b = g1.next_bit() && g2.next_bit();
            }
        }
        rows.push(
            max_power
                .iter()
                .zip(&levels)
                .zip(&bits)
                .map(|((&p, &l), &on)| if on { p * l } else { 0.0 })
                .collect(),
        );
    }
    rows
}
