//! Dense statevector simulation and seeded sampling.
//!
//! Amplitudes are stored as `2^w` complex doubles, index bit `k` being wire
//! `k`. Gates are applied in place by pairing indices that differ only in
//! the target bit. The practical ceiling is [`MAX_WIRES`] wires (1 GiB of
//! amplitudes).
//!
//! Sampling uses ChaCha8 seeded through `SeedableRng::seed_from_u64`, whose
//! output stream is fixed by its published specification, so histograms
//! are reproducible across runs and platforms.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::circuit::{Circuit, Control, Gate, Polarity, WireIndex};

pub const MAX_WIRES: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("circuit has {circuit} wires but the state has {state}")]
    WireCountMismatch { circuit: usize, state: usize },
    #[error("{wires} wires exceed the simulator ceiling of {MAX_WIRES}")]
    TooManyWires { wires: usize },
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
}

/// `(mask, value)` such that all controls fire on `index` iff
/// `index & mask == value`.
fn control_mask(controls: &[Control]) -> (usize, usize) {
    controls.iter().fold((0, 0), |(mask, value), c| {
        let bit = c.wire.mask();
        match c.polarity {
            Polarity::Positive => (mask | bit, value | bit),
            Polarity::Negative => (mask | bit, value),
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    wire_count: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `wire_count` wires.
    pub fn zero(wire_count: usize) -> Result<Self, SimError> {
        Self::basis(wire_count, 0)
    }

    /// Computational basis state `|index>`.
    pub fn basis(wire_count: usize, index: usize) -> Result<Self, SimError> {
        if wire_count > MAX_WIRES {
            return Err(SimError::TooManyWires { wires: wire_count });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << wire_count];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            wire_count,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes; the caller is responsible for normalisation.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(SimError::BadLength(len));
        }
        let wire_count = len.trailing_zeros() as usize;
        if wire_count > MAX_WIRES {
            return Err(SimError::TooManyWires { wires: wire_count });
        }
        Ok(StateVector {
            wire_count,
            amplitudes,
        })
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }

    fn check_gate_wires(&self, target: WireIndex, controls: &[Control]) {
        assert!(
            target.index() < self.wire_count
                && controls.iter().all(|c| c.wire.index() < self.wire_count),
            "gate wires exceed state width {}",
            self.wire_count
        );
    }

    /// Applies the real 2x2 matrix `[[a, b], [c, d]]` to `target` on every
    /// index where all `controls` fire.
    fn apply_real_2x2(&mut self, target: WireIndex, controls: &[Control], m: [f64; 4]) {
        self.check_gate_wires(target, controls);
        let [a, b, c, d] = m;
        let (mask, value) = control_mask(controls);
        let stride = target.mask();
        let len = self.amplitudes.len();
        for block in (0..len).step_by(stride << 1) {
            for lo in block..block + stride {
                if lo & mask != value {
                    continue;
                }
                let hi = lo | stride;
                let (x0, x1) = (self.amplitudes[lo], self.amplitudes[hi]);
                self.amplitudes[lo] = x0 * a + x1 * b;
                self.amplitudes[hi] = x0 * c + x1 * d;
            }
        }
    }

    /// RY(theta) on `target`, gated by `controls` (empty for uncontrolled).
    pub fn apply_ry(&mut self, theta: f64, target: WireIndex, controls: &[Control]) {
        let (s, c) = (theta / 2.0).sin_cos();
        self.apply_real_2x2(target, controls, [c, -s, s, c]);
    }

    pub fn apply_h(&mut self, target: WireIndex) {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        self.apply_real_2x2(target, &[], [r, r, r, -r]);
    }

    /// Flips `target` wherever every control fires. With no controls this
    /// is a plain X.
    pub fn apply_mcx(&mut self, target: WireIndex, controls: &[Control]) {
        self.check_gate_wires(target, controls);
        let (mask, value) = control_mask(controls);
        let stride = target.mask();
        let len = self.amplitudes.len();
        for block in (0..len).step_by(stride << 1) {
            for lo in block..block + stride {
                if lo & mask == value {
                    self.amplitudes.swap(lo, lo | stride);
                }
            }
        }
    }

    /// Multiplies by `e^{i phi}` every amplitude whose index has all of
    /// `wires` set.
    pub fn apply_phase(&mut self, phi: f64, wires: &[WireIndex]) {
        let mask = wires.iter().fold(0usize, |m, w| m | w.mask());
        assert!(mask < self.amplitudes.len(), "phase wires exceed state width");
        let factor = Complex64::from_polar(1.0, phi);
        for (index, amp) in self.amplitudes.iter_mut().enumerate() {
            if index & mask == mask {
                *amp *= factor;
            }
        }
    }

    pub fn apply(&mut self, gate: &Gate) {
        match gate {
            Gate::Ry { theta, target } => self.apply_ry(*theta, *target, &[]),
            Gate::Cry {
                theta,
                control,
                target,
            } => self.apply_ry(*theta, *target, std::slice::from_ref(control)),
            Gate::X { target } => self.apply_mcx(*target, &[]),
            Gate::H { target } => self.apply_h(*target),
            Gate::Mcx { controls, target } => self.apply_mcx(*target, controls),
        }
    }

    /// Applies every gate of `circuit` in order.
    pub fn run(&mut self, circuit: &Circuit) -> Result<(), SimError> {
        if circuit.wire_count() != self.wire_count {
            return Err(SimError::WireCountMismatch {
                circuit: circuit.wire_count(),
                state: self.wire_count,
            });
        }
        for gate in circuit.gates() {
            self.apply(gate);
        }
        Ok(())
    }

    /// Draws a single basis index from the `|amp|^2` distribution.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        BornSampler::new(self).draw(rng)
    }

    /// Draws `shots` independent basis indices with a ChaCha8 generator
    /// seeded from `seed`.
    pub fn sample(&self, shots: u64, seed: u64) -> Histogram {
        let sampler = BornSampler::new(self);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            *counts.entry(sampler.draw(&mut rng)).or_insert(0) += 1;
        }
        Histogram { shots, counts }
    }
}

/// Simulates `circuit` from `|0...0>`.
pub fn simulate(circuit: &Circuit) -> Result<StateVector, SimError> {
    let mut state = StateVector::zero(circuit.wire_count())?;
    state.run(circuit)?;
    Ok(state)
}

/// Simulates `circuit` starting from `initial`.
pub fn simulate_from(circuit: &Circuit, initial: &StateVector) -> Result<StateVector, SimError> {
    let mut state = initial.clone();
    state.run(circuit)?;
    Ok(state)
}

/// Precomputed measurement distribution of one state.
#[derive(Debug, Clone)]
pub struct BornSampler {
    index: WeightedIndex<f64>,
}

impl BornSampler {
    pub fn new(state: &StateVector) -> Self {
        let index = WeightedIndex::new(state.probabilities())
            .expect("a normalised state has positive total weight");
        BornSampler { index }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng)
    }
}

/// Outcome counts of repeated full-register measurement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub shots: u64,
    pub counts: BTreeMap<usize, u64>,
}

/// Pearson chi-square test against the uniform distribution on `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: u64,
    pub p_value: f64,
}

impl Histogram {
    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// Shots that landed on indices `>= n`.
    pub fn count_outside(&self, n: usize) -> u64 {
        self.counts.range(n..).map(|(_, c)| c).sum()
    }

    /// Tests the counts of indices `0..n` against a uniform distribution.
    /// Needs `n >= 2`.
    pub fn chi_square_uniform(&self, n: usize) -> ChiSquareTest {
        assert!(n >= 2, "chi-square needs at least two categories");
        let inside: u64 = (0..n).map(|k| self.count(k)).sum();
        let expected = inside as f64 / n as f64;
        let statistic = (0..n)
            .map(|k| {
                let diff = self.count(k) as f64 - expected;
                diff * diff / expected
            })
            .sum::<f64>();
        let dof = (n - 1) as u64;
        let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        ChiSquareTest {
            statistic,
            degrees_of_freedom: dof,
            p_value: dist.sf(statistic),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_keeps_zero_state() {
        let s = simulate(&Circuit::new(3)).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn ry_pi_flips_with_sign() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply(&Gate::ry(std::f64::consts::PI, 0));
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn anti_controlled_rotation_only_fires_on_zero() {
        let mut c = Circuit::new(2);
        c.append(Gate::x(1)).unwrap();
        c.append(Gate::cry(1.0, Control::negative(1), 0)).unwrap();
        let s = simulate(&c).unwrap();
        assert_eq!(s.amplitudes()[2], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn mismatched_width_is_rejected() {
        let mut s = StateVector::zero(2).unwrap();
        assert_eq!(
            s.run(&Circuit::new(3)),
            Err(SimError::WireCountMismatch {
                circuit: 3,
                state: 2
            })
        );
    }

    #[test]
    fn too_many_wires() {
        assert_eq!(
            StateVector::zero(MAX_WIRES + 1),
            Err(SimError::TooManyWires {
                wires: MAX_WIRES + 1
            })
        );
    }

    #[test]
    fn phase_touches_only_all_ones() {
        let mut s = StateVector::from_amplitudes(vec![Complex64::new(0.5, 0.0); 4]).unwrap();
        s.apply_phase(std::f64::consts::PI, &[WireIndex(0), WireIndex(1)]);
        assert!((s.amplitudes()[3].re + 0.5).abs() < 1e-15);
        assert_eq!(s.amplitudes()[1].re, 0.5);
    }

    #[test]
    fn deterministic_state_samples_one_outcome() {
        let h = StateVector::zero(1).unwrap().sample(100, 3);
        assert_eq!(h.counts, BTreeMap::from([(0, 100)]));
    }

    #[test]
    fn sampling_is_reproducible() {
        let mut s = StateVector::zero(3).unwrap();
        for w in 0..3 {
            s.apply_h(WireIndex(w));
        }
        assert_eq!(s.sample(500, 42), s.sample(500, 42));
        assert_ne!(s.sample(500, 42), s.sample(500, 43));
    }
}
