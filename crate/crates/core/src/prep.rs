//! Ancilla-free preparation of a uniform superposition over `n` basis states.
//!
//! [`generate`] builds a circuit on `ceil(log2 n)` wires that maps `|0..0>`
//! to `1/sqrt(n) * sum_{k<n} |k>`, using only RY and controlled RY gates.
//!
//! The construction runs in three phases:
//!
//! 1. the `i` low wires, where `2^i` is the largest power of two dividing
//!    `n`, get an independent `pi/2` rotation;
//! 2. the *upward arc* walks from the top wire down and, for every set bit
//!    of `n - 1`, rotates that wire so the probability of reading 1 matches
//!    the share of target states carrying that bit. Each rotation is
//!    controlled by the previously rotated wire, and the rotated wires are
//!    kept on a stack;
//! 3. the *downward arc* walks back up from wire `i` and puts each wire into
//!    equal superposition, anti-controlled by the nearest higher wire that
//!    was rotated in the upward arc.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, Control, Gate};

/// Largest supported `n`; keeps every `2^x` within `u64`.
pub const MAX_STATES: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrepError {
    #[error("the number of states must be at least 1")]
    ZeroStates,
    #[error("the number of states must be at most 2^62, got {0}")]
    TooManyStates(u64),
    #[error("rotation ratio has a zero denominator (n = {n}, wire {wire})")]
    ZeroDenominator { n: u64, wire: u32 },
    #[error("the summation form of the gate count needs n >= 2, got {0}")]
    SummationDomain(u64),
}

/// `ceil(log2 n)`, with `ceil_log2(1) == 0`.
pub fn ceil_log2(n: u64) -> u32 {
    assert!(n > 0, "ceil_log2 of zero");
    if n == 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Number of bits holding 1 in `x`.
pub fn count_ones(x: u64) -> u32 {
    x.count_ones()
}

/// Largest `i` such that `x / 2^i` is an integer greater than 1.
///
/// Returns 0 for `x <= 1`, where no such `i` exists.
pub fn maxp(x: u64) -> u32 {
    if x <= 1 {
        0
    } else if x.is_power_of_two() {
        x.trailing_zeros() - 1
    } else {
        x.trailing_zeros()
    }
}

fn low_bits(n: u64, bits: u32) -> u64 {
    n & ((1u64 << bits) - 1)
}

/// Size parameters of one preparation problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrepSpec {
    /// Number of basis states in the superposition.
    pub n: u64,
    /// Wire count, `ceil(log2 n)`.
    pub wires: u32,
    /// Trailing zero bits of `n`; these wires are rotated independently.
    pub free_wires: u32,
}

impl PrepSpec {
    pub fn new(n: u64) -> Result<Self, PrepError> {
        if n == 0 {
            return Err(PrepError::ZeroStates);
        }
        if n > MAX_STATES {
            return Err(PrepError::TooManyStates(n));
        }
        let wires = ceil_log2(n);
        Ok(PrepSpec {
            n,
            wires,
            free_wires: n.trailing_zeros().min(wires),
        })
    }
}

/// Wires rotated during the upward arc, most recent on top.
///
/// Entries are strictly decreasing from bottom to top.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ControlStack(Vec<u32>);

impl ControlStack {
    pub fn new() -> Self {
        ControlStack(Vec::new())
    }

    pub fn top(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn push(&mut self, wire: u32) {
        debug_assert!(self.top().is_none_or(|t| t > wire));
        self.0.push(wire);
    }

    pub fn pop(&mut self) -> Option<u32> {
        self.0.pop()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for ControlStack {
    fn from(wires: Vec<u32>) -> Self {
        ControlStack(wires)
    }
}

/// Probability `num/den` of reading 1 on a rotated wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RotationRatio {
    pub num: u64,
    pub den: u64,
}

impl RotationRatio {
    pub const HALF: RotationRatio = RotationRatio { num: 1, den: 2 };

    /// `2 * asin(sqrt(num / den))`, in `[0, pi]`.
    pub fn radians(&self) -> f64 {
        if 2 * self.num == self.den {
            FRAC_PI_2
        } else {
            2.0 * (self.num as f64 / self.den as f64).sqrt().asin()
        }
    }

    pub fn reduced(&self) -> RotationRatio {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(self.num, self.den).max(1);
        RotationRatio {
            num: self.num / g,
            den: self.den / g,
        }
    }

    /// Exact symbolic form, e.g. `2*asin(sqrt(3/7))` or `pi/2`.
    pub fn closed_form(&self) -> String {
        let r = self.reduced();
        match (r.num, r.den) {
            (0, _) => "0".to_string(),
            (1, 2) => "pi/2".to_string(),
            (a, b) if a == b => "pi".to_string(),
            (a, b) => format!("2*asin(sqrt({a}/{b}))"),
        }
    }
}

impl fmt::Display for RotationRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.closed_form())
    }
}

/// Ratio behind [`angle`]: `(n mod 2^x) / n` with an empty stack, otherwise
/// `(n mod 2^x) / (n mod 2^top)`.
pub fn angle_ratio(n: u64, x: u32, stack: &ControlStack) -> Result<RotationRatio, PrepError> {
    let den = match stack.top() {
        None => n,
        Some(top) => low_bits(n, top),
    };
    if den == 0 {
        return Err(PrepError::ZeroDenominator { n, wire: x });
    }
    Ok(RotationRatio {
        num: low_bits(n, x),
        den,
    })
}

/// Rotation angle for wire `x` given the wires already rotated in the
/// upward arc.
pub fn angle(n: u64, x: u32, stack: &ControlStack) -> Result<f64, PrepError> {
    angle_ratio(n, x, stack).map(|r| r.radians())
}

/// Which phase of the construction emitted a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Free,
    Upward,
    Downward,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrepStep {
    pub phase: Phase,
    pub gate: Gate,
    pub ratio: RotationRatio,
}

/// The generated gate sequence together with the exact ratio behind every
/// rotation angle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrepPlan {
    pub spec: PrepSpec,
    pub steps: Vec<PrepStep>,
}

impl PrepPlan {
    pub fn build(n: u64) -> Result<Self, PrepError> {
        let spec = PrepSpec::new(n)?;
        let (j, i) = (spec.wires, spec.free_wires);
        let mut steps = Vec::new();

        for wire in 0..i {
            steps.push(PrepStep {
                phase: Phase::Free,
                gate: Gate::ry(FRAC_PI_2, wire as usize),
                ratio: RotationRatio::HALF,
            });
        }

        let mut stack = ControlStack::new();
        let largest = n - 1;
        for x in (i..j).rev() {
            if largest >> x & 1 == 0 {
                continue;
            }
            let ratio = angle_ratio(n, x, &stack)?;
            let theta = ratio.radians();
            let gate = match stack.top() {
                None => Gate::ry(theta, x as usize),
                Some(top) => Gate::cry(theta, Control::positive(top as usize), x as usize),
            };
            steps.push(PrepStep {
                phase: Phase::Upward,
                gate,
                ratio,
            });
            stack.push(x);
        }

        for x in i..j.saturating_sub(1) {
            if stack.top() == Some(x) {
                stack.pop();
            }
            let control = stack
                .top()
                .expect("top wire stays on the stack through the downward arc");
            steps.push(PrepStep {
                phase: Phase::Downward,
                gate: Gate::cry(FRAC_PI_2, Control::negative(control as usize), x as usize),
                ratio: RotationRatio::HALF,
            });
        }

        Ok(PrepPlan { spec, steps })
    }

    pub fn circuit(&self) -> Circuit {
        let mut circuit = Circuit::new(self.spec.wires as usize);
        for step in &self.steps {
            circuit
                .append(step.gate.clone())
                .expect("generated gates stay within the register");
        }
        circuit
    }
}

/// Circuit preparing the uniform superposition of basis states `0..n`.
pub fn generate(n: u64) -> Result<Circuit, PrepError> {
    PrepPlan::build(n).map(|plan| plan.circuit())
}

/// Closed-form two-wire gate count of [`generate`]:
/// `count1(n-1) - 2*maxp(n) + ceil(log2 n) - 2`, clamped at 0.
pub fn predicted_two_wire_count(n: u64) -> u64 {
    if n <= 2 || n.is_power_of_two() {
        return 0;
    }
    let value = count_ones(n - 1) as i64 - 2 * maxp(n) as i64 + ceil_log2(n) as i64 - 2;
    value.max(0) as u64
}

/// Term-by-term evaluation of the summation form of the gate count:
///
/// `sum_{k=1}^{j-1} ( floor((n mod 2^k) / 2^(k-1)) - 2*floor(1 - frac(n / 2^k)) ) + j - 1`
///
/// with `j = ceil(log2 n)`. `floor(1 - frac(n / 2^k))` is 1 exactly when
/// `2^k` divides `n`, which is tested with integer arithmetic. No clamping
/// is applied, so the result can disagree with [`predicted_two_wire_count`].
pub fn summation_two_wire_count(n: u64) -> Result<i64, PrepError> {
    if n < 2 {
        return Err(PrepError::SummationDomain(n));
    }
    if n > MAX_STATES {
        return Err(PrepError::TooManyStates(n));
    }
    let j = ceil_log2(n) as i64;
    let mut total = 0i64;
    for k in 1..j as u32 {
        let bit_term = (low_bits(n, k) / (1u64 << (k - 1))) as i64;
        let divisible = if low_bits(n, k) == 0 { 1 } else { 0 };
        total += bit_term - 2 * divisible;
    }
    Ok(total + j - 1)
}
