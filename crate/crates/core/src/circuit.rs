//! Gate-level circuit representation.
//!
//! Wire `k` carries bit `k` of the basis-state integer (little-endian), so a
//! circuit on `w` wires acts on basis indices `0..2^w`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a wire; 0 is the least-significant bit of the basis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WireIndex(pub usize);

impl WireIndex {
    pub fn index(self) -> usize {
        self.0
    }

    pub(crate) fn mask(self) -> usize {
        1 << self.0
    }
}

impl From<usize> for WireIndex {
    fn from(index: usize) -> Self {
        WireIndex(index)
    }
}

impl fmt::Display for WireIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// Which control value fires a controlled gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Fires when the control wire is 1.
    Positive,
    /// Fires when the control wire is 0 (anti-control).
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Control {
    pub wire: WireIndex,
    pub polarity: Polarity,
}

impl Control {
    pub fn positive(wire: usize) -> Self {
        Control {
            wire: WireIndex(wire),
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(wire: usize) -> Self {
        Control {
            wire: WireIndex(wire),
            polarity: Polarity::Negative,
        }
    }

    /// Whether this control fires on basis index `index`.
    pub fn fires_on(&self, index: usize) -> bool {
        let set = index & self.wire.mask() != 0;
        match self.polarity {
            Polarity::Positive => set,
            Polarity::Negative => !set,
        }
    }
}

/// One primitive operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Gate {
    /// Y rotation by `theta` radians.
    Ry { theta: f64, target: WireIndex },
    /// Y rotation applied only when `control` fires.
    Cry {
        theta: f64,
        control: Control,
        target: WireIndex,
    },
    X { target: WireIndex },
    H { target: WireIndex },
    /// Flips `target` when every control fires.
    Mcx {
        controls: Vec<Control>,
        target: WireIndex,
    },
}

impl Gate {
    pub fn ry(theta: f64, target: usize) -> Self {
        Gate::Ry {
            theta,
            target: WireIndex(target),
        }
    }

    pub fn cry(theta: f64, control: Control, target: usize) -> Self {
        Gate::Cry {
            theta,
            control,
            target: WireIndex(target),
        }
    }

    pub fn x(target: usize) -> Self {
        Gate::X {
            target: WireIndex(target),
        }
    }

    pub fn h(target: usize) -> Self {
        Gate::H {
            target: WireIndex(target),
        }
    }

    pub fn mcx(controls: Vec<Control>, target: usize) -> Self {
        Gate::Mcx {
            controls,
            target: WireIndex(target),
        }
    }

    /// Single-control X with positive polarity.
    pub fn cx(control: usize, target: usize) -> Self {
        Gate::mcx(vec![Control::positive(control)], target)
    }

    pub fn target(&self) -> WireIndex {
        match self {
            Gate::Ry { target, .. }
            | Gate::Cry { target, .. }
            | Gate::X { target }
            | Gate::H { target }
            | Gate::Mcx { target, .. } => *target,
        }
    }

    pub fn controls(&self) -> &[Control] {
        match self {
            Gate::Cry { control, .. } => std::slice::from_ref(control),
            Gate::Mcx { controls, .. } => controls,
            _ => &[],
        }
    }

    /// Every wire the gate touches, controls first.
    pub fn wires(&self) -> impl Iterator<Item = WireIndex> + '_ {
        self.controls()
            .iter()
            .map(|c| c.wire)
            .chain(std::iter::once(self.target()))
    }

    pub fn is_multi_wire(&self) -> bool {
        !self.controls().is_empty()
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::Ry { theta, target } => Gate::Ry {
                theta: -theta,
                target: *target,
            },
            Gate::Cry {
                theta,
                control,
                target,
            } => Gate::Cry {
                theta: -theta,
                control: *control,
                target: *target,
            },
            other => other.clone(),
        }
    }

    /// Same gate with every wire index shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Gate {
        let shift = |w: WireIndex| WireIndex(w.0 + offset);
        let shift_ctrl = |c: &Control| Control {
            wire: shift(c.wire),
            polarity: c.polarity,
        };
        match self {
            Gate::Ry { theta, target } => Gate::Ry {
                theta: *theta,
                target: shift(*target),
            },
            Gate::Cry {
                theta,
                control,
                target,
            } => Gate::Cry {
                theta: *theta,
                control: shift_ctrl(control),
                target: shift(*target),
            },
            Gate::X { target } => Gate::X {
                target: shift(*target),
            },
            Gate::H { target } => Gate::H {
                target: shift(*target),
            },
            Gate::Mcx { controls, target } => Gate::Mcx {
                controls: controls.iter().map(shift_ctrl).collect(),
                target: shift(*target),
            },
        }
    }

    fn validate(&self, wire_count: usize) -> Result<(), CircuitError> {
        match self {
            Gate::Ry { theta, .. } | Gate::Cry { theta, .. } if !theta.is_finite() => {
                return Err(CircuitError::NonFiniteAngle(*theta));
            }
            Gate::Mcx { controls, .. } if controls.is_empty() => {
                return Err(CircuitError::EmptyControls);
            }
            _ => {}
        }
        let wires: Vec<WireIndex> = self.wires().collect();
        for (k, &wire) in wires.iter().enumerate() {
            if wire.0 >= wire_count {
                return Err(CircuitError::WireOutOfRange { wire, wire_count });
            }
            if wires[..k].contains(&wire) {
                return Err(CircuitError::DuplicateWire(wire));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctrl = |c: &Control| match c.polarity {
            Polarity::Positive => format!("{}", c.wire),
            Polarity::Negative => format!("!{}", c.wire),
        };
        match self {
            Gate::Ry { theta, target } => write!(f, "ry({theta}) {target}"),
            Gate::Cry {
                theta,
                control,
                target,
            } => write!(f, "cry({theta}) {} -> {target}", ctrl(control)),
            Gate::X { target } => write!(f, "x {target}"),
            Gate::H { target } => write!(f, "h {target}"),
            Gate::Mcx { controls, target } => {
                let list: Vec<_> = controls.iter().map(ctrl).collect();
                write!(f, "mcx [{}] -> {target}", list.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("wire {wire} is out of range for a circuit of {wire_count} wires")]
    WireOutOfRange { wire: WireIndex, wire_count: usize },
    #[error("wire {0} appears more than once in a single gate")]
    DuplicateWire(WireIndex),
    #[error("rotation angle {0} is not finite")]
    NonFiniteAngle(f64),
    #[error("multi-controlled X needs at least one control")]
    EmptyControls,
}

/// Ordered gate list over a fixed number of wires.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Circuit {
    wire_count: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(wire_count: usize) -> Self {
        Circuit {
            wire_count,
            gates: Vec::new(),
        }
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends `gate` after validating its wires and parameters.
    pub fn append(&mut self, gate: Gate) -> Result<&mut Self, CircuitError> {
        gate.validate(self.wire_count)?;
        self.gates.push(gate);
        Ok(self)
    }

    /// Appends every gate of `other`, shifted up by `offset` wires.
    pub fn compose(&mut self, other: &Circuit, offset: usize) -> Result<&mut Self, CircuitError> {
        for gate in &other.gates {
            self.append(gate.shifted(offset))?;
        }
        Ok(self)
    }

    /// Reversed gate order with rotation angles negated.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            wire_count: self.wire_count,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Number of gates touching two or more wires.
    pub fn two_wire_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_multi_wire()).count()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit on {} wires, {} gates", self.wire_count, self.gates.len())?;
        for gate in &self.gates {
            writeln!(f, "  {gate}")?;
        }
        Ok(())
    }
}
