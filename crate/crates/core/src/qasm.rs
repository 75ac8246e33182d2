//! OpenQASM 2.0 export.
//!
//! Controlled rotations are lowered to `ry`/`cx` so the output does not
//! depend on a `cry` definition:
//!
//! ```text
//! cry(t) c,t  ->  ry(t/2) t; cx c,t; ry(-t/2) t; cx c,t;
//! ```
//!
//! Anti-controls are wrapped in `x` on the control wire. Multi-controlled X
//! gates become `cx` (one control), `ccx` (two), or for three or more
//! controls a Toffoli network that borrows idle circuit wires as dirty
//! workspace (their values are restored). With no idle wire at all the
//! gate is rewritten as `h; multi-controlled phase; h` and the phase is
//! split recursively with `cu1`, which frees a wire at every level.
//!
//! [`parse`] reads back exactly the statement subset this module writes.

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{Circuit, Control, Gate, Polarity, WireIndex};
use crate::sim::{SimError, StateVector};

/// Statement in the exported subset of OpenQASM 2.0.
#[derive(Debug, Clone, PartialEq)]
pub enum QasmOp {
    Ry { theta: f64, target: usize },
    X { target: usize },
    H { target: usize },
    Cx { control: usize, target: usize },
    Ccx { a: usize, b: usize, target: usize },
    Cu1 { lambda: f64, control: usize, target: usize },
    Comment(String),
}

/// Parsed or generated program: register width and statements.
#[derive(Debug, Clone, PartialEq)]
pub struct QasmProgram {
    pub wire_count: usize,
    pub ops: Vec<QasmOp>,
}

impl QasmProgram {
    /// Lowers `circuit` to the exported statement subset.
    pub fn lower(circuit: &Circuit) -> Self {
        let mut ops = Vec::new();
        for gate in circuit.gates() {
            lower_gate(gate, circuit.wire_count(), &mut ops);
        }
        QasmProgram {
            wire_count: circuit.wire_count(),
            ops,
        }
    }

    /// Number of non-comment statements.
    pub fn statement_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| !matches!(op, QasmOp::Comment(_)))
            .count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        if self.wire_count == 0 {
            out.push_str("// empty register: the zero-width state needs no gates\n");
        } else {
            let _ = writeln!(out, "qreg q[{}];", self.wire_count);
        }
        for op in &self.ops {
            match op {
                QasmOp::Ry { theta, target } => {
                    let _ = writeln!(out, "ry({}) q[{target}];", format_angle(*theta));
                }
                QasmOp::X { target } => {
                    let _ = writeln!(out, "x q[{target}];");
                }
                QasmOp::H { target } => {
                    let _ = writeln!(out, "h q[{target}];");
                }
                QasmOp::Cx { control, target } => {
                    let _ = writeln!(out, "cx q[{control}],q[{target}];");
                }
                QasmOp::Ccx { a, b, target } => {
                    let _ = writeln!(out, "ccx q[{a}],q[{b}],q[{target}];");
                }
                QasmOp::Cu1 {
                    lambda,
                    control,
                    target,
                } => {
                    let _ = writeln!(
                        out,
                        "cu1({}) q[{control}],q[{target}];",
                        format_angle(*lambda)
                    );
                }
                QasmOp::Comment(text) => {
                    let _ = writeln!(out, "// {text}");
                }
            }
        }
        out
    }

    /// Simulates the program from `|0...0>`.
    pub fn simulate(&self) -> Result<StateVector, SimError> {
        let mut state = StateVector::zero(self.wire_count)?;
        for op in &self.ops {
            match *op {
                QasmOp::Ry { theta, target } => state.apply_ry(theta, WireIndex(target), &[]),
                QasmOp::X { target } => state.apply_mcx(WireIndex(target), &[]),
                QasmOp::H { target } => state.apply_h(WireIndex(target)),
                QasmOp::Cx { control, target } => {
                    state.apply_mcx(WireIndex(target), &[Control::positive(control)])
                }
                QasmOp::Ccx { a, b, target } => state.apply_mcx(
                    WireIndex(target),
                    &[Control::positive(a), Control::positive(b)],
                ),
                QasmOp::Cu1 {
                    lambda,
                    control,
                    target,
                } => state.apply_phase(lambda, &[WireIndex(control), WireIndex(target)]),
                QasmOp::Comment(_) => {}
            }
        }
        Ok(state)
    }
}

/// OpenQASM 2.0 text for `circuit`.
pub fn export_qasm(circuit: &Circuit) -> String {
    QasmProgram::lower(circuit).to_text()
}

/// Formats an angle, using `pi` fractions where the value is exactly one.
pub fn format_angle(theta: f64) -> String {
    if theta == 0.0 {
        return "0".to_string();
    }
    let sign = if theta < 0.0 { "-" } else { "" };
    let mag = theta.abs();
    for den in [1u32, 2, 4, 8] {
        for num in 1..=(2 * den) {
            if PI * num as f64 / den as f64 == mag {
                let body = match (num, den) {
                    (1, 1) => "pi".to_string(),
                    (n, 1) => format!("{n}*pi"),
                    (1, d) => format!("pi/{d}"),
                    (n, d) => format!("{n}*pi/{d}"),
                };
                return format!("{sign}{body}");
            }
        }
    }
    // shortest representation that round-trips to the same f64
    format!("{theta}")
}

fn negated_wires(controls: &[Control]) -> Vec<usize> {
    controls
        .iter()
        .filter(|c| c.polarity == Polarity::Negative)
        .map(|c| c.wire.index())
        .collect()
}

fn lower_gate(gate: &Gate, wire_count: usize, ops: &mut Vec<QasmOp>) {
    match gate {
        Gate::Ry { theta, target } => ops.push(QasmOp::Ry {
            theta: *theta,
            target: target.index(),
        }),
        Gate::X { target } => ops.push(QasmOp::X {
            target: target.index(),
        }),
        Gate::H { target } => ops.push(QasmOp::H {
            target: target.index(),
        }),
        Gate::Cry {
            theta,
            control,
            target,
        } => {
            let (c, t) = (control.wire.index(), target.index());
            let flip = control.polarity == Polarity::Negative;
            if flip {
                ops.push(QasmOp::X { target: c });
            }
            ops.push(QasmOp::Ry {
                theta: theta / 2.0,
                target: t,
            });
            ops.push(QasmOp::Cx { control: c, target: t });
            ops.push(QasmOp::Ry {
                theta: -theta / 2.0,
                target: t,
            });
            ops.push(QasmOp::Cx { control: c, target: t });
            if flip {
                ops.push(QasmOp::X { target: c });
            }
        }
        Gate::Mcx { controls, target } => {
            let flips = negated_wires(controls);
            let wires: Vec<usize> = controls.iter().map(|c| c.wire.index()).collect();
            let t = target.index();
            let idle: Vec<usize> = (0..wire_count)
                .filter(|w| *w != t && !wires.contains(w))
                .collect();
            if wires.len() >= 3 {
                let method = if idle.is_empty() {
                    "no idle wire: h-conjugated multi-controlled phase split with cu1".to_string()
                } else if idle.len() >= wires.len() - 2 {
                    format!(
                        "{} toffolis with dirty workspace {:?}",
                        4 * (wires.len() - 2),
                        &idle[..wires.len() - 2]
                    )
                } else {
                    format!("control split with dirty workspace q[{}]", idle[0])
                };
                ops.push(QasmOp::Comment(format!(
                    "mcx {} controls -> q[{t}]: {method}",
                    wires.len()
                )));
            }
            for &w in &flips {
                ops.push(QasmOp::X { target: w });
            }
            mcx(&wires, t, &idle, ops);
            for &w in &flips {
                ops.push(QasmOp::X { target: w });
            }
        }
    }
}

/// Multi-controlled X with positive controls. `idle` wires may hold any
/// value and are left unchanged.
fn mcx(controls: &[usize], target: usize, idle: &[usize], ops: &mut Vec<QasmOp>) {
    let k = controls.len();
    match k {
        0 => ops.push(QasmOp::X { target }),
        1 => ops.push(QasmOp::Cx {
            control: controls[0],
            target,
        }),
        2 => ops.push(QasmOp::Ccx {
            a: controls[0],
            b: controls[1],
            target,
        }),
        _ if idle.len() >= k - 2 => toffoli_ladder(controls, target, &idle[..k - 2], ops),
        _ if !idle.is_empty() => {
            // t ^= g2 & (d ^ g1) ^ g2 & d == g1 & g2, d restored
            let spare = idle[0];
            let split = k.div_ceil(2);
            let (first, second) = controls.split_at(split);
            let mut second_plus: Vec<usize> = second.to_vec();
            second_plus.push(spare);
            let work_first: Vec<usize> = second.iter().copied().chain([target]).collect();
            for _ in 0..2 {
                mcx(first, spare, &work_first, ops);
                mcx(&second_plus, target, first, ops);
            }
        }
        _ => {
            ops.push(QasmOp::H { target });
            controlled_phase(PI, controls, target, ops);
            ops.push(QasmOp::H { target });
        }
    }
}

/// Toffoli ladder with `k - 2` dirty ancillas: two passes of
/// top, descending chain, base, ascending chain.
fn toffoli_ladder(c: &[usize], target: usize, anc: &[usize], ops: &mut Vec<QasmOp>) {
    let k = c.len();
    debug_assert_eq!(anc.len(), k - 2);
    let top = QasmOp::Ccx {
        a: c[k - 1],
        b: anc[k - 3],
        target,
    };
    let link = |i: usize| QasmOp::Ccx {
        a: c[i],
        b: anc[i - 2],
        target: anc[i - 1],
    };
    let base = QasmOp::Ccx {
        a: c[0],
        b: c[1],
        target: anc[0],
    };
    for _ in 0..2 {
        ops.push(top.clone());
        for i in (2..k - 1).rev() {
            ops.push(link(i));
        }
        ops.push(base.clone());
        for i in 2..k - 1 {
            ops.push(link(i));
        }
    }
}

/// Phase `e^{i phi}` on the state where every control and `target` are 1.
fn controlled_phase(phi: f64, controls: &[usize], target: usize, ops: &mut Vec<QasmOp>) {
    match controls.split_last() {
        None => unreachable!("called with at least one control"),
        Some((&last, [])) => ops.push(QasmOp::Cu1 {
            lambda: phi,
            control: last,
            target,
        }),
        Some((&last, rest)) => {
            // phi/2 * (c_k - (c_k xor P) + P) * t == phi * c_k * P * t
            let free = [target];
            ops.push(QasmOp::Cu1 {
                lambda: phi / 2.0,
                control: last,
                target,
            });
            mcx(rest, last, &free, ops);
            ops.push(QasmOp::Cu1 {
                lambda: -phi / 2.0,
                control: last,
                target,
            });
            mcx(rest, last, &free, ops);
            controlled_phase(phi / 2.0, rest, target, ops);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_angle(text: &str, line: usize) -> Result<f64, ParseError> {
    let text = text.trim();
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, text),
    };
    if !body.contains("pi") {
        return body
            .parse::<f64>()
            .map(|v| sign * v)
            .map_err(|_| syntax(line, format!("bad angle `{text}`")));
    }
    let (num_part, den) = match body.split_once('/') {
        Some((n, d)) => (
            n,
            d.parse::<f64>()
                .map_err(|_| syntax(line, format!("bad angle `{text}`")))?,
        ),
        None => (body, 1.0),
    };
    let num = match num_part.strip_suffix("*pi") {
        Some(n) => n
            .parse::<f64>()
            .map_err(|_| syntax(line, format!("bad angle `{text}`")))?,
        None if num_part == "pi" => 1.0,
        None => return Err(syntax(line, format!("bad angle `{text}`"))),
    };
    Ok(sign * PI * num / den)
}

fn parse_wire(text: &str, wire_count: usize, line: usize) -> Result<usize, ParseError> {
    let inner = text
        .trim()
        .strip_prefix("q[")
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| syntax(line, format!("bad wire `{text}`")))?;
    let wire: usize = inner
        .parse()
        .map_err(|_| syntax(line, format!("bad wire `{text}`")))?;
    if wire >= wire_count {
        return Err(syntax(line, format!("wire {wire} outside register")));
    }
    Ok(wire)
}

/// Parses text produced by [`export_qasm`]. Not a general QASM reader.
pub fn parse(text: &str) -> Result<QasmProgram, ParseError> {
    let mut wire_count = 0;
    let mut ops = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stmt = raw.trim();
        if stmt.is_empty() {
            continue;
        }
        if let Some(comment) = stmt.strip_prefix("//") {
            ops.push(QasmOp::Comment(comment.trim().to_string()));
            continue;
        }
        let stmt = stmt
            .strip_suffix(';')
            .ok_or_else(|| syntax(line, "missing `;`"))?;
        if stmt == "OPENQASM 2.0" || stmt == "include \"qelib1.inc\"" {
            continue;
        }
        if let Some(decl) = stmt.strip_prefix("qreg q[") {
            wire_count = decl
                .strip_suffix(']')
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| syntax(line, "bad qreg declaration"))?;
            continue;
        }
        let (head, args) = stmt
            .split_once(' ')
            .ok_or_else(|| syntax(line, format!("unrecognised statement `{stmt}`")))?;
        let wires = args
            .split(',')
            .map(|w| parse_wire(w, wire_count, line))
            .collect::<Result<Vec<_>, _>>()?;
        let (name, param) = match head.split_once('(') {
            Some((name, rest)) => {
                let p = rest
                    .strip_suffix(')')
                    .ok_or_else(|| syntax(line, "unclosed parameter list"))?;
                (name, Some(parse_angle(p, line)?))
            }
            None => (head, None),
        };
        let op = match (name, param, wires.as_slice()) {
            ("ry", Some(theta), &[target]) => QasmOp::Ry { theta, target },
            ("x", None, &[target]) => QasmOp::X { target },
            ("h", None, &[target]) => QasmOp::H { target },
            ("cx", None, &[control, target]) => QasmOp::Cx { control, target },
            ("ccx", None, &[a, b, target]) => QasmOp::Ccx { a, b, target },
            ("cu1", Some(lambda), &[control, target]) => QasmOp::Cu1 {
                lambda,
                control,
                target,
            },
            _ => return Err(syntax(line, format!("unsupported statement `{stmt}`"))),
        };
        ops.push(op);
    }
    Ok(QasmProgram { wire_count, ops })
}
