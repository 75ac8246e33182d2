//! Grover search for graph colorings, with either a Hadamard or a restricted
//! (exact uniform) initializer.
//!
//! Each vertex `v` with `N_v` colors gets a register of `ceil(log2 N_v)`
//! wires. Every edge owns one ancilla that is set while the two endpoint
//! registers are equal, and a single phase wire held in `|->` provides the
//! kickback. Wire order is: vertex registers (low wires), edge ancillas,
//! phase wire.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::circuit::{Circuit, Control, Gate};
use crate::prep::{ceil_log2, generate};
use crate::sim::{StateVector, MAX_WIRES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("graph has no vertices")]
    NoVertices,
    #[error("vertex {vertex} has {colors} colors; at least 2 are required")]
    TooFewColors { vertex: usize, colors: u64 },
    #[error("vertex {vertex} has {colors} colors; at most 2^32 are supported")]
    TooManyColors { vertex: usize, colors: u64 },
    #[error("edge {edge} is a self-loop on vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("edge {edge} ({u}, {v}) duplicates an earlier edge")]
    DuplicateEdge { edge: usize, u: usize, v: usize },
    #[error("edge {edge} references vertex {vertex}, but the graph has {count} vertices")]
    VertexOutOfRange {
        edge: usize,
        vertex: usize,
        count: usize,
    },
    #[error("search space size overflows 128 bits")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroverError {
    #[error("layout needs {wires} wires, above the simulator ceiling of {limit}")]
    Capacity { wires: usize, limit: usize },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Graph with a per-vertex number of allowed colors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringProblem {
    colors: Vec<u64>,
    edges: Vec<(usize, usize)>,
}

impl ColoringProblem {
    pub fn new(colors: Vec<u64>, edges: Vec<(usize, usize)>) -> Result<Self, ProblemError> {
        if colors.is_empty() {
            return Err(ProblemError::NoVertices);
        }
        for (vertex, &c) in colors.iter().enumerate() {
            if c < 2 {
                return Err(ProblemError::TooFewColors { vertex, colors: c });
            }
            if c > 1 << 32 {
                return Err(ProblemError::TooManyColors { vertex, colors: c });
            }
        }
        for (edge, &(u, v)) in edges.iter().enumerate() {
            for vertex in [u, v] {
                if vertex >= colors.len() {
                    return Err(ProblemError::VertexOutOfRange {
                        edge,
                        vertex,
                        count: colors.len(),
                    });
                }
            }
            if u == v {
                return Err(ProblemError::SelfLoop { edge, vertex: u });
            }
            let key = (u.min(v), u.max(v));
            if edges[..edge].iter().any(|&(a, b)| (a.min(b), a.max(b)) == key) {
                return Err(ProblemError::DuplicateEdge { edge, u, v });
            }
        }
        Ok(ColoringProblem { colors, edges })
    }

    /// Path graph `0 - 1 - ... - (nodes-1)`, every vertex with `colors` colors.
    pub fn line(nodes: usize, colors: u64) -> Result<Self, ProblemError> {
        let edges = (1..nodes).map(|v| (v - 1, v)).collect();
        Self::new(vec![colors; nodes], edges)
    }

    pub fn colors(&self) -> &[u64] {
        &self.colors
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.colors.len()
    }

    /// Every color in range and every edge joining distinct colors.
    pub fn is_solution(&self, assignment: &[u64]) -> bool {
        assignment.len() == self.colors.len()
            && assignment.iter().zip(&self.colors).all(|(a, n)| a < n)
            && self.satisfies_edges(assignment)
    }

    pub fn satisfies_edges(&self, assignment: &[u64]) -> bool {
        self.edges
            .iter()
            .all(|&(u, v)| assignment[u] != assignment[v])
    }

    pub fn search_space_sizes(&self) -> Result<SearchSpace, ProblemError> {
        let mut hadamard = 1u128;
        let mut restricted = 1u128;
        for &n in &self.colors {
            let padded = 1u128 << ceil_log2(n);
            hadamard = hadamard.checked_mul(padded).ok_or(ProblemError::Overflow)?;
            restricted = restricted
                .checked_mul(n as u128)
                .ok_or(ProblemError::Overflow)?;
        }
        Ok(SearchSpace {
            hadamard,
            restricted,
        })
    }
}

/// Number of register states reachable from each initializer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchSpace {
    /// Product of `2^ceil(log2 N_v)`.
    pub hadamard: u128,
    /// Product of `N_v`.
    pub restricted: u128,
}

impl SearchSpace {
    pub fn for_mode(&self, mode: Mode) -> u128 {
        match mode {
            Mode::Hadamard => self.hadamard,
            Mode::Restricted => self.restricted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Register {
    pub offset: usize,
    pub width: usize,
}

impl Register {
    pub fn wires(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.width
    }
}

/// Assignment of vertices, edge ancillas and the phase wire to circuit wires.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WireLayout {
    pub registers: Vec<Register>,
    pub edge_ancillas: Vec<usize>,
    pub phase: usize,
    pub total: usize,
}

impl WireLayout {
    pub fn new(problem: &ColoringProblem) -> Self {
        let mut offset = 0;
        let registers = problem
            .colors
            .iter()
            .map(|&n| {
                let reg = Register {
                    offset,
                    width: ceil_log2(n) as usize,
                };
                offset += reg.width;
                reg
            })
            .collect();
        let edge_ancillas: Vec<usize> = (offset..offset + problem.edges.len()).collect();
        let phase = offset + problem.edges.len();
        WireLayout {
            registers,
            edge_ancillas,
            phase,
            total: phase + 1,
        }
    }

    /// Wires holding vertex registers; always `0..register_wire_count()`.
    pub fn register_wire_count(&self) -> usize {
        self.registers.iter().map(|r| r.width).sum()
    }

    /// Per-vertex register values encoded in `index`.
    pub fn decode(&self, index: usize) -> Vec<u64> {
        self.registers
            .iter()
            .map(|r| ((index >> r.offset) & ((1 << r.width) - 1)) as u64)
            .collect()
    }

    /// Basis index whose registers hold `assignment` and whose ancillas and
    /// phase wire are 0.
    pub fn encode(&self, assignment: &[u64]) -> usize {
        self.registers
            .iter()
            .zip(assignment)
            .fold(0, |acc, (r, &value)| acc | (value as usize) << r.offset)
    }

    fn empty_circuit(&self) -> Circuit {
        Circuit::new(self.total)
    }
}

/// How the vertex registers are put into superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exact uniform superposition over the `N_v` valid colors.
    Restricted,
    /// H on every register wire.
    Hadamard,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Restricted, Mode::Hadamard];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Restricted => "restricted",
            Mode::Hadamard => "hadamard",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "restricted" => Ok(Mode::Restricted),
            "hadamard" => Ok(Mode::Hadamard),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

fn append(circuit: &mut Circuit, gate: Gate) {
    circuit
        .append(gate)
        .expect("layout wires are in range and distinct");
}

/// State preparation on the vertex registers.
///
/// Registers with a power-of-two color count get H gates in both modes, so
/// the two modes build identical circuits when every `N_v` is a power of two.
pub fn initializer(problem: &ColoringProblem, layout: &WireLayout, mode: Mode) -> Circuit {
    let mut circuit = layout.empty_circuit();
    for (&n, reg) in problem.colors.iter().zip(&layout.registers) {
        if mode == Mode::Hadamard || n.is_power_of_two() {
            for w in reg.wires() {
                append(&mut circuit, Gate::h(w));
            }
        } else {
            let prep = generate(n).expect("color counts are at least 2");
            circuit
                .compose(&prep, reg.offset)
                .expect("register fits its prep circuit");
        }
    }
    circuit
}

/// X then H on the phase wire, leaving it in `|->`.
pub fn phase_prep(layout: &WireLayout) -> Circuit {
    let mut circuit = layout.empty_circuit();
    append(&mut circuit, Gate::x(layout.phase));
    append(&mut circuit, Gate::h(layout.phase));
    circuit
}

/// Sets the edge ancilla iff both endpoint registers hold the same value.
/// Self-inverse.
fn edge_compare(circuit: &mut Circuit, layout: &WireLayout, (u, v): (usize, usize), ancilla: usize) {
    let (ru, rv) = (layout.registers[u], layout.registers[v]);
    let common = ru.width.min(rv.width);
    let wider = if ru.width >= rv.width { ru } else { rv };
    let xors: Vec<Gate> = (0..common)
        .map(|b| Gate::cx(ru.offset + b, rv.offset + b))
        .collect();
    let compared = (0..common)
        .map(|b| rv.offset + b)
        .chain((common..wider.width).map(|b| wider.offset + b))
        .map(Control::negative)
        .collect();
    for g in &xors {
        append(circuit, g.clone());
    }
    append(circuit, Gate::mcx(compared, ancilla));
    for g in xors {
        append(circuit, g);
    }
}

/// Phase-flips every register state that satisfies all edge constraints.
///
/// Expects the phase wire in `|->` and all edge ancillas in `|0>`; both are
/// returned unchanged. Out-of-range colors are not checked here.
pub fn oracle(problem: &ColoringProblem, layout: &WireLayout) -> Circuit {
    let mut circuit = layout.empty_circuit();
    let pairs: Vec<_> = problem.edges.iter().copied().zip(layout.edge_ancillas.iter().copied()).collect();
    for &(edge, anc) in &pairs {
        edge_compare(&mut circuit, layout, edge, anc);
    }
    if layout.edge_ancillas.is_empty() {
        append(&mut circuit, Gate::x(layout.phase));
    } else {
        let controls = layout
            .edge_ancillas
            .iter()
            .map(|&a| Control::negative(a))
            .collect();
        append(&mut circuit, Gate::mcx(controls, layout.phase));
    }
    for &(edge, anc) in pairs.iter().rev() {
        edge_compare(&mut circuit, layout, edge, anc);
    }
    circuit
}

/// Reflection about the initial superposition of `mode`, acting on the
/// vertex registers only: inverse prep, reflection about `|0...0>`, prep.
pub fn diffuser(problem: &ColoringProblem, layout: &WireLayout, mode: Mode) -> Circuit {
    let prep = initializer(problem, layout, mode);
    let reg_wires = layout.register_wire_count();
    let last = reg_wires - 1;

    let mut circuit = prep.inverse();
    for w in 0..reg_wires {
        append(&mut circuit, Gate::x(w));
    }
    append(&mut circuit, Gate::h(last));
    if last == 0 {
        append(&mut circuit, Gate::x(last));
    } else {
        append(
            &mut circuit,
            Gate::mcx((0..last).map(Control::positive).collect(), last),
        );
    }
    append(&mut circuit, Gate::h(last));
    for w in 0..reg_wires {
        append(&mut circuit, Gate::x(w));
    }
    circuit
        .compose(&prep, 0)
        .expect("prep circuit has the layout width");
    circuit
}

/// Phase prep, initializer, then `repetitions` rounds of oracle + diffuser.
pub fn grover_circuit(problem: &ColoringProblem, mode: Mode, repetitions: usize) -> Circuit {
    let layout = WireLayout::new(problem);
    let mut circuit = phase_prep(&layout);
    circuit
        .compose(&initializer(problem, &layout, mode), 0)
        .expect("same width");
    let oracle = oracle(problem, &layout);
    let diffuser = diffuser(problem, &layout, mode);
    for _ in 0..repetitions {
        circuit.compose(&oracle, 0).expect("same width");
        circuit.compose(&diffuser, 0).expect("same width");
    }
    circuit
}

/// Randomized repetition schedule for an unknown number of solutions.
///
/// Each attempt draws `r` uniformly from `0..ceil(m)`; after a failed
/// verification `m` grows by `lambda`, never beyond `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthPolicy {
    pub lambda: f64,
    pub initial: f64,
    pub cap: f64,
    /// Attempts per trial before giving up (guards unsatisfiable graphs).
    pub max_attempts: u32,
}

impl GrowthPolicy {
    pub const DEFAULT_LAMBDA: f64 = 6.0 / 5.0;
    pub const DEFAULT_MAX_ATTEMPTS: u32 = 10_000;

    /// Default schedule with `cap = sqrt(search space of mode)`.
    pub fn for_problem(problem: &ColoringProblem, mode: Mode) -> Result<Self, ProblemError> {
        let space = problem.search_space_sizes()?.for_mode(mode);
        Ok(GrowthPolicy {
            lambda: Self::DEFAULT_LAMBDA,
            initial: 1.0,
            cap: (space as f64).sqrt().max(1.0),
            max_attempts: Self::DEFAULT_MAX_ATTEMPTS,
        })
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        GrowthPolicy { lambda, ..self }
    }

    pub fn next(&self, m: f64) -> f64 {
        (m * self.lambda).min(self.cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub trial: u64,
    /// Grover repetitions summed over every attempt of this trial.
    pub repetitions: u64,
    pub attempts: u32,
    pub solved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchStats {
    pub mode: Mode,
    pub seed: u64,
    pub policy: GrowthPolicy,
    pub outcomes: Vec<TrialOutcome>,
}

impl SearchStats {
    pub fn trials(&self) -> usize {
        self.outcomes.len()
    }

    pub fn successes(&self) -> usize {
        self.outcomes.iter().filter(|o| o.solved).count()
    }

    /// Mean repetitions over solved trials; `None` if nothing was solved.
    pub fn mean_repetitions(&self) -> Option<f64> {
        let solved: Vec<_> = self.outcomes.iter().filter(|o| o.solved).collect();
        if solved.is_empty() {
            return None;
        }
        let total: u64 = solved.iter().map(|o| o.repetitions).sum();
        Some(total as f64 / solved.len() as f64)
    }
}

/// Simulates Grover runs for one problem and mode, caching the register
/// distribution after each repetition count.
///
/// States are advanced one repetition at a time from the same prepared
/// state, which applies exactly the gate sequence of
/// [`grover_circuit`]`(problem, mode, r)`.
pub struct GroverEngine {
    problem: ColoringProblem,
    layout: WireLayout,
    mode: Mode,
    oracle: Circuit,
    diffuser: Circuit,
    state: StateVector,
    distributions: Vec<Vec<f64>>,
    samplers: Vec<WeightedIndex<f64>>,
}

impl GroverEngine {
    pub fn new(problem: &ColoringProblem, mode: Mode) -> Result<Self, GroverError> {
        let layout = WireLayout::new(problem);
        if layout.total > MAX_WIRES {
            return Err(GroverError::Capacity {
                wires: layout.total,
                limit: MAX_WIRES,
            });
        }
        let mut state = StateVector::zero(layout.total).expect("checked against the ceiling");
        state.run(&phase_prep(&layout)).expect("same width");
        state
            .run(&initializer(problem, &layout, mode))
            .expect("same width");
        let mut engine = GroverEngine {
            oracle: oracle(problem, &layout),
            diffuser: diffuser(problem, &layout, mode),
            problem: problem.clone(),
            layout,
            mode,
            state,
            distributions: Vec::new(),
            samplers: Vec::new(),
        };
        engine.record();
        Ok(engine)
    }

    pub fn layout(&self) -> &WireLayout {
        &self.layout
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    fn record(&mut self) {
        let reg_dim = 1usize << self.layout.register_wire_count();
        let mut marginal = vec![0.0; reg_dim];
        for (index, amp) in self.state.amplitudes().iter().enumerate() {
            marginal[index & (reg_dim - 1)] += amp.norm_sqr();
        }
        self.samplers
            .push(WeightedIndex::new(&marginal).expect("state is normalised"));
        self.distributions.push(marginal);
    }

    fn advance_to(&mut self, repetitions: usize) {
        while self.distributions.len() <= repetitions {
            self.state.run(&self.oracle).expect("same width");
            self.state.run(&self.diffuser).expect("same width");
            self.record();
        }
    }

    /// Full state after `repetitions` Grover rounds. Only moves forward.
    pub fn state_after(&mut self, repetitions: usize) -> &StateVector {
        assert!(
            repetitions + 1 >= self.distributions.len(),
            "engine state has already moved past {repetitions} repetitions"
        );
        self.advance_to(repetitions);
        &self.state
    }

    /// Probability of each register value after `repetitions` rounds.
    pub fn register_distribution(&mut self, repetitions: usize) -> &[f64] {
        self.advance_to(repetitions);
        &self.distributions[repetitions]
    }

    /// Probability that a measurement after `repetitions` rounds verifies.
    pub fn success_probability(&mut self, repetitions: usize) -> f64 {
        self.advance_to(repetitions);
        let layout = &self.layout;
        let problem = &self.problem;
        self.distributions[repetitions]
            .iter()
            .enumerate()
            .filter(|(index, _)| problem.is_solution(&layout.decode(*index)))
            .map(|(_, p)| p)
            .sum()
    }

    /// Probability mass on register values with some color `>= N_v`.
    pub fn out_of_range_probability(&mut self, repetitions: usize) -> f64 {
        self.advance_to(repetitions);
        let layout = &self.layout;
        let colors = self.problem.colors();
        self.distributions[repetitions]
            .iter()
            .enumerate()
            .filter(|(index, _)| {
                layout
                    .decode(*index)
                    .iter()
                    .zip(colors)
                    .any(|(value, n)| value >= n)
            })
            .map(|(_, p)| p)
            .sum()
    }

    /// One trial of the randomized schedule. The generator is ChaCha8
    /// seeded with `seed` on stream `trial`, so trials are independent of
    /// execution order.
    pub fn run_trial(&mut self, policy: &GrowthPolicy, seed: u64, trial: u64) -> TrialOutcome {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let mut m = policy.initial;
        let mut repetitions = 0u64;
        for attempt in 1..=policy.max_attempts {
            let r = rng.random_range(0..m.ceil().max(1.0) as usize);
            self.advance_to(r);
            let measured = self.samplers[r].sample(&mut rng);
            repetitions += r as u64;
            if self.problem.is_solution(&self.layout.decode(measured)) {
                return TrialOutcome {
                    trial,
                    repetitions,
                    attempts: attempt,
                    solved: true,
                };
            }
            m = policy.next(m);
        }
        TrialOutcome {
            trial,
            repetitions,
            attempts: policy.max_attempts,
            solved: false,
        }
    }
}

/// Runs `trials` independent searches for `problem` in `mode`.
pub fn run_search(
    problem: &ColoringProblem,
    mode: Mode,
    policy: &GrowthPolicy,
    trials: u64,
    seed: u64,
) -> Result<SearchStats, GroverError> {
    let mut engine = GroverEngine::new(problem, mode)?;
    let outcomes = (0..trials)
        .map(|t| engine.run_trial(policy, seed, t))
        .collect();
    Ok(SearchStats {
        mode,
        seed,
        policy: *policy,
        outcomes,
    })
}
