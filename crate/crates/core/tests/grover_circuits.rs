//! Oracle, diffuser and initializer behaviour checked by simulation against
//! brute-force enumeration of colorings.

use num_complex::Complex64;
use uniprep::grover::{
    diffuser, grover_circuit, initializer, oracle, phase_prep, ColoringProblem, GroverEngine,
    Mode, WireLayout,
};
use uniprep::sim::{simulate_from, StateVector};
use uniprep::simulate;

/// Every register state in uniform superposition, phase wire in |->.
fn all_register_states(layout: &WireLayout) -> StateVector {
    let mut prep = phase_prep(layout);
    for w in 0..layout.register_wire_count() {
        prep.append(uniprep::Gate::h(w)).unwrap();
    }
    simulate(&prep).unwrap()
}

fn brute_force_satisfying(problem: &ColoringProblem, layout: &WireLayout) -> Vec<bool> {
    (0..1usize << layout.register_wire_count())
        .map(|idx| problem.satisfies_edges(&layout.decode(idx)))
        .collect()
}

/// Checks that the oracle flips exactly the edge-satisfying register states
/// and leaves every ancilla at |0>.
fn check_oracle(problem: &ColoringProblem) {
    let layout = WireLayout::new(problem);
    let before = all_register_states(&layout);
    let after = simulate_from(&oracle(problem, &layout), &before).unwrap();
    let expected = brute_force_satisfying(problem, &layout);
    let reg_mask = (1usize << layout.register_wire_count()) - 1;
    let ancilla_mask: usize = layout.edge_ancillas.iter().map(|a| 1 << a).sum();

    for (index, (b, a)) in before.amplitudes().iter().zip(after.amplitudes()).enumerate() {
        if index & ancilla_mask != 0 {
            assert!(a.norm_sqr() < 1e-12, "ancilla dirty at {index:b}");
            continue;
        }
        if b.norm() < 1e-15 {
            continue;
        }
        let flipped = (a + b).norm() < 1e-10;
        let kept = (a - b).norm() < 1e-10;
        assert!(flipped ^ kept, "neither kept nor flipped at {index:b}");
        assert_eq!(
            flipped,
            expected[index & reg_mask],
            "register state {:?}",
            layout.decode(index)
        );
    }
}

fn test_suite() -> Vec<ColoringProblem> {
    let mut out = Vec::new();
    for &n in &[2u64, 3, 5] {
        for nodes in 1..=4 {
            out.push(ColoringProblem::line(nodes, n).unwrap());
        }
        out.push(ColoringProblem::new(vec![n; 3], vec![(0, 1), (1, 2), (0, 2)]).unwrap());
        out.push(ColoringProblem::new(vec![n; 4], vec![(0, 1), (0, 2), (0, 3)]).unwrap());
    }
    out.push(ColoringProblem::new(vec![2, 3, 5], vec![(0, 1), (1, 2), (0, 2)]).unwrap());
    out.push(ColoringProblem::new(vec![5, 2, 3, 2], vec![(0, 1), (0, 2), (0, 3)]).unwrap());
    out.retain(|p| WireLayout::new(p).register_wire_count() <= 10);
    out
}

#[test]
fn oracle_marks_exactly_the_satisfying_assignments() {
    let suite = test_suite();
    assert!(suite.len() >= 15);
    for problem in &suite {
        check_oracle(problem);
    }
}

#[test]
fn two_binary_vertices_mark_01_and_10() {
    let p = ColoringProblem::line(2, 2).unwrap();
    let layout = WireLayout::new(&p);
    let marked: Vec<_> = brute_force_satisfying(&p, &layout)
        .into_iter()
        .enumerate()
        .filter(|(_, m)| *m)
        .map(|(i, _)| i)
        .collect();
    assert_eq!(marked, vec![0b01, 0b10]);
    check_oracle(&p);
}

#[test]
fn edgeless_oracle_is_global_phase() {
    let p = ColoringProblem::new(vec![3, 5], vec![]).unwrap();
    let layout = WireLayout::new(&p);
    let before = all_register_states(&layout);
    let after = simulate_from(&oracle(&p, &layout), &before).unwrap();
    for (a, b) in after.amplitudes().iter().zip(before.amplitudes()) {
        assert!((a + b).norm() < 1e-12);
    }
}

#[test]
fn oracle_is_an_involution() {
    for problem in test_suite() {
        let layout = WireLayout::new(&problem);
        let before = all_register_states(&layout);
        let mut twice = oracle(&problem, &layout);
        twice.compose(&oracle(&problem, &layout), 0).unwrap();
        let after = simulate_from(&twice, &before).unwrap();
        for (a, b) in after.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn restricted_initializer_on_two_vertices() {
    let p = ColoringProblem::line(2, 3).unwrap();
    let layout = WireLayout::new(&p);
    let state = simulate(&initializer(&p, &layout, Mode::Restricted)).unwrap();
    let mut marginal = [0.0; 16];
    for (i, a) in state.amplitudes().iter().enumerate() {
        marginal[i & 15] += a.norm_sqr();
    }
    for (idx, p) in marginal.iter().enumerate() {
        let (a, b) = (idx & 3, idx >> 2);
        if a < 3 && b < 3 {
            assert!((p - 1.0 / 9.0).abs() < 1e-12);
        } else {
            assert!(*p < 1e-15);
        }
    }
}

#[test]
fn oracle_on_restricted_state_flips_the_six_proper_pairs() {
    let p = ColoringProblem::line(2, 3).unwrap();
    let layout = WireLayout::new(&p);
    let mut prep = phase_prep(&layout);
    prep.compose(&initializer(&p, &layout, Mode::Restricted), 0).unwrap();
    let before = simulate(&prep).unwrap();
    let after = simulate_from(&oracle(&p, &layout), &before).unwrap();
    let (mut flipped, mut kept) = (0, 0);
    for (i, (b, a)) in before.amplitudes().iter().zip(after.amplitudes()).enumerate() {
        if b.norm() < 1e-12 {
            continue;
        }
        let colors = layout.decode(i);
        if (a + b).norm() < 1e-12 {
            assert_ne!(colors[0], colors[1]);
            flipped += 1;
        } else {
            assert!((a - b).norm() < 1e-12);
            assert_eq!(colors[0], colors[1]);
            kept += 1;
        }
    }
    // each register value appears twice: phase wire |0> and |1> components
    assert_eq!((flipped, kept), (12, 6));
}

#[test]
fn diffuser_fixes_its_own_initial_state() {
    for mode in Mode::ALL {
        for problem in [
            ColoringProblem::line(3, 3).unwrap(),
            ColoringProblem::new(vec![2], vec![]).unwrap(),
            ColoringProblem::new(vec![5, 6], vec![(0, 1)]).unwrap(),
        ] {
            let layout = WireLayout::new(&problem);
            let mut prep = phase_prep(&layout);
            prep.compose(&initializer(&problem, &layout, mode), 0).unwrap();
            let start = simulate(&prep).unwrap();
            let end = simulate_from(&diffuser(&problem, &layout, mode), &start).unwrap();
            assert!((start.fidelity(&end) - 1.0).abs() < 1e-10);
        }
    }
}

/// One Grover round computed classically: flip the sign of valid states,
/// then reflect every amplitude of the initial support about the mean.
fn classical_round(support: &[usize], valid: &[bool], dim: usize) -> Vec<f64> {
    let a0 = 1.0 / (support.len() as f64).sqrt();
    let flipped: Vec<f64> = support.iter().map(|&i| if valid[i] { -a0 } else { a0 }).collect();
    let mean = flipped.iter().sum::<f64>() / support.len() as f64;
    let mut out = vec![0.0; dim];
    for (&i, a) in support.iter().zip(&flipped) {
        out[i] = (2.0 * mean - a).powi(2);
    }
    out
}

#[test]
fn one_repetition_matches_reflection_about_the_mean() {
    let p = ColoringProblem::line(2, 3).unwrap();
    for mode in Mode::ALL {
        let mut engine = GroverEngine::new(&p, mode).unwrap();
        let layout = engine.layout().clone();
        let dim = 1 << layout.register_wire_count();
        let support: Vec<usize> = (0..dim)
            .filter(|&i| mode == Mode::Hadamard || layout.decode(i).iter().all(|&v| v < 3))
            .collect();
        // the oracle checks edges only
        let valid: Vec<bool> = (0..dim).map(|i| p.satisfies_edges(&layout.decode(i))).collect();
        let expected = classical_round(&support, &valid, dim);
        let got = engine.register_distribution(1);
        for i in 0..dim {
            assert!((got[i] - expected[i]).abs() < 1e-12, "{mode} index {i}");
        }
    }
}

#[test]
fn equal_color_states_after_one_repetition() {
    let p = ColoringProblem::line(2, 3).unwrap();
    // 6 of 9 restricted states are proper colorings, so one round overshoots
    // and the three equal-color states grow from 1/9 to 25/81 each
    let mut restricted = GroverEngine::new(&p, Mode::Restricted).unwrap();
    let layout = restricted.layout().clone();
    for c in 0..3u64 {
        let idx = layout.encode(&[c, c]);
        assert!((restricted.register_distribution(0)[idx] - 1.0 / 9.0).abs() < 1e-12);
        assert!((restricted.register_distribution(1)[idx] - 25.0 / 81.0).abs() < 1e-12);
    }
    // a 3-colored triangle marks 6 of 27 states, below the overshoot point
    let triangle = ColoringProblem::new(vec![3; 3], vec![(0, 1), (1, 2), (0, 2)]).unwrap();
    let mut engine = GroverEngine::new(&triangle, Mode::Restricted).unwrap();
    let layout = engine.layout().clone();
    for c in 0..3u64 {
        let idx = layout.encode(&[c, c, (c + 1) % 3]);
        assert!(engine.register_distribution(1)[idx] < engine.register_distribution(0)[idx]);
    }
}

#[test]
fn restricted_mode_stays_in_range() {
    let p = ColoringProblem::line(3, 3).unwrap();
    let mut engine = GroverEngine::new(&p, Mode::Restricted).unwrap();
    for reps in 0..=10 {
        assert!(engine.out_of_range_probability(reps) < 1e-10, "reps={reps}");
    }
    let mut hadamard = GroverEngine::new(&p, Mode::Hadamard).unwrap();
    assert!(hadamard.out_of_range_probability(0) > 0.5);
}

#[test]
fn power_of_two_colors_give_identical_runs() {
    let p = ColoringProblem::line(3, 4).unwrap();
    for reps in 0..4 {
        let a = simulate(&grover_circuit(&p, Mode::Restricted, reps)).unwrap();
        let b = simulate(&grover_circuit(&p, Mode::Hadamard, reps)).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn engine_matches_full_circuit_simulation() {
    let p = ColoringProblem::new(vec![3, 5], vec![(0, 1)]).unwrap();
    for mode in Mode::ALL {
        let mut engine = GroverEngine::new(&p, mode).unwrap();
        for reps in 0..4 {
            let direct = simulate(&grover_circuit(&p, mode, reps)).unwrap();
            assert_eq!(engine.state_after(reps), &direct);
        }
    }
}

#[test]
fn amplitudes_stay_real() {
    let p = ColoringProblem::line(3, 3).unwrap();
    let state = simulate(&grover_circuit(&p, Mode::Restricted, 3)).unwrap();
    assert!(state
        .amplitudes()
        .iter()
        .all(|a: &Complex64| a.im.abs() < 1e-12));
}
