//! Encoding-specific optimization: double-NOT removal for the basis path,
//! gray-code lowering of uniformly controlled rotation cascades for the
//! angle family, and decomposition of wide multi-controlled gates into
//! Toffoli chains over a shared ancilla block.

use crate::circuit::{Circuit, Control, Gate, GateKind, Polarity};
use crate::encode::EncodedImage;

use thiserror::Error;

/// Transformed rotations below this magnitude are dropped. Distinguishes
/// exact zeros of the transform from float residue without touching small
/// encoded values.
pub const ROTATION_PRUNE_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("rotation vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("the control ladder needs at least one address qubit")]
    EmptyLadder,
    #[error("not a uniformly controlled cascade: {0}")]
    NotACascade(String),
}

/// Cancel adjacent X pairs on the same qubit (nothing touching that qubit
/// in between), to a fixed point. Expects negative controls to have been
/// materialized already; the unitary is unchanged.
pub fn double_not_removal(circuit: &Circuit) -> Circuit {
    let mut keep = vec![true; circuit.gates.len()];
    let mut pending_x: Vec<Option<usize>> = vec![None; circuit.num_qubits()];
    for (i, gate) in circuit.gates.iter().enumerate() {
        if gate.kind == GateKind::X && gate.controls.is_empty() {
            match pending_x[gate.target].take() {
                Some(open) => {
                    keep[open] = false;
                    keep[i] = false;
                }
                None => pending_x[gate.target] = Some(i),
            }
        } else {
            pending_x[gate.target] = None;
            for ctrl in &gate.controls {
                pending_x[ctrl.qubit] = None;
            }
        }
    }
    let mut out = circuit.clone();
    let mut it = keep.iter();
    out.gates.retain(|_| *it.next().unwrap());
    out
}

pub fn gray_code(j: usize) -> usize {
    j ^ (j >> 1)
}

/// Index of the lowest set bit; the ruler sequence over k = 1, 2, 3, …
fn ruler(k: usize) -> usize {
    k.trailing_zeros() as usize
}

/// Transform a cascade's rotation vector for gray-code rebuilding:
/// `rho' = 2^-n · Mᵀ · rho` with `M[i][j] = (-1)^{<bits(i), gray(j)>}`.
/// Computed as a fast Walsh-Hadamard transform followed by the gray-code
/// index permutation.
pub fn graycode_transform(rho: &[f64]) -> Result<Vec<f64>, OptimizeError> {
    if !rho.len().is_power_of_two() {
        return Err(OptimizeError::NotPowerOfTwo(rho.len()));
    }
    let mut wht = rho.to_vec();
    let mut stride = 1;
    while stride < wht.len() {
        for block in (0..wht.len()).step_by(stride * 2) {
            for j in block..block + stride {
                let (a, b) = (wht[j], wht[j + stride]);
                wht[j] = a + b;
                wht[j + stride] = a - b;
            }
        }
        stride *= 2;
    }
    let scale = (wht.len() as f64).recip();
    Ok((0..wht.len()).map(|k| wht[gray_code(k)] * scale).collect())
}

/// Address-qubit positions of the interleaved entangling gates: the in-order
/// depth sequence of a perfect binary tree (the ruler sequence), closed by a
/// final entry on the most significant address qubit.
pub fn control_ladder(address_bits: usize) -> Result<Vec<usize>, OptimizeError> {
    if address_bits == 0 {
        return Err(OptimizeError::EmptyLadder);
    }
    let mut positions: Vec<usize> = (1..1usize << address_bits).map(ruler).collect();
    positions.push(address_bits - 1);
    Ok(positions)
}

/// One parsed stage of a uniformly controlled cascade.
struct Stage {
    /// Full-length rotation vector indexed by address (0 where the cascade
    /// skipped a zero rotation).
    rho: Vec<f64>,
    present: bool,
}

fn parse_cascade(circuit: &Circuit, address_bits: usize) -> Result<(Stage, Stage), OptimizeError> {
    let data = address_bits;
    let len = 1usize << address_bits;
    let mut rx = Stage {
        rho: vec![0.0; len],
        present: false,
    };
    let mut rz = Stage {
        rho: vec![0.0; len],
        present: false,
    };
    for gate in &circuit.gates {
        let is_amplitude = match gate.kind {
            GateKind::Mcrx | GateKind::Rx => true,
            GateKind::Mcrz | GateKind::Rz => false,
            other => {
                return Err(OptimizeError::NotACascade(format!(
                    "unexpected {other} gate"
                )))
            }
        };
        if is_amplitude && rz.present {
            return Err(OptimizeError::NotACascade(
                "amplitude rotation after a phase rotation".into(),
            ));
        }
        let stage = if is_amplitude { &mut rx } else { &mut rz };
        if gate.target != data {
            return Err(OptimizeError::NotACascade(format!(
                "rotation targets qubit {} instead of the data qubit",
                gate.target
            )));
        }
        if gate.controls.len() != address_bits {
            return Err(OptimizeError::NotACascade(format!(
                "{} controls on an {address_bits}-address-qubit cascade",
                gate.controls.len()
            )));
        }
        let mut address = 0usize;
        let mut seen = 0usize;
        for ctrl in &gate.controls {
            if ctrl.qubit >= address_bits || seen >> ctrl.qubit & 1 == 1 {
                return Err(OptimizeError::NotACascade(
                    "controls do not cover the address register".into(),
                ));
            }
            seen |= 1 << ctrl.qubit;
            if ctrl.polarity == Polarity::Positive {
                address |= 1 << ctrl.qubit;
            }
        }
        if stage.rho[address] != 0.0 {
            return Err(OptimizeError::NotACascade(format!(
                "address {address} rotated twice"
            )));
        }
        stage.rho[address] = gate.angle;
        stage.present = true;
    }
    Ok((rx, rz))
}

fn rebuild_stage(
    out: &mut Circuit,
    rho: &[f64],
    address_bits: usize,
    rotation: GateKind,
) -> Result<(), OptimizeError> {
    let data = address_bits;
    let transformed = graycode_transform(rho)?;
    let ladder = control_ladder(address_bits)?;
    for (k, &angle) in transformed.iter().enumerate() {
        if angle.abs() >= ROTATION_PRUNE_EPS {
            out.push(match rotation {
                GateKind::Rx => Gate::rx(data, angle),
                _ => Gate::rz(data, angle),
            });
        }
        // The entangling ladder is kept whole; Z- (or X-) conjugation is
        // what lets one rotation serve many addresses.
        out.push(match rotation {
            GateKind::Rx => Gate::cz(Control::pos(ladder[k]), data),
            _ => Gate::cx(Control::pos(ladder[k]), data),
        });
    }
    Ok(())
}

/// Rewrite a uniformly controlled rotation cascade as `2^n` single-qubit
/// rotations interleaved with `2^n` two-qubit gates: CZ conjugation negates
/// Rx exactly as CX conjugation negates Rz. Stages absent from the input
/// stay absent.
pub fn gray_code_optimize(
    circuit: &Circuit,
    encoded: &EncodedImage,
) -> Result<Circuit, OptimizeError> {
    let n = encoded.address_bits;
    let (rx, rz) = parse_cascade(circuit, n)?;
    let mut out = Circuit::new(n, 1);
    if rx.present {
        rebuild_stage(&mut out, &rx.rho, n, GateKind::Rx)?;
    }
    if rz.present {
        rebuild_stage(&mut out, &rz.rho, n, GateKind::Rz)?;
    }
    Ok(out)
}

/// How many chain ancilla a gate needs under AND-chain lowering.
fn ancilla_demand(gate: &Gate) -> usize {
    let k = gate.controls.len();
    match gate.kind {
        GateKind::Mcx if k >= 3 => k - 1,
        GateKind::Mcrx | GateKind::Mcrz if k >= 2 => k - 1,
        _ => 0,
    }
}

fn open_negative_controls(out: &mut Circuit, controls: &[Control]) -> Vec<Control> {
    let mut positives = Vec::with_capacity(controls.len());
    for ctrl in controls {
        if ctrl.polarity == Polarity::Negative {
            out.push(Gate::x(ctrl.qubit));
        }
        positives.push(Control::pos(ctrl.qubit));
    }
    positives
}

fn close_negative_controls(out: &mut Circuit, controls: &[Control]) {
    for ctrl in controls {
        if ctrl.polarity == Polarity::Negative {
            out.push(Gate::x(ctrl.qubit));
        }
    }
}

/// Toffoli chain computing the conjunction of `positives` into the last
/// chain ancilla; returns that qubit. `chain_base` is the first ancilla
/// index.
fn compute_chain(out: &mut Circuit, positives: &[Control], chain_base: usize) -> usize {
    out.push(Gate::toffoli(positives[0], positives[1], chain_base));
    let mut top = chain_base;
    for (i, ctrl) in positives.iter().enumerate().skip(2) {
        out.push(Gate::toffoli(Control::pos(top), *ctrl, chain_base + i - 1));
        top = chain_base + i - 1;
    }
    top
}

fn uncompute_chain(out: &mut Circuit, positives: &[Control], chain_base: usize) {
    let start = out.gates.len();
    let _ = compute_chain(out, positives, chain_base);
    out.gates[start..].reverse();
}

/// Materialize negative controls as X sandwiches and decompose wide gates:
/// MCX with ≥ 3 controls (and controlled rotations with ≥ 2) AND-chain
/// through `k − 1` clean ancilla, mirrored to restore them. Consecutive
/// MCX gates sharing a control set reuse one compute/uncompute pair. The
/// ancilla block is sized from the widest gate actually present.
pub fn lower_mcx(circuit: &Circuit) -> Circuit {
    let extra = circuit.gates.iter().map(ancilla_demand).max().unwrap_or(0);
    let chain_base = circuit.num_qubits();
    let mut out = Circuit {
        num_address: circuit.num_address,
        num_data: circuit.num_data,
        num_ancilla: circuit.num_ancilla + extra,
        gates: Vec::with_capacity(circuit.gates.len()),
    };

    let gates = &circuit.gates;
    let mut i = 0;
    while i < gates.len() {
        let gate = &gates[i];
        let k = gate.controls.len();
        match gate.kind {
            GateKind::Mcx if k >= 3 => {
                let mut run_end = i + 1;
                while run_end < gates.len()
                    && gates[run_end].kind == GateKind::Mcx
                    && gates[run_end].controls == gate.controls
                {
                    run_end += 1;
                }
                let positives = open_negative_controls(&mut out, &gate.controls);
                let top = compute_chain(&mut out, &positives, chain_base);
                for g in &gates[i..run_end] {
                    out.push(Gate::cx(Control::pos(top), g.target));
                }
                uncompute_chain(&mut out, &positives, chain_base);
                close_negative_controls(&mut out, &gate.controls);
                i = run_end;
            }
            GateKind::Mcrx | GateKind::Mcrz if k >= 2 => {
                let positives = open_negative_controls(&mut out, &gate.controls);
                let top = compute_chain(&mut out, &positives, chain_base);
                let rotated = match gate.kind {
                    GateKind::Mcrx => Gate::mcrx(vec![Control::pos(top)], gate.target, gate.angle),
                    _ => Gate::mcrz(vec![Control::pos(top)], gate.target, gate.angle),
                };
                out.push(rotated);
                uncompute_chain(&mut out, &positives, chain_base);
                close_negative_controls(&mut out, &gate.controls);
                i += 1;
            }
            _ => {
                let positives = open_negative_controls(&mut out, &gate.controls);
                let mut g = gate.clone();
                g.controls = positives;
                out.push(g);
                close_negative_controls(&mut out, &gate.controls);
                i += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{metrics, quantum_cost, quantum_depth};
    use crate::encode::{AngleEncoding, NormalizationMode};
    use crate::pla::MemoryImage;
    use crate::sim::equivalent_qroms;
    use crate::synth::{synth_angle, synth_basis, synth_improved_angle};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn encoded(n: usize, encoding: AngleEncoding, theta: Vec<f64>, phi: Vec<f64>) -> EncodedImage {
        EncodedImage {
            address_bits: n,
            word_bits: 8,
            encoding,
            mode: NormalizationMode::Interp04,
            theta,
            phi,
            leading_zeros: Vec::new(),
            max_leading_zeros: 0,
            norm_factor: 1.0,
            max_word: None,
            hidden_bit: false,
        }
    }

    fn xorshift(seed: &mut u64) -> u64 {
        *seed ^= *seed << 13;
        *seed ^= *seed >> 7;
        *seed ^= *seed << 17;
        *seed
    }

    fn random_angles(n: usize, seed: &mut u64) -> Vec<f64> {
        (0..1usize << n)
            .map(|_| (xorshift(seed) % 1000) as f64 / 1000.0 * 3.9)
            .collect()
    }

    #[test]
    fn identity_x_pair_cancels() {
        let mut c = Circuit::new(1, 0);
        c.push(Gate::x(0));
        c.push(Gate::x(0));
        assert!(double_not_removal(&c).gates.is_empty());
    }

    #[test]
    fn disjoint_gate_between_pair_does_not_block() {
        let mut c = Circuit::new(3, 0);
        c.push(Gate::x(0));
        c.push(Gate::cx(Control::pos(1), 2));
        c.push(Gate::x(0));
        let out = double_not_removal(&c);
        assert_eq!(out.gates.len(), 1);
        assert_eq!(out.gates[0].kind, GateKind::Cx);
    }

    #[test]
    fn touching_gate_blocks_cancellation() {
        let mut c = Circuit::new(2, 0);
        c.push(Gate::x(0));
        c.push(Gate::cx(Control::pos(0), 1));
        c.push(Gate::x(0));
        assert_eq!(double_not_removal(&c).gates.len(), 3);
    }

    #[test]
    fn consecutive_words_share_their_unchanged_address_bits() {
        // Two-word image at addresses 00 and 01: after lowering, the X pair
        // on the untouched high address bit cancels.
        let image = MemoryImage::new(2, 1, vec![1, 1, 0, 0]);
        let lowered = lower_mcx(&synth_basis(&image));
        let optimized = double_not_removal(&lowered);
        let before = quantum_cost(&lowered);
        let after = quantum_cost(&optimized);
        assert_eq!(before, 12);
        assert_eq!(after, 10);
        assert!((before - after) as f64 / before as f64 >= 0.15);
        equivalent_qroms(&lowered, &optimized, 1e-9).unwrap();
    }

    #[test]
    fn double_not_is_idempotent_and_never_grows() {
        let image = MemoryImage::new(3, 2, vec![1, 3, 0, 2, 2, 1, 0, 3]);
        let lowered = lower_mcx(&synth_basis(&image));
        let once = double_not_removal(&lowered);
        let twice = double_not_removal(&once);
        assert_eq!(once, twice);
        let (m0, m1) = (metrics(&lowered), metrics(&once));
        assert!(m1.gate_count <= m0.gate_count);
        assert!(m1.quantum_cost <= m0.quantum_cost);
        assert!(m1.quantum_depth <= m0.quantum_depth);
    }

    #[test]
    fn equal_rotation_pair_needs_no_control() {
        let theta = 1.234;
        assert_eq!(
            graycode_transform(&[theta, theta]).unwrap(),
            vec![theta, 0.0]
        );
    }

    #[test]
    fn half_pi_single_rotation_splits_evenly() {
        assert_eq!(
            graycode_transform(&[FRAC_PI_2, 0.0]).unwrap(),
            vec![PI / 4.0, PI / 4.0]
        );
    }

    #[test]
    fn transform_rejects_ragged_vectors() {
        assert!(matches!(
            graycode_transform(&[1.0, 2.0, 3.0]),
            Err(OptimizeError::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn ladder_reference_sequences() {
        assert_eq!(control_ladder(1).unwrap(), vec![0, 0]);
        assert_eq!(control_ladder(2).unwrap(), vec![0, 1, 0, 1]);
        assert_eq!(control_ladder(3).unwrap(), vec![0, 1, 0, 2, 0, 1, 0, 2]);
        assert!(matches!(control_ladder(0), Err(OptimizeError::EmptyLadder)));
    }

    #[test]
    fn ladder_multiset_is_ruler_plus_closing_msb() {
        for n in 1..=6usize {
            let ladder = control_ladder(n).unwrap();
            let mut expect: Vec<usize> = (1..1usize << n)
                .map(|k| k.trailing_zeros() as usize)
                .collect();
            expect.push(n - 1);
            expect.sort_unstable();
            let mut got = ladder.clone();
            got.sort_unstable();
            assert_eq!(got, expect);
            assert_eq!(ladder.len(), 1 << n);
        }
    }

    #[test]
    fn rebuilt_rx_cascade_is_statevector_equivalent() {
        let mut seed = 0xDEADBEEFu64;
        for n in 1..=4usize {
            let theta = random_angles(n, &mut seed);
            let enc = encoded(n, AngleEncoding::Angle, theta, vec![0.0; 1 << n]);
            let cascade = synth_angle(&enc);
            let optimized = gray_code_optimize(&cascade, &enc).unwrap();
            equivalent_qroms(&cascade, &optimized, 1e-9).unwrap_or_else(|e| panic!("n={n}: {e}"));
        }
    }

    #[test]
    fn rebuilt_two_stage_cascade_is_statevector_equivalent() {
        let mut seed = 0xC0FFEEu64;
        for n in 1..=3usize {
            let theta = random_angles(n, &mut seed);
            let phi = random_angles(n, &mut seed);
            let enc = encoded(n, AngleEncoding::ImprovedAngle, theta, phi);
            let cascade = synth_improved_angle(&enc);
            let optimized = gray_code_optimize(&cascade, &enc).unwrap();
            equivalent_qroms(&cascade, &optimized, 1e-9).unwrap_or_else(|e| panic!("n={n}: {e}"));
        }
    }

    #[test]
    fn dense_style_cascade_with_phase_stage_optimizes_correctly() {
        let mut seed = 0x5EEDu64;
        let n = 3;
        let theta = random_angles(n, &mut seed);
        let phi = random_angles(n, &mut seed);
        let enc = encoded(n, AngleEncoding::DenseAngle, theta, phi);
        let cascade = synth_angle(&enc);
        let optimized = gray_code_optimize(&cascade, &enc).unwrap();
        equivalent_qroms(&cascade, &optimized, 1e-9).unwrap();
    }

    #[test]
    fn unpruned_stage_counts_are_exact() {
        let mut seed = 7u64;
        let n = 5;
        let theta = random_angles(n, &mut seed);
        let enc = encoded(n, AngleEncoding::Angle, theta, vec![0.0; 1 << n]);
        let optimized = gray_code_optimize(&synth_angle(&enc), &enc).unwrap();
        assert_eq!(optimized.gates.len(), 64);
        assert_eq!(quantum_cost(&optimized), 96);
        assert_eq!(optimized.num_qubits(), 6);
    }

    #[test]
    fn structural_zeros_prune_rotations_but_keep_the_ladder() {
        // A constant vector transforms to a single nonzero entry.
        let theta = vec![0.7; 4];
        let enc = encoded(2, AngleEncoding::Angle, theta, vec![0.0; 4]);
        let cascade = synth_angle(&enc);
        let optimized = gray_code_optimize(&cascade, &enc).unwrap();
        assert_eq!(optimized.gates.len(), 1 + 4);
        assert_eq!(quantum_cost(&optimized), 1 + 8);
        equivalent_qroms(&cascade, &optimized, 1e-9).unwrap();
    }

    #[test]
    fn absent_phase_stage_stays_absent() {
        let enc = encoded(
            2,
            AngleEncoding::Angle,
            vec![0.1, 0.2, 0.3, 0.4],
            vec![0.0; 4],
        );
        let optimized = gray_code_optimize(&synth_angle(&enc), &enc).unwrap();
        assert!(optimized
            .gates
            .iter()
            .all(|g| matches!(g.kind, GateKind::Rx | GateKind::Cz)));
    }

    #[test]
    fn non_cascade_input_is_rejected() {
        let enc = encoded(1, AngleEncoding::Angle, vec![0.1, 0.2], vec![0.0, 0.0]);
        let mut c = Circuit::new(1, 1);
        c.push(Gate::h(1));
        assert!(matches!(
            gray_code_optimize(&c, &enc),
            Err(OptimizeError::NotACascade(_))
        ));
    }

    #[test]
    fn parseval_and_orthogonality() {
        let mut seed = 99u64;
        for n in 1..=6usize {
            let rho = random_angles(n, &mut seed);
            let rho_prime = graycode_transform(&rho).unwrap();
            let lhs: f64 = rho_prime.iter().map(|x| x * x).sum();
            let rhs: f64 = rho.iter().map(|x| x * x).sum::<f64>() / (1 << n) as f64;
            assert!((lhs - rhs).abs() < 1e-9 * rhs.max(1.0), "n={n}");
            // Un-scaled Mᵀ then un-scaled M returns 2^n · rho.
            let unscaled: Vec<f64> = rho_prime.iter().map(|x| x * (1 << n) as f64).collect();
            let back = apply_m_unscaled(&unscaled);
            for (orig, b) in rho.iter().zip(&back) {
                assert!((orig * (1 << n) as f64 - b).abs() < 1e-9);
            }
        }
    }

    /// Un-scaled forward matrix M (scatter through the gray permutation,
    /// then the Walsh-Hadamard butterfly).
    fn apply_m_unscaled(v: &[f64]) -> Vec<f64> {
        let mut scattered = vec![0.0; v.len()];
        for (j, &x) in v.iter().enumerate() {
            scattered[gray_code(j)] = x;
        }
        let mut stride = 1;
        while stride < scattered.len() {
            for block in (0..scattered.len()).step_by(stride * 2) {
                for j in block..block + stride {
                    let (a, b) = (scattered[j], scattered[j + stride]);
                    scattered[j] = a + b;
                    scattered[j + stride] = a - b;
                }
            }
            stride *= 2;
        }
        scattered
    }

    #[test]
    fn and_chain_ancilla_counts_match_the_widest_gate() {
        let image = MemoryImage::new(5, 8, vec![0xA5; 32]);
        let lowered = lower_mcx(&synth_basis(&image));
        assert_eq!(lowered.num_ancilla, 4);
        assert_eq!(lowered.num_qubits(), 17);

        let mut single = vec![0u64; 512];
        single[3] = 1;
        let image = MemoryImage::new(9, 1, single);
        let lowered = lower_mcx(&synth_basis(&image));
        assert_eq!(lowered.num_qubits(), 18);
    }

    #[test]
    fn two_control_gates_pass_through() {
        let mut c = Circuit::new(2, 1);
        c.push(Gate::toffoli(Control::pos(0), Control::pos(1), 2));
        let lowered = lower_mcx(&c);
        assert_eq!(lowered, c);
    }

    #[test]
    fn shared_control_runs_reuse_one_chain() {
        // One address, two set output bits: one compute/uncompute pair
        // around two CX gates.
        let image = MemoryImage::new(3, 2, vec![0, 0, 0, 0, 0, 0b11, 0, 0]);
        let lowered = lower_mcx(&synth_basis(&image));
        let hist = lowered.histogram();
        assert_eq!(hist.get("ccx"), Some(&4)); // 2 compute + 2 uncompute
        assert_eq!(hist.get("cx"), Some(&2));
        assert_eq!(hist.get("x"), Some(&2)); // one negative bit, sandwiched
        equivalent_qroms(&synth_basis(&image), &lowered, 1e-9).unwrap();
    }

    #[test]
    fn lowering_preserves_the_unitary_and_restores_ancilla() {
        let mut seed = 0xAB1Eu64;
        for n in 2..=4usize {
            let m = 3;
            let words: Vec<u64> = (0..1u64 << n)
                .map(|_| xorshift(&mut seed) & 0b111)
                .collect();
            let image = MemoryImage::new(n, m, words);
            let raw = synth_basis(&image);
            let lowered = lower_mcx(&raw);
            equivalent_qroms(&raw, &lowered, 1e-9).unwrap_or_else(|e| panic!("n={n}: {e}"));
        }
    }

    #[test]
    fn rotation_chain_lowering_preserves_the_unitary() {
        let mut seed = 0xF00Du64;
        for n in 2..=3usize {
            let theta = random_angles(n, &mut seed);
            let phi = random_angles(n, &mut seed);
            let enc = encoded(n, AngleEncoding::ImprovedAngle, theta, phi);
            let cascade = synth_improved_angle(&enc);
            let lowered = lower_mcx(&cascade);
            assert_eq!(lowered.num_ancilla, n - 1);
            equivalent_qroms(&cascade, &lowered, 1e-9).unwrap_or_else(|e| panic!("n={n}: {e}"));
        }
    }

    proptest! {
        #[test]
        fn removing_a_gate_never_increases_metrics(drop_idx in 0usize..12) {
            let image = MemoryImage::new(2, 3, vec![5, 2, 7, 1]);
            let c = lower_mcx(&synth_basis(&image));
            prop_assume!(drop_idx < c.gates.len());
            let mut shrunk = c.clone();
            shrunk.gates.remove(drop_idx);
            prop_assert!(quantum_cost(&shrunk) <= quantum_cost(&c));
            prop_assert!(quantum_depth(&shrunk) <= quantum_depth(&c));
        }

        #[test]
        fn metrics_are_invariant_under_qubit_relabeling(perm_seed in 0u64..1000) {
            let image = MemoryImage::new(2, 2, vec![1, 2, 3, 0]);
            let c = lower_mcx(&synth_basis(&image));
            let q = c.num_qubits();
            // Fisher-Yates with a toy generator.
            let mut perm: Vec<usize> = (0..q).collect();
            let mut s = perm_seed.wrapping_add(1);
            for i in (1..q).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s as usize) % (i + 1));
            }
            let mut relabeled = c.clone();
            for g in &mut relabeled.gates {
                g.target = perm[g.target];
                for ctrl in &mut g.controls {
                    ctrl.qubit = perm[ctrl.qubit];
                }
            }
            prop_assert_eq!(quantum_cost(&relabeled), quantum_cost(&c));
            prop_assert_eq!(quantum_depth(&relabeled), quantum_depth(&c));
        }
    }
}
