//! Lowering to the uniform gate set {Rx, Ry, Rz, CX} for hardware-facing
//! emission. Every rewrite is unitary-equivalent up to global phase; wide
//! multi-controlled gates must go through `lower_mcx` first.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use thiserror::Error;

use crate::circuit::{Circuit, Control, Gate, GateKind, Polarity};

#[derive(Debug, Error)]
pub enum LowerError {
    #[error(
        "{kind} gate with {controls} controls reached uniform lowering; run MCX lowering first"
    )]
    TooManyControls { kind: GateKind, controls: usize },
}

/// Wrap into (−π, π] for readability of emitted angles.
fn normalize_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

/// H up to global phase: Rz(π) then Ry(π/2).
fn push_h(out: &mut Circuit, target: usize) {
    out.push(Gate::rz(target, PI));
    out.push(Gate::ry(target, FRAC_PI_2));
}

/// Controlled-Rz via two CX conjugations; exact, no phase residue.
fn push_crz(out: &mut Circuit, control: usize, target: usize, angle: f64) {
    out.push(Gate::rz(target, normalize_angle(angle / 2.0)));
    out.push(Gate::cx(Control::pos(control), target));
    out.push(Gate::rz(target, normalize_angle(-angle / 2.0)));
    out.push(Gate::cx(Control::pos(control), target));
}

fn push_toffoli(out: &mut Circuit, c0: usize, c1: usize, target: usize) {
    let t = FRAC_PI_4;
    push_h(out, target);
    out.push(Gate::cx(Control::pos(c1), target));
    out.push(Gate::rz(target, -t));
    out.push(Gate::cx(Control::pos(c0), target));
    out.push(Gate::rz(target, t));
    out.push(Gate::cx(Control::pos(c1), target));
    out.push(Gate::rz(target, -t));
    out.push(Gate::cx(Control::pos(c0), target));
    out.push(Gate::rz(c1, t));
    out.push(Gate::rz(target, t));
    push_h(out, target);
    out.push(Gate::cx(Control::pos(c0), c1));
    out.push(Gate::rz(c0, t));
    out.push(Gate::rz(c1, -t));
    out.push(Gate::cx(Control::pos(c0), c1));
}

/// Rewrite to {Rx, Ry, Rz, CX}. Accepts the IR kinds with at most two
/// controls (at most one for rotations); negative controls are materialized
/// here as Rx(π) sandwiches if any survived earlier passes.
pub fn lower_uniform(circuit: &Circuit) -> Result<Circuit, LowerError> {
    let mut out = Circuit {
        num_address: circuit.num_address,
        num_data: circuit.num_data,
        num_ancilla: circuit.num_ancilla,
        gates: Vec::with_capacity(circuit.gates.len() * 2),
    };
    for gate in &circuit.gates {
        let k = gate.controls.len();
        let too_wide = match gate.kind {
            GateKind::Mcx => true,
            GateKind::Mcrx | GateKind::Mcrz => k > 1,
            _ => false,
        };
        if too_wide {
            return Err(LowerError::TooManyControls {
                kind: gate.kind,
                controls: k,
            });
        }

        let negatives: Vec<usize> = gate
            .controls
            .iter()
            .filter(|c| c.polarity == Polarity::Negative)
            .map(|c| c.qubit)
            .collect();
        for &q in &negatives {
            out.push(Gate::rx(q, PI));
        }
        let ctrl = |i: usize| gate.controls[i].qubit;
        match gate.kind {
            GateKind::X => out.push(Gate::rx(gate.target, PI)),
            GateKind::H => push_h(&mut out, gate.target),
            GateKind::Cx => out.push(Gate::cx(Control::pos(ctrl(0)), gate.target)),
            GateKind::Cz => {
                push_h(&mut out, gate.target);
                out.push(Gate::cx(Control::pos(ctrl(0)), gate.target));
                push_h(&mut out, gate.target);
            }
            GateKind::Toffoli => push_toffoli(&mut out, ctrl(0), ctrl(1), gate.target),
            GateKind::Rx | GateKind::Ry | GateKind::Rz => {
                let mut g = gate.clone();
                g.angle = normalize_angle(g.angle);
                out.push(g);
            }
            GateKind::Mcx => unreachable!("rejected above"),
            GateKind::Mcrz => push_crz(&mut out, ctrl(0), gate.target, gate.angle),
            GateKind::Mcrx => {
                // Rotate the target's X axis onto Z, apply the Rz pattern,
                // rotate back.
                push_h(&mut out, gate.target);
                push_crz(&mut out, ctrl(0), gate.target, gate.angle);
                push_h(&mut out, gate.target);
            }
        }
        for &q in &negatives {
            out.push(Gate::rx(q, PI));
        }
    }
    Ok(out)
}

pub const UNIFORM_GATE_SET: [GateKind; 4] =
    [GateKind::Rx, GateKind::Ry, GateKind::Rz, GateKind::Cx];

pub fn is_uniform(circuit: &Circuit) -> bool {
    circuit
        .gates
        .iter()
        .all(|g| UNIFORM_GATE_SET.contains(&g.kind))
}
