//! Gate-list circuit IR with polarity-annotated controls, plus the cost,
//! depth and histogram metrics used throughout the compiler.
//!
//! Negative controls (activated by |0⟩) are first-class here; they are only
//! materialized as X-control-X sandwiches at MCX-lowering time so that the
//! double-NOT removal pass has a single place to work on real X pairs.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("cannot compose circuits: register layouts differ ({0} vs {1})")]
    RegisterMismatch(String, String),
}

/// Control activation polarity. Negative controls fire on |0⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn pos(qubit: usize) -> Self {
        Control {
            qubit,
            polarity: Polarity::Positive,
        }
    }

    pub fn neg(qubit: usize) -> Self {
        Control {
            qubit,
            polarity: Polarity::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateKind {
    X,
    H,
    Cx,
    Cz,
    Toffoli,
    Mcx,
    Rx,
    Ry,
    Rz,
    Mcrx,
    Mcrz,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(
            self,
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Mcrx | GateKind::Mcrz
        )
    }

    /// Lowercase mnemonic, matching OpenQASM names where one exists.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::H => "h",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Toffoli => "ccx",
            GateKind::Mcx => "mcx",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Mcrx => "mcrx",
            GateKind::Mcrz => "mcrz",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single gate: kind, polarity-annotated controls, one target, and a
/// rotation angle (ignored for non-rotation kinds).
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub controls: Vec<Control>,
    pub target: usize,
    pub angle: f64,
}

impl Gate {
    fn new(kind: GateKind, controls: Vec<Control>, target: usize, angle: f64) -> Self {
        debug_assert!(
            controls.iter().all(|c| c.qubit != target),
            "controls and target must be disjoint"
        );
        Gate {
            kind,
            controls,
            target,
            angle,
        }
    }

    pub fn x(target: usize) -> Self {
        Gate::new(GateKind::X, vec![], target, 0.0)
    }

    pub fn h(target: usize) -> Self {
        Gate::new(GateKind::H, vec![], target, 0.0)
    }

    pub fn cx(control: Control, target: usize) -> Self {
        Gate::new(GateKind::Cx, vec![control], target, 0.0)
    }

    pub fn cz(control: Control, target: usize) -> Self {
        Gate::new(GateKind::Cz, vec![control], target, 0.0)
    }

    pub fn toffoli(c0: Control, c1: Control, target: usize) -> Self {
        Gate::new(GateKind::Toffoli, vec![c0, c1], target, 0.0)
    }

    /// Multi-controlled X. Degenerates to X/CX/Toffoli for small control sets.
    pub fn mcx(controls: Vec<Control>, target: usize) -> Self {
        match controls.len() {
            0 => Gate::x(target),
            1 => Gate::cx(controls[0], target),
            2 => Gate::toffoli(controls[0], controls[1], target),
            _ => Gate::new(GateKind::Mcx, controls, target, 0.0),
        }
    }

    pub fn rx(target: usize, angle: f64) -> Self {
        Gate::new(GateKind::Rx, vec![], target, angle)
    }

    pub fn ry(target: usize, angle: f64) -> Self {
        Gate::new(GateKind::Ry, vec![], target, angle)
    }

    pub fn rz(target: usize, angle: f64) -> Self {
        Gate::new(GateKind::Rz, vec![], target, angle)
    }

    /// Multi-controlled Rx; an empty control set is a plain Rx.
    pub fn mcrx(controls: Vec<Control>, target: usize, angle: f64) -> Self {
        if controls.is_empty() {
            Gate::rx(target, angle)
        } else {
            Gate::new(GateKind::Mcrx, controls, target, angle)
        }
    }

    /// Multi-controlled Rz; an empty control set is a plain Rz.
    pub fn mcrz(controls: Vec<Control>, target: usize, angle: f64) -> Self {
        if controls.is_empty() {
            Gate::rz(target, angle)
        } else {
            Gate::new(GateKind::Mcrz, controls, target, angle)
        }
    }

    /// Qubits acted upon: controls plus the target.
    pub fn arity(&self) -> usize {
        self.controls.len() + 1
    }

    pub fn touches(&self, qubit: usize) -> bool {
        self.target == qubit || self.controls.iter().any(|c| c.qubit == qubit)
    }

    pub fn max_qubit(&self) -> usize {
        self.controls
            .iter()
            .map(|c| c.qubit)
            .fold(self.target, usize::max)
    }
}

/// An ordered gate list over a register partitioned into address, data and
/// ancilla blocks (in that index order).
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_address: usize,
    pub num_data: usize,
    pub num_ancilla: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_address: usize, num_data: usize) -> Self {
        Circuit {
            num_address,
            num_data,
            num_ancilla: 0,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_address + self.num_data + self.num_ancilla
    }

    pub fn address_qubits(&self) -> std::ops::Range<usize> {
        0..self.num_address
    }

    pub fn data_qubits(&self) -> std::ops::Range<usize> {
        self.num_address..self.num_address + self.num_data
    }

    pub fn ancilla_qubits(&self) -> std::ops::Range<usize> {
        self.num_address + self.num_data..self.num_qubits()
    }

    pub fn push(&mut self, gate: Gate) {
        debug_assert!(
            gate.max_qubit() < self.num_qubits(),
            "gate index out of register"
        );
        self.gates.push(gate);
    }

    fn layout_desc(&self) -> String {
        format!(
            "{}+{}+{}",
            self.num_address, self.num_data, self.num_ancilla
        )
    }

    /// Histogram of gate kinds, keyed by mnemonic.
    pub fn histogram(&self) -> BTreeMap<String, usize> {
        let mut hist = BTreeMap::new();
        for g in &self.gates {
            *hist.entry(g.kind.name().to_string()).or_insert(0) += 1;
        }
        hist
    }
}

/// Sum over gates of the number of qubits each acts on (controls included).
/// Negative controls cost the same as positive ones; their X sandwiches are
/// only counted once materialized by lowering.
pub fn quantum_cost(circuit: &Circuit) -> usize {
    circuit.gates.iter().map(Gate::arity).sum()
}

/// Critical-path length under greedy layering: each gate lands on layer
/// 1 + max(layer of the last gate touching any of its qubits, controls
/// included). Empty circuit has depth 0.
pub fn quantum_depth(circuit: &Circuit) -> usize {
    let mut layer = vec![0usize; circuit.num_qubits()];
    let mut depth = 0;
    for g in &circuit.gates {
        let mut at = layer[g.target];
        for c in &g.controls {
            at = at.max(layer[c.qubit]);
        }
        let at = at + 1;
        layer[g.target] = at;
        for c in &g.controls {
            layer[c.qubit] = at;
        }
        depth = depth.max(at);
    }
    depth
}

/// Concatenate two circuits over identical registers.
pub fn compose(a: &Circuit, b: &Circuit) -> Result<Circuit, CircuitError> {
    if (a.num_address, a.num_data, a.num_ancilla) != (b.num_address, b.num_data, b.num_ancilla) {
        return Err(CircuitError::RegisterMismatch(
            a.layout_desc(),
            b.layout_desc(),
        ));
    }
    let mut out = a.clone();
    out.gates.extend(b.gates.iter().cloned());
    Ok(out)
}

/// Circuit metrics bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub gate_count: usize,
    pub quantum_cost: usize,
    pub quantum_depth: usize,
    pub qubit_count: usize,
    pub gate_histogram: BTreeMap<String, usize>,
}

pub fn metrics(circuit: &Circuit) -> Metrics {
    Metrics {
        gate_count: circuit.gates.len(),
        quantum_cost: quantum_cost(circuit),
        quantum_depth: quantum_depth(circuit),
        qubit_count: circuit.num_qubits(),
        gate_histogram: circuit.histogram(),
    }
}
