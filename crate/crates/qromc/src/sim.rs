//! Dense statevector simulation, the correctness oracle for every synthesis
//! and optimization path, plus per-address QROM readback.
//!
//! Index convention: qubit 0 is the least significant bit of the amplitude
//! index, so a basis state factors as `address | word << n | ancilla << (n+m)`.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind, Polarity};
use crate::encode::{decode_improved_angle, AngleEncoding, EncodedImage};

/// Hard cap on simulated register size (~4M complex amplitudes).
pub const MAX_SIM_QUBITS: usize = 22;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0} qubits exceed the simulator cap of {MAX_SIM_QUBITS}")]
    TooManyQubits(usize),
    #[error("initial state norm {0} is not 1")]
    Unnormalized(f64),
    #[error("state has {got} amplitudes but the circuit needs {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("address {address}: {msg}")]
    Readback { address: u64, msg: String },
}

/// Dense complex amplitude vector over `2^q` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub num_qubits: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(num_qubits: usize) -> Self {
        Self::basis_state(num_qubits, 0)
    }

    pub fn basis_state(num_qubits: usize, index: u64) -> Self {
        let mut amps = vec![Complex64::ZERO; 1usize << num_qubits];
        amps[index as usize] = Complex64::ONE;
        StateVector { num_qubits, amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// |⟨self|other⟩|, 1 for equal states regardless of global phase.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }
}

fn gate_matrix(gate: &Gate) -> [[Complex64; 2]; 2] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match gate.kind {
        GateKind::X | GateKind::Cx | GateKind::Toffoli | GateKind::Mcx => {
            [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
        }
        GateKind::Cz => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        GateKind::H => [
            [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
        ],
        GateKind::Rx | GateKind::Mcrx => {
            let (s, co) = (gate.angle / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        GateKind::Ry => {
            let (s, co) = (gate.angle / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        GateKind::Rz | GateKind::Mcrz => {
            let (s, co) = (gate.angle / 2.0).sin_cos();
            [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]]
        }
    }
}

fn apply_gate(state: &mut StateVector, gate: &Gate) {
    let target_mask = 1u64 << gate.target;
    let mut ctrl_mask = 0u64;
    let mut ctrl_value = 0u64;
    for ctrl in &gate.controls {
        ctrl_mask |= 1 << ctrl.qubit;
        if ctrl.polarity == Polarity::Positive {
            ctrl_value |= 1 << ctrl.qubit;
        }
    }
    let dim = 1u64 << state.num_qubits;
    let free_mask = (dim - 1) & !(ctrl_mask | target_mask);
    // Walk only indices with controls satisfied and target clear,
    // enumerating the free bits by carrying through the fixed ones.
    macro_rules! for_each_pair {
        (|$i0:ident, $i1:ident| $body:expr) => {
            let mut s = 0u64;
            loop {
                let $i0 = (s | ctrl_value) as usize;
                let $i1 = (s | ctrl_value | target_mask) as usize;
                {
                    $body
                };
                s = (s | !free_mask).wrapping_add(1) & free_mask;
                if s == 0 {
                    break;
                }
            }
        };
    }
    match gate.kind {
        GateKind::X | GateKind::Cx | GateKind::Toffoli | GateKind::Mcx => {
            for_each_pair!(|i0, i1| state.amps.swap(i0, i1));
        }
        GateKind::Cz => {
            for_each_pair!(|_i0, i1| state.amps[i1] = -state.amps[i1]);
        }
        GateKind::Rz | GateKind::Mcrz => {
            let (s, c) = (gate.angle / 2.0).sin_cos();
            let d0 = Complex64::new(c, -s);
            let d1 = Complex64::new(c, s);
            for_each_pair!(|i0, i1| {
                state.amps[i0] *= d0;
                state.amps[i1] *= d1;
            });
        }
        _ => {
            let mat = gate_matrix(gate);
            for_each_pair!(|i0, i1| {
                let a0 = state.amps[i0];
                let a1 = state.amps[i1];
                state.amps[i0] = mat[0][0] * a0 + mat[0][1] * a1;
                state.amps[i1] = mat[1][0] * a0 + mat[1][1] * a1;
            });
        }
    }
}

/// Apply every gate in order. Negative controls activate on |0⟩.
pub fn simulate(circuit: &Circuit, initial: &StateVector) -> Result<StateVector, SimError> {
    let q = circuit.num_qubits();
    if q > MAX_SIM_QUBITS {
        return Err(SimError::TooManyQubits(q));
    }
    if initial.amps.len() != 1usize << q {
        return Err(SimError::DimensionMismatch {
            got: initial.amps.len(),
            want: 1 << q,
        });
    }
    let norm = initial.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(SimError::Unnormalized(norm));
    }
    let mut state = initial.clone();
    for gate in &circuit.gates {
        apply_gate(&mut state, gate);
    }
    Ok(state)
}

/// Run a circuit from |0…0⟩ with the address register prepared to
/// `address` by X gates.
pub fn run_on_address(circuit: &Circuit, address: u64) -> Result<StateVector, SimError> {
    let q = circuit.num_qubits();
    if q > MAX_SIM_QUBITS {
        return Err(SimError::TooManyQubits(q));
    }
    let mut state = StateVector::basis_state(q, address);
    for gate in &circuit.gates {
        apply_gate(&mut state, gate);
    }
    Ok(state)
}

/// The data-register state conditioned on one prepared address, after
/// checking that nothing leaked outside the `(address, *, ancilla=0)` block.
pub struct AddressSlice {
    /// `2^num_data` amplitudes of the data register.
    pub data: Vec<Complex64>,
    /// Largest amplitude magnitude found outside the block.
    pub leak: f64,
}

pub fn extract_address_slice(state: &StateVector, circuit: &Circuit, address: u64) -> AddressSlice {
    let n = circuit.num_address;
    let d = circuit.num_data;
    let addr_mask = (1u64 << n) - 1;
    let data_shift = n;
    let mut data = vec![Complex64::ZERO; 1usize << d];
    let mut leak = 0.0f64;
    for (idx, amp) in state.amps.iter().enumerate() {
        let idx = idx as u64;
        let in_block = idx & addr_mask == address && idx >> (n + d) == 0;
        if in_block {
            data[(idx >> data_shift) as usize] = *amp;
        } else {
            leak = leak.max(amp.norm());
        }
    }
    AddressSlice { data, leak }
}

/// What a single-address readback produced, beyond pass/fail.
#[derive(Debug, Clone)]
pub enum Readback {
    Basis {
        word: u64,
    },
    AngleFamily {
        alpha: Complex64,
        beta: Complex64,
        /// atan2(|β|, |α|) reference angle.
        theta_hat: f64,
        /// Decoded memory value (improved angle only; None when the stored
        /// significand is 0 and the exponent phase is unobservable).
        decoded: Option<f64>,
    },
}

/// Expected data-qubit state for one address of an angle-family QROM:
/// Rz(phi)·Rx(2·theta)|0⟩, with the Rz omitted for amplitude-only storage.
pub fn expected_data_state(encoded: &EncodedImage, address: usize) -> (Complex64, Complex64) {
    let theta = encoded.theta[address];
    let alpha = Complex64::new(theta.cos(), 0.0);
    let beta = Complex64::new(0.0, -theta.sin());
    match encoded.encoding {
        AngleEncoding::Angle => (alpha, beta),
        AngleEncoding::DenseAngle | AngleEncoding::ImprovedAngle => {
            let half = encoded.phi[address] / 2.0;
            let rz0 = Complex64::from_polar(1.0, -half);
            let rz1 = Complex64::from_polar(1.0, half);
            (alpha * rz0, beta * rz1)
        }
    }
}

/// Prepare |address⟩, run the QROM, and decode the data register.
///
/// Basis readback demands a single unit-magnitude amplitude and returns the
/// word. Angle-family readback returns the conditioned (α, β) pair plus, for
/// improved angle, the value recovered via the exponent grid; the expected
/// encoding disambiguates the quadrant that magnitudes alone cannot.
pub fn readback(
    circuit: &Circuit,
    address: u64,
    encoded: Option<&EncodedImage>,
    tolerance: f64,
) -> Result<Readback, SimError> {
    let state = run_on_address(circuit, address)?;
    let slice = extract_address_slice(&state, circuit, address);
    let fail = |msg: String| SimError::Readback { address, msg };
    if slice.leak > tolerance {
        return Err(fail(format!(
            "amplitude {:.3e} leaked outside the prepared address block (address register \
             entangled or ancilla not restored)",
            slice.leak
        )));
    }

    match encoded {
        None => {
            // Basis: exactly one basis amplitude of magnitude 1.
            let mut word = None;
            for (w, amp) in slice.data.iter().enumerate() {
                if amp.norm() > tolerance {
                    if word.is_some() {
                        return Err(fail("data register is in superposition".into()));
                    }
                    if (amp.norm() - 1.0).abs() > tolerance {
                        return Err(fail(format!(
                            "data amplitude magnitude {} is not 1",
                            amp.norm()
                        )));
                    }
                    word = Some(w as u64);
                }
            }
            Ok(Readback::Basis {
                word: word.unwrap_or(0),
            })
        }
        Some(enc) => {
            let alpha = slice.data[0];
            let beta = slice.data[1];
            let theta_hat = beta.norm().atan2(alpha.norm());
            let decoded = if enc.encoding == AngleEncoding::ImprovedAngle {
                decode_measurement(enc, address as usize, alpha, beta)
            } else {
                None
            };
            Ok(Readback::AngleFamily {
                alpha,
                beta,
                theta_hat,
                decoded,
            })
        }
    }
}

/// Recover the stored value from measured amplitudes. The reference angle
/// atan2(|β|, |α|) folds all quadrants together and the Rx-induced −π/2 on
/// arg(β/α) picks up an extra π wherever tan(S) < 0, so the expected
/// encoding resolves both branches; the measured magnitudes and phase still
/// carry all of the data.
fn decode_measurement(
    enc: &EncodedImage,
    address: usize,
    alpha: Complex64,
    beta: Complex64,
) -> Option<f64> {
    use std::f64::consts::{FRAC_PI_2, PI, TAU};
    let s_expected = enc.theta[address];
    if s_expected == 0.0 {
        // No rotation fired; with a hidden bit the exponent phase is
        // unobservable, otherwise the value is plainly zero.
        return if enc.hidden_bit { None } else { Some(0.0) };
    }
    let reference = beta.norm().atan2(alpha.norm());
    let (sin_e, cos_e) = s_expected.sin_cos();
    let s_hat = match (cos_e >= 0.0, sin_e >= 0.0) {
        (true, true) => reference,
        (false, true) => PI - reference,
        (false, false) => PI + reference,
        (true, false) => TAU - reference,
    };
    let mut e_hat = (beta / alpha).arg() + FRAC_PI_2;
    if sin_e * cos_e < 0.0 {
        e_hat -= PI;
    }
    e_hat = e_hat.rem_euclid(TAU);
    Some(decode_improved_angle(
        s_hat,
        e_hat,
        enc.max_leading_zeros,
        enc.hidden_bit,
    ))
}

/// Per-address data-register states of a QROM, read off one simulation.
///
/// The circuit runs once on a uniform superposition of all addresses (data
/// and ancilla at |0⟩); linearity makes block `j` of the result exactly the
/// state the circuit prepares for address `j`, so this replaces `2^n`
/// single-address runs.
pub struct QromStateTable {
    /// `blocks[j]` holds the `2^num_data` data amplitudes for address `j`,
    /// rescaled to unit norm.
    pub blocks: Vec<Vec<Complex64>>,
    /// Largest amplitude magnitude found on a nonzero ancilla index.
    pub ancilla_leak: f64,
    /// Largest deviation of a block's norm from 1; nonzero means the
    /// circuit moved weight between address blocks.
    pub block_norm_error: f64,
}

pub fn qrom_state_table(circuit: &Circuit) -> Result<QromStateTable, SimError> {
    let q = circuit.num_qubits();
    if q > MAX_SIM_QUBITS {
        return Err(SimError::TooManyQubits(q));
    }
    let n = circuit.num_address;
    let d = circuit.num_data;
    let addresses = 1usize << n;
    let scale = (addresses as f64).sqrt().recip();
    let mut state = StateVector {
        num_qubits: q,
        amps: vec![Complex64::ZERO; 1usize << q],
    };
    for addr in 0..addresses {
        state.amps[addr] = Complex64::new(scale, 0.0);
    }
    for gate in &circuit.gates {
        apply_gate(&mut state, gate);
    }

    let mut ancilla_leak = 0.0f64;
    let mut blocks = vec![vec![Complex64::ZERO; 1usize << d]; addresses];
    for (idx, amp) in state.amps.iter().enumerate() {
        if idx >> (n + d) != 0 {
            ancilla_leak = ancilla_leak.max(amp.norm());
        } else {
            blocks[idx & (addresses - 1)][idx >> n] = *amp / scale;
        }
    }
    let mut block_norm_error = 0.0f64;
    for block in &blocks {
        let norm = block.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        block_norm_error = block_norm_error.max((norm - 1.0).abs());
    }
    Ok(QromStateTable {
        blocks,
        ancilla_leak,
        block_norm_error,
    })
}

/// Check that two QROM circuits generate the same state at every address,
/// up to one global phase shared by the whole table. Register widths may
/// differ only in the ancilla block.
pub fn equivalent_qroms(a: &Circuit, b: &Circuit, tolerance: f64) -> Result<(), String> {
    if (a.num_address, a.num_data) != (b.num_address, b.num_data) {
        return Err(format!(
            "address/data layouts differ: {}+{} vs {}+{}",
            a.num_address, a.num_data, b.num_address, b.num_data
        ));
    }
    let ta = qrom_state_table(a).map_err(|e| e.to_string())?;
    let tb = qrom_state_table(b).map_err(|e| e.to_string())?;
    for (name, t) in [("left", &ta), ("right", &tb)] {
        if t.ancilla_leak > tolerance {
            return Err(format!(
                "{name} circuit leaves ancilla excited ({:.3e})",
                t.ancilla_leak
            ));
        }
        if t.block_norm_error > tolerance {
            return Err(format!(
                "{name} circuit entangles address blocks (norm error {:.3e})",
                t.block_norm_error
            ));
        }
    }

    // Fix the single relative phase at the largest amplitude.
    let mut phase = Complex64::ONE;
    let mut best = 0.0;
    for (ba, bb) in ta.blocks.iter().zip(&tb.blocks) {
        for (x, y) in ba.iter().zip(bb) {
            if x.norm() > best && y.norm() > tolerance {
                best = x.norm();
                phase = y / x;
            }
        }
    }
    if best > 0.0 {
        phase /= phase.norm();
    }
    for (addr, (ba, bb)) in ta.blocks.iter().zip(&tb.blocks).enumerate() {
        for (idx, (x, y)) in ba.iter().zip(bb).enumerate() {
            let err = (phase * x - y).norm();
            if err > tolerance {
                return Err(format!(
                    "address {addr}, data index {idx}: amplitudes differ by {err:.3e}"
                ));
            }
        }
    }
    Ok(())
}

/// Exact inverse of a circuit: gates reversed, rotation angles negated.
pub fn inverse(circuit: &Circuit) -> Circuit {
    let mut inv = circuit.clone();
    inv.gates.reverse();
    for g in &mut inv.gates {
        if g.kind.is_rotation() {
            g.angle = -g.angle;
        }
    }
    inv
}
