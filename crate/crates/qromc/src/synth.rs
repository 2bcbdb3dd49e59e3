//! QROM circuit generation: one multi-controlled gate per stored bit or
//! rotation, with control polarities spelling out each address.

use crate::circuit::{Circuit, Control, Gate};
use crate::encode::{AngleEncoding, EncodedImage};
use crate::pla::MemoryImage;

/// Controls selecting one address: positive where the address bit is 1,
/// negative where it is 0. Address bit `i` lives on qubit `i`.
pub fn address_controls(address: u64, address_bits: usize) -> Vec<Control> {
    (0..address_bits)
        .map(|bit| {
            if address >> bit & 1 == 1 {
                Control::pos(bit)
            } else {
                Control::neg(bit)
            }
        })
        .collect()
}

/// Basis-encoded QROM: a generalized-Toffoli cascade, one MCX per set bit
/// of each word, targeting one data qubit per word bit. Zero words add
/// nothing; data qubits start at |0⟩.
pub fn synth_basis(image: &MemoryImage) -> Circuit {
    let n = image.address_bits;
    let mut circuit = Circuit::new(n, image.word_bits);
    for (address, &word) in image.words.iter().enumerate() {
        for bit in 0..image.word_bits {
            if word >> bit & 1 == 1 {
                circuit.push(Gate::mcx(address_controls(address as u64, n), n + bit));
            }
        }
    }
    circuit
}

/// Positive-polarity Reed-Muller coefficients of a truth table, via the
/// in-place AND-XOR butterfly. `table[j]` is f at input j; the result's
/// bit at index `mask` is the coefficient of the monomial over `mask`.
pub fn pprm_coefficients(table: &[bool]) -> Vec<bool> {
    debug_assert!(table.len().is_power_of_two());
    let mut coef: Vec<bool> = table.to_vec();
    let mut stride = 1;
    while stride < coef.len() {
        for block in (0..coef.len()).step_by(stride * 2) {
            for j in block..block + stride {
                coef[j + stride] ^= coef[j];
            }
        }
        stride *= 2;
    }
    coef
}

/// Basis QROM through exclusive-or sum-of-products: each output bit's truth
/// table becomes its PPRM cover, each nonzero monomial one positive-control
/// MCX (the constant monomial an uncontrolled X). Functionally equal to
/// [`synth_basis`] with generally fewer and narrower gates.
pub fn synth_basis_esop(image: &MemoryImage) -> Circuit {
    let n = image.address_bits;
    let mut circuit = Circuit::new(n, image.word_bits);
    for bit in 0..image.word_bits {
        let table: Vec<bool> = image.words.iter().map(|&w| w >> bit & 1 == 1).collect();
        let coef = pprm_coefficients(&table);
        for (mask, &on) in coef.iter().enumerate() {
            if !on {
                continue;
            }
            let controls = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(Control::pos)
                .collect();
            circuit.push(Gate::mcx(controls, n + bit));
        }
    }
    circuit
}

/// The amplitude stage: MCRx(2·theta_j) per address with a nonzero theta.
/// The doubled angle makes the Rx half-angle equal the stored value, so the
/// data amplitudes carry cos(theta_j) and sin(theta_j).
pub(crate) fn rx_cascade(encoded: &EncodedImage) -> Circuit {
    let n = encoded.address_bits;
    let mut circuit = Circuit::new(n, 1);
    for (address, &theta) in encoded.theta.iter().enumerate() {
        if theta != 0.0 {
            circuit.push(Gate::mcrx(
                address_controls(address as u64, n),
                n,
                2.0 * theta,
            ));
        }
    }
    circuit
}

/// The phase stage: MCRz(phi_j) per address with a nonzero phi.
pub(crate) fn rz_cascade(encoded: &EncodedImage) -> Circuit {
    let n = encoded.address_bits;
    let mut circuit = Circuit::new(n, 1);
    for (address, &phi) in encoded.phi.iter().enumerate() {
        if phi != 0.0 {
            circuit.push(Gate::mcrz(address_controls(address as u64, n), n, phi));
        }
    }
    circuit
}

/// Angle-encoded QROM over a single data qubit. Amplitude-only storage is
/// one Rx cascade; dense storage appends the Rz cascade for the
/// phase-borne words. Stages are serial, mirroring the improved-angle
/// structure (per-address interleaving would be unitarily identical since
/// distinct address blocks commute).
pub fn synth_angle(encoded: &EncodedImage) -> Circuit {
    debug_assert!(matches!(
        encoded.encoding,
        AngleEncoding::Angle | AngleEncoding::DenseAngle
    ));
    let mut circuit = rx_cascade(encoded);
    circuit.gates.extend(rz_cascade(encoded).gates);
    circuit
}

/// Improved-angle QROM: significand cascade (Rx) then exponent cascade (Rz),
/// both on the one data qubit.
pub fn synth_improved_angle(encoded: &EncodedImage) -> Circuit {
    debug_assert!(encoded.encoding == AngleEncoding::ImprovedAngle);
    let mut circuit = rx_cascade(encoded);
    circuit.gates.extend(rz_cascade(encoded).gates);
    circuit
}
