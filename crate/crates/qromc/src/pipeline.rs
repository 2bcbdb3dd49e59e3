//! End-to-end compilation pipelines (encode → synthesize → optimize →
//! lower) and the simulator-backed verification behind `verify`.

use thiserror::Error;

use crate::circuit::{quantum_cost, Circuit};
use crate::encode::{
    encode_angle, encode_improved_angle, EncodeError, EncodedImage, NormalizationMode,
};
use crate::lower::{lower_uniform, LowerError};
use crate::optimize::{double_not_removal, gray_code_optimize, lower_mcx, OptimizeError};
use crate::pla::MemoryImage;
use crate::sim::{expected_data_state, qrom_state_table, SimError, MAX_SIM_QUBITS};
use crate::synth::{rx_cascade, rz_cascade, synth_basis, synth_basis_esop};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodingChoice {
    Basis,
    Angle,
    DenseAngle,
    ImprovedAngle,
}

impl EncodingChoice {
    pub fn name(self) -> &'static str {
        match self {
            EncodingChoice::Basis => "basis",
            EncodingChoice::Angle => "angle",
            EncodingChoice::DenseAngle => "dense-angle",
            EncodingChoice::ImprovedAngle => "improved-angle",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompileOptions {
    pub encoding: EncodingChoice,
    pub mode: NormalizationMode,
    /// Basis only: synthesize through the exclusive-or cover instead of one
    /// gate per stored bit.
    pub esop: bool,
    /// Improved angle only.
    pub hidden_bit: bool,
    pub optimize: bool,
    pub lower: bool,
}

impl CompileOptions {
    pub fn new(encoding: EncodingChoice) -> Self {
        CompileOptions {
            encoding,
            mode: NormalizationMode::Interp04,
            esop: false,
            hidden_bit: false,
            optimize: false,
            lower: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("invalid option combination: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error(transparent)]
    Lower(#[from] LowerError),
}

pub struct Compiled {
    pub circuit: Circuit,
    /// Pre-processing output; `None` for basis encoding.
    pub encoded: Option<EncodedImage>,
}

/// Gray-code a cascade stage when it pays: the rebuilt stage always spends
/// `2^n` entangling gates, which loses to a sparse cascade on small address
/// registers, so the cheaper circuit is kept (the rebuilt one on ties).
fn optimize_stage(stage: Circuit, encoded: &EncodedImage) -> Result<Circuit, CompileError> {
    if stage.gates.is_empty() || encoded.address_bits == 0 {
        return Ok(stage);
    }
    let rebuilt = gray_code_optimize(&stage, encoded)?;
    if quantum_cost(&rebuilt) <= quantum_cost(&stage) {
        Ok(rebuilt)
    } else {
        Ok(stage)
    }
}

/// Run the full pipeline for one image.
///
/// Basis circuits are always taken to their natural X/Toffoli/CX form
/// (wide gates AND-chained through ancilla); `optimize` then cancels
/// double NOTs. Angle-family circuits stay as rotation cascades; `optimize`
/// gray-codes each stage, and `lower` decomposes whatever multi-controlled
/// rotations remain before rewriting to {Rx, Ry, Rz, CX}.
pub fn compile(image: &MemoryImage, opts: &CompileOptions) -> Result<Compiled, CompileError> {
    if opts.esop && opts.encoding != EncodingChoice::Basis {
        return Err(CompileError::InvalidOptions(
            "--esop only applies to basis encoding".into(),
        ));
    }
    if opts.hidden_bit && opts.encoding != EncodingChoice::ImprovedAngle {
        return Err(CompileError::InvalidOptions(
            "--hidden-bit only applies to improved-angle encoding".into(),
        ));
    }

    match opts.encoding {
        EncodingChoice::Basis => {
            let synthesized = if opts.esop {
                synth_basis_esop(image)
            } else {
                synth_basis(image)
            };
            let mut circuit = lower_mcx(&synthesized);
            if opts.optimize {
                circuit = double_not_removal(&circuit);
            }
            if opts.lower {
                circuit = lower_uniform(&circuit)?;
            }
            Ok(Compiled {
                circuit,
                encoded: None,
            })
        }
        _ => {
            let encoded = match opts.encoding {
                EncodingChoice::Angle => encode_angle(image, opts.mode, false)?,
                EncodingChoice::DenseAngle => encode_angle(image, opts.mode, true)?,
                EncodingChoice::ImprovedAngle => encode_improved_angle(image, opts.hidden_bit)?,
                EncodingChoice::Basis => unreachable!(),
            };
            let mut amplitude_stage = rx_cascade(&encoded);
            let mut phase_stage = rz_cascade(&encoded);
            if opts.optimize {
                amplitude_stage = optimize_stage(amplitude_stage, &encoded)?;
                phase_stage = optimize_stage(phase_stage, &encoded)?;
            }
            let mut circuit = amplitude_stage;
            circuit.gates.extend(phase_stage.gates);
            if opts.lower {
                circuit = lower_uniform(&lower_mcx(&circuit))?;
            }
            Ok(Compiled {
                circuit,
                encoded: Some(encoded),
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum AddressSelection {
    All,
    Sample(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub tolerance: f64,
    pub addresses: AddressSelection,
    pub max_qubits: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tolerance: 1e-9,
            addresses: AddressSelection::All,
            max_qubits: MAX_SIM_QUBITS,
        }
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("circuit needs {qubits} qubits, above the verification cap of {cap}")]
    QubitCap { qubits: usize, cap: usize },
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug)]
pub struct AddressCheck {
    pub address: u64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug)]
pub struct VerifyReport {
    pub qubits: usize,
    /// Largest amplitude left on an excited ancilla.
    pub ancilla_leak: f64,
    /// Largest deviation of an address block's norm from 1.
    pub block_norm_error: f64,
    pub structure_ok: bool,
    pub checks: Vec<AddressCheck>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.structure_ok && self.checks.iter().all(|c| c.passed)
    }
}

/// Deterministic evenly spaced sample of `k` addresses.
fn sample_addresses(total: u64, k: usize) -> Vec<u64> {
    if k as u64 >= total {
        return (0..total).collect();
    }
    let mut out: Vec<u64> = (0..k as u64).map(|i| i * total / k as u64).collect();
    out.dedup();
    out
}

/// Compile and verify that every selected address generates exactly its
/// encoded data state.
pub fn verify(
    image: &MemoryImage,
    copts: &CompileOptions,
    vopts: &VerifyOptions,
) -> Result<VerifyReport, VerifyError> {
    let compiled = compile(image, copts)?;
    verify_circuit(&compiled.circuit, image, compiled.encoded.as_ref(), vopts)
}

/// Verify an already built circuit (e.g. re-read from OpenQASM) against the
/// image it claims to encode.
pub fn verify_circuit(
    circuit: &Circuit,
    image: &MemoryImage,
    encoded: Option<&EncodedImage>,
    vopts: &VerifyOptions,
) -> Result<VerifyReport, VerifyError> {
    let qubits = circuit.num_qubits();
    let cap = vopts.max_qubits.min(MAX_SIM_QUBITS);
    if qubits > cap {
        return Err(VerifyError::QubitCap { qubits, cap });
    }
    let table = qrom_state_table(circuit)?;
    let tol = vopts.tolerance;
    let structure_ok = table.ancilla_leak <= tol && table.block_norm_error <= tol;

    let total = 1u64 << circuit.num_address;
    let addresses = match vopts.addresses {
        AddressSelection::All => (0..total).collect(),
        AddressSelection::Sample(k) => sample_addresses(total, k),
    };

    let mut checks = Vec::with_capacity(addresses.len());
    for address in addresses {
        let block = &table.blocks[address as usize];
        let (passed, detail) = match encoded {
            None => {
                let word = image.words[address as usize] as usize;
                let got = block[word].norm();
                if (got - 1.0).abs() <= tol {
                    (true, format!("word {word} amplitude {got:.12}"))
                } else {
                    let (best, amp) = block
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                        .map(|(i, a)| (i, a.norm()))
                        .unwrap_or((0, 0.0));
                    (
                        false,
                        format!("expected word {word}, largest amplitude {amp:.6} at word {best}"),
                    )
                }
            }
            Some(enc) => {
                let (exp_a, exp_b) = expected_data_state(enc, address as usize);
                let (alpha, beta) = (block[0], block[1]);
                let mag_err = (alpha.norm() - exp_a.norm())
                    .abs()
                    .max((beta.norm() - exp_b.norm()).abs());
                // Amplitude-only storage leaves the qubit phase free; the
                // dense and improved encodings carry data in it.
                let phase_sensitive = !enc.phi.iter().all(|&p| p == 0.0)
                    || enc.encoding == crate::encode::AngleEncoding::ImprovedAngle;
                let fidelity_err = if phase_sensitive {
                    1.0 - (exp_a.conj() * alpha + exp_b.conj() * beta).norm()
                } else {
                    0.0
                };
                if mag_err <= tol && fidelity_err <= tol {
                    (
                        true,
                        format!("magnitude error {mag_err:.3e}, fidelity error {fidelity_err:.3e}"),
                    )
                } else {
                    (
                        false,
                        format!(
                            "magnitude error {mag_err:.3e}, fidelity error {fidelity_err:.3e} \
                             (|α|={:.6} expected {:.6}, |β|={:.6} expected {:.6})",
                            alpha.norm(),
                            exp_a.norm(),
                            beta.norm(),
                            exp_b.norm()
                        ),
                    )
                }
            }
        };
        checks.push(AddressCheck {
            address,
            passed,
            detail,
        });
    }

    Ok(VerifyReport {
        qubits,
        ancilla_leak: table.ancilla_leak,
        block_norm_error: table.block_norm_error,
        structure_ok,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::metrics;

    fn image(n: usize, m: usize, words: Vec<u64>) -> MemoryImage {
        MemoryImage::new(n, m, words)
    }

    fn opts(encoding: EncodingChoice) -> CompileOptions {
        CompileOptions::new(encoding)
    }

    #[test]
    fn invalid_flag_combinations_are_rejected() {
        let img = image(2, 4, vec![1, 2, 3, 4]);
        let mut o = opts(EncodingChoice::Angle);
        o.esop = true;
        assert!(matches!(
            compile(&img, &o),
            Err(CompileError::InvalidOptions(_))
        ));
        let mut o = opts(EncodingChoice::Basis);
        o.hidden_bit = true;
        assert!(matches!(
            compile(&img, &o),
            Err(CompileError::InvalidOptions(_))
        ));
    }

    #[test]
    fn optimized_full_density_angle_has_ladder_counts() {
        let words: Vec<u64> = (0..16).map(|j| (j % 15) + 1).collect();
        let img = image(4, 4, words);
        let mut o = opts(EncodingChoice::Angle);
        o.optimize = true;
        let compiled = compile(&img, &o).unwrap();
        let m = metrics(&compiled.circuit);
        assert_eq!(m.gate_count, 32);
        assert_eq!(m.quantum_cost, 48);
        assert_eq!(m.qubit_count, 5);
    }

    #[test]
    fn sparse_phase_stage_keeps_the_cheaper_cascade() {
        // Words all with the top bit set except one: a single nonzero
        // exponent, so the rebuilt ladder would cost more than the cascade.
        let img = image(2, 4, vec![0b1000, 0b1001, 0b0100, 0b1111]);
        let mut o = opts(EncodingChoice::ImprovedAngle);
        o.optimize = true;
        let optimized = compile(&img, &o).unwrap();
        o.optimize = false;
        let plain = compile(&img, &o).unwrap();
        assert!(quantum_cost(&optimized.circuit) <= quantum_cost(&plain.circuit));
    }

    #[test]
    fn verification_passes_across_encodings_and_flags() {
        let img = image(3, 4, vec![9, 4, 15, 1, 8, 3, 12, 6]);
        for encoding in [
            EncodingChoice::Basis,
            EncodingChoice::Angle,
            EncodingChoice::DenseAngle,
            EncodingChoice::ImprovedAngle,
        ] {
            for optimize in [false, true] {
                for lower in [false, true] {
                    let mut o = opts(encoding);
                    o.optimize = optimize;
                    o.lower = lower;
                    let report = verify(&img, &o, &VerifyOptions::default()).unwrap_or_else(|e| {
                        panic!("{encoding:?} opt={optimize} lower={lower}: {e}")
                    });
                    assert!(
                        report.all_passed(),
                        "{encoding:?} opt={optimize} lower={lower}: {:?}",
                        report.checks.iter().find(|c| !c.passed)
                    );
                }
            }
        }
    }

    #[test]
    fn corrupted_rotation_is_detected() {
        let img = image(2, 4, vec![3, 7, 11, 13]);
        let mut o = opts(EncodingChoice::Angle);
        o.optimize = true;
        let mut compiled = compile(&img, &o).unwrap();
        let idx = compiled
            .circuit
            .gates
            .iter()
            .position(|g| g.kind.is_rotation())
            .unwrap();
        compiled.circuit.gates[idx].angle += 0.1;
        let report = verify_circuit(
            &compiled.circuit,
            &img,
            compiled.encoded.as_ref(),
            &VerifyOptions::default(),
        )
        .unwrap();
        assert!(!report.all_passed());
    }

    #[test]
    fn qubit_cap_is_enforced() {
        let img = image(2, 4, vec![1, 2, 3, 4]);
        let o = opts(EncodingChoice::Basis);
        let vopts = VerifyOptions {
            max_qubits: 3,
            ..Default::default()
        };
        assert!(matches!(
            verify(&img, &o, &vopts),
            Err(VerifyError::QubitCap { .. })
        ));
    }

    #[test]
    fn address_sampling_is_deterministic_and_in_range() {
        let s = sample_addresses(100, 7);
        assert_eq!(s, sample_addresses(100, 7));
        assert!(s.len() <= 7);
        assert!(s.iter().all(|&a| a < 100));
        assert_eq!(sample_addresses(4, 10), vec![0, 1, 2, 3]);
    }

    #[test]
    fn dense_single_address_qubit_verifies() {
        // n=1 dense image: zero-width address register, bare rotations.
        let img = image(1, 4, vec![5, 9]);
        for optimize in [false, true] {
            let mut o = opts(EncodingChoice::DenseAngle);
            o.optimize = optimize;
            let report = verify(&img, &o, &VerifyOptions::default()).unwrap();
            assert!(report.all_passed());
        }
    }

    #[test]
    fn esop_pipeline_verifies() {
        let img = image(3, 3, vec![5, 0, 7, 1, 2, 6, 3, 4]);
        let mut o = opts(EncodingChoice::Basis);
        o.esop = true;
        o.optimize = true;
        o.lower = true;
        let report = verify(&img, &o, &VerifyOptions::default()).unwrap();
        assert!(report.all_passed());
    }
}
