//! qromc: a compiler from classical memory images (`.pla` files) to
//! addressable quantum read-only-memory state-generation circuits.
//!
//! The pipeline parses and expands a two-level cover into a complete
//! address → word map, pre-processes words into rotation parameters for the
//! chosen encoding (basis, angle, dense angle, or improved angle), emits a
//! multi-controlled gate cascade, applies encoding-specific optimization
//! (double-NOT removal, gray-code rebuilding of uniformly controlled
//! rotations), optionally lowers to {Rx, Ry, Rz, CX}, and can emit OpenQASM
//! 2.0. A dense statevector simulator verifies that every address generates
//! exactly its encoded data state.

pub mod circuit;
pub mod encode;
pub mod lower;
pub mod optimize;
pub mod pipeline;
pub mod pla;
pub mod qasm;
pub mod sim;
pub mod synth;

pub use circuit::{
    metrics, quantum_cost, quantum_depth, Circuit, Control, Gate, GateKind, Metrics,
};
pub use encode::{
    decode_improved_angle, encode_angle, encode_improved_angle, interpret_fixed_point,
    AngleEncoding, EncodedImage, NormalizationMode,
};
pub use lower::{is_uniform, lower_uniform};
pub use optimize::{
    control_ladder, double_not_removal, gray_code_optimize, graycode_transform, lower_mcx,
};
pub use pipeline::{
    compile, verify, verify_circuit, AddressSelection, CompileOptions, Compiled, EncodingChoice,
    VerifyOptions, VerifyReport,
};
pub use pla::{expand, parse_pla, write_pla, MemoryImage, PlaFile};
pub use qasm::{emit_qasm, parse_qasm};
pub use sim::{
    equivalent_qroms, qrom_state_table, readback, run_on_address, simulate, Readback, StateVector,
};
pub use synth::{synth_angle, synth_basis, synth_basis_esop, synth_improved_angle};
