//! OpenQASM 2.0 emission and a reader for the same gate subset, so emitted
//! circuits can be re-loaded and verified against their source image.

use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{Circuit, Control, Gate, GateKind, Polarity};

#[derive(Debug, Error)]
pub enum QasmError {
    #[error("un-lowered multi-controlled gate {0} cannot be emitted")]
    UnloweredGate(GateKind),
    #[error("negative-controlled {0} cannot be emitted; lower the circuit first")]
    NegativeControl(GateKind),
    #[error("statement {0}: {1}")]
    Parse(usize, String),
}

/// Serialize to OpenQASM 2.0: fixed header, one statement per gate, angles
/// printed with full round-trip precision.
pub fn emit_qasm(circuit: &Circuit) -> Result<String, QasmError> {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\n");
    out.push_str("include \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", circuit.num_qubits());
    for gate in &circuit.gates {
        if gate
            .controls
            .iter()
            .any(|c| c.polarity == Polarity::Negative)
        {
            return Err(QasmError::NegativeControl(gate.kind));
        }
        let name = match gate.kind {
            GateKind::Mcx | GateKind::Mcrx | GateKind::Mcrz => {
                return Err(QasmError::UnloweredGate(gate.kind))
            }
            kind => kind.name(),
        };
        match gate.kind {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => {
                let _ = write!(out, "{name}({})", gate.angle);
            }
            _ => out.push_str(name),
        }
        out.push(' ');
        for ctrl in &gate.controls {
            let _ = write!(out, "q[{}],", ctrl.qubit);
        }
        let _ = writeln!(out, "q[{}];", gate.target);
    }
    Ok(out)
}

/// Evaluate the angle grammar used in QASM files: an optional sign, then
/// `pi` or a numeric literal, chained with `*` and `/`.
fn parse_angle(expr: &str, stmt: usize) -> Result<f64, QasmError> {
    let expr = expr.trim();
    let bad = |msg: &str| QasmError::Parse(stmt, format!("{msg} in angle '{expr}'"));
    let mut value = 1.0f64;
    let mut op = '*';
    let mut rest = expr;
    if let Some(r) = rest.strip_prefix('-') {
        value = -1.0;
        rest = r.trim_start();
    }
    loop {
        let term_end = rest.find(['*', '/']).unwrap_or(rest.len());
        let term_text = rest[..term_end].trim();
        let term = if term_text.eq_ignore_ascii_case("pi") {
            std::f64::consts::PI
        } else {
            term_text
                .parse::<f64>()
                .map_err(|_| bad("unparseable term"))?
        };
        match op {
            '*' => value *= term,
            _ => value /= term,
        }
        if term_end == rest.len() {
            return Ok(value);
        }
        op = rest.as_bytes()[term_end] as char;
        rest = rest[term_end + 1..].trim_start();
        if rest.is_empty() {
            return Err(bad("dangling operator"));
        }
    }
}

fn parse_operand(text: &str, register: &str, size: usize, stmt: usize) -> Result<usize, QasmError> {
    let text = text.trim();
    let bad = |msg: String| QasmError::Parse(stmt, msg);
    let inner = text
        .strip_prefix(register)
        .and_then(|r| r.trim_start().strip_prefix('['))
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| bad(format!("expected {register}[i], got '{text}'")))?;
    let index: usize = inner
        .trim()
        .parse()
        .map_err(|_| bad(format!("bad qubit index '{inner}'")))?;
    if index >= size {
        return Err(bad(format!(
            "qubit index {index} outside qreg of size {size}"
        )));
    }
    Ok(index)
}

/// Parse the emitted subset back into a flat circuit (all qubits reported
/// as data; callers re-partition). `creg`, `measure` and `barrier` are
/// dropped with a warning; anything else unknown is an error. The parser
/// never prunes or rewrites gates.
pub fn parse_qasm(text: &str) -> Result<(Circuit, Vec<String>), QasmError> {
    // Strip line comments, then treat ';' as the statement separator.
    let mut cleaned = String::with_capacity(text.len());
    for line in text.lines() {
        let line = match line.find("//") {
            Some(p) => &line[..p],
            None => line,
        };
        cleaned.push_str(line);
        cleaned.push('\n');
    }

    let mut register: Option<(String, usize)> = None;
    let mut gates: Vec<Gate> = Vec::new();
    let mut warnings = Vec::new();

    for (stmt_no, raw) in cleaned.split(';').enumerate() {
        let stmt = raw.trim();
        if stmt.is_empty() {
            continue;
        }
        let (head, tail) = match stmt.find(|c: char| c.is_whitespace() || c == '(') {
            Some(p) => (&stmt[..p], stmt[p..].trim_start()),
            None => (stmt, ""),
        };
        match head {
            "OPENQASM" => {
                if tail.trim() != "2.0" {
                    warnings.push(format!("version '{}' read as 2.0", tail.trim()));
                }
            }
            "include" => {}
            "qreg" => {
                if register.is_some() {
                    return Err(QasmError::Parse(
                        stmt_no,
                        "multiple qreg declarations".into(),
                    ));
                }
                let open = tail
                    .find('[')
                    .ok_or_else(|| QasmError::Parse(stmt_no, format!("malformed qreg '{tail}'")))?;
                let close = tail
                    .find(']')
                    .filter(|&c| c > open)
                    .ok_or_else(|| QasmError::Parse(stmt_no, format!("malformed qreg '{tail}'")))?;
                let name = tail[..open].trim().to_string();
                let size: usize = tail[open + 1..close]
                    .trim()
                    .parse()
                    .map_err(|_| QasmError::Parse(stmt_no, format!("bad qreg size '{tail}'")))?;
                register = Some((name, size));
            }
            "creg" | "measure" | "barrier" => {
                warnings.push(format!("ignoring '{head}' statement"));
            }
            name => {
                let (register, size) = register
                    .as_ref()
                    .map(|(n, s)| (n.clone(), *s))
                    .ok_or_else(|| QasmError::Parse(stmt_no, "gate before qreg".into()))?;
                let (angle, operands_text) = if let Some(rest) = tail.strip_prefix('(') {
                    // head was split at '(' for parameterized gates
                    let close = rest.find(')').ok_or_else(|| {
                        QasmError::Parse(stmt_no, "missing ')' after angle".into())
                    })?;
                    (
                        Some(parse_angle(&rest[..close], stmt_no)?),
                        rest[close + 1..].trim(),
                    )
                } else if let Some(open) = tail.find('(') {
                    let close = tail[open..].find(')').map(|c| c + open).ok_or_else(|| {
                        QasmError::Parse(stmt_no, "missing ')' after angle".into())
                    })?;
                    (
                        Some(parse_angle(&tail[open + 1..close], stmt_no)?),
                        tail[close + 1..].trim(),
                    )
                } else {
                    (None, tail)
                };
                let operands: Vec<usize> = operands_text
                    .split(',')
                    .map(|o| parse_operand(o, &register, size, stmt_no))
                    .collect::<Result<_, _>>()?;
                let arity_err = |want: usize| {
                    QasmError::Parse(stmt_no, format!("{name} expects {want} operands"))
                };
                let gate = match (name, angle) {
                    ("x", None) => Gate::x(*operands.first().ok_or_else(|| arity_err(1))?),
                    ("h", None) => Gate::h(*operands.first().ok_or_else(|| arity_err(1))?),
                    ("cx", None) if operands.len() == 2 => {
                        Gate::cx(Control::pos(operands[0]), operands[1])
                    }
                    ("cz", None) if operands.len() == 2 => {
                        Gate::cz(Control::pos(operands[0]), operands[1])
                    }
                    ("ccx", None) if operands.len() == 3 => Gate::toffoli(
                        Control::pos(operands[0]),
                        Control::pos(operands[1]),
                        operands[2],
                    ),
                    ("rx", Some(a)) if operands.len() == 1 => Gate::rx(operands[0], a),
                    ("ry", Some(a)) if operands.len() == 1 => Gate::ry(operands[0], a),
                    ("rz", Some(a)) if operands.len() == 1 => Gate::rz(operands[0], a),
                    _ => {
                        return Err(QasmError::Parse(
                            stmt_no,
                            format!("unsupported statement '{stmt}'"),
                        ))
                    }
                };
                gates.push(gate);
            }
        }
    }

    let size = register.map(|(_, s)| s).unwrap_or(0);
    let mut circuit = Circuit::new(0, size);
    for gate in gates {
        circuit.push(gate);
    }
    Ok((circuit, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn empty_circuit_emits_header_only() {
        let qasm = emit_qasm(&Circuit::new(2, 0)).unwrap();
        assert_eq!(qasm, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\n");
    }

    #[test]
    fn single_x_statement() {
        let mut c = Circuit::new(1, 0);
        c.push(Gate::x(0));
        let qasm = emit_qasm(&c).unwrap();
        assert!(qasm.ends_with("x q[0];\n"));
    }

    #[test]
    fn rotation_angles_round_trip_textually() {
        let mut c = Circuit::new(0, 4);
        c.push(Gate::rx(3, PI / 2.0));
        let qasm = emit_qasm(&c).unwrap();
        assert!(qasm.contains("rx(1.5707963267948966) q[3];"), "{qasm}");
    }

    #[test]
    fn unlowered_gates_are_rejected() {
        let mut c = Circuit::new(3, 1);
        c.push(Gate::mcx(
            vec![Control::pos(0), Control::pos(1), Control::pos(2)],
            3,
        ));
        assert!(matches!(
            emit_qasm(&c),
            Err(QasmError::UnloweredGate(GateKind::Mcx))
        ));
        let mut c = Circuit::new(1, 1);
        c.push(Gate::cx(Control::neg(0), 1));
        assert!(matches!(emit_qasm(&c), Err(QasmError::NegativeControl(_))));
    }

    #[test]
    fn parser_inverts_emitter() {
        let mut c = Circuit::new(1, 2);
        c.push(Gate::h(0));
        c.push(Gate::cx(Control::pos(0), 1));
        c.push(Gate::cz(Control::pos(1), 2));
        c.push(Gate::toffoli(Control::pos(0), Control::pos(1), 2));
        c.push(Gate::rz(2, -0.125));
        c.push(Gate::rx(0, 0.0));
        let qasm = emit_qasm(&c).unwrap();
        let (parsed, warnings) = parse_qasm(&qasm).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(parsed.gates, c.gates);
        assert_eq!(parsed.num_qubits(), c.num_qubits());
        // Zero-angle rotations are retained verbatim.
        assert_eq!(parsed.gates.last().unwrap().angle, 0.0);
    }

    #[test]
    fn emit_parse_emit_is_a_fixed_point() {
        let mut c = Circuit::new(2, 1);
        c.push(Gate::ry(1, 2.0 / 3.0));
        c.push(Gate::cx(Control::pos(0), 2));
        let first = emit_qasm(&c).unwrap();
        let (parsed, _) = parse_qasm(&first).unwrap();
        assert_eq!(emit_qasm(&parsed).unwrap(), first);
    }

    #[test]
    fn measure_and_creg_are_ignored_with_warnings() {
        let text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\nx q[0];\nmeasure q[0] -> c[0];\n";
        let (circuit, warnings) = parse_qasm(text).unwrap();
        assert_eq!(circuit.gates.len(), 1);
        assert_eq!(warnings.len(), 2);
    }

    #[test]
    fn unknown_statements_are_rejected() {
        let text = "OPENQASM 2.0;\nqreg q[1];\nfoo q[0];\n";
        assert!(matches!(parse_qasm(text), Err(QasmError::Parse(_, _))));
    }

    #[test]
    fn pi_expressions_evaluate() {
        let text = "OPENQASM 2.0;\nqreg q[1];\nrx(pi/2) q[0];\nrz(-pi) q[0];\nry(2*pi) q[0];\nrx(0.5) q[0];\n";
        let (circuit, _) = parse_qasm(text).unwrap();
        let angles: Vec<f64> = circuit.gates.iter().map(|g| g.angle).collect();
        assert_eq!(angles, vec![PI / 2.0, -PI, 2.0 * PI, 0.5]);
    }

    #[test]
    fn out_of_range_operand_is_an_error() {
        let text = "OPENQASM 2.0;\nqreg q[2];\nx q[5];\n";
        assert!(parse_qasm(text).is_err());
    }

    proptest! {
        #[test]
        fn random_lowered_circuits_round_trip(ops in proptest::collection::vec((0u8..8, 0usize..4, 0usize..4, -3.2f64..3.2), 0..40)) {
            let mut c = Circuit::new(0, 5);
            for (kind, a, b, angle) in ops {
                let (a, b) = if a == b { (a, a + 1) } else { (a, b) };
                let gate = match kind {
                    0 => Gate::x(a),
                    1 => Gate::h(a),
                    2 => Gate::cx(Control::pos(a), b),
                    3 => Gate::cz(Control::pos(a), b),
                    4 => {
                        let c0 = 4usize; // distinct third qubit
                        if c0 == a || c0 == b { Gate::x(a) } else { Gate::toffoli(Control::pos(a), Control::pos(b), c0) }
                    }
                    5 => Gate::rx(a, angle),
                    6 => Gate::ry(a, angle),
                    _ => Gate::rz(a, angle),
                };
                c.push(gate);
            }
            let qasm = emit_qasm(&c).unwrap();
            let (parsed, warnings) = parse_qasm(&qasm).unwrap();
            prop_assert!(warnings.is_empty());
            prop_assert_eq!(&parsed.gates, &c.gates);
            prop_assert_eq!(emit_qasm(&parsed).unwrap(), qasm);
        }
    }
}
