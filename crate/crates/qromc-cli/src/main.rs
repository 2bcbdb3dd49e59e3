//! Command-line driver: compile `.pla` memory images to QROM circuits,
//! verify them address by address on the statevector simulator, and collect
//! metrics over benchmark directories.
//!
//! Exit codes: 0 success, 1 input/data error, 2 invalid flag combination or
//! verification qubit cap, 3 verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qromc::pipeline::{CompileError, VerifyError};
use qromc::{
    compile, emit_qasm, expand, metrics, parse_pla, parse_qasm, verify_circuit, AddressSelection,
    Circuit, CompileOptions, EncodingChoice, MemoryImage, Metrics, NormalizationMode,
    VerifyOptions,
};

const EXIT_INPUT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qromc",
    version,
    about = "Compile classical memory images into QROM state-generation circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile one image and optionally emit OpenQASM and JSON reports
    Compile(CompileArgs),
    /// Compile (or load) a circuit and check every address against the image
    Verify(VerifyArgs),
    /// Compile every .pla file in a directory and write a metrics CSV
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EncodingArg {
    Basis,
    Angle,
    DenseAngle,
    ImprovedAngle,
}

impl From<EncodingArg> for EncodingChoice {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::Basis => EncodingChoice::Basis,
            EncodingArg::Angle => EncodingChoice::Angle,
            EncodingArg::DenseAngle => EncodingChoice::DenseAngle,
            EncodingArg::ImprovedAngle => EncodingChoice::ImprovedAngle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    Interp01,
    Interp04,
    #[value(name = "scale-2pi")]
    Scale2Pi,
    GlobalMax,
    Signed,
}

impl NormalizationArg {
    fn mode(self) -> NormalizationMode {
        match self {
            NormalizationArg::Interp01 => NormalizationMode::Interp01,
            NormalizationArg::Interp04 => NormalizationMode::Interp04,
            NormalizationArg::Scale2Pi => NormalizationMode::Scale2Pi,
            NormalizationArg::GlobalMax => NormalizationMode::GlobalMax,
            NormalizationArg::Signed => NormalizationMode::Signed,
        }
    }

    fn name(self) -> &'static str {
        match self {
            NormalizationArg::Interp01 => "interp01",
            NormalizationArg::Interp04 => "interp04",
            NormalizationArg::Scale2Pi => "scale-2pi",
            NormalizationArg::GlobalMax => "global-max",
            NormalizationArg::Signed => "signed",
        }
    }
}

#[derive(Args)]
struct PipelineArgs {
    /// Input memory image (.pla)
    input: PathBuf,
    /// Data encoding for the stored words
    #[arg(long, value_enum)]
    encoding: EncodingArg,
    /// Word interpretation/normalization (angle-family encodings)
    #[arg(long, value_enum, default_value = "interp04")]
    normalization: NormalizationArg,
    /// Drop the implied leading significand bit for one extra bit of
    /// precision (improved-angle only)
    #[arg(long)]
    hidden_bit: bool,
    /// Synthesize the basis circuit from the exclusive-or cover
    #[arg(long)]
    esop: bool,
    /// Apply encoding-specific optimization (gray-code rebuilding for the
    /// angle family, double-NOT removal for basis)
    #[arg(long)]
    optimize: bool,
    /// Lower to the uniform {rx, ry, rz, cx} gate set
    #[arg(long)]
    lower: bool,
}

impl PipelineArgs {
    fn options(&self) -> CompileOptions {
        CompileOptions {
            encoding: self.encoding.into(),
            mode: self.normalization.mode(),
            esop: self.esop,
            hidden_bit: self.hidden_bit,
            optimize: self.optimize,
            lower: self.lower,
        }
    }
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Write the circuit as OpenQASM 2.0
    #[arg(long, value_name = "PATH")]
    emit_qasm: Option<PathBuf>,
    /// Write circuit metrics as JSON
    #[arg(long, value_name = "PATH")]
    metrics_json: Option<PathBuf>,
    /// Write decode metadata (normalization factors, exponent grid) as JSON
    #[arg(long, value_name = "PATH")]
    metadata_json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Per-address amplitude tolerance
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Addresses to check: "all" or "sample:<k>" (default: all while the
    /// image holds at most 4096 words)
    #[arg(long)]
    addresses: Option<String>,
    /// Refuse to simulate circuits above this register size
    #[arg(long, default_value_t = 22)]
    max_qubits: usize,
    /// Verify this OpenQASM file instead of the freshly compiled circuit
    #[arg(long, value_name = "PATH")]
    qasm: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of .pla files
    dir: PathBuf,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Compile(args) => cmd_compile(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match code {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    code
}

fn load_image(path: &Path) -> Result<MemoryImage, u8> {
    let text = fs::read_to_string(path)
        .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    let pla = parse_pla(&text).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    for warning in &pla.warnings {
        eprintln!("warning: {}: {warning}", path.display());
    }
    expand(&pla).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn compile_image(image: &MemoryImage, opts: &CompileOptions) -> Result<qromc::Compiled, u8> {
    compile(image, opts).map_err(|e| match e {
        CompileError::InvalidOptions(_) => fail(EXIT_USAGE, e),
        _ => fail(EXIT_INPUT, e),
    })
}

fn metrics_report(image: &MemoryImage, opts: &CompileOptions, m: &Metrics) -> serde_json::Value {
    serde_json::json!({
        "encoding": opts.encoding.name(),
        "optimized": opts.optimize,
        "lowered": opts.lower,
        "inputs": image.address_bits,
        "outputs": image.word_bits,
        "qubits": m.qubit_count,
        "gate_count": m.gate_count,
        "quantum_cost": m.quantum_cost,
        "quantum_depth": m.quantum_depth,
        "gate_histogram": m.gate_histogram,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), u8> {
    fs::write(path, text).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn cmd_compile(args: &CompileArgs) -> Result<(), u8> {
    let opts = args.pipeline.options();
    let image = load_image(&args.pipeline.input)?;
    let compiled = compile_image(&image, &opts)?;
    let m = metrics(&compiled.circuit);

    if let Some(path) = &args.metrics_json {
        let report = metrics_report(&image, &opts, &m);
        write_text(
            path,
            &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()),
        )?;
    }
    if let Some(path) = &args.metadata_json {
        let enc = compiled.encoded.as_ref().ok_or_else(|| {
            fail(
                EXIT_USAGE,
                "--metadata-json requires an angle-family encoding",
            )
        })?;
        let report = serde_json::json!({
            "encoding": opts.encoding.name(),
            "mode": args.pipeline.normalization.name(),
            "z_max": enc.max_leading_zeros,
            "hidden_bit": enc.hidden_bit,
            "f_norm": enc.norm_factor,
            "v_max": enc.max_word,
            "address_bits": enc.address_bits,
            "word_bits": enc.word_bits,
        });
        write_text(
            path,
            &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()),
        )?;
    }
    if let Some(path) = &args.emit_qasm {
        let qasm = emit_qasm(&compiled.circuit)
            .map_err(|e| fail(EXIT_USAGE, format!("{e}; recompile with --lower")))?;
        write_text(path, &qasm)?;
    }

    println!(
        "compiled {}: encoding={} qubits={} gates={} cost={} depth={}",
        args.pipeline.input.display(),
        opts.encoding.name(),
        m.qubit_count,
        m.gate_count,
        m.quantum_cost,
        m.quantum_depth
    );
    Ok(())
}

fn parse_address_selection(text: &str) -> Result<AddressSelection, u8> {
    if text == "all" {
        return Ok(AddressSelection::All);
    }
    if let Some(k) = text.strip_prefix("sample:") {
        let k: usize = k.parse().map_err(|_| {
            fail(
                EXIT_USAGE,
                format!("bad sample count in --addresses {text}"),
            )
        })?;
        return Ok(AddressSelection::Sample(k));
    }
    Err(fail(
        EXIT_USAGE,
        format!("--addresses must be 'all' or 'sample:<k>', got '{text}'"),
    ))
}

/// Re-partition a flat parsed register into the layout the image implies.
fn partition_external(
    circuit: Circuit,
    image: &MemoryImage,
    encoding: EncodingChoice,
) -> Result<Circuit, u8> {
    let (addr, data) = match encoding {
        EncodingChoice::Basis => (image.address_bits, image.word_bits),
        EncodingChoice::Angle | EncodingChoice::ImprovedAngle => (image.address_bits, 1),
        EncodingChoice::DenseAngle => (image.address_bits - 1, 1),
    };
    let total = circuit.num_qubits();
    if total < addr + data {
        return Err(fail(
            EXIT_INPUT,
            format!(
                "circuit has {total} qubits but the image needs at least {}",
                addr + data
            ),
        ));
    }
    Ok(Circuit {
        num_address: addr,
        num_data: data,
        num_ancilla: total - addr - data,
        gates: circuit.gates,
    })
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), u8> {
    let opts = args.pipeline.options();
    let image = load_image(&args.pipeline.input)?;
    let compiled = compile_image(&image, &opts)?;

    let circuit = match &args.qasm {
        None => compiled.circuit,
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
            let (flat, warnings) = parse_qasm(&text)
                .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
            for warning in warnings {
                eprintln!("warning: {}: {warning}", path.display());
            }
            partition_external(flat, &image, opts.encoding)?
        }
    };

    let addresses = match &args.addresses {
        Some(text) => parse_address_selection(text)?,
        None => {
            if 1u64 << circuit.num_address <= 4096 {
                AddressSelection::All
            } else {
                AddressSelection::Sample(4096)
            }
        }
    };
    let vopts = VerifyOptions {
        tolerance: args.tolerance,
        addresses,
        max_qubits: args.max_qubits,
    };

    let report = verify_circuit(&circuit, &image, compiled.encoded.as_ref(), &vopts).map_err(
        |e| match e {
            VerifyError::QubitCap { .. } => fail(EXIT_USAGE, e),
            _ => fail(EXIT_INPUT, e),
        },
    )?;

    let width = circuit.num_address.max(1).div_ceil(4) + 2;
    for check in &report.checks {
        println!(
            "address {:#0width$x}  {}  {}",
            check.address,
            if check.passed { "PASS" } else { "FAIL" },
            check.detail,
            width = width,
        );
    }
    if !report.structure_ok {
        println!(
            "structure FAIL  ancilla leak {:.3e}, block norm error {:.3e}",
            report.ancilla_leak, report.block_norm_error
        );
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    println!(
        "verified {} addresses on {} qubits: {} failed",
        report.checks.len(),
        report.qubits,
        failed
    );
    if report.all_passed() {
        Ok(())
    } else {
        Err(EXIT_VERIFY)
    }
}

fn csv_row(
    file: &str,
    encoding: &str,
    optimized: bool,
    gate_set: &str,
    body: Result<(usize, usize, Metrics), String>,
) -> String {
    match body {
        Ok((inputs, outputs, m)) => format!(
            "{file},{encoding},{optimized},{gate_set},{inputs},{outputs},{},{},{},{},ok",
            m.qubit_count, m.gate_count, m.quantum_cost, m.quantum_depth
        ),
        Err(msg) => {
            let msg = msg.replace(',', ";");
            format!("{file},{encoding},{optimized},{gate_set},,,,,,,ERROR: {msg}")
        }
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<(), u8> {
    let mut files: Vec<PathBuf> = fs::read_dir(&args.dir)
        .map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", args.dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "pla"))
        .collect();
    files.sort();

    let mut out = String::from(
        "file,encoding,optimized,gate_set,inputs,outputs,qubits,gate_count,quantum_cost,quantum_depth,status\n",
    );
    for path in &files {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let image = fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|text| parse_pla(&text).map_err(|e| e.to_string()))
            .and_then(|pla| expand(&pla).map_err(|e| e.to_string()));
        let image = match image {
            Ok(image) => image,
            Err(msg) => {
                out.push_str(&csv_row(&name, "", false, "", Err(msg)));
                out.push('\n');
                continue;
            }
        };
        for encoding in [
            EncodingChoice::Basis,
            EncodingChoice::Angle,
            EncodingChoice::ImprovedAngle,
        ] {
            for optimized in [false, true] {
                for (gate_set, lower) in [("natural", false), ("lowered", true)] {
                    let opts = CompileOptions {
                        encoding,
                        mode: NormalizationMode::Interp04,
                        esop: false,
                        hidden_bit: false,
                        optimize: optimized,
                        lower,
                    };
                    let body = compile(&image, &opts)
                        .map(|c| (image.address_bits, image.word_bits, metrics(&c.circuit)))
                        .map_err(|e| e.to_string());
                    out.push_str(&csv_row(&name, encoding.name(), optimized, gate_set, body));
                    out.push('\n');
                }
            }
        }
    }
    write_text(&args.out, &out)?;
    println!("wrote {} ({} files)", args.out.display(), files.len());
    Ok(())
}
