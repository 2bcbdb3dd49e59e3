//! Berkeley `.pla` parsing and expansion into fully specified memory images.
//!
//! A `.pla` file is read as the description of an addressable memory: the
//! input plane is the address field, the output plane is the stored word.
//! Input don't-cares expand to every covered address, output don't-cares
//! read as 0 (f-type semantics), and addresses no cube covers hold word 0.

use std::fmt::Write as _;

use thiserror::Error;

/// Addresses are materialized as a full `2^n` array; this cap bounds that.
pub const MAX_ADDRESS_BITS: usize = 24;
/// Words are stored in a `u64`.
pub const MAX_WORD_BITS: usize = 63;

#[derive(Debug, Error)]
pub enum PlaError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing .i/.o directive")]
    MissingHeader,
    #[error("line {line}: cube {plane} width {got} != {want}")]
    CubeWidth {
        line: usize,
        plane: &'static str,
        got: usize,
        want: usize,
    },
    #[error("expansion conflict at address {address:0width$b}: word {existing:0wwidth$b} vs {new:0wwidth$b}",
            width = .address_bits, wwidth = .word_bits)]
    Conflict {
        address: u64,
        existing: u64,
        new: u64,
        address_bits: usize,
        word_bits: usize,
    },
    #[error("{0} address bits exceed the supported maximum of {MAX_ADDRESS_BITS}")]
    TooManyInputs(usize),
    #[error("{0} output bits exceed the supported maximum of {MAX_WORD_BITS}")]
    TooManyOutputs(usize),
}

/// One ternary literal of a cube's input plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputLit {
    Zero,
    One,
    DontCare,
}

/// A parsed `.pla` file: header fields plus cubes in file order.
///
/// Input patterns keep the file's column order: the leftmost column is the
/// most significant address bit.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaFile {
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub cubes: Vec<(Vec<InputLit>, u64)>,
    pub declared_product_count: Option<usize>,
    pub input_labels: Option<Vec<String>>,
    pub output_labels: Option<Vec<String>>,
    /// Non-fatal notes accumulated during parsing (unknown directives,
    /// product-count mismatches). The CLI forwards these to stderr.
    pub warnings: Vec<String>,
}

/// A fully expanded memory image: `2^address_bits` words of
/// `word_bits` bits each, indexed by address.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryImage {
    pub address_bits: usize,
    pub word_bits: usize,
    pub words: Vec<u64>,
}

impl MemoryImage {
    pub fn new(address_bits: usize, word_bits: usize, words: Vec<u64>) -> Self {
        assert!((1..=MAX_ADDRESS_BITS).contains(&address_bits));
        assert!((1..=MAX_WORD_BITS).contains(&word_bits));
        assert_eq!(words.len(), 1usize << address_bits);
        assert!(words
            .iter()
            .all(|&w| word_bits == 64 || w < (1u64 << word_bits)));
        MemoryImage {
            address_bits,
            word_bits,
            words,
        }
    }

    pub fn num_words(&self) -> usize {
        self.words.len()
    }
}

fn is_directive(line: &str) -> bool {
    line.starts_with('.')
}

/// Parse `.pla` text. Cubes must follow the `.i`/`.o` header; `#` starts a
/// comment; `~` and `2` are accepted as output don't-cares.
pub fn parse_pla(text: &str) -> Result<PlaFile, PlaError> {
    let mut num_inputs: Option<usize> = None;
    let mut num_outputs: Option<usize> = None;
    let mut declared_product_count = None;
    let mut input_labels = None;
    let mut output_labels = None;
    let mut cubes = Vec::new();
    let mut warnings = Vec::new();

    'lines: for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }

        if is_directive(line) {
            let mut fields = line.split_whitespace();
            let key = fields.next().unwrap();
            match key {
                ".i" | ".o" | ".p" => {
                    let value: usize = fields
                        .next()
                        .ok_or_else(|| PlaError::Parse {
                            line: line_no,
                            msg: format!("{key} requires a count"),
                        })?
                        .parse()
                        .map_err(|_| PlaError::Parse {
                            line: line_no,
                            msg: format!("bad {key} count"),
                        })?;
                    let slot = match key {
                        ".i" => &mut num_inputs,
                        ".o" => &mut num_outputs,
                        _ => &mut declared_product_count,
                    };
                    if slot.is_some() {
                        return Err(PlaError::Parse {
                            line: line_no,
                            msg: format!("duplicate {key} directive"),
                        });
                    }
                    if key != ".p" && value == 0 {
                        return Err(PlaError::Parse {
                            line: line_no,
                            msg: format!("{key} must be at least 1"),
                        });
                    }
                    *slot = Some(value);
                }
                ".ilb" => input_labels = Some(fields.map(str::to_string).collect()),
                ".ob" => output_labels = Some(fields.map(str::to_string).collect()),
                ".type" => {
                    let ty = fields.next().unwrap_or("");
                    if ty != "f" && ty != "fd" {
                        warnings.push(format!(
                            "line {line_no}: .type {ty} treated as f (on-set) semantics"
                        ));
                    }
                }
                ".e" | ".end" => break 'lines,
                _ => warnings.push(format!("line {line_no}: ignoring unknown directive {key}")),
            }
            continue;
        }

        // Cube line.
        let (n, m) = match (num_inputs, num_outputs) {
            (Some(n), Some(m)) => (n, m),
            _ => return Err(PlaError::MissingHeader),
        };
        let mut fields = line.split_whitespace();
        let in_pat = fields.next().unwrap();
        let out_pat = fields.next().ok_or_else(|| PlaError::Parse {
            line: line_no,
            msg: "cube is missing its output plane".into(),
        })?;
        if fields.next().is_some() {
            return Err(PlaError::Parse {
                line: line_no,
                msg: "cube has more than two planes".into(),
            });
        }
        if in_pat.len() != n {
            return Err(PlaError::CubeWidth {
                line: line_no,
                plane: "input",
                got: in_pat.len(),
                want: n,
            });
        }
        if out_pat.len() != m {
            return Err(PlaError::CubeWidth {
                line: line_no,
                plane: "output",
                got: out_pat.len(),
                want: m,
            });
        }

        let mut lits = Vec::with_capacity(n);
        for ch in in_pat.chars() {
            lits.push(match ch {
                '0' => InputLit::Zero,
                '1' => InputLit::One,
                '-' => InputLit::DontCare,
                other => {
                    return Err(PlaError::Parse {
                        line: line_no,
                        msg: format!("invalid input character '{other}'"),
                    })
                }
            });
        }
        // Leftmost output column is the most significant word bit; output
        // don't-cares read as 0.
        let mut word = 0u64;
        for (pos, ch) in out_pat.chars().enumerate() {
            let bit = match ch {
                '1' => 1,
                '0' | '-' | '~' | '2' => 0,
                other => {
                    return Err(PlaError::Parse {
                        line: line_no,
                        msg: format!("invalid output character '{other}'"),
                    })
                }
            };
            word |= bit << (m - 1 - pos);
        }
        cubes.push((lits, word));
    }

    let (num_inputs, num_outputs) = match (num_inputs, num_outputs) {
        (Some(n), Some(m)) => (n, m),
        _ => return Err(PlaError::MissingHeader),
    };
    if let Some(p) = declared_product_count {
        if p != cubes.len() {
            warnings.push(format!(
                ".p declares {p} cubes but {} were read",
                cubes.len()
            ));
        }
    }
    Ok(PlaFile {
        num_inputs,
        num_outputs,
        cubes,
        declared_product_count,
        input_labels,
        output_labels,
        warnings,
    })
}

/// Expand a parsed file into a completely specified image.
///
/// Every input don't-care covers both polarities; uncovered addresses hold
/// word 0. Two cubes assigning different words to one address is a hard
/// error rather than last-writer-wins.
pub fn expand(pla: &PlaFile) -> Result<MemoryImage, PlaError> {
    let n = pla.num_inputs;
    let m = pla.num_outputs;
    if n > MAX_ADDRESS_BITS {
        return Err(PlaError::TooManyInputs(n));
    }
    if m > MAX_WORD_BITS {
        return Err(PlaError::TooManyOutputs(m));
    }

    let mut words: Vec<Option<u64>> = vec![None; 1usize << n];
    for (lits, word) in &pla.cubes {
        // Pattern column p is address bit n-1-p (leftmost = MSB).
        let mut base = 0u64;
        let mut free_bits = Vec::new();
        for (pos, lit) in lits.iter().enumerate() {
            let bit = n - 1 - pos;
            match lit {
                InputLit::Zero => {}
                InputLit::One => base |= 1 << bit,
                InputLit::DontCare => free_bits.push(bit),
            }
        }
        for combo in 0u64..(1u64 << free_bits.len()) {
            let mut addr = base;
            for (i, bit) in free_bits.iter().enumerate() {
                if combo >> i & 1 == 1 {
                    addr |= 1 << bit;
                }
            }
            match words[addr as usize] {
                None => words[addr as usize] = Some(*word),
                Some(existing) if existing == *word => {}
                Some(existing) => {
                    return Err(PlaError::Conflict {
                        address: addr,
                        existing,
                        new: *word,
                        address_bits: n,
                        word_bits: m,
                    })
                }
            }
        }
    }
    let words = words.into_iter().map(|w| w.unwrap_or(0)).collect();
    Ok(MemoryImage::new(n, m, words))
}

/// Serialize an image as one fully specified cube per address. Re-parsing
/// and expanding the result reproduces the image exactly.
pub fn write_pla(image: &MemoryImage) -> String {
    let n = image.address_bits;
    let m = image.word_bits;
    let mut out = String::new();
    let _ = writeln!(out, ".i {n}");
    let _ = writeln!(out, ".o {m}");
    let _ = writeln!(out, ".p {}", image.num_words());
    for (addr, word) in image.words.iter().enumerate() {
        let mut line = String::with_capacity(n + m + 2);
        for bit in (0..n).rev() {
            line.push(if addr >> bit & 1 == 1 { '1' } else { '0' });
        }
        line.push(' ');
        for bit in (0..m).rev() {
            line.push(if word >> bit & 1 == 1 { '1' } else { '0' });
        }
        let _ = writeln!(out, "{line}");
    }
    out.push_str(".e\n");
    out
}
