//! Memory-image pre-processing for the angle-family encodings: fixed-point
//! interpretation, global-max normalization, signed ranges, and the
//! significand/exponent split with leading-zero extraction and optional
//! hidden bit.
//!
//! All shift/scale arithmetic is over powers of two, so encode/decode
//! round-trips are exact in binary floating point for word widths that fit
//! the f64 mantissa.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

use crate::pla::MemoryImage;

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("mode {mode:?} needs two integer bits but the word width is {word_bits}")]
    WordTooNarrow {
        mode: NormalizationMode,
        word_bits: usize,
    },
    #[error("improved angle encoding needs a word width of at least 2, got {0}")]
    ImprovedWordTooNarrow(usize),
    #[error("global-max normalization is undefined for an all-zero image")]
    AllZeroImage,
    #[error("global-max scaling is image-level; interpret_fixed_point does not take it")]
    NotPerWord,
}

/// How raw words become reals in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationMode {
    /// `0.b…b` form, values in `[0, 1)`.
    Interp01,
    /// `b b . b…b` form, values in `[0, 4)`. The default: no normalization
    /// pass and more of the available range than `[0, 1)`.
    Interp04,
    /// Scale by `2π / 2^m`, values in `[0, 2π)`.
    Scale2Pi,
    /// Scale every word by `2π(1 − 2^−m) / V_max` so the largest word lands
    /// strictly below `2π`.
    GlobalMax,
    /// Two's-complement words scaled into `[−2, 2)`, stored wrapped into
    /// `[0, 2π)`.
    Signed,
}

/// Which encoder produced an [`EncodedImage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleEncoding {
    /// Amplitude-only storage: one word per address in `theta`.
    Angle,
    /// Two words per qubit: odd addresses in `theta`, even in `phi`;
    /// circuit address width shrinks by one.
    DenseAngle,
    /// Significand in `theta`, exponent phase in `phi`.
    ImprovedAngle,
}

/// Per-address rotation parameters plus the image-level metadata a decoder
/// needs (normalization factor, exponent grid size, hidden bit).
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedImage {
    /// Circuit address width (the image's `n`, or `n − 1` for dense).
    pub address_bits: usize,
    pub word_bits: usize,
    pub encoding: AngleEncoding,
    pub mode: NormalizationMode,
    /// Amplitude-borne value per address (the significand for improved).
    pub theta: Vec<f64>,
    /// Phase-borne value per address (exponent phase for improved, the
    /// even-address word for dense, 0 when unused).
    pub phi: Vec<f64>,
    /// Leading-zero count per address; empty unless improved.
    pub leading_zeros: Vec<u32>,
    /// Largest leading-zero count over nonzero words.
    pub max_leading_zeros: u32,
    /// 1.0 unless `GlobalMax`.
    pub norm_factor: f64,
    /// Largest raw word; present only under `GlobalMax`.
    pub max_word: Option<u64>,
    pub hidden_bit: bool,
}

impl EncodedImage {
    pub fn num_addresses(&self) -> usize {
        1usize << self.address_bits
    }
}

/// Interpret one word under a per-word mode. Image-level `GlobalMax`
/// scaling lives in [`encode_angle`].
pub fn interpret_fixed_point(
    word: u64,
    mode: NormalizationMode,
    word_bits: usize,
) -> Result<f64, EncodeError> {
    debug_assert!(word_bits == 64 || word < (1u64 << word_bits));
    let full = (word_bits as i32).min(f64::MAX_EXP); // 2^word_bits as exponent
    match mode {
        NormalizationMode::Interp01 => Ok(word as f64 * (-full as f64).exp2()),
        NormalizationMode::Interp04 => {
            if word_bits < 2 {
                return Err(EncodeError::WordTooNarrow { mode, word_bits });
            }
            Ok(word as f64 * (2.0 - full as f64).exp2())
        }
        NormalizationMode::Scale2Pi => Ok(TAU * word as f64 * (-full as f64).exp2()),
        NormalizationMode::Signed => {
            if word_bits < 2 {
                return Err(EncodeError::WordTooNarrow { mode, word_bits });
            }
            let signed = if word >> (word_bits - 1) & 1 == 1 {
                word as i64 - (1i64 << word_bits)
            } else {
                word as i64
            };
            let value = signed as f64 * (2.0 - full as f64).exp2();
            debug_assert!((-2.0..2.0).contains(&value) && value > -PI);
            Ok(if value < 0.0 { value + TAU } else { value })
        }
        NormalizationMode::GlobalMax => Err(EncodeError::NotPerWord),
    }
}

/// Encode for the angle QROM. Non-dense keeps every word in `theta`; dense
/// halves the address register, pairing odd-address words into `theta` and
/// even-address words into `phi`.
pub fn encode_angle(
    image: &MemoryImage,
    mode: NormalizationMode,
    dense: bool,
) -> Result<EncodedImage, EncodeError> {
    let m = image.word_bits;
    let (norm_factor, max_word) = match mode {
        NormalizationMode::GlobalMax => {
            let v_max = *image.words.iter().max().unwrap();
            if v_max == 0 {
                return Err(EncodeError::AllZeroImage);
            }
            let f = TAU * (1.0 - (-(m as f64)).exp2()) / v_max as f64;
            (f, Some(v_max))
        }
        _ => (1.0, None),
    };
    let value = |word: u64| -> Result<f64, EncodeError> {
        match mode {
            NormalizationMode::GlobalMax => Ok(word as f64 * norm_factor),
            _ => interpret_fixed_point(word, mode, m),
        }
    };

    let (address_bits, theta, phi, encoding) = if dense {
        let half = image.address_bits - 1;
        let mut theta = Vec::with_capacity(1 << half);
        let mut phi = Vec::with_capacity(1 << half);
        for j in 0..1usize << half {
            theta.push(value(image.words[2 * j + 1])?);
            phi.push(value(image.words[2 * j])?);
        }
        (half, theta, phi, AngleEncoding::DenseAngle)
    } else {
        let theta = image
            .words
            .iter()
            .map(|&w| value(w))
            .collect::<Result<Vec<_>, _>>()?;
        let phi = vec![0.0; image.num_words()];
        (image.address_bits, theta, phi, AngleEncoding::Angle)
    };

    Ok(EncodedImage {
        address_bits,
        word_bits: m,
        encoding,
        mode,
        theta,
        phi,
        leading_zeros: Vec::new(),
        max_leading_zeros: 0,
        norm_factor,
        max_word,
        hidden_bit: false,
    })
}

/// Split every nonzero word into a significand in `[2, 4)` (left-shifted so
/// the leading 1 sits on the top bit) and an exponent phase on the
/// `2π/(z_max + 1)` grid. With the hidden bit, one extra shift drops the
/// leading 1 from storage and the decoder re-inserts it.
pub fn encode_improved_angle(
    image: &MemoryImage,
    hidden_bit: bool,
) -> Result<EncodedImage, EncodeError> {
    let m = image.word_bits;
    if m < 2 {
        return Err(EncodeError::ImprovedWordTooNarrow(m));
    }
    let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let scale = (2.0 - m as f64).exp2(); // the [0,4) interpretation step

    let mut leading_zeros = Vec::with_capacity(image.num_words());
    let mut significands = Vec::with_capacity(image.num_words());
    let mut z_max = 0u32;
    for &word in &image.words {
        if word == 0 {
            leading_zeros.push(0);
            significands.push(0.0);
            continue;
        }
        let z = m as u32 - (64 - word.leading_zeros());
        z_max = z_max.max(z);
        let stored = if hidden_bit {
            (word << (z + 1)) & mask
        } else {
            word << z
        };
        leading_zeros.push(z);
        significands.push(stored as f64 * scale);
    }

    let exponent_step = TAU / (z_max as f64 + 1.0);
    let phi = image
        .words
        .iter()
        .zip(&leading_zeros)
        .map(|(&w, &z)| {
            if w == 0 {
                0.0
            } else {
                exponent_step * z as f64
            }
        })
        .collect();

    Ok(EncodedImage {
        address_bits: image.address_bits,
        word_bits: m,
        encoding: AngleEncoding::ImprovedAngle,
        mode: NormalizationMode::Interp04,
        theta: significands,
        phi,
        leading_zeros,
        max_leading_zeros: z_max,
        norm_factor: 1.0,
        max_word: None,
        hidden_bit,
    })
}

/// Recover a value from (significand, exponent phase): snap the phase to
/// the nearest exponent grid point, then scale by `2^−z`. The rounding
/// self-corrects phase perturbations below half a grid step.
pub fn decode_improved_angle(s: f64, e_phase: f64, z_max: u32, hidden_bit: bool) -> f64 {
    let z = (e_phase * (z_max as f64 + 1.0) / TAU)
        .round()
        .clamp(0.0, z_max as f64);
    let significand = if hidden_bit {
        s / 2.0 + 2.0
    } else {
        if s == 0.0 {
            return 0.0;
        }
        s
    };
    significand * (-z).exp2()
}
