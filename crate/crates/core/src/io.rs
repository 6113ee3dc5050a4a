//! File formats: logits matrices, alphabets, word lists and decoder
//! configuration.
//!
//! A logits file is a 17-byte little-endian header followed by a row-major
//! `T x (K+1)` payload:
//!
//! | offset | size | field                                  |
//! |--------|------|----------------------------------------|
//! | 0      | 4    | magic `CTCL`                           |
//! | 4      | 4    | version, currently 1                   |
//! | 8      | 4    | `T`                                    |
//! | 12     | 4    | `K + 1`                                |
//! | 16     | 1    | dtype: 0 = `f32`, 1 = `i8` logit (2 fractional bits) |

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::alphabet::Alphabet;
use crate::beam::{DecodeConfig, TieBreak};
use crate::error::IoError;
use crate::fixedpoint::{QConst, QLogit};
use crate::softmax::{LogitFrame, SoftmaxParams, SoftmaxVariant, BIAS_FRAC, LAMBDA_FRAC};

pub const LOGITS_MAGIC: &[u8; 4] = b"CTCL";
pub const LOGITS_VERSION: u32 = 1;
pub const LOGITS_HEADER_LEN: usize = 17;

#[derive(Clone, Debug, PartialEq)]
pub enum LogitData {
    F32(Vec<f32>),
    I8(Vec<i8>),
}

impl LogitData {
    fn dtype(&self) -> u8 {
        match self {
            LogitData::F32(_) => 0,
            LogitData::I8(_) => 1,
        }
    }

    fn len(&self) -> usize {
        match self {
            LogitData::F32(v) => v.len(),
            LogitData::I8(v) => v.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogitsFile {
    pub t: usize,
    /// `K + 1`.
    pub width: usize,
    pub data: LogitData,
}

fn malformed(msg: impl Into<String>) -> IoError {
    IoError::MalformedLogits(msg.into())
}

impl LogitsFile {
    pub fn from_f32_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self, IoError> {
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != width) {
            return Err(malformed("rows differ in length"));
        }
        Ok(Self {
            t: rows.len(),
            width,
            data: LogitData::F32(rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect()),
        })
    }

    pub fn from_frames(frames: &[LogitFrame]) -> Result<Self, IoError> {
        let width = frames.first().map_or(0, |f| f.len());
        if frames.iter().any(|f| f.len() != width) {
            return Err(malformed("rows differ in length"));
        }
        Ok(Self {
            t: frames.len(),
            width,
            data: LogitData::I8(frames.iter().flat_map(|f| f.0.iter().map(|l| l.0)).collect()),
        })
    }

    /// Number of labels `K`, blank excluded.
    pub fn k(&self) -> usize {
        self.width.saturating_sub(1)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(LOGITS_HEADER_LEN + self.data.len() * 4);
        out.extend_from_slice(LOGITS_MAGIC);
        out.extend_from_slice(&LOGITS_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.t as u32).to_le_bytes());
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.push(self.data.dtype());
        match &self.data {
            LogitData::F32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            LogitData::I8(v) => out.extend(v.iter().map(|&x| x as u8)),
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, IoError> {
        if bytes.len() < LOGITS_HEADER_LEN {
            return Err(malformed(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if &bytes[..4] != LOGITS_MAGIC {
            return Err(malformed("bad magic"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let version = u32_at(4);
        if version != LOGITS_VERSION {
            return Err(malformed(format!("unsupported version {version}")));
        }
        let t = u32_at(8) as usize;
        let width = u32_at(12) as usize;
        if width < 2 {
            return Err(malformed(format!("row width {width} leaves no label besides the blank")));
        }
        let size = match bytes[16] {
            0 => 4,
            1 => 1,
            d => return Err(malformed(format!("unknown dtype {d}"))),
        };
        let payload = &bytes[LOGITS_HEADER_LEN..];
        let expected = t
            .checked_mul(width)
            .and_then(|n| n.checked_mul(size))
            .ok_or_else(|| malformed("dimensions overflow"))?;
        if payload.len() != expected {
            return Err(malformed(format!(
                "payload has {} bytes, header implies {expected}",
                payload.len()
            )));
        }
        let data = if size == 4 {
            LogitData::F32(
                payload
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
                    .collect(),
            )
        } else {
            LogitData::I8(payload.iter().map(|&b| b as i8).collect())
        };
        Ok(Self { t, width, data })
    }

    /// Rows as real numbers.
    pub fn rows_f64(&self) -> Vec<Vec<f64>> {
        match &self.data {
            LogitData::F32(v) => v
                .chunks(self.width)
                .map(|r| r.iter().map(|&x| x as f64).collect())
                .collect(),
            LogitData::I8(v) => v
                .chunks(self.width)
                .map(|r| r.iter().map(|&x| QLogit(x).to_f64()).collect())
                .collect(),
        }
    }

    /// Rows as quantized logits; `f32` rows are rounded to the logit grid.
    pub fn frames(&self) -> Vec<LogitFrame> {
        match &self.data {
            LogitData::F32(v) => v.chunks(self.width).map(LogitFrame::from_f32).collect(),
            LogitData::I8(v) => v.chunks(self.width).map(LogitFrame::from_raw).collect(),
        }
    }
}

pub fn read_logits(path: &Path) -> Result<LogitsFile, IoError> {
    LogitsFile::from_bytes(&fs::read(path)?)
}

pub fn write_logits(path: &Path, file: &LogitsFile) -> Result<(), IoError> {
    Ok(fs::write(path, file.to_bytes())?)
}

pub fn read_alphabet(path: &Path) -> Result<Alphabet, IoError> {
    Ok(Alphabet::parse(&fs::read_to_string(path)?)?)
}

/// One word per line; blank lines are skipped.
pub fn parse_words(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect()
}

pub fn read_words(path: &Path) -> Result<Vec<String>, IoError> {
    Ok(parse_words(&fs::read_to_string(path)?))
}

/// A constant written either as a number or as a binary fraction string
/// such as `"0.1011110111"`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ConstValue {
    Number(f64),
    Binary(String),
}

impl ConstValue {
    /// Binary strings keep every digit given, with at least `min_frac`
    /// fractional bits; numbers are rounded to `min_frac` bits.
    pub fn to_qconst(&self, min_frac: u8) -> Result<QConst, IoError> {
        let err = |e: crate::error::FixedPointError| IoError::Config(e.to_string());
        match self {
            ConstValue::Number(x) => QConst::from_f64(*x, min_frac).map_err(err),
            ConstValue::Binary(s) => {
                let digits = s.trim().split_once('.').map_or(0, |(_, f)| f.len());
                let frac = min_frac.max(digits.min(u8::MAX as usize) as u8);
                QConst::from_binary(s, frac).map_err(err)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreakName {
    #[default]
    Lowest,
    Highest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantName {
    #[default]
    PaperFaithful,
    Base2Direct,
}

/// Decoder and softmax settings. Every key is optional; unknown keys are
/// rejected.
///
/// ```toml
/// w = 8
/// q = 30
/// adjust = true
/// use_lm = true
/// d1 = "0.1011110111"
/// softmax_variant = "paper-faithful"
/// ```
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub w: usize,
    pub q: u8,
    pub t_max: Option<usize>,
    pub adjust: bool,
    /// Defaults to whether a dictionary was supplied.
    pub use_lm: Option<bool>,
    /// Defaults to the value forced by `w`.
    pub pl_exponent: Option<i32>,
    pub tie_break: TieBreakName,
    pub lambda: Option<ConstValue>,
    pub inv_lambda: Option<ConstValue>,
    pub d1: Option<ConstValue>,
    pub d2: Option<ConstValue>,
    pub softmax_variant: VariantName,
}

impl Default for ConfigFile {
    fn default() -> Self {
        let base = DecodeConfig::new(1, 8);
        Self {
            w: base.w,
            q: base.q,
            t_max: None,
            adjust: true,
            use_lm: None,
            pl_exponent: None,
            tie_break: TieBreakName::Lowest,
            lambda: None,
            inv_lambda: None,
            d1: None,
            d2: None,
            softmax_variant: VariantName::PaperFaithful,
        }
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        toml::from_str(text).map_err(|e| IoError::Config(e.message().to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, IoError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Decoder settings for frames with `k` labels.
    pub fn decode_config(&self, k: usize, have_dict: bool) -> Result<DecodeConfig, IoError> {
        let mut c = DecodeConfig::new(k, self.w).with_q(self.q).with_adjust(self.adjust);
        c.t_max = self.t_max;
        c.use_lm = self.use_lm.unwrap_or(have_dict);
        if let Some(n) = self.pl_exponent {
            c.pl_exponent = n;
        }
        c.tie_break = match self.tie_break {
            TieBreakName::Lowest => TieBreak::LowestSlot,
            TieBreakName::Highest => TieBreak::HighestSlot,
        };
        c.validate().map_err(|e| IoError::Config(e.to_string()))?;
        Ok(c)
    }

    pub fn softmax_params(&self) -> Result<SoftmaxParams, IoError> {
        let mut p = SoftmaxParams::default();
        let pick = |v: &Option<ConstValue>, frac: u8, dflt: QConst| match v {
            Some(v) => v.to_qconst(frac),
            None => Ok(dflt),
        };
        p.lambda = pick(&self.lambda, LAMBDA_FRAC, p.lambda)?;
        p.inv_lambda = pick(&self.inv_lambda, LAMBDA_FRAC, p.inv_lambda)?;
        p.d1 = pick(&self.d1, BIAS_FRAC, p.d1)?;
        p.d2 = pick(&self.d2, BIAS_FRAC, p.d2)?;
        p.variant = match self.softmax_variant {
            VariantName::PaperFaithful => SoftmaxVariant::PaperFaithful,
            VariantName::Base2Direct => SoftmaxVariant::Base2Direct,
        };
        p.validate().map_err(IoError::Config)?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logits_round_trip_f32() {
        let rows = vec![vec![0.5f32, -1.25, 3.0], vec![1e-3, 2.0, -7.5]];
        let f = LogitsFile::from_f32_rows(&rows).unwrap();
        let bytes = f.to_bytes();
        assert_eq!(bytes.len(), 17 + 6 * 4);
        assert_eq!(&bytes[..4], b"CTCL");
        assert_eq!(bytes[16], 0);
        let back = LogitsFile::from_bytes(&bytes).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.k(), 2);
        assert_eq!(back.rows_f64()[1][2], -7.5);
    }

    #[test]
    fn quantized_logits_are_lossless() {
        let frames = vec![LogitFrame::from_raw(&[-128, 0, 127, 5])];
        let f = LogitsFile::from_frames(&frames).unwrap();
        let back = LogitsFile::from_bytes(&f.to_bytes()).unwrap();
        assert_eq!(back.frames(), frames);
        assert_eq!(back.rows_f64()[0], vec![-32.0, 0.0, 31.75, 1.25]);
    }

    #[test]
    fn malformed_logits() {
        let f = LogitsFile::from_f32_rows(&[vec![0.0f32; 3]]).unwrap();
        let good = f.to_bytes();
        for cut in [0, 10, 17, good.len() - 1] {
            assert!(LogitsFile::from_bytes(&good[..cut]).is_err());
        }
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(LogitsFile::from_bytes(&bad).is_err());
        let mut bad = good.clone();
        bad[16] = 7;
        assert!(LogitsFile::from_bytes(&bad).is_err());
        let mut bad = good;
        bad[12] = 1;
        assert!(LogitsFile::from_bytes(&bad).is_err());
    }

    #[test]
    fn empty_logits_file_reads() {
        let f = LogitsFile {
            t: 0,
            width: 29,
            data: LogitData::F32(vec![]),
        };
        assert_eq!(LogitsFile::from_bytes(&f.to_bytes()).unwrap().t, 0);
    }

    #[test]
    fn default_config() {
        let c = ConfigFile::parse("").unwrap();
        let d = c.decode_config(28, true).unwrap();
        assert_eq!((d.w, d.q, d.pl_exponent, d.use_lm), (8, 30, -4, true));
        assert_eq!(c.softmax_params().unwrap(), SoftmaxParams::default());
    }

    #[test]
    fn config_values() {
        let c = ConfigFile::parse(
            "w = 4\nadjust = false\nd1 = \"0.10111110111\"\nd2 = 0.984375\nlambda = 1.5\ntie_break = \"highest\"\nsoftmax_variant = \"base2-direct\"\n",
        )
        .unwrap();
        let d = c.decode_config(5, false).unwrap();
        assert_eq!((d.w, d.adjust, d.pl_exponent), (4, false, -3));
        assert_eq!(d.tie_break, TieBreak::HighestSlot);
        let p = c.softmax_params().unwrap();
        assert_eq!(p.d1.frac_bits(), 11);
        assert_eq!(p.d1.to_binary(), "0.10111110111");
        assert_eq!(p.d2.to_f64(), 0.984375);
        assert_eq!(p.variant, SoftmaxVariant::Base2Direct);
    }

    #[test]
    fn config_rejects_unknown_and_invalid() {
        assert!(ConfigFile::parse("beam = 8").is_err());
        let c = ConfigFile::parse("d1 = 2.5").unwrap();
        assert!(c.softmax_params().is_err());
        let c = ConfigFile::parse("w = 8\npl_exponent = -2").unwrap();
        assert!(c.decode_config(28, false).is_err());
        assert!(ConfigFile::parse("d1 = \"0.10x\"").unwrap().softmax_params().is_err());
    }

    #[test]
    fn words_skip_blank_lines() {
        assert_eq!(parse_words("cat\n\n dog \r\n"), vec!["cat", "dog"]);
    }
}
