//! Fixed-point number formats and the handful of bit-level primitives the
//! decoder datapath is built from.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::FixedPointError;

/// Default word width of a stored probability.
pub const PROB_WIDTH: u32 = 32;
/// Default number of fractional bits of a stored probability.
pub const DEFAULT_Q: u8 = 30;

static SATURATIONS: AtomicU64 = AtomicU64::new(0);

/// Number of saturating operations performed by [`qmul`] and
/// [`shift_value`] in this process.
pub fn saturation_count() -> u64 {
    SATURATIONS.load(Ordering::Relaxed)
}

fn note_saturation() {
    SATURATIONS.fetch_add(1, Ordering::Relaxed);
}

/// Unsigned fixed-point probability: `value = raw / 2^frac`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QProb {
    raw: u32,
    frac: u8,
}

impl QProb {
    pub const fn from_raw(raw: u32, frac: u8) -> Self {
        assert!(frac < PROB_WIDTH as u8);
        Self { raw, frac }
    }

    pub const fn zero(frac: u8) -> Self {
        Self::from_raw(0, frac)
    }

    pub const fn one(frac: u8) -> Self {
        Self::from_raw(1 << frac, frac)
    }

    pub const fn max_value(frac: u8) -> Self {
        Self::from_raw(u32::MAX, frac)
    }

    /// Quantizes by truncation, clamping into the representable range.
    pub fn from_f64(value: f64, frac: u8) -> Self {
        let scaled = (value * (1u64 << frac) as f64).floor();
        let raw = if scaled.is_nan() || scaled <= 0.0 {
            0
        } else if scaled >= u32::MAX as f64 {
            u32::MAX
        } else {
            scaled as u32
        };
        Self::from_raw(raw, frac)
    }

    pub const fn raw(self) -> u32 {
        self.raw
    }

    pub const fn frac_bits(self) -> u8 {
        self.frac
    }

    pub fn to_f64(self) -> f64 {
        self.raw as f64 / (1u64 << self.frac) as f64
    }

    pub const fn is_zero(self) -> bool {
        self.raw == 0
    }

    /// Truncating product; the flag reports saturation.
    pub fn overflowing_mul(self, rhs: Self) -> (Self, bool) {
        debug_assert_eq!(self.frac, rhs.frac, "mixed q formats");
        let wide = (self.raw as u64 * rhs.raw as u64) >> self.frac;
        if wide > u32::MAX as u64 {
            (Self::max_value(self.frac), true)
        } else {
            (Self::from_raw(wide as u32, self.frac), false)
        }
    }

    pub fn overflowing_add(self, rhs: Self) -> (Self, bool) {
        debug_assert_eq!(self.frac, rhs.frac, "mixed q formats");
        match self.raw.checked_add(rhs.raw) {
            Some(raw) => (Self::from_raw(raw, self.frac), false),
            None => (Self::max_value(self.frac), true),
        }
    }

    /// Shift by `s` bits: left for `s > 0` (saturating), right for `s < 0`
    /// (truncating).
    pub fn overflowing_shift(self, s: i32) -> (Self, bool) {
        if s == 0 || self.raw == 0 {
            return (self, false);
        }
        if s < 0 {
            let n = s.unsigned_abs();
            let raw = if n >= 32 { 0 } else { self.raw >> n };
            return (Self::from_raw(raw, self.frac), false);
        }
        let n = s as u32;
        if n >= 32 || self.raw.leading_zeros() < n {
            (Self::max_value(self.frac), true)
        } else {
            (Self::from_raw(self.raw << n, self.frac), false)
        }
    }

    /// Position of the leading one relative to the binary point.
    pub fn leading_one(self) -> Result<i32, FixedPointError> {
        leading_one_position(self.raw as u64, self.frac)
    }
}

impl fmt::Debug for QProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QProb({:.9} q{})", self.to_f64(), self.frac)
    }
}

impl fmt::Display for QProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.9}", self.to_f64())
    }
}

/// Fixed-point product `floor(a * b / 2^q)`, saturating at the maximum raw
/// value. Saturation bumps the process-wide counter.
pub fn qmul(a: QProb, b: QProb) -> QProb {
    let (p, sat) = a.overflowing_mul(b);
    if sat {
        note_saturation();
    }
    p
}

/// Returns `p` with `2^p <= x / 2^frac_bits < 2^(p+1)`.
pub fn leading_one_position(x: u64, frac_bits: u8) -> Result<i32, FixedPointError> {
    if x == 0 {
        return Err(FixedPointError::ZeroInput);
    }
    Ok(63 - x.leading_zeros() as i32 - frac_bits as i32)
}

/// Left shift for `s > 0` (saturating), right shift for `s < 0` (truncating).
pub fn shift_value(x: QProb, s: i32) -> QProb {
    let (v, sat) = x.overflowing_shift(s);
    if sat {
        note_saturation();
    }
    v
}

/// Signed 8-bit network output with two fractional bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QLogit(pub i8);

impl QLogit {
    pub const FRAC_BITS: u8 = 2;
    pub const MIN: QLogit = QLogit(i8::MIN);
    pub const MAX: QLogit = QLogit(i8::MAX);

    /// Round to the nearest representable value, clamping at the range ends.
    pub fn from_f32(value: f32) -> Self {
        let scaled = (value * 4.0).round();
        if scaled.is_nan() {
            return QLogit(0);
        }
        QLogit(scaled.clamp(i8::MIN as f32, i8::MAX as f32) as i8)
    }

    pub const fn raw(self) -> i8 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 4.0
    }
}

impl fmt::Debug for QLogit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QLogit({})", self.to_f64())
    }
}

/// Unsigned constant with a fixed number of fractional bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct QConst {
    raw: u32,
    frac: u8,
}

impl QConst {
    pub const fn from_raw(raw: u32, frac: u8) -> Self {
        Self { raw, frac }
    }

    /// Rounds `value` to the nearest multiple of `2^-frac`.
    pub fn from_f64(value: f64, frac: u8) -> Result<Self, FixedPointError> {
        let scaled = (value * (1u64 << frac) as f64).round();
        if !scaled.is_finite() || scaled < 0.0 || scaled > u32::MAX as f64 {
            return Err(FixedPointError::OutOfRange(value));
        }
        Ok(Self::from_raw(scaled as u32, frac))
    }

    /// Parses a binary fraction such as `0.1011110111` or `1.0000000110`.
    /// The fractional digit count must not exceed `frac`.
    pub fn from_binary(text: &str, frac: u8) -> Result<Self, FixedPointError> {
        let bad = || FixedPointError::BadBinaryLiteral(text.to_string());
        let trimmed = text.trim().trim_end_matches('b');
        let (int_part, frac_part) = trimmed.split_once('.').unwrap_or((trimmed, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if frac_part.len() > frac as usize {
            return Err(FixedPointError::TooManyFractionDigits {
                literal: text.to_string(),
                frac,
            });
        }
        let mut raw: u64 = 0;
        for c in int_part.chars().chain(frac_part.chars()) {
            let bit = match c {
                '0' => 0,
                '1' => 1,
                _ => return Err(bad()),
            };
            raw = (raw << 1) | bit;
            if raw > u32::MAX as u64 {
                return Err(bad());
            }
        }
        let pad = frac as usize - frac_part.len();
        let raw = raw << pad;
        if raw > u32::MAX as u64 {
            return Err(bad());
        }
        Ok(Self::from_raw(raw as u32, frac))
    }

    pub const fn raw(self) -> u32 {
        self.raw
    }

    pub const fn frac_bits(self) -> u8 {
        self.frac
    }

    pub fn to_f64(self) -> f64 {
        self.raw as f64 / (1u64 << self.frac) as f64
    }

    /// Raw value re-expressed with `frac` fractional bits (truncating when
    /// narrowing).
    pub fn raw_at(self, frac: u8) -> u64 {
        if frac >= self.frac {
            (self.raw as u64) << (frac - self.frac)
        } else {
            (self.raw as u64) >> (self.frac - frac)
        }
    }

    /// Binary-fraction rendering, e.g. `0.1011110111`.
    pub fn to_binary(self) -> String {
        let int = self.raw >> self.frac;
        let mut s = format!("{int:b}");
        if self.frac > 0 {
            s.push('.');
            for i in (0..self.frac).rev() {
                s.push(if (self.raw >> i) & 1 == 1 { '1' } else { '0' });
            }
        }
        s
    }
}
