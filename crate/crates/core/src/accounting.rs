//! Bit counts of the beam storage before and after the improvements, and a
//! wall-clock comparison of the two search procedures.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::ceil_log2;
use crate::beam::{BeamDecoder, DecodeConfig, FixedArith};
use crate::error::DecodeError;
use crate::fixedpoint::QProb;
use crate::reference::decode_reference;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StorageParams {
    pub k: u64,
    pub w: u64,
    pub t: u64,
    pub prob_bits: u64,
    pub sl_bits: u64,
}

impl StorageParams {
    pub fn new(k: u64, w: u64, t: u64) -> Self {
        Self {
            k,
            w,
            t,
            prob_bits: 30,
            sl_bits: 19,
        }
    }

    pub fn label_bits(&self) -> u64 {
        ceil_log2(self.k) as u64
    }

    fn index_bits(&self) -> u64 {
        ceil_log2(self.w) as u64
    }

    /// Pr, Pr+, Pr- and SL of one record.
    fn record_bits(&self) -> u64 {
        3 * self.prob_bits + self.sl_bits
    }
}

/// `count` copies of a `width`-bit field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub name: &'static str,
    pub count: u64,
    pub width: u64,
}

impl Field {
    fn new(name: &'static str, count: u64, width: u64) -> Self {
        Self { name, count, width }
    }

    pub fn bits(&self) -> u64 {
        self.count * self.width
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub name: &'static str,
    pub fields: Vec<Field>,
}

impl Layout {
    pub fn total_bits(&self) -> u64 {
        self.fields.iter().map(Field::bits).sum()
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.name)?;
        for x in &self.fields {
            writeln!(
                f,
                "  {:<28} {:>8} x {:>6} = {:>12} bits",
                x.name,
                x.count,
                x.width,
                x.bits()
            )?;
        }
        write!(f, "  {:<28} {:>34} bits", "total", self.total_bits())
    }
}

/// Textbook storage: `W` retained records plus `(K + 1) W` candidates,
/// each with its own sentence.
pub fn original_layout(p: &StorageParams) -> Layout {
    let records = p.k * p.w + 2 * p.w;
    Layout {
        name: "original",
        fields: vec![
            Field::new("B^ and B records", records, p.record_bits()),
            Field::new("B^ and B sentences", records, p.label_bits() * p.t),
        ],
    }
}

/// `B` trimmed to `W` candidates with sentences, plus the prefix arrays.
pub fn first_improvement_layout(p: &StorageParams) -> Layout {
    Layout {
        name: "bounded candidates",
        fields: vec![
            Field::new("B^ and B records", 2 * p.w, p.record_bits()),
            Field::new("B^ and B sentences", 2 * p.w, p.label_bits() * p.t),
            Field::new("B1", p.w, p.index_bits()),
            Field::new("B2", p.w, p.label_bits()),
            Field::new("B3", p.w, p.prob_bits),
        ],
    }
}

/// Sentences kept in `B^` only; `A1`, `A2`, `c`, `d` rebuild them.
pub fn improved_layout(p: &StorageParams) -> Layout {
    Layout {
        name: "improved",
        fields: vec![
            Field::new("B^ and B records", 2 * p.w, p.record_bits()),
            Field::new("B1", p.w, p.index_bits()),
            Field::new("B2", p.w, p.label_bits()),
            Field::new("B3", p.w, p.prob_bits),
            Field::new("A1", p.w, p.index_bits()),
            Field::new("A2", p.w, p.label_bits()),
            Field::new("c and d", 2 * p.w, 1),
            Field::new("B^ sentences", p.w, p.label_bits() * p.t),
        ],
    }
}

/// What [`crate::beam::BeamDecoder`] actually keeps: the improved layout
/// plus sentence lengths, occupancy flags, deferred appends, and the
/// lookup aids that replace linear searches in software.
pub fn as_built_layout(p: &StorageParams) -> Layout {
    let mut layout = improved_layout(p);
    layout.name = "as built";
    let slot_ref = ceil_log2(p.w + 1) as u64;
    layout.fields.extend([
        Field::new("sentence lengths", p.w, ceil_log2(p.t + 1) as u64),
        Field::new("occupied flags", 2 * p.w, 1),
        Field::new("pending appends", p.w, p.label_bits()),
        Field::new("sentence hashes", 2 * p.w, 64),
        Field::new("child links and twins", 4 * p.w, slot_ref),
    ]);
    layout
}

pub fn bits_original(p: &StorageParams) -> u64 {
    (p.record_bits() + p.label_bits() * p.t) * (p.k * p.w + 2 * p.w)
}

pub fn bits_improved(p: &StorageParams) -> u64 {
    let w = p.w;
    2 * w * p.record_bits()
        + w * p.index_bits()
        + w * p.label_bits()
        + w * p.prob_bits
        + w * p.index_bits()
        + w * p.label_bits()
        + 2 * w
        + w * p.label_bits() * p.t
}

pub fn compression_ratio(p: &StorageParams) -> f64 {
    bits_original(p) as f64 / bits_improved(p) as f64
}

/// Limit of [`compression_ratio`] as `T` grows.
pub fn asymptotic_ratio(p: &StorageParams) -> f64 {
    (p.k + 2) as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemoryReport {
    pub params: StorageParams,
    pub original: Layout,
    pub first_improvement: Layout,
    pub improved: Layout,
    pub as_built: Layout,
    pub ratio: f64,
}

pub fn memory_report(p: StorageParams) -> MemoryReport {
    MemoryReport {
        original: original_layout(&p),
        first_improvement: first_improvement_layout(&p),
        improved: improved_layout(&p),
        as_built: as_built_layout(&p),
        ratio: compression_ratio(&p),
        params: p,
    }
}

/// Speech-like synthetic frames: mostly blank, with runs of one dominant
/// label. Rows are normalized; every entry is positive.
pub fn synthetic_frames(count: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frames = Vec::with_capacity(count);
    let mut current = k; // blank
    for _ in 0..count {
        if rng.random_bool(0.3) {
            current = if rng.random_bool(0.5) {
                k
            } else {
                rng.random_range(0..k)
            };
        }
        let mut logits: Vec<f64> = (0..=k).map(|_| rng.random_range(-2.0..2.0)).collect();
        logits[current] += rng.random_range(3.0..7.0);
        let m = logits.iter().cloned().fold(f64::MIN, f64::max);
        let exp: Vec<f64> = logits.iter().map(|&x| (x - m).exp()).collect();
        let s: f64 = exp.iter().sum();
        frames.push(exp.into_iter().map(|e| e / s).collect());
    }
    frames
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimingConfig {
    pub k: usize,
    pub w: usize,
    pub seed: u64,
    /// Frames per decoded utterance; the stream is cut into pieces this long.
    pub utterance_frames: usize,
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            k: 28,
            w: 8,
            seed: 2021,
            utterance_frames: 1800,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimingReport {
    pub frames: usize,
    pub utterances: usize,
    pub tau_original: Duration,
    pub tau_improved: Duration,
}

/// Decodes the same synthetic stream with the textbook search (double
/// precision) and the bounded-storage decoder (fixed point, `q = 30`),
/// without a language model, and times each. Inputs are converted to each
/// decoder's number format before the clock starts.
pub fn timing_harness(frame_count: usize, config: &TimingConfig) -> Result<TimingReport, DecodeError> {
    let frames = synthetic_frames(frame_count, config.k, config.seed);
    let q = DecodeConfig::new(config.k, config.w).q;
    let fixed: Vec<Vec<QProb>> = frames
        .iter()
        .map(|f| f.iter().map(|&p| QProb::from_f64(p, q)).collect())
        .collect();
    let chunk = config.utterance_frames.max(1);

    let start = Instant::now();
    let mut utterances = 0;
    for piece in frames.chunks(chunk) {
        let out = decode_reference(piece, None, config.w)
            .map_err(|e| DecodeError::Config(e.to_string()))?;
        std::hint::black_box(out);
        utterances += 1;
    }
    let tau_original = start.elapsed();

    let start = Instant::now();
    for piece in fixed.chunks(chunk) {
        let mut dec = BeamDecoder::new(
            DecodeConfig::new(config.k, config.w),
            FixedArith::new(q),
            None,
        )?;
        for f in piece {
            dec.step(f)?;
        }
        std::hint::black_box(dec.finish()?);
    }
    let tau_improved = start.elapsed();

    Ok(TimingReport {
        frames: frame_count,
        utterances,
        tau_original,
        tau_improved,
    })
}
