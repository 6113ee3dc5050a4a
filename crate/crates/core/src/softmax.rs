//! Exact softmax and the shift-and-add approximation used in front of the
//! decoder.
//!
//! The approximate path never evaluates `exp` or `ln`:
//!
//! 1. subtract the frame maximum so every exponent input is `<= 0`;
//! 2. `e^z = 2^(z*lambda)`, split `z*lambda` into an integer part `u <= 0` and
//!    a fraction `v in [0, 1)`, and approximate `2^v` by `v + d1` followed by a
//!    right shift of `|u|`;
//! 3. sum the terms into `F`;
//! 4. `log2 F = omega + log2 kappa ~ omega + (kappa - 1)` with `omega` the
//!    leading-one position of `F` and `kappa in [1, 2)`;
//! 5. exponentiate `z*lambda - log2 F` once more, this time with bias `d2`.
//!
//! Step 4 comes in two flavours. [`SoftmaxVariant::PaperFaithful`] converts
//! `log2 F` to `ln F` with the `1/lambda` constant and multiplies back by
//! `lambda` before the second exponential; [`SoftmaxVariant::Base2Direct`]
//! subtracts `log2 F` straight from `z*lambda`.

use crate::fixedpoint::{leading_one_position, QConst, QLogit, QProb};

/// Fractional bits carried by `w`, `v`, `log2 F` and `G`.
pub const INTERNAL_FRAC: u8 = 12;
/// Fractional bits of the accumulated sum `F`.
const SUM_FRAC: u8 = 24;

pub const LAMBDA_FRAC: u8 = 4;
pub const BIAS_FRAC: u8 = 10;

/// `(d1, d2)` pairs evaluated for the speech model, best last.
pub const BIAS_PRESETS: [(&str, &str); 5] = [
    ("1.0000000110", "0.1111111110"),
    ("0.1111010001", "0.1111111111"),
    ("0.1101000001", "0.1111111111"),
    ("0.1011010110", "0.1111110010"),
    ("0.1011110111", "0.1111110010"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SoftmaxVariant {
    #[default]
    PaperFaithful,
    Base2Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SoftmaxParams {
    pub lambda: QConst,
    pub inv_lambda: QConst,
    pub d1: QConst,
    pub d2: QConst,
    pub variant: SoftmaxVariant,
}

impl Default for SoftmaxParams {
    fn default() -> Self {
        let (d1, d2) = BIAS_PRESETS[BIAS_PRESETS.len() - 1];
        Self {
            lambda: QConst::from_raw(24, LAMBDA_FRAC),
            inv_lambda: QConst::from_raw(10, LAMBDA_FRAC),
            d1: QConst::from_binary(d1, BIAS_FRAC).expect("preset literal"),
            d2: QConst::from_binary(d2, BIAS_FRAC).expect("preset literal"),
            variant: SoftmaxVariant::PaperFaithful,
        }
    }
}

impl SoftmaxParams {
    pub fn with_biases(self, d1: QConst, d2: QConst) -> Self {
        Self { d1, d2, ..self }
    }

    pub fn with_variant(self, variant: SoftmaxVariant) -> Self {
        Self { variant, ..self }
    }

    pub fn validate(&self) -> Result<(), String> {
        let in_open = |c: QConst, lo: f64, hi: f64| c.to_f64() > lo && c.to_f64() < hi;
        if !in_open(self.d1, 0.0, 2.0) || !in_open(self.d2, 0.0, 2.0) {
            return Err("d1 and d2 must lie in (0, 2)".into());
        }
        if !in_open(self.lambda, 1.0, 2.0) {
            return Err("lambda must lie in (1, 2)".into());
        }
        if !in_open(self.inv_lambda, 0.0, 1.0) {
            return Err("inv_lambda must lie in (0, 1)".into());
        }
        for c in [self.lambda, self.inv_lambda, self.d1, self.d2] {
            if c.frac_bits() > INTERNAL_FRAC {
                return Err(format!(
                    "constants are limited to {INTERNAL_FRAC} fractional bits"
                ));
            }
        }
        Ok(())
    }
}

/// One network output vector: labels `1..=K` followed by the blank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogitFrame(pub Vec<QLogit>);

impl LogitFrame {
    pub fn from_f32(values: &[f32]) -> Self {
        Self(values.iter().map(|&v| QLogit::from_f32(v)).collect())
    }

    pub fn from_raw(raw: &[i8]) -> Self {
        Self(raw.iter().map(|&r| QLogit(r)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|l| l.to_f64()).collect()
    }
}

/// Normalized softmax in double precision.
pub fn softmax_exact(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&y| (y - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

pub fn softmax_exact_frame(frame: &LogitFrame) -> Vec<f64> {
    softmax_exact(&frame.to_f64())
}

/// Floor-rescale a signed fixed-point value between fractional widths.
fn rescale(x: i64, from: u8, to: u8) -> i64 {
    if to >= from {
        x << (to - from)
    } else {
        x >> (from - to)
    }
}

/// `(v + bias) * 2^u` for `x = u + v`, produced with `out_frac` fractional bits.
fn exp2_linear(x: i64, bias: u64, out_frac: u8) -> u64 {
    let one = 1i64 << INTERNAL_FRAC;
    let u = x >> INTERNAL_FRAC;
    let v = (x - u * one) as u64;
    let mantissa = v + bias;
    let e = u + out_frac as i64 - INTERNAL_FRAC as i64;
    if e >= 0 {
        if e >= 40 {
            u64::MAX
        } else {
            mantissa << e
        }
    } else if e <= -63 {
        0
    } else {
        mantissa >> (-e)
    }
}

/// Intermediate values of one approximate softmax evaluation, all in
/// `INTERNAL_FRAC` fixed point unless noted.
#[derive(Clone, Debug)]
pub struct ApproxTrace {
    pub w: Vec<i64>,
    /// Sum of first-stage terms, `SUM_FRAC` fractional bits.
    pub sum: u64,
    pub omega: i32,
    pub kappa: i64,
    pub log2_sum: i64,
    pub g: Vec<i64>,
}

/// Approximate softmax with outputs quantized to `q` fractional bits and
/// clamped to `[0, 1]`.
pub fn softmax_approx(frame: &LogitFrame, params: &SoftmaxParams, q: u8) -> Vec<QProb> {
    softmax_approx_traced(frame, params, q).0
}

pub fn softmax_approx_traced(
    frame: &LogitFrame,
    params: &SoftmaxParams,
    q: u8,
) -> (Vec<QProb>, ApproxTrace) {
    debug_assert!(params.validate().is_ok());
    let f = INTERNAL_FRAC;
    let y_max = frame.0.iter().map(|l| l.raw()).max().unwrap_or(0) as i64;
    let z: Vec<i64> = frame.0.iter().map(|l| l.raw() as i64 - y_max).collect();

    let lam = params.lambda.raw() as i64;
    let lam_frac = params.lambda.frac_bits();
    let w: Vec<i64> = z
        .iter()
        .map(|&zk| rescale(zk * lam, QLogit::FRAC_BITS + lam_frac, f))
        .collect();

    let d1 = params.d1.raw_at(f);
    let sum: u64 = w.iter().map(|&wk| exp2_linear(wk, d1, SUM_FRAC)).sum();

    // sum >= d1 > 0 because the maximum contributes v = 0, u = 0
    let omega = leading_one_position(sum, SUM_FRAC).expect("positive sum");
    let kappa_shift = SUM_FRAC as i32 + omega - f as i32;
    let kappa = if kappa_shift >= 0 {
        (sum >> kappa_shift) as i64
    } else {
        (sum << (-kappa_shift)) as i64
    };
    let log2_sum = ((omega as i64) << f) + (kappa - (1 << f));

    let g: Vec<i64> = match params.variant {
        SoftmaxVariant::PaperFaithful => {
            let inv = params.inv_lambda.raw() as i64;
            let ln_sum = rescale(inv * log2_sum, f + params.inv_lambda.frac_bits(), f);
            z.iter()
                .map(|&zk| {
                    let z12 = rescale(zk, QLogit::FRAC_BITS, f);
                    rescale((z12 - ln_sum) * lam, f + lam_frac, f)
                })
                .collect()
        }
        SoftmaxVariant::Base2Direct => w.iter().map(|&wk| wk - log2_sum).collect(),
    };

    let d2 = params.d2.raw_at(f);
    let one = 1u64 << q;
    let out = g
        .iter()
        .map(|&gk| QProb::from_raw(exp2_linear(gk, d2, q).min(one) as u32, q))
        .collect();
    let trace = ApproxTrace {
        w,
        sum,
        omega,
        kappa,
        log2_sum,
        g,
    };
    (out, trace)
}

/// Largest elementwise `|approx - exact|` over one frame.
pub fn max_abs_error(frame: &LogitFrame, params: &SoftmaxParams, q: u8) -> f64 {
    let exact = softmax_exact_frame(frame);
    softmax_approx(frame, params, q)
        .iter()
        .zip(&exact)
        .map(|(a, e)| (a.to_f64() - e).abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub d1: QConst,
    pub d2: QConst,
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Index into `rows` of the smallest maximum error; earliest row wins ties.
    pub best: usize,
}

/// Scores every `(d1, d2)` candidate against exact softmax over `corpus`.
/// Returns `None` when either input is empty.
pub fn sweep_bias_params(
    candidates: &[(QConst, QConst)],
    corpus: &[LogitFrame],
    base: &SoftmaxParams,
    q: u8,
) -> Option<SweepReport> {
    if candidates.is_empty() || corpus.is_empty() {
        return None;
    }
    let exact: Vec<Vec<f64>> = corpus.iter().map(softmax_exact_frame).collect();
    let rows: Vec<SweepRow> = candidates
        .iter()
        .map(|&(d1, d2)| {
            let params = base.with_biases(d1, d2);
            let mut max_err = 0.0f64;
            let mut total = 0.0;
            let mut count = 0usize;
            for (frame, ex) in corpus.iter().zip(&exact) {
                for (a, e) in softmax_approx(frame, &params, q).iter().zip(ex) {
                    let err = (a.to_f64() - e).abs();
                    max_err = max_err.max(err);
                    total += err;
                    count += 1;
                }
            }
            SweepRow {
                d1,
                d2,
                max_abs_error: max_err,
                mean_abs_error: total / count as f64,
            }
        })
        .collect();
    let best = rows
        .iter()
        .enumerate()
        .fold(0, |best, (i, r)| {
            if r.max_abs_error < rows[best].max_abs_error {
                i
            } else {
                best
            }
        });
    Some(SweepReport { rows, best })
}

/// Table of the preset bias pairs as constants.
pub fn bias_presets() -> Vec<(QConst, QConst)> {
    BIAS_PRESETS
        .iter()
        .map(|(a, b)| {
            (
                QConst::from_binary(a, BIAS_FRAC).expect("preset literal"),
                QConst::from_binary(b, BIAS_FRAC).expect("preset literal"),
            )
        })
        .collect()
}
