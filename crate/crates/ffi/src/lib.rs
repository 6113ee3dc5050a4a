//! C interface to the `ctcfx` decoder.
//!
//! Every function returns a [`CtcStatus`]; on failure a description is kept
//! per thread and can be read with [`ctc_last_error`]. Handles are opaque
//! and must be released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ctcfx::accounting::{compression_ratio, StorageParams};
use ctcfx::io::ConfigFile;
use ctcfx::lm::resolve_prefix;
use ctcfx::{
    compile, extend_probs, softmax_approx, Alphabet, BeamDecoder, CompiledDict, DecodeConfig,
    DecodeError, DictWidths, FixedArith, LogitFrame, QLogit, QProb, SoftmaxParams,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CtcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    Dictionary = 4,
    Decode = 5,
    BeamCollapse = 6,
    BufferTooSmall = 7,
    Config = 8,
    Panic = 9,
}

/// Compiled dictionary.
pub struct CtcDict {
    dict: CompiledDict,
}

/// Streaming fixed-point decoder.
pub struct CtcDecoder {
    // borrows `dict`; dropped first
    inner: Option<BeamDecoder<'static, FixedArith>>,
    dict: *mut CompiledDict,
    params: SoftmaxParams,
    failed: Option<CtcStatus>,
}

impl Drop for CtcDecoder {
    fn drop(&mut self) {
        self.inner = None;
        if !self.dict.is_null() {
            drop(unsafe { Box::from_raw(self.dict) });
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

struct Fail(CtcStatus, String);

impl From<DecodeError> for Fail {
    fn from(e: DecodeError) -> Self {
        let code = match e {
            DecodeError::BeamCollapse { .. } => CtcStatus::BeamCollapse,
            DecodeError::Config(_) => CtcStatus::Config,
            _ => CtcStatus::Decode,
        };
        Fail(code, e.to_string())
    }
}

impl From<ctcfx::DictError> for Fail {
    fn from(e: ctcfx::DictError) -> Self {
        Fail(CtcStatus::Dictionary, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CtcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CtcStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            CtcStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(CtcStatus::NullPointer, "null pointer argument".into())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(CtcStatus::InvalidUtf8, e.to_string()))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn alphabet_arg(labels: *const c_char) -> Result<Alphabet, Fail> {
    if labels.is_null() {
        return Ok(Alphabet::english());
    }
    Alphabet::new(str_arg(labels)?.chars().collect())
        .map_err(|e| Fail(CtcStatus::InvalidArgument, e.to_string()))
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ctc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Compiles `count` NUL-terminated words. `alphabet` lists every label in
/// order, separator `_` last; NULL selects `a`-`z`, apostrophe, `_`.
///
/// # Safety
/// `words` must point to `count` valid C strings and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctc_dict_compile(
    words: *const *const c_char,
    count: usize,
    alphabet: *const c_char,
    out: *mut *mut CtcDict,
) -> CtcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let alphabet = alphabet_arg(alphabet)?;
        let list = slice_arg(words, count)?
            .iter()
            .map(|&w| str_arg(w))
            .collect::<Result<Vec<&str>, _>>()?;
        let dict = compile(&list, &alphabet, DictWidths::for_alphabet(&alphabet))?;
        *out = Box::into_raw(Box::new(CtcDict { dict }));
        Ok(())
    })
}

/// Loads a serialized dictionary.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctc_dict_load(data: *const u8, len: usize, out: *mut *mut CtcDict) -> CtcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let dict = CompiledDict::from_bytes(slice_arg(data, len)?)?;
        *out = Box::into_raw(Box::new(CtcDict { dict }));
        Ok(())
    })
}

/// Serializes `dict` into `buf`. `*len` receives the blob size; when `cap`
/// is too small nothing is written and `BufferTooSmall` is returned.
///
/// # Safety
/// `dict` must be a live handle; `buf` must hold `cap` bytes; `len` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ctc_dict_save(
    dict: *const CtcDict,
    buf: *mut u8,
    cap: usize,
    len: *mut usize,
) -> CtcStatus {
    guard(|| {
        let dict = dict.as_ref().ok_or_else(null)?;
        if len.is_null() {
            return Err(null());
        }
        let bytes = dict.dict.to_bytes();
        *len = bytes.len();
        if cap < bytes.len() {
            return Err(Fail(CtcStatus::BufferTooSmall, format!("need {} bytes", bytes.len())));
        }
        if buf.is_null() {
            return Err(null());
        }
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
        Ok(())
    })
}

/// Node count, or 0 for a NULL handle.
///
/// # Safety
/// `dict` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ctc_dict_node_count(dict: *const CtcDict) -> usize {
    dict.as_ref().map_or(0, |d| d.dict.node_count())
}

/// Number of labels `K`, or 0 for a NULL handle.
///
/// # Safety
/// `dict` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ctc_dict_k(dict: *const CtcDict) -> usize {
    dict.as_ref().map_or(0, |d| d.dict.k())
}

/// Follows the labels `prefix[0..len]` (each in `1..=K`) from the root.
/// `*found` is 0 when the prefix leaves the dictionary. Otherwise
/// `allowed[k - 1]` is 1 when label `k` may follow, and `next[k - 1]` is the
/// resulting pointer; both arrays must hold `K` entries.
///
/// # Safety
/// `dict` must be a live handle; the arrays must be valid for the sizes
/// above.
#[no_mangle]
pub unsafe extern "C" fn ctc_dict_probe(
    dict: *const CtcDict,
    prefix: *const u16,
    len: usize,
    found: *mut u8,
    allowed: *mut u8,
    next: *mut u32,
) -> CtcStatus {
    guard(|| {
        let dict = &dict.as_ref().ok_or_else(null)?.dict;
        if found.is_null() || allowed.is_null() || next.is_null() {
            return Err(null());
        }
        let k = dict.k();
        let Some(dp) = resolve_prefix(dict, slice_arg(prefix, len)?)? else {
            *found = 0;
            return Ok(());
        };
        *found = 1;
        let v = extend_probs(dict, dp)?;
        for i in 0..k {
            *allowed.add(i) = v.allowed[i] as u8;
            *next.add(i) = v.next_ptr[i].address();
        }
        Ok(())
    })
}

/// # Safety
/// `dict` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ctc_dict_free(dict: *mut CtcDict) {
    if !dict.is_null() {
        drop(Box::from_raw(dict));
    }
}

unsafe fn new_decoder(
    config: DecodeConfig,
    params: SoftmaxParams,
    dict: *const CtcDict,
    out: *mut *mut CtcDecoder,
) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    let owned = match dict.as_ref() {
        Some(d) => Box::into_raw(Box::new(d.dict.clone())),
        None => ptr::null_mut(),
    };
    let borrowed: Option<&'static CompiledDict> = owned.as_ref();
    let arith = FixedArith::new(config.q);
    let mut handle = Box::new(CtcDecoder {
        inner: None,
        dict: owned,
        params,
        failed: None,
    });
    handle.inner = Some(BeamDecoder::new(config, arith, borrowed)?);
    *out = Box::into_raw(handle);
    Ok(())
}

/// Decoder for frames of `k` labels plus blank with beam width `w`,
/// `q = 30` and the default softmax constants. With a non-NULL `dict` the
/// dictionary constrains every hypothesis; the handle keeps its own copy.
///
/// # Safety
/// `dict` must be NULL or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctc_decoder_new(
    k: usize,
    w: usize,
    adjust: bool,
    dict: *const CtcDict,
    out: *mut *mut CtcDecoder,
) -> CtcStatus {
    guard(|| {
        let config = DecodeConfig::new(k, w)
            .with_adjust(adjust)
            .with_lm(!dict.is_null());
        new_decoder(config, SoftmaxParams::default(), dict, out)
    })
}

/// Like [`ctc_decoder_new`] with settings read from a TOML document, using
/// the same keys as the command-line configuration file.
///
/// # Safety
/// `toml` must be a valid C string; see [`ctc_decoder_new`].
#[no_mangle]
pub unsafe extern "C" fn ctc_decoder_new_with_config(
    k: usize,
    toml: *const c_char,
    dict: *const CtcDict,
    out: *mut *mut CtcDecoder,
) -> CtcStatus {
    guard(|| {
        let file = ConfigFile::parse(str_arg(toml)?).map_err(|e| Fail(CtcStatus::Config, e.to_string()))?;
        let config = file
            .decode_config(k, !dict.is_null())
            .map_err(|e| Fail(CtcStatus::Config, e.to_string()))?;
        let params = file
            .softmax_params()
            .map_err(|e| Fail(CtcStatus::Config, e.to_string()))?;
        new_decoder(config, params, dict, out)
    })
}

unsafe fn step_with(
    dec: *mut CtcDecoder,
    make: impl FnOnce(&SoftmaxParams, u8) -> Result<Vec<QProb>, Fail>,
) -> CtcStatus {
    guard(|| {
        let h = dec.as_mut().ok_or_else(null)?;
        if let Some(code) = h.failed {
            return Err(Fail(code, "decoder already failed".into()));
        }
        let inner = h.inner.as_mut().ok_or_else(null)?;
        let probs = make(&h.params, inner.config().q)?;
        inner.step(&probs).map_err(|e| {
            let f = Fail::from(e);
            if f.0 == CtcStatus::BeamCollapse {
                h.failed = Some(f.0);
            }
            f
        })
    })
}

/// Feeds one frame of raw network outputs: `K + 1` signed bytes with two
/// fractional bits, blank last. The approximate softmax runs first.
///
/// # Safety
/// `dec` must be a live handle; `logits` must hold `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ctc_decoder_push_logits(
    dec: *mut CtcDecoder,
    logits: *const i8,
    len: usize,
) -> CtcStatus {
    step_with(dec, |params, q| {
        let frame = LogitFrame::from_raw(slice_arg(logits, len)?);
        Ok(softmax_approx(&frame, params, q))
    })
}

/// Feeds one frame of probabilities, `K + 1` values, blank last.
///
/// # Safety
/// `dec` must be a live handle; `probs` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn ctc_decoder_push_probs(
    dec: *mut CtcDecoder,
    probs: *const f64,
    len: usize,
) -> CtcStatus {
    step_with(dec, |_, q| {
        Ok(slice_arg(probs, len)?
            .iter()
            .map(|&p| QProb::from_f64(p, q))
            .collect())
    })
}

/// Copies the current best sentence (labels `1..=K`) into `labels`.
/// `*len` receives its length; `BufferTooSmall` when `cap` is short.
/// `score` may be NULL; it receives the stored, scaled probability.
///
/// # Safety
/// `dec` must be a live handle; `labels` must hold `cap` entries; `len`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn ctc_decoder_best(
    dec: *const CtcDecoder,
    labels: *mut u16,
    cap: usize,
    len: *mut usize,
    score: *mut f64,
) -> CtcStatus {
    guard(|| {
        let h = dec.as_ref().ok_or_else(null)?;
        if len.is_null() {
            return Err(null());
        }
        let inner = h.inner.as_ref().ok_or_else(null)?;
        let (sentence, pr) = inner
            .best()
            .ok_or_else(|| Fail(CtcStatus::BeamCollapse, "beam is empty".into()))?;
        *len = sentence.len();
        if !score.is_null() {
            *score = pr.to_f64();
        }
        if cap < sentence.len() {
            return Err(Fail(CtcStatus::BufferTooSmall, format!("need {} labels", sentence.len())));
        }
        if !sentence.is_empty() {
            if labels.is_null() {
                return Err(null());
            }
            ptr::copy_nonoverlapping(sentence.as_ptr(), labels, sentence.len());
        }
        Ok(())
    })
}

/// Frames consumed so far, or 0 for a NULL handle.
///
/// # Safety
/// `dec` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ctc_decoder_frames(dec: *const CtcDecoder) -> usize {
    dec.as_ref()
        .and_then(|h| h.inner.as_ref())
        .map_or(0, |d| d.state().t)
}

/// # Safety
/// `dec` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ctc_decoder_free(dec: *mut CtcDecoder) {
    if !dec.is_null() {
        drop(Box::from_raw(dec));
    }
}

/// Approximate softmax of one frame with the default constants and
/// `q = 30`. `out` receives `len` probabilities.
///
/// # Safety
/// `logits` must hold `len` bytes and `out` `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ctc_softmax_approx(logits: *const i8, len: usize, out: *mut f64) -> CtcStatus {
    guard(|| {
        if len == 0 {
            return Err(Fail(CtcStatus::InvalidArgument, "empty frame".into()));
        }
        if out.is_null() {
            return Err(null());
        }
        let frame = LogitFrame(slice_arg(logits, len)?.iter().map(|&r| QLogit(r)).collect());
        for (i, p) in softmax_approx(&frame, &SoftmaxParams::default(), 30).iter().enumerate() {
            *out.add(i) = p.to_f64();
        }
        Ok(())
    })
}

/// Storage ratio of the textbook beam over the bounded one; NaN for
/// `k < 2` or `w == 0`.
#[no_mangle]
pub extern "C" fn ctc_compression_ratio(k: u64, w: u64, t: u64, prob_bits: u64, sl_bits: u64) -> f64 {
    if k < 2 || w == 0 {
        return f64::NAN;
    }
    compression_ratio(&StorageParams {
        k,
        w,
        t,
        prob_bits,
        sl_bits,
    })
}
