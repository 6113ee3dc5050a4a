//! Dictionary language-model visitor over a [`CompiledDict`].
//!
//! A dictionary pointer names the record of the last character consumed in
//! the current partial word; the root (address 0) means "between words".
//! One visit sweeps the pointer's child chain once and reports, for every
//! label, whether appending it keeps the sentence inside the dictionary and
//! where the pointer moves if it does.

use std::fmt;

use crate::dict::CompiledDict;
use crate::error::DictError;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DictPtr(pub u32);

impl DictPtr {
    pub const ROOT: DictPtr = DictPtr(0);

    pub fn address(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for DictPtr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

impl fmt::Display for DictPtr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Per-label transition permissions and successor pointers. Index `k - 1`
/// holds label `k`; the last entry is the separator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionVerdict {
    pub allowed: Vec<bool>,
    pub next_ptr: Vec<DictPtr>,
}

impl ExtensionVerdict {
    pub fn new(k: usize, inv: u32) -> Self {
        Self {
            allowed: vec![false; k],
            next_ptr: vec![DictPtr(inv); k],
        }
    }

    pub fn is_allowed(&self, label: u16) -> bool {
        self.allowed[label as usize - 1]
    }

    pub fn next(&self, label: u16) -> DictPtr {
        self.next_ptr[label as usize - 1]
    }

    /// Labels allowed, in ascending order.
    pub fn allowed_labels(&self) -> impl Iterator<Item = u16> + '_ {
        self.allowed
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| i as u16 + 1)
    }
}

/// Computes the verdict for `dp`.
pub fn extend_probs(dict: &CompiledDict, dp: DictPtr) -> Result<ExtensionVerdict, DictError> {
    let mut v = ExtensionVerdict::new(dict.k(), dict.inv());
    extend_probs_into(dict, dp, &mut v)?;
    Ok(v)
}

#[derive(PartialEq, Eq)]
enum ChainEnd {
    Open,
    NoSeparator,
    Separator,
}

/// Like [`extend_probs`], reusing `out`'s buffers.
pub fn extend_probs_into(
    dict: &CompiledDict,
    dp: DictPtr,
    out: &mut ExtensionVerdict,
) -> Result<(), DictError> {
    let k = dict.k();
    let inv = dict.inv();
    if dp.0 == inv {
        return Err(DictError::InvalidPointer(dp.0));
    }
    let malformed = |addr: usize| {
        DictError::MalformedBlob(format!("chain walk reaches address {addr} of {}", dict.node_count()))
    };
    out.allowed.clear();
    out.allowed.resize(k, false);
    out.next_ptr.clear();
    out.next_ptr.resize(k, DictPtr(inv));

    let mut address = dp.0 as usize;
    let head = dict.record(address).ok_or_else(|| malformed(address))?;
    let mut end = ChainEnd::Open;
    if head.blank_left {
        end = ChainEnd::Separator;
    } else {
        address += 1;
        let mut data = dict.record(address).ok_or_else(|| malformed(address))?;
        for label in 1..k as u16 {
            if end == ChainEnd::Open && data.char_index == label {
                out.allowed[label as usize - 1] = true;
                out.next_ptr[label as usize - 1] = DictPtr(address as u32);
                if data.rel_right == 0 {
                    end = ChainEnd::NoSeparator;
                } else if data.rel_right == dict.sentinel() {
                    end = ChainEnd::Separator;
                } else {
                    address += data.rel_right as usize;
                    data = dict.record(address).ok_or_else(|| malformed(address))?;
                }
            }
        }
    }
    match end {
        ChainEnd::Open => {
            // unreachable for blobs produced by the compiler: chains are sorted
            // and every chain character lies in 1..K
            return Err(DictError::MalformedBlob(format!(
                "sibling chain below {} is unsorted or unterminated",
                dp.0
            )));
        }
        ChainEnd::NoSeparator => {}
        ChainEnd::Separator => {
            out.allowed[k - 1] = true;
            out.next_ptr[k - 1] = DictPtr::ROOT;
        }
    }
    Ok(())
}

/// Follows `labels` from the root. `None` when the sequence leaves the
/// dictionary.
pub fn resolve_prefix(dict: &CompiledDict, labels: &[u16]) -> Result<Option<DictPtr>, DictError> {
    let mut dp = DictPtr::ROOT;
    let mut v = ExtensionVerdict::new(dict.k(), dict.inv());
    for &label in labels {
        if label == 0 || label as usize > dict.k() {
            return Ok(None);
        }
        extend_probs_into(dict, dp, &mut v)?;
        if !v.is_allowed(label) {
            return Ok(None);
        }
        dp = v.next(label);
    }
    Ok(Some(dp))
}
