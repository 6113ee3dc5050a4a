//! Dictionary compiler: word list to trie, trie to left-child/right-sibling
//! binary trie, binary trie to a preorder-packed blob.

mod compiled;
mod trie;

pub use compiled::{
    compile, emit_compiled, CompiledDict, DictWidths, Record, FORMAT_VERSION, HEADER_LEN, MAGIC,
};
pub use trie::{build_trie, to_binary_trie, word_labels, BinaryNode, BinaryTrie, TrieNode};

use crate::alphabet::Alphabet;
use crate::error::DictError;

/// Storage cost of one dictionary in each representation, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeReport {
    pub node_count: u64,
    /// Every word spelled out with its closing separator.
    pub list_bits: u64,
    /// `N * K * addr_bits`: one absolute successor address per label.
    pub matrix_trie_bits: u64,
    /// `N * (char_bits + 2 * addr_bits)`.
    pub binary_trie_bits: u64,
    /// `N * (char_bits + 1 + rel_bits)`.
    pub compressed_bits: u64,
}

impl SizeReport {
    pub fn from_node_count(node_count: u64, k: u64, widths: DictWidths) -> Self {
        let (c, r, a) = (
            widths.char_bits as u64,
            widths.rel_bits as u64,
            widths.addr_bits as u64,
        );
        Self {
            node_count,
            list_bits: 0,
            matrix_trie_bits: node_count * k * a,
            binary_trie_bits: node_count * (c + 2 * a),
            compressed_bits: node_count * (c + 1 + r),
        }
    }
}

/// Megabytes as 2^20 bytes.
pub fn bits_to_mb(bits: u64) -> f64 {
    bits as f64 / 8.0 / (1u64 << 20) as f64
}

pub fn report_sizes<S: AsRef<str>>(
    words: &[S],
    alphabet: &Alphabet,
    widths: DictWidths,
) -> Result<SizeReport, DictError> {
    let trie = build_trie(words, alphabet)?;
    let node_count = trie.node_count() as u64;
    let label_bits = alphabet.label_bits() as u64;
    let list_bits = trie
        .words()
        .iter()
        .map(|w| (w.len() as u64 + 1) * label_bits)
        .sum();
    Ok(SizeReport {
        list_bits,
        ..SizeReport::from_node_count(node_count, alphabet.k() as u64, widths)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_dictionary_sizes() {
        let r = SizeReport::from_node_count(425_983, 27, DictWidths::default());
        assert_eq!(r.matrix_trie_bits, 218_529_279);
        assert_eq!(r.binary_trie_bits, 18_317_269);
        assert_eq!(r.compressed_bits, 9_371_626);
        assert_eq!(format!("{:.2}", bits_to_mb(r.matrix_trie_bits)), "26.05");
        assert_eq!(format!("{:.2}", bits_to_mb(r.binary_trie_bits)), "2.18");
        assert_eq!(format!("{:.2}", bits_to_mb(r.compressed_bits)), "1.12");
    }

    #[test]
    fn toy_report() {
        let a = Alphabet::english();
        let r = report_sizes(&["to", "tea"], &a, DictWidths::default()).unwrap();
        assert_eq!(r.node_count, 5);
        assert_eq!(r.compressed_bits, 5 * 22);
        assert_eq!(r.binary_trie_bits, 5 * 43);
        assert_eq!(r.matrix_trie_bits, 5 * 28 * 19);
        // "to_" and "tea_" at 5 bits per label
        assert_eq!(r.list_bits, 7 * 5);
    }
}
