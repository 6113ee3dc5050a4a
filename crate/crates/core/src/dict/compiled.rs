use crate::alphabet::{ceil_log2, Alphabet};
use crate::error::DictError;

use super::trie::BinaryTrie;

pub const MAGIC: &[u8; 4] = b"CDIC";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;

/// Field widths of one stored record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DictWidths {
    pub char_bits: u8,
    pub rel_bits: u8,
    pub addr_bits: u8,
}

impl Default for DictWidths {
    fn default() -> Self {
        Self {
            char_bits: 5,
            rel_bits: 16,
            addr_bits: 19,
        }
    }
}

impl DictWidths {
    /// Default relative/absolute widths with the character field sized for
    /// `alphabet`.
    pub fn for_alphabet(alphabet: &Alphabet) -> Self {
        Self {
            char_bits: ceil_log2(alphabet.k() as u64).max(1) as u8,
            ..Self::default()
        }
    }

    pub fn record_bits(&self) -> u32 {
        self.char_bits as u32 + 1 + self.rel_bits as u32
    }

    /// Relative-right value meaning "the next sibling is the separator".
    pub fn sentinel(&self) -> u32 {
        (1u32 << self.rel_bits) - 1
    }

    /// Invalid-pointer marker.
    pub fn inv(&self) -> u32 {
        (1u32 << self.addr_bits) - 1
    }

    fn validate(&self, k: usize) -> Result<(), DictError> {
        let bad = |m: String| Err(DictError::BadWidths(m));
        if self.char_bits == 0 || self.rel_bits < 2 || self.addr_bits == 0 {
            return bad("all widths must be positive, rel_bits >= 2".into());
        }
        if self.record_bits() > 32 {
            return bad(format!("record of {} bits exceeds 32", self.record_bits()));
        }
        if self.addr_bits > 31 {
            return bad("addr_bits must be <= 31".into());
        }
        if k < 2 || k > 1 << self.char_bits {
            return bad(format!("{} character labels do not fit {} bits", k.saturating_sub(1), self.char_bits));
        }
        Ok(())
    }
}

/// Preorder-packed binary trie. Record `i` is stored at address `i`; its
/// first character child, when it has one, sits at `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledDict {
    k: u8,
    widths: DictWidths,
    /// One record per node, right-aligned: `char | blank_left | rel_right`.
    records: Vec<u32>,
}

/// Decoded view of one record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Record {
    pub char_index: u16,
    pub blank_left: bool,
    pub rel_right: u32,
}

impl CompiledDict {
    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn widths(&self) -> DictWidths {
        self.widths
    }

    pub fn node_count(&self) -> usize {
        self.records.len()
    }

    pub fn inv(&self) -> u32 {
        self.widths.inv()
    }

    pub fn sentinel(&self) -> u32 {
        self.widths.sentinel()
    }

    pub fn raw_record(&self, address: usize) -> Option<u32> {
        self.records.get(address).copied()
    }

    pub fn record(&self, address: usize) -> Option<Record> {
        let raw = *self.records.get(address)?;
        let w = &self.widths;
        Some(Record {
            char_index: (raw >> (w.rel_bits as u32 + 1)) as u16,
            blank_left: (raw >> w.rel_bits) & 1 == 1,
            rel_right: raw & w.sentinel(),
        })
    }

    /// Serialized blob: 16-byte little-endian header, then records packed
    /// MSB first and zero-padded to a byte boundary.
    pub fn to_bytes(&self) -> Vec<u8> {
        let r = self.widths.record_bits();
        let payload_bits = self.records.len() * r as usize;
        let mut out = Vec::with_capacity(HEADER_LEN + payload_bits.div_ceil(8));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(self.widths.char_bits);
        out.push(self.widths.rel_bits);
        out.push(self.widths.addr_bits);
        out.push(self.k);
        out.extend_from_slice(&(self.records.len() as u32).to_le_bytes());
        out.extend_from_slice(&[0, 0]);

        let mut acc: u64 = 0;
        let mut nbits = 0u32;
        for &rec in &self.records {
            acc = (acc << r) | rec as u64;
            nbits += r;
            while nbits >= 8 {
                nbits -= 8;
                out.push((acc >> nbits) as u8);
            }
            acc &= (1u64 << nbits) - 1;
        }
        if nbits > 0 {
            out.push((acc << (8 - nbits)) as u8);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DictError> {
        let malformed = |m: &str| DictError::MalformedBlob(m.to_string());
        if bytes.len() < HEADER_LEN {
            return Err(malformed("shorter than the header"));
        }
        if &bytes[..4] != MAGIC {
            return Err(malformed("bad magic"));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != FORMAT_VERSION {
            return Err(DictError::MalformedBlob(format!("unsupported version {version}")));
        }
        let widths = DictWidths {
            char_bits: bytes[6],
            rel_bits: bytes[7],
            addr_bits: bytes[8],
        };
        let k = bytes[9];
        widths
            .validate(k as usize)
            .map_err(|e| DictError::MalformedBlob(e.to_string()))?;
        let node_count = u32::from_le_bytes([bytes[10], bytes[11], bytes[12], bytes[13]]) as usize;
        if node_count == 0 {
            return Err(malformed("no root record"));
        }
        if node_count as u64 >= widths.inv() as u64 {
            return Err(malformed("node count exceeds the address space"));
        }
        let r = widths.record_bits();
        let payload = &bytes[HEADER_LEN..];
        let need = (node_count * r as usize).div_ceil(8);
        if payload.len() != need {
            return Err(DictError::MalformedBlob(format!(
                "payload is {} bytes, expected {need}",
                payload.len()
            )));
        }
        let mut records = Vec::with_capacity(node_count);
        let mut acc: u64 = 0;
        let mut nbits = 0u32;
        let mut bytes_iter = payload.iter();
        for _ in 0..node_count {
            while nbits < r {
                let b = *bytes_iter.next().expect("length checked");
                acc = (acc << 8) | b as u64;
                nbits += 8;
            }
            nbits -= r;
            records.push((acc >> nbits) as u32 & ((1u64 << r) - 1) as u32);
            acc &= (1u64 << nbits) - 1;
        }
        let dict = Self { k, widths, records };
        dict.check_records()?;
        Ok(dict)
    }

    fn check_records(&self) -> Result<(), DictError> {
        let max_char = self.k as u16 - 1;
        for addr in 0..self.node_count() {
            let rec = self.record(addr).expect("in range");
            if addr == 0 {
                if rec.char_index != 0 || rec.blank_left || rec.rel_right != 0 {
                    return Err(DictError::MalformedBlob("root record must be empty".into()));
                }
                continue;
            }
            if rec.char_index == 0 || rec.char_index > max_char {
                return Err(DictError::MalformedBlob(format!(
                    "record {addr} has character {} outside 1..={max_char}",
                    rec.char_index
                )));
            }
            if rec.rel_right != 0
                && rec.rel_right != self.sentinel()
                && addr + rec.rel_right as usize >= self.node_count()
            {
                return Err(DictError::MalformedBlob(format!(
                    "record {addr} jumps past the end"
                )));
            }
        }
        Ok(())
    }

    /// Reconstructs the word set as sorted label sequences.
    pub fn enumerate(&self) -> Result<Vec<Vec<u16>>, DictError> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        if self.node_count() > 1 {
            self.walk_chain(1, &mut prefix, &mut out)?;
        }
        out.sort();
        Ok(out)
    }

    /// Walks the sibling chain starting at `start`, recursing into children.
    fn walk_chain(
        &self,
        start: usize,
        prefix: &mut Vec<u16>,
        out: &mut Vec<Vec<u16>>,
    ) -> Result<(), DictError> {
        let mut addr = start;
        let mut last_char = 0u16;
        loop {
            let rec = self.record(addr).ok_or_else(|| {
                DictError::MalformedBlob(format!("chain reaches address {addr} past the end"))
            })?;
            if rec.char_index <= last_char {
                return Err(DictError::MalformedBlob(format!(
                    "sibling chain not ascending at {addr}"
                )));
            }
            last_char = rec.char_index;
            prefix.push(rec.char_index);
            if rec.blank_left {
                out.push(prefix.clone());
            } else {
                self.walk_chain(addr + 1, prefix, out)?;
            }
            prefix.pop();
            match rec.rel_right {
                0 => return Ok(()),
                r if r == self.sentinel() => {
                    if prefix.is_empty() {
                        return Err(DictError::MalformedBlob("empty word in root chain".into()));
                    }
                    out.push(prefix.clone());
                    return Ok(());
                }
                r => addr += r as usize,
            }
        }
    }

    /// Enumerated words rendered with `alphabet`.
    pub fn words(&self, alphabet: &Alphabet) -> Result<Vec<String>, DictError> {
        Ok(self
            .enumerate()?
            .iter()
            .map(|w| alphabet.render(w))
            .collect())
    }
}

/// Lays the binary trie out in preorder and packs each node.
pub fn emit_compiled(trie: &BinaryTrie, k: usize, widths: DictWidths) -> Result<CompiledDict, DictError> {
    widths.validate(k)?;
    let n = trie.len();
    if n as u64 >= widths.inv() as u64 {
        return Err(DictError::AddressSpaceExceeded {
            node_count: n,
            addr_bits: widths.addr_bits,
        });
    }
    // preorder: node, left subtree, right subtree
    let mut address = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        address[id] = order.len();
        order.push(id);
        let node = &trie.nodes[id];
        if let Some(r) = node.right {
            stack.push(r);
        }
        if let Some(l) = node.left {
            stack.push(l);
        }
    }
    let sentinel = widths.sentinel();
    let mut records = Vec::with_capacity(n);
    for (addr, &id) in order.iter().enumerate() {
        let node = &trie.nodes[id];
        if let Some(l) = node.left {
            debug_assert_eq!(address[l], addr + 1);
        }
        let rel = match node.right {
            Some(r) => {
                let distance = address[r] - addr;
                if distance as u64 >= sentinel as u64 {
                    return Err(DictError::RelativeAddressOverflow {
                        node: addr,
                        distance,
                        rel_bits: widths.rel_bits,
                    });
                }
                distance as u32
            }
            None if node.right_is_separator => sentinel,
            None => 0,
        };
        let rec = ((node.char_index as u32) << (widths.rel_bits as u32 + 1))
            | ((node.blank_left as u32) << widths.rel_bits)
            | rel;
        records.push(rec);
    }
    Ok(CompiledDict {
        k: k as u8,
        widths,
        records,
    })
}

/// Word list to compiled dictionary in one call.
pub fn compile<S: AsRef<str>>(
    words: &[S],
    alphabet: &Alphabet,
    widths: DictWidths,
) -> Result<CompiledDict, DictError> {
    let trie = super::trie::build_trie(words, alphabet)?;
    emit_compiled(&super::trie::to_binary_trie(&trie), alphabet.k(), widths)
}

#[cfg(test)]
mod tests {
    use super::super::trie::{build_trie, to_binary_trie, BinaryNode};
    use super::*;

    fn english(words: &[&str]) -> CompiledDict {
        compile(words, &Alphabet::english(), DictWidths::default()).unwrap()
    }

    #[test]
    fn root_only() {
        let trie = BinaryTrie {
            nodes: vec![BinaryNode {
                char_index: 0,
                blank_left: false,
                left: None,
                right: None,
                right_is_separator: false,
            }],
        };
        let d = emit_compiled(&trie, 28, DictWidths::default()).unwrap();
        assert_eq!(d.node_count(), 1);
        assert!(d.enumerate().unwrap().is_empty());
    }

    #[test]
    fn single_word_record() {
        let d = english(&["a"]);
        assert_eq!(d.node_count(), 2);
        assert_eq!(
            d.record(1).unwrap(),
            Record {
                char_index: 1,
                blank_left: true,
                rel_right: 0
            }
        );
        assert_eq!(d.record(0).unwrap().char_index, 0);
        // 5 + 1 + 16 = 22 bits per record
        assert_eq!(d.raw_record(1), Some(1 << 17 | 1 << 16));
    }

    #[test]
    fn sentinel_on_last_char_before_separator() {
        let d = english(&["an", "ant"]);
        // root, a, n, t
        assert_eq!(d.node_count(), 4);
        let t = d.record(3).unwrap();
        assert_eq!(t.char_index, 20);
        assert_eq!(t.rel_right, 65535);
        assert!(t.blank_left);
    }

    #[test]
    fn to_tea_counts() {
        let d = english(&["to", "tea"]);
        assert_eq!(d.node_count(), 5);
        let chars: Vec<u16> = (0..5).map(|a| d.record(a).unwrap().char_index).collect();
        // preorder: root, t, e, a, o
        assert_eq!(chars, vec![0, 20, 5, 1, 15]);
        // e's right sibling o is two records further on
        assert_eq!(d.record(2).unwrap().rel_right, 2);
    }

    #[test]
    fn blob_round_trip_and_header() {
        let d = english(&["to", "tea", "ten", "a", "an", "ant"]);
        let bytes = d.to_bytes();
        assert_eq!(&bytes[..4], b"CDIC");
        assert_eq!(bytes.len(), HEADER_LEN + (d.node_count() * 22).div_ceil(8));
        assert_eq!(CompiledDict::from_bytes(&bytes).unwrap(), d);
    }

    #[test]
    fn truncated_blob_rejected() {
        let bytes = english(&["to", "tea"]).to_bytes();
        for cut in [0, 10, bytes.len() - 1] {
            assert!(matches!(
                CompiledDict::from_bytes(&bytes[..cut]),
                Err(DictError::MalformedBlob(_))
            ));
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(CompiledDict::from_bytes(&bad).is_err());
    }

    #[test]
    fn corrupted_jump_rejected() {
        let d = english(&["to", "tea"]);
        let mut records = d.records.clone();
        records[2] = (records[2] & !0xffff) | 100;
        let bad = CompiledDict { records, ..d };
        assert!(matches!(
            CompiledDict::from_bytes(&bad.to_bytes()),
            Err(DictError::MalformedBlob(_))
        ));
        assert!(bad.enumerate().is_err());
    }

    #[test]
    fn relative_overflow_detected() {
        // first child of 'a' has a huge subtree before its sibling
        let widths = DictWidths {
            rel_bits: 2,
            ..DictWidths::default()
        };
        let trie = build_trie(&["aaaa", "b"], &Alphabet::english()).unwrap();
        let err = emit_compiled(&to_binary_trie(&trie), 28, widths).unwrap_err();
        assert!(matches!(err, DictError::RelativeAddressOverflow { distance: 4, .. }));
    }

    #[test]
    fn address_space_exceeded() {
        let widths = DictWidths {
            addr_bits: 2,
            ..DictWidths::default()
        };
        let trie = build_trie(&["abc"], &Alphabet::english()).unwrap();
        let err = emit_compiled(&to_binary_trie(&trie), 28, widths).unwrap_err();
        assert!(matches!(err, DictError::AddressSpaceExceeded { node_count: 4, .. }));
    }
}
