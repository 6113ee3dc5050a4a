use std::collections::VecDeque;

use crate::alphabet::Alphabet;
use crate::error::DictError;

/// Node of the multi-branch dictionary trie.
///
/// The separator child that closes a word is not materialized: `ends_word`
/// stands for it, and it always sorts after every character child.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TrieNode {
    /// Character label `1..K`; 0 for the root.
    pub char_index: u16,
    /// Character children in ascending label order.
    pub children: Vec<TrieNode>,
    pub ends_word: bool,
}

impl TrieNode {
    fn child_mut(&mut self, c: u16) -> &mut TrieNode {
        let pos = match self.children.binary_search_by_key(&c, |n| n.char_index) {
            Ok(pos) => pos,
            Err(pos) => {
                self.children.insert(
                    pos,
                    TrieNode {
                        char_index: c,
                        ..TrieNode::default()
                    },
                );
                pos
            }
        };
        &mut self.children[pos]
    }

    /// Stored node count: this node and every character descendant.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(TrieNode::node_count).sum::<usize>()
    }

    /// Every word below this node as label sequences, in sorted order.
    pub fn words(&self) -> Vec<Vec<u16>> {
        fn walk(node: &TrieNode, prefix: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
            for child in &node.children {
                prefix.push(child.char_index);
                if child.ends_word {
                    out.push(prefix.clone());
                }
                walk(child, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

/// Maps a word to its label sequence, rejecting the separator and
/// characters outside the alphabet.
pub fn word_labels(word: &str, alphabet: &Alphabet) -> Result<Vec<u16>, DictError> {
    word.chars()
        .map(|ch| match alphabet.index_of(ch) {
            Some(i) if i != alphabet.separator_index() => Ok(i),
            _ => Err(DictError::InvalidChar {
                word: word.to_string(),
                ch,
            }),
        })
        .collect()
}

/// Builds the trie of a word list. Duplicates collapse.
pub fn build_trie<S: AsRef<str>>(words: &[S], alphabet: &Alphabet) -> Result<TrieNode, DictError> {
    if words.is_empty() {
        return Err(DictError::EmptyWordList);
    }
    let mut root = TrieNode::default();
    for (line, word) in words.iter().enumerate() {
        let word = word.as_ref();
        if word.is_empty() {
            return Err(DictError::EmptyWord(line + 1));
        }
        let labels = word_labels(word, alphabet)?;
        let mut node = &mut root;
        for c in labels {
            node = node.child_mut(c);
        }
        node.ends_word = true;
    }
    Ok(root)
}

/// Left-child/right-sibling node. Separator nodes are folded into the two
/// flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryNode {
    pub char_index: u16,
    /// The only original child is the separator.
    pub blank_left: bool,
    pub left: Option<usize>,
    pub right: Option<usize>,
    /// The next original sibling is the separator.
    pub right_is_separator: bool,
}

/// Arena-backed binary trie, node 0 is the root. Arena order is breadth
/// first and unrelated to storage addresses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryTrie {
    pub nodes: Vec<BinaryNode>,
}

impl BinaryTrie {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// First child becomes the left link, next sibling the right link.
pub fn to_binary_trie(root: &TrieNode) -> BinaryTrie {
    let mut nodes = vec![BinaryNode {
        char_index: 0,
        blank_left: false,
        left: None,
        right: None,
        right_is_separator: false,
    }];
    let mut queue: VecDeque<(&TrieNode, usize)> = VecDeque::from([(root, 0)]);
    while let Some((node, id)) = queue.pop_front() {
        if node.children.is_empty() {
            // a word ending at the root is impossible, so this is a leaf word
            nodes[id].blank_left = id != 0 && node.ends_word;
            continue;
        }
        let first = nodes.len();
        let last = node.children.len() - 1;
        for (i, child) in node.children.iter().enumerate() {
            let cid = nodes.len();
            nodes.push(BinaryNode {
                char_index: child.char_index,
                blank_left: false,
                left: None,
                right: (i < last).then_some(cid + 1),
                right_is_separator: i == last && node.ends_word,
            });
            queue.push_back((child, cid));
        }
        nodes[id].left = Some(first);
    }
    BinaryTrie { nodes }
}
