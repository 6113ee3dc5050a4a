use crate::error::AlphabetError;

/// Ordered label set. Labels are numbered `1..=K`; label `K` is the word
/// separator `'_'` and the CTC blank is the implicit label `K + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<char>,
}

impl Alphabet {
    pub const SEPARATOR: char = '_';

    pub fn new(labels: Vec<char>) -> Result<Self, AlphabetError> {
        if labels.len() < 2 {
            return Err(AlphabetError::TooSmall);
        }
        if labels.len() > 255 {
            return Err(AlphabetError::TooLarge(labels.len()));
        }
        for (i, &c) in labels.iter().enumerate() {
            if c.is_control() || c.is_whitespace() {
                return Err(AlphabetError::BadLabel(c.to_string()));
            }
            if labels[..i].contains(&c) {
                return Err(AlphabetError::Duplicate(c));
            }
        }
        if labels.last() != Some(&Self::SEPARATOR) {
            return Err(AlphabetError::SeparatorNotLast);
        }
        Ok(Self { labels })
    }

    /// `a`-`z`, apostrophe, separator (K = 28).
    pub fn english() -> Self {
        let mut labels: Vec<char> = ('a'..='z').collect();
        labels.push('\'');
        labels.push(Self::SEPARATOR);
        Self { labels }
    }

    /// Parses one label per line; blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, AlphabetError> {
        let mut labels = Vec::new();
        for line in text.lines() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let mut chars = line.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => labels.push(c),
                _ => return Err(AlphabetError::BadLabel(line.to_string())),
            }
        }
        Self::new(labels)
    }

    pub fn to_text(&self) -> String {
        self.labels.iter().map(|c| format!("{c}\n")).collect()
    }

    /// Number of labels `K`, separator included.
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn separator_index(&self) -> u16 {
        self.labels.len() as u16
    }

    pub fn blank_index(&self) -> u16 {
        self.labels.len() as u16 + 1
    }

    /// `ceil(log2 K)`.
    pub fn label_bits(&self) -> u32 {
        ceil_log2(self.k() as u64)
    }

    pub fn index_of(&self, c: char) -> Option<u16> {
        self.labels.iter().position(|&l| l == c).map(|i| i as u16 + 1)
    }

    pub fn label(&self, index: u16) -> Option<char> {
        (index as usize).checked_sub(1).and_then(|i| self.labels.get(i).copied())
    }

    pub fn labels(&self) -> &[char] {
        &self.labels
    }

    /// Renders a label sequence; out-of-range labels become `?`.
    pub fn render(&self, labels: &[u16]) -> String {
        labels.iter().map(|&l| self.label(l).unwrap_or('?')).collect()
    }
}

/// `ceil(log2 n)`, with `ceil_log2(1) == 0`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}
