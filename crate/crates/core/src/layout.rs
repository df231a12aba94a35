//! Bit layout of characteristic matrices.
//!
//! Position `j` of trace `t` lives at bit `offset(t) + j` of word `word(t)`; position 0 is the
//! least significant bit of a trace's slot. Rendered as text, position 0 is written leftmost,
//! so the string `10011` is the slot value `0b11001`. The "shift left" that moves information
//! from a later position to an earlier one in the rendered form is therefore a right shift in
//! memory.
//!
//! With [`Packing::OnePerWord`] every trace gets its own 64-bit word. [`Packing::Dense`] (the
//! default) places consecutive traces into the same word while they fit, which shrinks the
//! candidate store by up to 64x for short traces. Kernels never let bits cross a slot
//! boundary, so both packings give the same per-trace semantics.

use crate::trace::{Specification, LANE_WIDTH};

/// Number of doubling steps needed to cover a 64-bit lane.
pub const DOUBLING_STEPS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Packing {
    OnePerWord,
    #[default]
    Dense,
}

/// Per-word constants the kernels need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WordMasks {
    /// Bits that belong to some trace position.
    pub valid: u64,
    /// `step[k]` has bit `i` set iff bit `i + 2^k` is a position of the same trace.
    pub step: [u64; DOUBLING_STEPS],
    /// Position 0 of every trace in the word.
    pub start: u64,
    /// Required position-0 values: set for positive traces.
    pub target: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub word: usize,
    pub offset: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    lengths: Vec<usize>,
    positive: Vec<bool>,
    slots: Vec<Slot>,
    words: Vec<WordMasks>,
    packing: Packing,
}

/// `len` low bits set.
#[inline]
pub fn low_bits(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl Layout {
    pub fn new(spec: &Specification, packing: Packing) -> Self {
        let lengths: Vec<usize> = spec.traces().iter().map(|t| t.len()).collect();
        let positive = (0..spec.len()).map(|t| spec.is_positive(t)).collect();
        Self::from_parts(lengths, positive, packing)
    }

    pub fn from_parts(lengths: Vec<usize>, positive: Vec<bool>, packing: Packing) -> Self {
        assert_eq!(lengths.len(), positive.len());
        let mut slots = Vec::with_capacity(lengths.len());
        let mut words: Vec<WordMasks> = Vec::new();
        let mut used = LANE_WIDTH;
        for (t, &len) in lengths.iter().enumerate() {
            assert!((1..=LANE_WIDTH).contains(&len), "trace length {len} out of range");
            let fits = packing == Packing::Dense && used + len <= LANE_WIDTH;
            if !fits {
                words.push(WordMasks::default());
                used = 0;
            }
            let word = words.len() - 1;
            let offset = used as u32;
            let m = &mut words[word];
            m.valid |= low_bits(len) << offset;
            for (k, step) in m.step.iter_mut().enumerate() {
                let s = 1usize << k;
                if len > s {
                    *step |= low_bits(len - s) << offset;
                }
            }
            m.start |= 1 << offset;
            if positive[t] {
                m.target |= 1 << offset;
            }
            slots.push(Slot { word, offset });
            used += len;
        }
        Self { lengths, positive, slots, words, packing }
    }

    pub fn packing(&self) -> Packing {
        self.packing
    }

    pub fn trace_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Validity mask of trace `t` in slot-relative form: bits `0..length` set.
    pub fn mask(&self, t: usize) -> u64 {
        low_bits(self.lengths[t])
    }

    /// Required value of position 0 of trace `t`.
    pub fn target(&self, t: usize) -> bool {
        self.positive[t]
    }

    pub fn slot(&self, t: usize) -> Slot {
        self.slots[t]
    }

    /// Words per characteristic matrix.
    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[WordMasks] {
        &self.words
    }

    /// Extracts trace `t`'s characteristic sequence from packed words.
    #[inline]
    pub fn row(&self, words: &[u64], t: usize) -> u64 {
        let slot = self.slots[t];
        (words[slot.word] >> slot.offset) & self.mask(t)
    }

    /// Packs per-trace characteristic sequences into words. Bits past a trace's length are
    /// dropped.
    pub fn pack(&self, rows: &[u64]) -> Vec<u64> {
        assert_eq!(rows.len(), self.trace_count());
        let mut out = vec![0u64; self.word_count()];
        for (t, &row) in rows.iter().enumerate() {
            let slot = self.slots[t];
            out[slot.word] |= (row & self.mask(t)) << slot.offset;
        }
        out
    }

    /// Packed matrix with every valid position set.
    pub fn all_ones(&self) -> Vec<u64> {
        self.words.iter().map(|m| m.valid).collect()
    }
}

/// Renders a characteristic sequence with position 0 leftmost.
pub fn cs_to_string(row: u64, len: usize) -> String {
    (0..len).map(|j| if row >> j & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parses the leftmost-is-position-0 form. Panics on characters other than `0`/`1`.
pub fn cs_from_str(s: &str) -> u64 {
    s.bytes().enumerate().fold(0, |acc, (j, b)| match b {
        b'1' => acc | 1 << j,
        b'0' => acc,
        _ => panic!("invalid characteristic sequence `{s}`"),
    })
}
