//! Bit-parallel LTLf semantics on characteristic matrices.
//!
//! A characteristic matrix (CM) holds, for every trace and every position, whether a formula
//! holds there. All connectives are straight-line word operations: `X` is a shift, `F` and
//! `U` are six-step doubling scans. None of the kernels branch on matrix contents.

use crate::formula::Formula;
use crate::layout::{Layout, Packing, WordMasks, DOUBLING_STEPS};
use crate::trace::Specification;

/// Word-level kernels. Each takes the masks of the word it operates on.
pub mod kernel {
    use super::*;

    #[inline(always)]
    pub fn not(a: u64, m: &WordMasks) -> u64 {
        !a & m.valid
    }

    #[inline(always)]
    pub fn and(a: u64, b: u64) -> u64 {
        a & b
    }

    #[inline(always)]
    pub fn or(a: u64, b: u64) -> u64 {
        a | b
    }

    #[inline(always)]
    pub fn next(a: u64, m: &WordMasks) -> u64 {
        (a >> 1) & m.step[0]
    }

    /// Suffix-OR: `cs |= cs shifted by 2^k` for k = 0..6, never crossing a trace slot.
    #[inline(always)]
    pub fn future(a: u64, m: &WordMasks) -> u64 {
        let mut r = a;
        for k in 0..DOUBLING_STEPS {
            r |= (r >> (1u32 << k)) & m.step[k];
        }
        r
    }

    /// After step k, `r` bit j holds iff some i in [j, j + 2^k) has `b` with `a` on [j, i),
    /// and `q` bit j holds iff `a` holds on all of [j, j + 2^k). Both stay within the slot.
    #[inline(always)]
    pub fn until(a: u64, b: u64, m: &WordMasks) -> u64 {
        let mut r = b;
        let mut q = a;
        for k in 0..DOUBLING_STEPS {
            let s = 1u32 << k;
            r |= q & (r >> s) & m.step[k];
            q &= (q >> s) & m.step[k];
        }
        r
    }

    /// Zero iff every position-0 bit in the word matches its target.
    #[inline(always)]
    pub fn separation_defect(a: u64, m: &WordMasks) -> u64 {
        (a & m.start) ^ m.target
    }
}

#[inline]
pub fn not_into(out: &mut [u64], a: &[u64], masks: &[WordMasks]) {
    for ((o, &x), m) in out.iter_mut().zip(a).zip(masks) {
        *o = kernel::not(x, m);
    }
}

#[inline]
pub fn next_into(out: &mut [u64], a: &[u64], masks: &[WordMasks]) {
    for ((o, &x), m) in out.iter_mut().zip(a).zip(masks) {
        *o = kernel::next(x, m);
    }
}

#[inline]
pub fn future_into(out: &mut [u64], a: &[u64], masks: &[WordMasks]) {
    for ((o, &x), m) in out.iter_mut().zip(a).zip(masks) {
        *o = kernel::future(x, m);
    }
}

#[inline]
pub fn and_into(out: &mut [u64], a: &[u64], b: &[u64]) {
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = kernel::and(x, y);
    }
}

#[inline]
pub fn or_into(out: &mut [u64], a: &[u64], b: &[u64]) {
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = kernel::or(x, y);
    }
}

#[inline]
pub fn until_into(out: &mut [u64], a: &[u64], b: &[u64], masks: &[WordMasks]) {
    for (((o, &x), &y), m) in out.iter_mut().zip(a).zip(b).zip(masks) {
        *o = kernel::until(x, y, m);
    }
}

#[inline]
pub fn separates_words(words: &[u64], masks: &[WordMasks]) -> bool {
    words
        .iter()
        .zip(masks)
        .fold(0, |acc, (&w, m)| acc | kernel::separation_defect(w, m))
        == 0
}

/// Truth value of a formula at every position of every trace, packed per [`Layout`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharacteristicMatrix {
    words: Vec<u64>,
}

impl CharacteristicMatrix {
    pub fn from_words(words: Vec<u64>) -> Self {
        Self { words }
    }

    pub fn from_rows(layout: &Layout, rows: &[u64]) -> Self {
        Self { words: layout.pack(rows) }
    }

    /// Every valid position set; the matrix of a tautology.
    pub fn all_ones(layout: &Layout) -> Self {
        Self { words: layout.all_ones() }
    }

    pub fn zeros(layout: &Layout) -> Self {
        Self { words: vec![0; layout.word_count()] }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn into_words(self) -> Vec<u64> {
        self.words
    }

    /// Characteristic sequence of trace `t`, position 0 at bit 0.
    pub fn row(&self, layout: &Layout, t: usize) -> u64 {
        layout.row(&self.words, t)
    }

    pub fn rows(&self, layout: &Layout) -> Vec<u64> {
        (0..layout.trace_count()).map(|t| self.row(layout, t)).collect()
    }

    /// True iff no bit is set outside a trace position.
    pub fn is_padded(&self, layout: &Layout) -> bool {
        self.words.len() == layout.word_count()
            && self.words.iter().zip(layout.words()).all(|(w, m)| w & !m.valid == 0)
    }

    fn checked(self, layout: &Layout) -> Self {
        debug_assert!(self.is_padded(layout), "padding bits set");
        self
    }
}

fn unary(
    cm: &CharacteristicMatrix,
    layout: &Layout,
    f: fn(&mut [u64], &[u64], &[WordMasks]),
) -> CharacteristicMatrix {
    let mut out = vec![0; layout.word_count()];
    f(&mut out, &cm.words, layout.words());
    CharacteristicMatrix { words: out }.checked(layout)
}

pub fn op_not(cm: &CharacteristicMatrix, layout: &Layout) -> CharacteristicMatrix {
    unary(cm, layout, not_into)
}

pub fn op_next(cm: &CharacteristicMatrix, layout: &Layout) -> CharacteristicMatrix {
    unary(cm, layout, next_into)
}

pub fn op_future(cm: &CharacteristicMatrix, layout: &Layout) -> CharacteristicMatrix {
    unary(cm, layout, future_into)
}

pub fn op_and(a: &CharacteristicMatrix, b: &CharacteristicMatrix) -> CharacteristicMatrix {
    let mut out = vec![0; a.words.len()];
    and_into(&mut out, &a.words, &b.words);
    CharacteristicMatrix { words: out }
}

pub fn op_or(a: &CharacteristicMatrix, b: &CharacteristicMatrix) -> CharacteristicMatrix {
    let mut out = vec![0; a.words.len()];
    or_into(&mut out, &a.words, &b.words);
    CharacteristicMatrix { words: out }
}

pub fn op_until(
    a: &CharacteristicMatrix,
    b: &CharacteristicMatrix,
    layout: &Layout,
) -> CharacteristicMatrix {
    let mut out = vec![0; layout.word_count()];
    until_into(&mut out, &a.words, &b.words, layout.words());
    CharacteristicMatrix { words: out }.checked(layout)
}

/// True iff position 0 of every positive trace is set and of every negative trace is clear.
pub fn separates(cm: &CharacteristicMatrix, layout: &Layout) -> bool {
    separates_words(&cm.words, layout.words())
}

/// One characteristic matrix per proposition, in alphabet order.
pub fn atom_bitvectors(spec: &Specification, layout: &Layout) -> Vec<CharacteristicMatrix> {
    (0..spec.alphabet().len())
        .map(|p| {
            let rows: Vec<u64> = spec
                .traces()
                .iter()
                .map(|tr| {
                    tr.steps()
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (j, s)| acc | (u64::from(s.contains(p)) << j))
                })
                .collect();
            CharacteristicMatrix::from_rows(layout, &rows)
        })
        .collect()
}

/// A specification's layout together with its atom matrices.
#[derive(Debug, Clone)]
pub struct Semantics {
    layout: Layout,
    atoms: Vec<CharacteristicMatrix>,
}

impl Semantics {
    pub fn new(spec: &Specification) -> Self {
        Self::with_packing(spec, Packing::default())
    }

    pub fn with_packing(spec: &Specification, packing: Packing) -> Self {
        let layout = Layout::new(spec, packing);
        let atoms = atom_bitvectors(spec, &layout);
        Self { layout, atoms }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn atom(&self, p: usize) -> &CharacteristicMatrix {
        &self.atoms[p]
    }

    pub fn atoms(&self) -> &[CharacteristicMatrix] {
        &self.atoms
    }

    pub fn evaluate(&self, f: &Formula) -> CharacteristicMatrix {
        let l = &self.layout;
        match f {
            Formula::Atom(p) => self.atoms[*p].clone(),
            Formula::Not(c) => op_not(&self.evaluate(c), l),
            Formula::Next(c) => op_next(&self.evaluate(c), l),
            Formula::Future(c) => op_future(&self.evaluate(c), l),
            Formula::And(a, b) => op_and(&self.evaluate(a), &self.evaluate(b)),
            Formula::Or(a, b) => op_or(&self.evaluate(a), &self.evaluate(b)),
            Formula::Until(a, b) => op_until(&self.evaluate(a), &self.evaluate(b), l),
        }
    }

    pub fn separates(&self, cm: &CharacteristicMatrix) -> bool {
        separates(cm, &self.layout)
    }
}

/// Evaluates `f` over `spec` with the default packing.
pub fn evaluate(f: &Formula, spec: &Specification) -> CharacteristicMatrix {
    Semantics::new(spec).evaluate(f)
}
