//! Exact synthesis of minimum-cost LTLf formulae from positive and negative example traces.
//!
//! Candidates are enumerated bottom-up by cost. Each one is represented only by its
//! characteristic matrix, the packed truth table of the formula over every position of every
//! example trace, so formulae that agree on the examples are stored once.

pub mod bits;
pub mod cli;
pub mod dnc;
pub mod enumerate;
pub mod error;
pub mod formula;
pub mod layout;
pub mod oracle;
pub mod trace;

pub use bits::{CharacteristicMatrix, Semantics};
pub use enumerate::{synthesize, CandidateStore, Outcome, SynthConfig, SynthesisResult};
pub use error::{FormulaError, SpecError};
pub use formula::{Formula, Op, OpSet};
pub use layout::{Layout, Packing};
pub use trace::{parse_specification, Alphabet, PropSet, Specification, Trace};
