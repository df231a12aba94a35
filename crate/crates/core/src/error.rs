use thiserror::Error;

/// Problems with a specification or its on-disk form.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("line {line}: timestep {timestep} has {found} values, expected {expected}")]
    Arity { line: usize, timestep: usize, expected: usize, found: usize },

    #[error("line {line}: empty trace")]
    EmptyTrace { line: usize },

    #[error("line {line}: trace of length {length} exceeds the 64-step limit")]
    TraceTooLong { line: usize, length: usize },

    #[error("{0}")]
    Alphabet(String),

    #[error("specification contains no traces")]
    NoTraces,

    #[error("infeasible specification: positive trace {positive} equals negative trace {negative}")]
    Infeasible { positive: usize, negative: usize },

    #[error(
        "infeasible specification: trace on line {positive_line} is both positive and negative \
         (line {negative_line})"
    )]
    InfeasibleAt { positive_line: usize, negative_line: usize },
}

/// Formula text that does not parse.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct FormulaError {
    pub offset: usize,
    pub message: String,
}
