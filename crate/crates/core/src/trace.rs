//! Traces, alphabets and specifications, plus the line-oriented trace file format.
//!
//! A trace file looks like this:
//!
//! ```text
//! #atoms: a b c
//! 0,0,1
//! 0,0,1;1,0,0
//! ---
//! 0,1,0;1,0,0
//! ```
//!
//! Each line is one trace, timesteps are separated by `;` and each timestep lists one
//! `0`/`1` per proposition in alphabet order. Traces above the `---` line are positive,
//! traces below it are negative.

use std::fmt;

use crate::error::SpecError;

/// Longest trace that fits in one machine word.
pub const LANE_WIDTH: usize = 64;

/// Largest supported alphabet.
pub const MAX_ATOMS: usize = 26;

/// Identifiers the formula syntax reserves for operators.
const RESERVED: [&str; 3] = ["X", "F", "U"];

/// Ordered set of proposition names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, SpecError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() || names.len() > MAX_ATOMS {
            return Err(SpecError::Alphabet(format!(
                "alphabet must have between 1 and {MAX_ATOMS} propositions, got {}",
                names.len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(SpecError::Alphabet(format!("invalid proposition name `{name}`")));
            }
            if RESERVED.contains(&name.as_str()) {
                return Err(SpecError::Alphabet(format!(
                    "proposition name `{name}` is reserved for an operator"
                )));
            }
            if names[..i].contains(name) {
                return Err(SpecError::Alphabet(format!("duplicate proposition name `{name}`")));
            }
        }
        Ok(Self { names })
    }

    /// `p0 .. p{n-1}`.
    pub fn with_default_names(n: usize) -> Result<Self, SpecError> {
        Self::new((0..n).map(|i| format!("p{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Set of propositions true at one timestep, bit `i` = proposition `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PropSet(pub u32);

impl PropSet {
    pub fn contains(self, prop: usize) -> bool {
        self.0 >> prop & 1 == 1
    }

    pub fn insert(&mut self, prop: usize) {
        self.0 |= 1 << prop;
    }
}

/// Finite, non-empty sequence of proposition sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace {
    steps: Vec<PropSet>,
}

impl Trace {
    pub fn new(steps: Vec<PropSet>) -> Result<Self, SpecError> {
        if steps.is_empty() {
            return Err(SpecError::EmptyTrace { line: 0 });
        }
        if steps.len() > LANE_WIDTH {
            return Err(SpecError::TraceTooLong { line: 0, length: steps.len() });
        }
        Ok(Self { steps })
    }

    /// Builds a trace from one string per timestep, each character naming a
    /// single-letter proposition of `alphabet`. `"ac"` means `{a, c}`, `""` the empty set.
    pub fn from_letters(alphabet: &Alphabet, steps: &[&str]) -> Result<Self, SpecError> {
        let mut out = Vec::with_capacity(steps.len());
        for step in steps {
            let mut set = PropSet::default();
            for c in step.chars() {
                let idx = alphabet
                    .index_of(&c.to_string())
                    .ok_or_else(|| SpecError::Alphabet(format!("unknown proposition `{c}`")))?;
                set.insert(idx);
            }
            out.push(set);
        }
        Self::new(out)
    }

    /// Word form where every position holds exactly one letter, e.g. `squeegee`.
    pub fn from_word(alphabet: &Alphabet, word: &str) -> Result<Self, SpecError> {
        let letters: Vec<String> = word.chars().map(|c| c.to_string()).collect();
        let refs: Vec<&str> = letters.iter().map(String::as_str).collect();
        Self::from_letters(alphabet, &refs)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[PropSet] {
        &self.steps
    }

    pub fn holds(&self, position: usize, prop: usize) -> bool {
        self.steps[position].contains(prop)
    }
}

/// Positive and negative example traces over a shared alphabet.
///
/// Trace order is fixed: positives first, then negatives, each in insertion order.
/// Index `t` into [`Specification::traces`] is the row index used everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specification {
    alphabet: Alphabet,
    traces: Vec<Trace>,
    positive_count: usize,
}

impl Specification {
    pub fn new(
        alphabet: Alphabet,
        positives: Vec<Trace>,
        negatives: Vec<Trace>,
    ) -> Result<Self, SpecError> {
        if positives.is_empty() && negatives.is_empty() {
            return Err(SpecError::NoTraces);
        }
        let limit = 1u64 << alphabet.len();
        for tr in positives.iter().chain(&negatives) {
            if tr.steps.iter().any(|s| u64::from(s.0) >= limit) {
                return Err(SpecError::Alphabet(
                    "trace mentions a proposition outside the alphabet".into(),
                ));
            }
        }
        for (i, p) in positives.iter().enumerate() {
            if let Some(j) = negatives.iter().position(|n| n == p) {
                return Err(SpecError::Infeasible { positive: i, negative: j });
            }
        }
        let positive_count = positives.len();
        let mut traces = positives;
        traces.extend(negatives);
        Ok(Self { alphabet, traces, positive_count })
    }

    /// Skips the feasibility check. Only for exercising code paths that must cope with
    /// contradictory specifications.
    #[doc(hidden)]
    pub fn new_unchecked(alphabet: Alphabet, positives: Vec<Trace>, negatives: Vec<Trace>) -> Self {
        let positive_count = positives.len();
        let mut traces = positives;
        traces.extend(negatives);
        Self { alphabet, traces, positive_count }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// All traces in canonical order.
    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn positives(&self) -> &[Trace] {
        &self.traces[..self.positive_count]
    }

    pub fn negatives(&self) -> &[Trace] {
        &self.traces[self.positive_count..]
    }

    pub fn is_positive(&self, t: usize) -> bool {
        t < self.positive_count
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Same alphabet, chosen subsets of positives and negatives.
    pub fn subset(&self, positives: &[usize], negatives: &[usize]) -> Result<Self, SpecError> {
        Self::new(
            self.alphabet.clone(),
            positives.iter().map(|&i| self.positives()[i].clone()).collect(),
            negatives.iter().map(|&i| self.negatives()[i].clone()).collect(),
        )
    }

    pub fn parse(text: &str) -> Result<Self, SpecError> {
        parse_specification(text)
    }
}

impl fmt::Display for Specification {
    /// Serialises into the trace file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "#atoms: {}", self.alphabet.names.join(" "))?;
        let n = self.alphabet.len();
        let write_trace = |f: &mut fmt::Formatter<'_>, tr: &Trace| -> fmt::Result {
            let steps: Vec<String> = tr
                .steps
                .iter()
                .map(|s| {
                    (0..n)
                        .map(|p| if s.contains(p) { "1" } else { "0" })
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            writeln!(f, "{}", steps.join(";"))
        };
        for tr in self.positives() {
            write_trace(f, tr)?;
        }
        writeln!(f, "---")?;
        for tr in self.negatives() {
            write_trace(f, tr)?;
        }
        Ok(())
    }
}

/// Parses the trace file format. See the module documentation.
pub fn parse_specification(text: &str) -> Result<Specification, SpecError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut arity: Option<usize> = None;
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    let mut lines_of = (Vec::new(), Vec::new());
    let mut in_negatives = false;
    let mut seen_trace = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#atoms:") {
            if seen_trace || alphabet.is_some() {
                return Err(SpecError::Syntax {
                    line: line_no,
                    column: 1,
                    message: "`#atoms:` must precede every trace".into(),
                });
            }
            let a = Alphabet::new(rest.split_whitespace())?;
            arity = Some(a.len());
            alphabet = Some(a);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if line == "---" {
            if in_negatives {
                return Err(SpecError::Syntax {
                    line: line_no,
                    column: 1,
                    message: "more than one `---` separator".into(),
                });
            }
            in_negatives = true;
            continue;
        }
        seen_trace = true;
        let column_base = raw.len() - raw.trim_start().len() + 1;
        let trace = parse_trace_line(line, line_no, column_base, &mut arity)?;
        if in_negatives {
            negatives.push(trace);
            lines_of.1.push(line_no);
        } else {
            positives.push(trace);
            lines_of.0.push(line_no);
        }
    }

    let arity = arity.ok_or(SpecError::NoTraces)?;
    let alphabet = match alphabet {
        Some(a) => a,
        None => Alphabet::with_default_names(arity)?,
    };
    Specification::new(alphabet, positives, negatives).map_err(|e| match e {
        SpecError::Infeasible { positive, negative } => SpecError::InfeasibleAt {
            positive_line: lines_of.0[positive],
            negative_line: lines_of.1[negative],
        },
        other => other,
    })
}

fn parse_trace_line(
    line: &str,
    line_no: usize,
    column_base: usize,
    arity: &mut Option<usize>,
) -> Result<Trace, SpecError> {
    let mut steps = Vec::new();
    let mut offset = 0;
    for (ts_idx, step) in line.split(';').enumerate() {
        let timestep = ts_idx + 1;
        let mut set = PropSet::default();
        let mut count = 0;
        let mut inner = offset;
        for value in step.split(',') {
            let column = column_base + inner + (value.len() - value.trim_start().len());
            match value.trim() {
                "1" => {
                    if count < MAX_ATOMS {
                        set.insert(count);
                    }
                }
                "0" => {}
                "" => {
                    return Err(SpecError::Syntax {
                        line: line_no,
                        column,
                        message: format!("empty value in timestep {timestep}"),
                    })
                }
                other => {
                    return Err(SpecError::Syntax {
                        line: line_no,
                        column,
                        message: format!("expected `0` or `1`, found `{other}`"),
                    })
                }
            }
            count += 1;
            inner += value.len() + 1;
        }
        match *arity {
            None => {
                if count > MAX_ATOMS {
                    return Err(SpecError::Alphabet(format!(
                        "{count} propositions exceed the limit of {MAX_ATOMS}"
                    )));
                }
                *arity = Some(count);
            }
            Some(expected) if expected != count => {
                return Err(SpecError::Arity { line: line_no, timestep, expected, found: count });
            }
            Some(_) => {}
        }
        steps.push(set);
        offset += step.len() + 1;
    }
    if steps.len() > LANE_WIDTH {
        return Err(SpecError::TraceTooLong { line: line_no, length: steps.len() });
    }
    Trace::new(steps).map_err(|e| match e {
        SpecError::EmptyTrace { .. } => SpecError::EmptyTrace { line: line_no },
        other => other,
    })
}
