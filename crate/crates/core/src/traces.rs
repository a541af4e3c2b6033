//! Finite traces, trace sets, the choice operators `⊕ᵢ` and the `ξ` maps.
//!
//! Infinite behaviour is approximated by a symbol budget: a trace that would
//! run past the budget is kept as its prefix followed by [`End::Cut`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identifiers::Name;

/// How a trace ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    /// Ordinary termination `ε`.
    Eps,
    /// Deadlock `δ` (operational traces only).
    Delta,
    /// The budget ran out; the rest of the trace is unknown.
    Cut,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Trace {
    pub symbols: Vec<Name>,
    pub end: End,
}

impl Trace {
    pub fn new(symbols: Vec<Name>, end: End) -> Self {
        Trace { symbols, end }
    }

    pub fn eps() -> Self {
        Trace::new(Vec::new(), End::Eps)
    }

    pub fn delta() -> Self {
        Trace::new(Vec::new(), End::Delta)
    }

    pub fn cut() -> Self {
        Trace::new(Vec::new(), End::Cut)
    }

    /// `τ^i` followed by `ε`.
    pub fn taus(i: usize) -> Self {
        Trace::new(vec![Name::tau(); i], End::Eps)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `b·q`
    pub fn prefixed(&self, b: &Name) -> Trace {
        let mut symbols = Vec::with_capacity(self.symbols.len() + 1);
        symbols.push(b.clone());
        symbols.extend(self.symbols.iter().cloned());
        Trace::new(symbols, self.end)
    }

    /// At most `m` symbols; anything longer is cut.
    pub fn truncate(&self, m: usize) -> Trace {
        if self.symbols.len() <= m {
            self.clone()
        } else {
            Trace::new(self.symbols[..m].to_vec(), End::Cut)
        }
    }

    /// `τ^i·q̄` with `q̄ ≠ ε`; a cut right after the `τ^i` block counts as
    /// undetermined and is kept.
    fn has_nonempty_residue_after_taus(&self, i: usize) -> bool {
        self.symbols.len() >= i
            && self.symbols[..i].iter().all(Name::is_tau)
            && (self.symbols.len() > i || self.end != End::Eps)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<&str> = self.symbols.iter().map(Name::as_str).collect();
        match self.end {
            End::Eps if parts.is_empty() => parts.push("eps"),
            End::Eps => {}
            End::Delta => parts.push("delta"),
            End::Cut => parts.push("cut"),
        }
        f.write_str(&parts.join("."))
    }
}

impl fmt::Debug for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("choice level {level} exceeds nbar = {nbar}")]
    BadLevel { level: usize, nbar: usize },
    #[error("cannot parse trace `{0}`")]
    Parse(String),
}

impl FromStr for Trace {
    type Err = TraceError;

    /// Parses the textual rendering, e.g. `tau.b1.delta` or `eps`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "eps" {
            return Ok(Trace::eps());
        }
        let mut symbols = Vec::new();
        let mut end = End::Eps;
        let parts: Vec<&str> = s.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let last = i + 1 == parts.len();
            match *part {
                "delta" if last => end = End::Delta,
                "cut" if last => end = End::Cut,
                "" | "eps" | "delta" | "cut" => return Err(TraceError::Parse(s.to_string())),
                p if p.chars().all(|c| c.is_alphanumeric() || c == '_') => {
                    symbols.push(Name::new(p))
                }
                _ => return Err(TraceError::Parse(s.to_string())),
            }
        }
        Ok(Trace::new(symbols, end))
    }
}

/// A finite set of traces, kept sorted.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TraceSet(BTreeSet<Trace>);

impl TraceSet {
    pub fn new() -> Self {
        TraceSet(BTreeSet::new())
    }

    pub fn singleton(q: Trace) -> Self {
        TraceSet([q].into_iter().collect())
    }

    pub fn insert(&mut self, q: Trace) {
        self.0.insert(q);
    }

    pub fn extend(&mut self, other: TraceSet) {
        self.0.extend(other.0);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Trace> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, q: &Trace) -> bool {
        self.0.contains(q)
    }

    pub fn has_cut(&self) -> bool {
        self.0.iter().any(|q| q.end == End::Cut)
    }

    /// Members present in exactly one of the two sets.
    pub fn symmetric_difference<'a>(
        &'a self,
        other: &'a TraceSet,
    ) -> impl Iterator<Item = &'a Trace> {
        self.0.symmetric_difference(&other.0)
    }
}

impl FromIterator<Trace> for TraceSet {
    fn from_iter<I: IntoIterator<Item = Trace>>(iter: I) -> Self {
        TraceSet(iter.into_iter().collect())
    }
}

impl IntoIterator for TraceSet {
    type Item = Trace;
    type IntoIter = std::collections::btree_set::IntoIter<Trace>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl fmt::Display for TraceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for TraceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for TraceSet {
    type Err = TraceError;

    /// Parses `{q1, q2, ...}` or a bare comma-separated list.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        inner
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect()
    }
}

/// `b·p`
pub fn prefix_action(b: &Name, p: &TraceSet) -> TraceSet {
    p.iter().map(|q| q.prefixed(b)).collect()
}

/// `τ^i·p`
pub fn tau_pow(i: usize, p: &TraceSet) -> TraceSet {
    p.iter()
        .map(|q| {
            let mut symbols = vec![Name::tau(); i];
            symbols.extend(q.symbols.iter().cloned());
            Trace::new(symbols, q.end)
        })
        .collect()
}

/// `p₁ ⊕ᵢ p₂`: keeps the traces of either side that do more than the
/// deadlock block `τ^{n̄−i}`; if none do, the result is that block.
pub fn choice_merge(
    i: usize,
    p1: &TraceSet,
    p2: &TraceSet,
    nbar: usize,
) -> Result<TraceSet, TraceError> {
    if i > nbar {
        return Err(TraceError::BadLevel { level: i, nbar });
    }
    let w = nbar - i;
    let kept: TraceSet = p1
        .iter()
        .chain(p2.iter())
        .filter(|q| q.has_nonempty_residue_after_taus(w))
        .cloned()
        .collect();
    if kept.is_empty() {
        Ok(TraceSet::singleton(Trace::taus(w)))
    } else {
        Ok(kept)
    }
}

/// `ξ_Q`: every action is preceded by `τ^{n̄}` and `δ` becomes `τ^{n̄}`.
pub fn xi_trace(q: &Trace, nbar: usize) -> Trace {
    let mut symbols = Vec::with_capacity((nbar + 1) * (q.len() + 1));
    for b in &q.symbols {
        symbols.extend(std::iter::repeat_n(Name::tau(), nbar));
        symbols.push(b.clone());
    }
    let end = match q.end {
        End::Delta => {
            symbols.extend(std::iter::repeat_n(Name::tau(), nbar));
            End::Eps
        }
        e => e,
    };
    Trace::new(symbols, end)
}

/// `ξ_P`
pub fn xi_set(p: &TraceSet, nbar: usize) -> TraceSet {
    p.iter().map(|q| xi_trace(q, nbar)).collect()
}

pub fn truncate_set(p: &TraceSet, m: usize) -> TraceSet {
    p.iter().map(|q| q.truncate(m)).collect()
}
