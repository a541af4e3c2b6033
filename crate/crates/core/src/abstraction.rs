//! Relating the two semantics: the `ξ` check, lifting resumptions to
//! denotable continuations, the transformer/rule commuting squares, and a
//! bounded search for contexts that tell two statements apart.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::denotational::{Continuation, DenTerm, Denotation, Denotational, Transform};
use crate::identifiers::Name;
use crate::operational::{well_formed, Operational, RRes, Resumption, SemanticsError};
use crate::syntax::{Action, BinOp, Calculus, Program, Statement, SyncAction, SyntacticContext};
use crate::traces::{truncate_set, xi_set, Trace, TraceSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbstractionError {
    #[error("resumption is not derivable: {0}")]
    IllFormedResumption(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// `semc(f, u, ⟨μ⟩k) = (semf(f), u, ⟨μ⟩semk(k))`
pub fn lift_resumption(rho: &Resumption, nbar: usize) -> Result<Continuation, AbstractionError> {
    if !well_formed(rho, nbar) {
        return Err(AbstractionError::IllFormedResumption(rho.to_string()));
    }
    Ok(lift_unchecked(rho))
}

fn lift_unchecked(rho: &Resumption) -> Continuation {
    Continuation {
        sync: rho.sync.iter().cloned().map(DenTerm::Of).collect(),
        iset: rho.iset.clone(),
        ids: rho.ids.clone(),
        kbag: rho.kbag.map(|r| match r {
            RRes::Terminated => Denotation::Empty,
            RRes::Pending(x) => Denotation::Term(DenTerm::Of(x.clone())),
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum XiVerdict {
    Equal,
    Diff { witness: Trace },
}

/// Both sides of a `ξ` comparison at one budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XiCheck {
    /// `ξ_P(O⟦x⟧)`, truncated to the budget.
    pub op: TraceSet,
    pub den: TraceSet,
    pub verdict: XiVerdict,
}

/// The operational budget needed so that `ξ` of the result, cut at `m`
/// symbols, is exact: every operational symbol becomes `n̄ + 1` symbols.
pub fn operational_budget(m: usize, nbar: usize) -> usize {
    m.div_ceil(nbar + 1)
}

/// Compares `ξ_P(O⟦x⟧)` with `D⟦x⟧` at budget `m`.
pub fn check_xi(x: &Statement, p: &Program, m: usize) -> Result<XiCheck, SemanticsError> {
    check_xi_with(&Operational::new(p), &Denotational::new(p), x, m)
}

/// [`check_xi`] on caller-supplied engines (for instance ones that check
/// invariants along the way).
pub fn check_xi_with(
    op: &Operational<'_>,
    den: &Denotational<'_>,
    x: &Statement,
    m: usize,
) -> Result<XiCheck, SemanticsError> {
    let nbar = op.program().nbar();
    let o = op.den_o(x, operational_budget(m, nbar))?;
    let lhs = truncate_set(&xi_set(&o, nbar), m);
    let rhs = truncate_set(&den.den_d(x, m)?, m);
    let verdict = match lhs.symmetric_difference(&rhs).next() {
        None => XiVerdict::Equal,
        Some(q) => XiVerdict::Diff { witness: q.clone() },
    };
    Ok(XiCheck {
        op: lhs,
        den: rhs,
        verdict,
    })
}

/// Outcome of one commuting square `transform ∘ lift = lift ∘ rule`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Square {
    pub transform: &'static str,
    pub holds: bool,
}

/// Checks the squares for every transformer applicable to `rho` with
/// argument `D(x)`: restriction by each declared channel, `add_;`, `add_⌊⌊`
/// and, where the push guard allows it, `add_⌊`.
pub fn check_invariance(
    rho: &Resumption,
    x: &Statement,
    p: &Program,
) -> Result<Vec<Square>, AbstractionError> {
    let nbar = p.nbar();
    let lifted = lift_resumption(rho, nbar)?;
    let d = DenTerm::Of(x.clone());
    let mut squares = Vec::new();
    let mut check =
        |name: &'static str, t: Transform, rule: Resumption| -> Result<(), AbstractionError> {
            let left = lifted
                .transform(t, nbar)
                .map_err(|_| AbstractionError::IllFormedResumption(rho.to_string()))?;
            let right = lift_resumption(&rule, nbar)?;
            squares.push(Square {
                transform: name,
                holds: left == right,
            });
            Ok(())
        };
    let channels: Vec<Name> = if p.channels().is_empty() {
        vec![Name::new("c")]
    } else {
        p.channels().iter().cloned().collect()
    };
    for c in channels {
        check(
            "restrict",
            Transform::Restrict(c.clone()),
            rho.clone().restrict(&c),
        )?;
    }
    check(
        "add_seq",
        Transform::AddSeq(d.clone()),
        rho.clone().add_seq(x.clone()),
    )?;
    check(
        "add_lmerge",
        Transform::AddLeftMerge(d.clone()),
        rho.clone().add_lmerge(x.clone()),
    )?;
    if rho.can_push(nbar) {
        check(
            "add_lsync",
            Transform::AddLeftSync(d),
            rho.clone().add_lsync(x.clone()),
        )?;
    }
    Ok(squares)
}

/// Leaves available to context enumeration.
#[derive(Clone, Debug)]
pub struct ContextVocab {
    pub leaves: Vec<Statement>,
    pub channels: Vec<Name>,
}

impl ContextVocab {
    /// `stop`, the internal actions of the given statements, an input and an
    /// output on every declared channel, and the declared variables.
    pub fn for_program(p: &Program, statements: &[&Statement]) -> Self {
        let mut internals = BTreeSet::new();
        for x in statements {
            for s in x.subterms() {
                if let Statement::Act(a @ Action::Internal(_)) = s {
                    internals.insert(a.clone());
                }
            }
        }
        let mut leaves = vec![Statement::stop()];
        leaves.extend(internals.into_iter().map(Statement::Act));
        for c in p.channels() {
            match p.calculus() {
                Calculus::Ccsn => {
                    leaves.push(Statement::Act(Action::JointInput(vec![c.clone()])));
                    leaves.push(Statement::Act(Action::Output(c.clone())));
                }
                Calculus::CcsnPlus => {
                    leaves.push(Statement::Act(Action::JointPrefix(vec![
                        SyncAction::input(c.clone()),
                    ])));
                    leaves.push(Statement::Act(Action::JointPrefix(vec![
                        SyncAction::output(c.clone()),
                    ])));
                }
            }
        }
        leaves.extend(p.decls().keys().map(|y| Statement::Var(y.clone())));
        ContextVocab {
            leaves,
            channels: p.channels().iter().cloned().collect(),
        }
    }
}

/// Contexts of AST depth at most `max_depth`, by increasing size and in a
/// fixed order within each size. Contexts without a hole are skipped.
pub struct ContextEnumerator {
    vocab: ContextVocab,
    max_depth: usize,
    /// `by_size[s]`: every term of size `s` (with or without holes) and its depth.
    by_size: Vec<Vec<(Statement, usize)>>,
    size: usize,
    index: usize,
}

impl ContextEnumerator {
    pub fn new(vocab: ContextVocab, max_depth: usize) -> Self {
        ContextEnumerator {
            vocab,
            max_depth,
            by_size: vec![Vec::new()],
            size: 0,
            index: 0,
        }
    }

    fn max_size(&self) -> usize {
        (1usize << (self.max_depth + 1)) - 1
    }

    fn build(&mut self, s: usize) {
        let mut out: Vec<(Statement, usize)> = Vec::new();
        if s == 1 {
            out.push((Statement::Hole, 0));
            out.extend(self.vocab.leaves.iter().cloned().map(|l| (l, 0)));
        } else {
            for (x, d) in &self.by_size[s - 1] {
                if *d < self.max_depth {
                    for c in &self.vocab.channels {
                        out.push((Statement::Restrict(Arc::new(x.clone()), c.clone()), d + 1));
                    }
                }
            }
            for left in 1..s - 1 {
                let right = s - 1 - left;
                for (x1, d1) in &self.by_size[left] {
                    for (x2, d2) in &self.by_size[right] {
                        let d = 1 + d1.max(d2);
                        if d > self.max_depth {
                            continue;
                        }
                        for op in BinOp::ALL {
                            out.push((Statement::binary(op, x1.clone(), x2.clone()), d));
                        }
                    }
                }
            }
        }
        self.by_size.push(out);
    }
}

impl Iterator for ContextEnumerator {
    type Item = SyntacticContext;

    fn next(&mut self) -> Option<SyntacticContext> {
        loop {
            if self.size == 0 || self.index >= self.by_size[self.size].len() {
                if self.size >= self.max_size() {
                    return None;
                }
                self.size += 1;
                self.index = 0;
                self.build(self.size);
                continue;
            }
            let (x, _) = &self.by_size[self.size][self.index];
            self.index += 1;
            if x.contains_hole() {
                return Some(SyntacticContext(x.clone()));
            }
        }
    }
}

pub fn enumerate_contexts(vocab: ContextVocab, max_depth: usize) -> ContextEnumerator {
    ContextEnumerator::new(vocab, max_depth)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Discrimination {
    Found {
        context: SyntacticContext,
        left: TraceSet,
        right: TraceSet,
        examined: usize,
    },
    NotFound {
        max_depth: usize,
        examined: usize,
    },
}

/// The first context (in enumeration order) under which `x1` and `x2` have
/// different operational trace sets at budget `m`. Fillings that do not form
/// a valid program (for instance unguarded or over-long joint constructs)
/// are skipped.
pub fn discriminate(
    x1: &Statement,
    x2: &Statement,
    p: &Program,
    max_depth: usize,
    m: usize,
) -> Result<Discrimination, SemanticsError> {
    let vocab = ContextVocab::for_program(p, &[x1, x2]);
    let engine = Operational::new(p);
    let mut examined = 0;
    for s in enumerate_contexts(vocab, max_depth) {
        let (f1, f2) = (s.fill(x1), s.fill(x2));
        if p.check_statement(&f1, false).is_err() || p.check_statement(&f2, false).is_err() {
            continue;
        }
        examined += 1;
        let left = engine.den_o(&f1, m)?;
        let right = engine.den_o(&f2, m)?;
        if left != right {
            return Ok(Discrimination::Found {
                context: s,
                left,
                right,
                examined,
            });
        }
    }
    Ok(Discrimination::NotFound {
        max_depth,
        examined,
    })
}

/// A denotable continuation (the lift of one of `samples`) at which `D(x1)`
/// and `D(x2)` differ at budget `m`, if any.
pub fn denotable_difference(
    x1: &Statement,
    x2: &Statement,
    p: &Program,
    samples: &[Resumption],
    m: usize,
) -> Result<Option<Resumption>, AbstractionError> {
    let den = Denotational::new(p);
    for rho in samples {
        let g = lift_resumption(rho, p.nbar())?;
        if den.eval(&DenTerm::Of(x1.clone()), &g, m)?
            != den.eval(&DenTerm::Of(x2.clone()), &g, m)?
        {
            return Ok(Some(rho.clone()));
        }
    }
    Ok(None)
}
