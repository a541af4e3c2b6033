//! Abstract syntax for both calculi, guardedness, the `wgt` measure and
//! syntactic contexts.

mod parser;
mod render;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identifiers::Name;

pub use parser::{parse_context, parse_program};

/// Which of the two calculi a program is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Calculus {
    /// Joint inputs `c₁&…&c_m` synchronizing with plain outputs.
    Ccsn,
    /// Joint prefixes `l₁&…&l_m` mixing inputs and outputs.
    CcsnPlus,
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Calculus::Ccsn => f.write_str("ccsn"),
            Calculus::CcsnPlus => f.write_str("ccsnplus"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    In,
    Out,
}

/// A synchronization action `c` or `c̄`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SyncAction {
    pub polarity: Polarity,
    pub channel: Name,
}

impl SyncAction {
    pub fn input(c: Name) -> Self {
        SyncAction {
            polarity: Polarity::In,
            channel: c,
        }
    }

    pub fn output(c: Name) -> Self {
        SyncAction {
            polarity: Polarity::Out,
            channel: c,
        }
    }

    /// `l̄`, with `c̄̄ = c`.
    pub fn complement(&self) -> Self {
        let polarity = match self.polarity {
            Polarity::In => Polarity::Out,
            Polarity::Out => Polarity::In,
        };
        SyncAction {
            polarity,
            channel: self.channel.clone(),
        }
    }
}

/// Elementary actions of both calculi.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    /// An internal action `b`; `tau` is the silent one.
    Internal(Name),
    /// `c̄` (joint-input calculus only).
    Output(Name),
    /// `c₁&…&c_m` (joint-input calculus only).
    JointInput(Vec<Name>),
    /// `l₁&…&l_m` (joint-prefix calculus only).
    JointPrefix(Vec<SyncAction>),
    Stop,
}

impl Action {
    pub fn internal(b: &str) -> Self {
        Action::Internal(Name::new(b))
    }

    pub fn tau() -> Self {
        Action::Internal(Name::tau())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    /// `x₁ ; x₂`
    Seq,
    /// `x₁ + x₂`
    Choice,
    /// `x₁ ∥ x₂`
    Merge,
    /// `x₁ | x₂`
    SyncMerge,
    /// `x₁ ⌊⌊ x₂`
    LeftMerge,
    /// `x₁ ⌊ x₂`
    LeftSyncMerge,
}

impl BinOp {
    pub const ALL: [BinOp; 6] = [
        BinOp::Seq,
        BinOp::Choice,
        BinOp::Merge,
        BinOp::SyncMerge,
        BinOp::LeftMerge,
        BinOp::LeftSyncMerge,
    ];

    pub fn is_parallel(self) -> bool {
        matches!(
            self,
            BinOp::Merge | BinOp::SyncMerge | BinOp::LeftMerge | BinOp::LeftSyncMerge
        )
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Seq => ";",
            BinOp::Choice => "+",
            BinOp::Merge => "||",
            BinOp::SyncMerge => "|",
            BinOp::LeftMerge => "||-",
            BinOp::LeftSyncMerge => "|-",
        }
    }
}

/// Statements. `Hole` only occurs inside syntactic contexts; validated
/// programs never contain it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Statement {
    Act(Action),
    Var(Name),
    Hole,
    Restrict(Arc<Statement>, Name),
    Binary(BinOp, Arc<Statement>, Arc<Statement>),
}

impl Statement {
    pub fn act(a: Action) -> Self {
        Statement::Act(a)
    }

    pub fn internal(b: &str) -> Self {
        Statement::Act(Action::internal(b))
    }

    pub fn stop() -> Self {
        Statement::Act(Action::Stop)
    }

    pub fn var(y: &str) -> Self {
        Statement::Var(Name::new(y))
    }

    pub fn restrict(x: Statement, c: &str) -> Self {
        Statement::Restrict(Arc::new(x), Name::new(c))
    }

    pub fn binary(op: BinOp, l: Statement, r: Statement) -> Self {
        Statement::Binary(op, Arc::new(l), Arc::new(r))
    }

    pub fn seq(l: Statement, r: Statement) -> Self {
        Statement::binary(BinOp::Seq, l, r)
    }

    pub fn choice(l: Statement, r: Statement) -> Self {
        Statement::binary(BinOp::Choice, l, r)
    }

    pub fn merge(l: Statement, r: Statement) -> Self {
        Statement::binary(BinOp::Merge, l, r)
    }

    /// Whether `self` belongs to the guarded statements: every variable
    /// sits behind an action.
    pub fn is_guarded(&self) -> bool {
        match self {
            Statement::Act(_) => true,
            Statement::Var(_) | Statement::Hole => false,
            Statement::Restrict(g, _) => g.is_guarded(),
            Statement::Binary(BinOp::Seq | BinOp::LeftMerge, g, _) => g.is_guarded(),
            Statement::Binary(_, g1, g2) => g1.is_guarded() && g2.is_guarded(),
        }
    }

    pub fn contains_hole(&self) -> bool {
        match self {
            Statement::Hole => true,
            Statement::Act(_) | Statement::Var(_) => false,
            Statement::Restrict(x, _) => x.contains_hole(),
            Statement::Binary(_, l, r) => l.contains_hole() || r.contains_hole(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Statement::Act(_) | Statement::Var(_) | Statement::Hole => 1,
            Statement::Restrict(x, _) => 1 + x.size(),
            Statement::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Statement::Act(_) | Statement::Var(_) | Statement::Hole => 0,
            Statement::Restrict(x, _) => 1 + x.depth(),
            Statement::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Statement)) {
        f(self);
        match self {
            Statement::Act(_) | Statement::Var(_) | Statement::Hole => {}
            Statement::Restrict(x, _) => x.visit(f),
            Statement::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }

    /// All subterms, including `self`.
    pub fn subterms(&self) -> Vec<&Statement> {
        let mut out = Vec::new();
        self.visit(&mut |s| out.push(s));
        out
    }
}

impl fmt::Debug for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error(
        "parallel operators `{first}` and `{second}` mixed without parentheses at {line}:{col}"
    )]
    MixedParallelOps {
        line: usize,
        col: usize,
        first: &'static str,
        second: &'static str,
    },
    #[error("unbound process variable `{0}`")]
    UnboundVariable(Name),
    #[error("declaration of `{0}` is not a guarded statement")]
    UnguardedRecursion(Name),
    #[error("joint construct of length {len} exceeds nbar = {nbar}")]
    JointTooLong { len: usize, nbar: usize },
    #[error("{construct} is not part of {calculus}")]
    WrongCalculusConstruct {
        construct: String,
        calculus: Calculus,
    },
    #[error("`{0}` is not a declared channel")]
    UndeclaredChannel(Name),
    #[error("`{0}` is declared more than once")]
    DuplicateDeclaration(Name),
    #[error("internal action `{0}` collides with a declared channel or variable")]
    NameClash(Name),
    #[error("context hole `@` outside a syntactic context")]
    HoleOutsideContext,
    #[error("nbar must be at least 1")]
    InvalidNbar,
}

/// `wgt` over a declaration map. Variables are expanded through their
/// bodies; an expansion cycle that never passes a guard is reported as
/// [`ProgramError::UnguardedRecursion`].
pub fn weight(x: &Statement, decls: &BTreeMap<Name, Statement>) -> Result<usize, ProgramError> {
    let mut cache = BTreeMap::new();
    let mut in_progress = BTreeSet::new();
    weight_in(x, decls, &mut cache, &mut in_progress)
}

fn weight_in(
    x: &Statement,
    decls: &BTreeMap<Name, Statement>,
    cache: &mut BTreeMap<Name, usize>,
    in_progress: &mut BTreeSet<Name>,
) -> Result<usize, ProgramError> {
    Ok(match x {
        Statement::Act(_) | Statement::Hole => 1,
        Statement::Var(y) => {
            if let Some(w) = cache.get(y) {
                return Ok(*w);
            }
            if !in_progress.insert(y.clone()) {
                return Err(ProgramError::UnguardedRecursion(y.clone()));
            }
            let body = decls
                .get(y)
                .ok_or_else(|| ProgramError::UnboundVariable(y.clone()))?;
            let w = 1 + weight_in(body, decls, cache, in_progress)?;
            in_progress.remove(y);
            cache.insert(y.clone(), w);
            w
        }
        Statement::Restrict(x, _) => 1 + weight_in(x, decls, cache, in_progress)?,
        Statement::Binary(BinOp::Seq | BinOp::LeftMerge, l, _) => {
            1 + weight_in(l, decls, cache, in_progress)?
        }
        Statement::Binary(_, l, r) => {
            let wl = weight_in(l, decls, cache, in_progress)?;
            let wr = weight_in(r, decls, cache, in_progress)?;
            1 + wl.max(wr)
        }
    })
}

/// A validated program: declarations, a main statement and the bound `n̄`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    calculus: Calculus,
    channels: BTreeSet<Name>,
    decls: BTreeMap<Name, Statement>,
    main: Statement,
    nbar: usize,
    var_weights: BTreeMap<Name, usize>,
}

impl Program {
    pub fn new(
        calculus: Calculus,
        channels: BTreeSet<Name>,
        decls: BTreeMap<Name, Statement>,
        main: Statement,
        nbar: usize,
    ) -> Result<Self, ProgramError> {
        if nbar == 0 {
            return Err(ProgramError::InvalidNbar);
        }
        let mut program = Program {
            calculus,
            channels,
            decls,
            main,
            nbar,
            var_weights: BTreeMap::new(),
        };
        for c in &program.channels {
            if program.decls.contains_key(c) {
                return Err(ProgramError::DuplicateDeclaration(c.clone()));
            }
        }
        for (y, body) in &program.decls {
            if !body.is_guarded() {
                return Err(ProgramError::UnguardedRecursion(y.clone()));
            }
            program.check_statement(body, false)?;
        }
        program.check_statement(&program.main, false)?;
        let mut cache = BTreeMap::new();
        for y in program.decls.keys() {
            weight_in(
                &Statement::Var(y.clone()),
                &program.decls,
                &mut cache,
                &mut BTreeSet::new(),
            )?;
        }
        program.var_weights = cache;
        Ok(program)
    }

    /// The same declarations and channels with a different main statement.
    pub fn with_main(&self, main: Statement) -> Result<Self, ProgramError> {
        Program::new(
            self.calculus,
            self.channels.clone(),
            self.decls.clone(),
            main,
            self.nbar,
        )
    }

    /// Validates a statement against this program's declarations; `allow_hole`
    /// admits context holes.
    pub fn check_statement(&self, x: &Statement, allow_hole: bool) -> Result<(), ProgramError> {
        for s in x.subterms() {
            match s {
                Statement::Hole if !allow_hole => return Err(ProgramError::HoleOutsideContext),
                Statement::Var(y) if !self.decls.contains_key(y) => {
                    return Err(ProgramError::UnboundVariable(y.clone()))
                }
                Statement::Restrict(_, c) => self.check_channel(c)?,
                Statement::Act(a) => self.check_action(a)?,
                _ => {}
            }
        }
        Ok(())
    }

    fn check_channel(&self, c: &Name) -> Result<(), ProgramError> {
        if self.channels.contains(c) {
            Ok(())
        } else {
            Err(ProgramError::UndeclaredChannel(c.clone()))
        }
    }

    fn check_action(&self, a: &Action) -> Result<(), ProgramError> {
        let wrong = |what: &str| ProgramError::WrongCalculusConstruct {
            construct: what.to_string(),
            calculus: self.calculus,
        };
        let check_len = |len: usize| {
            if len == 0 {
                Err(ProgramError::Syntax {
                    line: 0,
                    col: 0,
                    message: "empty joint construct".into(),
                })
            } else if len > self.nbar {
                Err(ProgramError::JointTooLong {
                    len,
                    nbar: self.nbar,
                })
            } else {
                Ok(())
            }
        };
        match (a, self.calculus) {
            (Action::Stop, _) => Ok(()),
            (Action::Internal(b), _) => {
                if self.channels.contains(b) || self.decls.contains_key(b) {
                    Err(ProgramError::NameClash(b.clone()))
                } else {
                    Ok(())
                }
            }
            (Action::Output(c), Calculus::Ccsn) => self.check_channel(c),
            (Action::JointInput(cs), Calculus::Ccsn) => {
                check_len(cs.len())?;
                cs.iter().try_for_each(|c| self.check_channel(c))
            }
            (Action::JointPrefix(ls), Calculus::CcsnPlus) => {
                check_len(ls.len())?;
                ls.iter().try_for_each(|l| self.check_channel(&l.channel))
            }
            (Action::Output(_), Calculus::CcsnPlus) => Err(wrong("plain output")),
            (Action::JointInput(_), Calculus::CcsnPlus) => Err(wrong("joint input")),
            (Action::JointPrefix(_), Calculus::Ccsn) => Err(wrong("joint prefix")),
        }
    }

    pub fn calculus(&self) -> Calculus {
        self.calculus
    }

    pub fn channels(&self) -> &BTreeSet<Name> {
        &self.channels
    }

    pub fn decls(&self) -> &BTreeMap<Name, Statement> {
        &self.decls
    }

    pub fn main(&self) -> &Statement {
        &self.main
    }

    pub fn nbar(&self) -> usize {
        self.nbar
    }

    /// `D(y)`.
    pub fn body(&self, y: &Name) -> Option<&Statement> {
        self.decls.get(y)
    }

    /// `wgt(x)`, using the cached weights of declared variables.
    pub fn weight(&self, x: &Statement) -> usize {
        match x {
            Statement::Act(_) | Statement::Hole => 1,
            Statement::Var(y) => self.var_weights.get(y).copied().unwrap_or(1),
            Statement::Restrict(x, _) => 1 + self.weight(x),
            Statement::Binary(BinOp::Seq | BinOp::LeftMerge, l, _) => 1 + self.weight(l),
            Statement::Binary(_, l, r) => 1 + self.weight(l).max(self.weight(r)),
        }
    }

    /// The largest weight of any statement reachable from `x` by taking
    /// subterms and unfolding declarations.
    pub fn max_subterm_weight(&self, x: &Statement) -> usize {
        let mut seen = BTreeSet::new();
        let mut todo = vec![x];
        let mut best = 0;
        while let Some(s) = todo.pop() {
            for t in s.subterms() {
                best = best.max(self.weight(t));
                if let Statement::Var(y) = t {
                    if seen.insert(y.clone()) {
                        if let Some(body) = self.decls.get(y) {
                            todo.push(body);
                        }
                    }
                }
            }
        }
        best
    }
}

/// A statement with holes `◦`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SyntacticContext(pub Statement);

impl SyntacticContext {
    pub fn hole() -> Self {
        SyntacticContext(Statement::Hole)
    }

    /// `S(x)`: replaces every hole by `x`.
    pub fn fill(&self, x: &Statement) -> Statement {
        fill(&self.0, x)
    }

    pub fn holes(&self) -> usize {
        self.0
            .subterms()
            .into_iter()
            .filter(|s| matches!(s, Statement::Hole))
            .count()
    }
}

fn fill(s: &Statement, x: &Statement) -> Statement {
    match s {
        Statement::Hole => x.clone(),
        Statement::Act(_) | Statement::Var(_) => s.clone(),
        Statement::Restrict(inner, c) => Statement::Restrict(Arc::new(fill(inner, x)), c.clone()),
        Statement::Binary(op, l, r) => {
            Statement::Binary(*op, Arc::new(fill(l, x)), Arc::new(fill(r, x)))
        }
    }
}

impl fmt::Display for SyntacticContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Statement {
        Statement::internal(s)
    }

    #[test]
    fn weight_examples() {
        let decls = BTreeMap::new();
        assert_eq!(weight(&b("b"), &decls), Ok(1));
        let big = Statement::merge(b("b1"), Statement::merge(b("b2"), b("b3")));
        assert_eq!(weight(&Statement::seq(b("b"), big), &decls), Ok(2));
        assert_eq!(weight(&Statement::merge(b("b1"), b("b2")), &decls), Ok(2));
    }

    #[test]
    fn weight_through_declarations() {
        let mut decls = BTreeMap::new();
        decls.insert(Name::new("y"), Statement::seq(b("b"), Statement::var("y")));
        // wgt(y) = 1 + wgt(b;y) = 1 + 1 + wgt(b)
        assert_eq!(weight(&Statement::var("y"), &decls), Ok(3));
        decls.insert(Name::new("z"), Statement::var("z"));
        assert_eq!(
            weight(&Statement::var("z"), &decls),
            Err(ProgramError::UnguardedRecursion(Name::new("z")))
        );
    }

    #[test]
    fn guardedness_examples() {
        assert!(b("b").is_guarded());
        assert!(!Statement::var("y").is_guarded());
        assert!(Statement::seq(b("b"), Statement::var("y")).is_guarded());
        assert!(!Statement::seq(Statement::var("y"), b("b")).is_guarded());
        assert!(!Statement::choice(b("b"), Statement::var("y")).is_guarded());
        assert!(Statement::binary(BinOp::LeftMerge, b("b"), Statement::var("y")).is_guarded());
        assert!(!Statement::binary(BinOp::LeftSyncMerge, b("b"), Statement::var("y")).is_guarded());
    }

    #[test]
    fn fill_examples() {
        let x = Statement::seq(b("b1"), b("b2"));
        assert_eq!(SyntacticContext::hole().fill(&x), x);
        let s = SyntacticContext(Statement::merge(Statement::Hole, b("b")));
        assert_eq!(s.fill(&x), Statement::merge(x.clone(), b("b")));
        let s = SyntacticContext(b("a"));
        assert_eq!(s.fill(&x), b("a"));
        let twice = SyntacticContext(Statement::choice(Statement::Hole, Statement::Hole));
        assert_eq!(twice.holes(), 2);
        assert!(!twice.fill(&x).contains_hole());
    }

    #[test]
    fn program_rejects_unguarded_declaration() {
        let mut decls = BTreeMap::new();
        decls.insert(Name::new("y"), Statement::var("y"));
        let err = Program::new(Calculus::Ccsn, BTreeSet::new(), decls, b("b"), 2).unwrap_err();
        assert_eq!(err, ProgramError::UnguardedRecursion(Name::new("y")));
    }

    #[test]
    fn program_rejects_wrong_calculus() {
        let chans: BTreeSet<Name> = [Name::new("c")].into_iter().collect();
        let out = Statement::act(Action::Output(Name::new("c")));
        let err = Program::new(Calculus::CcsnPlus, chans, BTreeMap::new(), out, 2).unwrap_err();
        assert!(matches!(err, ProgramError::WrongCalculusConstruct { .. }));
    }

    #[test]
    fn max_subterm_weight_sees_declarations() {
        let mut decls = BTreeMap::new();
        let deep = Statement::merge(Statement::merge(b("b1"), b("b2")), b("b3"));
        decls.insert(Name::new("y"), Statement::seq(b("b"), deep));
        let p = Program::new(
            Calculus::Ccsn,
            BTreeSet::new(),
            decls,
            Statement::var("y"),
            2,
        )
        .unwrap();
        assert_eq!(p.weight(&Statement::var("y")), 3);
        assert_eq!(p.max_subterm_weight(p.main()), 3);
    }
}
