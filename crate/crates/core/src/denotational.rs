//! Continuations, denotation terms and the budgeted denotational semantics.
//!
//! Denotations are kept as terms over statements and the semantic operators,
//! so that continuations holding them can be compared structurally. A term
//! means the function obtained by evaluating it against a continuation.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::bags::Bag;
use crate::identifiers::{Identifier, Layer, Name};
use crate::interaction::{interact, InteractionResult, InteractionSet, Participant};
use crate::operational::{collapse, Collapsible, SemanticsError};
use crate::syntax::{Action, BinOp, Program, Statement};
use crate::traces::{choice_merge, truncate_set, End, Trace, TraceSet};

/// An element of the denotation domain, written as a term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DenTerm {
    /// `D(x)`
    Of(Statement),
    /// `φ\c`
    Restrict(Arc<DenTerm>, Name),
    /// `φ₁ op φ₂` for the semantic counterpart of `op`.
    Binary(BinOp, Arc<DenTerm>, Arc<DenTerm>),
}

impl DenTerm {
    pub fn of(x: Statement) -> Self {
        DenTerm::Of(x)
    }

    pub fn restrict(d: DenTerm, c: Name) -> Self {
        DenTerm::Restrict(Arc::new(d), c)
    }

    pub fn binary(op: BinOp, d1: DenTerm, d2: DenTerm) -> Self {
        DenTerm::Binary(op, Arc::new(d1), Arc::new(d2))
    }
}

impl fmt::Display for DenTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DenTerm::Of(x) => write!(f, "D({x})"),
            DenTerm::Restrict(d, c) => write!(f, "({d})\\{c}"),
            DenTerm::Binary(op, d1, d2) => write!(f, "({d1} {} {d2})", op.symbol()),
        }
    }
}

impl fmt::Debug for DenTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `φ_E | φ`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Denotation {
    Empty,
    Term(DenTerm),
}

impl Collapsible for Denotation {
    fn terminated() -> Self {
        Denotation::Empty
    }

    fn restrict(self, c: &Name) -> Self {
        match self {
            Denotation::Empty => Denotation::Empty,
            Denotation::Term(d) => Denotation::Term(DenTerm::restrict(d, c.clone())),
        }
    }

    fn seq(self, other: Self) -> Self {
        match (self, other) {
            (Denotation::Empty, d) | (d, Denotation::Empty) => d,
            (Denotation::Term(d1), Denotation::Term(d2)) => {
                Denotation::Term(DenTerm::binary(BinOp::Seq, d1, d2))
            }
        }
    }

    fn par(self, other: Self) -> Self {
        match (self, other) {
            (Denotation::Empty, d) | (d, Denotation::Empty) => d,
            (Denotation::Term(d1), Denotation::Term(d2)) => {
                Denotation::Term(DenTerm::binary(BinOp::Merge, d1, d2))
            }
        }
    }
}

/// `kd(α, κ)`
pub fn collapse_kd(a: &Identifier, k: &Bag<Denotation>) -> Result<Denotation, SemanticsError> {
    collapse(a, k)
}

/// `(φs, u, ⟨μ⟩κ)`, with `sync` and `ids` stored head first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Continuation {
    pub sync: Vec<DenTerm>,
    pub iset: InteractionSet,
    pub ids: Vec<Identifier>,
    pub kbag: Bag<Denotation>,
}

/// The four continuation transformers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transform {
    Restrict(Name),
    AddSeq(DenTerm),
    AddLeftMerge(DenTerm),
    AddLeftSync(DenTerm),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("push guard len(sync) + |u| < nbar fails")]
pub struct GuardViolation;

impl Continuation {
    /// `γ₀ = ((), ∅, ⟨(•)⟩λα.φ_E)`
    pub fn initial() -> Self {
        Continuation {
            sync: Vec::new(),
            iset: InteractionSet::new(),
            ids: vec![Identifier::Hole],
            kbag: Bag::empty(Denotation::Empty),
        }
    }

    pub fn head(&self) -> &Identifier {
        &self.ids[0]
    }

    /// `card_u`
    pub fn card_u(&self) -> usize {
        self.iset.len()
    }

    /// `card_γ`: `len(φs) + |u| < n̄`.
    pub fn card_gamma(&self, nbar: usize) -> bool {
        self.sync.len() + self.iset.len() < nbar
    }

    pub fn lengths_agree(&self) -> bool {
        self.ids.len() == self.sync.len() + 1
    }

    pub fn transform(&self, t: Transform, nbar: usize) -> Result<Continuation, GuardViolation> {
        let mut g = self.clone();
        let a = g.ids[0].clone();
        match t {
            Transform::Restrict(c) => g.ids[0] = a.extend(Layer::Restrict(c)),
            Transform::AddSeq(d) => {
                g.ids[0] = a.extend(Layer::SeqLeft);
                g.kbag = g.kbag.bind(a.seq_key(), Denotation::Term(d));
            }
            Transform::AddLeftMerge(d) => {
                g.ids[0] = a.extend(Layer::ParLeft);
                g.kbag = g.kbag.bind(a.extend(Layer::ParRight), Denotation::Term(d));
            }
            Transform::AddLeftSync(d) => {
                if !self.card_gamma(nbar) {
                    return Err(GuardViolation);
                }
                g.ids[0] = a.extend(Layer::ParRight);
                g.ids.insert(0, a.extend(Layer::ParLeft));
                g.sync.insert(0, d);
            }
        }
        Ok(g)
    }
}

/// Evaluation engine for one program. Results are memoized per
/// `(term, continuation, budget)`.
pub struct Denotational<'p> {
    program: &'p Program,
    memo: RefCell<HashMap<(DenTerm, Continuation, usize), TraceSet>>,
    unreachable: Cell<usize>,
}

impl<'p> Denotational<'p> {
    pub fn new(program: &'p Program) -> Self {
        Denotational {
            program,
            memo: RefCell::new(HashMap::new()),
            unreachable: Cell::new(0),
        }
    }

    /// How often a branch of `op_A` that the resumption invariants exclude
    /// was taken.
    pub fn unreachable_hits(&self) -> usize {
        self.unreachable.get()
    }

    fn nbar(&self) -> usize {
        self.program.nbar()
    }

    fn transform(&self, g: &Continuation, t: Transform) -> Continuation {
        g.transform(t, self.nbar())
            .expect("guard checked by caller")
    }

    /// `D(x)(γ₀)` at budget `m`.
    pub fn den_d(&self, x: &Statement, m: usize) -> Result<TraceSet, SemanticsError> {
        self.eval(&DenTerm::Of(x.clone()), &Continuation::initial(), m)
    }

    /// `φ(γ)` at budget `m`: the exact trace set with every trace longer
    /// than `m` symbols cut after `m` symbols.
    pub fn eval(
        &self,
        d: &DenTerm,
        g: &Continuation,
        m: usize,
    ) -> Result<TraceSet, SemanticsError> {
        let key = (d.clone(), g.clone(), m);
        if let Some(p) = self.memo.borrow().get(&key) {
            return Ok(p.clone());
        }
        let p = self.eval_uncached(d, g, m)?;
        self.memo.borrow_mut().insert(key, p.clone());
        Ok(p)
    }

    fn eval_uncached(
        &self,
        d: &DenTerm,
        g: &Continuation,
        m: usize,
    ) -> Result<TraceSet, SemanticsError> {
        match d {
            DenTerm::Of(x) => match x {
                Statement::Act(a) => self.op_a(a, g, m),
                Statement::Var(y) => {
                    let body = self
                        .program
                        .body(y)
                        .ok_or_else(|| SemanticsError::UnboundVariable(y.clone()))?;
                    self.eval(&DenTerm::Of(body.clone()), g, m)
                }
                Statement::Hole => Err(SemanticsError::HoleInStatement),
                Statement::Restrict(x1, c) => self.eval(
                    &DenTerm::Of((**x1).clone()),
                    &self.transform(g, Transform::Restrict(c.clone())),
                    m,
                ),
                Statement::Binary(op, x1, x2) => self.eval_binary(
                    *op,
                    &DenTerm::Of((**x1).clone()),
                    &DenTerm::Of((**x2).clone()),
                    g,
                    m,
                ),
            },
            DenTerm::Restrict(d1, c) => {
                self.eval(d1, &self.transform(g, Transform::Restrict(c.clone())), m)
            }
            DenTerm::Binary(op, d1, d2) => self.eval_binary(*op, d1, d2, g, m),
        }
    }

    fn eval_binary(
        &self,
        op: BinOp,
        d1: &DenTerm,
        d2: &DenTerm,
        g: &Continuation,
        m: usize,
    ) -> Result<TraceSet, SemanticsError> {
        match op {
            BinOp::Seq => self.eval(d1, &self.transform(g, Transform::AddSeq(d2.clone())), m),
            BinOp::LeftMerge => self.eval(
                d1,
                &self.transform(g, Transform::AddLeftMerge(d2.clone())),
                m,
            ),
            BinOp::LeftSyncMerge => self.left_sync(d1, d2, g, m),
            BinOp::Choice => {
                let p1 = self.eval(d1, g, m)?;
                let p2 = self.eval(d2, g, m)?;
                self.choice(g, &[p1, p2], m)
            }
            BinOp::SyncMerge => {
                let p1 = self.left_sync(d1, d2, g, m)?;
                let p2 = self.left_sync(d2, d1, g, m)?;
                self.choice(g, &[p1, p2], m)
            }
            BinOp::Merge => {
                let g12 = self.transform(g, Transform::AddLeftMerge(d2.clone()));
                let g21 = self.transform(g, Transform::AddLeftMerge(d1.clone()));
                let p1 = self.eval(d1, &g12, m)?;
                let p2 = self.eval(d2, &g21, m)?;
                let p3 = self.left_sync(d1, d2, g, m)?;
                let p4 = self.left_sync(d2, d1, g, m)?;
                self.choice(g, &[p1, p2, p3, p4], m)
            }
        }
    }

    /// `φ₁ ⌊ φ₂`
    fn left_sync(
        &self,
        d1: &DenTerm,
        d2: &DenTerm,
        g: &Continuation,
        m: usize,
    ) -> Result<TraceSet, SemanticsError> {
        if g.card_gamma(self.nbar()) {
            self.eval(
                d1,
                &self.transform(g, Transform::AddLeftSync(d2.clone())),
                m,
            )
        } else {
            Ok(emit_taus(self.nbar() - g.card_u().min(self.nbar()), m))
        }
    }

    /// `⊕` at level `card_u(γ)`, folded over the operands.
    fn choice(
        &self,
        g: &Continuation,
        ps: &[TraceSet],
        m: usize,
    ) -> Result<TraceSet, SemanticsError> {
        let nbar = self.nbar();
        let i = g.card_u();
        if i > nbar {
            self.unreachable.set(self.unreachable.get() + 1);
        }
        let mut acc = ps[0].clone();
        for p in &ps[1..] {
            acc = choice_merge(i.min(nbar), &acc, p, nbar).expect("level clamped to nbar");
        }
        Ok(truncate_set(&acc, m))
    }

    /// `op_A(a)(γ)`
    fn op_a(&self, a: &Action, g: &Continuation, m: usize) -> Result<TraceSet, SemanticsError> {
        let nbar = self.nbar();
        let u = g.card_u();
        if u > nbar {
            // excluded by `len(φs) + |u| ≤ n̄`; answered with the deadlock shape
            self.unreachable.set(self.unreachable.get() + 1);
            return Ok(emit_taus(0, m));
        }
        let w = nbar - u;
        let mut iset = g.iset.clone();
        iset.insert(Participant::new(a.clone(), g.head().clone()));
        if g.sync.is_empty() {
            if g.ids.len() != 1 {
                self.unreachable.set(self.unreachable.get() + 1);
            }
            let InteractionResult::Yields(b) = interact(self.program.calculus(), &iset) else {
                return Ok(emit_taus(w, m));
            };
            let mut prefix = vec![Name::tau(); w];
            prefix.push(b);
            match collapse_kd(&Identifier::Hole, &g.kbag)? {
                Denotation::Empty => Ok(emit(prefix, m, |_| Ok(TraceSet::singleton(Trace::eps())))),
                Denotation::Term(d) => emit_then(prefix, m, |rest| {
                    self.eval(&d, &Continuation::initial(), rest)
                }),
            }
        } else {
            let mut sync = g.sync.clone();
            let head = sync.remove(0);
            let mut ids = g.ids.clone();
            ids.remove(0);
            let next = Continuation {
                sync,
                iset,
                ids,
                kbag: g.kbag.clone(),
            };
            emit_then(vec![Name::tau()], m, |rest| self.eval(&head, &next, rest))
        }
    }
}

/// `{τ^w}` within budget `m`.
fn emit_taus(w: usize, m: usize) -> TraceSet {
    emit(vec![Name::tau(); w], m, |_| {
        Ok(TraceSet::singleton(Trace::eps()))
    })
}

fn emit(
    prefix: Vec<Name>,
    m: usize,
    rest: impl FnOnce(usize) -> Result<TraceSet, SemanticsError>,
) -> TraceSet {
    emit_then(prefix, m, rest).expect("terminal continuation cannot fail")
}

/// `prefix · rest`, where `rest` receives what is left of the budget. When
/// the prefix alone exceeds the budget it is cut and `rest` is not run.
fn emit_then(
    prefix: Vec<Name>,
    m: usize,
    rest: impl FnOnce(usize) -> Result<TraceSet, SemanticsError>,
) -> Result<TraceSet, SemanticsError> {
    if prefix.len() > m {
        return Ok(TraceSet::singleton(Trace::new(
            prefix[..m].to_vec(),
            End::Cut,
        )));
    }
    let tail = rest(m - prefix.len())?;
    Ok(tail
        .into_iter()
        .map(|q| {
            let mut symbols = prefix.clone();
            symbols.extend(q.symbols);
            Trace::new(symbols, q.end)
        })
        .collect())
}

/// `D⟦x⟧` at budget `m`, for a statement over the declarations of `p`.
pub fn den_d(x: &Statement, p: &Program, m: usize) -> Result<TraceSet, SemanticsError> {
    Denotational::new(p).den_d(x, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, Calculus};
    use crate::traces::tests::ts;

    fn den(text: &str, calculus: Calculus) -> TraceSet {
        let p = parse_program(text, calculus, 2).unwrap();
        let e = Denotational::new(&p);
        let out = e.den_d(p.main(), 30).unwrap();
        assert_eq!(e.unreachable_hits(), 0);
        out
    }

    #[test]
    fn initial_continuation() {
        let g = Continuation::initial();
        assert_eq!(g.ids, vec![Identifier::Hole]);
        assert_eq!(
            *g.kbag.lookup(&Identifier::par_left(Identifier::Hole)),
            Denotation::Empty
        );
        assert_eq!(g.card_u(), 0);
        assert!(g.card_gamma(2));
        let full = Continuation {
            sync: vec![DenTerm::of(Statement::stop()); 2],
            ids: vec![Identifier::Hole; 3],
            ..Continuation::initial()
        };
        assert!(!full.card_gamma(2));
    }

    #[test]
    fn transformer_examples() {
        let g = Continuation::initial();
        let d = DenTerm::of(Statement::internal("x"));
        let r = g.transform(Transform::Restrict(Name::new("c")), 2).unwrap();
        assert_eq!(
            r.ids,
            vec![Identifier::restrict(Identifier::Hole, Name::new("c"))]
        );
        let s = g.transform(Transform::AddLeftSync(d.clone()), 2).unwrap();
        assert_eq!(
            s.ids,
            vec![
                Identifier::par_left(Identifier::Hole),
                Identifier::par_right(Identifier::Hole)
            ]
        );
        assert!(s.lengths_agree());
        let q = g.transform(Transform::AddSeq(d.clone()), 2).unwrap();
        assert_eq!(
            *q.kbag.lookup(&Identifier::SeqMarker),
            Denotation::Term(d.clone())
        );
        let full = s.transform(Transform::AddLeftSync(d.clone()), 2).unwrap();
        assert_eq!(
            full.transform(Transform::AddLeftSync(d), 2),
            Err(GuardViolation)
        );
    }

    #[test]
    fn collapse_kd_examples() {
        let k: Bag<Denotation> = Bag::empty(Denotation::Empty);
        assert_eq!(
            collapse_kd(&Identifier::Hole, &k).unwrap(),
            Denotation::Empty
        );
        let d1 = DenTerm::of(Statement::internal("x"));
        let d2 = DenTerm::of(Statement::internal("y"));
        let k1 = k.bind(Identifier::Hole, Denotation::Term(d1.clone()));
        assert_eq!(
            collapse_kd(&Identifier::Hole, &k1).unwrap(),
            Denotation::Term(d1.clone())
        );
        let k2 = k
            .bind(
                Identifier::par_left(Identifier::Hole),
                Denotation::Term(d1.clone()),
            )
            .bind(
                Identifier::par_right(Identifier::Hole),
                Denotation::Term(d2.clone()),
            );
        assert_eq!(
            collapse_kd(&Identifier::Hole, &k2).unwrap(),
            Denotation::Term(DenTerm::binary(BinOp::Merge, d1, d2))
        );
    }

    #[test]
    fn single_actions() {
        assert_eq!(den("run b", Calculus::Ccsn), ts(&["tau.tau.b"]));
        assert_eq!(den("run stop", Calculus::Ccsn), ts(&["tau.tau"]));
    }

    #[test]
    fn example_trace_sets() {
        assert_eq!(
            den("run (b1 || b2); stop", Calculus::Ccsn),
            ts(&[
                "tau.tau.b1.tau.tau.b2.tau.tau",
                "tau.tau.b2.tau.tau.b1.tau.tau"
            ])
        );
        assert_eq!(
            den(
                "chan c1 c2; run (((b1; c1&c2) || ~c1)\\c1 || ~c2); (b2 + b3)",
                Calculus::Ccsn
            ),
            ts(&[
                "tau.tau.b1.tau.tau.tau.tau.tau.b2",
                "tau.tau.b1.tau.tau.tau.tau.tau.b3"
            ])
        );
        assert_eq!(
            den("chan c1 c2; run (c1&c2 || ~c1)\\c1 || ~c2", Calculus::Ccsn),
            ts(&["tau.tau.tau"])
        );
        assert_eq!(
            den(
                "chan c1 c2 c3; run ((~c1&c2; b1) || c1&~c3)\\c1 || (~c2&c3; b2)",
                Calculus::CcsnPlus
            ),
            ts(&[
                "tau.tau.tau.tau.tau.b1.tau.tau.b2",
                "tau.tau.tau.tau.tau.b2.tau.tau.b1"
            ])
        );
    }

    #[test]
    fn budget_cuts_prefixes() {
        let p = parse_program("run b1; b2", Calculus::Ccsn, 2).unwrap();
        let e = Denotational::new(&p);
        assert_eq!(e.den_d(p.main(), 0).unwrap(), ts(&["cut"]));
        assert_eq!(e.den_d(p.main(), 2).unwrap(), ts(&["tau.tau.cut"]));
        assert_eq!(e.den_d(p.main(), 3).unwrap(), ts(&["tau.tau.b1.cut"]));
        assert_eq!(
            e.den_d(p.main(), 6).unwrap(),
            ts(&["tau.tau.b1.tau.tau.b2"])
        );
    }
}
