//! Resumptions, the `ks` collapse, the transition relation and the
//! budgeted operational semantics.
//!
//! Transition inheritance (`t₁ ↗ t₂`) is read as rewriting: a configuration
//! is rewritten until an elementary action either fires through the axiom or
//! gets nowhere, and the collected firings are its successors.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::bags::Bag;
use crate::identifiers::{filter_below, restricted_names_below, IdSet, Identifier, Layer, Name};
use crate::interaction::{interact, InteractionResult, InteractionSet, Participant};
use crate::syntax::{BinOp, Program, Statement};
use crate::traces::{prefix_action, Trace, TraceSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("more than one restricted name ({names:?}) directly below {at}")]
    AmbiguousRestriction { at: Identifier, names: Vec<Name> },
    #[error("context hole `@` reached during evaluation")]
    HoleInStatement,
    #[error("unbound process variable `{0}`")]
    UnboundVariable(Name),
}

/// `E | x`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RRes {
    Terminated,
    Pending(Statement),
}

impl fmt::Display for RRes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RRes::Terminated => f.write_str("E"),
            RRes::Pending(x) => write!(f, "{x}"),
        }
    }
}

/// `(f, u, ⟨μ⟩k)`. `sync` and `ids` are stored head first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Resumption {
    pub sync: Vec<Statement>,
    pub iset: InteractionSet,
    pub ids: Vec<Identifier>,
    pub kbag: Bag<RRes>,
}

impl Resumption {
    /// `((), ∅, ⟨(•)⟩k₀)`
    pub fn initial() -> Self {
        Resumption {
            sync: Vec::new(),
            iset: InteractionSet::new(),
            ids: vec![Identifier::Hole],
            kbag: Bag::empty(RRes::Terminated),
        }
    }

    pub fn head(&self) -> &Identifier {
        &self.ids[0]
    }

    fn with_head(mut self, a: Identifier) -> Self {
        self.ids[0] = a;
        self
    }

    /// `(|u|, Σ size(αᵢ))`
    pub fn measure(&self) -> (usize, usize) {
        (self.iset.len(), self.ids.iter().map(Identifier::size).sum())
    }

    /// Whether the head-first lengths line up: one identifier per pending
    /// synchronous statement plus one for the active statement.
    pub fn lengths_agree(&self) -> bool {
        self.ids.len() == self.sync.len() + 1
    }

    /// Head rewritten to `α(ν(•)c)`.
    pub fn restrict(self, c: &Name) -> Self {
        let a = self.head().extend(Layer::Restrict(c.clone()));
        self.with_head(a)
    }

    /// Head rewritten to `α⟨•;` with `x` stored at `α(;•)`.
    pub fn add_seq(self, x: Statement) -> Self {
        let key = self.head().seq_key();
        let a = self.head().extend(Layer::SeqLeft);
        let mut next = self.with_head(a);
        next.kbag = next.kbag.bind(key, RRes::Pending(x));
        next
    }

    /// Head rewritten to `α⟨•∥` with `x` stored at `α∥•⟩`.
    pub fn add_lmerge(self, x: Statement) -> Self {
        let key = self.head().extend(Layer::ParRight);
        let a = self.head().extend(Layer::ParLeft);
        let mut next = self.with_head(a);
        next.kbag = next.kbag.bind(key, RRes::Pending(x));
        next
    }

    /// `x` pushed on the synchronous stack; head split into `α⟨•∥ : α∥•⟩`.
    pub fn add_lsync(mut self, x: Statement) -> Self {
        let a = self.ids.remove(0);
        self.ids.insert(0, a.extend(Layer::ParRight));
        self.ids.insert(0, a.extend(Layer::ParLeft));
        self.sync.insert(0, x);
        self
    }

    /// Guard of the push rules: `len(f) + |u| < n̄`.
    pub fn can_push(&self, nbar: usize) -> bool {
        self.sync.len() + self.iset.len() < nbar
    }
}

impl fmt::Display for Resumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sync: Vec<String> = self.sync.iter().map(|x| x.to_string()).collect();
        let iset: Vec<String> = self
            .iset
            .iter()
            .map(|p| format!("{}@{}", p.action, p.id))
            .collect();
        let ids: Vec<String> = self.ids.iter().map(|a| a.to_string()).collect();
        let bag: Vec<String> = self
            .kbag
            .entries()
            .map(|(a, r)| format!("{a}->{r}"))
            .collect();
        write!(
            f,
            "(({}), {{{}}}, <({})>{{{}}})",
            sync.join(", "),
            iset.join(", "),
            ids.join(", "),
            bag.join(", ")
        )
    }
}

/// `t ∈ Conf`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Configuration {
    Running(Statement, Resumption),
    Final(RRes),
}

/// Values that can be reassembled by the `ks`/`kd` collapse.
pub(crate) trait Collapsible: Clone {
    fn terminated() -> Self;
    fn restrict(self, c: &Name) -> Self;
    fn seq(self, other: Self) -> Self;
    fn par(self, other: Self) -> Self;
}

impl Collapsible for RRes {
    fn terminated() -> Self {
        RRes::Terminated
    }

    fn restrict(self, c: &Name) -> Self {
        match self {
            RRes::Terminated => RRes::Terminated,
            RRes::Pending(x) => RRes::Pending(Statement::restrict(x, c.as_str())),
        }
    }

    fn seq(self, other: Self) -> Self {
        match (self, other) {
            (RRes::Terminated, r) | (r, RRes::Terminated) => r,
            (RRes::Pending(x1), RRes::Pending(x2)) => RRes::Pending(Statement::seq(x1, x2)),
        }
    }

    fn par(self, other: Self) -> Self {
        match (self, other) {
            (RRes::Terminated, r) | (r, RRes::Terminated) => r,
            (RRes::Pending(x1), RRes::Pending(x2)) => RRes::Pending(Statement::merge(x1, x2)),
        }
    }
}

/// The shared four-way conditional behind `ks` and `kd`.
pub(crate) fn collapse<X: Collapsible>(a: &Identifier, k: &Bag<X>) -> Result<X, SemanticsError> {
    let pi: &IdSet = k.domain();
    let below = filter_below(pi, a);
    if below.is_empty() {
        return Ok(X::terminated());
    }
    if below.len() == 1 && below.contains(a) {
        return Ok(k.lookup(a).clone());
    }
    let names = restricted_names_below(pi, a);
    if names.len() > 1 {
        return Err(SemanticsError::AmbiguousRestriction {
            at: a.clone(),
            names: names.into_iter().collect(),
        });
    }
    if let Some(c) = names.into_iter().next() {
        let inner = collapse(&a.extend(Layer::Restrict(c.clone())), k)?;
        return Ok(inner.restrict(&c));
    }
    let key = a.seq_key();
    if pi.contains(&key) {
        let first = collapse(&a.extend(Layer::SeqLeft), k)?;
        return Ok(first.seq(k.lookup(&key).clone()));
    }
    let left = collapse(&a.extend(Layer::ParLeft), k)?;
    let right = collapse(&a.extend(Layer::ParRight), k)?;
    Ok(left.par(right))
}

/// `ks(α, k)`
pub fn collapse_k(a: &Identifier, k: &Bag<RRes>) -> Result<RRes, SemanticsError> {
    collapse(a, k)
}

/// Whether `rho` is derivable from the axiom by the resumption-forming rules.
///
/// Statements do not influence derivability, so the search runs backwards
/// over the shape `(len f, u, μ, id(k))`. Every inverted rule strictly lowers
/// the measure, so the search is finite.
pub fn well_formed(rho: &Resumption, nbar: usize) -> bool {
    if !rho.lengths_agree() || rho.sync.len() > nbar || rho.iset.len() > nbar + 1 {
        return false;
    }
    if *rho.kbag.default_value() != RRes::Terminated
        || rho.kbag.entries().any(|(_, r)| *r == RRes::Terminated)
    {
        return false;
    }
    let shape = Shape {
        flen: rho.sync.len(),
        iset: rho.iset.iter().map(|p| p.id.clone()).collect(),
        ids: rho.ids.clone(),
        domain: rho.kbag.domain().clone(),
    };
    if shape.iset.len() != rho.iset.len() {
        // two actions under the same identifier cannot come from distinct pops
        return false;
    }
    let mut seen = HashSet::new();
    derivable(shape, nbar, &mut seen)
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Shape {
    flen: usize,
    iset: BTreeSet<Identifier>,
    ids: Vec<Identifier>,
    domain: IdSet,
}

fn derivable(s: Shape, nbar: usize, seen: &mut HashSet<Shape>) -> bool {
    if s.flen == 0 && s.iset.is_empty() && s.ids == [Identifier::Hole] && s.domain.is_empty() {
        return true;
    }
    if !seen.insert(s.clone()) {
        return false;
    }
    // inverse pop: some member of u was the head of a longer resumption
    if s.iset.len() <= nbar + 1 && !s.iset.is_empty() && s.flen < nbar {
        for a in &s.iset {
            let mut prev = s.clone();
            prev.iset.remove(a);
            if prev.iset.len() > nbar {
                continue;
            }
            prev.flen += 1;
            prev.ids.insert(0, a.clone());
            if derivable(prev, nbar, seen) {
                return true;
            }
        }
    }
    let head = &s.ids[0];
    if let Some((base, layer)) = head.split_innermost() {
        match layer {
            Layer::Restrict(_) => {
                let mut prev = s.clone();
                prev.ids[0] = base.clone();
                if derivable(prev, nbar, seen) {
                    return true;
                }
            }
            Layer::SeqLeft | Layer::ParLeft => {
                let key = if layer == Layer::SeqLeft {
                    base.seq_key()
                } else {
                    base.extend(Layer::ParRight)
                };
                if s.domain.contains(&key) {
                    // the binding was either fresh or overwrote an earlier one
                    for keep in [false, true] {
                        let mut prev = s.clone();
                        prev.ids[0] = base.clone();
                        if !keep {
                            prev.domain.remove(&key);
                        }
                        if derivable(prev, nbar, seen) {
                            return true;
                        }
                    }
                }
                // inverse push: the head pair `α⟨•∥ : α∥•⟩` came from one identifier
                if layer == Layer::ParLeft && s.flen >= 1 && s.ids.len() >= 2 {
                    let right = base.extend(Layer::ParRight);
                    if s.ids[1] == right && (s.flen - 1) + s.iset.len() < nbar {
                        let mut prev = s.clone();
                        prev.flen -= 1;
                        prev.ids.remove(0);
                        prev.ids[0] = base.clone();
                        if derivable(prev, nbar, seen) {
                            return true;
                        }
                    }
                }
            }
            Layer::ParRight => {}
        }
    }
    false
}

/// Counters collected while running with invariant checks enabled.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvariantLog {
    /// Intermediate resumptions inspected.
    pub checked: usize,
    pub violations: Vec<String>,
    /// The largest number of rewrites seen on a single path, and its bound.
    pub max_rewrites: usize,
}

/// The operational engine for one program. Results for restarted statements
/// are memoized per budget.
pub struct Operational<'p> {
    program: &'p Program,
    memo: RefCell<HashMap<(Statement, usize), TraceSet>>,
    log: Option<RefCell<InvariantLog>>,
    wf_cache: RefCell<HashMap<Resumption, bool>>,
}

impl<'p> Operational<'p> {
    pub fn new(program: &'p Program) -> Self {
        Operational {
            program,
            memo: RefCell::new(HashMap::new()),
            log: None,
            wf_cache: RefCell::new(HashMap::new()),
        }
    }

    /// An engine that checks every intermediate resumption for the length
    /// invariant and derivability, and bounds the rewrites per transition.
    pub fn with_invariant_checks(program: &'p Program) -> Self {
        let mut e = Operational::new(program);
        e.log = Some(RefCell::new(InvariantLog::default()));
        e
    }

    pub fn invariant_log(&self) -> Option<InvariantLog> {
        self.log.as_ref().map(|l| l.borrow().clone())
    }

    pub fn program(&self) -> &Program {
        self.program
    }

    /// All `(b, r)` with `(x, rho) →b r`.
    pub fn successors(
        &self,
        x: &Statement,
        rho: Resumption,
    ) -> Result<BTreeSet<(Name, RRes)>, SemanticsError> {
        let mut out = BTreeSet::new();
        let bound = (self.program.nbar() + 1) * (self.program.max_subterm_weight(x) + 1);
        self.rewrite(x, rho, 0, bound, &mut out)?;
        Ok(out)
    }

    fn observe(&self, rho: &Resumption, depth: usize, bound: usize) {
        let Some(log) = &self.log else { return };
        let nbar = self.program.nbar();
        let wf = *self
            .wf_cache
            .borrow_mut()
            .entry(rho.clone())
            .or_insert_with(|| well_formed(rho, nbar));
        let mut log = log.borrow_mut();
        log.checked += 1;
        log.max_rewrites = log.max_rewrites.max(depth);
        if !rho.lengths_agree() {
            log.violations.push(format!("length mismatch in {rho}"));
        }
        if !wf {
            log.violations.push(format!("underivable resumption {rho}"));
        }
        if depth > bound {
            log.violations
                .push(format!("{depth} rewrites exceed the bound {bound}"));
        }
    }

    fn rewrite(
        &self,
        x: &Statement,
        rho: Resumption,
        depth: usize,
        bound: usize,
        out: &mut BTreeSet<(Name, RRes)>,
    ) -> Result<(), SemanticsError> {
        self.observe(&rho, depth, bound);
        let nbar = self.program.nbar();
        let next = depth + 1;
        match x {
            Statement::Act(a) => {
                if rho.iset.len() > nbar {
                    return Ok(());
                }
                let mut iset = rho.iset.clone();
                iset.insert(Participant::new(a.clone(), rho.head().clone()));
                if rho.sync.is_empty() {
                    // (A0)
                    if rho.ids.len() == 1 {
                        if let InteractionResult::Yields(b) =
                            interact(self.program.calculus(), &iset)
                        {
                            out.insert((b, collapse_k(&Identifier::Hole, &rho.kbag)?));
                        }
                    }
                } else {
                    // (R1)
                    let Resumption {
                        mut sync,
                        mut ids,
                        kbag,
                        ..
                    } = rho;
                    let x2 = sync.remove(0);
                    ids.remove(0);
                    let popped = Resumption {
                        sync,
                        iset,
                        ids,
                        kbag,
                    };
                    self.rewrite(&x2, popped, next, bound, out)?;
                }
            }
            Statement::Var(y) => {
                // (R2)
                let body = self
                    .program
                    .body(y)
                    .ok_or_else(|| SemanticsError::UnboundVariable(y.clone()))?;
                self.rewrite(body, rho, next, bound, out)?;
            }
            Statement::Hole => return Err(SemanticsError::HoleInStatement),
            // (R3)
            Statement::Restrict(x1, c) => self.rewrite(x1, rho.restrict(c), next, bound, out)?,
            Statement::Binary(op, x1, x2) => match op {
                // (R4)
                BinOp::Seq => self.rewrite(x1, rho.add_seq((**x2).clone()), next, bound, out)?,
                // (R5), (R6)
                BinOp::Choice => {
                    self.rewrite(x1, rho.clone(), next, bound, out)?;
                    self.rewrite(x2, rho, next, bound, out)?;
                }
                // (R7)
                BinOp::LeftMerge => {
                    self.rewrite(x1, rho.add_lmerge((**x2).clone()), next, bound, out)?
                }
                // (R8)
                BinOp::LeftSyncMerge => {
                    if rho.can_push(nbar) {
                        self.rewrite(x1, rho.add_lsync((**x2).clone()), next, bound, out)?;
                    }
                }
                // (R9), (R10)
                BinOp::SyncMerge => {
                    if rho.can_push(nbar) {
                        self.rewrite(x1, rho.clone().add_lsync((**x2).clone()), next, bound, out)?;
                        self.rewrite(x2, rho.add_lsync((**x1).clone()), next, bound, out)?;
                    }
                }
                // (R11)-(R14)
                BinOp::Merge => {
                    self.rewrite(x1, rho.clone().add_lmerge((**x2).clone()), next, bound, out)?;
                    self.rewrite(x2, rho.clone().add_lmerge((**x1).clone()), next, bound, out)?;
                    if rho.can_push(nbar) {
                        self.rewrite(x1, rho.clone().add_lsync((**x2).clone()), next, bound, out)?;
                        self.rewrite(x2, rho.add_lsync((**x1).clone()), next, bound, out)?;
                    }
                }
            },
        }
        Ok(())
    }

    /// The labelled successors of a configuration. A final `Pending x`
    /// restarts from the initial resumption (R15); `E` has none.
    pub fn step(
        &self,
        t: &Configuration,
    ) -> Result<BTreeSet<(Name, Configuration)>, SemanticsError> {
        let succ = match t {
            Configuration::Final(RRes::Terminated) => BTreeSet::new(),
            Configuration::Final(RRes::Pending(x)) => self.successors(x, Resumption::initial())?,
            Configuration::Running(x, rho) => self.successors(x, rho.clone())?,
        };
        Ok(succ
            .into_iter()
            .map(|(b, r)| (b, Configuration::Final(r)))
            .collect())
    }

    /// `Ω^m` from the configuration `t`: exactly the operational trace set
    /// with every trace longer than `m` symbols cut after `m` symbols.
    pub fn run(&self, t: &Configuration, m: usize) -> Result<TraceSet, SemanticsError> {
        match t {
            Configuration::Final(RRes::Terminated) => Ok(TraceSet::singleton(Trace::eps())),
            Configuration::Final(RRes::Pending(x)) => self.run_statement(x, m),
            Configuration::Running(x, rho) => {
                let succ = self.successors(x, rho.clone())?;
                self.unfold(succ, m)
            }
        }
    }

    fn run_statement(&self, x: &Statement, m: usize) -> Result<TraceSet, SemanticsError> {
        let key = (x.clone(), m);
        if let Some(p) = self.memo.borrow().get(&key) {
            return Ok(p.clone());
        }
        let succ = self.successors(x, Resumption::initial())?;
        let p = self.unfold(succ, m)?;
        self.memo.borrow_mut().insert(key, p.clone());
        Ok(p)
    }

    fn unfold(&self, succ: BTreeSet<(Name, RRes)>, m: usize) -> Result<TraceSet, SemanticsError> {
        if succ.is_empty() {
            return Ok(TraceSet::singleton(Trace::delta()));
        }
        if m == 0 {
            return Ok(TraceSet::singleton(Trace::cut()));
        }
        let mut p = TraceSet::new();
        for (b, r) in succ {
            let rest = match r {
                RRes::Terminated => TraceSet::singleton(Trace::eps()),
                RRes::Pending(x) => self.run_statement(&x, m - 1)?,
            };
            p.extend(prefix_action(&b, &rest));
        }
        Ok(p)
    }

    /// `O⟦x⟧` at budget `m`.
    pub fn den_o(&self, x: &Statement, m: usize) -> Result<TraceSet, SemanticsError> {
        self.run_statement(x, m)
    }
}

/// `O⟦x⟧` at budget `m`, for a statement over the declarations of `p`.
pub fn den_o(x: &Statement, p: &Program, m: usize) -> Result<TraceSet, SemanticsError> {
    Operational::new(p).den_o(x, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, Action, Calculus};
    use crate::traces::tests::ts;

    fn prog(text: &str, calculus: Calculus) -> Program {
        parse_program(text, calculus, 2).unwrap()
    }

    fn run(text: &str) -> TraceSet {
        let p = prog(text, Calculus::Ccsn);
        den_o(p.main(), &p, 10).unwrap()
    }

    fn hole() -> Identifier {
        Identifier::Hole
    }

    #[test]
    fn initial_resumption() {
        let r = Resumption::initial();
        assert_eq!(r.ids, vec![hole()]);
        assert_eq!(
            *r.kbag.lookup(&Identifier::par_left(hole())),
            RRes::Terminated
        );
        assert_eq!(r.measure(), (0, 1));
        assert_eq!(r.clone().restrict(&Name::new("c")).measure(), (0, 2));
        assert!(well_formed(&r, 2));
    }

    #[test]
    fn well_formed_examples() {
        let pushed = Resumption::initial().add_lsync(Statement::internal("x"));
        assert_eq!(
            pushed.ids,
            vec![Identifier::par_left(hole()), Identifier::par_right(hole())]
        );
        assert!(well_formed(&pushed, 2));
        let bad = Resumption {
            sync: vec![Statement::internal("x")],
            ..Resumption::initial()
        };
        assert!(!well_formed(&bad, 2));
        // a pushed resumption violating the guard of the push rule
        let over = Resumption::initial()
            .add_lsync(Statement::internal("x"))
            .add_lsync(Statement::internal("y"))
            .add_lsync(Statement::internal("z"));
        assert!(!well_formed(&over, 2));
        // a popped action under a fresh head
        let mut popped = pushed.clone();
        popped.sync.remove(0);
        let a = popped.ids.remove(0);
        popped
            .iset
            .insert(Participant::new(Action::internal("b"), a));
        assert!(well_formed(&popped, 2));
        let seq = Resumption::initial()
            .add_seq(Statement::internal("x"))
            .add_lmerge(Statement::internal("y"))
            .restrict(&Name::new("c"));
        assert!(well_formed(&seq, 2));
        let mut orphan = Resumption::initial();
        orphan.ids[0] = Identifier::seq_left(hole());
        assert!(!well_formed(&orphan, 2));
    }

    #[test]
    fn collapse_examples() {
        let k: Bag<RRes> = Bag::empty(RRes::Terminated);
        assert_eq!(collapse_k(&hole(), &k).unwrap(), RRes::Terminated);
        let x = Statement::internal("x");
        let k1 = k.bind(hole(), RRes::Pending(x.clone()));
        assert_eq!(collapse_k(&hole(), &k1).unwrap(), RRes::Pending(x.clone()));
        let k2 = k.bind(Identifier::SeqMarker, RRes::Pending(x.clone()));
        assert_eq!(collapse_k(&hole(), &k2).unwrap(), RRes::Pending(x.clone()));
        let y = Statement::internal("y");
        let k3 = k
            .bind(Identifier::par_left(hole()), RRes::Pending(x.clone()))
            .bind(Identifier::par_right(hole()), RRes::Pending(y.clone()));
        assert_eq!(
            collapse_k(&hole(), &k3).unwrap(),
            RRes::Pending(Statement::merge(x.clone(), y))
        );
        let k4 = k.bind(
            Identifier::restrict(Identifier::par_right(hole()), Name::new("c")),
            RRes::Pending(x.clone()),
        );
        assert_eq!(
            collapse_k(&hole(), &k4).unwrap(),
            RRes::Pending(Statement::restrict(x.clone(), "c"))
        );
        let k5 = k4.bind(
            Identifier::restrict(Identifier::par_right(hole()), Name::new("d")),
            RRes::Pending(x),
        );
        assert!(matches!(
            collapse_k(&hole(), &k5),
            Err(SemanticsError::AmbiguousRestriction { .. })
        ));
    }

    #[test]
    fn step_examples() {
        let p = prog("run b", Calculus::Ccsn);
        let e = Operational::new(&p);
        let t = Configuration::Running(Statement::internal("b"), Resumption::initial());
        let succ = e.step(&t).unwrap();
        assert_eq!(
            succ.into_iter().collect::<Vec<_>>(),
            vec![(Name::new("b"), Configuration::Final(RRes::Terminated))]
        );
        let t = Configuration::Running(Statement::stop(), Resumption::initial());
        assert!(e.step(&t).unwrap().is_empty());

        let p = prog("chan c1 c2; run (c1&c2 || ~c1)\\c1 || ~c2", Calculus::Ccsn);
        let e = Operational::new(&p);
        let succ = e
            .step(&Configuration::Final(RRes::Pending(p.main().clone())))
            .unwrap();
        assert_eq!(succ.len(), 1);
        assert_eq!(succ.into_iter().next().unwrap().0, Name::tau());
    }

    #[test]
    fn example_trace_sets() {
        assert_eq!(
            run("run (b1 || b2); stop"),
            ts(&["b1.b2.delta", "b2.b1.delta"])
        );
        assert_eq!(
            run("chan c1 c2; run (((b1; c1&c2) || ~c1)\\c1 || ~c2); (b2 + b3)"),
            ts(&["b1.tau.b2", "b1.tau.b3"])
        );
        assert_eq!(
            run("chan c1 c2; run (c1&c2 || ~c1)\\c1 || ~c2"),
            ts(&["tau"])
        );
        assert_eq!(run("run stop"), ts(&["delta"]));
        assert_eq!(run("run tau"), ts(&["tau"]));
        let p = prog("let y = b; y; run y", Calculus::Ccsn);
        assert_eq!(den_o(p.main(), &p, 3).unwrap(), ts(&["b.b.b.cut"]));
    }

    #[test]
    fn joint_prefix_example() {
        let p = prog(
            "chan c1 c2 c3; run ((~c1&c2; b1) || c1&~c3)\\c1 || (~c2&c3; b2)",
            Calculus::CcsnPlus,
        );
        assert_eq!(
            den_o(p.main(), &p, 10).unwrap(),
            ts(&["tau.b1.b2", "tau.b2.b1"])
        );
    }

    #[test]
    fn invariants_hold_on_examples() {
        for text in [
            "run (b1 || b2); stop",
            "chan c1 c2; run (((b1; c1&c2) || ~c1)\\c1 || ~c2); (b2 + b3)",
            "chan c; let y = (b || ~c); y; run y | c",
        ] {
            let p = prog(text, Calculus::Ccsn);
            let e = Operational::with_invariant_checks(&p);
            e.den_o(p.main(), 8).unwrap();
            let log = e.invariant_log().unwrap();
            assert!(log.checked > 0);
            assert!(log.violations.is_empty(), "{:?}", log.violations);
        }
    }
}
