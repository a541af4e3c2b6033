//! Seeded random generators for programs, identifiers, resumptions and
//! interaction sets. All randomized suites draw from here so a seed fixes
//! the whole case list.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::identifiers::{Identifier, Layer, Name};
use crate::interaction::{InteractionSet, Participant};
use crate::operational::Resumption;
use crate::syntax::{Action, BinOp, Calculus, Program, Statement, SyncAction};
use crate::traces::{End, Trace, TraceSet};

/// Shape limits for random programs.
#[derive(Clone, Debug)]
pub struct GenConfig {
    pub calculus: Calculus,
    pub nbar: usize,
    /// Maximal AST depth of the main statement.
    pub max_depth: usize,
    pub max_channels: usize,
    pub max_decls: usize,
    pub actions: Vec<Name>,
}

impl GenConfig {
    pub fn new(calculus: Calculus) -> Self {
        GenConfig {
            calculus,
            nbar: 2,
            max_depth: 4,
            max_channels: 3,
            max_decls: 2,
            actions: ["b1", "b2", "b3"].into_iter().map(Name::new).collect(),
        }
    }
}

struct Vocab<'a> {
    cfg: &'a GenConfig,
    channels: Vec<Name>,
    vars: Vec<Name>,
}

impl Vocab<'_> {
    fn action<R: Rng>(&self, rng: &mut R) -> Action {
        let roll = rng.gen_range(0..10);
        if self.channels.is_empty() || roll < 4 {
            return match rng.gen_range(0..8) {
                0 => Action::Stop,
                1 => Action::tau(),
                _ => Action::Internal(self.cfg.actions.choose(rng).unwrap().clone()),
            };
        }
        let channel = |rng: &mut R| self.channels.choose(rng).unwrap().clone();
        let len = rng.gen_range(1..=self.cfg.nbar);
        match self.cfg.calculus {
            Calculus::Ccsn if roll < 7 => Action::Output(channel(rng)),
            Calculus::Ccsn => Action::JointInput((0..len).map(|_| channel(rng)).collect()),
            Calculus::CcsnPlus => Action::JointPrefix(
                (0..len)
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            SyncAction::input(channel(rng))
                        } else {
                            SyncAction::output(channel(rng))
                        }
                    })
                    .collect(),
            ),
        }
    }

    fn restrict<R: Rng>(&self, rng: &mut R, x: Statement) -> Statement {
        let c = self.channels.choose(rng).unwrap();
        Statement::Restrict(x.into(), c.clone())
    }

    /// A statement of depth at most `depth`. Variables only appear where
    /// `vars_ok` allows them; guarded positions are always safe.
    fn statement<R: Rng>(
        &self,
        rng: &mut R,
        depth: usize,
        guarded: bool,
        vars_ok: bool,
    ) -> Statement {
        let leaf = depth == 0 || rng.gen_range(0..10) < 3;
        if leaf {
            if !guarded && vars_ok && !self.vars.is_empty() && rng.gen_range(0..6) == 0 {
                return Statement::Var(self.vars.choose(rng).unwrap().clone());
            }
            return Statement::Act(self.action(rng));
        }
        let d = depth - 1;
        let has_channels = !self.channels.is_empty();
        match rng.gen_range(0..14) {
            0 | 1 if has_channels => {
                let inner = self.statement(rng, d, guarded, vars_ok);
                self.restrict(rng, inner)
            }
            0..=3 => Statement::seq(
                self.statement(rng, d, guarded, vars_ok),
                self.statement(rng, d, false, vars_ok),
            ),
            4 | 5 => Statement::choice(
                self.statement(rng, d, guarded, vars_ok),
                self.statement(rng, d, guarded, vars_ok),
            ),
            6..=8 => Statement::merge(
                self.statement(rng, d, guarded, vars_ok),
                self.statement(rng, d, guarded, vars_ok),
            ),
            9 | 10 => Statement::binary(
                BinOp::SyncMerge,
                self.statement(rng, d, guarded, vars_ok),
                self.statement(rng, d, guarded, vars_ok),
            ),
            11 => Statement::binary(
                BinOp::LeftMerge,
                self.statement(rng, d, guarded, vars_ok),
                self.statement(rng, d, false, vars_ok),
            ),
            _ => Statement::binary(
                BinOp::LeftSyncMerge,
                self.statement(rng, d, guarded, vars_ok),
                self.statement(rng, d, guarded, vars_ok),
            ),
        }
    }

    /// A guarded declaration body. Recursion is kept linear (a single tail
    /// call after a guard) so that trace sets stay small.
    fn body<R: Rng>(&self, rng: &mut R) -> Statement {
        let guard = self.statement(rng, 2, true, false);
        if rng.gen_bool(0.3) {
            return guard;
        }
        let y = Statement::Var(self.vars.choose(rng).unwrap().clone());
        let tail = Statement::seq(guard, y);
        if rng.gen_bool(0.25) {
            Statement::choice(tail, Statement::Act(self.action(rng)))
        } else {
            tail
        }
    }
}

/// A random validated program within the limits of `cfg`.
pub fn random_program<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Program {
    loop {
        let channels: Vec<Name> = (1..=rng.gen_range(0..=cfg.max_channels))
            .map(|i| Name::new(&format!("c{i}")))
            .collect();
        let vars: Vec<Name> = (1..=rng.gen_range(0..=cfg.max_decls))
            .map(|i| Name::new(&format!("y{i}")))
            .collect();
        let vocab = Vocab {
            cfg,
            channels,
            vars,
        };
        let decls: BTreeMap<Name, Statement> = vocab
            .vars
            .iter()
            .map(|y| (y.clone(), vocab.body(rng)))
            .collect();
        let main = vocab.statement(rng, cfg.max_depth, false, true);
        let channels: BTreeSet<Name> = vocab.channels.iter().cloned().collect();
        if let Ok(p) = Program::new(cfg.calculus, channels, decls, main, cfg.nbar) {
            return p;
        }
    }
}

/// A random identifier with at most `depth` layers above its leaf.
pub fn random_identifier<R: Rng>(rng: &mut R, depth: usize, channels: &[Name]) -> Identifier {
    let mut a = if rng.gen_bool(0.8) {
        Identifier::Hole
    } else {
        Identifier::SeqMarker
    };
    for _ in 0..rng.gen_range(0..=depth) {
        a = match rng.gen_range(0..4) {
            0 => Identifier::seq_left(a),
            1 if !channels.is_empty() => {
                Identifier::restrict(a, channels.choose(rng).unwrap().clone())
            }
            1 | 2 => Identifier::par_left(a),
            _ => Identifier::par_right(a),
        };
    }
    a
}

/// A random well-formed resumption, reached by a random walk of `steps`
/// applications of the resumption-forming rules. Stored statements are
/// drawn from `statements`.
pub fn random_resumption<R: Rng>(
    rng: &mut R,
    program: &Program,
    steps: usize,
    statements: &[Statement],
) -> Resumption {
    let nbar = program.nbar();
    let channels: Vec<Name> = program.channels().iter().cloned().collect();
    let cfg = GenConfig {
        calculus: program.calculus(),
        nbar,
        ..GenConfig::new(program.calculus())
    };
    let vocab = Vocab {
        cfg: &cfg,
        channels: channels.clone(),
        vars: Vec::new(),
    };
    let pick = |rng: &mut R| {
        statements
            .choose(rng)
            .cloned()
            .unwrap_or_else(Statement::stop)
    };
    let mut rho = Resumption::initial();
    for _ in 0..steps {
        match rng.gen_range(0..5) {
            0 if !rho.sync.is_empty() && rho.iset.len() <= nbar => {
                let a = vocab.action(rng);
                rho.sync.remove(0);
                let head = rho.ids.remove(0);
                rho.iset.insert(Participant::new(a, head));
            }
            1 if !channels.is_empty() => rho = rho.restrict(channels.choose(rng).unwrap()),
            1 | 2 => rho = rho.add_seq(pick(rng)),
            3 => rho = rho.add_lmerge(pick(rng)),
            _ if rho.can_push(nbar) => rho = rho.add_lsync(pick(rng)),
            _ => rho = rho.add_lmerge(pick(rng)),
        }
    }
    rho
}

/// A random set of joint prefixes at random identifiers: at most
/// `max_size` members, each prefix of length `1..=max_len`.
pub fn random_joint_prefix_set<R: Rng>(
    rng: &mut R,
    max_size: usize,
    max_len: usize,
    channels: &[Name],
) -> InteractionSet {
    let mut u = InteractionSet::new();
    for _ in 0..rng.gen_range(1..=max_size) {
        let len = rng.gen_range(1..=max_len);
        let prefix = (0..len)
            .map(|_| {
                let c = channels.choose(rng).unwrap().clone();
                if rng.gen_bool(0.5) {
                    SyncAction::input(c)
                } else {
                    SyncAction::output(c)
                }
            })
            .collect();
        u.insert(Participant::new(
            Action::JointPrefix(prefix),
            random_identifier(rng, 3, channels),
        ));
    }
    u
}

/// A joint-prefix set whose receives and sends balance per channel, placed
/// at distinct parallel siblings: `2..=max_size` members, each prefix of
/// length `1..=max_len`. Whether it synchronizes still depends on
/// restrictions and on who may pair with whom.
pub fn random_balanced_prefix_set<R: Rng>(
    rng: &mut R,
    max_size: usize,
    max_len: usize,
    channels: &[Name],
) -> InteractionSet {
    let size = rng.gen_range(2..=max_size.max(2));
    let mut prefixes: Vec<Vec<SyncAction>> = vec![Vec::new(); size];
    for _ in 0..rng.gen_range(1..=size * max_len / 2) {
        let open: Vec<usize> = (0..size).filter(|&i| prefixes[i].len() < max_len).collect();
        if open.len() < 2 {
            break;
        }
        let mut pair = open.choose_multiple(rng, 2);
        let (a, b) = (*pair.next().unwrap(), *pair.next().unwrap());
        let c = channels.choose(rng).unwrap().clone();
        prefixes[a].push(SyncAction::input(c.clone()));
        prefixes[b].push(SyncAction::output(c));
    }
    let ids = random_sibling_ids(rng, size, channels);
    prefixes
        .into_iter()
        .zip(ids)
        .filter(|(prefix, _)| !prefix.is_empty())
        .map(|(mut prefix, a)| {
            prefix.shuffle(rng);
            Participant::new(Action::JointPrefix(prefix), a)
        })
        .collect()
}

/// Siblings under a common random root, so that `ι₂` is not trivially
/// false: each member sits at a distinct leaf of a random parallel tree.
pub fn random_sibling_ids<R: Rng>(rng: &mut R, count: usize, channels: &[Name]) -> Vec<Identifier> {
    let root = random_identifier(rng, 2, channels);
    let mut leaves = vec![Identifier::Hole];
    while leaves.len() < count {
        let i = rng.gen_range(0..leaves.len());
        let a = leaves.swap_remove(i);
        leaves.push(a.extend(Layer::ParLeft));
        leaves.push(a.extend(Layer::ParRight));
    }
    leaves.shuffle(rng);
    leaves
        .into_iter()
        .take(count)
        .map(|leaf| {
            let leaf = if !channels.is_empty() && rng.gen_bool(0.3) {
                leaf.extend(Layer::Restrict(channels.choose(rng).unwrap().clone()))
            } else {
                leaf
            };
            root.substitute(&leaf)
        })
        .collect()
}

/// A random non-empty trace set over `τ`, `b1`, `b2` with traces of at
/// most `max_len` symbols. `Cut` never appears; `δ` only if `allow_delta`.
pub fn random_trace_set<R: Rng>(
    rng: &mut R,
    max_size: usize,
    max_len: usize,
    allow_delta: bool,
) -> TraceSet {
    let symbols = [
        Name::tau(),
        Name::tau(),
        Name::tau(),
        Name::new("b1"),
        Name::new("b2"),
    ];
    let mut p = TraceSet::new();
    for _ in 0..rng.gen_range(1..=max_size) {
        let syms = (0..rng.gen_range(0..=max_len))
            .map(|_| symbols.choose(rng).unwrap().clone())
            .collect();
        let end = if allow_delta && rng.gen_bool(0.3) {
            End::Delta
        } else {
            End::Eps
        };
        p.insert(Trace::new(syms, end));
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operational::well_formed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn programs_respect_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for calculus in [Calculus::Ccsn, Calculus::CcsnPlus] {
            let cfg = GenConfig::new(calculus);
            for _ in 0..200 {
                let p = random_program(&mut rng, &cfg);
                assert!(p.main().depth() <= cfg.max_depth);
                assert!(p.channels().len() <= cfg.max_channels);
                assert!(p.decls().len() <= cfg.max_decls);
            }
        }
    }

    #[test]
    fn same_seed_same_programs() {
        let cfg = GenConfig::new(Calculus::Ccsn);
        let a: Vec<String> = {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            (0..20)
                .map(|_| random_program(&mut rng, &cfg).to_string())
                .collect()
        };
        let b: Vec<String> = {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            (0..20)
                .map(|_| random_program(&mut rng, &cfg).to_string())
                .collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn random_resumptions_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = GenConfig::new(Calculus::Ccsn);
        for _ in 0..200 {
            let p = random_program(&mut rng, &cfg);
            let stmts: Vec<Statement> = p.main().subterms().into_iter().cloned().collect();
            let steps = rng.gen_range(0..8);
            let rho = random_resumption(&mut rng, &p, steps, &stmts);
            assert!(rho.lengths_agree());
            assert!(well_formed(&rho, p.nbar()), "{rho}");
        }
    }
}
