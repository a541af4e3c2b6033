//! Interaction sets and the interaction functions of both calculi.
//!
//! A set of actions, each tagged with the identifier of the component that
//! offers it, either yields an internal action or cannot interact. Multiparty
//! synchronization is decided by bipartite matching between the receive and
//! send occurrences, where an edge exists iff `ι₂` holds for the pair.

use std::collections::BTreeSet;

use crate::identifiers::{binary_interact, Identifier, Name};
use crate::syntax::{Action, Calculus, Polarity};

/// `a@α`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Participant {
    pub action: Action,
    pub id: Identifier,
}

impl Participant {
    pub fn new(action: Action, id: Identifier) -> Self {
        Participant { action, id }
    }
}

pub type InteractionSet = BTreeSet<Participant>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InteractionResult {
    Yields(Name),
    NoInteraction,
}

/// `c@α` with a channel name; used for both receive and send occurrences.
pub type Occurrence = (Name, Identifier);

/// The interaction function of the given calculus.
pub fn interact(calculus: Calculus, u: &InteractionSet) -> InteractionResult {
    match calculus {
        Calculus::Ccsn => interact_n(u),
        Calculus::CcsnPlus => interact_n_plus(u),
    }
}

fn single_internal(u: &InteractionSet) -> Option<InteractionResult> {
    if u.len() == 1 {
        let p = u.iter().next().unwrap();
        return Some(match &p.action {
            Action::Internal(b) => InteractionResult::Yields(b.clone()),
            _ => InteractionResult::NoInteraction,
        });
    }
    None
}

/// Interaction for the joint-input calculus: `{c̄₁@α₁,…,c̄_m@α_m, (c₁&…&c_m)@α}`
/// yields `τ` when the outputs can be paired one-to-one with the names of
/// the joint input such that every pair passes `ι₂`.
pub fn interact_n(u: &InteractionSet) -> InteractionResult {
    if let Some(r) = single_internal(u) {
        return r;
    }
    let mut joint = None;
    let mut outputs = Vec::new();
    for p in u {
        match &p.action {
            Action::JointInput(cs) if joint.is_none() => joint = Some((cs, &p.id)),
            Action::Output(c) => outputs.push((c.clone(), p.id.clone())),
            _ => return InteractionResult::NoInteraction,
        }
    }
    let Some((names, holder)) = joint else {
        return InteractionResult::NoInteraction;
    };
    let receives: Vec<Occurrence> = names.iter().map(|c| (c.clone(), holder.clone())).collect();
    if receives.len() == outputs.len() && perfect_matching(&receives, &outputs) {
        InteractionResult::Yields(Name::tau())
    } else {
        InteractionResult::NoInteraction
    }
}

/// `rcv(j@α)`: the input occurrences of a joint prefix.
pub fn split_receives(action: &Action, a: &Identifier) -> Vec<Occurrence> {
    split(action, a, Polarity::In)
}

/// `snd(j@α)`: the output occurrences, stored by their underlying channel.
pub fn split_sends(action: &Action, a: &Identifier) -> Vec<Occurrence> {
    split(action, a, Polarity::Out)
}

fn split(action: &Action, a: &Identifier, polarity: Polarity) -> Vec<Occurrence> {
    match action {
        Action::JointPrefix(ls) => ls
            .iter()
            .filter(|l| l.polarity == polarity)
            .map(|l| (l.channel.clone(), a.clone()))
            .collect(),
        _ => Vec::new(),
    }
}

/// `match(ϖ_r, ϖ_s)`: pointwise `ι₂` between two equally long sequences.
pub fn match_sequences(recv: &[Occurrence], send: &[Occurrence]) -> bool {
    recv.len() == send.len()
        && recv
            .iter()
            .zip(send)
            .all(|((cr, ar), (cs, as_))| binary_interact((cr, ar), (cs, as_)))
}

/// Whether some bijection between `recv` and `send` pairs every element
/// with a partner passing `ι₂` (Kuhn's augmenting paths).
pub fn perfect_matching(recv: &[Occurrence], send: &[Occurrence]) -> bool {
    if recv.len() != send.len() {
        return false;
    }
    let adj: Vec<Vec<usize>> = recv
        .iter()
        .map(|(cr, ar)| {
            send.iter()
                .enumerate()
                .filter(|(_, (cs, as_))| binary_interact((cr, ar), (cs, as_)))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; send.len()];
    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, adj, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    (0..recv.len()).all(|i| {
        let mut seen = vec![false; send.len()];
        augment(i, &adj, &mut seen, &mut owner)
    })
}

/// `msync`: every member must be a joint prefix; the multiset of receives
/// must be matched one-to-one against the multiset of sends.
pub fn msync(u: &InteractionSet) -> InteractionResult {
    let mut recv = Vec::new();
    let mut send = Vec::new();
    for p in u {
        if !matches!(p.action, Action::JointPrefix(_)) {
            return InteractionResult::NoInteraction;
        }
        recv.extend(split_receives(&p.action, &p.id));
        send.extend(split_sends(&p.action, &p.id));
    }
    if perfect_matching(&recv, &send) {
        InteractionResult::Yields(Name::tau())
    } else {
        InteractionResult::NoInteraction
    }
}

/// Interaction for the joint-prefix calculus.
pub fn interact_n_plus(u: &InteractionSet) -> InteractionResult {
    if let Some(r) = single_internal(u) {
        return r;
    }
    if u.is_empty() {
        return InteractionResult::NoInteraction;
    }
    msync(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::SyncAction;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    fn hole() -> Identifier {
        Identifier::Hole
    }

    fn pl(a: Identifier) -> Identifier {
        Identifier::par_left(a)
    }

    fn pr(a: Identifier) -> Identifier {
        Identifier::par_right(a)
    }

    fn nu(a: Identifier, c: &str) -> Identifier {
        Identifier::restrict(a, n(c))
    }

    fn set(items: Vec<(Action, Identifier)>) -> InteractionSet {
        items
            .into_iter()
            .map(|(a, i)| Participant::new(a, i))
            .collect()
    }

    fn jp(items: &[(bool, &str)]) -> Action {
        Action::JointPrefix(
            items
                .iter()
                .map(|&(out, c)| {
                    if out {
                        SyncAction::output(n(c))
                    } else {
                        SyncAction::input(n(c))
                    }
                })
                .collect(),
        )
    }

    #[test]
    fn singletons() {
        let u = set(vec![(Action::internal("b"), pl(hole()))]);
        assert_eq!(interact_n(&u), InteractionResult::Yields(n("b")));
        assert_eq!(interact_n_plus(&u), InteractionResult::Yields(n("b")));
        let u = set(vec![(Action::JointInput(vec![n("c1"), n("c2")]), hole())]);
        assert_eq!(interact_n(&u), InteractionResult::NoInteraction);
        let u = set(vec![(Action::Stop, hole())]);
        assert_eq!(interact_n(&u), InteractionResult::NoInteraction);
        let u = set(vec![(jp(&[(false, "c"), (true, "c")]), hole())]);
        assert_eq!(interact_n_plus(&u), InteractionResult::NoInteraction);
    }

    #[test]
    fn three_way_joint_input() {
        // the meeting point of the single τ step of ((c1&c2 || ~c1)\c1) || ~c2
        let u = set(vec![
            (Action::Output(n("c2")), pl(hole())),
            (
                Action::JointInput(vec![n("c1"), n("c2")]),
                pr(nu(pl(hole()), "c1")),
            ),
            (Action::Output(n("c1")), pr(nu(pr(hole()), "c1"))),
        ]);
        assert_eq!(interact_n(&u), InteractionResult::Yields(Name::tau()));
        // the same outputs placed outside the restriction cannot reach c1
        let u = set(vec![
            (Action::Output(n("c1")), pl(hole())),
            (
                Action::JointInput(vec![n("c1"), n("c2")]),
                pr(nu(pl(hole()), "c1")),
            ),
            (Action::Output(n("c2")), pr(nu(pr(hole()), "c1"))),
        ]);
        assert_eq!(interact_n(&u), InteractionResult::NoInteraction);
    }

    #[test]
    fn joint_input_with_repeated_names_needs_distinct_partners() {
        let j = Action::JointInput(vec![n("c"), n("c")]);
        let u = set(vec![
            (j.clone(), pl(hole())),
            (Action::Output(n("c")), pr(hole())),
        ]);
        assert_eq!(interact_n(&u), InteractionResult::NoInteraction);
        let u = set(vec![
            (j, pl(hole())),
            (Action::Output(n("c")), pr(pl(hole()))),
            (Action::Output(n("c")), pr(pr(hole()))),
        ]);
        assert_eq!(interact_n(&u), InteractionResult::Yields(Name::tau()));
    }

    #[test]
    fn split_examples() {
        let j = jp(&[(false, "c1"), (false, "c1"), (true, "c2"), (true, "c3")]);
        let a = pl(hole());
        assert_eq!(
            split_receives(&j, &a),
            vec![(n("c1"), a.clone()), (n("c1"), a.clone())]
        );
        assert_eq!(
            split_sends(&j, &a),
            vec![(n("c2"), a.clone()), (n("c3"), a.clone())]
        );
        assert!(split_receives(&jp(&[(true, "c")]), &a).is_empty());
        assert_eq!(
            split_receives(&jp(&[(false, "c")]), &a),
            vec![(n("c"), a.clone())]
        );
        assert!(split_sends(&jp(&[(false, "c")]), &a).is_empty());
        assert_eq!(split_sends(&jp(&[(true, "c"), (true, "c")]), &a).len(), 2);
    }

    #[test]
    fn match_sequences_examples() {
        assert!(match_sequences(&[], &[]));
        assert!(match_sequences(
            &[(n("c"), pl(hole()))],
            &[(n("c"), pr(hole()))]
        ));
        let a = pl(hole());
        assert!(!match_sequences(&[(n("c"), a.clone())], &[(n("c"), a)]));
    }

    #[test]
    fn three_way_joint_prefix() {
        // identifiers reached by the leading τ of the joint-prefix example
        let u = set(vec![
            (
                jp(&[(true, "c1"), (false, "c2")]),
                pl(nu(pl(Identifier::seq_left(hole())), "c1")),
            ),
            (jp(&[(false, "c1"), (true, "c3")]), pl(nu(pr(hole()), "c1"))),
            (
                jp(&[(true, "c2"), (false, "c3")]),
                pr(Identifier::seq_left(hole())),
            ),
        ]);
        assert_eq!(interact_n_plus(&u), InteractionResult::Yields(Name::tau()));
    }

    #[test]
    fn unequal_multisets_do_not_sync() {
        let u = set(vec![
            (jp(&[(false, "c"), (false, "c")]), pl(hole())),
            (jp(&[(true, "c")]), pr(hole())),
        ]);
        assert_eq!(interact_n_plus(&u), InteractionResult::NoInteraction);
    }

    #[test]
    fn internal_actions_do_not_join_syncs() {
        let u = set(vec![
            (Action::internal("b"), pl(hole())),
            (Action::Output(n("c")), pr(hole())),
        ]);
        assert_eq!(interact_n(&u), InteractionResult::NoInteraction);
        let u = set(vec![
            (Action::internal("b"), pl(hole())),
            (jp(&[(true, "c")]), pr(hole())),
        ]);
        assert_eq!(interact_n_plus(&u), InteractionResult::NoInteraction);
    }
}
