//! Identifiers: tree-shaped addresses of active computations.
//!
//! An identifier records the restriction, sequencing and parallel context in
//! which a computation runs. Every identifier has exactly one leaf, either the
//! hole `•` (the active computation) or the sequencing marker `(;•)`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// An interned token: channel names, internal actions and process variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    /// The distinguished silent action.
    pub fn tau() -> Self {
        Name::new(TAU)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_tau(&self) -> bool {
        &*self.0 == TAU
    }
}

pub const TAU: &str = "tau";

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One wrapping constructor of an identifier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    /// `⟨α;`
    SeqLeft,
    /// `ν(α)c`
    Restrict(Name),
    /// `⟨α∥`
    ParLeft,
    /// `∥α⟩`
    ParRight,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Identifier {
    /// `•`
    Hole,
    /// `(;•)`
    SeqMarker,
    /// `⟨α;`
    SeqLeft(Arc<Identifier>),
    /// `ν(α)c`
    Restrict(Arc<Identifier>, Name),
    /// `⟨α∥`
    ParLeft(Arc<Identifier>),
    /// `∥α⟩`
    ParRight(Arc<Identifier>),
}

/// Result of [`Identifier::subtract`]; `Undefined` stands for `↑`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subtraction {
    Defined(Identifier),
    Undefined,
}

impl Subtraction {
    pub fn defined(self) -> Option<Identifier> {
        match self {
            Subtraction::Defined(a) => Some(a),
            Subtraction::Undefined => None,
        }
    }
}

pub type IdSet = BTreeSet<Identifier>;

impl Identifier {
    pub fn seq_left(inner: Identifier) -> Self {
        Identifier::SeqLeft(Arc::new(inner))
    }

    pub fn restrict(inner: Identifier, c: Name) -> Self {
        Identifier::Restrict(Arc::new(inner), c)
    }

    pub fn par_left(inner: Identifier) -> Self {
        Identifier::ParLeft(Arc::new(inner))
    }

    pub fn par_right(inner: Identifier) -> Self {
        Identifier::ParRight(Arc::new(inner))
    }

    pub fn wrap(layer: Layer, inner: Identifier) -> Self {
        match layer {
            Layer::SeqLeft => Identifier::seq_left(inner),
            Layer::Restrict(c) => Identifier::restrict(inner, c),
            Layer::ParLeft => Identifier::par_left(inner),
            Layer::ParRight => Identifier::par_right(inner),
        }
    }

    /// The single-layer identifier `layer(•)`, e.g. `⟨•∥`.
    pub fn layer(layer: Layer) -> Self {
        Identifier::wrap(layer, Identifier::Hole)
    }

    fn child(&self) -> Option<(&Identifier, Layer)> {
        match self {
            Identifier::Hole | Identifier::SeqMarker => None,
            Identifier::SeqLeft(a) => Some((a, Layer::SeqLeft)),
            Identifier::Restrict(a, c) => Some((a, Layer::Restrict(c.clone()))),
            Identifier::ParLeft(a) => Some((a, Layer::ParLeft)),
            Identifier::ParRight(a) => Some((a, Layer::ParRight)),
        }
    }

    /// `α(α')`: replaces the hole leaf by `inner`. A `(;•)` leaf is left alone.
    pub fn substitute(&self, inner: &Identifier) -> Identifier {
        match self {
            Identifier::Hole => inner.clone(),
            Identifier::SeqMarker => Identifier::SeqMarker,
            Identifier::SeqLeft(a) => Identifier::seq_left(a.substitute(inner)),
            Identifier::Restrict(a, c) => Identifier::restrict(a.substitute(inner), c.clone()),
            Identifier::ParLeft(a) => Identifier::par_left(a.substitute(inner)),
            Identifier::ParRight(a) => Identifier::par_right(a.substitute(inner)),
        }
    }

    /// `α(layer(•))`, the identifier one level below the hole of `self`.
    pub fn extend(&self, layer: Layer) -> Identifier {
        self.substitute(&Identifier::layer(layer))
    }

    /// `α(;•)`
    pub fn seq_key(&self) -> Identifier {
        self.substitute(&Identifier::SeqMarker)
    }

    /// Inverse of [`Identifier::extend`]: if the hole of `self` sits directly
    /// under a layer, returns the identifier with that layer removed.
    pub fn split_innermost(&self) -> Option<(Identifier, Layer)> {
        let (child, layer) = self.child()?;
        if *child == Identifier::Hole {
            return Some((Identifier::Hole, layer));
        }
        let (rest, inner_layer) = child.split_innermost()?;
        Some((Identifier::wrap(layer, rest), inner_layer))
    }

    /// `match_α(self, other)`, i.e. `self ≤ other`.
    pub fn matches(&self, other: &Identifier) -> bool {
        match (self, other) {
            (Identifier::Hole, _) => true,
            (Identifier::SeqMarker, Identifier::SeqMarker) => true,
            (Identifier::SeqLeft(a), Identifier::SeqLeft(b))
            | (Identifier::ParLeft(a), Identifier::ParLeft(b))
            | (Identifier::ParRight(a), Identifier::ParRight(b)) => a.matches(b),
            (Identifier::Restrict(a, c), Identifier::Restrict(b, d)) if c == d => a.matches(b),
            _ => false,
        }
    }

    /// Greatest lower bound with respect to [`Identifier::matches`].
    pub fn glb(&self, other: &Identifier) -> Identifier {
        if self == other {
            return self.clone();
        }
        match (self, other) {
            (Identifier::SeqLeft(a), Identifier::SeqLeft(b)) => Identifier::seq_left(a.glb(b)),
            (Identifier::Restrict(a, c), Identifier::Restrict(b, d)) if c == d => {
                Identifier::restrict(a.glb(b), c.clone())
            }
            (Identifier::ParLeft(a), Identifier::ParLeft(b)) => Identifier::par_left(a.glb(b)),
            (Identifier::ParRight(a), Identifier::ParRight(b)) => Identifier::par_right(a.glb(b)),
            _ => Identifier::Hole,
        }
    }

    /// `self ⊖ small`: strips the common spine of `small` from `self`.
    pub fn subtract(&self, small: &Identifier) -> Subtraction {
        match (self, small) {
            (_, Identifier::Hole) => Subtraction::Defined(self.clone()),
            // nothing is left once the marker is stripped
            (Identifier::SeqMarker, Identifier::SeqMarker) => {
                Subtraction::Defined(Identifier::Hole)
            }
            (Identifier::SeqLeft(a), Identifier::SeqLeft(b))
            | (Identifier::ParLeft(a), Identifier::ParLeft(b))
            | (Identifier::ParRight(a), Identifier::ParRight(b)) => a.subtract(b),
            (Identifier::Restrict(a, c), Identifier::Restrict(b, d)) if c == d => a.subtract(b),
            _ => Subtraction::Undefined,
        }
    }

    /// `in_α(c, self)`: whether `c` is restricted somewhere along the spine.
    pub fn occurs_restricted(&self, c: &Name) -> bool {
        match self {
            Identifier::Hole | Identifier::SeqMarker => false,
            Identifier::Restrict(a, d) => d == c || a.occurs_restricted(c),
            Identifier::SeqLeft(a) | Identifier::ParLeft(a) | Identifier::ParRight(a) => {
                a.occurs_restricted(c)
            }
        }
    }

    /// `match_α^N(self, other)`: the restricted name met at the point where
    /// `self`'s hole lands inside `other`, if that point is a `ν` node.
    pub fn restricted_name_at(&self, other: &Identifier) -> Option<Name> {
        match (self, other) {
            (Identifier::Hole, Identifier::Restrict(_, c)) => Some(c.clone()),
            (Identifier::Restrict(a, c), Identifier::Restrict(b, d)) if c == d => {
                a.restricted_name_at(b)
            }
            (Identifier::SeqLeft(a), Identifier::SeqLeft(b))
            | (Identifier::ParLeft(a), Identifier::ParLeft(b))
            | (Identifier::ParRight(a), Identifier::ParRight(b)) => a.restricted_name_at(b),
            _ => None,
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self.child() {
            None => 1,
            Some((a, _)) => 1 + a.size(),
        }
    }

    pub fn has_hole_leaf(&self) -> bool {
        match self.child() {
            None => *self == Identifier::Hole,
            Some((a, _)) => a.has_hole_leaf(),
        }
    }
}

/// `ι₂`: the binary interaction predicate between `c₁@α₁` and `c₂@α₂`.
pub fn binary_interact(p: (&Name, &Identifier), q: (&Name, &Identifier)) -> bool {
    let (c1, a1) = p;
    let (c2, a2) = q;
    if a1 == a2 || c1 != c2 {
        return false;
    }
    let g = a1.glb(a2);
    let blocked = |a: &Identifier, c: &Name| match a.subtract(&g) {
        Subtraction::Defined(rest) => rest.occurs_restricted(c),
        // unreachable: g is a lower bound of both
        Subtraction::Undefined => true,
    };
    !blocked(a1, c1) && !blocked(a2, c2)
}

/// `π↾α`: the members of `pi` above `a`.
pub fn filter_below(pi: &IdSet, a: &Identifier) -> IdSet {
    pi.iter().filter(|b| a.matches(b)).cloned().collect()
}

/// `π↾_N α`
pub fn restricted_names_below(pi: &IdSet, a: &Identifier) -> BTreeSet<Name> {
    pi.iter().filter_map(|b| a.restricted_name_at(b)).collect()
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Identifier::Hole => f.write_str("*"),
            Identifier::SeqMarker => f.write_str("(;*)"),
            Identifier::SeqLeft(a) => write!(f, "<{a};"),
            Identifier::Restrict(a, c) => write!(f, "({a})\\{c}"),
            Identifier::ParLeft(a) => write!(f, "<{a}|"),
            Identifier::ParRight(a) => write!(f, "|{a}>"),
        }
    }
}

impl fmt::Debug for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    fn hole() -> Identifier {
        Identifier::Hole
    }

    fn nu(a: Identifier, c: &str) -> Identifier {
        Identifier::restrict(a, n(c))
    }

    fn pl(a: Identifier) -> Identifier {
        Identifier::par_left(a)
    }

    fn pr(a: Identifier) -> Identifier {
        Identifier::par_right(a)
    }

    /// Depth-bounded identifiers over a three-name pool.
    pub(crate) fn arb_identifier() -> impl Strategy<Value = Identifier> {
        let leaf = prop_oneof![Just(Identifier::Hole), Just(Identifier::SeqMarker)];
        leaf.prop_recursive(6, 12, 1, |inner| {
            prop_oneof![
                inner.clone().prop_map(Identifier::seq_left),
                (inner.clone(), prop_oneof![Just("c"), Just("d"), Just("e")])
                    .prop_map(|(a, c)| Identifier::restrict(a, n(c))),
                inner.clone().prop_map(Identifier::par_left),
                inner.prop_map(Identifier::par_right),
            ]
        })
    }

    #[test]
    fn substitute_examples() {
        assert_eq!(hole().substitute(&nu(hole(), "c")), nu(hole(), "c"));
        assert_eq!(
            Identifier::SeqMarker.substitute(&pl(hole())),
            Identifier::SeqMarker
        );
        assert_eq!(
            nu(pl(hole()), "c").substitute(&pr(hole())),
            nu(pl(pr(hole())), "c")
        );
    }

    #[test]
    fn matches_examples() {
        assert!(hole().matches(&nu(pr(hole()), "c")));
        assert!(Identifier::SeqMarker.matches(&Identifier::SeqMarker));
        assert!(!nu(hole(), "c").matches(&nu(hole(), "d")));
    }

    #[test]
    fn glb_examples() {
        let a1 = nu(pl(Identifier::seq_left(hole())), "c");
        let a2 = nu(pr(Identifier::SeqMarker), "c");
        assert_eq!(a1.glb(&a2), nu(hole(), "c"));
        assert_eq!(a1.glb(&a1), a1);
        assert_eq!(pl(hole()).glb(&pr(hole())), hole());
    }

    #[test]
    fn subtract_examples() {
        let inner = pl(Identifier::seq_left(hole()));
        assert_eq!(
            nu(inner.clone(), "c").subtract(&nu(hole(), "c")),
            Subtraction::Defined(inner)
        );
        let a = nu(pr(hole()), "d");
        assert_eq!(a.subtract(&hole()), Subtraction::Defined(a.clone()));
        assert_eq!(hole().subtract(&pl(hole())), Subtraction::Undefined);
    }

    #[test]
    fn occurs_restricted_examples() {
        assert!(!hole().occurs_restricted(&n("c")));
        assert!(nu(hole(), "c").occurs_restricted(&n("c")));
        assert!(!pl(nu(hole(), "d")).occurs_restricted(&n("c")));
    }

    #[test]
    fn binary_interact_examples() {
        let c = n("c");
        assert!(binary_interact((&c, &pl(hole())), (&c, &pr(hole()))));
        let a = nu(pl(hole()), "c");
        assert!(!binary_interact((&c, &a), (&c, &a)));
        assert!(!binary_interact(
            (&c, &pl(nu(hole(), "c"))),
            (&c, &pr(hole()))
        ));
        // restriction above the meeting point does not block
        assert!(binary_interact(
            (&c, &nu(pl(hole()), "c")),
            (&c, &nu(pr(hole()), "c"))
        ));
        // different channels never interact
        assert!(!binary_interact((&c, &pl(hole())), (&n("d"), &pr(hole()))));
    }

    #[test]
    fn filter_below_examples() {
        assert!(filter_below(&IdSet::new(), &hole()).is_empty());
        let pi: IdSet = [pl(hole()), pr(hole())].into_iter().collect();
        assert_eq!(
            filter_below(&pi, &pl(hole())),
            [pl(hole())].into_iter().collect()
        );
        let single: IdSet = [nu(pr(hole()), "c")].into_iter().collect();
        assert_eq!(filter_below(&single, &hole()), single);
    }

    #[test]
    fn restricted_names_below_examples() {
        let pi: IdSet = [nu(pl(hole()), "c")].into_iter().collect();
        assert_eq!(
            restricted_names_below(&pi, &hole()),
            [n("c")].into_iter().collect()
        );
        let pi: IdSet = [pl(hole())].into_iter().collect();
        assert!(restricted_names_below(&pi, &hole()).is_empty());
        assert!(restricted_names_below(&IdSet::new(), &pl(hole())).is_empty());
    }

    #[test]
    fn size_examples() {
        assert_eq!(hole().size(), 1);
        assert_eq!(nu(hole(), "c").size(), 2);
        assert_eq!(nu(pl(hole()), "c").size(), 3);
    }

    #[test]
    fn split_innermost_inverts_extend() {
        let a = nu(pl(hole()), "c");
        let b = a.extend(Layer::ParRight);
        assert_eq!(b.split_innermost(), Some((a, Layer::ParRight)));
        assert_eq!(hole().split_innermost(), None);
        assert_eq!(pl(Identifier::SeqMarker).split_innermost(), None);
    }

    #[test]
    fn display_uses_ascii_forms() {
        assert_eq!(nu(pl(hole()), "c").to_string(), "(<*|)\\c");
        assert_eq!(
            pr(Identifier::seq_left(Identifier::SeqMarker)).to_string(),
            "|<(;*);>"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn matches_is_a_partial_order(a in arb_identifier(), b in arb_identifier(), c in arb_identifier()) {
            prop_assert!(a.matches(&a));
            if a.matches(&b) && b.matches(&c) {
                prop_assert!(a.matches(&c));
            }
            if a.matches(&b) && b.matches(&a) {
                prop_assert_eq!(&a, &b);
            }
        }

        #[test]
        fn glb_is_greatest_lower_bound(a in arb_identifier(), b in arb_identifier(), x in arb_identifier()) {
            let g = a.glb(&b);
            prop_assert!(g.matches(&a));
            prop_assert!(g.matches(&b));
            prop_assert_eq!(&g, &b.glb(&a));
            prop_assert_eq!(a.glb(&a), a.clone());
            if x.matches(&a) && x.matches(&b) {
                prop_assert!(x.matches(&g));
            }
        }

        #[test]
        fn lower_bounds_of_prefixes_reach_glb(a in arb_identifier(), b in arb_identifier(), x in arb_identifier()) {
            // random x rarely lies below both; prefixes of a do more often
            let lower = a.glb(&x);
            if lower.matches(&b) {
                prop_assert!(lower.matches(&a.glb(&b)));
            }
        }

        #[test]
        fn subtract_inverts_substitute(a in arb_identifier(), b in arb_identifier()) {
            if a.has_hole_leaf() {
                prop_assert_eq!(a.substitute(&b).subtract(&a), Subtraction::Defined(b));
            }
        }

        #[test]
        fn subtract_defined_above(a in arb_identifier(), b in arb_identifier()) {
            if a.matches(&b) {
                prop_assert_ne!(b.subtract(&a), Subtraction::Undefined);
            }
        }

        #[test]
        fn binary_interact_is_symmetric(a in arb_identifier(), b in arb_identifier(),
                                        c in prop_oneof![Just("c"), Just("d")],
                                        d in prop_oneof![Just("c"), Just("d")]) {
            let (c, d) = (n(c), n(d));
            prop_assert_eq!(binary_interact((&c, &a), (&d, &b)), binary_interact((&d, &b), (&c, &a)));
        }

        #[test]
        fn size_counts_layers(a in arb_identifier()) {
            let s = a.size();
            prop_assert!(s >= 1);
            prop_assert_eq!(Identifier::par_left(a).size(), s + 1);
        }
    }
}
