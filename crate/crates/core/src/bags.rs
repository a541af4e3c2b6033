//! Identifier-indexed bags `(π, θ)` with a total lookup.

use std::collections::BTreeMap;

use crate::identifiers::{IdSet, Identifier};

/// A bag of values indexed by identifiers. The table is finite; every
/// identifier without an entry reads as the default value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bag<X> {
    domain: IdSet,
    table: BTreeMap<Identifier, X>,
    default: X,
}

impl<X: Clone> Bag<X> {
    pub fn empty(default: X) -> Self {
        Bag {
            domain: IdSet::new(),
            table: BTreeMap::new(),
            default,
        }
    }

    pub fn domain(&self) -> &IdSet {
        &self.domain
    }

    pub fn lookup(&self, a: &Identifier) -> &X {
        self.table.get(a).unwrap_or(&self.default)
    }

    /// `(π,θ)[α↦x] = (π∪{α}, θ[α↦x])`
    #[must_use]
    pub fn bind(&self, a: Identifier, x: X) -> Self {
        let mut next = self.clone();
        next.domain.insert(a.clone());
        next.table.insert(a, x);
        next
    }

    pub fn default_value(&self) -> &X {
        &self.default
    }

    /// Entries of the table, in identifier order.
    pub fn entries(&self) -> impl Iterator<Item = (&Identifier, &X)> {
        self.table.iter()
    }

    /// Pointwise image, keeping the domain.
    pub fn map<Y: Clone>(&self, mut f: impl FnMut(&X) -> Y) -> Bag<Y> {
        Bag {
            domain: self.domain.clone(),
            table: self.table.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
            default: f(&self.default),
        }
    }

    /// Drops `a` from both the domain and the table.
    #[must_use]
    pub fn unbind(&self, a: &Identifier) -> Self {
        let mut next = self.clone();
        next.domain.remove(a);
        next.table.remove(a);
        next
    }
}
