//! Finite-map stores from identifiers to values.
//!
//! The same type serves symbolic execution (values are terms) and the
//! concrete interpreter (values are integers). Stores are persistent: every
//! update returns a new store and leaves the original untouched.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::ast::Ident;

pub const MIN_SIGNED: i64 = -2_147_483_648;
pub const MAX_SIGNED: i64 = 2_147_483_647;

/// The 32-bit signed range every program value must stay within.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntBounds {
    pub min_signed: i64,
    pub max_signed: i64,
}

impl IntBounds {
    pub const I32: IntBounds = IntBounds {
        min_signed: MIN_SIGNED,
        max_signed: MAX_SIGNED,
    };

    pub fn contains(&self, z: i128) -> bool {
        self.min_signed as i128 <= z && z <= self.max_signed as i128
    }
}

/// `min_signed <= z <= max_signed`.
pub fn is_int(z: i128) -> bool {
    IntBounds::I32.contains(z)
}

#[derive(Clone, PartialEq, Eq)]
pub struct Store<V> {
    bindings: Arc<BTreeMap<Ident, V>>,
}

impl<V> Default for Store<V> {
    fn default() -> Self {
        Store {
            bindings: Arc::new(BTreeMap::new()),
        }
    }
}

impl<V: Clone> Store<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&V> {
        self.bindings.get(name)
    }

    pub fn is_bound(&self, name: &str) -> bool {
        self.bindings.contains_key(name)
    }

    /// Functional update: `Some` binds, `None` removes.
    pub fn update(&self, name: &Ident, value: Option<V>) -> Self {
        let mut next = self.clone();
        let map = Arc::make_mut(&mut next.bindings);
        match value {
            Some(v) => {
                map.insert(name.clone(), v);
            }
            None => {
                map.remove(name);
            }
        }
        next
    }

    pub fn with(&self, name: &Ident, value: V) -> Self {
        self.update(name, Some(value))
    }

    pub fn without(&self, name: &Ident) -> Self {
        self.update(name, None)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &V)> {
        self.bindings.iter()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// True iff every bound name outside `names` maps to the same value in
    /// both stores (and is bound in both or neither).
    pub fn eq_mod(&self, other: &Store<V>, names: &[Ident]) -> bool
    where
        V: PartialEq,
    {
        let excused = |x: &Ident| names.contains(x);
        let agrees = |a: &Store<V>, b: &Store<V>| {
            a.iter()
                .all(|(x, v)| excused(x) || b.get(x.as_str()) == Some(v))
        };
        agrees(self, other) && agrees(other, self)
    }

    /// True iff every name in `names` is bound.
    pub fn binds(&self, names: &[Ident]) -> bool {
        names.iter().all(|x| self.is_bound(x.as_str()))
    }
}

impl<V: Clone> FromIterator<(Ident, V)> for Store<V> {
    fn from_iter<T: IntoIterator<Item = (Ident, V)>>(iter: T) -> Self {
        Store {
            bindings: Arc::new(iter.into_iter().collect()),
        }
    }
}

impl Store<i64> {
    /// Every bound value lies within the 32-bit signed range.
    pub fn well_bounded(&self) -> bool {
        self.iter().all(|(_, &z)| is_int(z as i128))
    }
}

impl<V: fmt::Debug> fmt::Debug for Store<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.bindings.iter()).finish()
    }
}

impl<V: fmt::Display> fmt::Display for Store<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} -> {v}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ident;

    fn store(pairs: &[(&str, i64)]) -> Store<i64> {
        pairs.iter().map(|(x, v)| (ident(x), *v)).collect()
    }

    #[test]
    fn update_then_lookup() {
        let s = Store::new().with(&ident("x"), 32767);
        assert_eq!(s.get("x"), Some(&32767));
    }

    #[test]
    fn update_with_none_deletes() {
        let s = store(&[("x", 1)]).update(&ident("x"), None);
        assert_eq!(s.get("x"), None);
    }

    #[test]
    fn last_write_wins_and_original_untouched() {
        let s0 = Store::new();
        let s1 = s0.with(&ident("x"), 1);
        let s2 = s1.with(&ident("x"), 2);
        assert_eq!(s2.get("x"), Some(&2));
        assert_eq!(s1.get("x"), Some(&1));
        assert!(s0.is_empty());
    }

    #[test]
    fn well_boundedness() {
        assert!(store(&[("x", 32767)]).well_bounded());
        assert!(Store::<i64>::new().well_bounded());
        assert!(!store(&[("x", 2_147_483_648)]).well_bounded());
        assert!(store(&[("x", MIN_SIGNED)]).well_bounded());
    }

    #[test]
    fn equivalence_modulo_names() {
        let empty = Store::<i64>::new();
        assert!(empty.eq_mod(&store(&[("a", 5)]), &[ident("a")]));
        assert!(!empty.eq_mod(&store(&[("b", 5)]), &[ident("a")]));
        let s = store(&[("a", 1), ("b", 2)]);
        assert!(s.eq_mod(&s, &[]));
    }

    #[test]
    fn binds_names() {
        assert!(store(&[("x", 0)]).binds(&[ident("x")]));
        assert!(!Store::<i64>::new().binds(&[ident("x")]));
        assert!(Store::<i64>::new().binds(&[]));
    }
}
