//! Finite membership digraphs.
//!
//! A [`Universe`] is a finite set of named elements together with an
//! extension for each of them. Nothing is assumed about the membership
//! relation: self-membership, cycles and distinct coextensive elements are
//! all legal. Elements are kept in canonical (lexicographic name) order and
//! every query iterates in that order, so results are reproducible.
//!
//! Most operations come in two flavours: a name-level form (`extension`,
//! `successor_in`, ...) that validates its arguments, and a position-level
//! form (`ext_at`, `successor_at`, ...) used by the hot loops of the
//! classifier, the audit and the enumerator.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::bitset::ElemSet;

/// Name of an element. Ordered lexicographically; that order is the
/// canonical iteration order of every universe.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ElementId(String);

impl ElementId {
    pub fn new(name: impl Into<String>) -> Self {
        ElementId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for ElementId {
    fn from(s: &str) -> Self {
        ElementId(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error("unknown element `{0}`")]
    UnknownElement(ElementId),
    #[error("element `{0}` is defined more than once")]
    DuplicateElement(ElementId),
    #[error("`{set}` lists `{member}`, which is not an element of the universe")]
    UndefinedMember { set: ElementId, member: ElementId },
}

/// Outcome of searching a universe for the unique element with a given
/// extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "elements", rename_all = "snake_case")]
pub enum LookupResult<T = ElementId> {
    Unique(T),
    Absent,
    /// Two or more distinct elements, in canonical order.
    Multiple(Vec<T>),
}

impl<T> LookupResult<T> {
    pub fn unique(&self) -> Option<&T> {
        match self {
            LookupResult::Unique(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_unique(&self) -> bool {
        matches!(self, LookupResult::Unique(_))
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> LookupResult<U> {
        match self {
            LookupResult::Unique(t) => LookupResult::Unique(f(t)),
            LookupResult::Absent => LookupResult::Absent,
            LookupResult::Multiple(ts) => LookupResult::Multiple(ts.into_iter().map(f).collect()),
        }
    }
}

/// A finite membership universe. Immutable once built.
#[derive(Clone)]
pub struct Universe {
    ids: Arc<[ElementId]>,
    ext: Vec<ElemSet>,
}

impl Universe {
    pub fn empty() -> Self {
        Universe {
            ids: Arc::from(Vec::new()),
            ext: Vec::new(),
        }
    }

    /// Builds a universe from `(element, members)` definitions given in any
    /// order. Every member must itself be defined.
    pub fn from_definitions<I, M>(defs: I) -> Result<Self, UniverseError>
    where
        I: IntoIterator<Item = (ElementId, M)>,
        M: IntoIterator<Item = ElementId>,
    {
        let mut defs: Vec<(ElementId, Vec<ElementId>)> = defs
            .into_iter()
            .map(|(id, members)| (id, members.into_iter().collect()))
            .collect();
        defs.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = defs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(UniverseError::DuplicateElement(w[0].0.clone()));
        }
        let ids: Arc<[ElementId]> = defs.iter().map(|(id, _)| id.clone()).collect();
        let n = ids.len();
        let mut ext = Vec::with_capacity(n);
        for (set, members) in &defs {
            let mut s = ElemSet::empty(n);
            for m in members {
                let pos = ids
                    .binary_search(m)
                    .map_err(|_| UniverseError::UndefinedMember {
                        set: set.clone(),
                        member: m.clone(),
                    })?;
                s.insert(pos);
            }
            ext.push(s);
        }
        Ok(Universe { ids, ext })
    }

    /// Builds a universe directly from positions. `ids` must be strictly
    /// increasing and every set must be sized for `ids.len()`.
    pub(crate) fn from_parts(ids: Arc<[ElementId]>, ext: Vec<ElemSet>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(ids.len(), ext.len());
        Universe { ids, ext }
    }

    /// Builds the universe whose adjacency matrix is the low `n*n` bits of
    /// `code`, row-major: bit `i*n + j` set means element `j` is a member of
    /// element `i`.
    pub(crate) fn from_matrix(ids: Arc<[ElementId]>, code: u64) -> Self {
        let n = ids.len();
        let ext = (0..n)
            .map(|i| ElemSet::from_positions(n, (0..n).filter(|&j| code >> (i * n + j) & 1 == 1)))
            .collect();
        Universe { ids, ext }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Elements in canonical order.
    pub fn ids(&self) -> &[ElementId] {
        &self.ids
    }

    pub fn id(&self, pos: usize) -> &ElementId {
        &self.ids[pos]
    }

    pub fn position(&self, x: &ElementId) -> Result<usize, UniverseError> {
        self.ids
            .binary_search(x)
            .map_err(|_| UniverseError::UnknownElement(x.clone()))
    }

    pub fn contains_element(&self, x: &ElementId) -> bool {
        self.ids.binary_search(x).is_ok()
    }

    fn names(&self, set: &ElemSet) -> BTreeSet<ElementId> {
        set.iter().map(|p| self.ids[p].clone()).collect()
    }

    // ---- position-level queries ------------------------------------------

    #[inline]
    pub fn ext_at(&self, x: usize) -> &ElemSet {
        &self.ext[x]
    }

    /// `x ∈ y`
    #[inline]
    pub fn member_at(&self, x: usize, y: usize) -> bool {
        self.ext[y].contains(x)
    }

    #[inline]
    pub fn self_membered_at(&self, x: usize) -> bool {
        self.ext[x].contains(x)
    }

    pub fn coextensive_at(&self, x: usize, y: usize) -> bool {
        self.ext[x] == self.ext[y]
    }

    /// Every element whose extension equals `target`, as a lookup verdict.
    pub fn find_by_extension(&self, target: &ElemSet) -> LookupResult<usize> {
        let mut hits = self
            .ext
            .iter()
            .enumerate()
            .filter(|(_, e)| *e == target)
            .map(|(i, _)| i);
        match (hits.next(), hits.next()) {
            (None, _) => LookupResult::Absent,
            (Some(a), None) => LookupResult::Unique(a),
            (Some(a), Some(b)) => {
                let mut all = vec![a, b];
                all.extend(hits);
                LookupResult::Multiple(all)
            }
        }
    }

    /// `ext(x) ∪ {x}`
    pub fn successor_target(&self, x: usize) -> ElemSet {
        self.ext[x].with(x)
    }

    /// `ext(x) ∖ {x}`
    pub fn predecessor_target(&self, x: usize) -> ElemSet {
        self.ext[x].without(x)
    }

    pub fn successor_at(&self, x: usize) -> LookupResult<usize> {
        self.find_by_extension(&self.successor_target(x))
    }

    pub fn predecessor_at(&self, x: usize) -> LookupResult<usize> {
        self.find_by_extension(&self.predecessor_target(x))
    }

    /// `ext(x) Δ {x}`
    pub fn sym_diff_singleton_at(&self, x: usize) -> ElemSet {
        let mut s = self.ext[x].clone();
        s.toggle(x);
        s
    }

    // ---- name-level operations -------------------------------------------

    pub fn extension(&self, x: &ElementId) -> Result<BTreeSet<ElementId>, UniverseError> {
        let p = self.position(x)?;
        Ok(self.names(&self.ext[p]))
    }

    /// `x ∈ y`
    pub fn is_member(&self, x: &ElementId, y: &ElementId) -> Result<bool, UniverseError> {
        Ok(self.member_at(self.position(x)?, self.position(y)?))
    }

    pub fn coextensive(&self, x: &ElementId, y: &ElementId) -> Result<bool, UniverseError> {
        Ok(self.coextensive_at(self.position(x)?, self.position(y)?))
    }

    pub fn self_membered(&self, x: &ElementId) -> Result<bool, UniverseError> {
        Ok(self.self_membered_at(self.position(x)?))
    }

    /// The element `y` with `ext(y) = ext(x) ∪ {x}`, if there is exactly one.
    pub fn successor_in(&self, x: &ElementId) -> Result<LookupResult, UniverseError> {
        let p = self.position(x)?;
        Ok(self.successor_at(p).map(|i| self.ids[i].clone()))
    }

    /// The element `y` with `ext(y) = ext(x) ∖ {x}`, if there is exactly one.
    pub fn predecessor_in(&self, x: &ElementId) -> Result<LookupResult, UniverseError> {
        let p = self.position(x)?;
        Ok(self.predecessor_at(p).map(|i| self.ids[i].clone()))
    }

    pub fn sym_diff_singleton(&self, x: &ElementId) -> Result<BTreeSet<ElementId>, UniverseError> {
        let p = self.position(x)?;
        Ok(self.names(&self.sym_diff_singleton_at(p)))
    }
}

impl PartialEq for Universe {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.ext == other.ext
    }
}

impl Eq for Universe {}

impl fmt::Debug for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, id) in self.ids.iter().enumerate() {
            let members: Vec<&ElementId> = self.ext[i].iter().map(|p| &self.ids[p]).collect();
            m.entry(id, &members);
        }
        m.finish()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Small literal universes: `uni(&[("a", &["b"]), ("b", &["a"])])`.
    pub(crate) fn uni(defs: &[(&str, &[&str])]) -> Universe {
        Universe::from_definitions(
            defs.iter()
                .map(|(n, ms)| (ElementId::from(*n), ms.iter().map(|m| ElementId::from(*m)))),
        )
        .unwrap()
    }

    fn id(s: &str) -> ElementId {
        ElementId::from(s)
    }

    fn set(names: &[&str]) -> BTreeSet<ElementId> {
        names.iter().map(|n| id(n)).collect()
    }

    #[test]
    fn extension_examples() {
        assert_eq!(uni(&[("e", &[])]).extension(&id("e")).unwrap(), set(&[]));
        assert_eq!(
            uni(&[("q", &["q"])]).extension(&id("q")).unwrap(),
            set(&["q"])
        );
        let cyc = uni(&[("a", &["b"]), ("b", &["a"])]);
        assert_eq!(cyc.extension(&id("a")).unwrap(), set(&["b"]));
        assert_eq!(
            cyc.extension(&id("z")),
            Err(UniverseError::UnknownElement(id("z")))
        );
    }

    #[test]
    fn membership_examples() {
        let q = uni(&[("q", &["q"])]);
        assert!(q.is_member(&id("q"), &id("q")).unwrap());
        let e = uni(&[("e", &[])]);
        assert!(!e.is_member(&id("e"), &id("e")).unwrap());
        let cyc = uni(&[("a", &["b"]), ("b", &["a"])]);
        assert!(cyc.is_member(&id("a"), &id("b")).unwrap());
        assert!(!cyc.is_member(&id("a"), &id("a")).unwrap());
        assert!(cyc.is_member(&id("a"), &id("nope")).is_err());
    }

    #[test]
    fn coextensive_examples() {
        let ab = uni(&[("a", &[]), ("b", &[])]);
        assert!(ab.coextensive(&id("a"), &id("a")).unwrap());
        assert!(ab.coextensive(&id("a"), &id("b")).unwrap());
        let qe = uni(&[("q", &["q"]), ("e", &[])]);
        assert!(!qe.coextensive(&id("q"), &id("e")).unwrap());
    }

    #[test]
    fn self_membership_examples() {
        assert!(uni(&[("q", &["q"])]).self_membered(&id("q")).unwrap());
        assert!(!uni(&[("e", &[])]).self_membered(&id("e")).unwrap());
        // Top element containing everything, itself included.
        let top = uni(&[("U", &["U", "a", "b"]), ("a", &[]), ("b", &["a"])]);
        assert!(top.self_membered(&id("U")).unwrap());
    }

    #[test]
    fn successor_examples() {
        let q = uni(&[("q", &["q"])]);
        assert_eq!(
            q.successor_in(&id("q")).unwrap(),
            LookupResult::Unique(id("q"))
        );
        let e = uni(&[("e", &[])]);
        assert_eq!(e.successor_in(&id("e")).unwrap(), LookupResult::Absent);
        let es = uni(&[("e", &[]), ("s", &["e"])]);
        assert_eq!(
            es.successor_in(&id("e")).unwrap(),
            LookupResult::Unique(id("s"))
        );
    }

    #[test]
    fn predecessor_examples() {
        let qe = uni(&[("q", &["q"]), ("e", &[])]);
        assert_eq!(
            qe.predecessor_in(&id("q")).unwrap(),
            LookupResult::Unique(id("e"))
        );
        let e = uni(&[("e", &[])]);
        assert_eq!(
            e.predecessor_in(&id("e")).unwrap(),
            LookupResult::Unique(id("e"))
        );
        let ab = uni(&[("a", &[]), ("b", &[])]);
        assert_eq!(
            ab.predecessor_in(&id("a")).unwrap(),
            LookupResult::Multiple(vec![id("a"), id("b")])
        );
    }

    #[test]
    fn sym_diff_examples() {
        assert_eq!(
            uni(&[("e", &[])]).sym_diff_singleton(&id("e")).unwrap(),
            set(&["e"])
        );
        assert_eq!(
            uni(&[("q", &["q"])]).sym_diff_singleton(&id("q")).unwrap(),
            set(&[])
        );
        let cyc = uni(&[("a", &["b"]), ("b", &["a"])]);
        assert_eq!(cyc.sym_diff_singleton(&id("a")).unwrap(), set(&["a", "b"]));
    }

    #[test]
    fn construction_errors() {
        let dup = Universe::from_definitions(vec![(id("a"), vec![]), (id("a"), vec![id("a")])]);
        assert_eq!(dup, Err(UniverseError::DuplicateElement(id("a"))));
        let undefined = Universe::from_definitions(vec![(id("a"), vec![id("c")])]);
        assert_eq!(
            undefined,
            Err(UniverseError::UndefinedMember {
                set: id("a"),
                member: id("c")
            })
        );
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let u = uni(&[("b", &[]), ("a", &["b"]), ("C", &[])]);
        let names: Vec<&str> = u.ids().iter().map(|i| i.as_str()).collect();
        assert_eq!(names, vec!["C", "a", "b"]);
    }

    #[test]
    fn matrix_layout_is_row_major() {
        let ids: Arc<[ElementId]> = vec![id("x0"), id("x1")].into();
        // bit 1 = row 0, col 1: x1 ∈ x0
        let u = Universe::from_matrix(ids, 0b0010);
        assert!(u.member_at(1, 0));
        assert!(!u.member_at(0, 1));
    }
}
