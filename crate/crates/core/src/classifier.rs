//! Lower/upper Russellian classification, links, and comprehension witnesses.
//!
//! * a **lower** is a set all of whose members are non-self-membered;
//! * an **upper** contains every non-self-membered element of the universe;
//! * a set is **strictly Russellian** when it is both.
//!
//! Two distinct elements one of which is a member of the other form a
//! **link**, ascending from the member to the container. A link whose
//! endpoints both satisfy some predicate is a link "of" that predicate
//! (a lower link, an upper link, ...).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bitset::ElemSet;
use crate::universe::{ElementId, Universe, UniverseError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub element: ElementId,
    pub lower: bool,
    pub upper: bool,
    pub self_membered: bool,
}

impl Classification {
    pub fn strictly_russellian(&self) -> bool {
        self.lower && self.upper
    }
}

/// Elements that are not members of themselves.
pub fn non_self_membered(u: &Universe) -> ElemSet {
    ElemSet::from_positions(u.len(), (0..u.len()).filter(|&z| !u.self_membered_at(z)))
}

/// Per-universe cache of the three position sets the predicates are built on.
#[derive(Debug, Clone)]
pub struct Census {
    pub nonself: ElemSet,
    pub lower: ElemSet,
    pub upper: ElemSet,
}

impl Census {
    pub fn of(u: &Universe) -> Self {
        let n = u.len();
        let nonself = non_self_membered(u);
        let mut lower = ElemSet::empty(n);
        let mut upper = ElemSet::empty(n);
        for x in 0..n {
            if u.ext_at(x).is_subset(&nonself) {
                lower.insert(x);
            }
            if nonself.is_subset(u.ext_at(x)) {
                upper.insert(x);
            }
        }
        Census {
            nonself,
            lower,
            upper,
        }
    }
}

pub fn is_lower_at(u: &Universe, x: usize) -> bool {
    u.ext_at(x).iter().all(|z| !u.self_membered_at(z))
}

pub fn is_upper_at(u: &Universe, x: usize) -> bool {
    (0..u.len()).all(|z| u.self_membered_at(z) || u.member_at(z, x))
}

pub fn is_lower(u: &Universe, x: &ElementId) -> Result<bool, UniverseError> {
    Ok(is_lower_at(u, u.position(x)?))
}

pub fn is_upper(u: &Universe, x: &ElementId) -> Result<bool, UniverseError> {
    Ok(is_upper_at(u, u.position(x)?))
}

pub fn is_strictly_russellian(u: &Universe, x: &ElementId) -> Result<bool, UniverseError> {
    let p = u.position(x)?;
    Ok(is_lower_at(u, p) && is_upper_at(u, p))
}

pub fn classify(u: &Universe) -> Vec<Classification> {
    let census = Census::of(u);
    (0..u.len())
        .map(|x| Classification {
            element: u.id(x).clone(),
            lower: census.lower.contains(x),
            upper: census.upper.contains(x),
            self_membered: u.self_membered_at(x),
        })
        .collect()
}

/// Predicates accepted wherever the schema calls for an arbitrary property
/// of elements.
pub trait Predicate {
    fn holds(&self, u: &Universe, x: usize) -> bool;
    fn label(&self) -> String;
}

/// The fixed vocabulary exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedPredicate {
    /// `x ∉ x`
    NonSelf,
    Lower,
    Upper,
    All,
    None,
}

impl NamedPredicate {
    pub const ALL: [NamedPredicate; 5] = [
        NamedPredicate::NonSelf,
        NamedPredicate::Lower,
        NamedPredicate::Upper,
        NamedPredicate::All,
        NamedPredicate::None,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedPredicate::NonSelf => "nonself",
            NamedPredicate::Lower => "lower",
            NamedPredicate::Upper => "upper",
            NamedPredicate::All => "all",
            NamedPredicate::None => "none",
        }
    }
}

impl fmt::Display for NamedPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedPredicate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NamedPredicate::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = NamedPredicate::ALL.iter().map(|p| p.name()).collect();
                format!(
                    "unknown predicate `{s}` (expected one of: {})",
                    known.join(", ")
                )
            })
    }
}

impl Predicate for NamedPredicate {
    fn holds(&self, u: &Universe, x: usize) -> bool {
        match self {
            NamedPredicate::NonSelf => !u.self_membered_at(x),
            NamedPredicate::Lower => is_lower_at(u, x),
            NamedPredicate::Upper => is_upper_at(u, x),
            NamedPredicate::All => true,
            NamedPredicate::None => false,
        }
    }

    fn label(&self) -> String {
        self.name().to_owned()
    }
}

/// An ad-hoc predicate over element names.
pub struct FnPredicate<F> {
    pub label: String,
    pub f: F,
}

impl<F: Fn(&ElementId) -> bool> Predicate for FnPredicate<F> {
    fn holds(&self, u: &Universe, x: usize) -> bool {
        (self.f)(u.id(x))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkDirection {
    /// `x ∈ y`
    Ascending,
    /// `y ∈ x`
    Descending,
    /// A 2-cycle: both clauses hold.
    Both,
}

impl LinkDirection {
    pub fn includes_ascending(self) -> bool {
        matches!(self, LinkDirection::Ascending | LinkDirection::Both)
    }

    pub fn includes_descending(self) -> bool {
        matches!(self, LinkDirection::Descending | LinkDirection::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkKind {
    pub direction: LinkDirection,
    /// Name of the predicate both endpoints satisfy, for φ-links.
    pub property: Option<String>,
}

pub fn link_at(u: &Universe, x: usize, y: usize) -> Option<LinkDirection> {
    if x == y {
        return None;
    }
    match (u.member_at(x, y), u.member_at(y, x)) {
        (true, true) => Some(LinkDirection::Both),
        (true, false) => Some(LinkDirection::Ascending),
        (false, true) => Some(LinkDirection::Descending),
        (false, false) => None,
    }
}

pub fn link(u: &Universe, x: &ElementId, y: &ElementId) -> Result<Option<LinkKind>, UniverseError> {
    let (px, py) = (u.position(x)?, u.position(y)?);
    Ok(link_at(u, px, py).map(|direction| LinkKind {
        direction,
        property: None,
    }))
}

pub fn phi_link_at(u: &Universe, x: usize, y: usize, phi: &dyn Predicate) -> Option<LinkKind> {
    let direction = link_at(u, x, y)?;
    (phi.holds(u, x) && phi.holds(u, y)).then(|| LinkKind {
        direction,
        property: Some(phi.label()),
    })
}

pub fn phi_link(
    u: &Universe,
    x: &ElementId,
    y: &ElementId,
    phi: &dyn Predicate,
) -> Result<Option<LinkKind>, UniverseError> {
    let (px, py) = (u.position(x)?, u.position(y)?);
    Ok(phi_link_at(u, px, py, phi))
}

/// Least element `y` with `∀x. x∈y ⇔ x∉x`.
pub fn russell_witness(u: &Universe) -> Option<ElementId> {
    let nonself = non_self_membered(u);
    (0..u.len())
        .find(|&y| *u.ext_at(y) == nonself)
        .map(|y| u.id(y).clone())
}

/// Least element `y` with `∀x. x∈y ⇔ φ(x)`.
pub fn comprehension_witness(u: &Universe, phi: &dyn Predicate) -> Option<ElementId> {
    (0..u.len())
        .find(|&y| (0..u.len()).all(|x| u.member_at(x, y) == phi.holds(u, x)))
        .map(|y| u.id(y).clone())
}
