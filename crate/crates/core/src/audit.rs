//! Axiom checks, the lemma suite, and successor/predecessor chain tracing.
//!
//! The successor and predecessor axioms are universal, but a finite universe
//! rarely satisfies them. Every conditional lemma about `x⁺` or `x⁻⁻` is
//! therefore checked only at elements where the lookup is `Unique`, and a
//! lemma whose hypothesis never applies is reported as vacuous.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bitset::ElemSet;
use crate::classifier::{phi_link_at, Census, NamedPredicate};
use crate::universe::{ElementId, LookupResult, Universe, UniverseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Successor,
    Predecessor,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Successor => "successor",
            Axiom::Predecessor => "predecessor",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub per_element: BTreeMap<ElementId, LookupResult>,
    pub satisfied: bool,
}

/// Fast path used by the enumerator: no per-element map is built.
pub fn satisfies_at(u: &Universe, which: Axiom) -> bool {
    (0..u.len()).all(|x| match which {
        Axiom::Successor => u.successor_at(x).is_unique(),
        Axiom::Predecessor => u.predecessor_at(x).is_unique(),
    })
}

pub fn check_axiom(u: &Universe, which: Axiom) -> AxiomReport {
    let per_element: BTreeMap<_, _> = (0..u.len())
        .map(|x| {
            let found = match which {
                Axiom::Successor => u.successor_at(x),
                Axiom::Predecessor => u.predecessor_at(x),
            };
            (u.id(x).clone(), found.map(|p| u.id(p).clone()))
        })
        .collect();
    let satisfied = per_element.values().all(LookupResult::is_unique);
    AxiomReport {
        axiom: which,
        per_element,
        satisfied,
    }
}

/// The statements checked by [`verify_lemma_suite`], in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LemmaTag {
    /// A lower is not a member of itself.
    #[serde(rename = "L-lower-not-self")]
    LowerNotSelf,
    /// An upper is a member of itself.
    #[serde(rename = "L-upper-self")]
    UpperSelf,
    /// No set is both an upper and a lower.
    #[serde(rename = "C-not-both")]
    NotBoth,
    /// A lower is coextensive with its predecessor, an upper with its successor.
    #[serde(rename = "C-stoppage")]
    Stoppage,
    /// `x ∉ x⁻⁻`
    #[serde(rename = "L-pred-not-self")]
    PredNotSelf,
    /// `x ∈ x⁺`
    #[serde(rename = "L-succ-self")]
    SuccSelf,
    /// For a lower `x`, `x⁺ ≠ x`.
    #[serde(rename = "A")]
    A,
    /// For a lower `x`, `x⁺` is a lower.
    #[serde(rename = "B")]
    B,
    /// For an upper `x`, `x⁻⁻ ≠ x`.
    #[serde(rename = "C2")]
    C2,
    /// For an upper `x`, `x⁻⁻` is an upper.
    #[serde(rename = "D")]
    D,
    /// For an upper `x`, `x⁻⁻ ∈ x`.
    #[serde(rename = "E")]
    E,
    /// Lower and upper links are disjoint; lowers ascend, uppers descend.
    #[serde(rename = "main-result")]
    MainResult,
    /// A strictly Russellian `R` would satisfy `R⁺ = R` and `R⁻⁻ = R`.
    #[serde(rename = "restated")]
    Restated,
}

impl LemmaTag {
    pub const ALL: [LemmaTag; 13] = [
        LemmaTag::LowerNotSelf,
        LemmaTag::UpperSelf,
        LemmaTag::NotBoth,
        LemmaTag::Stoppage,
        LemmaTag::PredNotSelf,
        LemmaTag::SuccSelf,
        LemmaTag::A,
        LemmaTag::B,
        LemmaTag::C2,
        LemmaTag::D,
        LemmaTag::E,
        LemmaTag::MainResult,
        LemmaTag::Restated,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            LemmaTag::LowerNotSelf => "L-lower-not-self",
            LemmaTag::UpperSelf => "L-upper-self",
            LemmaTag::NotBoth => "C-not-both",
            LemmaTag::Stoppage => "C-stoppage",
            LemmaTag::PredNotSelf => "L-pred-not-self",
            LemmaTag::SuccSelf => "L-succ-self",
            LemmaTag::A => "A",
            LemmaTag::B => "B",
            LemmaTag::C2 => "C2",
            LemmaTag::D => "D",
            LemmaTag::E => "E",
            LemmaTag::MainResult => "main-result",
            LemmaTag::Restated => "restated",
        }
    }
}

impl fmt::Display for LemmaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Element(ElementId),
    Pair(ElementId, ElementId),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Element(x) => write!(f, "{x}"),
            Witness::Pair(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Held at every one of `checked` hypothesis instances.
    Holds {
        checked: usize,
    },
    Vacuous,
    Violated {
        witness: Witness,
    },
}

impl Verdict {
    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub per_lemma: BTreeMap<LemmaTag, Verdict>,
}

impl LemmaReport {
    pub fn violations(&self) -> impl Iterator<Item = (LemmaTag, &Witness)> {
        self.per_lemma.iter().filter_map(|(t, v)| match v {
            Verdict::Violated { witness } => Some((*t, witness)),
            _ => None,
        })
    }

    pub fn has_violation(&self) -> bool {
        self.per_lemma.values().any(Verdict::is_violated)
    }
}

/// Accumulates one lemma's instances; the first failure wins.
struct Tally {
    checked: usize,
    failure: Option<Witness>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checked: 0,
            failure: None,
        }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        self.checked += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(witness());
        }
    }

    fn verdict(self) -> Verdict {
        match (self.failure, self.checked) {
            (Some(witness), _) => Verdict::Violated { witness },
            (None, 0) => Verdict::Vacuous,
            (None, checked) => Verdict::Holds { checked },
        }
    }
}

/// Evaluates every lemma, corollary and theorem of the theory on `u`.
pub fn verify_lemma_suite(u: &Universe) -> LemmaReport {
    let n = u.len();
    let census = Census::of(u);
    let lower = |x: usize| census.lower.contains(x);
    let upper = |x: usize| census.upper.contains(x);
    let succ: Vec<Option<usize>> = (0..n)
        .map(|x| u.successor_at(x).unique().copied())
        .collect();
    let pred: Vec<Option<usize>> = (0..n)
        .map(|x| u.predecessor_at(x).unique().copied())
        .collect();
    let el = |x: usize| Witness::Element(u.id(x).clone());
    let pair = |x: usize, y: usize| Witness::Pair(u.id(x).clone(), u.id(y).clone());

    let mut lower_not_self = Tally::new();
    let mut upper_self = Tally::new();
    let mut not_both = Tally::new();
    let mut stoppage = Tally::new();
    let mut pred_not_self = Tally::new();
    let mut succ_self = Tally::new();
    let mut a = Tally::new();
    let mut b = Tally::new();
    let mut c2 = Tally::new();
    let mut d = Tally::new();
    let mut e = Tally::new();
    let mut main = Tally::new();
    let mut restated = Tally::new();

    for x in 0..n {
        if lower(x) {
            lower_not_self.check(!u.self_membered_at(x), || el(x));
        }
        if upper(x) {
            upper_self.check(u.self_membered_at(x), || el(x));
        }
        not_both.check(!(lower(x) && upper(x)), || el(x));

        if let Some(p) = pred[x] {
            pred_not_self.check(!u.member_at(x, p), || pair(x, p));
            if lower(x) {
                stoppage.check(u.coextensive_at(x, p), || pair(x, p));
            }
        }
        if let Some(s) = succ[x] {
            succ_self.check(u.member_at(x, s), || pair(x, s));
            if upper(x) {
                stoppage.check(u.coextensive_at(x, s), || pair(x, s));
            }
        }

        if let (true, Some(s)) = (lower(x), succ[x]) {
            // Distinct extensions imply distinct identities.
            a.check(s != x && !u.coextensive_at(x, s), || pair(x, s));
            b.check(lower(s), || pair(x, s));
            let ascends = phi_link_at(u, x, s, &NamedPredicate::Lower)
                .is_some_and(|l| l.direction.includes_ascending());
            main.check(ascends, || pair(x, s));
        }
        if let (true, Some(p)) = (upper(x), pred[x]) {
            c2.check(p != x && !u.coextensive_at(x, p), || pair(x, p));
            d.check(upper(p), || pair(x, p));
            e.check(u.member_at(p, x), || pair(x, p));
            let descends = phi_link_at(u, x, p, &NamedPredicate::Upper)
                .is_some_and(|l| l.direction.includes_descending());
            main.check(descends, || pair(x, p));
        }

        if lower(x) && upper(x) {
            let stops_up = u.successor_target(x) == *u.ext_at(x);
            let stops_down = u.predecessor_target(x) == *u.ext_at(x);
            restated.check(stops_up && stops_down, || el(x));
        }
    }

    // No element is an endpoint of both a lower link and an upper link.
    let mut lower_ends = ElemSet::empty(n);
    let mut upper_ends = ElemSet::empty(n);
    let mut any_link = false;
    for x in 0..n {
        for y in (x + 1)..n {
            if phi_link_at(u, x, y, &NamedPredicate::Lower).is_some() {
                lower_ends.insert(x);
                lower_ends.insert(y);
                any_link = true;
            }
            if phi_link_at(u, x, y, &NamedPredicate::Upper).is_some() {
                upper_ends.insert(x);
                upper_ends.insert(y);
                any_link = true;
            }
        }
    }
    if any_link {
        let shared = lower_ends.iter().find(|&x| upper_ends.contains(x));
        main.check(shared.is_none(), || el(shared.unwrap_or(0)));
    }

    let per_lemma = [
        (LemmaTag::LowerNotSelf, lower_not_self),
        (LemmaTag::UpperSelf, upper_self),
        (LemmaTag::NotBoth, not_both),
        (LemmaTag::Stoppage, stoppage),
        (LemmaTag::PredNotSelf, pred_not_self),
        (LemmaTag::SuccSelf, succ_self),
        (LemmaTag::A, a),
        (LemmaTag::B, b),
        (LemmaTag::C2, c2),
        (LemmaTag::D, d),
        (LemmaTag::E, e),
        (LemmaTag::MainResult, main),
        (LemmaTag::Restated, restated),
    ]
    .into_iter()
    .map(|(tag, tally)| (tag, tally.verdict()))
    .collect();
    LemmaReport { per_lemma }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainDirection {
    /// Follow successors.
    Ascending,
    /// Follow predecessors.
    Descending,
}

impl FromStr for ChainDirection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "asc" | "ascending" => Ok(ChainDirection::Ascending),
            "desc" | "descending" => Ok(ChainDirection::Descending),
            other => Err(format!(
                "unknown direction `{other}` (expected asc or desc)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", content = "elements", rename_all = "snake_case")]
pub enum Termination {
    Absent,
    Multiple(Vec<ElementId>),
    /// The next lookup returned this already-visited element.
    Cycle(ElementId),
    LengthCap,
}

/// Property a chain is expected to preserve, with the steps that broke it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrackedProperty {
    pub property: NamedPredicate,
    /// Nodes that lack the property, are coextensive with the node before
    /// them, or are not linked to it in the chain's direction.
    pub breaks: Vec<ElementId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub direction: ChainDirection,
    pub nodes: Vec<ElementId>,
    pub terminated_by: Termination,
    pub tracked: Option<TrackedProperty>,
}

/// Follows successors (ascending) or predecessors (descending) from `start`
/// until a lookup fails, a node repeats, or `cap` nodes have been collected.
///
/// Starting from a lower going up, or an upper going down, every step is
/// checked to stay a lower/upper, to differ from the previous node, and to
/// contain (resp. be contained in) it.
pub fn trace_chain(
    u: &Universe,
    start: &ElementId,
    direction: ChainDirection,
    cap: usize,
) -> Result<Chain, UniverseError> {
    let start = u.position(start)?;
    let cap = cap.max(1);
    let census = Census::of(u);
    let tracked = match direction {
        ChainDirection::Ascending if census.lower.contains(start) => Some(NamedPredicate::Lower),
        ChainDirection::Descending if census.upper.contains(start) => Some(NamedPredicate::Upper),
        _ => None,
    };

    let mut nodes = vec![start];
    let mut visited = BTreeSet::from([start]);
    let mut breaks = Vec::new();
    let terminated_by = loop {
        if nodes.len() >= cap {
            break Termination::LengthCap;
        }
        let cur = *nodes.last().expect("chain starts non-empty");
        let next = match direction {
            ChainDirection::Ascending => u.successor_at(cur),
            ChainDirection::Descending => u.predecessor_at(cur),
        };
        let next = match next {
            LookupResult::Unique(p) => p,
            LookupResult::Absent => break Termination::Absent,
            LookupResult::Multiple(ps) => {
                break Termination::Multiple(ps.into_iter().map(|p| u.id(p).clone()).collect())
            }
        };
        if !visited.insert(next) {
            break Termination::Cycle(u.id(next).clone());
        }
        if let Some(prop) = tracked {
            let keeps = match prop {
                NamedPredicate::Lower => census.lower.contains(next) && u.member_at(cur, next),
                _ => census.upper.contains(next) && u.member_at(next, cur),
            };
            if !keeps || u.coextensive_at(cur, next) {
                breaks.push(u.id(next).clone());
            }
        }
        nodes.push(next);
    };

    Ok(Chain {
        direction,
        nodes: nodes.into_iter().map(|p| u.id(p).clone()).collect(),
        terminated_by,
        tracked: tracked.map(|property| TrackedProperty { property, breaks }),
    })
}
