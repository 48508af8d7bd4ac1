//! Membership by tagged urelements.
//!
//! A [`BaseModel`] is a well-founded fragment of hereditarily finite sets
//! plus a finite pool of urelements. Some urelements are tagged with an
//! [`Index`], a pair of representative sets `(level0, levelμ)`, and the tag
//! alone decides what the urelement contains:
//!
//! * the zero-level relation relates everything to everything, so its only
//!   representative is [`RepToken::ZeroRep`];
//! * the μ-level relation is equality, so the representative of `x` is `x`
//!   itself ([`RepToken::MuRep`]).
//!
//! The *sprig* of `x` for index `L` collects `(0, ZeroRep)` if `ZeroRep` is
//! in `L.level0` and `(μ, MuRep(x))` if `MuRep(x)` is in `L.levelμ`; `x` is a
//! member of the urelement exactly when its sprig has odd size. A set on the
//! right keeps its ordinary members.
//!
//! In practice `({ZeroRep}, E)` reads as "everything except `E`" and
//! `({}, E)` as "exactly `E`".

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::audit::{Chain, ChainDirection, Termination};
use crate::classifier::{is_upper_at, Census};
use crate::dsl::{IndexToken, UniverseDoc};
use crate::enumerate::{hf_universe, EnumError};
use crate::universe::{ElementId, LookupResult, Universe, UniverseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("`{0}` is not an entity of the model")]
    UnknownEntity(ElementId),
    #[error("`{0}` is not an urelement of the model")]
    NotUrelement(ElementId),
    #[error("`{0}` is both a set and an urelement")]
    OverlappingIds(ElementId),
    #[error("urelement `{0}` is declared more than once")]
    DuplicateUrelement(ElementId),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("tagging is not a bijection: {0}")]
    Collision(String),
    #[error("the set part is not well-founded (cycle through `{0}`)")]
    NotWellFounded(ElementId),
    #[error("set `{set}` has urelement `{member}` as a member; the set part must be pure")]
    ImpureSet { set: ElementId, member: ElementId },
    #[error(
        "urelement pool exhausted: needed {needed} untagged urelements, {available} available"
    )]
    PoolExhausted { needed: usize, available: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Enum(#[from] EnumError),
}

/// Representative of an equivalence class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepToken {
    /// The single class of the everything-related relation.
    ZeroRep,
    /// The singleton class of an entity under equality.
    MuRep(ElementId),
}

impl fmt::Display for RepToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepToken::ZeroRep => f.write_str("0rep"),
            RepToken::MuRep(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Zero,
    Mu,
}

/// `j-rep(x)`.
pub fn j_rep(level: Level, x: &ElementId) -> RepToken {
    match level {
        Level::Zero => RepToken::ZeroRep,
        Level::Mu => RepToken::MuRep(x.clone()),
    }
}

/// The tag of an urelement: one representative set per level.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Index {
    level0: BTreeSet<RepToken>,
    level_mu: BTreeSet<RepToken>,
}

impl Index {
    pub fn new(
        level0: impl IntoIterator<Item = RepToken>,
        level_mu: impl IntoIterator<Item = RepToken>,
    ) -> Result<Self, InterpError> {
        let level0: BTreeSet<_> = level0.into_iter().collect();
        let level_mu: BTreeSet<_> = level_mu.into_iter().collect();
        if let Some(t) = level0.iter().find(|t| **t != RepToken::ZeroRep) {
            return Err(InterpError::InvalidIndex(format!(
                "level 0 may only hold 0rep, found `{t}`"
            )));
        }
        if level_mu.contains(&RepToken::ZeroRep) {
            return Err(InterpError::InvalidIndex(
                "level μ may not hold 0rep".into(),
            ));
        }
        Ok(Index { level0, level_mu })
    }

    /// `({0rep}, {μ-rep(e) : e ∈ excluded})`: everything except `excluded`.
    pub fn complement_of<'a>(excluded: impl IntoIterator<Item = &'a ElementId>) -> Self {
        Index {
            level0: BTreeSet::from([RepToken::ZeroRep]),
            level_mu: excluded
                .into_iter()
                .map(|e| RepToken::MuRep(e.clone()))
                .collect(),
        }
    }

    /// `({}, {μ-rep(e) : e ∈ listed})`: exactly `listed`.
    pub fn listing<'a>(listed: impl IntoIterator<Item = &'a ElementId>) -> Self {
        Index {
            level0: BTreeSet::new(),
            level_mu: listed
                .into_iter()
                .map(|e| RepToken::MuRep(e.clone()))
                .collect(),
        }
    }

    /// `({0rep}, {})`, the tag of the universal set.
    pub fn universal() -> Self {
        Self::complement_of([])
    }

    pub fn level0(&self) -> &BTreeSet<RepToken> {
        &self.level0
    }

    pub fn level_mu(&self) -> &BTreeSet<RepToken> {
        &self.level_mu
    }

    pub fn has_zero(&self) -> bool {
        self.level0.contains(&RepToken::ZeroRep)
    }

    /// Entities named at level μ.
    pub fn mentioned(&self) -> impl Iterator<Item = &ElementId> {
        self.level_mu.iter().filter_map(|t| match t {
            RepToken::MuRep(x) => Some(x),
            RepToken::ZeroRep => None,
        })
    }

    /// Membership by the parity shortcut: with only two levels the sprig is
    /// odd exactly when one of the two level tests succeeds.
    pub fn admits(&self, x: &ElementId) -> bool {
        self.has_zero() ^ self.level_mu.contains(&RepToken::MuRep(x.clone()))
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &BTreeSet<RepToken>| {
            s.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(
            f,
            "({{{}}}, {{{}}})",
            join(&self.level0),
            join(&self.level_mu)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Sprig {
    pub pairs: BTreeSet<(Level, RepToken)>,
}

impl Sprig {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.pairs.len() % 2 == 1
    }
}

/// The sprig of `x` for index `tag`.
pub fn sprig_of(x: &ElementId, tag: &Index) -> Sprig {
    let mut pairs = BTreeSet::new();
    for (level, reps) in [(Level::Zero, &tag.level0), (Level::Mu, &tag.level_mu)] {
        let rep = j_rep(level, x);
        if reps.contains(&rep) {
            pairs.insert((level, rep));
        }
    }
    Sprig { pairs }
}

/// Well-founded set part, urelement pool, and a partial bijection between
/// indexes and urelements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseModel {
    hf_part: Universe,
    urelements: BTreeSet<ElementId>,
    tagging: BTreeMap<Index, ElementId>,
    tag_of: BTreeMap<ElementId, Index>,
}

fn check_well_founded(u: &Universe) -> Result<(), InterpError> {
    // Peel off elements whose members are all peeled; whatever is left
    // sits on or above a membership cycle.
    let n = u.len();
    let mut done = vec![false; n];
    loop {
        let ready: Vec<usize> = (0..n)
            .filter(|&x| !done[x] && u.ext_at(x).iter().all(|m| done[m]))
            .collect();
        if ready.is_empty() {
            break;
        }
        for x in ready {
            done[x] = true;
        }
    }
    match (0..n).find(|&x| !done[x]) {
        Some(x) => Err(InterpError::NotWellFounded(u.id(x).clone())),
        None => Ok(()),
    }
}

impl BaseModel {
    pub fn new(
        hf_part: Universe,
        urelements: impl IntoIterator<Item = ElementId>,
        tagging: impl IntoIterator<Item = (Index, ElementId)>,
    ) -> Result<Self, InterpError> {
        check_well_founded(&hf_part)?;
        let mut pool = BTreeSet::new();
        for ur in urelements {
            if hf_part.contains_element(&ur) {
                return Err(InterpError::OverlappingIds(ur));
            }
            if !pool.insert(ur.clone()) {
                return Err(InterpError::DuplicateUrelement(ur));
            }
        }
        let mut model = BaseModel {
            hf_part,
            urelements: pool,
            tagging: BTreeMap::new(),
            tag_of: BTreeMap::new(),
        };
        for (index, ur) in tagging {
            model.tag(index, ur)?;
        }
        Ok(model)
    }

    /// Builds a model from a parsed document: set definitions form the
    /// well-founded part, `urelement` lines the pool and tagging.
    pub fn from_doc(doc: &UniverseDoc) -> Result<Self, InterpError> {
        let urelements: BTreeSet<ElementId> = doc.urelements().map(|(n, _)| n.clone()).collect();
        for (set, members) in doc.definitions() {
            if let Some(m) = members.iter().find(|m| urelements.contains(*m)) {
                return Err(InterpError::ImpureSet {
                    set: set.clone(),
                    member: m.clone(),
                });
            }
        }
        let mut tagging = Vec::new();
        for (name, index) in doc.urelements() {
            if let Some((zero, mu)) = index {
                let convert = |toks: &[IndexToken]| -> Vec<RepToken> {
                    toks.iter()
                        .map(|t| match t {
                            IndexToken::ZeroRep => RepToken::ZeroRep,
                            IndexToken::Name(n) => RepToken::MuRep(n.clone()),
                        })
                        .collect()
                };
                tagging.push((Index::new(convert(zero), convert(mu))?, name.clone()));
            }
        }
        BaseModel::new(doc.universe(), urelements, tagging)
    }

    fn tag(&mut self, index: Index, ur: ElementId) -> Result<(), InterpError> {
        if !self.urelements.contains(&ur) {
            return Err(InterpError::NotUrelement(ur));
        }
        if let Some(x) = index.mentioned().find(|x| !self.is_entity(x)) {
            return Err(InterpError::InvalidIndex(format!(
                "index {index} mentions `{x}`, which is not an entity"
            )));
        }
        if let Some(prev) = self.tagging.get(&index) {
            return Err(InterpError::Collision(format!(
                "index {index} already tags `{prev}`"
            )));
        }
        if let Some(prev) = self.tag_of.get(&ur) {
            return Err(InterpError::Collision(format!(
                "`{ur}` is already tagged with {prev}"
            )));
        }
        self.tag_of.insert(ur.clone(), index.clone());
        self.tagging.insert(index, ur);
        Ok(())
    }

    pub fn hf_part(&self) -> &Universe {
        &self.hf_part
    }

    pub fn urelements(&self) -> impl Iterator<Item = &ElementId> {
        self.urelements.iter()
    }

    pub fn tagging(&self) -> &BTreeMap<Index, ElementId> {
        &self.tagging
    }

    pub fn index_of(&self, ur: &ElementId) -> Option<&Index> {
        self.tag_of.get(ur)
    }

    pub fn urelement_for(&self, index: &Index) -> Option<&ElementId> {
        self.tagging.get(index)
    }

    pub fn is_urelement(&self, x: &ElementId) -> bool {
        self.urelements.contains(x)
    }

    pub fn is_entity(&self, x: &ElementId) -> bool {
        self.urelements.contains(x) || self.hf_part.contains_element(x)
    }

    /// Urelements with no tag; they have no members.
    pub fn untagged(&self) -> Vec<ElementId> {
        self.urelements
            .iter()
            .filter(|u| !self.tag_of.contains_key(*u))
            .cloned()
            .collect()
    }

    /// Every entity, sets and urelements, in canonical order.
    pub fn entities(&self) -> Vec<ElementId> {
        let mut all: Vec<ElementId> = self
            .hf_part
            .ids()
            .iter()
            .chain(self.urelements.iter())
            .cloned()
            .collect();
        all.sort();
        all
    }

    fn require_entity(&self, x: &ElementId) -> Result<(), InterpError> {
        if self.is_entity(x) {
            Ok(())
        } else {
            Err(InterpError::UnknownEntity(x.clone()))
        }
    }

    /// The sprig of `x` for the index `tag`.
    pub fn sprig(&self, x: &ElementId, tag: &Index) -> Result<Sprig, InterpError> {
        self.require_entity(x)?;
        Ok(sprig_of(x, tag))
    }

    /// Interpreted membership `x ∈ u`: ordinary membership when `u` is a
    /// set, odd sprig size when `u` is a tagged urelement, and false for an
    /// untagged urelement (see [`BaseModel::untagged`]).
    pub fn member_interp(&self, x: &ElementId, u: &ElementId) -> Result<bool, InterpError> {
        self.require_entity(x)?;
        self.require_entity(u)?;
        if !self.urelements.contains(u) {
            return Ok(self.hf_part.contains_element(x) && self.hf_part.is_member(x, u)?);
        }
        Ok(match self.tag_of.get(u) {
            Some(tag) => sprig_of(x, tag).is_odd(),
            None => false,
        })
    }

    fn member_fast(&self, x: &ElementId, u: &ElementId) -> bool {
        match self.tag_of.get(u) {
            Some(tag) => tag.admits(x),
            None if self.urelements.contains(u) => false,
            None => {
                self.hf_part.contains_element(x) && self.hf_part.is_member(x, u).unwrap_or(false)
            }
        }
    }

    pub fn extension_interp(&self, u: &ElementId) -> Result<BTreeSet<ElementId>, InterpError> {
        self.require_entity(u)?;
        self.entities()
            .into_iter()
            .filter_map(|x| match self.member_interp(&x, u) {
                Ok(true) => Some(Ok(x)),
                Ok(false) => None,
                Err(e) => Some(Err(e)),
            })
            .collect()
    }

    /// The interpreted relation as an ordinary universe over all entities,
    /// so the classifier and audit apply to it unchanged.
    pub fn materialize(&self) -> Universe {
        let entities = self.entities();
        Universe::from_definitions(entities.iter().map(|u| {
            let members: Vec<ElementId> = entities
                .iter()
                .filter(|x| self.member_fast(x, u))
                .cloned()
                .collect();
            (u.clone(), members)
        }))
        .expect("entities are unique and closed under membership")
    }

    /// Retags so that `index` maps to `target`. The urelement that held
    /// `index` inherits the old tag of `target`; if `target` had no tag, the
    /// displaced urelement becomes untagged.
    fn assign(&mut self, index: &Index, target: &ElementId) {
        let holder = self.tagging.get(index).cloned();
        if holder.as_ref() == Some(target) {
            return;
        }
        let target_old = self.tag_of.remove(target);
        if let Some(h) = &holder {
            self.tag_of.remove(h);
        }
        if let Some(old) = &target_old {
            self.tagging.remove(old);
        }
        self.tagging.insert(index.clone(), target.clone());
        self.tag_of.insert(target.clone(), index.clone());
        if let (Some(h), Some(old)) = (holder, target_old) {
            self.tagging.insert(old.clone(), h.clone());
            self.tag_of.insert(h, old);
        }
    }

    fn check_bijective(&self) -> Result<(), InterpError> {
        let forward_ok = self
            .tagging
            .iter()
            .all(|(i, u)| self.tag_of.get(u) == Some(i));
        let backward_ok = self
            .tag_of
            .iter()
            .all(|(u, i)| self.tagging.get(i) == Some(u));
        if forward_ok && backward_ok && self.tagging.len() == self.tag_of.len() {
            Ok(())
        } else {
            Err(InterpError::Collision(
                "index and urelement maps disagree after retagging".into(),
            ))
        }
    }

    /// Retags the model so that `n = ({0rep}, {M})` tags `N` and
    /// `m = ({0rep}, {M, N})` tags `M`, handing the displaced tags to the
    /// urelements that previously carried `n` and `m`.
    pub fn upsilon_swap(&self, m: &ElementId, n: &ElementId) -> Result<BaseModel, InterpError> {
        for x in [m, n] {
            if !self.is_urelement(x) {
                return Err(InterpError::NotUrelement(x.clone()));
            }
        }
        if m == n {
            return Err(InterpError::Collision(format!(
                "M and N must be distinct, both are `{m}`"
            )));
        }
        let (idx_n, idx_m) = forster_indexes(m, n);
        let mut out = self.clone();
        out.assign(&idx_n, n);
        out.assign(&idx_m, m);
        out.check_bijective()?;
        Ok(out)
    }

    /// Tags the first untagged urelement (canonical order) with `index`,
    /// or returns the urelement that already carries it.
    fn tag_fresh(&mut self, index: &Index) -> Result<ElementId, InterpError> {
        if let Some(existing) = self.tagging.get(index) {
            return Ok(existing.clone());
        }
        let free = self.untagged();
        let Some(ur) = free.into_iter().next() else {
            return Err(InterpError::PoolExhausted {
                needed: 1,
                available: 0,
            });
        };
        self.tag(index.clone(), ur.clone())?;
        Ok(ur)
    }
}

/// `(n, m)` = `(({0rep}, {M}), ({0rep}, {M, N}))`.
pub fn forster_indexes(m: &ElementId, n: &ElementId) -> (Index, Index) {
    (Index::complement_of([m]), Index::complement_of([m, n]))
}

/// Names of the three urelements the counterexample is about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForsterRoles {
    pub universal: ElementId,
    pub m: ElementId,
    pub n: ElementId,
}

impl Default for ForsterRoles {
    fn default() -> Self {
        ForsterRoles {
            universal: "U".into(),
            m: "M".into(),
            n: "N".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedCheck {
    pub name: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForsterReport {
    pub roles: ForsterRoles,
    /// Reasons the named urelements do not carry the `n`/`m` tags; empty
    /// once the swap has been applied.
    pub unmet_preconditions: Vec<String>,
    pub entities: Vec<ElementId>,
    pub untagged: Vec<ElementId>,
    pub extension_n: BTreeSet<ElementId>,
    pub extension_m: BTreeSet<ElementId>,
    /// The five core facts about `M` and `N`.
    pub checks: Vec<NamedCheck>,
    /// Cross-checks against the materialized universe.
    pub supplementary: Vec<NamedCheck>,
    pub passed: bool,
}

/// Checks that `N` is everything but `M`, that `M` is everything but `M`
/// and `N`, and hence that `M` is the predecessor of `N` while `N ∈ N` and
/// `M ∉ M`.
pub fn verify_forster_counterexample(
    model: &BaseModel,
    roles: &ForsterRoles,
) -> Result<ForsterReport, InterpError> {
    let ForsterRoles { universal, m, n } = roles;
    for x in [universal, m, n] {
        if !model.is_urelement(x) {
            return Err(InterpError::Precondition(format!(
                "`{x}` is not an urelement of the model"
            )));
        }
    }
    if universal == m || universal == n || m == n {
        return Err(InterpError::Precondition(
            "U, M and N must be distinct".into(),
        ));
    }
    if model.index_of(universal) != Some(&Index::universal()) {
        return Err(InterpError::Precondition(format!(
            "`{universal}` must be tagged {}",
            Index::universal()
        )));
    }

    let (idx_n, idx_m) = forster_indexes(m, n);
    let mut unmet = Vec::new();
    for (idx, who, label) in [(&idx_n, n, "n"), (&idx_m, m, "m")] {
        match model.urelement_for(idx) {
            Some(holder) if holder == who => {}
            Some(holder) => unmet.push(format!(
                "index {label} = {idx} tags `{holder}`, not `{who}`"
            )),
            None => unmet.push(format!("index {label} = {idx} tags nothing")),
        }
    }

    let all: BTreeSet<ElementId> = model.entities().into_iter().collect();
    let without = |drop: &[&ElementId]| -> BTreeSet<ElementId> {
        all.iter().filter(|x| !drop.contains(x)).cloned().collect()
    };
    let ext_n = model.extension_interp(n)?;
    let ext_m = model.extension_interp(m)?;
    let ext_u = model.extension_interp(universal)?;
    let n_minus_n: BTreeSet<ElementId> = ext_n.iter().filter(|x| *x != n).cloned().collect();

    let checks = vec![
        NamedCheck {
            name: "ext(N) = All \\ {M}",
            holds: ext_n == without(&[m]),
        },
        NamedCheck {
            name: "ext(M) = All \\ {M, N}",
            holds: ext_m == without(&[m, n]),
        },
        NamedCheck {
            name: "N in N",
            holds: model.member_interp(n, n)?,
        },
        NamedCheck {
            name: "M not in M",
            holds: !model.member_interp(m, m)?,
        },
        NamedCheck {
            name: "ext(M) = ext(N) \\ {N}",
            holds: ext_m == n_minus_n,
        },
    ];

    let world = model.materialize();
    let pred_n = world.predecessor_in(n)?;
    let u_minus_m: BTreeSet<ElementId> = ext_u.iter().filter(|x| *x != m).cloned().collect();
    let supplementary = vec![
        NamedCheck {
            name: "predecessor of N is exactly M",
            holds: pred_n == LookupResult::Unique(m.clone()),
        },
        NamedCheck {
            name: "ext(U) = All",
            holds: ext_u == all,
        },
        NamedCheck {
            name: "N = U \\ {N--}",
            holds: ext_n == u_minus_m && pred_n == LookupResult::Unique(m.clone()),
        },
        NamedCheck {
            name: "N in N and N-- not in N--",
            holds: world.self_membered(n)? && !world.self_membered(m)?,
        },
    ];

    let passed =
        unmet.is_empty() && checks.iter().all(|c| c.holds) && supplementary.iter().all(|c| c.holds);
    Ok(ForsterReport {
        roles: roles.clone(),
        unmet_preconditions: unmet,
        entities: all.into_iter().collect(),
        untagged: model.untagged(),
        extension_n: ext_n,
        extension_m: ext_m,
        checks,
        supplementary,
        passed,
    })
}

/// Model file shipped with the `forster` demo: `V_2` plus eight urelements.
pub const DEFAULT_MODEL_TEXT: &str = include_str!("../demos/forster.model");

/// The demo model before the swap: `V_2` (`h0 = ∅`, `h1 = {∅}`) and the
/// pool `A B C D E M N U`. `U` is universal; `A` and `B` start out holding
/// the `n` and `m` indexes, while `N` and `M` hold other tags, so the swap
/// exercises every branch of the retagging.
pub fn default_demo_model() -> Result<BaseModel, InterpError> {
    let hf = hf_universe(2)?;
    let (u, m, n) = (
        ElementId::from("U"),
        ElementId::from("M"),
        ElementId::from("N"),
    );
    let pool: Vec<ElementId> = ["A", "B", "C", "D", "E", "M", "N", "U"]
        .into_iter()
        .map(ElementId::from)
        .collect();
    let (idx_n, idx_m) = forster_indexes(&m, &n);
    BaseModel::new(
        hf,
        pool,
        [
            (Index::universal(), u.clone()),
            (idx_n, "A".into()),
            (idx_m, "B".into()),
            (Index::listing([]), n),
            (Index::listing([&u]), m),
        ],
    )
}

/// Descending chain of uppers below the universal urelement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperChain {
    pub model: BaseModel,
    pub universal: ElementId,
    /// `U⁻⁻`, `(U⁻⁻)⁻⁻`, ... in order.
    pub links: Vec<ElementId>,
    pub indexes: Vec<Index>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpperLinkCheck {
    pub element: ElementId,
    pub index: String,
    pub previous: ElementId,
    pub is_upper: bool,
    pub self_membered: bool,
    pub distinct_from_previous: bool,
    pub member_of_previous: bool,
    /// `predecessor_in(previous)` on the materialized universe.
    pub is_predecessor_of_previous: bool,
}

impl UpperLinkCheck {
    pub fn holds(&self) -> bool {
        self.is_upper
            && self.self_membered
            && self.distinct_from_previous
            && self.member_of_previous
            && self.is_predecessor_of_previous
    }
}

impl UpperChain {
    pub fn as_chain(&self) -> Chain {
        Chain {
            direction: ChainDirection::Descending,
            nodes: std::iter::once(self.universal.clone())
                .chain(self.links.iter().cloned())
                .collect(),
            terminated_by: Termination::LengthCap,
            tracked: None,
        }
    }

    /// Re-runs the classifier on the materialized universe and checks every
    /// link against the one before it.
    pub fn verify(&self) -> Vec<UpperLinkCheck> {
        let world = self.model.materialize();
        let census = Census::of(&world);
        let pos = |x: &ElementId| world.position(x).expect("chain entities are in the model");
        let mut prev = self.universal.clone();
        let mut out = Vec::new();
        for (link, index) in self.links.iter().zip(&self.indexes) {
            let (p, q) = (pos(&prev), pos(link));
            debug_assert_eq!(census.upper.contains(q), is_upper_at(&world, q));
            out.push(UpperLinkCheck {
                element: link.clone(),
                index: index.to_string(),
                previous: prev.clone(),
                is_upper: census.upper.contains(q),
                self_membered: world.self_membered_at(q),
                distinct_from_previous: p != q && !world.coextensive_at(p, q),
                member_of_previous: world.member_at(q, p),
                is_predecessor_of_previous: world.predecessor_at(p) == LookupResult::Unique(q),
            });
            prev = link.clone();
        }
        out
    }
}

/// Tags fresh urelements with `({0rep}, {U})`, `({0rep}, {U, U⁻⁻})`, ... so
/// that each new entity is the predecessor of the one before it.
pub fn upper_chain_interp(
    model: &BaseModel,
    universal: &ElementId,
    k: usize,
) -> Result<UpperChain, InterpError> {
    if model.index_of(universal) != Some(&Index::universal()) {
        return Err(InterpError::Precondition(format!(
            "`{universal}` must be tagged {}",
            Index::universal()
        )));
    }
    if k == 0 {
        return Err(InterpError::Precondition(
            "chain length must be at least 1".into(),
        ));
    }
    let available = model.untagged().len();
    let mut out = model.clone();
    let mut excluded = vec![universal.clone()];
    let mut links = Vec::with_capacity(k);
    let mut used = Vec::with_capacity(k);
    for _ in 0..k {
        let index = Index::complement_of(&excluded);
        let ur = out.tag_fresh(&index).map_err(|e| match e {
            InterpError::PoolExhausted { .. } => InterpError::PoolExhausted {
                needed: k,
                available,
            },
            other => other,
        })?;
        excluded.push(ur.clone());
        links.push(ur);
        used.push(index);
    }
    Ok(UpperChain {
        model: out,
        universal: universal.clone(),
        links,
        indexes: used,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuineReport {
    pub universe: String,
    pub q_self_membered: bool,
    pub predecessor_of_q: LookupResult,
    pub e_self_membered: bool,
    pub passed: bool,
}

/// The Quine atom `q = {q}` next to `e = {}`: `q ∈ q`, `q⁻⁻ = e`, `e ∉ e`.
pub fn quine_demo() -> QuineReport {
    let q = ElementId::from("q");
    let e = ElementId::from("e");
    let u = Universe::from_definitions([(e.clone(), vec![]), (q.clone(), vec![q.clone()])])
        .expect("static universe");
    let q_self = u.self_membered(&q).expect("q defined");
    let pred = u.predecessor_in(&q).expect("q defined");
    let e_self = u.self_membered(&e).expect("e defined");
    QuineReport {
        universe: crate::dsl::print_universe(&u),
        passed: q_self && pred == LookupResult::Unique(e) && !e_self,
        q_self_membered: q_self,
        predecessor_of_q: pred,
        e_self_membered: e_self,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_document;

    fn id(s: &str) -> ElementId {
        ElementId::from(s)
    }

    fn ids(names: &[&str]) -> BTreeSet<ElementId> {
        names.iter().map(|n| id(n)).collect()
    }

    /// `V_2` plus the given pool, tagged as listed.
    fn model(pool: &[&str], tags: Vec<(Index, &str)>) -> BaseModel {
        BaseModel::new(
            hf_universe(2).unwrap(),
            pool.iter().map(|p| id(p)),
            tags.into_iter().map(|(i, u)| (i, id(u))),
        )
        .unwrap()
    }

    #[test]
    fn j_rep_examples() {
        assert_eq!(j_rep(Level::Zero, &id("h0")), RepToken::ZeroRep);
        assert_eq!(j_rep(Level::Zero, &id("h0")), j_rep(Level::Zero, &id("N")));
        assert_eq!(j_rep(Level::Mu, &id("N")), RepToken::MuRep(id("N")));
    }

    #[test]
    fn sprig_examples() {
        let m = model(&["M", "U"], vec![]);
        for x in m.entities() {
            assert_eq!(m.sprig(&x, &Index::universal()).unwrap().len(), 1);
            assert!(m.sprig(&x, &Index::listing([])).unwrap().is_empty());
        }
        let tag = Index::complement_of([&id("M")]);
        assert_eq!(m.sprig(&id("M"), &tag).unwrap().len(), 2);
        assert_eq!(m.sprig(&id("U"), &tag).unwrap().len(), 1);
        assert_eq!(m.sprig(&id("h1"), &tag).unwrap().len(), 1);
        assert!(m.sprig(&id("zz"), &tag).is_err());
    }

    #[test]
    fn member_interp_examples() {
        let m = model(
            &["E", "U", "V", "W"],
            vec![
                (Index::universal(), "U"),
                (Index::listing([]), "E"),
                (Index::complement_of([&id("U")]), "V"),
            ],
        );
        for x in m.entities() {
            assert!(m.member_interp(&x, &id("U")).unwrap());
            assert!(!m.member_interp(&x, &id("E")).unwrap());
            assert_eq!(m.member_interp(&x, &id("V")).unwrap(), x != id("U"));
            // W is untagged and has no members.
            assert!(!m.member_interp(&x, &id("W")).unwrap());
        }
        assert_eq!(m.untagged(), vec![id("W")]);
        // Sets on the right keep their base members; urelements are in no set.
        assert!(m.member_interp(&id("h0"), &id("h1")).unwrap());
        assert!(!m.member_interp(&id("U"), &id("h1")).unwrap());
        assert!(m.member_interp(&id("q"), &id("U")).is_err());
    }

    #[test]
    fn extension_interp_examples() {
        let m = default_demo_model()
            .unwrap()
            .upsilon_swap(&id("M"), &id("N"))
            .unwrap();
        let all: BTreeSet<ElementId> = m.entities().into_iter().collect();
        assert_eq!(m.extension_interp(&id("U")).unwrap(), all);
        // A now carries the empty listing.
        assert!(m.extension_interp(&id("A")).unwrap().is_empty());
        let mut all_but_m = all.clone();
        all_but_m.remove(&id("M"));
        assert_eq!(m.extension_interp(&id("N")).unwrap(), all_but_m);
    }

    #[test]
    fn odd_sprig_agrees_with_parity_shortcut() {
        let m = default_demo_model()
            .unwrap()
            .upsilon_swap(&id("M"), &id("N"))
            .unwrap();
        for u in m.urelements() {
            let Some(tag) = m.index_of(u) else { continue };
            for x in m.entities() {
                assert_eq!(sprig_of(&x, tag).is_odd(), tag.admits(&x), "{x} in {u}");
            }
        }
    }

    #[test]
    fn swap_on_untagged_pair() {
        let m = model(&["M", "N", "U"], vec![(Index::universal(), "U")]);
        let s = m.upsilon_swap(&id("M"), &id("N")).unwrap();
        let (n_idx, m_idx) = forster_indexes(&id("M"), &id("N"));
        assert_eq!(s.urelement_for(&n_idx), Some(&id("N")));
        assert_eq!(s.urelement_for(&m_idx), Some(&id("M")));
        assert_eq!(s.index_of(&id("U")), Some(&Index::universal()));
        // Applying it again changes nothing.
        assert_eq!(s.upsilon_swap(&id("M"), &id("N")).unwrap(), s);
    }

    #[test]
    fn swap_hands_displaced_tags_over() {
        let before = default_demo_model().unwrap();
        let after = before.upsilon_swap(&id("M"), &id("N")).unwrap();
        let (n_idx, m_idx) = forster_indexes(&id("M"), &id("N"));
        assert_eq!(after.urelement_for(&n_idx), Some(&id("N")));
        assert_eq!(after.urelement_for(&m_idx), Some(&id("M")));
        // N's old tag goes to n's old holder A, M's old tag to m's old holder B.
        assert_eq!(after.index_of(&id("A")), before.index_of(&id("N")));
        assert_eq!(after.index_of(&id("B")), before.index_of(&id("M")));
        assert_eq!(after.index_of(&id("U")), before.index_of(&id("U")));
        assert_eq!(after.tagging().len(), before.tagging().len());
        after.check_bijective().unwrap();
    }

    #[test]
    fn swap_errors() {
        let m = model(&["M", "N"], vec![]);
        assert!(matches!(
            m.upsilon_swap(&id("M"), &id("M")),
            Err(InterpError::Collision(_))
        ));
        assert_eq!(
            m.upsilon_swap(&id("M"), &id("h0")),
            Err(InterpError::NotUrelement(id("h0")))
        );
    }

    #[test]
    fn forster_demo_passes() {
        let m = default_demo_model()
            .unwrap()
            .upsilon_swap(&id("M"), &id("N"))
            .unwrap();
        let r = verify_forster_counterexample(&m, &ForsterRoles::default()).unwrap();
        assert!(r.unmet_preconditions.is_empty());
        assert_eq!(r.checks.len(), 5);
        assert!(r.checks.iter().all(|c| c.holds), "{r:?}");
        assert!(r.supplementary.iter().all(|c| c.holds), "{r:?}");
        assert!(r.passed);
        assert_eq!(r.entities.len(), 10);
        assert_eq!(r.untagged, vec![id("C"), id("D"), id("E")]);
    }

    #[test]
    fn forster_without_swap_flags_precondition() {
        let m = default_demo_model().unwrap();
        let r = verify_forster_counterexample(&m, &ForsterRoles::default()).unwrap();
        assert_eq!(r.unmet_preconditions.len(), 2);
        assert!(!r.passed);
        // The holder of n is still everything but M.
        let mut all_but_m: BTreeSet<ElementId> = m.entities().into_iter().collect();
        all_but_m.remove(&id("M"));
        assert_eq!(m.extension_interp(&id("A")).unwrap(), all_but_m);
        assert!(!r.checks[0].holds);
    }

    #[test]
    fn forster_precondition_errors() {
        let m = model(&["M", "N", "U"], vec![]);
        assert!(matches!(
            verify_forster_counterexample(&m, &ForsterRoles::default()),
            Err(InterpError::Precondition(_))
        ));
        let m = model(&["M", "N"], vec![]);
        assert!(matches!(
            verify_forster_counterexample(&m, &ForsterRoles::default()),
            Err(InterpError::Precondition(_))
        ));
    }

    #[test]
    fn quine_contrast() {
        let r = quine_demo();
        assert!(r.q_self_membered);
        assert_eq!(r.predecessor_of_q, LookupResult::Unique(id("e")));
        assert!(!r.e_self_membered);
        assert!(r.passed);
    }

    #[test]
    fn upper_chain_single_step() {
        let m = default_demo_model().unwrap();
        let chain = upper_chain_interp(&m, &id("U"), 1).unwrap();
        assert_eq!(chain.links, vec![id("C")]);
        assert_eq!(chain.indexes[0], Index::complement_of([&id("U")]));
        let c = &chain.model;
        assert!(c.member_interp(&id("C"), &id("U")).unwrap());
        assert!(c.member_interp(&id("C"), &id("C")).unwrap());
        assert!(chain.verify().iter().all(UpperLinkCheck::holds));
    }

    #[test]
    fn upper_chain_three_steps() {
        let m = default_demo_model()
            .unwrap()
            .upsilon_swap(&id("M"), &id("N"))
            .unwrap();
        let chain = upper_chain_interp(&m, &id("U"), 3).unwrap();
        assert_eq!(chain.links, vec![id("C"), id("D"), id("E")]);
        let checks = chain.verify();
        assert_eq!(checks.len(), 3);
        assert!(checks.iter().all(UpperLinkCheck::holds), "{checks:?}");
        let exts: Vec<BTreeSet<ElementId>> = chain
            .links
            .iter()
            .map(|l| chain.model.extension_interp(l).unwrap())
            .collect();
        let all: BTreeSet<ElementId> = chain.model.entities().into_iter().collect();
        assert_eq!(exts[0], &all - &ids(&["U"]));
        assert_eq!(exts[1], &all - &ids(&["U", "C"]));
        assert_eq!(exts[2], &all - &ids(&["U", "C", "D"]));
        assert_eq!(chain.as_chain().nodes.len(), 4);
    }

    #[test]
    fn upper_chain_errors() {
        let m = default_demo_model().unwrap();
        assert_eq!(
            upper_chain_interp(&m, &id("U"), 4),
            Err(InterpError::PoolExhausted {
                needed: 4,
                available: 3
            })
        );
        assert!(matches!(
            upper_chain_interp(&m, &id("M"), 1),
            Err(InterpError::Precondition(_))
        ));
        assert!(matches!(
            upper_chain_interp(&m, &id("U"), 0),
            Err(InterpError::Precondition(_))
        ));
    }

    #[test]
    fn model_file_matches_builtin_model() {
        let doc = parse_document(DEFAULT_MODEL_TEXT.as_bytes()).unwrap();
        assert_eq!(
            BaseModel::from_doc(&doc).unwrap(),
            default_demo_model().unwrap()
        );
    }

    #[test]
    fn model_validation() {
        let impure = parse_document(b"s = {U}\nurelement U\n").unwrap();
        assert!(matches!(
            BaseModel::from_doc(&impure),
            Err(InterpError::ImpureSet { .. })
        ));
        let cyclic = parse_document(b"a = {b}\nb = {a}\nc = {}\n").unwrap();
        assert_eq!(
            BaseModel::from_doc(&cyclic),
            Err(InterpError::NotWellFounded(id("a")))
        );
        let bad_level = parse_document(b"urelement U index ({U}, {})\n").unwrap();
        assert!(matches!(
            BaseModel::from_doc(&bad_level),
            Err(InterpError::InvalidIndex(_))
        ));
        let twice =
            parse_document(b"urelement U index ({0rep}, {})\nurelement V index ({0rep}, {})\n")
                .unwrap();
        assert!(matches!(
            BaseModel::from_doc(&twice),
            Err(InterpError::Collision(_))
        ));
        assert_eq!(
            BaseModel::new(hf_universe(2).unwrap(), [id("h0")], []),
            Err(InterpError::OverlappingIds(id("h0")))
        );
        assert!(Index::new([RepToken::ZeroRep], [RepToken::ZeroRep]).is_err());
    }
}
