//! Exhaustive enumeration of small universes, canonical forms, and the
//! hereditarily finite universes `V_r`.
//!
//! An `n`-element universe is identified with an `n*n`-bit integer: bit
//! `i*n + j` is set when element `j` is a member of element `i` (row `i` is
//! the extension of element `i`). Enumeration walks that counter from `0` to
//! `2^(n*n) - 1`, so the visiting order is reproducible and the range can be
//! split across threads.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::audit::{satisfies_at, Axiom};
use crate::bitset::ElemSet;
use crate::classifier::Census;
use crate::dsl::print_universe;
use crate::universe::{ElementId, Universe};

/// Default upper bound on `n` (2^25 universes).
pub const DEFAULT_MAX_N: usize = 5;
/// Largest `n` whose counter fits the 64-bit layout with room for a total.
pub const HARD_MAX_N: usize = 7;
/// Largest universe [`canonical_form`] accepts (8! permutations, 64 bits).
pub const CANONICAL_MAX_N: usize = 8;
/// Largest supported HF rank; `V_4` has 16 elements.
pub const HF_MAX_RANK: u32 = 4;
/// Number of matching universes kept as examples in [`EnumStats`].
pub const SAMPLE_LIMIT: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("size {n} exceeds the enumeration cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("HF rank {rank} exceeds the supported maximum of {max}")]
    RankExceeded { rank: u32, max: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniverseFilter {
    SatisfiesSuccessor,
    SatisfiesPredecessor,
    SatisfiesBoth,
    HasUpper,
    HasLower,
    HasStrictlyRussellian,
}

impl UniverseFilter {
    pub const ALL: [UniverseFilter; 6] = [
        UniverseFilter::SatisfiesSuccessor,
        UniverseFilter::SatisfiesPredecessor,
        UniverseFilter::SatisfiesBoth,
        UniverseFilter::HasUpper,
        UniverseFilter::HasLower,
        UniverseFilter::HasStrictlyRussellian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UniverseFilter::SatisfiesSuccessor => "satisfies-successor",
            UniverseFilter::SatisfiesPredecessor => "satisfies-predecessor",
            UniverseFilter::SatisfiesBoth => "satisfies-both",
            UniverseFilter::HasUpper => "has-upper",
            UniverseFilter::HasLower => "has-lower",
            UniverseFilter::HasStrictlyRussellian => "has-strictly-russellian",
        }
    }

    pub fn matches(self, u: &Universe) -> bool {
        match self {
            UniverseFilter::SatisfiesSuccessor => satisfies_at(u, Axiom::Successor),
            UniverseFilter::SatisfiesPredecessor => satisfies_at(u, Axiom::Predecessor),
            UniverseFilter::SatisfiesBoth => {
                satisfies_at(u, Axiom::Successor) && satisfies_at(u, Axiom::Predecessor)
            }
            UniverseFilter::HasUpper => !Census::of(u).upper.is_empty(),
            UniverseFilter::HasLower => !Census::of(u).lower.is_empty(),
            UniverseFilter::HasStrictlyRussellian => {
                let c = Census::of(u);
                let found = c.lower.iter().any(|x| c.upper.contains(x));
                found
            }
        }
    }
}

impl fmt::Display for UniverseFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UniverseFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        UniverseFilter::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = UniverseFilter::ALL.iter().map(|f| f.name()).collect();
                format!(
                    "unknown filter `{s}` (expected one of: {})",
                    known.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumSpec {
    pub n: usize,
    pub filter: Option<UniverseFilter>,
    /// Visit one representative per isomorphism class.
    pub dedupe: bool,
    /// Largest accepted `n`; see [`max_n_from_env`].
    pub max_n: usize,
}

impl EnumSpec {
    pub fn new(n: usize) -> Self {
        EnumSpec {
            n,
            filter: None,
            dedupe: false,
            max_n: DEFAULT_MAX_N,
        }
    }

    pub fn filter(mut self, f: UniverseFilter) -> Self {
        self.filter = Some(f);
        self
    }

    pub fn dedupe(mut self, on: bool) -> Self {
        self.dedupe = on;
        self
    }

    pub fn max_n(mut self, cap: usize) -> Self {
        self.max_n = cap;
        self
    }

    fn validate(&self) -> Result<(), EnumError> {
        let cap = self.max_n.min(HARD_MAX_N);
        if self.n > cap {
            return Err(EnumError::CapExceeded { n: self.n, cap });
        }
        Ok(())
    }
}

/// Reads the `SETLAB_MAX_N` override, clamped to [`HARD_MAX_N`].
pub fn max_n_from_env() -> usize {
    std::env::var("SETLAB_MAX_N")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map_or(DEFAULT_MAX_N, |n| n.min(HARD_MAX_N))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumStats {
    pub n: usize,
    pub filter: Option<UniverseFilter>,
    pub dedupe: bool,
    pub total: u64,
    pub matching: u64,
    /// The first few matching universes in counter order, as DSL text.
    pub sample_witnesses: Vec<String>,
}

/// Element names used for enumerated universes: `x0`, `x1`, ...
pub fn enumeration_ids(n: usize) -> Arc<[ElementId]> {
    (0..n).map(|i| ElementId::new(format!("x{i}"))).collect()
}

fn matrix_count(n: usize) -> u64 {
    1u64 << (n * n)
}

/// Chunk of the counter handled by one worker.
struct Partial {
    total: u64,
    matching: u64,
    samples: Vec<String>,
}

fn scan(
    spec: &EnumSpec,
    ids: &Arc<[ElementId]>,
    range: std::ops::Range<u64>,
    mut visit: impl FnMut(&Universe),
) -> Partial {
    let mut part = Partial {
        total: 0,
        matching: 0,
        samples: Vec::new(),
    };
    for code in range {
        if spec.dedupe && !is_canonical_code(spec.n, code) {
            continue;
        }
        part.total += 1;
        let u = Universe::from_matrix(ids.clone(), code);
        if spec.filter.is_none_or(|f| f.matches(&u)) {
            part.matching += 1;
            if part.samples.len() < SAMPLE_LIMIT {
                part.samples.push(print_universe(&u));
            }
            visit(&u);
        }
    }
    part
}

/// Visits every `n`-element universe (one per isomorphism class with
/// `dedupe`) that passes the filter, on the calling thread.
pub fn enumerate(spec: &EnumSpec, visit: impl FnMut(&Universe)) -> Result<EnumStats, EnumError> {
    spec.validate()?;
    let ids = enumeration_ids(spec.n);
    let part = scan(spec, &ids, 0..matrix_count(spec.n), visit);
    Ok(EnumStats {
        n: spec.n,
        filter: spec.filter,
        dedupe: spec.dedupe,
        total: part.total,
        matching: part.matching,
        sample_witnesses: part.samples,
    })
}

/// Parallel [`enumerate`]. The counter range is split into fixed chunks;
/// totals merge by addition and samples are taken in counter order, so the
/// stats are identical to the sequential run.
pub fn enumerate_par(
    spec: &EnumSpec,
    visit: impl Fn(&Universe) + Sync,
) -> Result<EnumStats, EnumError> {
    const CHUNK: u64 = 1 << 14;
    spec.validate()?;
    let ids = enumeration_ids(spec.n);
    let count = matrix_count(spec.n);
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let range = c * CHUNK..((c + 1) * CHUNK).min(count);
            scan(spec, &ids, range, &visit)
        })
        .collect();
    let mut stats = EnumStats {
        n: spec.n,
        filter: spec.filter,
        dedupe: spec.dedupe,
        total: 0,
        matching: 0,
        sample_witnesses: Vec::new(),
    };
    for p in parts {
        stats.total += p.total;
        stats.matching += p.matching;
        let room = SAMPLE_LIMIT - stats.sample_witnesses.len();
        stats
            .sample_witnesses
            .extend(p.samples.into_iter().take(room));
    }
    Ok(stats)
}

/// Packs a universe of at most [`CANONICAL_MAX_N`] elements into its
/// adjacency code.
pub fn matrix_code(u: &Universe) -> Result<u64, EnumError> {
    let n = u.len();
    if n > CANONICAL_MAX_N {
        return Err(EnumError::CapExceeded {
            n,
            cap: CANONICAL_MAX_N,
        });
    }
    let mut code = 0u64;
    for i in 0..n {
        for j in u.ext_at(i).iter() {
            code |= 1 << (i * n + j);
        }
    }
    Ok(code)
}

/// All permutations of `0..n` (Heap's algorithm).
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, a, out);
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
        }
        heap(k - 1, a, out);
    }
    let mut out = Vec::new();
    heap(n, &mut (0..n).collect(), &mut out);
    out
}

fn permuted_code(n: usize, code: u64, inv: &[usize]) -> u64 {
    let mut out = 0u64;
    for r in 0..n {
        for c in 0..n {
            if code >> (inv[r] * n + inv[c]) & 1 == 1 {
                out |= 1 << (r * n + c);
            }
        }
    }
    out
}

/// Smallest code over all relabelings of `code`.
pub fn canonical_code(n: usize, code: u64) -> u64 {
    permutations(n)
        .iter()
        .map(|inv| permuted_code(n, code, inv))
        .min()
        .unwrap_or(code)
}

/// Whether no relabeling of `code` is numerically smaller. Compares from the
/// most significant bit and stops at the first difference, which usually
/// settles a permutation after a handful of bits.
fn is_canonical_code(n: usize, code: u64) -> bool {
    thread_local! {
        static PERMS: std::cell::RefCell<(usize, Vec<Vec<usize>>)> =
            const { std::cell::RefCell::new((usize::MAX, Vec::new())) };
    }
    PERMS.with(|cell| {
        let mut cache = cell.borrow_mut();
        if cache.0 != n {
            *cache = (n, permutations(n));
        }
        cache.1.iter().all(|inv| {
            for k in (0..n * n).rev() {
                let (r, c) = (k / n, k % n);
                let mine = code >> k & 1;
                let theirs = code >> (inv[r] * n + inv[c]) & 1;
                if mine != theirs {
                    return theirs > mine;
                }
            }
            true
        })
    })
}

/// Isomorphism-invariant encoding: one byte holding `n`, then the minimal
/// adjacency code over all permutations, big-endian. Two universes get
/// equal forms exactly when they are isomorphic as unlabeled digraphs.
pub fn canonical_form(u: &Universe) -> Result<Vec<u8>, EnumError> {
    let n = u.len();
    let code = canonical_code(n, matrix_code(u)?);
    let mut out = Vec::with_capacity(9);
    out.push(n as u8);
    out.extend_from_slice(&code.to_be_bytes());
    Ok(out)
}

/// Number of elements of `V_rank` under `V_0 = ∅`, `V_{k+1} = P(V_k)`:
/// 0, 1, 2, 4, 16, ...
pub fn hf_size(rank: u32) -> u64 {
    (0..rank).fold(0u64, |size, _| 1u64 << size)
}

/// Name of the hereditarily finite set with Ackermann code `code` inside
/// `V_rank`: `h` followed by the code, zero-padded to the width of the
/// largest code so lexicographic order is numeric order.
pub fn hf_name(rank: u32, code: u64) -> ElementId {
    let width = hf_size(rank).saturating_sub(1).to_string().len();
    ElementId::new(format!("h{code:0width$}"))
}

/// The universe `V_rank` of hereditarily finite sets, with `V_0 = ∅` and
/// `V_{k+1} = P(V_k)`.
///
/// Sets are numbered by their Ackermann code (`∅ = 0`, and `x` has code
/// `Σ 2^code(y)` over its members `y`), so element `i` is a member of `j`
/// exactly when bit `i` of `j` is set. `V_r` is the code range
/// `0..hf_size(r)`. Ranks above [`HF_MAX_RANK`] are rejected.
pub fn hf_universe(rank: u32) -> Result<Universe, EnumError> {
    if rank > HF_MAX_RANK {
        return Err(EnumError::RankExceeded {
            rank,
            max: HF_MAX_RANK,
        });
    }
    let size = hf_size(rank) as usize;
    let ids: Arc<[ElementId]> = (0..size as u64).map(|c| hf_name(rank, c)).collect();
    let ext = (0..size)
        .map(|j| ElemSet::from_positions(size, (0..size).filter(|&i| (j >> i) & 1 == 1)))
        .collect();
    Ok(Universe::from_parts(ids, ext))
}
