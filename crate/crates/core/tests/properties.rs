use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use setlab::audit::{trace_chain, verify_lemma_suite, ChainDirection, Termination};
use setlab::classifier::{
    comprehension_witness, is_lower_at, is_upper_at, russell_witness, NamedPredicate,
};
use setlab::dsl::{parse_universe, print_universe};
use setlab::enumerate::{canonical_form, enumerate, hf_universe, EnumSpec};
use setlab::interp::{forster_indexes, BaseModel, Index};
use setlab::{ElementId, LookupResult, Universe};

/// A universe over `e0..e{n-1}` from a list of (member, set) pairs.
fn build(n: usize, edges: &[(usize, usize)]) -> Universe {
    let mut ext: Vec<Vec<ElementId>> = vec![Vec::new(); n];
    for &(x, y) in edges {
        ext[y % n].push(ElementId::new(format!("e{}", x % n)));
    }
    Universe::from_definitions(
        ext.into_iter()
            .enumerate()
            .map(|(i, ms)| (ElementId::new(format!("e{i}")), ms)),
    )
    .unwrap()
}

fn arb_universe() -> impl Strategy<Value = Universe> {
    (1usize..=6).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=n * n).prop_map(move |edges| build(n, &edges))
    })
}

fn ext_names(u: &Universe, x: usize) -> BTreeSet<usize> {
    u.ext_at(x).iter().collect()
}

proptest! {
    #[test]
    fn successor_lookup_matches_target(u in arb_universe()) {
        for x in 0..u.len() {
            if let LookupResult::Unique(y) = u.successor_at(x) {
                let mut want = ext_names(&u, x);
                want.insert(x);
                prop_assert_eq!(ext_names(&u, y), want);
            }
        }
    }

    #[test]
    fn predecessor_never_contains_its_source(u in arb_universe()) {
        for x in 0..u.len() {
            if let LookupResult::Unique(y) = u.predecessor_at(x) {
                prop_assert!(!u.member_at(x, y));
            }
        }
    }

    #[test]
    fn multiple_lookups_are_sorted_and_distinct(u in arb_universe()) {
        for x in 0..u.len() {
            for r in [u.successor_at(x), u.predecessor_at(x)] {
                if let LookupResult::Multiple(ys) = r {
                    prop_assert!(ys.len() >= 2);
                    prop_assert!(ys.windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
    }

    #[test]
    fn degeneracy(u in arb_universe()) {
        for x in 0..u.len() {
            let selfm = u.self_membered_at(x);
            prop_assert_eq!(u.successor_target(x) == *u.ext_at(x), selfm);
            prop_assert_eq!(u.predecessor_target(x) == *u.ext_at(x), !selfm);
            let sd = u.sym_diff_singleton_at(x);
            if selfm {
                prop_assert_eq!(sd, u.predecessor_target(x));
            } else {
                prop_assert_eq!(sd, u.successor_target(x));
            }
        }
    }

    #[test]
    fn coextensive_is_an_equivalence(u in arb_universe()) {
        let n = u.len();
        for x in 0..n {
            prop_assert!(u.coextensive_at(x, x));
            for y in 0..n {
                prop_assert_eq!(u.coextensive_at(x, y), u.coextensive_at(y, x));
                for z in 0..n {
                    if u.coextensive_at(x, y) && u.coextensive_at(y, z) {
                        prop_assert!(u.coextensive_at(x, z));
                    }
                }
            }
        }
    }

    #[test]
    fn classifier_laws(u in arb_universe()) {
        for x in 0..u.len() {
            let (lo, up) = (is_lower_at(&u, x), is_upper_at(&u, x));
            prop_assert!(!(lo && up));
            if lo { prop_assert!(!u.self_membered_at(x)); }
            if up { prop_assert!(u.self_membered_at(x)); }
        }
    }

    #[test]
    fn russell_and_comprehension_agree(u in arb_universe()) {
        let r = russell_witness(&u);
        prop_assert_eq!(&r, &comprehension_witness(&u, &NamedPredicate::NonSelf));
        let strictly = (0..u.len()).any(|x| is_lower_at(&u, x) && is_upper_at(&u, x));
        prop_assert_eq!(r.is_some(), strictly);
        prop_assert!(r.is_none());
    }

    #[test]
    fn lemma_suite_never_violated(u in arb_universe()) {
        let report = verify_lemma_suite(&u);
        prop_assert!(!report.has_violation(), "{:?}", report);
    }

    #[test]
    fn stoppage_and_nondegenerate_successor(u in arb_universe()) {
        for x in 0..u.len() {
            if let LookupResult::Unique(s) = u.successor_at(x) {
                if is_lower_at(&u, x) {
                    prop_assert_eq!(u.ext_at(s), &u.sym_diff_singleton_at(x));
                }
            }
            if let LookupResult::Unique(p) = u.predecessor_at(x) {
                if !u.self_membered_at(x) {
                    prop_assert!(u.coextensive_at(p, x));
                }
            }
        }
    }

    #[test]
    fn ascending_chains_from_lowers_grow(u in arb_universe(), cap in 1usize..8) {
        for x in 0..u.len() {
            if !is_lower_at(&u, x) { continue; }
            let chain = trace_chain(&u, u.id(x), ChainDirection::Ascending, cap).unwrap();
            prop_assert!(!matches!(chain.terminated_by, Termination::Cycle(_)));
            prop_assert!(chain.tracked.as_ref().unwrap().breaks.is_empty());
            let sizes: Vec<usize> = chain
                .nodes
                .iter()
                .map(|n| u.ext_at(u.position(n).unwrap()).len())
                .collect();
            prop_assert!(sizes.windows(2).all(|w| w[1] == w[0] + 1));
        }
    }

    #[test]
    fn canonical_form_is_relabeling_invariant(
        u in arb_universe(),
        seed in proptest::collection::vec(any::<u32>(), 6),
    ) {
        // Rename e_i to a shuffled set of fresh names.
        let n = u.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (seed[i], i));
        let rename = |i: usize| ElementId::new(format!("r{}", order[i]));
        let relabeled = Universe::from_definitions((0..n).map(|i| {
            (rename(i), u.ext_at(i).iter().map(rename).collect::<Vec<_>>())
        }))
        .unwrap();
        prop_assert_eq!(canonical_form(&u).unwrap(), canonical_form(&relabeled).unwrap());
    }

    #[test]
    fn dsl_round_trip(u in arb_universe()) {
        let text = print_universe(&u);
        let back = parse_universe(text.as_bytes()).unwrap().universe();
        prop_assert_eq!(&back, &u);
        prop_assert_eq!(canonical_form(&back).unwrap(), canonical_form(&u).unwrap());
    }
}

/// Brute-force isomorphism test, independent of the canonical code.
fn isomorphic(a: &Universe, b: &Universe) -> bool {
    fn go(a: &Universe, b: &Universe, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = map.len();
        if i == a.len() {
            return (0..a.len())
                .all(|x| (0..a.len()).all(|y| a.member_at(x, y) == b.member_at(map[x], map[y])));
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                map.push(j);
                if go(a, b, map, used) {
                    return true;
                }
                map.pop();
                used[j] = false;
            }
        }
        false
    }
    a.len() == b.len() && go(a, b, &mut Vec::new(), &mut vec![false; b.len()])
}

#[test]
fn canonical_form_separates_isomorphism_classes_n3() {
    let mut all = Vec::new();
    enumerate(&EnumSpec::new(3), |u| all.push(u.clone())).unwrap();
    let forms: Vec<Vec<u8>> = all.iter().map(|u| canonical_form(u).unwrap()).collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            assert_eq!(
                forms[i] == forms[j],
                isomorphic(&all[i], &all[j]),
                "{:?} vs {:?}",
                all[i],
                all[j]
            );
        }
    }
}

#[test]
fn hf_rank3_ascending_chain() {
    let v3 = hf_universe(3).unwrap();
    let c = trace_chain(&v3, &ElementId::from("h0"), ChainDirection::Ascending, 16).unwrap();
    let names: Vec<&str> = c.nodes.iter().map(|n| n.as_str()).collect();
    // ∅, {∅}, {∅, {∅}}
    assert_eq!(names, vec!["h0", "h1", "h3"]);
    assert_eq!(c.terminated_by, Termination::Absent);
}

// ---- retagging ----------------------------------------------------------

const POOL: [&str; 5] = ["M", "N", "P", "Q", "R"];

fn candidate_indexes() -> Vec<Index> {
    let (m, n, p) = (
        ElementId::from("M"),
        ElementId::from("N"),
        ElementId::from("P"),
    );
    let (idx_n, idx_m) = forster_indexes(&m, &n);
    vec![
        idx_n,
        idx_m,
        Index::universal(),
        Index::listing([]),
        Index::listing([&p]),
        Index::complement_of([&p]),
    ]
}

/// The four simultaneous assignments of the swap, applied literally. `None`
/// when two of them disagree on the same index.
fn literal_swap(before: &BTreeMap<Index, ElementId>) -> Option<BTreeMap<Index, ElementId>> {
    let (m, n) = (ElementId::from("M"), ElementId::from("N"));
    let (idx_n, idx_m) = forster_indexes(&m, &n);
    let inverse = |u: &ElementId| before.iter().find(|(_, v)| *v == u).map(|(k, _)| k.clone());
    let mut assigned: BTreeMap<Index, Option<ElementId>> = BTreeMap::new();
    let mut set = |k: Index, v: Option<ElementId>| -> bool {
        match assigned.get(&k) {
            Some(prev) if *prev != v => false,
            _ => {
                assigned.insert(k, v);
                true
            }
        }
    };
    let mut ok = set(idx_n.clone(), Some(n.clone())) && set(idx_m.clone(), Some(m.clone()));
    if let Some(k) = inverse(&n) {
        ok &= set(k, before.get(&idx_n).cloned());
    }
    if let Some(k) = inverse(&m) {
        ok &= set(k, before.get(&idx_m).cloned());
    }
    if !ok {
        return None;
    }
    let mut out: BTreeMap<Index, ElementId> = before
        .iter()
        .filter(|(k, _)| !assigned.contains_key(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    out.extend(assigned.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))));
    Some(out)
}

proptest! {
    #[test]
    fn swap_keeps_tagging_bijective(choice in proptest::collection::vec(proptest::option::of(0usize..5), 6)) {
        let indexes = candidate_indexes();
        let mut used = BTreeSet::new();
        let mut tags = Vec::new();
        for (idx, pick) in indexes.iter().zip(&choice) {
            if let Some(p) = pick {
                if used.insert(*p) {
                    tags.push((idx.clone(), ElementId::from(POOL[*p])));
                }
            }
        }
        let model = BaseModel::new(
            hf_universe(1).unwrap(),
            POOL.iter().map(|p| ElementId::from(*p)),
            tags,
        ).unwrap();
        let swapped = model.upsilon_swap(&"M".into(), &"N".into()).unwrap();

        // Bijective: each urelement holds at most one index and vice versa.
        let holders: Vec<&ElementId> = swapped.tagging().values().collect();
        let distinct: BTreeSet<&ElementId> = holders.iter().copied().collect();
        prop_assert_eq!(holders.len(), distinct.len());
        for (idx, u) in swapped.tagging() {
            prop_assert_eq!(swapped.index_of(u), Some(idx));
        }
        let (idx_n, idx_m) = forster_indexes(&"M".into(), &"N".into());
        prop_assert_eq!(swapped.urelement_for(&idx_n), Some(&ElementId::from("N")));
        prop_assert_eq!(swapped.urelement_for(&idx_m), Some(&ElementId::from("M")));

        if let Some(expected) = literal_swap(model.tagging()) {
            prop_assert_eq!(swapped.tagging(), &expected);
        }
    }
}
