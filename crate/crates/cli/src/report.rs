//! The single report a command produces, and its two renderings.

use std::fmt::Write as _;

use serde::Serialize;
use setlab::audit::{AxiomReport, Chain, ChainDirection, LemmaReport, Termination, Verdict};
use setlab::classifier::Classification;
use setlab::enumerate::EnumStats;
use setlab::interp::{ForsterReport, NamedCheck, QuineReport, UpperLinkCheck};
use setlab::{ElementId, LookupResult};

#[derive(Debug, Serialize)]
pub struct UpperChainReport {
    pub chain: Chain,
    pub links: Vec<UpperLinkCheck>,
    pub passed: bool,
}

/// Sections are filled in by the command that ran; absent ones are omitted
/// from JSON. Field order here is the key order of the JSON document.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classifications: Option<Vec<Classification>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub russell_witness: Option<Option<ElementId>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axioms: Option<Vec<AxiomReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemmas: Option<LemmaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chains: Option<Vec<Chain>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<EnumStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forster: Option<ForsterReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quine: Option<QuineReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_chain: Option<UpperChainReport>,
    pub exit_status: u8,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report {
            command,
            elements: None,
            classifications: None,
            russell_witness: None,
            axioms: None,
            lemmas: None,
            chains: None,
            enumeration: None,
            forster: None,
            quine: None,
            upper_chain: None,
            exit_status: 0,
        }
    }

    pub fn fail(&mut self) {
        self.exit_status = 1;
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let o = &mut out;
        if let Some(n) = self.elements {
            line(o, format!("elements: {n}"));
        }
        if let Some(cs) = &self.classifications {
            for c in cs {
                let mut tags = Vec::new();
                if c.lower {
                    tags.push("lower");
                }
                if c.upper {
                    tags.push("upper");
                }
                if c.self_membered {
                    tags.push("self-membered");
                }
                if tags.is_empty() {
                    tags.push("-");
                }
                line(o, format!("{}: {}", c.element, tags.join(", ")));
            }
        }
        if let Some(w) = &self.russell_witness {
            match w {
                Some(x) => line(o, format!("russell witness: {x}")),
                None => line(o, "russell witness: none".into()),
            }
        }
        if let Some(axioms) = &self.axioms {
            for a in axioms {
                let state = if a.satisfied {
                    "satisfied"
                } else {
                    "unsatisfied"
                };
                line(o, format!("{}: {state}", a.axiom));
                for (x, r) in &a.per_element {
                    line(o, format!("  {x} -> {}", lookup(r)));
                }
            }
        }
        if let Some(l) = &self.lemmas {
            for (tag, v) in &l.per_lemma {
                let text = match v {
                    Verdict::Holds { checked } => format!("holds ({checked} checked)"),
                    Verdict::Vacuous => "vacuous".into(),
                    Verdict::Violated { witness } => format!("VIOLATED at {witness}"),
                };
                line(o, format!("{tag}: {text}"));
            }
            line(o, format!("violations: {}", l.violations().count()));
        }
        if let Some(chains) = &self.chains {
            for c in chains {
                chain_line(o, c);
            }
        }
        if let Some(e) = &self.enumeration {
            let filter = e.filter.map_or("none".to_string(), |f| f.to_string());
            line(
                o,
                format!(
                    "size: {}  filter: {filter}  dedupe: {}  total: {}  matching: {}",
                    e.n, e.dedupe, e.total, e.matching
                ),
            );
            for (i, w) in e.sample_witnesses.iter().enumerate() {
                line(o, format!("sample {}:", i + 1));
                for l in w.lines() {
                    line(o, format!("  {l}"));
                }
            }
        }
        if let Some(f) = &self.forster {
            line(
                o,
                format!(
                    "roles: U={} M={} N={}",
                    f.roles.universal, f.roles.m, f.roles.n
                ),
            );
            for p in &f.unmet_preconditions {
                line(o, format!("unmet precondition: {p}"));
            }
            line(o, format!("entities: {}", names(&f.entities)));
            line(o, format!("untagged: {}", names(&f.untagged)));
            line(o, format!("ext(N) = {{{}}}", names(&f.extension_n)));
            line(o, format!("ext(M) = {{{}}}", names(&f.extension_m)));
            checks(o, &f.checks);
            checks(o, &f.supplementary);
            line(o, format!("passed: {}", f.passed));
        }
        if let Some(q) = &self.quine {
            for l in q.universe.lines() {
                line(o, format!("  {l}"));
            }
            line(o, format!("q in q: {}", q.q_self_membered));
            line(
                o,
                format!("predecessor of q: {}", lookup(&q.predecessor_of_q)),
            );
            line(o, format!("e in e: {}", q.e_self_membered));
            line(o, format!("passed: {}", q.passed));
        }
        if let Some(uc) = &self.upper_chain {
            chain_line(o, &uc.chain);
            for l in &uc.links {
                let mark = if l.holds() { "ok" } else { "FAIL" };
                line(
                    o,
                    format!(
                        "[{mark}] {} {}: upper={} self={} distinct={} in-previous={} predecessor-of-previous={}",
                        l.element,
                        l.index,
                        l.is_upper,
                        l.self_membered,
                        l.distinct_from_previous,
                        l.member_of_previous,
                        l.is_predecessor_of_previous
                    ),
                );
            }
            line(o, format!("passed: {}", uc.passed));
        }
        line(o, format!("exit: {}", self.exit_status));
        out
    }
}

fn line(out: &mut String, s: String) {
    let _ = writeln!(out, "{s}");
}

fn names<'a>(xs: impl IntoIterator<Item = &'a ElementId>) -> String {
    xs.into_iter()
        .map(ElementId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

fn lookup(r: &LookupResult) -> String {
    match r {
        LookupResult::Unique(x) => x.to_string(),
        LookupResult::Absent => "absent".into(),
        LookupResult::Multiple(xs) => format!("multiple [{}]", names(xs)),
    }
}

fn checks(out: &mut String, cs: &[NamedCheck]) {
    for c in cs {
        let mark = if c.holds { "ok" } else { "FAIL" };
        line(out, format!("[{mark}] {}", c.name));
    }
}

fn chain_line(out: &mut String, c: &Chain) {
    let dir = match c.direction {
        ChainDirection::Ascending => "asc",
        ChainDirection::Descending => "desc",
    };
    let end = match &c.terminated_by {
        Termination::Absent => "absent".to_string(),
        Termination::Multiple(xs) => format!("multiple [{}]", names(xs)),
        Termination::Cycle(x) => format!("cycle at {x}"),
        Termination::LengthCap => "length cap".to_string(),
    };
    line(
        out,
        format!("{dir}: {} ({end})", names(&c.nodes).replace(", ", " -> ")),
    );
    if let Some(t) = &c.tracked {
        if t.breaks.is_empty() {
            line(out, format!("  stays {}", t.property));
        } else {
            line(
                out,
                format!("  {} breaks at: {}", t.property, names(&t.breaks)),
            );
        }
    }
}
