//! Finite-model workbench for a minimal set theory with only successor and
//! predecessor axioms.
//!
//! * [`universe`]: finite membership digraphs and the `x⁺` / `x⁻⁻` lookups;
//! * [`classifier`]: lower, upper and strictly Russellian sets, links, and
//!   comprehension witnesses;
//! * [`audit`]: axiom checks, the lemma suite, chain tracing;
//! * [`enumerate`]: every universe of a given size, canonical forms,
//!   hereditarily finite universes;
//! * [`interp`]: membership induced by tagged urelements;
//! * [`dsl`]: the text format for universes and models.

mod bitset;

pub mod audit;
pub mod classifier;
pub mod dsl;
pub mod enumerate;
pub mod interp;
pub mod universe;

pub use bitset::ElemSet;
pub use universe::{ElementId, LookupResult, Universe, UniverseError};
