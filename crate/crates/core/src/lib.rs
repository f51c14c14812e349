//! Two-way Parikh automata toolkit: the automaton model with exhaustive
//! simulation oracles, a Presburger arithmetic engine with Cooper quantifier
//! elimination, crossing-section conversions to one-way automata,
//! Parikh-image formulas, and end-to-end decision procedures for emptiness,
//! membership, universality, inclusion and equivalence.

pub mod automaton;
pub mod crossing;
pub mod decide;
pub mod parikh;
pub mod format;
pub mod presburger;
