//! Toolchain for the Boolean action language BC: a parser for a schematic
//! dialect with sorts and variables, a grounder, the translation of ground
//! action descriptions into logic programs under stable-model semantics, a
//! desk-scale stable-model enumerator, transition-system extraction, and the
//! two-stage composition of multi-agent systems (defeasibility transforms,
//! potential-conflict detection, and conflict resolution).

pub mod cli;
pub mod compose;
pub mod diag;
pub mod grounder;
pub mod manifest;
pub mod model;
pub mod parser;
pub mod randomgen;
pub mod solver;
pub mod transition;
pub mod translate;
