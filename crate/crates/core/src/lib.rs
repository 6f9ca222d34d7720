//! # lm-core
//!
//! A rewriting workbench for the ΛM-calculus: the λμ-calculus extended with
//! explicit substitution `t[x := u]`, explicit replacement
//! `c['a := s > 'b]`, and explicit renaming `c['a ~> 'b]`.
//!
//! The crate provides:
//!
//! * [`syntax`] — AST, binding discipline, α-equivalence, parsing/printing;
//! * [`meta`] — the implicit operations: substitution, replacement, renaming;
//! * [`reduction`] — the 11 rewrite rules, their plain/meaningful split,
//!   plain normal forms and the termination weight measure;
//! * [`typing`] — simple types with stack types, inference and derivations;
//! * [`equivalence`] — structural equivalence `≃σ` over plain forms, its
//!   `≃er` extension, the σ-equivalence on λμ, expansion, and the
//!   bisimulation-diagram checker;
//! * [`proofnets`] — polarized proof-nets, the translation of typing
//!   derivations, cut elimination, multiplicative normal forms and
//!   structural equivalence of nets;
//! * [`gen`] — seeded random generation of objects and equivalent pairs.

#![warn(missing_docs)]

pub mod gen;
pub mod equivalence;
pub mod meta;
pub mod proofnets;
pub mod reduction;
pub mod syntax;
pub mod typing;

pub use syntax::{alpha_equal, analyze, parse, render, Command, Ident, NameId, Object, Sort, Stack, Term};
