//! Generalized Kripke semantics for first-order logic over arbitrary
//! truth-functional connectives.
//!
//! The crate covers truth-function classification ([`truthfun`]), first-order
//! syntax ([`syntax`]), finite Kripke models and their evaluation
//! ([`semantics`]), bounded validity search ([`search`]), the tree
//! unraveling and constant-domain completion of finite models ([`construct`]),
//! and the synthesis of sequents that are valid over constant-domain models
//! but refuted by a growing-domain one ([`synthesize`]).

pub mod construct;
pub mod search;
pub mod semantics;
pub mod synthesize;
pub mod syntax;
pub mod truthfun;

pub use syntax::{Connective, Formula, Sequent, Signature, Var};
pub use truthfun::{TruthFunction, TruthVector};
