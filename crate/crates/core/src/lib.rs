//! A λΠ-modulo-rewriting kernel together with the encoding of functional
//! pure type systems into it: theory generation, translation, inverse
//! translation, adequacy checks, stratification and erasure analyses, and
//! theory morphisms.

pub mod analysis;
pub mod confluence;
pub mod decode;
pub mod encode;
pub mod epts;
pub mod morphism;
pub mod print;
pub mod reduce;
pub mod syntax;
pub mod term;
pub mod theory;
pub mod typing;

pub use term::{alpha_eq, Name, Term};
pub use theory::{Decl, Label, Pattern, RewriteRule, Theory};
