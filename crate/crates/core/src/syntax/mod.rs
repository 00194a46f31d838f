//! Surface syntax for theory, source-term, sort-spec and morphism files.

mod dk;
mod epts;
mod lexer;
mod morphism;
mod sortspec;

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub use dk::{
    parse_dk_file, parse_dk_term, parse_theory, print_decl, print_dk_file, print_dk_item, print_dk_items,
    print_dk_term, print_rule, print_theory, print_theory_lines, printer_for, DkFile, DkItem,
};
pub use epts::{
    parse_epts_file, parse_epts_term, parse_pts_term, parse_source_term, print_epts_file, EptsFile, EptsItem, Macros,
    SourceTerm,
};
pub use lexer::{is_identifier, Pos};
pub use morphism::{parse_morphism, print_morphism};
pub use sortspec::{parse_sort_spec, print_sort_spec};

use crate::epts::SortSpec;
use crate::morphism::TheoryMorphism;
use crate::theory::Theory;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        SyntaxError { pos, message: message.into() }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceKind {
    Theory,
    Epts,
    SortSpec,
    Morphism,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Theory(DkFile),
    Epts(EptsFile),
    SortSpec(SortSpec),
    Morphism(TheoryMorphism),
}

/// A parsed input file with item positions for diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceFile {
    pub path: PathBuf,
    pub kind: SourceKind,
    pub payload: Payload,
    pub spans: Vec<Pos>,
}

impl SourceFile {
    pub fn theory(path: impl Into<PathBuf>, text: &str, base: &Theory) -> Result<Self, SyntaxError> {
        let f = parse_dk_file(text, base)?;
        let spans = f.spans.clone();
        Ok(SourceFile { path: path.into(), kind: SourceKind::Theory, payload: Payload::Theory(f), spans })
    }

    pub fn epts(path: impl Into<PathBuf>, text: &str, spec: &SortSpec) -> Result<Self, SyntaxError> {
        let f = parse_epts_file(text, spec)?;
        let spans = f.spans.clone();
        Ok(SourceFile { path: path.into(), kind: SourceKind::Epts, payload: Payload::Epts(f), spans })
    }

    pub fn sort_spec(path: impl Into<PathBuf>, text: &str) -> Result<Self, SyntaxError> {
        let s = parse_sort_spec(text)?;
        Ok(SourceFile { path: path.into(), kind: SourceKind::SortSpec, payload: Payload::SortSpec(s), spans: Vec::new() })
    }

    pub fn morphism(path: impl Into<PathBuf>, text: &str, source: &Theory, target: &Theory) -> Result<Self, SyntaxError> {
        let (m, spans) = parse_morphism(text, source, target)?;
        Ok(SourceFile { path: path.into(), kind: SourceKind::Morphism, payload: Payload::Morphism(m), spans })
    }

    /// Pretty-prints the payload in the syntax it was parsed from.
    pub fn print(&self) -> String {
        match &self.payload {
            Payload::Theory(f) => print_dk_file(f),
            Payload::Epts(f) => print_epts_file(f),
            Payload::SortSpec(s) => print_sort_spec(s),
            Payload::Morphism(m) => print_morphism(m),
        }
    }
}
