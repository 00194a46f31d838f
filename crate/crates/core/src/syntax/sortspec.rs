//! Sort specification files.
//!
//! ```text
//! [sorts]
//! Type, Kind
//! [axioms]
//! (Type, Kind)
//! [rules]
//! (Type, Type, Type)
//! (Kind, Type, Type)
//! ```
//! or, for internalized sorts, theory items over `Sort`, `Ax`, `Rl` plus
//! named sorts:
//! ```text
//! [internalized]
//! constant z : Sort.
//! constant s [n : Sort] : Sort.
//! rule [ax] Ax(x) --> s(x).
//! sort 0 := z.
//! ```

use super::dk::{parse_items, print_decl, print_dk_term, print_rule, term_with};
use super::lexer::{lex, Cursor, Pos, Tok};
use super::SyntaxError;
use crate::epts::{sort_base_theory, FiniteSpec, InternalizedSpec, Sort, SortSpec};
use crate::term::Term;
use crate::theory::Theory;

#[derive(PartialEq)]
enum Section {
    Sorts,
    Axioms,
    Rules,
    Internalized,
}

fn section_header(cur: &Cursor) -> Option<Section> {
    if *cur.peek() != Tok::LBrack || *cur.peek_at(2) != Tok::RBrack {
        return None;
    }
    match cur.peek_at(1) {
        Tok::Ident(s) => match s.as_str() {
            "sorts" => Some(Section::Sorts),
            "axioms" => Some(Section::Axioms),
            "rules" => Some(Section::Rules),
            "internalized" => Some(Section::Internalized),
            _ => None,
        },
        _ => None,
    }
}

fn tuple(cur: &mut Cursor, n: usize) -> Result<Vec<Sort>, SyntaxError> {
    cur.expect(&Tok::LParen)?;
    let mut out = Vec::new();
    for i in 0..n {
        if i > 0 {
            cur.expect(&Tok::Comma)?;
        }
        out.push(Sort::new(&cur.ident()?));
    }
    cur.expect(&Tok::RParen)?;
    Ok(out)
}

pub fn parse_sort_spec(text: &str) -> Result<SortSpec, SyntaxError> {
    let mut cur = Cursor::new(lex(text)?);
    let mut sorts = Vec::new();
    let mut axioms = Vec::new();
    let mut rules = Vec::new();
    let mut internal: Option<(Theory, Vec<(Sort, Term)>, Pos)> = None;
    let start = cur.pos();
    while !cur.at_eof() {
        let pos = cur.pos();
        let Some(sec) = section_header(&cur) else {
            return Err(cur.error("expected a section header such as [sorts]"));
        };
        for _ in 0..3 {
            cur.next();
        }
        match sec {
            Section::Sorts => {
                while let Tok::Ident(_) = cur.peek() {
                    sorts.push(Sort::new(&cur.ident()?));
                    if !cur.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            Section::Axioms => {
                while *cur.peek() == Tok::LParen {
                    let t = tuple(&mut cur, 2)?;
                    axioms.push((t[0].clone(), t[1].clone()));
                }
            }
            Section::Rules => {
                while *cur.peek() == Tok::LParen {
                    let t = tuple(&mut cur, 3)?;
                    rules.push((t[0].clone(), t[1].clone(), t[2].clone()));
                }
            }
            Section::Internalized => {
                let mut theory = sort_base_theory();
                let mut names = Vec::new();
                parse_items(
                    &mut cur,
                    &mut theory,
                    |kw, cur, th| {
                        if kw != "sort" {
                            return Ok(false);
                        }
                        let n = cur.ident()?;
                        cur.expect(&Tok::Define)?;
                        let t = term_with(cur, th)?;
                        cur.expect(&Tok::Dot)?;
                        names.push((Sort::new(&n), t));
                        Ok(true)
                    },
                    |c| section_header(c).is_some(),
                )?;
                internal = Some((theory, names, pos));
            }
        }
    }
    match internal {
        Some((theory, names, pos)) => {
            if !sorts.is_empty() || !axioms.is_empty() || !rules.is_empty() {
                return Err(SyntaxError::new(pos, "[internalized] cannot be combined with finite sections"));
            }
            let base = sort_base_theory().decls().len();
            let decls = theory.decls()[base..].to_vec();
            let rules = theory.rules().to_vec();
            let spec = InternalizedSpec::new(decls, rules, names).map_err(|e| SyntaxError::new(pos, e.to_string()))?;
            Ok(SortSpec::Internalized(spec))
        }
        None => {
            let spec = FiniteSpec::new(sorts, axioms, rules).map_err(|e| SyntaxError::new(start, e.to_string()))?;
            Ok(SortSpec::Finite(spec))
        }
    }
}

pub fn print_sort_spec(spec: &SortSpec) -> String {
    let mut out = String::new();
    match spec {
        SortSpec::Finite(f) => {
            out.push_str("[sorts]\n");
            out.push_str(&f.sorts().iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", "));
            out.push_str("\n[axioms]\n");
            for (a, b) in f.axioms() {
                out.push_str(&format!("({a}, {b})\n"));
            }
            out.push_str("[rules]\n");
            for (a, b, c) in f.rules() {
                out.push_str(&format!("({a}, {b}, {c})\n"));
            }
        }
        SortSpec::Internalized(i) => {
            let th = i.sort_theory();
            out.push_str("[internalized]\n");
            for d in i.user_decls() {
                out.push_str(&print_decl(th, d));
                out.push('\n');
            }
            for r in i.user_rules() {
                out.push_str(&print_rule(th, r));
                out.push('\n');
            }
            for (s, t) in i.names() {
                out.push_str(&format!("sort {s} := {}.\n", print_dk_term(th, t)));
            }
        }
    }
    out
}
