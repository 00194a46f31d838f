//! Framework terms and theory files.
//!
//! ```text
//! constant El [A : U] : TYPE.
//! rule [u-red] El(u) --> U.
//! assume x : El(a).
//! check x : El(a).
//! infer \y : U => y.
//! ```

use std::collections::HashSet;

use super::lexer::{lex, Cursor, Pos, Tok};
use super::SyntaxError;
use crate::print::TermPrinter;
use crate::term::{Name, Term};
use crate::theory::{Decl, Pattern, RewriteRule, Theory};

#[derive(Clone, Debug, PartialEq)]
pub enum DkItem {
    Assume(Name, Term),
    Check(Term, Term),
    Infer(Term),
}

/// A parsed theory file: the resulting theory (base included) and the
/// judgment items in order.
#[derive(Clone, Debug, PartialEq)]
pub struct DkFile {
    pub theory: Theory,
    pub items: Vec<DkItem>,
    /// Start position of each item, parallel to `items`.
    pub spans: Vec<Pos>,
}

pub(crate) struct TermParser<'a> {
    pub cur: Cursor,
    pub theory: &'a Theory,
    bound: Vec<String>,
}

impl<'a> TermParser<'a> {
    pub fn new(cur: Cursor, theory: &'a Theory) -> Self {
        TermParser { cur, theory, bound: Vec::new() }
    }

    pub fn term(&mut self) -> Result<Term, SyntaxError> {
        if self.cur.eat(&Tok::Backslash) {
            let x = self.cur.ident()?;
            self.cur.expect(&Tok::Colon)?;
            let a = self.term()?;
            self.cur.expect(&Tok::FatArrow)?;
            self.bound.push(x.clone());
            let body = self.term();
            self.bound.pop();
            return Ok(Term::lam_raw(Name::new(&x), a, body?));
        }
        if *self.cur.peek() == Tok::LParen
            && matches!(self.cur.peek_at(1), Tok::Ident(_))
            && *self.cur.peek_at(2) == Tok::Colon
        {
            self.cur.next();
            let x = self.cur.ident()?;
            self.cur.expect(&Tok::Colon)?;
            let a = self.term()?;
            self.cur.expect(&Tok::RParen)?;
            self.cur.expect(&Tok::Arrow)?;
            self.bound.push(x.clone());
            let b = self.term();
            self.bound.pop();
            return Ok(Term::pi_raw(Name::new(&x), a, b?));
        }
        let a = self.app()?;
        if self.cur.eat(&Tok::Arrow) {
            self.bound.push("_".into());
            let b = self.term();
            self.bound.pop();
            return Ok(Term::pi_raw(Name::new("_"), a, b?));
        }
        Ok(a)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.cur.peek(), Tok::Ident(_) | Tok::LParen)
    }

    fn app(&mut self) -> Result<Term, SyntaxError> {
        let mut t = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            t = Term::app(t, a);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        let pos = self.cur.pos();
        match self.cur.peek().clone() {
            Tok::LParen => {
                self.cur.next();
                let t = self.term()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(x) => {
                self.cur.next();
                if let Some(k) = self.bound.iter().rev().position(|b| *b == x) {
                    return Ok(Term::BVar(k as u32));
                }
                match x.as_str() {
                    "TYPE" => return Ok(Term::Type),
                    "KIND" => return Ok(Term::Kind),
                    _ => {}
                }
                match self.theory.arity(&x) {
                    Some(n) => {
                        let mut args = Vec::new();
                        if *self.cur.peek() == Tok::LParen && n > 0 {
                            self.cur.next();
                            loop {
                                args.push(self.term()?);
                                if !self.cur.eat(&Tok::Comma) {
                                    break;
                                }
                            }
                            self.cur.expect(&Tok::RParen)?;
                        } else if n == 0 && *self.cur.peek() == Tok::LParen && *self.cur.peek_at(1) == Tok::RParen {
                            self.cur.next();
                            self.cur.next();
                        }
                        if args.len() != n {
                            return Err(SyntaxError::new(
                                pos,
                                format!("constant {x} expects {n} argument(s), got {}", args.len()),
                            ));
                        }
                        Ok(Term::cons(x.as_str(), args))
                    }
                    None => Ok(Term::var(x.as_str())),
                }
            }
            other => Err(self.cur.error(format!("expected a term, found {}", other.describe()))),
        }
    }
}

/// Parses a single framework term over the constants of `theory`.
pub fn parse_dk_term(theory: &Theory, text: &str) -> Result<Term, SyntaxError> {
    let mut p = TermParser::new(Cursor::new(lex(text)?), theory);
    let t = p.term()?;
    if !p.cur.at_eof() {
        return Err(p.cur.error(format!("unexpected {}", p.cur.peek().describe())));
    }
    Ok(t)
}

fn to_pattern(t: &Term, pos: Pos) -> Result<Pattern, SyntaxError> {
    match t {
        Term::FVar(x) => Ok(Pattern::Var(x.clone())),
        Term::Cons(c, args) => {
            Ok(Pattern::Cons(c.clone(), args.iter().map(|a| to_pattern(a, pos)).collect::<Result<_, _>>()?))
        }
        _ => Err(SyntaxError::new(pos, format!("{t} is not a pattern"))),
    }
}

fn fresh_label(theory: &Theory) -> String {
    let taken: HashSet<&str> = theory.rules().iter().map(|r| r.name.as_str()).collect();
    let mut n = theory.rules().len() + 1;
    loop {
        let s = format!("r{n}");
        if !taken.contains(s.as_str()) {
            return s;
        }
        n += 1;
    }
}

/// Items of theory syntax recognised by `parse_items`; the sort-spec
/// parser adds its own keyword via `extra`.
pub(crate) fn parse_items(
    cur: &mut Cursor,
    theory: &mut Theory,
    mut extra: impl FnMut(&str, &mut Cursor, &Theory) -> Result<bool, SyntaxError>,
    stop: impl Fn(&Cursor) -> bool,
) -> Result<(Vec<DkItem>, Vec<Pos>), SyntaxError> {
    let mut items = Vec::new();
    let mut spans = Vec::new();
    while !cur.at_eof() && !stop(cur) {
        let pos = cur.pos();
        let kw = cur.ident()?;
        match kw.as_str() {
            "constant" => {
                let name = cur.ident()?;
                let mut tele: Vec<(Name, Term)> = Vec::new();
                if cur.eat(&Tok::LBrack) {
                    if !cur.eat(&Tok::RBrack) {
                        loop {
                            let x = cur.ident()?;
                            cur.expect(&Tok::Colon)?;
                            let a = term_with(cur, theory)?;
                            tele.push((Name::new(&x), a));
                            if cur.eat(&Tok::Semi) {
                                continue;
                            }
                            cur.expect(&Tok::RBrack)?;
                            break;
                        }
                    }
                }
                cur.expect(&Tok::Colon)?;
                let ty = term_with(cur, theory)?;
                cur.expect(&Tok::Dot)?;
                let d = Decl::new(name.as_str(), tele, ty);
                match theory.decl(&name) {
                    Some(old) if *old == d => {}
                    _ => theory.declare(d).map_err(|e| SyntaxError::new(pos, e.to_string()))?,
                }
            }
            "rule" => {
                let label = if cur.eat(&Tok::LBrack) {
                    let l = cur.ident()?;
                    cur.expect(&Tok::RBrack)?;
                    l
                } else {
                    fresh_label(theory)
                };
                let lhs_pos = cur.pos();
                let lhs = term_with(cur, theory)?;
                cur.expect(&Tok::LongArrow)?;
                let rhs = term_with(cur, theory)?;
                cur.expect(&Tok::Dot)?;
                let Pattern::Cons(head, args) = to_pattern(&lhs, lhs_pos)? else {
                    return Err(SyntaxError::new(lhs_pos, "left-hand side must be headed by a constant"));
                };
                let rule = RewriteRule::new(label.as_str(), head, args, rhs);
                if !theory.rules().contains(&rule) {
                    theory.add_rule(rule).map_err(|e| SyntaxError::new(pos, e.to_string()))?;
                }
            }
            "assume" => {
                let x = cur.ident()?;
                cur.expect(&Tok::Colon)?;
                let a = term_with(cur, theory)?;
                cur.expect(&Tok::Dot)?;
                items.push(DkItem::Assume(Name::new(&x), a));
                spans.push(pos);
            }
            "check" => {
                let m = term_with(cur, theory)?;
                cur.expect(&Tok::Colon)?;
                let a = term_with(cur, theory)?;
                cur.expect(&Tok::Dot)?;
                items.push(DkItem::Check(m, a));
                spans.push(pos);
            }
            "infer" => {
                let m = term_with(cur, theory)?;
                cur.expect(&Tok::Dot)?;
                items.push(DkItem::Infer(m));
                spans.push(pos);
            }
            other => {
                if !extra(other, cur, theory)? {
                    return Err(SyntaxError::new(pos, format!("unknown item keyword `{other}`")));
                }
            }
        }
    }
    Ok((items, spans))
}

pub(crate) fn term_with(cur: &mut Cursor, theory: &Theory) -> Result<Term, SyntaxError> {
    let toks = std::mem::replace(cur, Cursor::new(Vec::new()));
    let mut p = TermParser::new(toks, theory);
    let r = p.term();
    *cur = p.cur;
    r
}

pub fn parse_dk_file(text: &str, base: &Theory) -> Result<DkFile, SyntaxError> {
    let mut cur = Cursor::new(lex(text)?);
    let mut theory = base.clone();
    let (items, spans) = parse_items(&mut cur, &mut theory, |_, _, _| Ok(false), |_| false)?;
    Ok(DkFile { theory, items, spans })
}

/// Parses a theory file, ignoring nothing: judgment items are rejected.
pub fn parse_theory(text: &str) -> Result<Theory, SyntaxError> {
    let f = parse_dk_file(text, &Theory::new())?;
    if let Some(p) = f.spans.first() {
        return Err(SyntaxError::new(*p, "judgment item in a theory file"));
    }
    Ok(f.theory)
}

pub fn printer_for(theory: &Theory) -> TermPrinter {
    let mut reserved: Vec<String> = theory.decls().iter().map(|d| d.name.as_str().to_string()).collect();
    reserved.extend(["TYPE".to_string(), "KIND".to_string()]);
    TermPrinter::with_reserved(reserved)
}

pub fn print_dk_term(theory: &Theory, t: &Term) -> String {
    printer_for(theory).print(t)
}

pub fn print_decl(theory: &Theory, d: &Decl) -> String {
    let p = printer_for(theory);
    let mut s = format!("constant {}", d.name);
    if !d.telescope.is_empty() {
        let parts: Vec<String> = d.telescope.iter().map(|(x, a)| format!("{x} : {}", p.print(a))).collect();
        s.push_str(&format!(" [{}]", parts.join("; ")));
    }
    s.push_str(&format!(" : {}.", p.print(&d.ty)));
    s
}

pub fn print_rule(theory: &Theory, r: &RewriteRule) -> String {
    let p = printer_for(theory);
    format!("rule [{}] {} --> {}.", r.name, p.print(&r.lhs_term()), p.print(&r.rhs))
}

/// Declarations in order, each rule right after the last constant it
/// mentions (rule order preserved).
pub fn print_theory(theory: &Theory) -> String {
    print_theory_lines(theory).join("\n") + "\n"
}

pub fn print_theory_lines(theory: &Theory) -> Vec<String> {
    let mut out = Vec::new();
    let mut declared: HashSet<&str> = HashSet::new();
    let mut next_rule = 0;
    let rules = theory.rules();
    let ready = |r: &RewriteRule, declared: &HashSet<&str>| {
        declared.contains(r.head.as_str())
            && r.lhs_term().constants().iter().all(|(c, _)| declared.contains(c.as_str()))
            && r.rhs.constants().iter().all(|(c, _)| declared.contains(c.as_str()))
    };
    for d in theory.decls() {
        out.push(print_decl(theory, d));
        declared.insert(d.name.as_str());
        while next_rule < rules.len() && ready(&rules[next_rule], &declared) {
            out.push(print_rule(theory, &rules[next_rule]));
            next_rule += 1;
        }
    }
    for r in &rules[next_rule..] {
        out.push(print_rule(theory, r));
    }
    out
}

pub fn print_dk_item(theory: &Theory, item: &DkItem) -> String {
    let p = printer_for(theory);
    match item {
        DkItem::Assume(x, a) => format!("assume {x} : {}.", p.print(a)),
        DkItem::Check(m, a) => format!("check {} : {}.", p.print(m), p.print(a)),
        DkItem::Infer(m) => format!("infer {}.", p.print(m)),
    }
}

/// Items only (the theory is printed separately).
pub fn print_dk_items(theory: &Theory, items: &[DkItem]) -> String {
    items.iter().map(|i| print_dk_item(theory, i) + "\n").collect()
}

pub fn print_dk_file(f: &DkFile) -> String {
    print_theory(&f.theory) + &print_dk_items(&f.theory, &f.items)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SRC: &str = "
        constant U : TYPE.
        constant El [A : U] : TYPE.
        constant u : U.
        rule [u-red] El(u) --> U.
        constant Prod [A : U; B : El(A) -> U] : U.
        assume a : U.
        check \\x : El(a) => x : El(a) -> El(a).
        infer (x : El(a)) -> El(a).
    ";

    #[test]
    fn parses_items() {
        let f = parse_dk_file(SRC, &Theory::new()).unwrap();
        assert_eq!(f.theory.decls().len(), 4);
        assert_eq!(f.theory.rules().len(), 1);
        assert_eq!(f.items.len(), 3);
        let el_a = Term::cons("El", vec![Term::var("a")]);
        assert_eq!(
            f.items[1],
            DkItem::Check(Term::lam("x", el_a.clone(), Term::var("x")), Term::arrow(el_a.clone(), el_a))
        );
        assert_eq!(f.spans[0].line, 7);
    }

    #[test]
    fn round_trip() {
        let f = parse_dk_file(SRC, &Theory::new()).unwrap();
        let printed = print_dk_file(&f);
        let g = parse_dk_file(&printed, &Theory::new()).unwrap();
        assert_eq!((f.theory, f.items), (g.theory, g.items));
    }

    #[test]
    fn positioned_errors() {
        let e = parse_dk_file("constant U : TYPE.\nconstant c : El(U).", &Theory::new()).unwrap_err();
        assert_eq!(e.pos.line, 2);
        let e = parse_dk_file("constant U : TYPE.\nconstant E [a : U] : TYPE.\nconstant V : E(U, U).", &Theory::new()).unwrap_err();
        assert!(e.message.contains("expects 1"), "{e}");
        assert!(parse_theory("constant U : TYPE.\ncheck U : TYPE.").is_err());
    }

    #[test]
    fn redeclaration_of_base_is_tolerated() {
        let base = parse_theory("constant U : TYPE.").unwrap();
        let f = parse_dk_file("constant U : TYPE.\nconstant a : U.", &base).unwrap();
        assert_eq!(f.theory.decls().len(), 2);
    }
}
