//! Source-system terms and files.
//!
//! Explicit forms carry their sort pair:
//! ```text
//! Pi[s1,s2](A, x. B)
//! lam[s1,s2](A, x. B, x. M)
//! app[s1,s2](A, x. B, M, N)
//! #Type
//! ```
//! Implicit forms (`\x : A => M`, `(x : A) -> B`, `A -> B`, `M N`) are
//! elaborated against the sort specification. Items:
//! ```text
//! assume A : #Type.
//! def id : Pi[..](..) := lam[..](..).
//! let T := (x : #Type) -> x.
//! ```
//! `let` names are macros expanded at parse time, and every `def` name is
//! usable as a macro in later items.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use super::lexer::{is_identifier, lex, Cursor, Pos, Tok};
use super::SyntaxError;
use crate::epts::{elaborate, erase_to_pts, Binder, EptsContext, EptsTerm, PtsTerm, Sort, SortSpec};
use crate::term::{fresh_name, Name};

#[derive(Clone, Debug)]
enum Surf {
    Var(String),
    Sort(String),
    EPi(String, String, Box<Surf>, String, Box<Surf>),
    ELam(String, String, Box<Surf>, String, Box<Surf>, String, Box<Surf>),
    EApp(String, String, Box<Surf>, String, Box<Surf>, Box<Surf>, Box<Surf>),
    IPi(String, Box<Surf>, Box<Surf>),
    ILam(String, Box<Surf>, Box<Surf>),
    IApp(Box<Surf>, Box<Surf>),
}

impl Surf {
    fn has_explicit(&self) -> bool {
        match self {
            Surf::Var(_) | Surf::Sort(_) => false,
            Surf::EPi(..) | Surf::ELam(..) | Surf::EApp(..) => true,
            Surf::IPi(_, a, b) | Surf::ILam(_, a, b) | Surf::IApp(a, b) => a.has_explicit() || b.has_explicit(),
        }
    }

    fn has_implicit(&self) -> bool {
        match self {
            Surf::Var(_) | Surf::Sort(_) => false,
            Surf::IPi(..) | Surf::ILam(..) | Surf::IApp(..) => true,
            Surf::EPi(_, _, a, _, b) => a.has_implicit() || b.has_implicit(),
            Surf::ELam(_, _, a, _, b, _, m) => a.has_implicit() || b.has_implicit() || m.has_implicit(),
            Surf::EApp(_, _, a, _, b, m, n) => {
                a.has_implicit() || b.has_implicit() || m.has_implicit() || n.has_implicit()
            }
        }
    }
}

struct SurfParser<'a> {
    cur: &'a mut Cursor,
}

impl SurfParser<'_> {
    fn sort_name(&mut self) -> Result<String, SyntaxError> {
        match self.cur.peek().clone() {
            Tok::Ident(s) | Tok::Braced(s) => {
                self.cur.next();
                Ok(s)
            }
            other => Err(self.cur.error(format!("expected a sort, found {}", other.describe()))),
        }
    }

    fn sort_pair(&mut self) -> Result<(String, String), SyntaxError> {
        self.cur.expect(&Tok::LBrack)?;
        let a = self.sort_name()?;
        self.cur.expect(&Tok::Comma)?;
        let b = self.sort_name()?;
        self.cur.expect(&Tok::RBrack)?;
        Ok((a, b))
    }

    fn binder(&mut self) -> Result<(String, Surf), SyntaxError> {
        let x = self.cur.ident()?;
        self.cur.expect(&Tok::Dot)?;
        Ok((x, self.term()?))
    }

    fn term(&mut self) -> Result<Surf, SyntaxError> {
        if self.cur.eat(&Tok::Backslash) {
            let x = self.cur.ident()?;
            self.cur.expect(&Tok::Colon)?;
            let a = self.term()?;
            self.cur.expect(&Tok::FatArrow)?;
            let m = self.term()?;
            return Ok(Surf::ILam(x, Box::new(a), Box::new(m)));
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
            let b = self.term()?;
            return Ok(Surf::IPi(x, Box::new(a), Box::new(b)));
        }
        let a = self.app()?;
        if self.cur.eat(&Tok::Arrow) {
            let b = self.term()?;
            return Ok(Surf::IPi("_".into(), Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.cur.peek(), Tok::Ident(_) | Tok::LParen | Tok::Hash)
    }

    fn app(&mut self) -> Result<Surf, SyntaxError> {
        let mut t = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            t = Surf::IApp(Box::new(t), Box::new(a));
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Surf, SyntaxError> {
        match self.cur.peek().clone() {
            Tok::Hash => {
                self.cur.next();
                Ok(Surf::Sort(self.sort_name()?))
            }
            Tok::LParen => {
                self.cur.next();
                let t = self.term()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(x) if matches!(x.as_str(), "Pi" | "lam" | "app") && *self.cur.peek_at(1) == Tok::LBrack => {
                self.cur.next();
                let (s1, s2) = self.sort_pair()?;
                self.cur.expect(&Tok::LParen)?;
                let a = self.term()?;
                self.cur.expect(&Tok::Comma)?;
                let (x1, b) = self.binder()?;
                let t = match x.as_str() {
                    "Pi" => Surf::EPi(s1, s2, Box::new(a), x1, Box::new(b)),
                    "lam" => {
                        self.cur.expect(&Tok::Comma)?;
                        let (x2, m) = self.binder()?;
                        Surf::ELam(s1, s2, Box::new(a), x1, Box::new(b), x2, Box::new(m))
                    }
                    _ => {
                        self.cur.expect(&Tok::Comma)?;
                        let m = self.term()?;
                        self.cur.expect(&Tok::Comma)?;
                        let n = self.term()?;
                        Surf::EApp(s1, s2, Box::new(a), x1, Box::new(b), Box::new(m), Box::new(n))
                    }
                };
                self.cur.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(x) => {
                self.cur.next();
                Ok(Surf::Var(x))
            }
            other => Err(self.cur.error(format!("expected a term, found {}", other.describe()))),
        }
    }
}

/// Parse-time definitions, substituted for their names.
#[derive(Clone, Debug, Default)]
pub struct Macros {
    defs: HashMap<String, EptsTerm>,
}

impl Macros {
    pub fn insert(&mut self, name: &str, t: EptsTerm) {
        self.defs.insert(name.to_string(), t);
    }
}

struct Resolver<'a> {
    macros: &'a Macros,
    env: Vec<String>,
}

impl Resolver<'_> {
    fn var(&self, x: &str) -> Result<EptsTerm, String> {
        if let Some(k) = self.env.iter().rev().position(|b| b == x) {
            return Ok(EptsTerm::BVar(k as u32));
        }
        Ok(match self.macros.defs.get(x) {
            Some(t) => t.clone(),
            None => EptsTerm::FVar(Name::new(x)),
        })
    }

    fn under<T>(&mut self, x: &str, f: impl FnOnce(&mut Self) -> Result<T, String>) -> Result<T, String> {
        self.env.push(x.to_string());
        let r = f(self);
        self.env.pop();
        r
    }

    fn explicit(&mut self, s: &Surf) -> Result<EptsTerm, String> {
        let bind = |r: &mut Self, x: &str, b: &Surf| -> Result<Binder, String> {
            Ok(Binder::raw(Name::new(x), r.under(x, |r| r.explicit(b))?))
        };
        Ok(match s {
            Surf::Var(x) => self.var(x)?,
            Surf::Sort(s) => EptsTerm::Sort(Sort::new(s)),
            Surf::EPi(s1, s2, a, x, b) => EptsTerm::Pi {
                s1: Sort::new(s1),
                s2: Sort::new(s2),
                dom: Arc::new(self.explicit(a)?),
                cod: bind(self, x, b)?,
            },
            Surf::ELam(s1, s2, a, x, b, y, m) => EptsTerm::Lam {
                s1: Sort::new(s1),
                s2: Sort::new(s2),
                dom: Arc::new(self.explicit(a)?),
                cod: bind(self, x, b)?,
                body: bind(self, y, m)?,
            },
            Surf::EApp(s1, s2, a, x, b, m, n) => EptsTerm::App {
                s1: Sort::new(s1),
                s2: Sort::new(s2),
                dom: Arc::new(self.explicit(a)?),
                cod: bind(self, x, b)?,
                fun: Arc::new(self.explicit(m)?),
                arg: Arc::new(self.explicit(n)?),
            },
            _ => return Err("implicit syntax inside an explicit term".into()),
        })
    }

    fn implicit(&mut self, s: &Surf) -> Result<PtsTerm, String> {
        Ok(match s {
            Surf::Var(x) => match self.var(x)? {
                EptsTerm::BVar(i) => PtsTerm::BVar(i),
                EptsTerm::FVar(n) => PtsTerm::FVar(n),
                t => erase_to_pts(&t),
            },
            Surf::Sort(s) => PtsTerm::Sort(Sort::new(s)),
            Surf::IPi(x, a, b) => {
                let a = self.implicit(a)?;
                let b = self.under(x, |r| r.implicit(b))?;
                PtsTerm::Pi(Name::new(x), Arc::new(a), Arc::new(b))
            }
            Surf::ILam(x, a, m) => {
                let a = self.implicit(a)?;
                let m = self.under(x, |r| r.implicit(m))?;
                PtsTerm::Lam(Name::new(x), Arc::new(a), Arc::new(m))
            }
            Surf::IApp(f, a) => PtsTerm::App(Arc::new(self.implicit(f)?), Arc::new(self.implicit(a)?)),
            _ => return Err("explicit syntax inside an implicit term".into()),
        })
    }
}

/// A source term as written: explicit, or implicit pending elaboration.
pub enum SourceTerm {
    Explicit(EptsTerm),
    Implicit(PtsTerm),
}

fn resolve(s: &Surf, macros: &Macros) -> Result<SourceTerm, String> {
    let mut r = Resolver { macros, env: Vec::new() };
    if s.has_implicit() && s.has_explicit() {
        return Err("term mixes explicit and implicit syntax".into());
    }
    if s.has_implicit() {
        Ok(SourceTerm::Implicit(r.implicit(s)?))
    } else {
        Ok(SourceTerm::Explicit(r.explicit(s)?))
    }
}

pub fn parse_source_term(text: &str, macros: &Macros) -> Result<SourceTerm, SyntaxError> {
    let mut cur = Cursor::new(lex(text)?);
    let pos = cur.pos();
    let s = SurfParser { cur: &mut cur }.term()?;
    if !cur.at_eof() {
        return Err(cur.error(format!("unexpected {}", cur.peek().describe())));
    }
    resolve(&s, macros).map_err(|m| SyntaxError::new(pos, m))
}

/// Parses an explicit term; implicit syntax is rejected.
pub fn parse_epts_term(text: &str) -> Result<EptsTerm, SyntaxError> {
    match parse_source_term(text, &Macros::default())? {
        SourceTerm::Explicit(t) => Ok(t),
        SourceTerm::Implicit(_) => Err(SyntaxError::new(Pos { line: 1, col: 1 }, "expected explicit syntax")),
    }
}

pub fn parse_pts_term(text: &str) -> Result<PtsTerm, SyntaxError> {
    match parse_source_term(text, &Macros::default())? {
        SourceTerm::Implicit(t) => Ok(t),
        SourceTerm::Explicit(t) => Ok(erase_to_pts(&t)),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EptsItem {
    Assume(Name, EptsTerm),
    /// A judgment `body : ty`; without `ty` the type is inferred.
    Def { name: Name, ty: Option<EptsTerm>, body: EptsTerm },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EptsFile {
    pub items: Vec<EptsItem>,
    pub spans: Vec<Pos>,
}

impl EptsFile {
    /// Assumptions preceding item `i`.
    pub fn context_before(&self, i: usize) -> EptsContext {
        let mut ctx = EptsContext::new();
        for it in &self.items[..i] {
            if let EptsItem::Assume(x, a) = it {
                ctx.push(x.clone(), a.clone());
            }
        }
        ctx
    }

    /// `(context, name, body, declared type)` for each definition.
    pub fn judgments(&self) -> Vec<(EptsContext, Name, EptsTerm, Option<EptsTerm>)> {
        let mut out = Vec::new();
        for (i, it) in self.items.iter().enumerate() {
            if let EptsItem::Def { name, ty, body } = it {
                out.push((self.context_before(i), name.clone(), body.clone(), ty.clone()));
            }
        }
        out
    }

    pub fn context(&self) -> EptsContext {
        self.context_before(self.items.len())
    }
}

pub fn parse_epts_file(text: &str, spec: &SortSpec) -> Result<EptsFile, SyntaxError> {
    let mut cur = Cursor::new(lex(text)?);
    let mut macros = Macros::default();
    let mut items = Vec::new();
    let mut spans = Vec::new();
    let mut ctx = EptsContext::new();
    while !cur.at_eof() {
        let pos = cur.pos();
        let kw = cur.ident()?;
        let err = |m: String| SyntaxError::new(pos, m);
        match kw.as_str() {
            "assume" => {
                let x = cur.ident()?;
                cur.expect(&Tok::Colon)?;
                let a = SurfParser { cur: &mut cur }.term()?;
                cur.expect(&Tok::Dot)?;
                let a = match resolve(&a, &macros).map_err(err)? {
                    SourceTerm::Explicit(t) => t,
                    SourceTerm::Implicit(p) => elaborate(spec, &ctx, &p, None).map_err(|e| err(e.to_string()))?,
                };
                ctx.push(x.as_str(), a.clone());
                items.push(EptsItem::Assume(Name::new(&x), a));
                spans.push(pos);
            }
            "def" | "let" => {
                let name = cur.ident()?;
                let ty = if cur.eat(&Tok::Colon) { Some(SurfParser { cur: &mut cur }.term()?) } else { None };
                cur.expect(&Tok::Define)?;
                let body = SurfParser { cur: &mut cur }.term()?;
                cur.expect(&Tok::Dot)?;
                let ty = match ty.map(|t| resolve(&t, &macros)).transpose().map_err(err)? {
                    None => None,
                    Some(SourceTerm::Explicit(t)) => Some(t),
                    Some(SourceTerm::Implicit(p)) => {
                        Some(elaborate(spec, &ctx, &p, None).map_err(|e| err(e.to_string()))?)
                    }
                };
                let body = match resolve(&body, &macros).map_err(err)? {
                    SourceTerm::Explicit(t) => t,
                    SourceTerm::Implicit(p) => {
                        let expected = ty.as_ref().map(erase_to_pts);
                        elaborate(spec, &ctx, &p, expected.as_ref()).map_err(|e| err(e.to_string()))?
                    }
                };
                macros.insert(&name, body.clone());
                if kw == "def" {
                    items.push(EptsItem::Def { name: Name::new(&name), ty, body });
                    spans.push(pos);
                }
            }
            other => return Err(err(format!("unknown item keyword `{other}`"))),
        }
    }
    Ok(EptsFile { items, spans })
}

pub fn print_epts_file(f: &EptsFile) -> String {
    let mut out = String::new();
    for it in &f.items {
        match it {
            EptsItem::Assume(x, a) => out.push_str(&format!("assume {x} : {a}.\n")),
            EptsItem::Def { name, ty: Some(t), body } => out.push_str(&format!("def {name} : {t} := {body}.\n")),
            EptsItem::Def { name, ty: None, body } => out.push_str(&format!("def {name} := {body}.\n")),
        }
    }
    out
}

fn pick(hint: &Name, free: &BTreeSet<Name>, env: &[String]) -> String {
    let base = if is_identifier(hint.as_str()) && !matches!(hint.as_str(), "Pi" | "lam" | "app") {
        hint.as_str()
    } else {
        "x"
    };
    fresh_name(base, |s| free.iter().any(|v| v.as_str() == s) || env.iter().any(|e| e == s))
        .as_str()
        .to_string()
}

fn print_sort(s: &Sort) -> String {
    s.name().to_string()
}

fn print_epts(t: &EptsTerm, free: &BTreeSet<Name>, env: &mut Vec<String>, out: &mut String) {
    let binder = |b: &Binder, env: &mut Vec<String>, out: &mut String| {
        let x = pick(&b.name, free, env);
        out.push_str(&x);
        out.push_str(". ");
        env.push(x);
        print_epts(&b.body, free, env, out);
        env.pop();
    };
    match t {
        EptsTerm::FVar(x) => out.push_str(x.as_str()),
        EptsTerm::BVar(i) => match env.len().checked_sub(*i as usize + 1) {
            Some(k) => out.push_str(&env[k]),
            None => out.push_str(&format!("#{i}")),
        },
        EptsTerm::Sort(s) => {
            out.push('#');
            out.push_str(&print_sort(s));
        }
        EptsTerm::Pi { s1, s2, dom, cod } => {
            out.push_str(&format!("Pi[{},{}](", print_sort(s1), print_sort(s2)));
            print_epts(dom, free, env, out);
            out.push_str(", ");
            binder(cod, env, out);
            out.push(')');
        }
        EptsTerm::Lam { s1, s2, dom, cod, body } => {
            out.push_str(&format!("lam[{},{}](", print_sort(s1), print_sort(s2)));
            print_epts(dom, free, env, out);
            out.push_str(", ");
            binder(cod, env, out);
            out.push_str(", ");
            binder(body, env, out);
            out.push(')');
        }
        EptsTerm::App { s1, s2, dom, cod, fun, arg } => {
            out.push_str(&format!("app[{},{}](", print_sort(s1), print_sort(s2)));
            print_epts(dom, free, env, out);
            out.push_str(", ");
            binder(cod, env, out);
            out.push_str(", ");
            print_epts(fun, free, env, out);
            out.push_str(", ");
            print_epts(arg, free, env, out);
            out.push(')');
        }
    }
}

impl fmt::Display for EptsTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        print_epts(self, &self.free_vars(), &mut Vec::new(), &mut out);
        f.write_str(&out)
    }
}

fn print_pts(t: &PtsTerm, prec: u8, free: &BTreeSet<Name>, env: &mut Vec<String>, out: &mut String) {
    let open = |p: bool, out: &mut String| {
        if p {
            out.push('(')
        }
    };
    let close = |p: bool, out: &mut String| {
        if p {
            out.push(')')
        }
    };
    match t {
        PtsTerm::FVar(x) => out.push_str(x.as_str()),
        PtsTerm::BVar(i) => match env.len().checked_sub(*i as usize + 1) {
            Some(k) => out.push_str(&env[k]),
            None => out.push_str(&format!("#{i}")),
        },
        PtsTerm::Sort(s) => {
            out.push('#');
            out.push_str(&print_sort(s));
        }
        PtsTerm::App(f, a) => {
            open(prec > 1, out);
            print_pts(f, 1, free, env, out);
            out.push(' ');
            print_pts(a, 2, free, env, out);
            close(prec > 1, out);
        }
        PtsTerm::Lam(x, a, m) => {
            open(prec > 0, out);
            let x = pick(x, free, env);
            out.push_str(&format!("\\{x} : "));
            print_pts(a, 1, free, env, out);
            out.push_str(" => ");
            env.push(x);
            print_pts(m, 0, free, env, out);
            env.pop();
            close(prec > 0, out);
        }
        PtsTerm::Pi(x, a, b) => {
            open(prec > 0, out);
            let x = pick(x, free, env);
            out.push_str(&format!("({x} : "));
            print_pts(a, 0, free, env, out);
            out.push_str(") -> ");
            env.push(x);
            print_pts(b, 0, free, env, out);
            env.pop();
            close(prec > 0, out);
        }
    }
}

impl fmt::Display for PtsTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let free: BTreeSet<Name> = self.free_vars().into_iter().collect();
        let mut out = String::new();
        print_pts(self, 0, &free, &mut Vec::new(), &mut out);
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epts::EptsTerm as E;

    fn system_f() -> SortSpec {
        SortSpec::finite(&["Type", "Kind"], &[("Type", "Kind")], &[("Type", "Type", "Type"), ("Kind", "Type", "Type")])
            .unwrap()
    }

    const ID: &str = "lam[Kind,Type](#Type, A. Pi[Type,Type](A, x. A), A. lam[Type,Type](A, x. A, x. x))";

    #[test]
    fn explicit_round_trip() {
        let t = parse_epts_term(ID).unwrap();
        let a = E::var("A");
        let expected = E::lam(
            "Kind",
            "Type",
            E::sort("Type"),
            "A",
            E::pi("Type", "Type", a.clone(), "x", a.clone()),
            E::lam("Type", "Type", a.clone(), "x", a.clone(), E::var("x")),
        );
        assert_eq!(t, expected);
        assert_eq!(t.to_string(), ID);
        assert_eq!(parse_epts_term(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn printing_avoids_capture() {
        // binder named like a free variable gets renamed
        let t = EptsTerm::Pi {
            s1: "T".into(),
            s2: "T".into(),
            dom: Arc::new(E::var("y")),
            cod: Binder::raw("y".into(), EptsTerm::BVar(0)),
        };
        let s = t.to_string();
        assert_eq!(s, "Pi[T,T](y, y1. y1)");
        assert_eq!(parse_epts_term(&s).unwrap(), t);
    }

    #[test]
    fn file_with_implicit_items() {
        let src = "
            assume C : #Type.
            let id := \\A : #Type => \\x : A => x.
            def idC : C -> C := id C.
            def id2 := id.
        ";
        let f = parse_epts_file(src, &system_f()).unwrap();
        assert_eq!(f.items.len(), 3);
        let printed = print_epts_file(&f);
        let g = parse_epts_file(&printed, &system_f()).unwrap();
        assert_eq!(f.items, g.items);
        let (ctx, _, body, ty) = &f.judgments()[0];
        assert_eq!(ctx.len(), 1);
        crate::epts::epts_check(&system_f(), ctx, body, ty.as_ref().unwrap()).unwrap();
        assert_eq!(f.judgments()[1].2, parse_epts_term(ID).unwrap());
    }

    #[test]
    fn mixing_is_rejected() {
        assert!(parse_source_term("\\x : #Type => Pi[Type,Type](x, y. x)", &Macros::default()).is_err());
    }

    #[test]
    fn pts_display() {
        let p = parse_pts_term("\\A : #Type => \\x : A => x").unwrap();
        assert_eq!(p.to_string(), "\\A : #Type => \\x : A => x");
    }
}
