//! Framework terms in locally nameless form.
//!
//! Bound variables are de Bruijn indices; free variables (context entries,
//! telescope variables and rule metavariables) are names. Binders keep a
//! display name which equality ignores.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

pub type ConstId = Name;

/// Child index sequence locating a subterm. `App`: 0 function, 1 argument;
/// `Lam`/`Pi`: 0 annotation, 1 body; `Cons`: argument index.
pub type Path = Vec<usize>;

#[derive(Clone, Debug)]
pub enum Term {
    BVar(u32),
    FVar(Name),
    Cons(ConstId, Arc<[Term]>),
    Type,
    Kind,
    App(Arc<Term>, Arc<Term>),
    Lam(Name, Arc<Term>, Arc<Term>),
    Pi(Name, Arc<Term>, Arc<Term>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        use Term::*;
        match (self, other) {
            (BVar(i), BVar(j)) => i == j,
            (FVar(x), FVar(y)) => x == y,
            (Cons(c, a), Cons(d, b)) => c == d && a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x == y),
            (Type, Type) | (Kind, Kind) => true,
            (App(f, a), App(g, b)) => f == g && a == b,
            (Lam(_, a, m), Lam(_, b, n)) | (Pi(_, a, m), Pi(_, b, n)) => a == b && m == n,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Term::BVar(i) => i.hash(state),
            Term::FVar(x) => x.hash(state),
            Term::Cons(c, args) => {
                c.hash(state);
                for a in args.iter() {
                    a.hash(state);
                }
            }
            Term::Type | Term::Kind => {}
            Term::App(f, a) => {
                f.hash(state);
                a.hash(state);
            }
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => {
                a.hash(state);
                b.hash(state);
            }
        }
    }
}

/// α-equivalence. Binder names never matter, so this is structural equality.
pub fn alpha_eq(m: &Term, n: &Term) -> bool {
    m == n
}

impl Term {
    pub fn var(x: impl Into<Name>) -> Term {
        Term::FVar(x.into())
    }

    pub fn cons(c: impl Into<Name>, args: Vec<Term>) -> Term {
        Term::Cons(c.into(), Arc::from(args))
    }

    pub fn constant(c: impl Into<Name>) -> Term {
        Term::cons(c, Vec::new())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    /// `λx:ty.body` where `body` mentions `x` as a free variable.
    pub fn lam(x: impl Into<Name>, ty: Term, body: Term) -> Term {
        let x = x.into();
        let body = body.abstract_fvar(&x);
        Term::Lam(x, Arc::new(ty), Arc::new(body))
    }

    /// `Πx:dom.cod` where `cod` mentions `x` as a free variable.
    pub fn pi(x: impl Into<Name>, dom: Term, cod: Term) -> Term {
        let x = x.into();
        let cod = cod.abstract_fvar(&x);
        Term::Pi(x, Arc::new(dom), Arc::new(cod))
    }

    pub fn arrow(dom: Term, cod: Term) -> Term {
        Term::Pi(Name::new("_"), Arc::new(dom), Arc::new(cod.shift(1, 0)))
    }

    pub fn lam_raw(x: Name, ty: Term, body: Term) -> Term {
        Term::Lam(x, Arc::new(ty), Arc::new(body))
    }

    pub fn pi_raw(x: Name, dom: Term, cod: Term) -> Term {
        Term::Pi(x, Arc::new(dom), Arc::new(cod))
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::BVar(_) | Term::FVar(_) | Term::Type | Term::Kind => 1,
            Term::Cons(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::App(a, b) | Term::Lam(_, a, b) | Term::Pi(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Rebuilds a node with new children, keeping the constructor and binder name.
    pub fn with_children(&self, children: Vec<Term>) -> Term {
        let mut it = children.into_iter();
        let mut next = || it.next().expect("child count");
        match self {
            Term::BVar(_) | Term::FVar(_) | Term::Type | Term::Kind => self.clone(),
            Term::Cons(c, args) => Term::Cons(c.clone(), (0..args.len()).map(|_| next()).collect()),
            Term::App(..) => {
                let f = next();
                Term::app(f, next())
            }
            Term::Lam(x, ..) => {
                let a = next();
                Term::lam_raw(x.clone(), a, next())
            }
            Term::Pi(x, ..) => {
                let a = next();
                Term::pi_raw(x.clone(), a, next())
            }
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::BVar(_) | Term::FVar(_) | Term::Type | Term::Kind => Vec::new(),
            Term::Cons(_, args) => args.iter().collect(),
            Term::App(a, b) | Term::Lam(_, a, b) | Term::Pi(_, a, b) => vec![&**a, &**b],
        }
    }

    /// Number of binders entered when descending into child `i`.
    pub fn binders_at(&self, i: usize) -> u32 {
        match self {
            Term::Lam(..) | Term::Pi(..) if i == 1 => 1,
            _ => 0,
        }
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        let mut t = self;
        for &i in path {
            t = *t.children().get(i)?;
        }
        Some(t)
    }

    /// Replaces the subterm at `path` (indices inside are relative to that position).
    pub fn replace_at(&self, path: &[usize], new: Term) -> Option<Term> {
        match path.split_first() {
            None => Some(new),
            Some((&i, rest)) => {
                let kids = self.children();
                let child = kids.get(i)?.replace_at(rest, new)?;
                let children = kids
                    .iter()
                    .enumerate()
                    .map(|(j, k)| if j == i { child.clone() } else { (*k).clone() })
                    .collect();
                Some(self.with_children(children))
            }
        }
    }

    /// Adds `d` to every bound index `>= cutoff`.
    pub fn shift(&self, d: u32, cutoff: u32) -> Term {
        if d == 0 || !self.has_loose_from(cutoff) {
            return self.clone();
        }
        self.map_bvars(cutoff, &|i, depth| {
            if i >= depth {
                Term::BVar(i + d)
            } else {
                Term::BVar(i)
            }
        })
    }

    fn map_bvars(&self, depth: u32, f: &dyn Fn(u32, u32) -> Term) -> Term {
        match self {
            Term::BVar(i) => f(*i, depth),
            Term::FVar(_) | Term::Type | Term::Kind => self.clone(),
            Term::Cons(c, args) => Term::Cons(c.clone(), args.iter().map(|a| a.map_bvars(depth, f)).collect()),
            Term::App(a, b) => Term::app(a.map_bvars(depth, f), b.map_bvars(depth, f)),
            Term::Lam(x, a, b) => Term::lam_raw(x.clone(), a.map_bvars(depth, f), b.map_bvars(depth + 1, f)),
            Term::Pi(x, a, b) => Term::pi_raw(x.clone(), a.map_bvars(depth, f), b.map_bvars(depth + 1, f)),
        }
    }

    /// True if some bound index escapes `depth` enclosing binders.
    pub fn has_loose_from(&self, depth: u32) -> bool {
        match self {
            Term::BVar(i) => *i >= depth,
            Term::FVar(_) | Term::Type | Term::Kind => false,
            Term::Cons(_, args) => args.iter().any(|a| a.has_loose_from(depth)),
            Term::App(a, b) => a.has_loose_from(depth) || b.has_loose_from(depth),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => a.has_loose_from(depth) || b.has_loose_from(depth + 1),
        }
    }

    pub fn is_locally_closed(&self) -> bool {
        !self.has_loose_from(0)
    }

    /// True if bound index `i` (relative to this position) occurs.
    pub fn has_bvar(&self, i: u32) -> bool {
        match self {
            Term::BVar(j) => *j == i,
            Term::FVar(_) | Term::Type | Term::Kind => false,
            Term::Cons(_, args) => args.iter().any(|a| a.has_bvar(i)),
            Term::App(a, b) => a.has_bvar(i) || b.has_bvar(i),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => a.has_bvar(i) || b.has_bvar(i + 1),
        }
    }

    /// Substitutes `arg` for the outermost loose index of a binder body.
    pub fn instantiate(&self, arg: &Term) -> Term {
        if !self.has_loose_from(0) {
            return self.clone();
        }
        self.map_bvars(0, &|i, depth| {
            if i == depth {
                arg.shift(depth, 0)
            } else if i > depth {
                Term::BVar(i - 1)
            } else {
                Term::BVar(i)
            }
        })
    }

    pub fn open(&self, x: &Name) -> Term {
        self.instantiate(&Term::FVar(x.clone()))
    }

    /// Turns free occurrences of `x` into the index of a new enclosing binder.
    pub fn abstract_fvar(&self, x: &Name) -> Term {
        self.abstract_at(x, 0)
    }

    fn abstract_at(&self, x: &Name, depth: u32) -> Term {
        match self {
            Term::BVar(i) => Term::BVar(if *i >= depth { i + 1 } else { *i }),
            Term::FVar(y) => {
                if y == x {
                    Term::BVar(depth)
                } else {
                    self.clone()
                }
            }
            Term::Type | Term::Kind => self.clone(),
            Term::Cons(c, args) => Term::Cons(c.clone(), args.iter().map(|a| a.abstract_at(x, depth)).collect()),
            Term::App(a, b) => Term::app(a.abstract_at(x, depth), b.abstract_at(x, depth)),
            Term::Lam(y, a, b) => Term::lam_raw(y.clone(), a.abstract_at(x, depth), b.abstract_at(x, depth + 1)),
            Term::Pi(y, a, b) => Term::pi_raw(y.clone(), a.abstract_at(x, depth), b.abstract_at(x, depth + 1)),
        }
    }

    /// Capture-avoiding `self{n/x}`.
    pub fn subst(&self, x: &Name, n: &Term) -> Term {
        let mut map = HashMap::new();
        map.insert(x.clone(), n.clone());
        self.subst_many(&map)
    }

    /// Simultaneous substitution of free variables.
    pub fn subst_many(&self, map: &HashMap<Name, Term>) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        self.subst_at(map, 0)
    }

    fn subst_at(&self, map: &HashMap<Name, Term>, depth: u32) -> Term {
        match self {
            Term::FVar(y) => match map.get(y) {
                Some(n) => n.shift(depth, 0),
                None => self.clone(),
            },
            Term::BVar(_) | Term::Type | Term::Kind => self.clone(),
            Term::Cons(c, args) => Term::Cons(c.clone(), args.iter().map(|a| a.subst_at(map, depth)).collect()),
            Term::App(a, b) => Term::app(a.subst_at(map, depth), b.subst_at(map, depth)),
            Term::Lam(y, a, b) => Term::lam_raw(y.clone(), a.subst_at(map, depth), b.subst_at(map, depth + 1)),
            Term::Pi(y, a, b) => Term::pi_raw(y.clone(), a.subst_at(map, depth), b.subst_at(map, depth + 1)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_fvars(&mut out);
        out
    }

    fn collect_fvars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::FVar(x) => {
                out.insert(x.clone());
            }
            Term::BVar(_) | Term::Type | Term::Kind => {}
            Term::Cons(_, args) => args.iter().for_each(|a| a.collect_fvars(out)),
            Term::App(a, b) | Term::Lam(_, a, b) | Term::Pi(_, a, b) => {
                a.collect_fvars(out);
                b.collect_fvars(out);
            }
        }
    }

    pub fn has_fvar(&self, x: &Name) -> bool {
        match self {
            Term::FVar(y) => y == x,
            Term::BVar(_) | Term::Type | Term::Kind => false,
            Term::Cons(_, args) => args.iter().any(|a| a.has_fvar(x)),
            Term::App(a, b) | Term::Lam(_, a, b) | Term::Pi(_, a, b) => a.has_fvar(x) || b.has_fvar(x),
        }
    }

    /// Every constant application `(name, arity)` in the term, with repetitions.
    pub fn constants(&self) -> Vec<(ConstId, usize)> {
        let mut out = Vec::new();
        self.collect_constants(&mut out);
        out
    }

    fn collect_constants(&self, out: &mut Vec<(ConstId, usize)>) {
        match self {
            Term::Cons(c, args) => {
                out.push((c.clone(), args.len()));
                args.iter().for_each(|a| a.collect_constants(out));
            }
            Term::BVar(_) | Term::FVar(_) | Term::Type | Term::Kind => {}
            Term::App(a, b) | Term::Lam(_, a, b) | Term::Pi(_, a, b) => {
                a.collect_constants(out);
                b.collect_constants(out);
            }
        }
    }

    /// Display names of all binders, in preorder.
    pub fn binder_names(&self) -> Vec<Name> {
        let mut out = Vec::new();
        fn go(t: &Term, out: &mut Vec<Name>) {
            if let Term::Lam(x, ..) | Term::Pi(x, ..) = t {
                out.push(x.clone());
            }
            for c in t.children() {
                go(c, out);
            }
        }
        go(self, &mut out);
        out
    }
}

/// A name based on `hint` for which `taken` is false: `x`, `x1`, `x2`, ...
pub fn fresh_name(hint: &str, taken: impl Fn(&str) -> bool) -> Name {
    let base = if hint.is_empty() || hint == "_" { "x" } else { hint };
    if !taken(base) {
        return Name::new(base);
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "x" } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|c| !taken(c))
        .map(Name::from)
        .expect("unbounded supply")
}
