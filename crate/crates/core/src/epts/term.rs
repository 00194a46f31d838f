//! Explicitly-typed PTS terms, locally nameless like framework terms.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::term::{Name, Path};

/// A sort, identified by its name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(pub Name);

impl Sort {
    pub fn new(s: &str) -> Self {
        Sort(Name::new(s))
    }
    pub fn name(&self) -> &str {
        self.0.as_str()
    }
}

impl From<&str> for Sort {
    fn from(s: &str) -> Self {
        Sort::new(s)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// One-hole abstraction `x.B`: the body's index 0 is the bound variable.
#[derive(Clone, Debug)]
pub struct Binder {
    pub name: Name,
    pub body: Arc<EptsTerm>,
}

impl Binder {
    pub fn raw(name: Name, body: EptsTerm) -> Self {
        Binder { name, body: Arc::new(body) }
    }

    /// Abstracts the free variable `x` of `body`.
    pub fn bind(x: impl Into<Name>, body: EptsTerm) -> Self {
        let x = x.into();
        let body = body.abstract_fvar(&x);
        Binder { name: x, body: Arc::new(body) }
    }

    pub fn instantiate(&self, arg: &EptsTerm) -> EptsTerm {
        self.body.instantiate(arg)
    }
}

impl PartialEq for Binder {
    fn eq(&self, other: &Self) -> bool {
        self.body == other.body
    }
}

#[derive(Clone, Debug)]
pub enum EptsTerm {
    BVar(u32),
    FVar(Name),
    Sort(Sort),
    Pi { s1: Sort, s2: Sort, dom: Arc<EptsTerm>, cod: Binder },
    Lam { s1: Sort, s2: Sort, dom: Arc<EptsTerm>, cod: Binder, body: Binder },
    App { s1: Sort, s2: Sort, dom: Arc<EptsTerm>, cod: Binder, fun: Arc<EptsTerm>, arg: Arc<EptsTerm> },
}

impl PartialEq for EptsTerm {
    fn eq(&self, other: &Self) -> bool {
        use EptsTerm::*;
        match (self, other) {
            (BVar(i), BVar(j)) => i == j,
            (FVar(x), FVar(y)) => x == y,
            (Sort(s), Sort(t)) => s == t,
            (Pi { s1, s2, dom, cod }, Pi { s1: t1, s2: t2, dom: d, cod: c }) => {
                s1 == t1 && s2 == t2 && dom == d && cod == c
            }
            (Lam { s1, s2, dom, cod, body }, Lam { s1: t1, s2: t2, dom: d, cod: c, body: b }) => {
                s1 == t1 && s2 == t2 && dom == d && cod == c && body == b
            }
            (
                App { s1, s2, dom, cod, fun, arg },
                App { s1: t1, s2: t2, dom: d, cod: c, fun: f, arg: a },
            ) => s1 == t1 && s2 == t2 && dom == d && cod == c && fun == f && arg == a,
            _ => false,
        }
    }
}

impl Eq for EptsTerm {}

impl std::hash::Hash for EptsTerm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            EptsTerm::BVar(i) => i.hash(state),
            EptsTerm::FVar(x) => x.hash(state),
            EptsTerm::Sort(s) => s.hash(state),
            _ => {
                let (s1, s2) = self.sorts().expect("binder node");
                s1.hash(state);
                s2.hash(state);
                for c in self.children() {
                    c.hash(state);
                }
            }
        }
    }
}

impl EptsTerm {
    pub fn var(x: impl Into<Name>) -> Self {
        EptsTerm::FVar(x.into())
    }

    pub fn sort(s: impl Into<Sort>) -> Self {
        EptsTerm::Sort(s.into())
    }

    /// `Π_{s1,s2}(dom, x.cod)` with `x` free in `cod`.
    pub fn pi(s1: impl Into<Sort>, s2: impl Into<Sort>, dom: EptsTerm, x: &str, cod: EptsTerm) -> Self {
        EptsTerm::Pi { s1: s1.into(), s2: s2.into(), dom: Arc::new(dom), cod: Binder::bind(x, cod) }
    }

    /// `λ_{s1,s2}(dom, x.cod, x.body)` with `x` free in `cod` and `body`.
    pub fn lam(s1: impl Into<Sort>, s2: impl Into<Sort>, dom: EptsTerm, x: &str, cod: EptsTerm, body: EptsTerm) -> Self {
        EptsTerm::Lam {
            s1: s1.into(),
            s2: s2.into(),
            dom: Arc::new(dom),
            cod: Binder::bind(x, cod),
            body: Binder::bind(x, body),
        }
    }

    /// `@_{s1,s2}(dom, x.cod, fun, arg)` with `x` free in `cod`.
    pub fn app(
        s1: impl Into<Sort>,
        s2: impl Into<Sort>,
        dom: EptsTerm,
        x: &str,
        cod: EptsTerm,
        fun: EptsTerm,
        arg: EptsTerm,
    ) -> Self {
        EptsTerm::App {
            s1: s1.into(),
            s2: s2.into(),
            dom: Arc::new(dom),
            cod: Binder::bind(x, cod),
            fun: Arc::new(fun),
            arg: Arc::new(arg),
        }
    }

    pub fn sorts(&self) -> Option<(&Sort, &Sort)> {
        match self {
            EptsTerm::Pi { s1, s2, .. } | EptsTerm::Lam { s1, s2, .. } | EptsTerm::App { s1, s2, .. } => Some((s1, s2)),
            _ => None,
        }
    }

    /// Children in order: Π (dom, cod); λ (dom, cod, body); @ (dom, cod, fun, arg).
    pub fn children(&self) -> Vec<&EptsTerm> {
        match self {
            EptsTerm::BVar(_) | EptsTerm::FVar(_) | EptsTerm::Sort(_) => Vec::new(),
            EptsTerm::Pi { dom, cod, .. } => vec![dom, &cod.body],
            EptsTerm::Lam { dom, cod, body, .. } => vec![dom, &cod.body, &body.body],
            EptsTerm::App { dom, cod, fun, arg, .. } => vec![dom, &cod.body, fun, arg],
        }
    }

    pub fn binders_at(&self, i: usize) -> u32 {
        match self {
            EptsTerm::Pi { .. } | EptsTerm::App { .. } if i == 1 => 1,
            EptsTerm::Lam { .. } if i == 1 || i == 2 => 1,
            _ => 0,
        }
    }

    pub fn with_children(&self, kids: Vec<EptsTerm>) -> EptsTerm {
        let mut it = kids.into_iter();
        let mut next = || Arc::new(it.next().expect("child count"));
        match self {
            EptsTerm::BVar(_) | EptsTerm::FVar(_) | EptsTerm::Sort(_) => self.clone(),
            EptsTerm::Pi { s1, s2, cod, .. } => {
                let dom = next();
                EptsTerm::Pi { s1: s1.clone(), s2: s2.clone(), dom, cod: Binder { name: cod.name.clone(), body: next() } }
            }
            EptsTerm::Lam { s1, s2, cod, body, .. } => {
                let dom = next();
                let c = Binder { name: cod.name.clone(), body: next() };
                let b = Binder { name: body.name.clone(), body: next() };
                EptsTerm::Lam { s1: s1.clone(), s2: s2.clone(), dom, cod: c, body: b }
            }
            EptsTerm::App { s1, s2, cod, .. } => {
                let dom = next();
                let c = Binder { name: cod.name.clone(), body: next() };
                let fun = next();
                let arg = next();
                EptsTerm::App { s1: s1.clone(), s2: s2.clone(), dom, cod: c, fun, arg }
            }
        }
    }

    pub fn map_sorts(&self, f: &dyn Fn(&Sort) -> Sort) -> EptsTerm {
        match self {
            EptsTerm::Sort(s) => EptsTerm::Sort(f(s)),
            EptsTerm::BVar(_) | EptsTerm::FVar(_) => self.clone(),
            _ => {
                let kids = self.children().into_iter().map(|k| k.map_sorts(f)).collect();
                let rebuilt = self.with_children(kids);
                match rebuilt {
                    EptsTerm::Pi { s1, s2, dom, cod } => EptsTerm::Pi { s1: f(&s1), s2: f(&s2), dom, cod },
                    EptsTerm::Lam { s1, s2, dom, cod, body } => EptsTerm::Lam { s1: f(&s1), s2: f(&s2), dom, cod, body },
                    EptsTerm::App { s1, s2, dom, cod, fun, arg } => {
                        EptsTerm::App { s1: f(&s1), s2: f(&s2), dom, cod, fun, arg }
                    }
                    other => other,
                }
            }
        }
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&EptsTerm> {
        let mut t = self;
        for &i in path {
            t = *t.children().get(i)?;
        }
        Some(t)
    }

    pub fn replace_at(&self, path: &[usize], new: EptsTerm) -> Option<EptsTerm> {
        match path.split_first() {
            None => Some(new),
            Some((&i, rest)) => {
                let kids = self.children();
                let child = kids.get(i)?.replace_at(rest, new)?;
                let kids = kids.iter().enumerate().map(|(j, k)| if j == i { child.clone() } else { (*k).clone() }).collect();
                Some(self.with_children(kids))
            }
        }
    }

    fn map_bvars(&self, depth: u32, f: &dyn Fn(u32, u32) -> EptsTerm) -> EptsTerm {
        match self {
            EptsTerm::BVar(i) => f(*i, depth),
            EptsTerm::FVar(_) | EptsTerm::Sort(_) => self.clone(),
            _ => {
                let kids = self
                    .children()
                    .into_iter()
                    .enumerate()
                    .map(|(i, k)| k.map_bvars(depth + self.binders_at(i), f))
                    .collect();
                self.with_children(kids)
            }
        }
    }

    pub fn has_loose_from(&self, depth: u32) -> bool {
        match self {
            EptsTerm::BVar(i) => *i >= depth,
            EptsTerm::FVar(_) | EptsTerm::Sort(_) => false,
            _ => self.children().into_iter().enumerate().any(|(i, k)| k.has_loose_from(depth + self.binders_at(i))),
        }
    }

    pub fn is_locally_closed(&self) -> bool {
        !self.has_loose_from(0)
    }

    pub fn has_bvar(&self, i: u32) -> bool {
        match self {
            EptsTerm::BVar(j) => *j == i,
            EptsTerm::FVar(_) | EptsTerm::Sort(_) => false,
            _ => self.children().into_iter().enumerate().any(|(k, c)| c.has_bvar(i + self.binders_at(k))),
        }
    }

    pub fn shift(&self, d: u32, cutoff: u32) -> EptsTerm {
        if d == 0 || !self.has_loose_from(cutoff) {
            return self.clone();
        }
        self.map_bvars(cutoff, &|i, depth| EptsTerm::BVar(if i >= depth { i + d } else { i }))
    }

    pub fn instantiate(&self, arg: &EptsTerm) -> EptsTerm {
        if !self.has_loose_from(0) {
            return self.clone();
        }
        self.map_bvars(0, &|i, depth| {
            if i == depth {
                arg.shift(depth, 0)
            } else if i > depth {
                EptsTerm::BVar(i - 1)
            } else {
                EptsTerm::BVar(i)
            }
        })
    }

    pub fn open(&self, x: &Name) -> EptsTerm {
        self.instantiate(&EptsTerm::FVar(x.clone()))
    }

    pub fn abstract_fvar(&self, x: &Name) -> EptsTerm {
        self.abstract_at(x, 0)
    }

    fn abstract_at(&self, x: &Name, depth: u32) -> EptsTerm {
        match self {
            EptsTerm::BVar(i) => EptsTerm::BVar(if *i >= depth { i + 1 } else { *i }),
            EptsTerm::FVar(y) if y == x => EptsTerm::BVar(depth),
            EptsTerm::FVar(_) | EptsTerm::Sort(_) => self.clone(),
            _ => {
                let kids = self
                    .children()
                    .into_iter()
                    .enumerate()
                    .map(|(i, k)| k.abstract_at(x, depth + self.binders_at(i)))
                    .collect();
                self.with_children(kids)
            }
        }
    }

    pub fn subst(&self, x: &Name, n: &EptsTerm) -> EptsTerm {
        let mut map = HashMap::new();
        map.insert(x.clone(), n.clone());
        self.subst_many(&map)
    }

    pub fn subst_many(&self, map: &HashMap<Name, EptsTerm>) -> EptsTerm {
        self.subst_at(map, 0)
    }

    fn subst_at(&self, map: &HashMap<Name, EptsTerm>, depth: u32) -> EptsTerm {
        match self {
            EptsTerm::FVar(y) => match map.get(y) {
                Some(n) => n.shift(depth, 0),
                None => self.clone(),
            },
            EptsTerm::BVar(_) | EptsTerm::Sort(_) => self.clone(),
            _ => {
                let kids = self
                    .children()
                    .into_iter()
                    .enumerate()
                    .map(|(i, k)| k.subst_at(map, depth + self.binders_at(i)))
                    .collect();
                self.with_children(kids)
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fn go(t: &EptsTerm, out: &mut BTreeSet<Name>) {
            if let EptsTerm::FVar(x) = t {
                out.insert(x.clone());
            }
            for k in t.children() {
                go(k, out);
            }
        }
        go(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(EptsTerm::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(EptsTerm::depth).max().unwrap_or(0)
    }

    /// Every sort occurring in the term (as a node or as an annotation).
    pub fn sorts_used(&self) -> BTreeSet<Sort> {
        let mut out = BTreeSet::new();
        fn go(t: &EptsTerm, out: &mut BTreeSet<Sort>) {
            if let EptsTerm::Sort(s) = t {
                out.insert(s.clone());
            }
            if let Some((a, b)) = t.sorts() {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            for k in t.children() {
                go(k, out);
            }
        }
        go(self, &mut out);
        out
    }
}

/// Ordered context of typed variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EptsContext {
    entries: Vec<(Name, EptsTerm)>,
}

impl EptsContext {
    pub fn new() -> Self {
        EptsContext::default()
    }

    pub fn from_entries(entries: Vec<(Name, EptsTerm)>) -> Self {
        EptsContext { entries }
    }

    pub fn push(&mut self, x: impl Into<Name>, ty: EptsTerm) {
        self.entries.push((x.into(), ty));
    }

    pub fn with(mut self, x: impl Into<Name>, ty: EptsTerm) -> Self {
        self.push(x, ty);
        self
    }

    pub fn entries(&self) -> &[(Name, EptsTerm)] {
        &self.entries
    }

    pub fn lookup(&self, x: &Name) -> Option<&EptsTerm> {
        self.entries.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.entries.iter().any(|(y, _)| y.as_str() == x)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pop(&mut self) -> Option<(Name, EptsTerm)> {
        self.entries.pop()
    }
}

/// Positions of subterms within an EPTS term.
pub type EptsPath = Path;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binder_equality_ignores_names() {
        let a = EptsTerm::var("A");
        let l1 = EptsTerm::lam("T", "T", a.clone(), "x", a.clone(), EptsTerm::var("x"));
        let l2 = EptsTerm::lam("T", "T", a.clone(), "y", a.clone(), EptsTerm::var("y"));
        assert_eq!(l1, l2);
        let l3 = EptsTerm::lam("T", "K", a.clone(), "y", a.clone(), EptsTerm::var("y"));
        assert_ne!(l1, l3);
    }

    #[test]
    fn substitution_under_binders() {
        let a = EptsTerm::var("A");
        let m = EptsTerm::pi("T", "T", a.clone(), "x", EptsTerm::var("A"));
        let r = m.subst(&"A".into(), &EptsTerm::var("C"));
        assert_eq!(r, EptsTerm::pi("T", "T", EptsTerm::var("C"), "x", EptsTerm::var("C")));
        // body of a λ binds both cod and body separately
        let l = EptsTerm::lam("T", "T", a.clone(), "x", a.clone(), EptsTerm::var("x"));
        if let EptsTerm::Lam { body, cod, .. } = &l {
            assert_eq!(*body.body, EptsTerm::BVar(0));
            assert_eq!(*cod.body, a);
        } else {
            unreachable!()
        }
    }
}
