//! Simple types, untyped-annotation λ-terms and Curry-style type checking.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::term::Name;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleType {
    Star,
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn arrow(a: SimpleType, b: SimpleType) -> SimpleType {
        SimpleType::Arrow(Box::new(a), Box::new(b))
    }

    /// `a1 -> … -> an -> r`
    pub fn arrows(args: impl IntoIterator<Item = SimpleType>, r: SimpleType) -> SimpleType {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter().rev().fold(r, |acc, a| SimpleType::arrow(a, acc))
    }

    /// The type of the product-encoding constant indexed by `self`: `* → (σ → *) → *`.
    pub fn pi_constant_type(&self) -> SimpleType {
        SimpleType::arrows([SimpleType::Star, SimpleType::arrow(self.clone(), SimpleType::Star)], SimpleType::Star)
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Star => f.write_str("*"),
            SimpleType::Arrow(a, b) => match **a {
                SimpleType::Star => write!(f, "* -> {b}"),
                _ => write!(f, "({a}) -> {b}"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StlcConst {
    Sig(Name),
    /// The product-encoding constant at a simple type.
    Pi(SimpleType),
}

impl fmt::Display for StlcConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StlcConst::Sig(c) => write!(f, "{c}"),
            StlcConst::Pi(s) => write!(f, "pi[{s}]"),
        }
    }
}

/// λ-terms with de Bruijn bound variables; binder names are for display.
#[derive(Clone, Debug)]
pub enum StlcTerm {
    BVar(u32),
    FVar(Name),
    Const(StlcConst),
    App(Box<StlcTerm>, Box<StlcTerm>),
    Lam(Name, Box<StlcTerm>),
}

impl PartialEq for StlcTerm {
    fn eq(&self, other: &Self) -> bool {
        use StlcTerm::*;
        match (self, other) {
            (BVar(i), BVar(j)) => i == j,
            (FVar(x), FVar(y)) => x == y,
            (Const(c), Const(d)) => c == d,
            (App(f, a), App(g, b)) => f == g && a == b,
            (Lam(_, m), Lam(_, n)) => m == n,
            _ => false,
        }
    }
}

impl Eq for StlcTerm {}

impl std::hash::Hash for StlcTerm {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            StlcTerm::BVar(i) => i.hash(state),
            StlcTerm::FVar(x) => x.hash(state),
            StlcTerm::Const(c) => c.hash(state),
            StlcTerm::App(f, a) => {
                f.hash(state);
                a.hash(state);
            }
            StlcTerm::Lam(_, m) => m.hash(state),
        }
    }
}

impl StlcTerm {
    pub fn app(f: StlcTerm, a: StlcTerm) -> StlcTerm {
        StlcTerm::App(Box::new(f), Box::new(a))
    }

    pub fn lam(x: impl Into<Name>, body: StlcTerm) -> StlcTerm {
        StlcTerm::Lam(x.into(), Box::new(body))
    }

    fn map_bvars(&self, depth: u32, f: &dyn Fn(u32, u32) -> StlcTerm) -> StlcTerm {
        match self {
            StlcTerm::BVar(i) => f(*i, depth),
            StlcTerm::FVar(_) | StlcTerm::Const(_) => self.clone(),
            StlcTerm::App(a, b) => StlcTerm::app(a.map_bvars(depth, f), b.map_bvars(depth, f)),
            StlcTerm::Lam(x, b) => StlcTerm::lam(x.clone(), b.map_bvars(depth + 1, f)),
        }
    }

    fn shift(&self, d: u32) -> StlcTerm {
        if d == 0 {
            return self.clone();
        }
        self.map_bvars(0, &|i, depth| StlcTerm::BVar(if i >= depth { i + d } else { i }))
    }

    fn instantiate(&self, arg: &StlcTerm) -> StlcTerm {
        self.map_bvars(0, &|i, depth| {
            if i == depth {
                arg.shift(depth)
            } else if i > depth {
                StlcTerm::BVar(i - 1)
            } else {
                StlcTerm::BVar(i)
            }
        })
    }

    /// All terms reachable by contracting exactly one β-redex.
    pub fn beta_reducts(&self) -> Vec<StlcTerm> {
        let mut out = Vec::new();
        match self {
            StlcTerm::App(f, a) => {
                if let StlcTerm::Lam(_, body) = &**f {
                    out.push(body.instantiate(a));
                }
                out.extend(f.beta_reducts().into_iter().map(|f2| StlcTerm::app(f2, (**a).clone())));
                out.extend(a.beta_reducts().into_iter().map(|a2| StlcTerm::app((**f).clone(), a2)));
            }
            StlcTerm::Lam(x, b) => out.extend(b.beta_reducts().into_iter().map(|b2| StlcTerm::lam(x.clone(), b2))),
            _ => {}
        }
        out
    }

    /// Contracts the β-redex at `path` (children: `0`/`1` under an
    /// application, `0` under a λ).
    pub fn contract_at(&self, path: &[usize]) -> Option<StlcTerm> {
        match (self, path.split_first()) {
            (StlcTerm::App(f, a), None) => match &**f {
                StlcTerm::Lam(_, body) => Some(body.instantiate(a)),
                _ => None,
            },
            (StlcTerm::App(f, a), Some((0, rest))) => Some(StlcTerm::app(f.contract_at(rest)?, (**a).clone())),
            (StlcTerm::App(f, a), Some((1, rest))) => Some(StlcTerm::app((**f).clone(), a.contract_at(rest)?)),
            (StlcTerm::Lam(x, b), Some((0, rest))) => Some(StlcTerm::lam(x.clone(), b.contract_at(rest)?)),
            _ => None,
        }
    }

    /// Whether `target` is reachable in between 1 and `max_steps` β-steps.
    pub fn reaches_in_steps(&self, target: &StlcTerm, max_steps: usize) -> bool {
        let mut seen: HashSet<StlcTerm> = HashSet::new();
        let mut queue = VecDeque::from([(self.clone(), 0usize)]);
        while let Some((t, d)) = queue.pop_front() {
            if d >= max_steps {
                continue;
            }
            for r in t.beta_reducts() {
                if &r == target {
                    return true;
                }
                if seen.insert(r.clone()) {
                    queue.push_back((r, d + 1));
                }
            }
        }
        false
    }

    /// Every constant occurring in the term.
    pub fn constants(&self) -> Vec<StlcConst> {
        let mut out = Vec::new();
        fn go(t: &StlcTerm, out: &mut Vec<StlcConst>) {
            match t {
                StlcTerm::Const(c) => out.push(c.clone()),
                StlcTerm::App(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                StlcTerm::Lam(_, b) => go(b, out),
                _ => {}
            }
        }
        go(self, &mut out);
        out
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8, env: &mut Vec<String>) -> fmt::Result {
        match self {
            StlcTerm::BVar(i) => match env.len().checked_sub(*i as usize + 1) {
                Some(k) => f.write_str(&env[k]),
                None => write!(f, "#{i}"),
            },
            StlcTerm::FVar(x) => write!(f, "{x}"),
            StlcTerm::Const(c) => write!(f, "{c}"),
            StlcTerm::App(a, b) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1, env)?;
                f.write_str(" ")?;
                b.fmt_prec(f, 2, env)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            StlcTerm::Lam(x, b) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                let name = crate::term::fresh_name(x.as_str(), |s| env.iter().any(|e| e == s));
                write!(f, "\\{name}. ")?;
                env.push(name.as_str().to_string());
                b.fmt_prec(f, 0, env)?;
                env.pop();
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for StlcTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, &mut Vec::new())
    }
}

/// Typing context for simple types: constants and free variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StlcContext {
    pub consts: Vec<(StlcConst, SimpleType)>,
    pub vars: Vec<(Name, SimpleType)>,
}

impl StlcContext {
    pub fn new() -> Self {
        StlcContext::default()
    }

    pub fn const_type(&self, c: &StlcConst) -> Option<&SimpleType> {
        self.consts.iter().find(|(d, _)| d == c).map(|(_, t)| t)
    }

    pub fn var_type(&self, x: &Name) -> Option<&SimpleType> {
        self.vars.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn add_var(&mut self, x: Name, t: SimpleType) {
        self.vars.push((x, t));
    }

    /// Adds the product-encoding constants mentioned by `m` that are still missing.
    pub fn add_pi_constants_for(&mut self, m: &StlcTerm) {
        for c in m.constants() {
            if let StlcConst::Pi(s) = &c {
                if self.const_type(&c).is_none() {
                    let t = s.pi_constant_type();
                    self.consts.push((c, t));
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Ty {
    Star,
    Arrow(Box<Ty>, Box<Ty>),
    Meta(usize),
}

impl Ty {
    fn from_simple(s: &SimpleType) -> Ty {
        match s {
            SimpleType::Star => Ty::Star,
            SimpleType::Arrow(a, b) => Ty::Arrow(Box::new(Ty::from_simple(a)), Box::new(Ty::from_simple(b))),
        }
    }
}

#[derive(Default)]
struct Unifier {
    metas: HashMap<usize, Ty>,
    next: usize,
}

impl Unifier {
    fn fresh(&mut self) -> Ty {
        self.next += 1;
        Ty::Meta(self.next)
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match t {
            Ty::Meta(m) => match self.metas.get(m) {
                Some(u) => self.resolve(u),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn occurs(&self, m: usize, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Meta(n) => n == m,
            Ty::Star => false,
            Ty::Arrow(a, b) => self.occurs(m, &a) || self.occurs(m, &b),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> bool {
        match (self.resolve(a), self.resolve(b)) {
            (Ty::Star, Ty::Star) => true,
            (Ty::Meta(m), Ty::Meta(n)) if m == n => true,
            (Ty::Meta(m), t) | (t, Ty::Meta(m)) => {
                if self.occurs(m, &t) {
                    return false;
                }
                self.metas.insert(m, t);
                true
            }
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => self.unify(&a1, &a2) && self.unify(&b1, &b2),
            _ => false,
        }
    }

    fn infer(&mut self, ctx: &StlcContext, bound: &mut Vec<Ty>, m: &StlcTerm) -> Option<Ty> {
        match m {
            StlcTerm::BVar(i) => bound.len().checked_sub(*i as usize + 1).map(|k| bound[k].clone()),
            StlcTerm::FVar(x) => ctx.var_type(x).map(Ty::from_simple),
            StlcTerm::Const(c) => ctx.const_type(c).map(Ty::from_simple),
            StlcTerm::App(f, a) => {
                let tf = self.infer(ctx, bound, f)?;
                let ta = self.infer(ctx, bound, a)?;
                let r = self.fresh();
                self.unify(&tf, &Ty::Arrow(Box::new(ta), Box::new(r.clone()))).then_some(r)
            }
            StlcTerm::Lam(_, b) => {
                let a = self.fresh();
                bound.push(a.clone());
                let tb = self.infer(ctx, bound, b);
                bound.pop();
                Some(Ty::Arrow(Box::new(a), Box::new(tb?)))
            }
        }
    }
}

/// Curry-style simple typing: is there a typing of `m` at `ty`?
pub fn stlc_check(ctx: &StlcContext, m: &StlcTerm, ty: &SimpleType) -> bool {
    let mut u = Unifier::default();
    match u.infer(ctx, &mut Vec::new(), m) {
        Some(t) => u.unify(&t, &Ty::from_simple(ty)),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star() -> SimpleType {
        SimpleType::Star
    }

    #[test]
    fn variable_at_star() {
        let mut ctx = StlcContext::new();
        ctx.add_var("x".into(), star());
        assert!(stlc_check(&ctx, &StlcTerm::FVar("x".into()), &star()));
        assert!(!stlc_check(&ctx, &StlcTerm::FVar("x".into()), &SimpleType::arrow(star(), star())));
    }

    #[test]
    fn identity_at_arrow() {
        let id = StlcTerm::lam("x", StlcTerm::BVar(0));
        assert!(stlc_check(&StlcContext::new(), &id, &SimpleType::arrow(star(), star())));
        assert!(!stlc_check(&StlcContext::new(), &id, &star()));
    }

    #[test]
    fn self_application_is_untypable() {
        let delta = StlcTerm::lam("x", StlcTerm::app(StlcTerm::BVar(0), StlcTerm::BVar(0)));
        let t = SimpleType::arrow(star(), star());
        assert!(!stlc_check(&StlcContext::new(), &delta, &t));
    }

    #[test]
    fn beta_reachability() {
        let id = StlcTerm::lam("x", StlcTerm::BVar(0));
        let y = StlcTerm::FVar("y".into());
        let m = StlcTerm::app(id.clone(), StlcTerm::app(id, y.clone()));
        assert!(m.reaches_in_steps(&y, 2));
        assert!(!m.reaches_in_steps(&y, 1));
        assert!(!y.reaches_in_steps(&y, 3));
    }

    #[test]
    fn display() {
        let t = SimpleType::arrows([star(), SimpleType::arrow(star(), star())], star());
        assert_eq!(t.to_string(), "* -> (* -> *) -> *");
    }
}
