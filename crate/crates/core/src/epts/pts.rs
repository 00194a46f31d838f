//! Implicit PTS syntax, erasure of annotations, and a type-directed elaborator.

use std::sync::Arc;

use super::sort::SortSpec;
use super::term::{Binder, EptsContext, EptsTerm, Sort};
use super::typing::{EptsChecker, EptsError};
use crate::reduce::DEFAULT_FUEL;
use crate::term::{fresh_name, Name};

#[derive(Clone, Debug)]
pub enum PtsTerm {
    BVar(u32),
    FVar(Name),
    Sort(Sort),
    Pi(Name, Arc<PtsTerm>, Arc<PtsTerm>),
    Lam(Name, Arc<PtsTerm>, Arc<PtsTerm>),
    App(Arc<PtsTerm>, Arc<PtsTerm>),
}

impl PartialEq for PtsTerm {
    fn eq(&self, other: &Self) -> bool {
        use PtsTerm::*;
        match (self, other) {
            (BVar(i), BVar(j)) => i == j,
            (FVar(x), FVar(y)) => x == y,
            (Sort(s), Sort(t)) => s == t,
            (Pi(_, a, b), Pi(_, c, d)) | (Lam(_, a, b), Lam(_, c, d)) | (App(a, b), App(c, d)) => a == c && b == d,
            _ => false,
        }
    }
}

impl Eq for PtsTerm {}

impl PtsTerm {
    pub fn var(x: impl Into<Name>) -> Self {
        PtsTerm::FVar(x.into())
    }

    pub fn sort(s: impl Into<Sort>) -> Self {
        PtsTerm::Sort(s.into())
    }

    pub fn pi(x: &str, a: PtsTerm, b: PtsTerm) -> Self {
        let n = Name::new(x);
        PtsTerm::Pi(n.clone(), Arc::new(a), Arc::new(b.abstract_at(&n, 0)))
    }

    pub fn lam(x: &str, a: PtsTerm, m: PtsTerm) -> Self {
        let n = Name::new(x);
        PtsTerm::Lam(n.clone(), Arc::new(a), Arc::new(m.abstract_at(&n, 0)))
    }

    pub fn app(f: PtsTerm, a: PtsTerm) -> Self {
        PtsTerm::App(Arc::new(f), Arc::new(a))
    }

    fn abstract_at(&self, x: &Name, depth: u32) -> PtsTerm {
        match self {
            PtsTerm::BVar(i) => PtsTerm::BVar(if *i >= depth { i + 1 } else { *i }),
            PtsTerm::FVar(y) if y == x => PtsTerm::BVar(depth),
            PtsTerm::FVar(_) | PtsTerm::Sort(_) => self.clone(),
            PtsTerm::Pi(n, a, b) => PtsTerm::Pi(n.clone(), Arc::new(a.abstract_at(x, depth)), Arc::new(b.abstract_at(x, depth + 1))),
            PtsTerm::Lam(n, a, b) => PtsTerm::Lam(n.clone(), Arc::new(a.abstract_at(x, depth)), Arc::new(b.abstract_at(x, depth + 1))),
            PtsTerm::App(f, a) => PtsTerm::App(Arc::new(f.abstract_at(x, depth)), Arc::new(a.abstract_at(x, depth))),
        }
    }

    fn shift(&self, d: u32, cutoff: u32) -> PtsTerm {
        match self {
            PtsTerm::BVar(i) if *i >= cutoff => PtsTerm::BVar(i + d),
            PtsTerm::BVar(_) | PtsTerm::FVar(_) | PtsTerm::Sort(_) => self.clone(),
            PtsTerm::Pi(n, a, b) => PtsTerm::Pi(n.clone(), Arc::new(a.shift(d, cutoff)), Arc::new(b.shift(d, cutoff + 1))),
            PtsTerm::Lam(n, a, b) => PtsTerm::Lam(n.clone(), Arc::new(a.shift(d, cutoff)), Arc::new(b.shift(d, cutoff + 1))),
            PtsTerm::App(f, a) => PtsTerm::App(Arc::new(f.shift(d, cutoff)), Arc::new(a.shift(d, cutoff))),
        }
    }

    pub fn instantiate(&self, arg: &PtsTerm) -> PtsTerm {
        self.inst_at(arg, 0)
    }

    fn inst_at(&self, arg: &PtsTerm, depth: u32) -> PtsTerm {
        match self {
            PtsTerm::BVar(i) if *i == depth => arg.shift(depth, 0),
            PtsTerm::BVar(i) if *i > depth => PtsTerm::BVar(i - 1),
            PtsTerm::BVar(_) | PtsTerm::FVar(_) | PtsTerm::Sort(_) => self.clone(),
            PtsTerm::Pi(n, a, b) => PtsTerm::Pi(n.clone(), Arc::new(a.inst_at(arg, depth)), Arc::new(b.inst_at(arg, depth + 1))),
            PtsTerm::Lam(n, a, b) => PtsTerm::Lam(n.clone(), Arc::new(a.inst_at(arg, depth)), Arc::new(b.inst_at(arg, depth + 1))),
            PtsTerm::App(f, a) => PtsTerm::App(Arc::new(f.inst_at(arg, depth)), Arc::new(a.inst_at(arg, depth))),
        }
    }

    pub fn free_vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        fn go(t: &PtsTerm, out: &mut Vec<Name>) {
            match t {
                PtsTerm::FVar(x) => {
                    if !out.contains(x) {
                        out.push(x.clone())
                    }
                }
                PtsTerm::BVar(_) | PtsTerm::Sort(_) => {}
                PtsTerm::Pi(_, a, b) | PtsTerm::Lam(_, a, b) | PtsTerm::App(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    /// Leftmost-outermost β step.
    pub fn step(&self) -> Option<PtsTerm> {
        match self {
            PtsTerm::App(f, a) => {
                if let PtsTerm::Lam(_, _, b) = &**f {
                    return Some(b.instantiate(a));
                }
                if let Some(f2) = f.step() {
                    return Some(PtsTerm::App(Arc::new(f2), a.clone()));
                }
                a.step().map(|a2| PtsTerm::App(f.clone(), Arc::new(a2)))
            }
            PtsTerm::Pi(n, a, b) | PtsTerm::Lam(n, a, b) => {
                let lam = matches!(self, PtsTerm::Lam(..));
                let mk = |a: Arc<PtsTerm>, b: Arc<PtsTerm>| {
                    if lam {
                        PtsTerm::Lam(n.clone(), a, b)
                    } else {
                        PtsTerm::Pi(n.clone(), a, b)
                    }
                };
                if let Some(a2) = a.step() {
                    return Some(mk(Arc::new(a2), b.clone()));
                }
                b.step().map(|b2| mk(a.clone(), Arc::new(b2)))
            }
            _ => None,
        }
    }

    /// Whether `self` reaches `target` in exactly one β step at some position.
    pub fn steps_to(&self, target: &PtsTerm) -> bool {
        self.one_step_reducts().iter().any(|r| r == target)
    }

    pub fn one_step_reducts(&self) -> Vec<PtsTerm> {
        let mut out = Vec::new();
        match self {
            PtsTerm::App(f, a) => {
                if let PtsTerm::Lam(_, _, b) = &**f {
                    out.push(b.instantiate(a));
                }
                for f2 in f.one_step_reducts() {
                    out.push(PtsTerm::App(Arc::new(f2), a.clone()));
                }
                for a2 in a.one_step_reducts() {
                    out.push(PtsTerm::App(f.clone(), Arc::new(a2)));
                }
            }
            PtsTerm::Pi(n, a, b) | PtsTerm::Lam(n, a, b) => {
                let lam = matches!(self, PtsTerm::Lam(..));
                let mk = |a: Arc<PtsTerm>, b: Arc<PtsTerm>| {
                    if lam {
                        PtsTerm::Lam(n.clone(), a, b)
                    } else {
                        PtsTerm::Pi(n.clone(), a, b)
                    }
                };
                for a2 in a.one_step_reducts() {
                    out.push(mk(Arc::new(a2), b.clone()));
                }
                for b2 in b.one_step_reducts() {
                    out.push(mk(a.clone(), Arc::new(b2)));
                }
            }
            _ => {}
        }
        out
    }
}

/// Drops sort subscripts and codomain annotations.
pub fn erase_to_pts(m: &EptsTerm) -> PtsTerm {
    match m {
        EptsTerm::BVar(i) => PtsTerm::BVar(*i),
        EptsTerm::FVar(x) => PtsTerm::FVar(x.clone()),
        EptsTerm::Sort(s) => PtsTerm::Sort(s.clone()),
        EptsTerm::Pi { dom, cod, .. } => {
            PtsTerm::Pi(cod.name.clone(), Arc::new(erase_to_pts(dom)), Arc::new(erase_to_pts(&cod.body)))
        }
        EptsTerm::Lam { dom, body, .. } => {
            PtsTerm::Lam(body.name.clone(), Arc::new(erase_to_pts(dom)), Arc::new(erase_to_pts(&body.body)))
        }
        EptsTerm::App { fun, arg, .. } => PtsTerm::App(Arc::new(erase_to_pts(fun)), Arc::new(erase_to_pts(arg))),
    }
}

struct Elaborator<'a> {
    checker: EptsChecker<'a>,
    spec: &'a SortSpec,
    ctx: EptsContext,
}

fn failed(msg: impl Into<String>) -> EptsError {
    EptsError::ElaborationFailed(msg.into())
}

impl Elaborator<'_> {
    fn fresh(&self, hint: &Name, body: &PtsTerm) -> Name {
        let fv = body.free_vars();
        fresh_name(hint.as_str(), |s| self.ctx.contains(s) || fv.iter().any(|v| v.as_str() == s))
    }

    fn sync(&mut self) {
        self.checker = EptsChecker::new(self.spec, &self.ctx, DEFAULT_FUEL);
    }

    fn infer(&mut self, m: &EptsTerm) -> Result<EptsTerm, EptsError> {
        self.checker.infer(m)
    }

    fn sort_of(&mut self, a: &EptsTerm) -> Result<Sort, EptsError> {
        self.checker.sort_of(a)
    }

    /// Elaborates `body` under `x : dom`; returns the binder-closed term and type.
    fn under(&mut self, name: &Name, dom: &EptsTerm, body: &PtsTerm) -> Result<(Name, EptsTerm, EptsTerm), EptsError> {
        let x = self.fresh(name, body);
        self.ctx.push(x.clone(), dom.clone());
        self.sync();
        let r = self.elab(&body.instantiate(&PtsTerm::FVar(x.clone())));
        self.ctx.pop();
        self.sync();
        let (m, ty) = r?;
        Ok((x, m, ty))
    }

    fn elab(&mut self, m: &PtsTerm) -> Result<(EptsTerm, EptsTerm), EptsError> {
        match m {
            PtsTerm::BVar(i) => Err(EptsError::DanglingIndex(*i)),
            PtsTerm::FVar(x) => {
                let t = EptsTerm::FVar(x.clone());
                let ty = self.infer(&t)?;
                Ok((t, ty))
            }
            PtsTerm::Sort(s) => {
                let t = EptsTerm::Sort(s.clone());
                let ty = self.infer(&t)?;
                Ok((t, ty))
            }
            PtsTerm::Pi(n, a, b) => {
                let (ea, _) = self.elab(a)?;
                let s1 = self.sort_of(&ea).map_err(|e| failed(format!("domain of product: {e}")))?;
                let (x, eb, _) = self.under(n, &ea, b)?;
                self.ctx.push(x.clone(), ea.clone());
                self.sync();
                let s2 = self.sort_of(&eb).map_err(|e| failed(format!("codomain of product: {e}")));
                self.ctx.pop();
                self.sync();
                let s2 = s2?;
                let t = EptsTerm::Pi { s1, s2, dom: Arc::new(ea), cod: named(&x, n, eb) };
                let ty = self.infer(&t)?;
                Ok((t, ty))
            }
            PtsTerm::Lam(n, a, body) => {
                let (ea, _) = self.elab(a)?;
                let s1 = self.sort_of(&ea).map_err(|e| failed(format!("domain of abstraction: {e}")))?;
                let (x, em, eb) = self.under(n, &ea, body)?;
                self.ctx.push(x.clone(), ea.clone());
                self.sync();
                let s2 = self.sort_of(&eb).map_err(|e| failed(format!("type of abstraction body: {e}")));
                self.ctx.pop();
                self.sync();
                let s2 = s2?;
                let t = EptsTerm::Lam { s1, s2, dom: Arc::new(ea), cod: named(&x, n, eb), body: named(&x, n, em) };
                let ty = self.infer(&t)?;
                Ok((t, ty))
            }
            PtsTerm::App(f, a) => {
                let (ef, tf) = self.elab(f)?;
                let (ea, ta) = self.elab(a)?;
                let pi = self.checker.whnf(&tf)?;
                let EptsTerm::Pi { s1, s2, dom, cod } = pi else {
                    return Err(failed(format!("applied term has non-product type {pi}")));
                };
                if !self.checker.convertible(&ta, &dom)? {
                    return Err(EptsError::TypeMismatch { expected: (*dom).clone(), found: ta });
                }
                let t = EptsTerm::App { s1, s2, dom, cod, fun: Arc::new(ef), arg: Arc::new(ea) };
                let ty = self.infer(&t)?;
                Ok((t, ty))
            }
        }
    }
}

/// Closes `body` over the free variable `x`, keeping the source binder name.
fn named(x: &Name, source: &Name, body: EptsTerm) -> Binder {
    Binder::raw(source.clone(), body.abstract_fvar(x))
}

/// Recovers annotations and sort pairs by inference. The result is one
/// representative; when `expected` is given the inferred type must be
/// convertible to its elaboration.
pub fn elaborate(
    spec: &SortSpec,
    ctx: &EptsContext,
    m: &PtsTerm,
    expected: Option<&PtsTerm>,
) -> Result<EptsTerm, EptsError> {
    let mut e = Elaborator { checker: EptsChecker::new(spec, ctx, DEFAULT_FUEL), spec, ctx: ctx.clone() };
    let (t, ty) = e.elab(m)?;
    if let Some(exp) = expected {
        let (ea, _) = e.elab(exp)?;
        if !e.checker.convertible(&ty, &ea)? {
            return Err(EptsError::TypeMismatch { expected: ea, found: ty });
        }
    }
    Ok(t)
}
