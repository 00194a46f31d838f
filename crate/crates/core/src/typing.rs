//! The framework typing judgment: syntax-directed inference with conversion
//! folded into application, constant and checking sites.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::reduce::{convertible, whnf, Budget, FuelExhausted, DEFAULT_FUEL};
use crate::term::{fresh_name, Name, Term};
use crate::theory::{Label, Theory};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypingConfig {
    pub fuel: u64,
    pub trace: bool,
}

impl Default for TypingConfig {
    fn default() -> Self {
        TypingConfig { fuel: DEFAULT_FUEL, trace: false }
    }
}

impl TypingConfig {
    pub fn with_fuel(fuel: u64) -> Self {
        TypingConfig { fuel: fuel.max(1), trace: false }
    }
}

/// Ordered typing context; later entries may mention earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DkContext {
    entries: Vec<(Name, Term)>,
}

impl DkContext {
    pub fn new() -> Self {
        DkContext::default()
    }

    pub fn from_entries(entries: Vec<(Name, Term)>) -> Self {
        DkContext { entries }
    }

    pub fn push(&mut self, x: impl Into<Name>, ty: Term) {
        self.entries.push((x.into(), ty));
    }

    pub fn with(mut self, x: impl Into<Name>, ty: Term) -> Self {
        self.push(x, ty);
        self
    }

    pub fn entries(&self) -> &[(Name, Term)] {
        &self.entries
    }

    pub fn lookup(&self, x: &Name) -> Option<&Term> {
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
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TypeErrorKind {
    #[error("unbound variable {0}")]
    UnboundVariable(Name),
    #[error("dangling bound variable #{0}")]
    DanglingIndex(u32),
    #[error("unknown constant {0}")]
    UnknownConstant(Name),
    #[error("constant {constant} expects {expected} argument(s), found {found}")]
    ArityMismatch { constant: Name, expected: usize, found: usize },
    #[error("expected a product type, found {0}")]
    NotAProduct(Term),
    #[error("expected a sort, found {0}")]
    NotASort(Term),
    #[error("cannot convert {found} to {expected}")]
    ConversionFailure { expected: Term, found: Term },
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: Term, found: Term },
    #[error("KIND has no type")]
    KindHasNoType,
    #[error("variable {0} is declared twice")]
    DuplicateVariable(Name),
    #[error(transparent)]
    FuelExhausted(#[from] FuelExhausted),
}

/// A typing failure together with where it happened.
#[derive(Debug, Error, Clone, PartialEq)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    /// Child indices from the checked term down to the failing subterm.
    pub position: Vec<usize>,
    /// Names of the context (including opened binders) at the failure.
    pub context: Vec<Name>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if !self.position.is_empty() {
            let p: Vec<String> = self.position.iter().map(usize::to_string).collect();
            write!(f, " at subterm {}", p.join("."))?;
        }
        Ok(())
    }
}

impl TypeError {
    fn within(mut self, child: usize) -> Self {
        self.position.insert(0, child);
        self
    }
}

impl From<FuelExhausted> for TypeError {
    fn from(e: FuelExhausted) -> Self {
        TypeError { kind: e.into(), position: Vec::new(), context: Vec::new() }
    }
}

/// One typing session: a theory, a budget and a growing context.
pub struct Checker<'a> {
    theory: &'a Theory,
    budget: Budget,
    ctx: Vec<(Name, Term)>,
}

impl<'a> Checker<'a> {
    pub fn new(theory: &'a Theory, ctx: &DkContext, cfg: TypingConfig) -> Self {
        let budget = if cfg.trace { Budget::traced(cfg.fuel) } else { Budget::new(cfg.fuel) };
        Checker { theory, budget, ctx: ctx.entries.clone() }
    }

    pub fn trace(&self) -> &[Label] {
        self.budget.trace()
    }

    pub fn budget(&mut self) -> &mut Budget {
        &mut self.budget
    }

    fn err(&self, kind: TypeErrorKind) -> TypeError {
        TypeError { kind, position: Vec::new(), context: self.ctx.iter().map(|(x, _)| x.clone()).collect() }
    }

    fn lift<T>(&self, r: Result<T, FuelExhausted>) -> Result<T, TypeError> {
        r.map_err(|e| self.err(e.into()))
    }

    pub fn whnf(&mut self, t: &Term) -> Result<Term, TypeError> {
        let r = whnf(self.theory, t, &mut self.budget);
        self.lift(r)
    }

    pub fn convertible(&mut self, a: &Term, b: &Term) -> Result<bool, TypeError> {
        let r = convertible(self.theory, a, b, &mut self.budget);
        self.lift(r)
    }

    fn fresh(&self, hint: &Name, body: &Term) -> Name {
        let free = body.free_vars();
        fresh_name(hint.as_str(), |s| {
            self.ctx.iter().any(|(y, _)| y.as_str() == s) || self.theory.decl(s).is_some() || free.contains(s)
        })
    }

    /// Infers the type of a binder body after opening it with a fresh variable.
    fn under<T>(
        &mut self,
        hint: &Name,
        ty: &Term,
        body: &Term,
        f: impl FnOnce(&mut Self, &Term) -> Result<T, TypeError>,
    ) -> Result<(Name, T), TypeError> {
        let y = self.fresh(hint, body);
        let opened = body.open(&y);
        self.ctx.push((y.clone(), ty.clone()));
        let r = f(self, &opened);
        self.ctx.pop();
        r.map(|v| (y, v))
    }

    /// Expects `t` to have sort TYPE or KIND; returns that sort.
    fn sort_of(&mut self, t: &Term) -> Result<Term, TypeError> {
        let s = self.infer(t)?;
        let s = self.whnf(&s)?;
        match s {
            Term::Type | Term::Kind => Ok(s),
            other => Err(self.err(TypeErrorKind::NotASort(other))),
        }
    }

    fn expect_type(&mut self, t: &Term) -> Result<(), TypeError> {
        match self.sort_of(t)? {
            Term::Type => Ok(()),
            other => Err(self.err(TypeErrorKind::ConversionFailure { expected: Term::Type, found: other })),
        }
    }

    pub fn infer(&mut self, m: &Term) -> Result<Term, TypeError> {
        match m {
            Term::Type => Ok(Term::Kind),
            Term::Kind => Err(self.err(TypeErrorKind::KindHasNoType)),
            Term::BVar(i) => Err(self.err(TypeErrorKind::DanglingIndex(*i))),
            Term::FVar(x) => match self.ctx.iter().rev().find(|(y, _)| y == x) {
                Some((_, t)) => Ok(t.clone()),
                None => Err(self.err(TypeErrorKind::UnboundVariable(x.clone()))),
            },
            Term::Cons(c, args) => {
                let theory = self.theory;
                let decl = theory.decl(c.as_str()).ok_or_else(|| self.err(TypeErrorKind::UnknownConstant(c.clone())))?;
                if decl.arity() != args.len() {
                    return Err(self.err(TypeErrorKind::ArityMismatch {
                        constant: c.clone(),
                        expected: decl.arity(),
                        found: args.len(),
                    }));
                }
                let mut sub: HashMap<Name, Term> = HashMap::new();
                for (i, ((x, a), m)) in decl.telescope.iter().zip(args.iter()).enumerate() {
                    let expected = a.subst_many(&sub);
                    self.check_against(m, &expected).map_err(|e| e.within(i))?;
                    sub.insert(x.clone(), m.clone());
                }
                Ok(decl.ty.subst_many(&sub))
            }
            Term::App(f, n) => {
                let tf = self.infer(f).map_err(|e| e.within(0))?;
                match self.whnf(&tf)? {
                    Term::Pi(_, a, b) => {
                        self.check_against(n, &a).map_err(|e| e.within(1))?;
                        Ok(b.instantiate(n))
                    }
                    other => Err(self.err(TypeErrorKind::NotAProduct(other)).within(0)),
                }
            }
            Term::Pi(x, a, b) => {
                self.expect_type(a).map_err(|e| e.within(0))?;
                let (_, s) = self.under(x, a, b, |c, b| c.sort_of(b)).map_err(|e| e.within(1))?;
                Ok(s)
            }
            Term::Lam(x, a, body) => {
                self.expect_type(a).map_err(|e| e.within(0))?;
                let (y, tb) = self
                    .under(x, a, body, |c, body| {
                        let tb = c.infer(body)?;
                        c.sort_of(&tb)?;
                        Ok(tb)
                    })
                    .map_err(|e| e.within(1))?;
                Ok(Term::pi_raw(x.clone(), (**a).clone(), tb.abstract_fvar(&y)))
            }
        }
    }

    /// Checks `m` against a type already known to be well formed.
    fn check_against(&mut self, m: &Term, a: &Term) -> Result<(), TypeError> {
        let t = self.infer(m)?;
        if self.convertible(&t, a)? {
            Ok(())
        } else {
            Err(self.err(TypeErrorKind::ConversionFailure { expected: a.clone(), found: t }))
        }
    }

    pub fn check(&mut self, m: &Term, a: &Term) -> Result<(), TypeError> {
        let t = self.infer(m)?;
        if t == *a {
            return Ok(());
        }
        if *a != Term::Kind {
            self.sort_of(a)?;
        }
        if self.convertible(&t, a)? {
            Ok(())
        } else {
            let expected = self.whnf(a)?;
            let found = self.whnf(&t)?;
            Err(self.err(TypeErrorKind::TypeMismatch { expected, found }))
        }
    }
}

pub fn infer(theory: &Theory, ctx: &DkContext, m: &Term, cfg: TypingConfig) -> Result<Term, TypeError> {
    Checker::new(theory, ctx, cfg).infer(m)
}

pub fn check(theory: &Theory, ctx: &DkContext, m: &Term, a: &Term, cfg: TypingConfig) -> Result<(), TypeError> {
    Checker::new(theory, ctx, cfg).check(m, a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextDiagnostic {
    pub var: Name,
    pub error: TypeError,
}

impl fmt::Display for ContextDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "context entry {}: {}", self.var, self.error)
    }
}

/// Each entry must be a TYPE-sorted type under its prefix; names must be distinct.
pub fn check_context(theory: &Theory, ctx: &DkContext, cfg: TypingConfig) -> Vec<ContextDiagnostic> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, (x, a)) in ctx.entries.iter().enumerate() {
        let prefix = DkContext { entries: ctx.entries[..i].to_vec() };
        let mut c = Checker::new(theory, &prefix, cfg);
        if !seen.insert(x.clone()) {
            out.push(ContextDiagnostic { var: x.clone(), error: c.err(TypeErrorKind::DuplicateVariable(x.clone())) });
            continue;
        }
        if let Err(error) = c.expect_type(a) {
            out.push(ContextDiagnostic { var: x.clone(), error });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignatureDiagnostic {
    pub constant: Name,
    pub error: TypeError,
}

impl fmt::Display for SignatureDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "declaration of {}: {}", self.constant, self.error)
    }
}

/// Every declaration is checked against the signature that precedes it.
pub fn check_signature(theory: &Theory, cfg: TypingConfig) -> Vec<SignatureDiagnostic> {
    let mut out = Vec::new();
    for (i, d) in theory.decls().iter().enumerate() {
        let prefix = theory.prefix(i);
        let tele = DkContext { entries: d.telescope.clone() };
        if let Some(first) = check_context(&prefix, &tele, cfg).into_iter().next() {
            out.push(SignatureDiagnostic { constant: d.name.clone(), error: first.error });
            continue;
        }
        let mut c = Checker::new(&prefix, &tele, cfg);
        if let Err(error) = c.sort_of(&d.ty) {
            out.push(SignatureDiagnostic { constant: d.name.clone(), error });
        }
    }
    out
}
