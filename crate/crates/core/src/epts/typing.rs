//! The explicitly-typed judgment: inference, checking up to β, and context
//! well-formedness.

use thiserror::Error;

use super::reduce::{self, ConversionError};
use super::sort::{SortSpec, SpecError};
use super::term::{Binder, EptsContext, EptsTerm, Sort};
use crate::reduce::{Budget, FuelExhausted, DEFAULT_FUEL};
use crate::term::{fresh_name, Name};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EptsError {
    #[error("unbound variable {0}")]
    UnboundVariable(Name),
    #[error("dangling bound variable #{0}")]
    DanglingIndex(u32),
    #[error("sort {0} is a top sort and has no type")]
    TopSortHasNoType(Sort),
    #[error("no product rule for ({s1}, {s2})")]
    SideConditionFailed { s1: Sort, s2: Sort },
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: EptsTerm, found: EptsTerm },
    #[error("{term} has type {ty}, which is not a sort")]
    NotAType { term: EptsTerm, ty: EptsTerm },
    #[error("variable {0} declared twice in the context")]
    DuplicateVariable(Name),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    FuelExhausted(#[from] FuelExhausted),
    #[error("elaboration failed: {0}")]
    ElaborationFailed(String),
}

impl From<ConversionError> for EptsError {
    fn from(e: ConversionError) -> Self {
        match e {
            ConversionError::Fuel(f) => EptsError::FuelExhausted(f),
            ConversionError::Spec(s) => EptsError::Spec(s),
        }
    }
}

pub struct EptsChecker<'a> {
    spec: &'a SortSpec,
    ctx: EptsContext,
    budget: Budget,
}

impl<'a> EptsChecker<'a> {
    pub fn new(spec: &'a SortSpec, ctx: &EptsContext, fuel: u64) -> Self {
        EptsChecker { spec, ctx: ctx.clone(), budget: Budget::new(fuel) }
    }

    pub fn context(&self) -> &EptsContext {
        &self.ctx
    }

    pub fn whnf(&mut self, t: &EptsTerm) -> Result<EptsTerm, EptsError> {
        Ok(reduce::whnf(t, &mut self.budget)?)
    }

    pub fn convertible(&mut self, a: &EptsTerm, b: &EptsTerm) -> Result<bool, EptsError> {
        Ok(reduce::convertible(self.spec, a, b, &mut self.budget)?)
    }

    fn fresh(&self, hint: &Name, avoid: &[&EptsTerm]) -> Name {
        fresh_name(hint.as_str(), |s| {
            self.ctx.contains(s) || avoid.iter().any(|t| t.free_vars().iter().any(|v| v.as_str() == s))
        })
    }

    /// Runs `f` with `x : ty` pushed, `x` fresh for everything in `avoid`.
    fn under<T>(
        &mut self,
        hint: &Name,
        ty: &EptsTerm,
        avoid: &[&EptsTerm],
        f: impl FnOnce(&mut Self, &Name) -> Result<T, EptsError>,
    ) -> Result<T, EptsError> {
        let x = self.fresh(hint, avoid);
        self.ctx.push(x.clone(), ty.clone());
        let r = f(self, &x);
        self.ctx.pop();
        r
    }

    /// The sort `s` such that `a : s`.
    pub fn sort_of(&mut self, a: &EptsTerm) -> Result<Sort, EptsError> {
        let t = self.infer(a)?;
        match self.whnf(&t)? {
            EptsTerm::Sort(s) => Ok(self.spec.canonical(&s)?),
            other => Err(EptsError::NotAType { term: a.clone(), ty: other }),
        }
    }

    fn check_sort(&mut self, a: &EptsTerm, s: &Sort) -> Result<(), EptsError> {
        let found = self.sort_of(a)?;
        if self.spec.same_sort(&found, s)? {
            Ok(())
        } else {
            Err(EptsError::TypeMismatch { expected: EptsTerm::Sort(s.clone()), found: EptsTerm::Sort(found) })
        }
    }

    fn product_rule(&self, s1: &Sort, s2: &Sort) -> Result<Sort, EptsError> {
        self.spec
            .rule(s1, s2)?
            .ok_or_else(|| EptsError::SideConditionFailed { s1: s1.clone(), s2: s2.clone() })
    }

    /// Premises shared by Π, λ and @: `A : s1`, `x:A ⊢ B : s2`, `(s1, s2, s3) ∈ R`.
    fn check_family(&mut self, s1: &Sort, s2: &Sort, dom: &EptsTerm, cod: &Binder) -> Result<Sort, EptsError> {
        self.check_sort(dom, s1)?;
        self.under(&cod.name, dom, &[&cod.body], |c, x| c.check_sort(&cod.body.open(x), s2))?;
        self.product_rule(s1, s2)
    }

    pub fn infer(&mut self, m: &EptsTerm) -> Result<EptsTerm, EptsError> {
        match m {
            EptsTerm::BVar(i) => Err(EptsError::DanglingIndex(*i)),
            EptsTerm::FVar(x) => self.ctx.lookup(x).cloned().ok_or_else(|| EptsError::UnboundVariable(x.clone())),
            EptsTerm::Sort(s) => match self.spec.axiom(s)? {
                Some(t) => Ok(EptsTerm::Sort(t)),
                None => Err(EptsError::TopSortHasNoType(s.clone())),
            },
            EptsTerm::Pi { s1, s2, dom, cod } => {
                let s3 = self.check_family(s1, s2, dom, cod)?;
                Ok(EptsTerm::Sort(s3))
            }
            EptsTerm::Lam { s1, s2, dom, cod, body } => {
                self.check_family(s1, s2, dom, cod)?;
                self.under(&body.name, dom, &[&cod.body, &body.body], |c, x| {
                    c.check(&body.body.open(x), &cod.body.open(x))
                })?;
                Ok(EptsTerm::Pi { s1: s1.clone(), s2: s2.clone(), dom: dom.clone(), cod: cod.clone() })
            }
            EptsTerm::App { s1, s2, dom, cod, fun, arg } => {
                self.check_family(s1, s2, dom, cod)?;
                let pi = EptsTerm::Pi { s1: s1.clone(), s2: s2.clone(), dom: dom.clone(), cod: cod.clone() };
                self.check(fun, &pi)?;
                self.check(arg, dom)?;
                Ok(cod.instantiate(arg))
            }
        }
    }

    pub fn check(&mut self, m: &EptsTerm, a: &EptsTerm) -> Result<(), EptsError> {
        let found = self.infer(m)?;
        if found == *a {
            return Ok(());
        }
        // the expected side must itself be a type
        self.sort_of(a)?;
        if self.convertible(&found, a)? {
            Ok(())
        } else {
            let found = self.whnf(&found)?;
            let expected = self.whnf(a)?;
            Err(EptsError::TypeMismatch { expected, found })
        }
    }
}

pub fn epts_infer(spec: &SortSpec, ctx: &EptsContext, m: &EptsTerm) -> Result<EptsTerm, EptsError> {
    epts_infer_with_fuel(spec, ctx, m, DEFAULT_FUEL)
}

pub fn epts_infer_with_fuel(spec: &SortSpec, ctx: &EptsContext, m: &EptsTerm, fuel: u64) -> Result<EptsTerm, EptsError> {
    EptsChecker::new(spec, ctx, fuel).infer(m)
}

pub fn epts_check(spec: &SortSpec, ctx: &EptsContext, m: &EptsTerm, a: &EptsTerm) -> Result<(), EptsError> {
    epts_check_with_fuel(spec, ctx, m, a, DEFAULT_FUEL)
}

pub fn epts_check_with_fuel(
    spec: &SortSpec,
    ctx: &EptsContext,
    m: &EptsTerm,
    a: &EptsTerm,
    fuel: u64,
) -> Result<(), EptsError> {
    EptsChecker::new(spec, ctx, fuel).check(m, a)
}

/// Sort `s` with `Γ ⊢ a : s`.
pub fn epts_sort_of(spec: &SortSpec, ctx: &EptsContext, a: &EptsTerm, fuel: u64) -> Result<Sort, EptsError> {
    EptsChecker::new(spec, ctx, fuel).sort_of(a)
}

/// Checks every entry's type against the prefix before it; returns the
/// sort of each type.
pub fn epts_check_context(spec: &SortSpec, ctx: &EptsContext, fuel: u64) -> Result<Vec<Sort>, (Name, EptsError)> {
    let mut sorts = Vec::new();
    for (i, (x, a)) in ctx.entries().iter().enumerate() {
        if ctx.entries()[..i].iter().any(|(y, _)| y == x) {
            return Err((x.clone(), EptsError::DuplicateVariable(x.clone())));
        }
        let prefix = EptsContext::from_entries(ctx.entries()[..i].to_vec());
        sorts.push(epts_sort_of(spec, &prefix, a, fuel).map_err(|e| (x.clone(), e))?);
    }
    Ok(sorts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epts::term::EptsTerm as E;

    fn system_f() -> SortSpec {
        SortSpec::finite(&["Type", "Kind"], &[("Type", "Kind")], &[("Type", "Type", "Type"), ("Kind", "Type", "Type")])
            .unwrap()
    }

    /// λ_{Kind,Type}(Type, A.Π_{Type,Type}(A, x.A), A.λ_{Type,Type}(A, x.A, x.x))
    fn poly_id() -> E {
        let a = E::var("A");
        let inner_ty = E::pi("Type", "Type", a.clone(), "x", a.clone());
        let inner = E::lam("Type", "Type", a.clone(), "x", a.clone(), E::var("x"));
        E::lam("Kind", "Type", E::sort("Type"), "A", inner_ty, inner)
    }

    fn poly_id_ty() -> E {
        let a = E::var("A");
        E::pi("Kind", "Type", E::sort("Type"), "A", E::pi("Type", "Type", a.clone(), "x", a))
    }

    #[test]
    fn sorts() {
        let f = system_f();
        assert_eq!(epts_infer(&f, &EptsContext::new(), &E::sort("Type")).unwrap(), E::sort("Kind"));
        assert!(matches!(
            epts_infer(&f, &EptsContext::new(), &E::sort("Kind")),
            Err(EptsError::TopSortHasNoType(_))
        ));
    }

    #[test]
    fn polymorphic_identity() {
        let f = system_f();
        assert_eq!(epts_infer(&f, &EptsContext::new(), &poly_id()).unwrap(), poly_id_ty());
        epts_check(&f, &EptsContext::new(), &poly_id(), &poly_id_ty()).unwrap();
        assert!(matches!(
            epts_check(&f, &EptsContext::new(), &poly_id(), &E::sort("Type")),
            Err(EptsError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn variables_and_side_conditions() {
        let f = system_f();
        let ctx = EptsContext::new().with("A", E::sort("Type")).with("x", E::var("A"));
        epts_check(&f, &ctx, &E::var("x"), &E::var("A")).unwrap();
        assert!(matches!(epts_infer(&f, &ctx, &E::var("y")), Err(EptsError::UnboundVariable(_))));
        // (Type, Kind) is not a product rule of System F
        let bad = E::pi("Type", "Kind", E::var("A"), "x", E::sort("Type"));
        assert!(matches!(epts_infer(&f, &ctx, &bad), Err(EptsError::SideConditionFailed { .. })));
        assert_eq!(epts_check_context(&f, &ctx, 1000).unwrap(), vec![Sort::new("Kind"), Sort::new("Type")]);
    }

    #[test]
    fn application_instantiates_codomain() {
        let f = system_f();
        let ctx = EptsContext::new().with("C", E::sort("Type"));
        let m = E::app("Kind", "Type", E::sort("Type"), "A", E::pi("Type", "Type", E::var("A"), "x", E::var("A")), poly_id(), E::var("C"));
        let ty = epts_infer(&f, &ctx, &m).unwrap();
        assert_eq!(ty, E::pi("Type", "Type", E::var("C"), "x", E::var("C")));
        let r = reduce::epts_step(&f, &m).unwrap();
        assert_eq!(r, E::lam("Type", "Type", E::var("C"), "x", E::var("C"), E::var("x")));
        epts_check(&f, &ctx, &r, &ty).unwrap();
    }
}
