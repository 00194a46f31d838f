//! Theory morphisms: a body `F_c` over the target signature for every source
//! constant `c`, with free variables among the telescope variables of `c`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::encode::{names, EncodeError, EncodingMode, EncodingTheory};
use crate::epts::Sort;
use crate::reduce::{step, Budget};
use crate::term::{Name, Term};
use crate::theory::{Decl, Theory};
use crate::typing::{check, check_context, DkContext, TypingConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MorphismError {
    #[error("no body for source constant {0}")]
    MissingBody(Name),
    #[error("{0} is not a source constant")]
    UnknownConstant(Name),
    #[error("duplicate body for {0}")]
    DuplicateBody(Name),
    #[error("body of {constant} has free variables outside its telescope: {vars:?}")]
    StrayVariables { constant: Name, vars: Vec<Name> },
    #[error("constant {constant} applied to {found} arguments, declared with {expected}")]
    ArityMismatch { constant: Name, expected: usize, found: usize },
    #[error("sort {0} has no representation in the target")]
    UnrepresentableSort(Sort),
    #[error("the source must be a finite encoding and the target an internalized one")]
    WrongModes,
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoryMorphism {
    pub source: Theory,
    pub target: Theory,
    bodies: Vec<(Name, Term)>,
}

impl TheoryMorphism {
    /// Bodies are reordered to follow the source declarations.
    pub fn new(source: Theory, target: Theory, bodies: Vec<(Name, Term)>) -> Result<Self, MorphismError> {
        let mut table: HashMap<Name, Term> = HashMap::new();
        for (c, f) in bodies {
            let Some(d) = source.decl(c.as_str()) else {
                return Err(MorphismError::UnknownConstant(c));
            };
            let allowed: Vec<Name> = d.telescope.iter().map(|(x, _)| x.clone()).collect();
            let stray: Vec<Name> = f.free_vars().into_iter().filter(|x| !allowed.contains(x)).collect();
            if !stray.is_empty() {
                return Err(MorphismError::StrayVariables { constant: c, vars: stray });
            }
            if table.insert(c.clone(), f).is_some() {
                return Err(MorphismError::DuplicateBody(c));
            }
        }
        let mut ordered = Vec::new();
        for d in source.decls() {
            let f = table.remove(&d.name).ok_or_else(|| MorphismError::MissingBody(d.name.clone()))?;
            ordered.push((d.name.clone(), f));
        }
        Ok(TheoryMorphism { source, target, bodies: ordered })
    }

    /// `F_c = c[Δ_c variables]`.
    pub fn identity(theory: &Theory) -> Self {
        let bodies = theory.decls().iter().map(|d| (d.name.clone(), d.generic_instance())).collect();
        TheoryMorphism { source: theory.clone(), target: theory.clone(), bodies }
    }

    pub fn bodies(&self) -> &[(Name, Term)] {
        &self.bodies
    }

    pub fn body(&self, c: &str) -> Option<&Term> {
        self.bodies.iter().find(|(n, _)| n.as_str() == c).map(|(_, t)| t)
    }

    pub fn apply(&self, m: &Term) -> Result<Term, MorphismError> {
        match m {
            Term::BVar(_) | Term::FVar(_) | Term::Type | Term::Kind => Ok(m.clone()),
            Term::Cons(c, args) => {
                let d = self.source.decl(c.as_str()).ok_or_else(|| MorphismError::MissingBody(c.clone()))?;
                if d.arity() != args.len() {
                    return Err(MorphismError::ArityMismatch {
                        constant: c.clone(),
                        expected: d.arity(),
                        found: args.len(),
                    });
                }
                let body = self.body(c.as_str()).ok_or_else(|| MorphismError::MissingBody(c.clone()))?;
                let mut map = HashMap::new();
                for ((x, _), a) in d.telescope.iter().zip(args.iter()) {
                    map.insert(x.clone(), self.apply(a)?);
                }
                Ok(body.subst_many(&map))
            }
            _ => {
                let kids = m.children().into_iter().map(|k| self.apply(k)).collect::<Result<Vec<_>, _>>()?;
                Ok(m.with_children(kids))
            }
        }
    }

    pub fn apply_ctx(&self, ctx: &DkContext) -> Result<DkContext, MorphismError> {
        let mut out = DkContext::new();
        for (x, a) in ctx.entries() {
            out.push(x.clone(), self.apply(a)?);
        }
        Ok(out)
    }

    fn telescope_ctx(&self, d: &Decl) -> Result<DkContext, MorphismError> {
        self.apply_ctx(&DkContext::from_entries(d.telescope.clone()))
    }
}

pub fn apply_morphism(f: &TheoryMorphism, m: &Term) -> Result<Term, MorphismError> {
    f.apply(m)
}

/// A failed morphism condition.
#[derive(Clone, Debug, PartialEq)]
pub enum MorphismDiagnostic {
    /// `|Δ_c| ⊢ F_c : |A_c|` fails.
    IllTyped { constant: Name, error: String },
    /// `|l|` and `|r|` have distinct normal forms.
    Refuted { rule: Name, lhs: Term, rhs: Term },
    /// The search ran out of fuel or reached a normal form of `|l|` without
    /// meeting `|r|`, which it cannot tell apart from a missing path.
    Inconclusive { rule: Name, reason: String },
    Apply { item: Name, error: MorphismError },
}

impl MorphismDiagnostic {
    pub fn is_refutation(&self) -> bool {
        !matches!(self, MorphismDiagnostic::Inconclusive { .. })
    }
}

impl fmt::Display for MorphismDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismDiagnostic::IllTyped { constant, error } => write!(f, "constant {constant}: {error}"),
            MorphismDiagnostic::Refuted { rule, lhs, rhs } => {
                write!(f, "rule {rule}: {lhs} does not reduce to {rhs}")
            }
            MorphismDiagnostic::Inconclusive { rule, reason } => write!(f, "rule {rule}: inconclusive, {reason}"),
            MorphismDiagnostic::Apply { item, error } => write!(f, "{item}: {error}"),
        }
    }
}

/// Outcome of the reduction search from `from` toward `to`.
#[derive(Clone, Debug, PartialEq)]
pub enum Reach {
    Reached { steps: usize },
    Refuted { normal_from: Term, normal_to: Term },
    Inconclusive(String),
}

/// Leftmost-outermost reduction of `from`, comparing with `to` after every step.
pub fn reduction_search(theory: &Theory, from: &Term, to: &Term, fuel: u64) -> Reach {
    let mut budget = Budget::new(fuel);
    let mut cur = from.clone();
    let mut steps = 0;
    loop {
        if cur == *to {
            return Reach::Reached { steps };
        }
        match step(theory, &cur) {
            Some((next, label)) => {
                if budget.tick(&label).is_err() {
                    return Reach::Inconclusive(format!("fuel exhausted after {steps} steps"));
                }
                cur = next;
                steps += 1;
            }
            None => break,
        }
    }
    // `cur` is normal; under confluence any reduct of `from` joins it
    let normal_to = match crate::reduce::nf_with_fuel(theory, to, &crate::reduce::RuleFilter::All, fuel) {
        Ok(t) => t,
        Err(_) => return Reach::Inconclusive("fuel exhausted normalizing the target".into()),
    };
    if normal_to != cur {
        Reach::Refuted { normal_from: cur, normal_to }
    } else {
        Reach::Inconclusive("the leftmost-outermost path missed the target".into())
    }
}

/// Both morphism conditions for every constant and rule. Empty when they hold.
pub fn verify_morphism(f: &TheoryMorphism, cfg: TypingConfig) -> Vec<MorphismDiagnostic> {
    let mut out = Vec::new();
    for (c, body) in f.bodies() {
        let d = f.source.decl(c.as_str()).expect("bodies follow source declarations");
        let ctx = match f.telescope_ctx(d) {
            Ok(ctx) => ctx,
            Err(error) => {
                out.push(MorphismDiagnostic::Apply { item: c.clone(), error });
                continue;
            }
        };
        if let Some(diag) = check_context(&f.target, &ctx, cfg.clone()).into_iter().next() {
            out.push(MorphismDiagnostic::IllTyped { constant: c.clone(), error: diag.to_string() });
            continue;
        }
        let ty = match f.apply(&d.ty) {
            Ok(t) => t,
            Err(error) => {
                out.push(MorphismDiagnostic::Apply { item: c.clone(), error });
                continue;
            }
        };
        if let Err(e) = check(&f.target, &ctx, body, &ty, cfg.clone()) {
            out.push(MorphismDiagnostic::IllTyped { constant: c.clone(), error: e.to_string() });
        }
    }
    for r in f.source.rules() {
        let sides = f.apply(&r.lhs_term()).and_then(|l| Ok((l, f.apply(&r.rhs)?)));
        let (l, rhs) = match sides {
            Ok(p) => p,
            Err(error) => {
                out.push(MorphismDiagnostic::Apply { item: r.name.clone(), error });
                continue;
            }
        };
        match reduction_search(&f.target, &l, &rhs, cfg.fuel) {
            Reach::Reached { .. } => {}
            Reach::Refuted { normal_from, normal_to } => {
                out.push(MorphismDiagnostic::Refuted { rule: r.name.clone(), lhs: normal_from, rhs: normal_to })
            }
            Reach::Inconclusive(reason) => out.push(MorphismDiagnostic::Inconclusive { rule: r.name.clone(), reason }),
        }
    }
    out
}

/// The interpretation of a finite encoding in an internalized one: every
/// sort-indexed constant becomes its sort-parametric counterpart applied to
/// the sort representations.
pub fn build_phi(finite: &EncodingTheory, internalized: &EncodingTheory) -> Result<TheoryMorphism, MorphismError> {
    if finite.mode != EncodingMode::Finite || internalized.mode != EncodingMode::Internalized {
        return Err(MorphismError::WrongModes);
    }
    let spec = finite.spec().as_finite().ok_or(MorphismError::WrongModes)?;
    let dot = |s: &Sort| {
        internalized.sort_term(s).map_err(|e| match e {
            EncodeError::UnknownSort(_) | EncodeError::Spec(_) => MorphismError::UnrepresentableSort(s.clone()),
            e => e.into(),
        })
    };
    let v = |x: &str| Term::var(x);
    let mut bodies = Vec::new();
    for s in spec.sorts() {
        bodies.push((names::indexed(names::U, &[s]).into(), Term::cons(names::U, vec![dot(s)?])));
        bodies.push((names::indexed(names::EL, &[s]).into(), Term::cons(names::EL, vec![dot(s)?, v("A")])));
    }
    for (s1, _) in spec.axioms() {
        bodies.push((names::indexed(names::CODE, &[&s1]).into(), Term::cons(names::CODE, vec![dot(&s1)?])));
    }
    for (s1, s2, _) in spec.rules() {
        let pre = || -> Result<Vec<Term>, MorphismError> { Ok(vec![dot(&s1)?, dot(&s2)?]) };
        let with = |extra: &[&str]| -> Result<Vec<Term>, MorphismError> {
            let mut a = pre()?;
            a.extend(extra.iter().map(|x| v(x)));
            Ok(a)
        };
        bodies.push((names::indexed(names::PROD, &[&s1, &s2]).into(), Term::cons(names::PROD, with(&["A", "B"])?)));
        bodies.push((names::indexed(names::ABS, &[&s1, &s2]).into(), Term::cons(names::ABS, with(&["A", "B", "M"])?)));
        bodies.push((
            names::indexed(names::APP, &[&s1, &s2]).into(),
            Term::cons(names::APP, with(&["A", "B", "M", "N"])?),
        ));
    }
    TheoryMorphism::new(finite.theory.clone(), internalized.theory.clone(), bodies)
}
