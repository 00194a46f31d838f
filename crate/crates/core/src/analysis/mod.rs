//! Static analyses on theories: constant levels, the kind / type family /
//! object stratification, arity preservation of type-level rules, and the
//! erasure into simply-typed λ-calculus.

mod erasure;
mod stlc;

use std::fmt;

use thiserror::Error;

pub use erasure::{erase_context, erased_path, erase_signature, erase_term, erase_type};
pub use stlc::{stlc_check, SimpleType, StlcConst, StlcContext, StlcTerm};

use crate::term::{Name, Term};
use crate::theory::{RewriteRule, Theory};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("unknown constant {0}")]
    UnknownConstant(Name),
    #[error("{0} is outside the domain of the erasure")]
    NotErasable(Term),
    #[error("declaration of {constant} cannot be erased: {source}")]
    Declaration { constant: Name, source: Box<AnalysisError> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstantLevel {
    TypeLevel,
    ObjectLevel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyntacticClass {
    Kind,
    TypeFamily,
    Object,
    Unclassified,
}

impl fmt::Display for SyntacticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntacticClass::Kind => "kind",
            SyntacticClass::TypeFamily => "type family",
            SyntacticClass::Object => "object",
            SyntacticClass::Unclassified => "unclassified",
        })
    }
}

/// Type-level iff the declared type is an iterated product ending in TYPE.
pub fn constant_level(theory: &Theory, c: &str) -> Result<ConstantLevel, AnalysisError> {
    let d = theory.decl(c).ok_or_else(|| AnalysisError::UnknownConstant(c.into()))?;
    let mut t = &d.ty;
    while let Term::Pi(_, _, b) = t {
        t = b;
    }
    Ok(if *t == Term::Type { ConstantLevel::TypeLevel } else { ConstantLevel::ObjectLevel })
}

fn level(theory: &Theory, c: &str) -> Option<ConstantLevel> {
    constant_level(theory, c).ok()
}

fn is_kind(theory: &Theory, t: &Term) -> bool {
    match t {
        Term::Type => true,
        Term::Pi(_, a, b) => is_family(theory, a) && is_kind(theory, b),
        _ => false,
    }
}

fn is_family(theory: &Theory, t: &Term) -> bool {
    match t {
        Term::Cons(c, args) => {
            level(theory, c.as_str()) == Some(ConstantLevel::TypeLevel) && args.iter().all(|a| is_object(theory, a))
        }
        Term::App(f, o) => is_family(theory, f) && is_object(theory, o),
        Term::Lam(_, a, b) | Term::Pi(_, a, b) => is_family(theory, a) && is_family(theory, b),
        _ => false,
    }
}

fn is_object(theory: &Theory, t: &Term) -> bool {
    match t {
        Term::BVar(_) | Term::FVar(_) => true,
        Term::Cons(c, args) => {
            level(theory, c.as_str()) == Some(ConstantLevel::ObjectLevel) && args.iter().all(|a| is_object(theory, a))
        }
        Term::App(f, a) => is_object(theory, f) && is_object(theory, a),
        Term::Lam(_, a, b) => is_family(theory, a) && is_object(theory, b),
        _ => false,
    }
}

pub fn classify(theory: &Theory, m: &Term) -> SyntacticClass {
    if is_kind(theory, m) {
        SyntacticClass::Kind
    } else if is_family(theory, m) {
        SyntacticClass::TypeFamily
    } else if is_object(theory, m) {
        SyntacticClass::Object
    } else {
        SyntacticClass::Unclassified
    }
}

/// A type-level rule whose right-hand side leaves the required grammar.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleShapeIssue {
    pub rule: Name,
    pub offending: Term,
    /// Erasures of the two sides, when defined.
    pub lhs_erasure: Option<SimpleType>,
    pub rhs_erasure: Option<SimpleType>,
}

impl fmt::Display for RuleShapeIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}: right-hand side leaves the grammar at {}", self.rule, self.offending)?;
        let show = |s: &Option<SimpleType>| s.as_ref().map_or("undefined".to_string(), |s| s.to_string());
        write!(f, " (erasures: left {} vs right {})", show(&self.lhs_erasure), show(&self.rhs_erasure))
    }
}

/// First subterm of `r` outside `R ::= α[M⃗] | R N | λx:A.R` (plus `Πx:R.R` if `with_pi`).
fn offending<'t>(theory: &Theory, r: &'t Term, with_pi: bool) -> Option<&'t Term> {
    match r {
        Term::Cons(c, _) if level(theory, c.as_str()) == Some(ConstantLevel::TypeLevel) => None,
        Term::App(f, _) => offending(theory, f, with_pi),
        Term::Lam(_, _, b) => offending(theory, b, with_pi),
        Term::Pi(_, a, b) if with_pi => offending(theory, a, with_pi).or_else(|| offending(theory, b, with_pi)),
        _ => Some(r),
    }
}

fn rule_shapes(theory: &Theory, with_pi: bool) -> Vec<RuleShapeIssue> {
    let type_level = |r: &&RewriteRule| level(theory, r.head.as_str()) == Some(ConstantLevel::TypeLevel);
    theory
        .rules()
        .iter()
        .filter(type_level)
        .filter_map(|r| {
            offending(theory, &r.rhs, with_pi).map(|o| RuleShapeIssue {
                rule: r.name.clone(),
                offending: o.clone(),
                lhs_erasure: erase_type(theory, &r.lhs_term()).ok(),
                rhs_erasure: erase_type(theory, &r.rhs).ok(),
            })
        })
        .collect()
}

pub fn check_arity_preserving(theory: &Theory) -> Vec<RuleShapeIssue> {
    rule_shapes(theory, false)
}

pub fn check_rules_well_formed(theory: &Theory) -> Vec<RuleShapeIssue> {
    rule_shapes(theory, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{Decl, Pattern};

    /// Nat : U, El[A:U] : TYPE, Prod[A:U; B: El A -> U] : U
    fn el_prod() -> Theory {
        let mut t = Theory::new();
        let u = || Term::constant("U");
        let el = |a| Term::cons("El", vec![a]);
        t.declare(Decl::new("U", vec![], Term::Type)).unwrap();
        t.declare(Decl::new("El", vec![("A".into(), u())], Term::Type)).unwrap();
        t.declare(Decl::new("Nat", vec![], u())).unwrap();
        t.declare(Decl::new(
            "Prod",
            vec![("A".into(), u()), ("B".into(), Term::arrow(el(Term::var("A")), u()))],
            u(),
        ))
        .unwrap();
        t
    }

    #[test]
    fn levels() {
        let t = el_prod();
        assert_eq!(constant_level(&t, "El").unwrap(), ConstantLevel::TypeLevel);
        assert_eq!(constant_level(&t, "U").unwrap(), ConstantLevel::TypeLevel);
        assert_eq!(constant_level(&t, "Prod").unwrap(), ConstantLevel::ObjectLevel);
        assert!(constant_level(&t, "nope").is_err());
    }

    #[test]
    fn grammar_classes() {
        let t = el_prod();
        let el_a = Term::cons("El", vec![Term::var("A")]);
        assert_eq!(classify(&t, &Term::pi("x", el_a.clone(), Term::Type)), SyntacticClass::Kind);
        assert_eq!(classify(&t, &el_a), SyntacticClass::TypeFamily);
        assert_eq!(classify(&t, &Term::constant("Nat")), SyntacticClass::Object);
        assert_eq!(classify(&t, &Term::Kind), SyntacticClass::Unclassified);
        // an object in type position is not a family
        assert_eq!(classify(&t, &Term::pi("x", Term::constant("Nat"), Term::Type)), SyntacticClass::Unclassified);
    }

    #[test]
    fn traditional_rule_is_not_arity_preserving() {
        let mut t = el_prod();
        let el = |a| Term::cons("El", vec![a]);
        let rhs = Term::pi("x", el(Term::var("A")), el(Term::app(Term::var("B"), Term::var("x"))));
        t.add_rule(RewriteRule::new(
            "el-prod",
            "El",
            vec![Pattern::Cons("Prod".into(), vec![Pattern::Var("A".into()), Pattern::Var("B".into())])],
            rhs,
        ))
        .unwrap();
        let issues = check_arity_preserving(&t);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].rule.as_str(), "el-prod");
        assert!(matches!(issues[0].offending, Term::Pi(..)));
        assert_eq!(issues[0].lhs_erasure, Some(SimpleType::Star));
        assert_eq!(issues[0].rhs_erasure, Some(SimpleType::arrow(SimpleType::Star, SimpleType::Star)));
        assert!(check_rules_well_formed(&t).is_empty());
    }

    #[test]
    fn lambda_wrapped_head_is_fine_and_type_is_not() {
        let mut t = el_prod();
        t.declare(Decl::new("c", vec![], Term::constant("U"))).unwrap();
        t.declare(Decl::new("E2", vec![("A".into(), Term::constant("U"))], Term::Type)).unwrap();
        let lam = Term::lam("x", Term::constant("U"), Term::cons("El", vec![Term::var("x")]));
        t.add_rule(RewriteRule::new("wrap", "El", vec![Pattern::Cons("c".into(), vec![])], lam)).unwrap();
        assert!(check_arity_preserving(&t).is_empty());
        t.add_rule(RewriteRule::new("ty", "E2", vec![Pattern::Cons("c".into(), vec![])], Term::Type)).unwrap();
        assert_eq!(check_rules_well_formed(&t).len(), 1);
        assert_eq!(check_rules_well_formed(&t)[0].offending, Term::Type);
    }
}
