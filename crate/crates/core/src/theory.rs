//! Signatures and rewrite rules.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::term::{ConstId, Name, Term};

/// A constant declaration `c[x1:A1; …; xn:An] : A`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decl {
    pub name: ConstId,
    pub telescope: Vec<(Name, Term)>,
    pub ty: Term,
}

impl Decl {
    pub fn new(name: impl Into<Name>, telescope: Vec<(Name, Term)>, ty: Term) -> Self {
        Decl { name: name.into(), telescope, ty }
    }

    pub fn arity(&self) -> usize {
        self.telescope.len()
    }

    /// The application of the constant to its own telescope variables.
    pub fn generic_instance(&self) -> Term {
        Term::Cons(self.name.clone(), self.telescope.iter().map(|(x, _)| Term::FVar(x.clone())).collect())
    }
}

/// First-order left-hand-side pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    Var(Name),
    Cons(ConstId, Vec<Pattern>),
}

impl Pattern {
    pub fn to_term(&self) -> Term {
        match self {
            Pattern::Var(x) => Term::FVar(x.clone()),
            Pattern::Cons(c, ps) => Term::cons(c.clone(), ps.iter().map(Pattern::to_term).collect()),
        }
    }

    /// Metavariables in left-to-right order, with repetitions.
    pub fn vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Name>) {
        match self {
            Pattern::Var(x) => out.push(x.clone()),
            Pattern::Cons(_, ps) => ps.iter().for_each(|p| p.collect_vars(out)),
        }
    }

    pub fn subpattern(&self, path: &[usize]) -> Option<&Pattern> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => match self {
                Pattern::Cons(_, ps) => ps.get(i)?.subpattern(rest),
                Pattern::Var(_) => None,
            },
        }
    }

    /// Paths of all constant-headed positions, in preorder.
    pub fn cons_positions(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        fn go(p: &Pattern, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if let Pattern::Cons(_, ps) = p {
                out.push(path.clone());
                for (i, q) in ps.iter().enumerate() {
                    path.push(i);
                    go(q, path, out);
                    path.pop();
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

/// Reduction label: the framework's own β or a named rewrite rule.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Beta,
    Rule(Name),
}

impl Label {
    pub fn rule(name: impl Into<Name>) -> Label {
        Label::Rule(name.into())
    }

    /// The label up to its first `@`: `beta@Type@Kind` belongs to family `beta`.
    pub fn family(&self) -> &str {
        match self {
            Label::Beta => "β",
            Label::Rule(n) => n.as_str().split('@').next().unwrap_or(""),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Beta => f.write_str("β"),
            Label::Rule(n) => write!(f, "{n}"),
        }
    }
}

/// `head[args] ↪ rhs`; metavariables are the free variables of the patterns.
#[derive(Clone, Debug, PartialEq)]
pub struct RewriteRule {
    pub name: Name,
    pub head: ConstId,
    pub args: Vec<Pattern>,
    pub rhs: Term,
}

impl RewriteRule {
    pub fn new(name: impl Into<Name>, head: impl Into<Name>, args: Vec<Pattern>, rhs: Term) -> Self {
        RewriteRule { name: name.into(), head: head.into(), args, rhs }
    }

    pub fn label(&self) -> Label {
        Label::Rule(self.name.clone())
    }

    pub fn lhs(&self) -> Pattern {
        Pattern::Cons(self.head.clone(), self.args.clone())
    }

    pub fn lhs_term(&self) -> Term {
        self.lhs().to_term()
    }

    pub fn metavars(&self) -> Vec<Name> {
        self.lhs().vars()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("constant {0} is declared twice")]
    DuplicateConstant(Name),
    #[error("unknown constant {constant} in {site}")]
    UnknownConstant { constant: Name, site: String },
    #[error("constant {constant} expects {expected} argument(s) but is given {found} in {site}")]
    ArityMismatch { constant: Name, expected: usize, found: usize, site: String },
    #[error("telescope variable {var} of {constant} is repeated")]
    DuplicateTelescopeVar { constant: Name, var: Name },
    #[error("variable {var} is not in scope in {site}")]
    OutOfScope { var: Name, site: String },
    #[error("right-hand side of rule {rule} mentions {var}, which is not a left-hand-side variable")]
    RhsFreeVariable { rule: Name, var: Name },
    #[error("dangling bound variable in {0}")]
    DanglingIndex(String),
}

/// A signature (ordered declarations) together with rewrite rules.
#[derive(Clone, Debug, Default)]
pub struct Theory {
    decls: Vec<Decl>,
    index: HashMap<ConstId, usize>,
    rules: Vec<RewriteRule>,
    by_head: HashMap<ConstId, Vec<usize>>,
}

impl PartialEq for Theory {
    fn eq(&self, other: &Self) -> bool {
        self.decls == other.decls && self.rules == other.rules
    }
}

impl Theory {
    pub fn new() -> Self {
        Theory::default()
    }

    pub fn decls(&self) -> &[Decl] {
        &self.decls
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn decl(&self, c: &str) -> Option<&Decl> {
        self.index.get(c).map(|&i| &self.decls[i])
    }

    pub fn position(&self, c: &str) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn arity(&self, c: &str) -> Option<usize> {
        self.decl(c).map(Decl::arity)
    }

    pub fn rules_for(&self, c: &str) -> impl Iterator<Item = &RewriteRule> {
        self.by_head.get(c).into_iter().flatten().map(move |&i| &self.rules[i])
    }

    pub fn has_rules_for(&self, c: &str) -> bool {
        self.by_head.get(c).is_some_and(|v| !v.is_empty())
    }

    fn check_constants(&self, t: &Term, this: Option<(&Name, usize)>, site: &str) -> Result<(), TheoryError> {
        for (c, n) in t.constants() {
            let expected = match this {
                Some((me, k)) if *me == c => k,
                _ => self.arity(c.as_str()).ok_or_else(|| TheoryError::UnknownConstant {
                    constant: c.clone(),
                    site: site.to_string(),
                })?,
            };
            if expected != n {
                return Err(TheoryError::ArityMismatch { constant: c, expected, found: n, site: site.to_string() });
            }
        }
        Ok(())
    }

    fn check_pattern(&self, p: &Pattern, site: &str) -> Result<(), TheoryError> {
        self.check_constants(&p.to_term(), None, site)
    }

    /// Appends a declaration. Its types may mention itself and earlier constants.
    pub fn declare(&mut self, decl: Decl) -> Result<(), TheoryError> {
        if self.index.contains_key(&decl.name) {
            return Err(TheoryError::DuplicateConstant(decl.name));
        }
        let site = format!("declaration of {}", decl.name);
        let me = Some((&decl.name, decl.arity()));
        let mut seen: BTreeSet<Name> = BTreeSet::new();
        for (x, a) in &decl.telescope {
            self.check_scoped(a, &seen, me, &site)?;
            if !seen.insert(x.clone()) {
                return Err(TheoryError::DuplicateTelescopeVar { constant: decl.name.clone(), var: x.clone() });
            }
        }
        self.check_scoped(&decl.ty, &seen, me, &site)?;
        self.index.insert(decl.name.clone(), self.decls.len());
        self.decls.push(decl);
        Ok(())
    }

    fn check_scoped(
        &self,
        t: &Term,
        scope: &BTreeSet<Name>,
        me: Option<(&Name, usize)>,
        site: &str,
    ) -> Result<(), TheoryError> {
        if !t.is_locally_closed() {
            return Err(TheoryError::DanglingIndex(site.to_string()));
        }
        if let Some(x) = t.free_vars().into_iter().find(|x| !scope.contains(x)) {
            return Err(TheoryError::OutOfScope { var: x, site: site.to_string() });
        }
        self.check_constants(t, me, site)
    }

    pub fn add_rule(&mut self, rule: RewriteRule) -> Result<(), TheoryError> {
        let site = format!("rule {}", rule.name);
        self.check_pattern(&rule.lhs(), &site)?;
        let vars: BTreeSet<Name> = rule.metavars().into_iter().collect();
        if !rule.rhs.is_locally_closed() {
            return Err(TheoryError::DanglingIndex(site));
        }
        if let Some(x) = rule.rhs.free_vars().into_iter().find(|x| !vars.contains(x)) {
            return Err(TheoryError::RhsFreeVariable { rule: rule.name.clone(), var: x });
        }
        self.check_constants(&rule.rhs, None, &site)?;
        self.by_head.entry(rule.head.clone()).or_default().push(self.rules.len());
        self.rules.push(rule);
        Ok(())
    }

    /// The first `n` declarations together with the rules mentioning only them.
    pub fn prefix(&self, n: usize) -> Theory {
        let mut t = Theory::new();
        for d in &self.decls[..n] {
            t.index.insert(d.name.clone(), t.decls.len());
            t.decls.push(d.clone());
        }
        for r in &self.rules {
            let mut consts = r.rhs.constants();
            consts.extend(r.lhs_term().constants());
            if consts.iter().all(|(c, _)| t.index.contains_key(c)) {
                t.by_head.entry(r.head.clone()).or_default().push(t.rules.len());
                t.rules.push(r.clone());
            }
        }
        t
    }

    /// Appends all declarations and rules of `other` that are not already present.
    pub fn extend(&mut self, other: &Theory) -> Result<(), TheoryError> {
        for d in &other.decls {
            match self.decl(d.name.as_str()) {
                Some(existing) if existing == d => {}
                _ => self.declare(d.clone())?,
            }
        }
        for r in &other.rules {
            if !self.rules.contains(r) {
                self.add_rule(r.clone())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_constants_are_rejected() {
        let mut t = Theory::new();
        t.declare(Decl::new("U", vec![], Term::Type)).unwrap();
        assert_eq!(t.declare(Decl::new("U", vec![], Term::Type)), Err(TheoryError::DuplicateConstant("U".into())));
    }

    #[test]
    fn telescope_scope_is_checked() {
        let mut t = Theory::new();
        t.declare(Decl::new("U", vec![], Term::Type)).unwrap();
        let bad = Decl::new("El", vec![], Term::var("A"));
        assert!(matches!(t.declare(bad), Err(TheoryError::OutOfScope { .. })));
        let good = Decl::new("El", vec![("A".into(), Term::constant("U"))], Term::Type);
        t.declare(good).unwrap();
        assert_eq!(t.arity("El"), Some(1));
    }

    #[test]
    fn rule_rhs_variables_come_from_lhs() {
        let mut t = Theory::new();
        t.declare(Decl::new("N", vec![], Term::Type)).unwrap();
        t.declare(Decl::new("f", vec![("x".into(), Term::constant("N"))], Term::constant("N"))).unwrap();
        let bad = RewriteRule::new("r", "f", vec![Pattern::Var("x".into())], Term::var("y"));
        assert!(matches!(t.add_rule(bad), Err(TheoryError::RhsFreeVariable { .. })));
        let arity = RewriteRule::new("r", "f", vec![], Term::var("y"));
        assert!(t.add_rule(arity).is_err());
    }

    #[test]
    fn label_families() {
        assert_eq!(Label::rule("beta@Type@Kind").family(), "beta");
        assert_eq!(Label::rule("u-red").family(), "u-red");
        assert_eq!(Label::Beta.family(), "β");
    }
}
