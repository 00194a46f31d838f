//! Sort specifications: finite functional ones and internalized ones whose
//! axiom / rule functions are rewrite rules over closed sort terms.

use std::collections::BTreeMap;

use thiserror::Error;

use super::term::Sort;
use crate::reduce::{nf_with_fuel, RuleFilter, DEFAULT_FUEL};
use crate::term::{Name, Term};
use crate::theory::{Decl, RewriteRule, Theory, TheoryError};
use crate::typing::{self, DkContext, TypingConfig};

pub const SORT_TYPE: &str = "Sort";
pub const SORT_AXIOM: &str = "Ax";
pub const SORT_RULE: &str = "Rl";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("non-functional specification: {relation} already defined for {key}")]
    NonFunctionalSpec { relation: &'static str, key: String },
    #[error("unknown sort {0}")]
    UnknownSort(Sort),
    #[error("duplicate sort {0}")]
    DuplicateSort(Sort),
    #[error("sort theory rejected: {0}")]
    SortTheory(String),
    #[error("sort {sort} is not a closed normal sort term: {reason}")]
    BadSortTerm { sort: Sort, reason: String },
    #[error("sorts {0} and {1} have the same normal form")]
    NotInjective(Sort, Sort),
    #[error("sort arithmetic failed on {what}: {reason}")]
    SampleFailed { what: String, reason: String },
}

impl From<TheoryError> for SpecError {
    fn from(e: TheoryError) -> Self {
        SpecError::SortTheory(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSpec {
    sorts: Vec<Sort>,
    axioms: BTreeMap<Sort, Sort>,
    rules: BTreeMap<(Sort, Sort), Sort>,
}

impl FiniteSpec {
    pub fn new(
        sorts: Vec<Sort>,
        axioms: impl IntoIterator<Item = (Sort, Sort)>,
        rules: impl IntoIterator<Item = (Sort, Sort, Sort)>,
    ) -> Result<Self, SpecError> {
        for (i, s) in sorts.iter().enumerate() {
            if sorts[..i].contains(s) {
                return Err(SpecError::DuplicateSort(s.clone()));
            }
        }
        let known = |s: &Sort| if sorts.contains(s) { Ok(()) } else { Err(SpecError::UnknownSort(s.clone())) };
        let mut ax = BTreeMap::new();
        for (a, b) in axioms {
            known(&a)?;
            known(&b)?;
            match ax.get(&a) {
                Some(old) if *old == b => {}
                Some(_) => return Err(SpecError::NonFunctionalSpec { relation: "axiom", key: a.to_string() }),
                None => {
                    ax.insert(a, b);
                }
            }
        }
        let mut rl = BTreeMap::new();
        for (a, b, c) in rules {
            known(&a)?;
            known(&b)?;
            known(&c)?;
            let key = (a, b);
            match rl.get(&key) {
                Some(old) if *old == c => {}
                Some(_) => {
                    return Err(SpecError::NonFunctionalSpec {
                        relation: "rule",
                        key: format!("({}, {})", key.0, key.1),
                    })
                }
                None => {
                    rl.insert(key, c);
                }
            }
        }
        Ok(FiniteSpec { sorts, axioms: ax, rules: rl })
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    /// Axioms in sort declaration order.
    pub fn axioms(&self) -> Vec<(Sort, Sort)> {
        self.sorts.iter().filter_map(|s| self.axioms.get(s).map(|t| (s.clone(), t.clone()))).collect()
    }

    /// Rules in lexicographic sort declaration order.
    pub fn rules(&self) -> Vec<(Sort, Sort, Sort)> {
        let mut out = Vec::new();
        for a in &self.sorts {
            for b in &self.sorts {
                if let Some(c) = self.rules.get(&(a.clone(), b.clone())) {
                    out.push((a.clone(), b.clone(), c.clone()));
                }
            }
        }
        out
    }

    pub fn axiom(&self, s: &Sort) -> Option<&Sort> {
        self.axioms.get(s)
    }

    pub fn rule(&self, a: &Sort, b: &Sort) -> Option<&Sort> {
        self.rules.get(&(a.clone(), b.clone()))
    }
}

/// Sort terms are closed normal forms of type `Sort` over a mini-theory
/// `Sort : TYPE`, `Ax[s : Sort] : Sort`, `Rl[s1 : Sort; s2 : Sort] : Sort`
/// extended by user constants and rules.
#[derive(Clone, Debug, PartialEq)]
pub struct InternalizedSpec {
    decls: Vec<Decl>,
    rules: Vec<RewriteRule>,
    theory: Theory,
    names: Vec<(Sort, Term)>,
    fuel: u64,
}

pub fn sort_base_theory() -> Theory {
    let mut t = Theory::new();
    let sort = || Term::constant(SORT_TYPE);
    t.declare(Decl::new(SORT_TYPE, vec![], Term::Type)).expect("fresh");
    t.declare(Decl::new(SORT_AXIOM, vec![("s".into(), sort())], sort())).expect("fresh");
    t.declare(Decl::new(SORT_RULE, vec![("s1".into(), sort()), ("s2".into(), sort())], sort())).expect("fresh");
    t
}

impl InternalizedSpec {
    /// User constants and rules over the base signature, plus the named sorts.
    pub fn new(decls: Vec<Decl>, rules: Vec<RewriteRule>, names: Vec<(Sort, Term)>) -> Result<Self, SpecError> {
        Self::with_fuel(decls, rules, names, DEFAULT_FUEL)
    }

    pub fn with_fuel(
        decls: Vec<Decl>,
        rules: Vec<RewriteRule>,
        names: Vec<(Sort, Term)>,
        fuel: u64,
    ) -> Result<Self, SpecError> {
        let mut theory = sort_base_theory();
        for d in &decls {
            theory.declare(d.clone())?;
        }
        for r in &rules {
            theory.add_rule(r.clone())?;
        }
        let cfg = TypingConfig::with_fuel(fuel);
        if let Some(d) = typing::check_signature(&theory, cfg.clone()).into_iter().next() {
            return Err(SpecError::SortTheory(format!("{}: {}", d.constant, d.error)));
        }
        let spec = InternalizedSpec { decls, rules, theory, names, fuel };
        let sort_ty = Term::constant(SORT_TYPE);
        for (i, (s, t)) in spec.names.iter().enumerate() {
            if spec.names[..i].iter().any(|(s2, _)| s2 == s) {
                return Err(SpecError::DuplicateSort(s.clone()));
            }
            let bad = |reason: String| SpecError::BadSortTerm { sort: s.clone(), reason };
            if !t.free_vars().is_empty() || !t.is_locally_closed() {
                return Err(bad("not closed".into()));
            }
            typing::check(&spec.theory, &DkContext::new(), t, &sort_ty, cfg.clone()).map_err(|e| bad(e.to_string()))?;
            let n = spec.normalize(t).map_err(|e| bad(e.to_string()))?;
            if n != *t {
                return Err(bad(format!("reduces to {n}")));
            }
            if let Some((s2, _)) = spec.names[..i].iter().find(|(_, t2)| t2 == t) {
                return Err(SpecError::NotInjective(s2.clone(), s.clone()));
            }
        }
        // sample the sort functions on named sorts
        for (s, _) in &spec.names {
            spec.axiom(s)?;
            for (s2, _) in &spec.names {
                spec.rule(s, s2)?;
            }
        }
        Ok(spec)
    }

    pub fn user_decls(&self) -> &[Decl] {
        &self.decls
    }

    pub fn user_rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    /// Base declarations plus the user's.
    pub fn sort_theory(&self) -> &Theory {
        &self.theory
    }

    pub fn names(&self) -> &[(Sort, Term)] {
        &self.names
    }

    pub fn fuel(&self) -> u64 {
        self.fuel
    }

    fn normalize(&self, t: &Term) -> Result<Term, SpecError> {
        nf_with_fuel(&self.theory, t, &RuleFilter::All, self.fuel)
            .map_err(|e| SpecError::SampleFailed { what: t.to_string(), reason: e.to_string() })
    }

    /// The closed sort term denoted by a sort name: an alias or `{term}`.
    pub fn representation(&self, s: &Sort) -> Result<Term, SpecError> {
        if let Some((_, t)) = self.names.iter().find(|(n, _)| n == s) {
            return Ok(t.clone());
        }
        let text = s.name();
        let inner = text
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| SpecError::UnknownSort(s.clone()))?;
        let t = crate::syntax::parse_dk_term(&self.theory, inner).map_err(|_| SpecError::UnknownSort(s.clone()))?;
        if !t.free_vars().is_empty() {
            return Err(SpecError::UnknownSort(s.clone()));
        }
        let cfg = TypingConfig::with_fuel(self.fuel);
        typing::check(&self.theory, &DkContext::new(), &t, &Term::constant(SORT_TYPE), cfg)
            .map_err(|_| SpecError::UnknownSort(s.clone()))?;
        Ok(t)
    }

    /// Name for a closed normal sort term.
    pub fn name_of(&self, nf: &Term) -> Sort {
        match self.names.iter().find(|(_, t)| t == nf) {
            Some((s, _)) => s.clone(),
            None => Sort(Name::new(&format!("{{{nf}}}"))),
        }
    }

    pub fn canonical(&self, s: &Sort) -> Result<Sort, SpecError> {
        let t = self.representation(s)?;
        Ok(self.name_of(&self.normalize(&t)?))
    }

    /// Normal-form representation of a sort.
    pub fn normal_representation(&self, s: &Sort) -> Result<Term, SpecError> {
        let t = self.representation(s)?;
        self.normalize(&t)
    }

    fn apply(&self, head: &str, args: Vec<Term>) -> Result<Sort, SpecError> {
        let t = Term::cons(head, args);
        let n = self.normalize(&t)?;
        let stuck = n.constants().iter().any(|(c, _)| c.as_str() == SORT_AXIOM || c.as_str() == SORT_RULE);
        if stuck {
            return Err(SpecError::SampleFailed { what: t.to_string(), reason: format!("stuck at {n}") });
        }
        Ok(self.name_of(&n))
    }

    pub fn axiom(&self, s: &Sort) -> Result<Sort, SpecError> {
        self.apply(SORT_AXIOM, vec![self.representation(s)?])
    }

    pub fn rule(&self, a: &Sort, b: &Sort) -> Result<Sort, SpecError> {
        self.apply(SORT_RULE, vec![self.representation(a)?, self.representation(b)?])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SortSpec {
    Finite(FiniteSpec),
    Internalized(InternalizedSpec),
}

impl SortSpec {
    pub fn finite(
        sorts: &[&str],
        axioms: &[(&str, &str)],
        rules: &[(&str, &str, &str)],
    ) -> Result<SortSpec, SpecError> {
        Ok(SortSpec::Finite(FiniteSpec::new(
            sorts.iter().map(|s| Sort::new(s)).collect(),
            axioms.iter().map(|(a, b)| (Sort::new(a), Sort::new(b))),
            rules.iter().map(|(a, b, c)| (Sort::new(a), Sort::new(b), Sort::new(c))),
        )?))
    }

    pub fn canonical(&self, s: &Sort) -> Result<Sort, SpecError> {
        match self {
            SortSpec::Finite(f) => {
                if f.sorts.contains(s) {
                    Ok(s.clone())
                } else {
                    Err(SpecError::UnknownSort(s.clone()))
                }
            }
            SortSpec::Internalized(i) => i.canonical(s),
        }
    }

    pub fn same_sort(&self, a: &Sort, b: &Sort) -> Result<bool, SpecError> {
        if a == b {
            self.canonical(a)?;
            return Ok(true);
        }
        Ok(self.canonical(a)? == self.canonical(b)?)
    }

    /// `None` for a top sort.
    pub fn axiom(&self, s: &Sort) -> Result<Option<Sort>, SpecError> {
        match self {
            SortSpec::Finite(f) => {
                let s = self.canonical(s)?;
                Ok(f.axiom(&s).cloned())
            }
            SortSpec::Internalized(i) => i.axiom(s).map(Some),
        }
    }

    /// `None` when the pair is outside the rule relation.
    pub fn rule(&self, a: &Sort, b: &Sort) -> Result<Option<Sort>, SpecError> {
        match self {
            SortSpec::Finite(f) => {
                let a = self.canonical(a)?;
                let b = self.canonical(b)?;
                Ok(f.rule(&a, &b).cloned())
            }
            SortSpec::Internalized(i) => i.rule(a, b).map(Some),
        }
    }

    /// Named sorts: all sorts when finite, the aliases when internalized.
    pub fn named_sorts(&self) -> Vec<Sort> {
        match self {
            SortSpec::Finite(f) => f.sorts.clone(),
            SortSpec::Internalized(i) => i.names.iter().map(|(s, _)| s.clone()).collect(),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteSpec> {
        match self {
            SortSpec::Finite(f) => Some(f),
            SortSpec::Internalized(_) => None,
        }
    }

    pub fn as_internalized(&self) -> Option<&InternalizedSpec> {
        match self {
            SortSpec::Internalized(i) => Some(i),
            SortSpec::Finite(_) => None,
        }
    }
}
