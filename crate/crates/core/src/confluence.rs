//! Orthogonality: left-linearity and absence of critical pairs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::term::{Name, Path, Term};
use crate::theory::{Pattern, RewriteRule, Theory};

#[derive(Clone, Debug, PartialEq)]
pub enum OrthogonalityIssue {
    NonLeftLinear { rule: Name, var: Name },
    Overlap(CriticalPair),
}

impl fmt::Display for OrthogonalityIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrthogonalityIssue::NonLeftLinear { rule, var } => {
                write!(f, "rule {rule} is not left-linear: {var} occurs more than once")
            }
            OrthogonalityIssue::Overlap(cp) => write!(f, "{cp}"),
        }
    }
}

/// An overlap of `inner`'s left-hand side at `position` of `outer`'s.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPair {
    pub outer: Name,
    pub inner: Name,
    pub position: Path,
    pub left: Term,
    pub right: Term,
}

impl CriticalPair {
    pub fn is_trivial(&self) -> bool {
        self.left == self.right
    }
}

impl fmt::Display for CriticalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rule {} overlaps rule {} at position {:?}: critical pair {} / {}",
            self.inner, self.outer, self.position, self.left, self.right
        )
    }
}

type Unifier = HashMap<Name, Pattern>;

fn resolve(p: &Pattern, s: &Unifier) -> Pattern {
    match p {
        Pattern::Var(x) => match s.get(x) {
            Some(q) => resolve(q, s),
            None => p.clone(),
        },
        Pattern::Cons(c, ps) => Pattern::Cons(c.clone(), ps.iter().map(|q| resolve(q, s)).collect()),
    }
}

fn occurs(x: &Name, p: &Pattern, s: &Unifier) -> bool {
    match resolve(p, s) {
        Pattern::Var(y) => &y == x,
        Pattern::Cons(_, ps) => ps.iter().any(|q| occurs(x, q, s)),
    }
}

fn unify(a: &Pattern, b: &Pattern, s: &mut Unifier) -> bool {
    let (a, b) = (resolve(a, s), resolve(b, s));
    match (&a, &b) {
        (Pattern::Var(x), Pattern::Var(y)) if x == y => true,
        (Pattern::Var(x), other) | (other, Pattern::Var(x)) => {
            if occurs(x, other, s) {
                return false;
            }
            s.insert(x.clone(), other.clone());
            true
        }
        (Pattern::Cons(c, ps), Pattern::Cons(d, qs)) => {
            c == d && ps.len() == qs.len() && ps.iter().zip(qs).all(|(p, q)| unify(p, q, s))
        }
    }
}

fn rename(p: &Pattern, tag: &str) -> Pattern {
    match p {
        Pattern::Var(x) => Pattern::Var(Name::from(format!("{tag}{x}"))),
        Pattern::Cons(c, ps) => Pattern::Cons(c.clone(), ps.iter().map(|q| rename(q, tag)).collect()),
    }
}

fn instance(rule: &RewriteRule, tag: &str, s: &Unifier) -> HashMap<Name, Term> {
    rule.metavars()
        .into_iter()
        .map(|x| {
            let renamed = Pattern::Var(Name::from(format!("{tag}{x}")));
            (x, resolve(&renamed, s).to_term())
        })
        .collect()
}

/// Every overlap between left-hand sides, trivial ones included.
pub fn critical_pairs(theory: &Theory) -> Vec<CriticalPair> {
    let mut out = Vec::new();
    let rules = theory.rules();
    for (i, outer) in rules.iter().enumerate() {
        let outer_lhs = rename(&outer.lhs(), "1:");
        for pos in outer_lhs.cons_positions() {
            let sub = outer_lhs.subpattern(&pos).expect("position from pattern");
            for (j, inner) in rules.iter().enumerate() {
                if i == j && pos.is_empty() {
                    continue;
                }
                let inner_lhs = rename(&inner.lhs(), "2:");
                let mut s = Unifier::new();
                if !unify(sub, &inner_lhs, &mut s) {
                    continue;
                }
                let inner_rhs = inner.rhs.subst_many(&instance(inner, "2:", &s));
                let outer_inst = resolve(&outer_lhs, &s).to_term();
                let left = outer_inst.replace_at(&pos, inner_rhs).expect("position exists");
                let right = outer.rhs.subst_many(&instance(outer, "1:", &s));
                out.push(CriticalPair { outer: outer.name.clone(), inner: inner.name.clone(), position: pos.clone(), left, right });
            }
        }
    }
    out
}

/// Non-left-linear rules and overlaps with a non-trivial critical pair.
///
/// Overlaps whose two sides are syntactically identical (such as the
/// `Rl(z, z)` overlap of the universe-maximum rules) do not compromise
/// confluence and are left to [`critical_pairs`].
pub fn check_orthogonal(theory: &Theory) -> Vec<OrthogonalityIssue> {
    let mut out = Vec::new();
    for r in theory.rules() {
        let mut seen = BTreeSet::new();
        for x in r.metavars() {
            if !seen.insert(x.clone()) {
                out.push(OrthogonalityIssue::NonLeftLinear { rule: r.name.clone(), var: x });
            }
        }
    }
    out.extend(critical_pairs(theory).into_iter().filter(|cp| !cp.is_trivial()).map(OrthogonalityIssue::Overlap));
    out
}
