//! βR-reduction: labeled leftmost-outermost steps, normalization, weak-head
//! reduction and conversion, all under an explicit step budget.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::term::{Name, Path, Term};
use crate::theory::{Label, Pattern, RewriteRule, Theory};

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("fuel exhausted after {spent} reduction steps")]
pub struct FuelExhausted {
    pub spent: u64,
}

/// Step budget shared by one top-level operation; optionally records labels.
#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    remaining: u64,
    trace: Option<Vec<Label>>,
}

impl Budget {
    pub fn new(fuel: u64) -> Self {
        Budget { limit: fuel, remaining: fuel, trace: None }
    }

    pub fn traced(fuel: u64) -> Self {
        Budget { limit: fuel, remaining: fuel, trace: Some(Vec::new()) }
    }

    pub fn tick(&mut self, label: &Label) -> Result<(), FuelExhausted> {
        if self.remaining == 0 {
            return Err(FuelExhausted { spent: self.limit });
        }
        self.remaining -= 1;
        if let Some(t) = &mut self.trace {
            t.push(label.clone());
        }
        Ok(())
    }

    pub fn spent(&self) -> u64 {
        self.limit - self.remaining
    }

    pub fn trace(&self) -> &[Label] {
        self.trace.as_deref().unwrap_or(&[])
    }
}

/// Which redexes a reduction may contract.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleFilter {
    All,
    Labels(BTreeSet<Label>),
    Families(BTreeSet<String>),
}

impl RuleFilter {
    pub fn beta() -> Self {
        RuleFilter::Labels([Label::Beta].into_iter().collect())
    }

    pub fn families<'a>(fams: impl IntoIterator<Item = &'a str>) -> Self {
        RuleFilter::Families(fams.into_iter().map(str::to_string).collect())
    }

    pub fn allows(&self, l: &Label) -> bool {
        match self {
            RuleFilter::All => true,
            RuleFilter::Labels(s) => s.contains(l),
            RuleFilter::Families(s) => s.contains(l.family()),
        }
    }
}

/// Syntactic first-order matching of `p` against `t`.
fn match_pattern(p: &Pattern, t: &Term, sub: &mut HashMap<Name, Term>) -> bool {
    match p {
        Pattern::Var(x) => match sub.get(x) {
            Some(prev) => prev == t,
            None => {
                sub.insert(x.clone(), t.clone());
                true
            }
        },
        Pattern::Cons(c, ps) => match t {
            Term::Cons(d, args) if c == d && ps.len() == args.len() => {
                ps.iter().zip(args.iter()).all(|(p, a)| match_pattern(p, a, sub))
            }
            _ => false,
        },
    }
}

pub fn match_rule(rule: &RewriteRule, args: &[Term]) -> Option<HashMap<Name, Term>> {
    if rule.args.len() != args.len() {
        return None;
    }
    let mut sub = HashMap::new();
    rule.args.iter().zip(args).all(|(p, a)| match_pattern(p, a, &mut sub)).then_some(sub)
}

/// Contracts `m` itself if it is a redex allowed by `filter`.
pub fn contract_root(theory: &Theory, m: &Term, filter: &RuleFilter) -> Option<(Term, Label)> {
    match m {
        Term::App(f, a) => match &**f {
            Term::Lam(_, _, body) if filter.allows(&Label::Beta) => Some((body.instantiate(a), Label::Beta)),
            _ => None,
        },
        Term::Cons(c, args) => theory.rules_for(c.as_str()).find_map(|r| {
            let l = r.label();
            if !filter.allows(&l) {
                return None;
            }
            match_rule(r, args).map(|sub| (r.rhs.subst_many(&sub), l))
        }),
        _ => None,
    }
}

fn step_rec(theory: &Theory, m: &Term, filter: &RuleFilter, path: &mut Path) -> Option<(Term, Label)> {
    if let Some(r) = contract_root(theory, m, filter) {
        return Some(r);
    }
    let kids = m.children();
    for (i, k) in kids.iter().enumerate() {
        path.push(i);
        if let Some((k2, l)) = step_rec(theory, k, filter, path) {
            let children = kids.iter().enumerate().map(|(j, c)| if i == j { k2.clone() } else { (*c).clone() }).collect();
            return Some((m.with_children(children), l));
        }
        path.pop();
    }
    None
}

/// One leftmost-outermost step among the redexes allowed by `filter`.
pub fn step_filtered(theory: &Theory, m: &Term, filter: &RuleFilter) -> Option<(Term, Label)> {
    step_rec(theory, m, filter, &mut Vec::new())
}

/// Like [`step_filtered`], also reporting the position of the contracted redex.
pub fn step_at_path(theory: &Theory, m: &Term, filter: &RuleFilter) -> Option<(Term, Label, Path)> {
    let mut path = Vec::new();
    step_rec(theory, m, filter, &mut path).map(|(t, l)| (t, l, path))
}

/// One leftmost-outermost βR step with its label.
pub fn step(theory: &Theory, m: &Term) -> Option<(Term, Label)> {
    step_filtered(theory, m, &RuleFilter::All)
}

/// All redex positions in leftmost-outermost order.
pub fn redexes(theory: &Theory, m: &Term, filter: &RuleFilter) -> Vec<(Path, Label)> {
    let mut out = Vec::new();
    fn go(theory: &Theory, m: &Term, filter: &RuleFilter, path: &mut Path, out: &mut Vec<(Path, Label)>) {
        if let Some((_, l)) = contract_root(theory, m, filter) {
            out.push((path.clone(), l));
        }
        for (i, k) in m.children().into_iter().enumerate() {
            path.push(i);
            go(theory, k, filter, path, out);
            path.pop();
        }
    }
    go(theory, m, filter, &mut Vec::new(), &mut out);
    out
}

/// Contracts the redex at `path`, if there is one there.
pub fn contract_at(theory: &Theory, m: &Term, path: &[usize], filter: &RuleFilter) -> Option<(Term, Label)> {
    let sub = m.subterm(path)?;
    let (r, l) = contract_root(theory, sub, filter)?;
    Some((m.replace_at(path, r)?, l))
}

/// Normal form with respect to the redexes allowed by `filter`.
pub fn nf(theory: &Theory, m: &Term, filter: &RuleFilter, budget: &mut Budget) -> Result<Term, FuelExhausted> {
    let mut cur = m.clone();
    while let Some((next, l)) = step_filtered(theory, &cur, filter) {
        budget.tick(&l)?;
        cur = next;
    }
    Ok(cur)
}

pub fn nf_with_fuel(theory: &Theory, m: &Term, filter: &RuleFilter, fuel: u64) -> Result<Term, FuelExhausted> {
    nf(theory, m, filter, &mut Budget::new(fuel))
}

/// Matching that weak-head reduces the term when a constant is expected.
/// Arguments are updated in place with their reducts.
fn match_whnf(
    theory: &Theory,
    p: &Pattern,
    t: &mut Term,
    sub: &mut HashMap<Name, Term>,
    budget: &mut Budget,
) -> Result<bool, FuelExhausted> {
    match p {
        Pattern::Var(x) => Ok(match sub.get(x) {
            Some(prev) => prev == t,
            None => {
                sub.insert(x.clone(), t.clone());
                true
            }
        }),
        Pattern::Cons(c, ps) => {
            if !matches!(t, Term::Cons(d, _) if d == c) {
                *t = whnf(theory, t, budget)?;
            }
            match t {
                Term::Cons(d, args) if d == c && args.len() == ps.len() => {
                    let mut args: Vec<Term> = args.to_vec();
                    let mut ok = true;
                    for (p, a) in ps.iter().zip(args.iter_mut()) {
                        if !match_whnf(theory, p, a, sub, budget)? {
                            ok = false;
                            break;
                        }
                    }
                    *t = Term::cons(d.clone(), args);
                    Ok(ok)
                }
                _ => Ok(false),
            }
        }
    }
}

/// Weak-head normal form (rules fire on constant heads, β on applied abstractions).
pub fn whnf(theory: &Theory, m: &Term, budget: &mut Budget) -> Result<Term, FuelExhausted> {
    let mut cur = m.clone();
    loop {
        match &cur {
            Term::App(..) => {
                let (head, args) = cur.spine();
                let args: Vec<Term> = args.into_iter().cloned().collect();
                let head = whnf(theory, head, budget)?;
                match &head {
                    Term::Lam(_, _, body) => {
                        budget.tick(&Label::Beta)?;
                        let mut it = args.into_iter();
                        let first = it.next().expect("spine has an argument");
                        cur = Term::apps(body.instantiate(&first), it);
                    }
                    _ => return Ok(Term::apps(head, args)),
                }
            }
            Term::Cons(c, args) if theory.has_rules_for(c.as_str()) => {
                let c = c.clone();
                let mut args: Vec<Term> = args.to_vec();
                let mut fired = None;
                for r in theory.rules_for(c.as_str()) {
                    if r.args.len() != args.len() {
                        continue;
                    }
                    let mut sub = HashMap::new();
                    let mut ok = true;
                    for (p, a) in r.args.iter().zip(args.iter_mut()) {
                        if !match_whnf(theory, p, a, &mut sub, budget)? {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        fired = Some((r.rhs.subst_many(&sub), r.label()));
                        break;
                    }
                }
                match fired {
                    Some((rhs, l)) => {
                        budget.tick(&l)?;
                        cur = rhs;
                    }
                    None => return Ok(Term::cons(c, args)),
                }
            }
            _ => return Ok(cur),
        }
    }
}

/// βR-convertibility by weak-head reduction and congruence.
pub fn convertible(theory: &Theory, a: &Term, b: &Term, budget: &mut Budget) -> Result<bool, FuelExhausted> {
    if a == b {
        return Ok(true);
    }
    let a = whnf(theory, a, budget)?;
    let b = whnf(theory, b, budget)?;
    if a == b {
        return Ok(true);
    }
    match (&a, &b) {
        (Term::Cons(c, xs), Term::Cons(d, ys)) => {
            if c != d || xs.len() != ys.len() {
                return Ok(false);
            }
            for (x, y) in xs.iter().zip(ys.iter()) {
                if !convertible(theory, x, y, budget)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        (Term::App(f, x), Term::App(g, y)) => {
            Ok(convertible(theory, f, g, budget)? && convertible(theory, x, y, budget)?)
        }
        (Term::Lam(_, a1, m1), Term::Lam(_, a2, m2)) | (Term::Pi(_, a1, m1), Term::Pi(_, a2, m2)) => {
            Ok(convertible(theory, a1, a2, budget)? && convertible(theory, m1, m2, budget)?)
        }
        _ => Ok(false),
    }
}

pub fn convertible_with_fuel(theory: &Theory, a: &Term, b: &Term, fuel: u64) -> Result<bool, FuelExhausted> {
    convertible(theory, a, b, &mut Budget::new(fuel))
}
