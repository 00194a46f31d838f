//! Linearized β for explicitly-typed terms: `@(A, x.B, λ(A', x.B', x.M), N) ↪ M{N/x}`.
//! Contraction ignores both the annotations and the sort subscripts.

use super::sort::{SortSpec, SpecError};
use super::term::{EptsPath, EptsTerm};
use crate::reduce::{Budget, FuelExhausted};
use crate::theory::Label;

pub fn contract_root(m: &EptsTerm) -> Option<EptsTerm> {
    match m {
        EptsTerm::App { fun, arg, .. } => match &**fun {
            EptsTerm::Lam { body, .. } => Some(body.instantiate(arg)),
            _ => None,
        },
        _ => None,
    }
}

/// Leftmost-outermost step together with the contracted position.
pub fn step_at_path(m: &EptsTerm) -> Option<(EptsTerm, EptsPath)> {
    if let Some(r) = contract_root(m) {
        return Some((r, Vec::new()));
    }
    let kids = m.children();
    for (i, k) in kids.iter().enumerate() {
        if let Some((r, mut p)) = step_at_path(k) {
            let new_kids = kids.iter().enumerate().map(|(j, c)| if j == i { r.clone() } else { (*c).clone() }).collect();
            p.insert(0, i);
            return Some((m.with_children(new_kids), p));
        }
    }
    None
}

/// One leftmost-outermost step. The spec is accepted for symmetry with the
/// typing functions; reduction never consults it.
pub fn epts_step(_spec: &SortSpec, m: &EptsTerm) -> Option<EptsTerm> {
    step_at_path(m).map(|(r, _)| r)
}

/// All redex positions in leftmost-outermost order.
pub fn redexes(m: &EptsTerm) -> Vec<EptsPath> {
    let mut out = Vec::new();
    fn go(t: &EptsTerm, path: &mut Vec<usize>, out: &mut Vec<EptsPath>) {
        if contract_root(t).is_some() {
            out.push(path.clone());
        }
        for (i, k) in t.children().into_iter().enumerate() {
            path.push(i);
            go(k, path, out);
            path.pop();
        }
    }
    go(m, &mut Vec::new(), &mut out);
    out
}

pub fn contract_at(m: &EptsTerm, path: &[usize]) -> Option<EptsTerm> {
    let r = contract_root(m.subterm(path)?)?;
    m.replace_at(path, r)
}

pub fn is_normal(m: &EptsTerm) -> bool {
    step_at_path(m).is_none()
}

pub fn nf(m: &EptsTerm, budget: &mut Budget) -> Result<EptsTerm, FuelExhausted> {
    let mut t = m.clone();
    while let Some((r, _)) = step_at_path(&t) {
        budget.tick(&Label::Beta)?;
        t = r;
    }
    Ok(t)
}

pub fn whnf(m: &EptsTerm, budget: &mut Budget) -> Result<EptsTerm, FuelExhausted> {
    let mut t = m.clone();
    loop {
        match &t {
            EptsTerm::App { fun, arg, .. } => {
                let f = whnf(fun, budget)?;
                match &f {
                    EptsTerm::Lam { body, .. } => {
                        budget.tick(&Label::Beta)?;
                        t = body.instantiate(arg);
                    }
                    _ => return Ok(rebuild_fun(&t, f)),
                }
            }
            _ => return Ok(t),
        }
    }
}

fn rebuild_fun(app: &EptsTerm, f: EptsTerm) -> EptsTerm {
    let mut kids: Vec<EptsTerm> = app.children().into_iter().cloned().collect();
    kids[2] = f;
    app.with_children(kids)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConversionError {
    #[error(transparent)]
    Fuel(#[from] FuelExhausted),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

/// β-conversion by weak-head reduction and congruence. Sorts compare by
/// their canonical names; binder annotations are compared too.
pub fn convertible(spec: &SortSpec, a: &EptsTerm, b: &EptsTerm, budget: &mut Budget) -> Result<bool, ConversionError> {
    if a == b {
        return Ok(true);
    }
    let a = whnf(a, budget)?;
    let b = whnf(b, budget)?;
    match (&a, &b) {
        (EptsTerm::Sort(s), EptsTerm::Sort(t)) => Ok(spec.same_sort(s, t)?),
        (EptsTerm::BVar(i), EptsTerm::BVar(j)) => Ok(i == j),
        (EptsTerm::FVar(x), EptsTerm::FVar(y)) => Ok(x == y),
        _ => {
            let (Some((s1, s2)), Some((t1, t2))) = (a.sorts(), b.sorts()) else {
                return Ok(false);
            };
            if std::mem::discriminant(&a) != std::mem::discriminant(&b) {
                return Ok(false);
            }
            if !spec.same_sort(s1, t1)? || !spec.same_sort(s2, t2)? {
                return Ok(false);
            }
            for (x, y) in a.children().into_iter().zip(b.children()) {
                if !convertible(spec, x, y, budget)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}
