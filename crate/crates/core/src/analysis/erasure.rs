//! Erasure of framework types to simple types and of terms to λ-terms.

use super::stlc::{SimpleType, StlcConst, StlcContext, StlcTerm};
use super::{constant_level, AnalysisError, ConstantLevel};
use crate::term::{Name, Term};
use crate::theory::Theory;
use crate::typing::DkContext;

/// Binder name used for the extra abstraction introduced by erasing `λx:A.M`.
const ANNOTATION_BINDER: &str = "_z";

pub fn erase_type(theory: &Theory, m: &Term) -> Result<SimpleType, AnalysisError> {
    match m {
        Term::Type => Ok(SimpleType::Star),
        Term::Cons(c, _) if constant_level(theory, c.as_str()) == Ok(ConstantLevel::TypeLevel) => Ok(SimpleType::Star),
        Term::Pi(_, a, b) => Ok(SimpleType::arrow(erase_type(theory, a)?, erase_type(theory, b)?)),
        Term::App(a, _) => erase_type(theory, a),
        Term::Lam(_, _, b) => erase_type(theory, b),
        _ => Err(AnalysisError::NotErasable(m.clone())),
    }
}

pub fn erase_term(theory: &Theory, m: &Term) -> Result<StlcTerm, AnalysisError> {
    // levels[k] = binder level in the erased term of the k-th enclosing source binder
    erase_at(theory, m, &mut Vec::new(), 0)
}

fn erase_at(theory: &Theory, m: &Term, levels: &mut Vec<u32>, depth: u32) -> Result<StlcTerm, AnalysisError> {
    match m {
        Term::FVar(x) => Ok(StlcTerm::FVar(x.clone())),
        Term::BVar(i) => {
            let k = levels.len().checked_sub(*i as usize + 1).ok_or_else(|| AnalysisError::NotErasable(m.clone()))?;
            Ok(StlcTerm::BVar(depth - 1 - levels[k]))
        }
        Term::Cons(c, args) => {
            let mut t = StlcTerm::Const(StlcConst::Sig(c.clone()));
            for a in args.iter() {
                t = StlcTerm::app(t, erase_at(theory, a, levels, depth)?);
            }
            Ok(t)
        }
        Term::App(f, a) => Ok(StlcTerm::app(erase_at(theory, f, levels, depth)?, erase_at(theory, a, levels, depth)?)),
        Term::Lam(x, a, body) => {
            let ea = erase_at(theory, a, levels, depth)?;
            levels.push(depth + 1);
            let eb = erase_at(theory, body, levels, depth + 2);
            levels.pop();
            let inner = StlcTerm::lam(ANNOTATION_BINDER, StlcTerm::lam(x.clone(), eb?));
            Ok(StlcTerm::app(inner, ea))
        }
        Term::Pi(x, a, b) => {
            let sigma = erase_type(theory, a)?;
            let ea = erase_at(theory, a, levels, depth)?;
            levels.push(depth);
            let eb = erase_at(theory, b, levels, depth + 1);
            levels.pop();
            let pi = StlcTerm::Const(StlcConst::Pi(sigma));
            Ok(StlcTerm::app(StlcTerm::app(pi, ea), StlcTerm::lam(x.clone(), eb?)))
        }
        Term::Type | Term::Kind => Err(AnalysisError::NotErasable(m.clone())),
    }
}

/// Position in `erase_term(m)` of the image of the subterm of `m` at `path`.
pub fn erased_path(m: &Term, path: &[usize]) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = m;
    for &i in path {
        match cur {
            Term::Cons(_, args) => {
                let n = args.len();
                if i >= n {
                    return None;
                }
                out.extend(std::iter::repeat(0).take(n - 1 - i));
                out.push(1);
            }
            Term::App(..) => out.push(i),
            Term::Lam(..) => out.extend_from_slice(if i == 0 { &[1][..] } else { &[0, 0, 0][..] }),
            Term::Pi(..) => out.extend_from_slice(if i == 0 { &[0, 1] } else { &[1, 0] }),
            _ => return None,
        }
        cur = cur.children().get(i).copied()?;
    }
    Some(out)
}

/// `c : ⌜A1⌝ → … → ⌜An⌝ → ⌜A⌝` for every declaration.
pub fn erase_signature(theory: &Theory) -> Result<StlcContext, AnalysisError> {
    let mut ctx = StlcContext::new();
    for d in theory.decls() {
        let wrap = |e: AnalysisError| AnalysisError::Declaration { constant: d.name.clone(), source: Box::new(e) };
        let args = d.telescope.iter().map(|(_, a)| erase_type(theory, a)).collect::<Result<Vec<_>, _>>().map_err(wrap)?;
        let r = erase_type(theory, &d.ty).map_err(wrap)?;
        ctx.consts.push((StlcConst::Sig(d.name.clone()), SimpleType::arrows(args, r)));
    }
    Ok(ctx)
}

/// `x : ⌜A⌝` for every context entry.
pub fn erase_context(theory: &Theory, ctx: &DkContext) -> Result<Vec<(Name, SimpleType)>, AnalysisError> {
    ctx.entries().iter().map(|(x, a)| Ok((x.clone(), erase_type(theory, a)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::stlc_check;
    use crate::theory::Decl;

    fn star() -> SimpleType {
        SimpleType::Star
    }

    fn tiny() -> Theory {
        let mut t = Theory::new();
        t.declare(Decl::new("U", vec![], Term::Type)).unwrap();
        t.declare(Decl::new("El", vec![("A".into(), Term::constant("U"))], Term::Type)).unwrap();
        t
    }

    #[test]
    fn type_erasure_clauses() {
        let t = tiny();
        assert_eq!(erase_type(&t, &Term::Type).unwrap(), star());
        let el_a = Term::cons("El", vec![Term::var("a")]);
        assert_eq!(erase_type(&t, &Term::arrow(el_a.clone(), el_a.clone())).unwrap(), SimpleType::arrow(star(), star()));
        assert!(erase_type(&t, &Term::var("x")).is_err());
    }

    #[test]
    fn term_erasure_clauses() {
        let t = tiny();
        assert_eq!(erase_term(&t, &Term::var("x")).unwrap(), StlcTerm::FVar("x".into()));
        let a = Term::cons("El", vec![Term::var("a")]);
        let id = Term::lam("x", a.clone(), Term::var("x"));
        let ea = erase_term(&t, &a).unwrap();
        let expected = StlcTerm::app(StlcTerm::lam("z", StlcTerm::lam("x", StlcTerm::BVar(0))), ea.clone());
        assert_eq!(erase_term(&t, &id).unwrap(), expected);
        let pi = Term::pi("x", a.clone(), a.clone());
        let expected = StlcTerm::app(
            StlcTerm::app(StlcTerm::Const(StlcConst::Pi(star())), ea.clone()),
            StlcTerm::lam("x", ea),
        );
        assert_eq!(erase_term(&t, &pi).unwrap(), expected);
    }

    #[test]
    fn outer_variables_skip_the_annotation_binder() {
        // λy:El a. λx:El a. y: y must point past x and the annotation binder
        let t = tiny();
        let a = Term::cons("El", vec![Term::var("a")]);
        let m = Term::lam("y", a.clone(), Term::lam("x", a.clone(), Term::var("y")));
        let e = erase_term(&t, &m).unwrap();
        let mut ctx = erase_signature(&t).unwrap();
        ctx.add_var("a".into(), star());
        assert!(stlc_check(&ctx, &e, &SimpleType::arrows([star(), star()], star())));
        assert!(!stlc_check(&ctx, &e, &SimpleType::arrows([star(), star()], SimpleType::arrow(star(), star()))));
    }

    #[test]
    fn signature_erasure() {
        let ctx = erase_signature(&tiny()).unwrap();
        assert_eq!(ctx.const_type(&StlcConst::Sig("U".into())), Some(&star()));
        assert_eq!(ctx.const_type(&StlcConst::Sig("El".into())), Some(&SimpleType::arrow(star(), star())));
    }
}
