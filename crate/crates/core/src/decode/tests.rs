use super::*;
use crate::encode::generate;
use crate::reduce::DEFAULT_FUEL;
use crate::syntax::{parse_dk_term, parse_epts_term, parse_sort_spec};

fn system_f() -> EncodingTheory {
    generate(&parse_sort_spec(include_str!("../../corpus/systemf.sorts")).unwrap()).unwrap()
}

fn mltt() -> EncodingTheory {
    generate(&parse_sort_spec(include_str!("../../corpus/mltt_internalized.sorts")).unwrap()).unwrap()
}

fn dk(enc: &EncodingTheory, s: &str) -> Term {
    parse_dk_term(&enc.theory, s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn ep(s: &str) -> EptsTerm {
    parse_epts_term(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

const POLY_ID: &str = "lam[Kind,Type](#Type, A. Pi[Type,Type](A, x. A), A. lam[Type,Type](A, x. A, x. x))";

/// `A : Type, y : A`
fn a_y() -> EptsContext {
    let mut ctx = EptsContext::new();
    ctx.push("A", EptsTerm::sort("Type"));
    ctx.push("y", EptsTerm::var("A"));
    ctx
}

#[test]
fn type_level_constants_are_not_invertible() {
    let enc = system_f();
    assert!(recognize(&enc, &dk(&enc, "El@Type(A)")).is_none());
    assert!(recognize(&enc, &dk(&enc, "U@Type")).is_none());
    assert!(recognize(&enc, &Term::lam("x", dk(&enc, "U@Type"), Term::var("x"))).is_none());
}

#[test]
fn codes_invert_to_sorts() {
    let enc = system_f();
    let f = recognize(&enc, &dk(&enc, "u@Type")).unwrap();
    assert_eq!(invert(&enc, &f), EptsTerm::sort("Type"));
}

#[test]
fn redex_clause_substitutes() {
    let enc = system_f();
    let m = dk(&enc, r"(\x : U@Kind => x) u@Type");
    let f = recognize(&enc, &m).expect("β-redex clause");
    assert_eq!(invert(&enc, &f), EptsTerm::sort("Type"));
}

#[test]
fn annotations_are_discarded() {
    let enc = system_f();
    let m = dk(&enc, r"abs@Type@Type(A, \x : U@Kind => A, \x : U@Type => x)");
    let f = recognize(&enc, &m).unwrap();
    assert_eq!(invert(&enc, &f), ep("lam[Type,Type](A, x. A, x. x)"));
}

#[test]
fn hidden_conversion_inside_annotations() {
    let enc = system_f();
    let t = &enc.theory;
    let via_code = dk(&enc, r"\x : El@Kind(u@Type) => x");
    let direct = dk(&enc, r"\x : U@Type => x");
    assert!(hidden_equiv(t, &via_code, &direct, DEFAULT_FUEL).unwrap());
    let other = dk(&enc, r"\x : U@Type => u@Type");
    assert!(!hidden_equiv(t, &direct, &other, DEFAULT_FUEL).unwrap());
    // a difference outside annotations is not hidden even when convertible
    let redex = dk(&enc, r"(\x : U@Kind => x) u@Type");
    assert!(!hidden_equiv(t, &redex, &dk(&enc, "u@Type"), DEFAULT_FUEL).unwrap());
}

#[test]
fn translation_is_recovered() {
    let enc = system_f();
    let m = ep(POLY_ID);
    let t = enc.translate(&m).unwrap();
    let a = ep("Pi[Kind,Type](#Type, A. Pi[Type,Type](A, x. A))");
    assert_eq!(conservative_invert(&enc, &EptsContext::new(), &t, &a, DEFAULT_FUEL).unwrap(), m);
}

#[test]
fn expanded_translation_is_recovered() {
    let enc = system_f();
    let t = dk(
        &enc,
        r"abs@Kind@Type((\z : U@Kind => z) u@Type,
            \A : El@Kind(u@Type) => Prod@Type@Type(A, \x : El@Type(A) => A),
            \A : El@Kind(u@Type) => (\z : El@Type(Prod@Type@Type(A, \x : El@Type(A) => A)) => z)
                abs@Type@Type(A, \x : El@Type(A) => A, \x : El@Type(A) => (\w : U@Type => x) A))",
    );
    let a = ep("Pi[Kind,Type](#Type, A. Pi[Type,Type](A, x. A))");
    crate::typing::check(&enc.theory, &DkContext::new(), &t, &enc.expected_dk_type(&EptsContext::new(), &a).unwrap(), TypingConfig::default()).unwrap();
    assert_eq!(conservative_invert(&enc, &EptsContext::new(), &t, &a, DEFAULT_FUEL).unwrap(), ep(POLY_ID));
}

#[test]
fn encoded_redex_is_left_alone() {
    let enc = system_f();
    let t = dk(
        &enc,
        r"app@Type@Type(A, \x : El@Type(A) => A, abs@Type@Type(A, \x : El@Type(A) => A, \x : El@Type(A) => x), y)",
    );
    let back = conservative_invert(&enc, &a_y(), &t, &EptsTerm::var("A"), DEFAULT_FUEL).unwrap();
    assert_eq!(back, ep("app[Type,Type](A, x. A, lam[Type,Type](A, x. A, x. x), y)"));
}

#[test]
fn identity_expansion_wraps_and_types() {
    let enc = system_f();
    let m = enc.translate(&ep(POLY_ID)).unwrap();
    let ctx = DkContext::new();
    let ty = crate::typing::infer(&enc.theory, &ctx, &m, TypingConfig::default()).unwrap();
    for p in invertible_positions(&enc, &m) {
        let e = identity_expand(&enc.theory, &ctx, &m, &p, TypingConfig::default()).unwrap();
        assert!(matches!(e.subterm(&p), Some(Term::App(f, _)) if matches!(**f, Term::Lam(..))));
        crate::typing::check(&enc.theory, &ctx, &e, &ty, TypingConfig::default()).unwrap_or_else(|err| panic!("{p:?}: {err}"));
        assert_eq!(nf(&enc.theory, &e, &RuleFilter::beta(), &mut Budget::new(DEFAULT_FUEL)).unwrap(), m);
    }
}

#[test]
fn single_redex_trace() {
    let enc = system_f();
    let m = ep("app[Type,Type](A, x. A, lam[Type,Type](A, x. A, x. x), y)");
    let tr = computation_trace(&enc, &m).unwrap().unwrap();
    assert_eq!(tr.reduct, EptsTerm::var("y"));
    assert_eq!(tr.labels, vec![Label::rule("beta@Type@Type"), Label::Beta]);
    assert_eq!(tr.terms.last(), Some(&Term::var("y")));
    assert!(tr.is_beta_then_framework_beta());
    assert_eq!(replay(&enc, &tr.terms).unwrap().last(), Some(&EptsTerm::var("y")));
}

#[test]
fn normal_terms_have_no_trace() {
    assert!(computation_trace(&system_f(), &ep(POLY_ID)).unwrap().is_none());
}

#[test]
fn source_reachability() {
    let m = ep("app[Type,Type](A, x. A, lam[Type,Type](A, x. A, x. x), y)");
    let y = EptsTerm::var("y");
    assert!(epts_reaches(&m, &y, 1));
    assert!(epts_reaches(&m, &m, 0));
    assert!(!epts_reaches(&y, &m, 3));
}

#[test]
fn identity_round_trip_passes() {
    let enc = system_f();
    let m = ep(POLY_ID);
    let a = ep("Pi[Kind,Type](#Type, A. Pi[Type,Type](A, x. A))");
    let r = adequacy_roundtrip(&enc, &EptsContext::new(), &m, &a, DEFAULT_FUEL).unwrap();
    assert!(r.passed(), "{:?}", r.legs);
    let names: Vec<&str> = r.legs.iter().map(|l| l.name).collect();
    assert_eq!(names, [LEG_SOUNDNESS, LEG_LEFT_INVERSE, LEG_BETA_NORMAL, LEG_COMPUTATION]);

    let redex = ep(&format!("app[Kind,Type](#Type, A. Pi[Type,Type](A, x. A), {POLY_ID}, A)"));
    let r = adequacy_roundtrip(&enc, &a_y(), &redex, &ep("Pi[Type,Type](A, x. A)"), DEFAULT_FUEL).unwrap();
    assert!(r.legs.iter().all(|l| l.outcome == LegOutcome::Pass), "{:?}", r.legs);
}

#[test]
fn variable_round_trip_is_vacuous_on_computation() {
    let enc = system_f();
    let r = adequacy_roundtrip(&enc, &a_y(), &EptsTerm::var("y"), &EptsTerm::var("A"), DEFAULT_FUEL).unwrap();
    let outcomes: Vec<&LegOutcome> = r.legs.iter().map(|l| &l.outcome).collect();
    assert_eq!(outcomes, [&LegOutcome::Pass, &LegOutcome::Pass, &LegOutcome::Pass, &LegOutcome::Vacuous]);
    assert!(r.passed());
}

#[test]
fn internalized_identity_round_trip() {
    let enc = mltt();
    let m = ep("lam[1,0](#0, A. Pi[0,0](A, x. A), A. lam[0,0](A, x. A, x. x))");
    let a = ep("Pi[1,0](#0, A. Pi[0,0](A, x. A))");
    let r = adequacy_roundtrip(&enc, &EptsContext::new(), &m, &a, DEFAULT_FUEL).unwrap();
    assert!(r.passed(), "{:?}", r.legs);
    let t = enc.translate(&m).unwrap();
    assert_eq!(conservative_invert(&enc, &EptsContext::new(), &t, &a, DEFAULT_FUEL).unwrap(), m);
}

#[test]
fn soundness_violations_are_classified() {
    assert!(DecodeError::NotInvertible(Term::Type).is_soundness_violation());
    assert!(!DecodeError::BadPosition(vec![0]).is_soundness_violation());
}

#[test]
fn framework_types_decode_to_source_types() {
    let enc = system_f();
    assert_eq!(decode_type(&enc, &dk(&enc, "U@Kind"), DEFAULT_FUEL).unwrap(), EptsTerm::Sort(Sort::new("Kind")));
    // El over the code of a sort rewrites to the universe
    assert_eq!(decode_type(&enc, &dk(&enc, "El@Kind(u@Type)"), DEFAULT_FUEL).unwrap(), EptsTerm::Sort(Sort::new("Type")));
    let poly = dk(&enc, "El@Kind(Prod@Kind@Type(u@Type, \\A : El@Kind(u@Type) => Prod@Type@Type(A, \\x : El@Type(A) => A)))");
    assert_eq!(decode_type(&enc, &poly, DEFAULT_FUEL).unwrap(), ep("Pi[Kind,Type](#Type, A. Pi[Type,Type](A, x. A))"));
    assert!(matches!(decode_type(&enc, &Term::Type, DEFAULT_FUEL), Err(DecodeError::NotAnEncodedType(_))));
    let m = mltt();
    assert_eq!(decode_type(&m, &m.universe(&Sort::new("1")).unwrap(), DEFAULT_FUEL).unwrap(), EptsTerm::Sort(Sort::new("1")));
}
