//! Stratification, arity preservation and the simply-typed erasure.

mod common;

use proptest::prelude::*;
use ptsdk::analysis::{
    check_arity_preserving, check_rules_well_formed, classify, erase_term, erase_type, erased_path, SyntacticClass,
};
use ptsdk::decode::{identity_expand, invertible_positions};
use ptsdk::reduce::{contract_at, redexes, RuleFilter};
use ptsdk::syntax::parse_theory;
use ptsdk::typing::{infer, TypingConfig};
use ptsdk::{Term, Theory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every type occurring in a theory's declarations, telescopes included.
fn declared_types(theory: &Theory) -> Vec<Term> {
    let mut out = Vec::new();
    for d in theory.decls() {
        out.push(d.ty.clone());
        out.extend(d.telescope.iter().map(|(_, a)| a.clone()));
    }
    out
}

#[test]
fn one_step_rewrites_keep_erasures() {
    let mut all = common::main_corpora();
    all.push(common::type_in_type());
    for c in &all {
        let theory = &c.enc.theory;
        assert!(check_arity_preserving(theory).is_empty());
        let mut types = declared_types(theory);
        for j in &c.judgments {
            types.push(c.enc.expected_dk_type(&j.ctx, &j.ty).unwrap());
            for (_, a) in c.enc.translate_ctx(&j.ctx).unwrap().entries() {
                types.push(a.clone());
            }
        }
        let mut rewritten = 0;
        for a in &types {
            let Ok(e) = erase_type(theory, a) else { continue };
            for (p, _) in redexes(theory, a, &RuleFilter::All) {
                let (a2, _) = contract_at(theory, a, &p, &RuleFilter::All).unwrap();
                assert_eq!(erase_type(theory, &a2).as_ref(), Ok(&e), "{}: {a} at {p:?}", c.name);
                rewritten += 1;
            }
        }
        assert!(rewritten > 0, "{}: no type rewrote", c.name);
    }
}

#[test]
fn arity_preservation_implies_well_formed_rules() {
    let mut theories: Vec<Theory> = common::main_corpora().into_iter().map(|c| c.enc.theory).collect();
    theories.push(common::type_in_type().enc.theory);
    theories.push(parse_theory(&common::read("bad_traditional.dk")).unwrap());
    let mut premise = 0;
    for t in &theories {
        if check_arity_preserving(t).is_empty() {
            assert!(check_rules_well_formed(t).is_empty());
            premise += 1;
        }
    }
    assert_eq!(premise, theories.len() - 1);
}

#[test]
fn kinds_classify_as_kinds() {
    let theory = common::system_f().enc.theory;
    assert_eq!(classify(&theory, &Term::Type), SyntacticClass::Kind);
    for d in theory.decls() {
        let expected = if matches!(ptsdk::analysis::constant_level(&theory, d.name.as_str()).unwrap(), ptsdk::analysis::ConstantLevel::TypeLevel) {
            SyntacticClass::Kind
        } else {
            SyntacticClass::TypeFamily
        };
        assert_eq!(classify(&theory, &d.ty), expected, "{}", d.name);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classes_follow_types(seed in any::<u64>()) {
        let fx = common::fixture();
        let enc = &fx.corpus.enc;
        let s = fx.sample(seed, None, 6);
        let t = enc.translate(&s.term).unwrap();
        let a = infer(&enc.theory, &fx.dctx, &t, TypingConfig::default()).unwrap();
        let k = infer(&enc.theory, &fx.dctx, &a, TypingConfig::default()).unwrap();
        prop_assert_eq!(classify(&enc.theory, &t), SyntacticClass::Object);
        prop_assert_eq!(classify(&enc.theory, &a), SyntacticClass::TypeFamily);
        prop_assert_eq!(classify(&enc.theory, &k), SyntacticClass::Kind);
    }

    #[test]
    fn erased_beta_steps(seed in any::<u64>()) {
        let fx = common::fixture();
        let enc = &fx.corpus.enc;
        let theory = &enc.theory;
        let s = fx.sample(seed, None, 6);
        let mut t = enc.translate(&s.term).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..2 {
            let ps = invertible_positions(enc, &t);
            t = identity_expand(theory, &fx.dctx, &t, &ps[rng.gen_range(0..ps.len())], TypingConfig::default()).unwrap();
        }
        let et = erase_term(theory, &t).unwrap();
        for (p, _) in redexes(theory, &t, &RuleFilter::beta()) {
            let (t2, _) = contract_at(theory, &t, &p, &RuleFilter::beta()).unwrap();
            let et2 = erase_term(theory, &t2).unwrap();
            prop_assert!(et != et2);
            let q = erased_path(&t, &p).unwrap();
            let head: Vec<usize> = q.iter().copied().chain([0]).collect();
            let mid = et.contract_at(&head);
            prop_assert!(mid.is_some());
            prop_assert_eq!(mid.unwrap().contract_at(&q), Some(et2));
        }
    }
}
