//! Terms, substitution and rewriting.

mod common;

use proptest::prelude::*;
use ptsdk::decode::{identity_expand, invertible_positions};
use ptsdk::reduce::{contract_at, nf_with_fuel, redexes, step, RuleFilter, DEFAULT_FUEL};
use ptsdk::typing::TypingConfig;
use ptsdk::{alpha_eq, Name, Term, Theory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARS: [&str; 3] = ["x", "y", "z"];

/// Untyped terms over the System F signature, with the heads of the
/// `beta` and `u-red` rules planted often enough to produce redexes.
fn term(depth: u32) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        prop::sample::select(VARS.to_vec()).prop_map(Term::var),
        Just(Term::constant("u@Type")),
        Just(Term::constant("U@Type")),
    ];
    leaf.prop_recursive(depth, 48, 4, |inner| {
        let named = prop::sample::select(VARS.to_vec());
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (named.clone(), inner.clone(), inner.clone()).prop_map(|(x, a, b)| Term::lam(x, a, b)),
            (named, inner.clone(), inner.clone()).prop_map(|(x, a, b)| Term::pi(x, a, b)),
            inner.clone().prop_map(|a| Term::cons("El@Type", vec![a])),
            Just(Term::cons("El@Kind", vec![Term::constant("u@Type")])),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::cons("Prod@Type@Type", vec![a, b])),
            (inner.clone(), inner.clone(), inner.clone(), inner.clone()).prop_map(|(a, b, m, n)| {
                let abs = Term::cons("abs@Type@Type", vec![a.clone(), b.clone(), m]);
                Term::cons("app@Type@Type", vec![a, b, abs, n])
            }),
        ]
    })
    .boxed()
}

/// Same term with every binder renamed.
fn rename_binders(t: &Term) -> Term {
    match t {
        Term::Lam(x, a, b) => Term::lam_raw(Name::new(&format!("{x}_r")), rename_binders(a), rename_binders(b)),
        Term::Pi(x, a, b) => Term::pi_raw(Name::new(&format!("{x}_r")), rename_binders(a), rename_binders(b)),
        _ => t.with_children(t.children().into_iter().map(rename_binders).collect()),
    }
}

fn arities_ok(theory: &Theory, t: &Term) -> bool {
    let here = match t {
        Term::Cons(c, args) => theory.arity(c.as_str()) == Some(args.len()),
        _ => true,
    };
    here && t.children().into_iter().all(|k| arities_ok(theory, k))
}

/// Typed framework terms: translations of generated source terms with
/// identity redexes wrapped around random positions.
fn typed_term(seed: u64) -> Term {
    let fx = common::fixture();
    let enc = &fx.corpus.enc;
    let s = fx.sample(seed, None, 6);
    let mut t = enc.translate(&s.term).expect("translates");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5);
    for _ in 0..rng.gen_range(0..4) {
        let ps = invertible_positions(enc, &t);
        let p = &ps[rng.gen_range(0..ps.len())];
        t = identity_expand(&enc.theory, &fx.dctx, &t, p, TypingConfig::default()).expect("expands");
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn substitution_respects_alpha(m in term(4), n in term(2), x in prop::sample::select(VARS.to_vec())) {
        let m2 = rename_binders(&m);
        prop_assert!(alpha_eq(&m, &m2));
        let x = Name::new(x);
        prop_assert!(alpha_eq(&m.subst(&x, &n), &m2.subst(&x, &n)));
    }

    #[test]
    fn substitution_does_not_capture(m in term(4), n in term(2), x in prop::sample::select(VARS.to_vec())) {
        let x = Name::new(x);
        prop_assume!(m.has_fvar(&x));
        let r = m.subst(&x, &n);
        for y in n.free_vars() {
            prop_assert!(r.has_fvar(&y), "{y} captured in {r}");
        }
        prop_assert!(r.is_locally_closed());
    }

    #[test]
    fn steps_preserve_arities(m in term(4)) {
        let theory = &common::fixture().corpus.enc.theory;
        for (p, _) in redexes(theory, &m, &RuleFilter::All) {
            let (r, _) = contract_at(theory, &m, &p, &RuleFilter::All).unwrap();
            prop_assert!(arities_ok(theory, &r));
        }
        if let Some((r, _)) = step(theory, &m) {
            prop_assert!(arities_ok(theory, &r));
        }
    }

    #[test]
    fn one_step_divergence_joins(m in term(3)) {
        let theory = &common::fixture().corpus.enc.theory;
        let rs = redexes(theory, &m, &RuleFilter::All);
        prop_assume!(rs.len() >= 2);
        let normal = |t: &Term| nf_with_fuel(theory, t, &RuleFilter::All, 2_000).ok();
        let reducts: Vec<Term> = rs.iter().map(|(p, _)| contract_at(theory, &m, p, &RuleFilter::All).unwrap().0).collect();
        let nfs: Vec<Option<Term>> = reducts.iter().map(normal).collect();
        // untyped terms may diverge; join whenever normal forms exist
        let found: Vec<&Term> = nfs.iter().flatten().collect();
        prop_assume!(found.len() == nfs.len());
        prop_assert!(found.windows(2).all(|w| w[0] == w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn beta_normalization_terminates_and_is_idempotent(seed in any::<u64>()) {
        let theory = &common::fixture().corpus.enc.theory;
        let t = typed_term(seed);
        let once = nf_with_fuel(theory, &t, &RuleFilter::beta(), DEFAULT_FUEL);
        prop_assert!(once.is_ok(), "fuel exhausted on {t}");
        let once = once.unwrap();
        prop_assert_eq!(nf_with_fuel(theory, &once, &RuleFilter::beta(), DEFAULT_FUEL).unwrap(), once.clone());
        prop_assert!(redexes(theory, &once, &RuleFilter::beta()).is_empty());
    }

    #[test]
    fn typed_one_step_divergence_joins(seed in any::<u64>()) {
        let theory = &common::fixture().corpus.enc.theory;
        let t = typed_term(seed);
        let rs = redexes(theory, &t, &RuleFilter::All);
        let normal = |u: &Term| nf_with_fuel(theory, u, &RuleFilter::All, DEFAULT_FUEL).unwrap();
        let target = normal(&t);
        for (p, _) in rs.iter().take(6) {
            let (r, _) = contract_at(theory, &t, p, &RuleFilter::All).unwrap();
            prop_assert_eq!(normal(&r), target.clone());
        }
    }
}
