//! Invertible forms, closure under reduction and reflection of computation.

mod common;

use common::gen;
use proptest::prelude::*;
use ptsdk::decode::{epts_reaches, identity_expand, invert, invertible_positions, recognize};
use ptsdk::encode::{names, EncodingTheory};
use ptsdk::epts::reduce as source;
use ptsdk::reduce::{contract_at, nf_with_fuel, redexes, Budget, RuleFilter, DEFAULT_FUEL};
use ptsdk::typing::TypingConfig;
use ptsdk::{Label, Name, Term};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn expanded(enc: &EncodingTheory, t: &Term, k: usize, seed: u64) -> Term {
    let fx = common::fixture();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = t.clone();
    for _ in 0..k {
        let ps = invertible_positions(enc, &t);
        t = identity_expand(&enc.theory, &fx.dctx, &t, &ps[rng.gen_range(0..ps.len())], TypingConfig::default()).unwrap();
    }
    t
}

/// Encoded β plus framework β, without `u-red`.
fn computation() -> RuleFilter {
    RuleFilter::families([names::BETA, Label::Beta.family()])
}

/// Binder arguments of encoding constants, which the signature types at products.
fn binder_arguments(enc: &EncodingTheory, t: &Term, out: &mut Vec<Term>) {
    if let Term::Cons(c, args) = t {
        let base = c.as_str().split('@').next().unwrap_or("");
        let o = enc.sort_arity();
        let slots: &[usize] = match base {
            names::PROD | names::APP => &[1],
            names::ABS => &[1, 2],
            _ => &[],
        };
        for &i in slots {
            if let Some(a) = args.get(o + i) {
                out.push(a.clone());
            }
        }
    }
    for k in t.children() {
        binder_arguments(enc, k, out);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invertible_forms_are_closed_under_steps(seed in any::<u64>(), k in 0usize..3) {
        let fx = common::fixture();
        let enc = &fx.corpus.enc;
        let s = fx.sample(seed, None, 6);
        let m = expanded(enc, &enc.translate(&s.term).unwrap(), k, seed);
        let back = invert(enc, &recognize(enc, &m).unwrap());
        for (p, label) in redexes(&enc.theory, &m, &RuleFilter::All) {
            let (n, _) = contract_at(&enc.theory, &m, &p, &RuleFilter::All).unwrap();
            let form = recognize(enc, &n);
            prop_assert!(form.is_some(), "{} not invertible after {} at {:?}", n, label, p);
            let back_n = invert(enc, &form.unwrap());
            if label.family() == names::BETA {
                prop_assert!(epts_reaches(&back, &back_n, 1));
            } else {
                prop_assert_eq!(&back_n, &back, "{} changed the inverse", label);
            }
        }
    }

    #[test]
    fn inversion_commutes_with_substitution(seed in any::<u64>(), arg_seed in any::<u64>(), k in 0usize..3) {
        let fx = common::fixture();
        let enc = &fx.corpus.enc;
        let m = expanded(enc, &enc.translate(&fx.sample(seed, None, 6).term).unwrap(), k, seed);
        let n = expanded(enc, &enc.translate(&fx.sample(arg_seed, Some(&gen::c_type()), 4).term).unwrap(), k, arg_seed);
        let c = Name::new("c");
        let lhs = invert(enc, &recognize(enc, &m.subst(&c, &n)).unwrap());
        let rhs = invert(enc, &recognize(enc, &m).unwrap()).subst(&c, &invert(enc, &recognize(enc, &n).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn framework_computation_reflects_source_computation(seed in any::<u64>(), other in any::<u64>()) {
        let fx = common::fixture();
        let enc = &fx.corpus.enc;
        let m = fx.sample(seed, None, 6);
        let normal = source::nf(&m.term, &mut Budget::new(DEFAULT_FUEL)).unwrap();
        let run = |t: &Term| nf_with_fuel(&enc.theory, t, &computation(), DEFAULT_FUEL).unwrap();
        let image = run(&enc.translate(&m.term).unwrap());
        prop_assert_eq!(&image, &enc.translate(&normal).unwrap());
        // a different source normal form is never reached
        let n = fx.sample(other, None, 6);
        let n_normal = source::nf(&n.term, &mut Budget::new(DEFAULT_FUEL)).unwrap();
        if n_normal != normal {
            prop_assert!(image != run(&enc.translate(&n.term).unwrap()));
        }
    }

    #[test]
    fn normal_inhabitants_of_products_are_abstractions(seed in any::<u64>(), k in 0usize..4) {
        let fx = common::fixture();
        let enc = &fx.corpus.enc;
        let m = expanded(enc, &enc.translate(&fx.sample(seed, None, 6).term).unwrap(), k, seed);
        let normal = nf_with_fuel(&enc.theory, &m, &RuleFilter::beta(), DEFAULT_FUEL).unwrap();
        let mut args = Vec::new();
        binder_arguments(enc, &normal, &mut args);
        for a in args {
            prop_assert!(matches!(a, Term::Lam(..)), "{}", a);
        }
    }
}
