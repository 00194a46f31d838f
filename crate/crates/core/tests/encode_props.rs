//! Theory generation and the translation.

mod common;

use common::gen;
use proptest::prelude::*;
use ptsdk::confluence::check_orthogonal;
use ptsdk::analysis::check_arity_preserving;
use ptsdk::decode::computation_trace_at;
use ptsdk::encode::{generate_finite, names};
use ptsdk::epts::reduce::redexes as source_redexes;
use ptsdk::epts::{EptsTerm, Sort, SortSpec};
use ptsdk::reduce::{nf_with_fuel, RuleFilter, DEFAULT_FUEL};
use ptsdk::typing::{check, check_signature, DkContext, TypingConfig};
use ptsdk::{Label, Name, Term};

/// A functional spec over `s0..sn`: at most one axiom per sort and one rule per pair.
fn finite_spec() -> impl Strategy<Value = SortSpec> {
    (1usize..=4).prop_flat_map(|n| {
        let axioms = prop::collection::vec(prop::option::of(0..n), n);
        let rules = prop::collection::vec(prop::option::of(0..n), n * n);
        (Just(n), axioms, rules).prop_map(|(n, axioms, rules)| {
            let name = |i: usize| format!("s{i}");
            let sorts: Vec<String> = (0..n).map(name).collect();
            let ax: Vec<(String, String)> =
                axioms.iter().enumerate().filter_map(|(i, t)| t.map(|t| (name(i), name(t)))).collect();
            let rl: Vec<(String, String, String)> = rules
                .iter()
                .enumerate()
                .filter_map(|(k, t)| t.map(|t| (name(k / n), name(k % n), name(t))))
                .collect();
            let sorts: Vec<&str> = sorts.iter().map(|s| s.as_str()).collect();
            let ax: Vec<(&str, &str)> = ax.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let rl: Vec<(&str, &str, &str)> = rl.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
            SortSpec::finite(&sorts, &ax, &rl).expect("functional by construction")
        })
    })
}

/// Closed sort expressions over `z`, `s`, `Ax`, `Rl` with their value.
fn sort_expr() -> impl Strategy<Value = (Term, u32)> {
    let leaf = Just((Term::constant("z"), 0u32));
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|(t, v)| (Term::cons("s", vec![t]), v + 1)),
            inner.clone().prop_map(|(t, v)| (Term::cons("Ax", vec![t]), v + 1)),
            (inner.clone(), inner).prop_map(|((a, x), (b, y))| (Term::cons("Rl", vec![a, b]), x.max(y))),
        ]
    })
}

fn numeral(v: u32) -> Term {
    (0..v).fold(Term::constant("z"), |t, _| Term::cons("s", vec![t]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_theories_are_well_behaved(spec in finite_spec()) {
        let enc = generate_finite(&spec).unwrap();
        prop_assert!(check_signature(&enc.theory, TypingConfig::default()).is_empty());
        prop_assert!(check_arity_preserving(&enc.theory).is_empty());
        prop_assert!(check_orthogonal(&enc.theory).is_empty());
        let f = spec.as_finite().unwrap();
        prop_assert_eq!(enc.theory.decls().len(), 2 * f.sorts().len() + f.axioms().len() + 3 * f.rules().len());
        prop_assert_eq!(enc.theory.rules().len(), f.axioms().len() + f.rules().len());
        for (s1, s2) in f.axioms() {
            let code = enc.translate(&EptsTerm::Sort(s1.clone())).unwrap();
            check(&enc.theory, &DkContext::new(), &code, &enc.universe(&s2).unwrap(), TypingConfig::default()).unwrap();
        }
    }

    #[test]
    fn translation_is_compositional(seed in any::<u64>(), arg_seed in any::<u64>()) {
        let fx = common::fixture();
        let enc = &fx.corpus.enc;
        let m = fx.sample(seed, None, 6).term;
        let n = fx.sample(arg_seed, Some(&gen::c_type()), 4).term;
        let c = Name::new("c");
        let lhs = enc.translate(&m).unwrap().subst(&c, &enc.translate(&n).unwrap());
        prop_assert_eq!(lhs, enc.translate(&m.subst(&c, &n)).unwrap());
    }

    #[test]
    fn source_steps_are_beta_then_framework_beta(seed in any::<u64>()) {
        let fx = common::fixture();
        let enc = &fx.corpus.enc;
        let m = fx.sample(seed, None, 6).term;
        for p in source_redexes(&m) {
            let tr = computation_trace_at(enc, &m, &p).unwrap();
            prop_assert_eq!(tr.terms.last().unwrap(), &enc.translate(&tr.reduct).unwrap());
            prop_assert!(tr.is_beta_then_framework_beta());
            let (s1, s2) = m.subterm(&p).unwrap().sorts().unwrap();
            let label = Label::rule(names::indexed(names::BETA, &[s1, s2]));
            prop_assert!(tr.labels.chunks(2).all(|c| c[0] == label));
        }
    }

    #[test]
    fn closed_sort_expressions_normalize_to_numerals((t, v) in sort_expr()) {
        let c = common::mltt_internalized();
        let theory = &c.enc.theory;
        prop_assert_eq!(nf_with_fuel(theory, &t, &RuleFilter::All, DEFAULT_FUEL).unwrap(), numeral(v));
    }

    #[test]
    fn distinct_values_have_distinct_normal_forms((a, x) in sort_expr(), (b, y) in sort_expr()) {
        let c = common::mltt_internalized();
        let theory = &c.enc.theory;
        let na = nf_with_fuel(theory, &a, &RuleFilter::All, DEFAULT_FUEL).unwrap();
        let nb = nf_with_fuel(theory, &b, &RuleFilter::All, DEFAULT_FUEL).unwrap();
        prop_assert_eq!(na == nb, x == y);
    }
}

#[test]
fn named_sorts_have_distinct_codes() {
    let c = common::mltt_internalized();
    let spec = c.enc.spec().as_internalized().unwrap();
    let mut seen = Vec::new();
    for s in ["0", "1", "2"] {
        let r = spec.normal_representation(&Sort::new(s)).unwrap();
        assert_eq!(spec.name_of(&r), Sort::new(s));
        assert!(!seen.contains(&r));
        seen.push(r);
    }
}
