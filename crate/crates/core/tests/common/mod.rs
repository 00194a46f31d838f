//! Corpus loading shared by the integration tests.
#![allow(dead_code)]

pub mod gen;

use std::path::PathBuf;

use ptsdk::encode::{generate, EncodingTheory};
use ptsdk::epts::{epts_infer, EptsContext, EptsTerm, SortSpec};
use ptsdk::syntax::{parse_epts_file, parse_sort_spec};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn read(file: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

#[derive(Clone, Debug)]
pub struct Judgment {
    pub name: String,
    pub ctx: EptsContext,
    pub term: EptsTerm,
    pub ty: EptsTerm,
}

pub struct Corpus {
    pub name: &'static str,
    pub spec: SortSpec,
    pub enc: EncodingTheory,
    pub judgments: Vec<Judgment>,
}

pub fn load(name: &'static str, sorts: &str, terms: &str) -> Corpus {
    let spec = parse_sort_spec(&read(sorts)).unwrap_or_else(|e| panic!("{sorts}: {e}"));
    let file = parse_epts_file(&read(terms), &spec).unwrap_or_else(|e| panic!("{terms}: {e}"));
    let judgments = file
        .judgments()
        .into_iter()
        .map(|(ctx, n, term, ty)| {
            let ty = ty.unwrap_or_else(|| epts_infer(&spec, &ctx, &term).expect("corpus term infers"));
            Judgment { name: n.to_string(), ctx, term, ty }
        })
        .collect();
    let enc = generate(&spec).unwrap_or_else(|e| panic!("{sorts}: {e}"));
    Corpus { name, spec, enc, judgments }
}

pub fn system_f() -> Corpus {
    load("System F", "systemf.sorts", "systemf.epts")
}

pub fn system_f_internalized() -> Corpus {
    load("System F (internalized)", "systemf_internalized.sorts", "systemf.epts")
}

pub fn coc() -> Corpus {
    load("CoC", "coc.sorts", "coc.epts")
}

pub fn type_in_type() -> Corpus {
    load("Type:Type", "typetype.sorts", "typetype.epts")
}

pub fn mltt_finite() -> Corpus {
    load("MLTT {0,1,2}", "mltt.sorts", "mltt.epts")
}

pub fn mltt_internalized() -> Corpus {
    load("MLTT (internalized)", "mltt_internalized.sorts", "mltt.epts")
}

/// The corpora with a terminating source computation.
pub fn main_corpora() -> Vec<Corpus> {
    vec![system_f(), coc(), mltt_finite(), mltt_internalized()]
}

/// System F with the generator's base context, shared by the property suites.
pub struct Fixture {
    pub corpus: Corpus,
    pub ctx: EptsContext,
    pub dctx: ptsdk::typing::DkContext,
}

impl Fixture {
    pub fn sample(&self, seed: u64, goal: Option<&gen::Ty>, max_depth: usize) -> gen::Sample {
        gen::sample_from_seed(seed, &self.corpus.spec, &self.ctx, goal, max_depth)
    }
}

pub fn fixture() -> &'static Fixture {
    static FIX: std::sync::OnceLock<Fixture> = std::sync::OnceLock::new();
    FIX.get_or_init(|| {
        let corpus = system_f();
        let ctx = gen::base_context(&corpus.spec);
        let dctx = corpus.enc.translate_ctx(&ctx).expect("base context translates");
        Fixture { corpus, ctx, dctx }
    })
}
