use std::path::Path;

use ptsdk::analysis::{
    check_arity_preserving, check_rules_well_formed, classify, constant_level, erase_signature, ConstantLevel,
};
use ptsdk::confluence::check_orthogonal;
use ptsdk::decode::{adequacy_roundtrip, conservative_invert, decode_type, LegOutcome};
use ptsdk::encode::{generate, EncodingTheory};
use ptsdk::epts::{epts_check_with_fuel, epts_infer_with_fuel, epts_sort_of, EptsContext, EptsTerm, SortSpec};
use ptsdk::morphism::{build_phi, verify_morphism, MorphismDiagnostic, TheoryMorphism};
use ptsdk::reduce::{whnf, Budget};
use ptsdk::syntax::{
    print_dk_item, print_dk_term, print_morphism, print_theory, DkFile, DkItem, EptsFile, EptsItem, Payload, Pos,
    SourceFile,
};
use ptsdk::typing::{check_signature, Checker, DkContext, TypingConfig};
use ptsdk::{Term, Theory};
use serde_json::Value;

use crate::report::{Record, Reporter, Status};
use crate::CliError;

pub struct Env {
    pub fuel: u64,
    pub trace: bool,
}

impl Env {
    fn cfg(&self) -> TypingConfig {
        TypingConfig { fuel: self.fuel, trace: self.trace }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn shown(path: &Path) -> String {
    path.display().to_string()
}

fn syntax(path: &Path) -> impl Fn(ptsdk::syntax::SyntaxError) -> CliError + '_ {
    move |source| CliError::Syntax { path: shown(path), source }
}

fn load_spec(path: &Path) -> Result<SortSpec, CliError> {
    match SourceFile::sort_spec(path, &read(path)?).map_err(syntax(path))?.payload {
        Payload::SortSpec(s) => Ok(s),
        _ => unreachable!(),
    }
}

fn load_dk(path: &Path, base: &Theory) -> Result<DkFile, CliError> {
    match SourceFile::theory(path, &read(path)?, base).map_err(syntax(path))?.payload {
        Payload::Theory(f) => Ok(f),
        _ => unreachable!(),
    }
}

fn load_epts(path: &Path, spec: &SortSpec) -> Result<EptsFile, CliError> {
    match SourceFile::epts(path, &read(path)?, spec).map_err(syntax(path))?.payload {
        Payload::Epts(f) => Ok(f),
        _ => unreachable!(),
    }
}

fn load_morphism(path: &Path, source: &Theory, target: &Theory) -> Result<(TheoryMorphism, Vec<Pos>), CliError> {
    let f = SourceFile::morphism(path, &read(path)?, source, target).map_err(syntax(path))?;
    match f.payload {
        Payload::Morphism(m) => Ok((m, f.spans)),
        _ => unreachable!(),
    }
}

fn encoding(path: &Path) -> Result<EncodingTheory, CliError> {
    Ok(generate(&load_spec(path)?)?)
}

fn labels(trace: &[ptsdk::Label]) -> Vec<String> {
    trace.iter().map(|l| l.to_string()).collect()
}

fn with_trace(r: Record, trace: &[ptsdk::Label]) -> Record {
    let ls = labels(trace);
    let note = if ls.is_empty() { "trace: no rewrites".to_string() } else { format!("trace: {}", ls.join(", ")) };
    r.detail("trace", ls).note(note)
}

/// `x : A` is admissible when `A` has sort TYPE or KIND.
fn check_is_type(theory: &Theory, ctx: &DkContext, a: &Term, cfg: TypingConfig) -> Result<Vec<ptsdk::Label>, String> {
    let mut ch = Checker::new(theory, ctx, cfg);
    let s = ch.infer(a).map_err(|e| e.to_string())?;
    let mut budget = Budget::new(cfg.fuel);
    match whnf(theory, &s, &mut budget).map_err(|e| e.to_string())? {
        Term::Type | Term::Kind => Ok(ch.trace().to_vec()),
        other => Err(format!("{} is not a type (it has type {})", print_dk_term(theory, a), print_dk_term(theory, &other))),
    }
}

pub fn check_dk(env: &Env, out: &mut Reporter, path: &Path) -> Result<(), CliError> {
    let file = shown(path);
    let f = load_dk(path, &Theory::new())?;
    let theory = &f.theory;
    let sig = check_signature(theory, env.cfg());
    for d in &sig {
        out.emit(Record::error("signature", d.error.to_string()).at(&file, None).subject(d.constant.as_str()));
    }
    if sig.is_empty() {
        out.emit(
            Record::ok("signature", format!("{} constants, {} rules", theory.decls().len(), theory.rules().len()))
                .at(&file, None),
        );
    }
    let mut ctx = DkContext::new();
    for (i, (item, pos)) in f.items.iter().zip(&f.spans).enumerate() {
        let subject = format!("#{}", i + 1);
        let base = |kind, status, msg: String| Record::new(kind, status, msg).at(&file, Some(*pos)).subject(subject.clone());
        match item {
            DkItem::Assume(x, a) => match check_is_type(theory, &ctx, a, env.cfg()) {
                Ok(trace) => {
                    let r = base("assume", Status::Ok, format!("{x} : {}", print_dk_term(theory, a)));
                    out.emit(if env.trace { with_trace(r, &trace) } else { r });
                    ctx.push(x.clone(), a.clone());
                }
                Err(e) => out.emit(base("assume", Status::Error, format!("{x}: {e}"))),
            },
            DkItem::Check(m, a) => {
                if let Err(e) = check_is_type(theory, &ctx, a, env.cfg()) {
                    out.emit(base("check", Status::Error, e));
                    continue;
                }
                let mut ch = Checker::new(theory, &ctx, env.cfg());
                let r = match ch.check(m, a) {
                    Ok(()) => base("check", Status::Ok, format!("{} : {}", print_dk_term(theory, m), print_dk_term(theory, a))),
                    Err(e) => base("check", Status::Error, e.to_string()),
                };
                out.emit(if env.trace { with_trace(r, ch.trace()) } else { r });
            }
            DkItem::Infer(m) => {
                let mut ch = Checker::new(theory, &ctx, env.cfg());
                let r = match ch.infer(m) {
                    Ok(t) => base("infer", Status::Ok, format!("{} : {}", print_dk_term(theory, m), print_dk_term(theory, &t)))
                        .detail("type", print_dk_term(theory, &t)),
                    Err(e) => base("infer", Status::Error, e.to_string()),
                };
                out.emit(if env.trace { with_trace(r, ch.trace()) } else { r });
            }
        }
    }
    Ok(())
}

/// Each definition of a source file with its context and its checked type.
struct Checked {
    name: String,
    pos: Pos,
    ctx: EptsContext,
    body: EptsTerm,
    ty: Result<EptsTerm, String>,
}

fn check_defs(env: &Env, spec: &SortSpec, f: &EptsFile) -> Vec<Checked> {
    let mut out = Vec::new();
    for (i, (item, pos)) in f.items.iter().zip(&f.spans).enumerate() {
        if let EptsItem::Def { name, ty, body } = item {
            let ctx = f.context_before(i);
            let ty = match ty {
                Some(a) => epts_check_with_fuel(spec, &ctx, body, a, env.fuel).map(|_| a.clone()),
                None => epts_infer_with_fuel(spec, &ctx, body, env.fuel),
            };
            out.push(Checked { name: name.to_string(), pos: *pos, ctx, body: body.clone(), ty: ty.map_err(|e| e.to_string()) });
        }
    }
    out
}

pub fn check_epts(env: &Env, out: &mut Reporter, sorts: &Path, path: &Path) -> Result<(), CliError> {
    let file = shown(path);
    let spec = load_spec(sorts)?;
    let f = load_epts(path, &spec)?;
    for (i, (item, pos)) in f.items.iter().zip(&f.spans).enumerate() {
        if let EptsItem::Assume(x, a) = item {
            let r = match epts_sort_of(&spec, &f.context_before(i), a, env.fuel) {
                Ok(s) => Record::ok("assume", format!("{a}, of sort {s}")).detail("sort", s.to_string()),
                Err(e) => Record::error("assume", format!("{x}: {e}")),
            };
            out.emit(r.at(&file, Some(*pos)).subject(x.as_str()));
        }
    }
    for c in check_defs(env, &spec, &f) {
        let r = match &c.ty {
            Ok(a) => Record::ok("def", format!("has type {a}")).detail("type", a.to_string()),
            Err(e) => Record::error("def", e.clone()),
        };
        out.emit(r.at(&file, Some(c.pos)).subject(c.name));
    }
    Ok(())
}

pub fn encode(
    env: &Env,
    out: &mut Reporter,
    sorts: &Path,
    source: Option<&Path>,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let spec = load_spec(sorts)?;
    let enc = generate(&spec)?;
    let theory = &enc.theory;
    let mut doc = print_theory(theory);
    out.to_stderr = output.is_none();
    out.emit(
        Record::ok("theory", format!("{} constants, {} rules", theory.decls().len(), theory.rules().len()))
            .at(&shown(sorts), None),
    );
    if let Some(path) = source {
        let file = shown(path);
        let f = load_epts(path, &spec)?;
        let defs = check_defs(env, &spec, &f);
        let mut next = defs.iter();
        for (i, (item, pos)) in f.items.iter().zip(&f.spans).enumerate() {
            let (subject, translated) = match item {
                EptsItem::Assume(x, a) => {
                    let ctx = f.context_before(i);
                    (x.to_string(), enc.expected_dk_type(&ctx, a).map(|t| DkItem::Assume(x.clone(), t)).map_err(|e| e.to_string()))
                }
                EptsItem::Def { .. } => {
                    let c = next.next().expect("one entry per definition");
                    let item = c.ty.clone().and_then(|a| {
                        let m = enc.translate(&c.body).map_err(|e| e.to_string())?;
                        let t = enc.expected_dk_type(&c.ctx, &a).map_err(|e| e.to_string())?;
                        Ok(DkItem::Check(m, t))
                    });
                    (c.name.clone(), item)
                }
            };
            match translated {
                Ok(item) => {
                    let text = print_dk_item(theory, &item);
                    if matches!(item, DkItem::Check(..)) {
                        doc.push_str(&format!("// {subject}\n"));
                    }
                    doc.push_str(&text);
                    doc.push('\n');
                    out.emit_item(Record::ok("encode", text.clone()).at(&file, Some(*pos)).subject(subject).detail("dk", text));
                }
                Err(e) => out.emit(Record::error("encode", e).at(&file, Some(*pos)).subject(subject)),
            }
        }
    }
    match output {
        Some(p) => {
            write(p, &doc)?;
            out.emit(Record::ok("encode", format!("wrote {}", shown(p))));
        }
        None => out.document(&doc),
    }
    Ok(())
}

pub fn decode(env: &Env, out: &mut Reporter, sorts: &Path, path: &Path) -> Result<(), CliError> {
    let file = shown(path);
    let enc = encoding(sorts)?;
    let f = load_dk(path, &enc.theory)?;
    if f.theory.decls().len() != enc.theory.decls().len() || f.theory.rules().len() != enc.theory.rules().len() {
        return Err(CliError::Usage(format!("{file}: declarations beyond the generated signature cannot be decoded")));
    }
    let theory = &enc.theory;
    let mut dctx = DkContext::new();
    let mut ectx = EptsContext::new();
    for (i, (item, pos)) in f.items.iter().zip(&f.spans).enumerate() {
        let subject = format!("#{}", i + 1);
        let at = |r: Record| r.at(&file, Some(*pos)).subject(subject.clone());
        match item {
            DkItem::Assume(x, t) => {
                let r = check_is_type(theory, &dctx, t, env.cfg())
                    .and_then(|_| decode_type(&enc, t, env.fuel).map_err(|e| e.to_string()));
                match r {
                    Ok(a) => {
                        out.emit(at(Record::ok("assume", format!("{x} : {a}")).detail("type", a.to_string())));
                        dctx.push(x.clone(), t.clone());
                        ectx.push(x.clone(), a);
                    }
                    Err(e) => out.emit(at(Record::error("assume", format!("{x}: {e}")))),
                }
            }
            DkItem::Check(m, _) | DkItem::Infer(m) => {
                let mut ch = Checker::new(theory, &dctx, env.cfg());
                let ty = match item {
                    DkItem::Check(_, t) => check_is_type(theory, &dctx, t, env.cfg())
                        .and_then(|_| ch.check(m, t).map_err(|e| e.to_string()))
                        .map(|_| t.clone()),
                    _ => ch.infer(m).map_err(|e| e.to_string()),
                };
                let ty = match ty {
                    Ok(t) => t,
                    Err(e) => {
                        out.emit(at(Record::error("decode", e)));
                        continue;
                    }
                };
                let a = match decode_type(&enc, &ty, env.fuel) {
                    Ok(a) => a,
                    Err(e) => {
                        let status = if e.is_soundness_violation() { Status::Violation } else { Status::Error };
                        out.emit(at(Record::new("decode", status, e.to_string())));
                        continue;
                    }
                };
                match conservative_invert(&enc, &ectx, m, &a, env.fuel) {
                    Ok(back) => out.emit(at(Record::ok("decode", format!("{back} : {a}"))
                        .detail("term", back.to_string())
                        .detail("type", a.to_string()))),
                    Err(e) => {
                        let status = if e.is_soundness_violation() { Status::Violation } else { Status::Error };
                        out.emit(at(Record::new("decode", status, e.to_string())));
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn roundtrip(env: &Env, out: &mut Reporter, sorts: &Path, path: &Path) -> Result<(), CliError> {
    let file = shown(path);
    let spec = load_spec(sorts)?;
    let enc = generate(&spec)?;
    let f = load_epts(path, &spec)?;
    for c in check_defs(env, &spec, &f) {
        let at = |r: Record| r.at(&file, Some(c.pos)).subject(c.name.clone());
        let a = match &c.ty {
            Ok(a) => a,
            Err(e) => {
                out.emit(at(Record::error("roundtrip", e.clone())));
                continue;
            }
        };
        let report = match adequacy_roundtrip(&enc, &c.ctx, &c.body, a, env.fuel) {
            Ok(r) => r,
            Err(e) => {
                let status = if e.is_soundness_violation() { Status::Violation } else { Status::Error };
                out.emit(at(Record::new("roundtrip", status, e.to_string())));
                continue;
            }
        };
        for leg in &report.legs {
            let (status, outcome) = match &leg.outcome {
                LegOutcome::Pass => (Status::Ok, "pass".to_string()),
                LegOutcome::Vacuous => (Status::Ok, "vacuous".to_string()),
                LegOutcome::Fail(why) => (Status::Violation, format!("fail: {why}")),
            };
            out.emit(at(Record::new("leg", status, format!("{}: {outcome}", leg.name)).detail("leg", leg.name)));
        }
        let r = match &report.trace {
            None => at(Record::ok("trace", "normal, no source step")).detail("labels", Vec::<String>::new()),
            Some(tr) => {
                let ls = labels(&tr.labels);
                let mut r = at(Record::ok("trace", ls.join(", ")))
                    .detail("labels", ls)
                    .detail("reduct", tr.reduct.to_string());
                if env.trace {
                    let terms: Vec<String> = tr.terms.iter().map(|t| print_dk_term(&enc.theory, t)).collect();
                    for (k, t) in terms.iter().enumerate() {
                        r = r.note(format!("{k}: {t}"));
                    }
                    r = r.detail("terms", terms);
                }
                r
            }
        };
        out.emit(r);
    }
    Ok(())
}

fn level_word(l: ConstantLevel) -> &'static str {
    match l {
        ConstantLevel::TypeLevel => "type-level",
        ConstantLevel::ObjectLevel => "object-level",
    }
}

pub fn analyze(env: &Env, out: &mut Reporter, path: &Path, erased: bool) -> Result<(), CliError> {
    let _ = env;
    let file = shown(path);
    let theory = load_dk(path, &Theory::new())?.theory;
    for d in theory.decls() {
        let class = format!("{:?}", classify(&theory, &d.ty));
        let r = match constant_level(&theory, d.name.as_str()) {
            Ok(l) => Record::ok("class", format!("{}, declared type is a {class}", level_word(l)))
                .detail("level", level_word(l))
                .detail("class", class),
            Err(e) => Record::error("class", e.to_string()),
        };
        out.emit(r.at(&file, None).subject(d.name.as_str()));
    }
    let arity = check_arity_preserving(&theory);
    for issue in &arity {
        out.emit(
            Record::error("arity", issue.to_string())
                .at(&file, None)
                .subject(issue.rule.as_str())
                .detail("offending", print_dk_term(&theory, &issue.offending)),
        );
    }
    for issue in check_rules_well_formed(&theory) {
        out.emit(Record::error("rule-shape", issue.to_string()).at(&file, None).subject(issue.rule.as_str()));
    }
    for issue in check_orthogonal(&theory) {
        out.emit(Record::new("orthogonality", Status::Warning, issue.to_string()).at(&file, None));
    }
    if arity.is_empty() {
        out.emit(Record::ok("arity", "every type-level rule preserves arity").at(&file, None));
    }
    if erased {
        match erase_signature(&theory) {
            Ok(sig) => {
                for (c, t) in &sig.consts {
                    out.emit(Record::ok("erased", t.to_string()).at(&file, None).subject(c.to_string()));
                }
            }
            Err(e) => out.emit(Record::error("erased", e.to_string()).at(&file, None)),
        }
    }
    Ok(())
}

fn emit_morphism_diagnostics(out: &mut Reporter, file: &str, f: &TheoryMorphism, diags: &[MorphismDiagnostic]) {
    for d in diags {
        let (subject, status) = match d {
            MorphismDiagnostic::IllTyped { constant, .. } => (constant, Status::Error),
            MorphismDiagnostic::Refuted { rule, .. } => (rule, Status::Error),
            MorphismDiagnostic::Inconclusive { rule, .. } => (rule, Status::Warning),
            MorphismDiagnostic::Apply { item, .. } => (item, Status::Error),
        };
        out.emit(Record::new("morphism", status, d.to_string()).at(file, None).subject(subject.as_str()));
    }
    if diags.iter().all(|d| !d.is_refutation()) {
        out.emit(
            Record::ok(
                "morphism",
                format!("{} bodies typed, {} rules simulated", f.bodies().len(), f.source.rules().len()),
            )
            .at(file, None),
        );
    }
}

pub fn morphism_verify(env: &Env, out: &mut Reporter, source: &Path, target: &Path, map: &Path) -> Result<(), CliError> {
    let src = load_dk(source, &Theory::new())?.theory;
    let tgt = load_dk(target, &Theory::new())?.theory;
    let (f, _) = load_morphism(map, &src, &tgt)?;
    let diags = verify_morphism(&f, env.cfg());
    emit_morphism_diagnostics(out, &shown(map), &f, &diags);
    Ok(())
}

pub fn morphism_apply(
    env: &Env,
    out: &mut Reporter,
    source: &Path,
    target: &Path,
    map: &Path,
    items: &Path,
) -> Result<(), CliError> {
    let file = shown(items);
    let src = load_dk(source, &Theory::new())?.theory;
    let tgt = load_dk(target, &Theory::new())?.theory;
    let (f, _) = load_morphism(map, &src, &tgt)?;
    let judgments = load_dk(items, &src)?;
    let mut ctx = DkContext::new();
    let mut doc = String::new();
    out.to_stderr = true;
    for (i, (item, pos)) in judgments.items.iter().zip(&judgments.spans).enumerate() {
        let at = |r: Record| r.at(&file, Some(*pos)).subject(format!("#{}", i + 1));
        let mapped = match item {
            DkItem::Assume(x, a) => f.apply(a).map(|a| DkItem::Assume(x.clone(), a)),
            DkItem::Check(m, a) => f.apply(m).and_then(|m| Ok(DkItem::Check(m, f.apply(a)?))),
            DkItem::Infer(m) => f.apply(m).map(DkItem::Infer),
        };
        let mapped = match mapped {
            Ok(m) => m,
            Err(e) => {
                out.emit(at(Record::error("apply", e.to_string())));
                continue;
            }
        };
        // the image must hold in the target
        let verdict = match &mapped {
            DkItem::Assume(x, a) => {
                let v = check_is_type(&f.target, &ctx, a, env.cfg());
                if v.is_ok() {
                    ctx.push(x.clone(), a.clone());
                }
                v.map(|_| ())
            }
            DkItem::Check(m, a) => Checker::new(&f.target, &ctx, env.cfg()).check(m, a).map_err(|e| e.to_string()),
            DkItem::Infer(m) => Checker::new(&f.target, &ctx, env.cfg()).infer(m).map(|_| ()).map_err(|e| e.to_string()),
        };
        let text = print_dk_item(&f.target, &mapped);
        doc.push_str(&text);
        doc.push('\n');
        let r = match verdict {
            Ok(()) => Record::ok("apply", text.clone()),
            Err(e) => Record::error("apply", format!("{text} fails in the target: {e}")),
        };
        out.emit_item(at(r.detail("dk", text)));
    }
    out.document(&doc);
    Ok(())
}

pub fn morphism_phi(
    env: &Env,
    out: &mut Reporter,
    finite: &Path,
    internalized: &Path,
    output: Option<&Path>,
    verify: bool,
) -> Result<(), CliError> {
    let fin = encoding(finite)?;
    let int = encoding(internalized)?;
    let phi = build_phi(&fin, &int)?;
    let text = print_morphism(&phi);
    match output {
        Some(p) => {
            write(p, &text)?;
            out.emit(Record::ok("phi", format!("wrote {} bodies to {}", phi.bodies().len(), shown(p))));
        }
        None => {
            out.to_stderr = true;
            out.document(&text);
        }
    }
    for (c, body) in phi.bodies() {
        out.emit_item(
            Record::ok("body", print_dk_term(&phi.target, body))
                .subject(c.as_str())
                .detail("body", Value::from(print_dk_term(&phi.target, body))),
        );
    }
    if verify {
        let diags = verify_morphism(&phi, env.cfg());
        emit_morphism_diagnostics(out, &shown(internalized), &phi, &diags);
    }
    Ok(())
}
