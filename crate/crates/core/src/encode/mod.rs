//! Encoding theories for explicitly-typed PTSs and the translation into them.
//!
//! Finite mode declares one family of constants per sort, axiom and rule
//! (`U@s`, `El@s`, `u@s`, `Prod@s1@s2`, `abs@s1@s2`, `app@s1@s2`); internalized
//! mode declares them once, indexed by closed sort terms.

use thiserror::Error;

use crate::confluence::{check_orthogonal, OrthogonalityIssue};
use crate::analysis::check_arity_preserving;
use crate::epts::{
    epts_sort_of, EptsContext, EptsError, EptsPath, EptsTerm, Sort, SortSpec, SpecError, SORT_AXIOM, SORT_RULE,
    SORT_TYPE,
};
use crate::reduce::DEFAULT_FUEL;
use crate::term::{Name, Path, Term};
use crate::theory::{Decl, Pattern, RewriteRule, Theory, TheoryError};
use crate::typing::{check_signature, DkContext, TypingConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodeError {
    #[error("a {expected} sort specification is required")]
    WrongMode { expected: &'static str },
    #[error("unknown sort {0}")]
    UnknownSort(Sort),
    #[error("sort {0} is a top sort and has no code")]
    NoSortCode(Sort),
    #[error("no product rule for ({s1}, {s2})")]
    NoProductRule { s1: Sort, s2: Sort },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Epts(#[from] EptsError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("generated theory rejected: {}", .0.join("; "))]
    Diagnostics(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodingMode {
    Finite,
    Internalized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodingTheory {
    pub theory: Theory,
    pub mode: EncodingMode,
    spec: SortSpec,
}

/// Sort names inside constant names: `[A-Za-z0-9_]` kept, anything else as `%XX`.
pub fn escape_sort(s: &Sort) -> String {
    let mut out = String::new();
    for b in s.name().bytes() {
        if b.is_ascii_alphanumeric() || b == b'_' {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

pub fn unescape_sort(s: &str) -> Option<Sort> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s.get(i + 1..i + 3)?;
            out.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    Some(Sort::new(&String::from_utf8(out).ok()?))
}

pub mod names {
    use super::{escape_sort, Sort};

    pub const U: &str = "U";
    pub const EL: &str = "El";
    pub const CODE: &str = "u";
    pub const PROD: &str = "Prod";
    pub const ABS: &str = "abs";
    pub const APP: &str = "app";
    pub const U_RED: &str = "u-red";
    pub const BETA: &str = "beta";

    pub fn indexed(base: &str, sorts: &[&Sort]) -> String {
        let mut s = base.to_string();
        for x in sorts {
            s.push('@');
            s.push_str(&escape_sort(x));
        }
        s
    }
}

use names::indexed;

fn v(x: &str) -> Term {
    Term::var(x)
}

fn pv(x: &str) -> Pattern {
    Pattern::Var(x.into())
}

fn finite_theory(spec: &SortSpec) -> Result<Theory, EncodeError> {
    let f = spec.as_finite().ok_or(EncodeError::WrongMode { expected: "finite" })?;
    let mut t = Theory::new();
    let u = |s: &Sort| Term::constant(indexed(names::U, &[s]));
    let el = |s: &Sort, a: Term| Term::cons(indexed(names::EL, &[s]), vec![a]);
    for s in f.sorts() {
        t.declare(Decl::new(indexed(names::U, &[s]), vec![], Term::Type))?;
    }
    for s in f.sorts() {
        t.declare(Decl::new(indexed(names::EL, &[s]), vec![("A".into(), u(s))], Term::Type))?;
    }
    for (s1, s2) in f.axioms() {
        let code = indexed(names::CODE, &[&s1]);
        t.declare(Decl::new(code.as_str(), vec![], u(&s2)))?;
        t.add_rule(RewriteRule::new(
            indexed(names::U_RED, &[&s1]),
            indexed(names::EL, &[&s2]),
            vec![Pattern::Cons(code.as_str().into(), vec![])],
            u(&s1),
        ))?;
    }
    for (s1, s2, s3) in f.rules() {
        let prod = indexed(names::PROD, &[&s1, &s2]);
        let abs = indexed(names::ABS, &[&s1, &s2]);
        let app = indexed(names::APP, &[&s1, &s2]);
        let a_ty = u(&s1);
        let b_ty = Term::arrow(el(&s1, v("A")), u(&s2));
        let prod_ab = Term::cons(prod.as_str(), vec![v("A"), v("B")]);
        t.declare(Decl::new(prod.as_str(), vec![("A".into(), a_ty.clone()), ("B".into(), b_ty.clone())], u(&s3)))?;
        let m_ty = Term::pi("x", el(&s1, v("A")), el(&s2, Term::app(v("B"), v("x"))));
        t.declare(Decl::new(
            abs.as_str(),
            vec![("A".into(), a_ty.clone()), ("B".into(), b_ty.clone()), ("M".into(), m_ty)],
            el(&s3, prod_ab.clone()),
        ))?;
        t.declare(Decl::new(
            app.as_str(),
            vec![
                ("A".into(), a_ty),
                ("B".into(), b_ty),
                ("M".into(), el(&s3, prod_ab)),
                ("N".into(), el(&s1, v("A"))),
            ],
            el(&s2, Term::app(v("B"), v("N"))),
        ))?;
        let abs_pat = Pattern::Cons(abs.as_str().into(), vec![pv("A'"), pv("B'"), pv("M")]);
        t.add_rule(RewriteRule::new(
            indexed(names::BETA, &[&s1, &s2]),
            app.as_str(),
            vec![pv("A"), pv("B"), abs_pat, pv("N")],
            Term::app(v("M"), v("N")),
        ))?;
    }
    Ok(t)
}

fn internalized_theory(spec: &SortSpec) -> Result<Theory, EncodeError> {
    let i = spec.as_internalized().ok_or(EncodeError::WrongMode { expected: "internalized" })?;
    let mut t = crate::epts::sort_base_theory();
    let sort = || Term::constant(SORT_TYPE);
    let u = |s: Term| Term::cons(names::U, vec![s]);
    let el = |s: Term, a: Term| Term::cons(names::EL, vec![s, a]);
    let rl = |a: Term, b: Term| Term::cons(SORT_RULE, vec![a, b]);
    t.declare(Decl::new(names::U, vec![("s".into(), sort())], Term::Type))?;
    t.declare(Decl::new(names::EL, vec![("s".into(), sort()), ("A".into(), u(v("s")))], Term::Type))?;
    t.declare(Decl::new(names::CODE, vec![("s".into(), sort())], u(Term::cons(SORT_AXIOM, vec![v("s")]))))?;
    t.add_rule(RewriteRule::new(
        names::U_RED,
        names::EL,
        vec![pv("s'"), Pattern::Cons(names::CODE.into(), vec![pv("s")])],
        u(v("s")),
    ))?;
    let s12 = || vec![("s1".into(), sort()), ("s2".into(), sort())];
    let a_ty = u(v("s1"));
    let b_ty = Term::arrow(el(v("s1"), v("A")), u(v("s2")));
    let prod_ab = Term::cons(names::PROD, vec![v("s1"), v("s2"), v("A"), v("B")]);
    let mut tele = s12();
    tele.extend([("A".into(), a_ty.clone()), ("B".into(), b_ty.clone())]);
    t.declare(Decl::new(names::PROD, tele.clone(), u(rl(v("s1"), v("s2")))))?;
    let m_ty = Term::pi("x", el(v("s1"), v("A")), el(v("s2"), Term::app(v("B"), v("x"))));
    let mut abs_tele = tele.clone();
    abs_tele.push(("M".into(), m_ty));
    t.declare(Decl::new(names::ABS, abs_tele, el(rl(v("s1"), v("s2")), prod_ab.clone())))?;
    let mut app_tele = tele;
    app_tele.push(("M".into(), el(rl(v("s1"), v("s2")), prod_ab)));
    app_tele.push(("N".into(), el(v("s1"), v("A"))));
    t.declare(Decl::new(names::APP, app_tele, el(v("s2"), Term::app(v("B"), v("N")))))?;
    let abs_pat = Pattern::Cons(names::ABS.into(), vec![pv("s1'"), pv("s2'"), pv("A'"), pv("B'"), pv("M")]);
    t.add_rule(RewriteRule::new(
        names::BETA,
        names::APP,
        vec![pv("s1"), pv("s2"), pv("A"), pv("B"), abs_pat, pv("N")],
        Term::app(v("M"), v("N")),
    ))?;
    for d in i.user_decls() {
        t.declare(d.clone())?;
    }
    for r in i.user_rules() {
        t.add_rule(r.clone())?;
    }
    Ok(t)
}

/// Signature, orthogonality and arity-preservation diagnostics of a theory.
pub fn theory_diagnostics(theory: &Theory) -> Vec<String> {
    let mut out: Vec<String> = check_signature(theory, TypingConfig::default())
        .into_iter()
        .map(|d| format!("{}: {}", d.constant, d.error))
        .collect();
    out.extend(check_orthogonal(theory).into_iter().map(|i: OrthogonalityIssue| i.to_string()));
    out.extend(check_arity_preserving(theory).into_iter().map(|i| i.to_string()));
    out
}

/// The constants and rules for every sort, axiom and product rule of a
/// finite specification, in a fixed order.
pub fn generate_finite(spec: &SortSpec) -> Result<EncodingTheory, EncodeError> {
    let theory = finite_theory(spec)?;
    Ok(EncodingTheory { theory, mode: EncodingMode::Finite, spec: spec.clone() })
}

/// The sort-indexed core followed by the user's sort constants and rules.
/// Fails with the diagnostics if the combined theory is rejected.
pub fn generate_internalized(spec: &SortSpec) -> Result<EncodingTheory, EncodeError> {
    let theory = internalized_theory(spec)?;
    let diags = theory_diagnostics(&theory);
    if !diags.is_empty() {
        return Err(EncodeError::Diagnostics(diags));
    }
    Ok(EncodingTheory { theory, mode: EncodingMode::Internalized, spec: spec.clone() })
}

/// Picks the generator matching the specification.
pub fn generate(spec: &SortSpec) -> Result<EncodingTheory, EncodeError> {
    match spec {
        SortSpec::Finite(_) => generate_finite(spec),
        SortSpec::Internalized(_) => generate_internalized(spec),
    }
}

impl EncodingTheory {
    pub fn spec(&self) -> &SortSpec {
        &self.spec
    }

    /// Number of leading sort arguments of the product constants.
    pub fn sort_arity(&self) -> usize {
        match self.mode {
            EncodingMode::Finite => 0,
            EncodingMode::Internalized => 2,
        }
    }

    /// Position of the type argument of `El`.
    pub fn el_arg(&self) -> usize {
        match self.mode {
            EncodingMode::Finite => 0,
            EncodingMode::Internalized => 1,
        }
    }

    fn known(&self, s: &Sort) -> Result<(), EncodeError> {
        match self.spec.canonical(s) {
            Ok(_) => Ok(()),
            Err(SpecError::UnknownSort(s)) => Err(EncodeError::UnknownSort(s)),
            Err(e) => Err(e.into()),
        }
    }

    /// The closed sort term `ṡ` (internalized mode only).
    pub fn sort_term(&self, s: &Sort) -> Result<Term, EncodeError> {
        match &self.spec {
            SortSpec::Internalized(i) => i.representation(s).map_err(|e| match e {
                SpecError::UnknownSort(s) => EncodeError::UnknownSort(s),
                e => e.into(),
            }),
            SortSpec::Finite(_) => Err(EncodeError::WrongMode { expected: "internalized" }),
        }
    }

    pub fn universe(&self, s: &Sort) -> Result<Term, EncodeError> {
        self.known(s)?;
        match self.mode {
            EncodingMode::Finite => Ok(Term::constant(indexed(names::U, &[s]))),
            EncodingMode::Internalized => Ok(Term::cons(names::U, vec![self.sort_term(s)?])),
        }
    }

    pub fn el(&self, s: &Sort, a: Term) -> Result<Term, EncodeError> {
        self.known(s)?;
        match self.mode {
            EncodingMode::Finite => Ok(Term::cons(indexed(names::EL, &[s]), vec![a])),
            EncodingMode::Internalized => Ok(Term::cons(names::EL, vec![self.sort_term(s)?, a])),
        }
    }

    /// `⟦s⟧`.
    pub fn code(&self, s: &Sort) -> Result<Term, EncodeError> {
        self.known(s)?;
        match self.mode {
            EncodingMode::Finite => {
                if self.spec.axiom(s)?.is_none() {
                    return Err(EncodeError::NoSortCode(s.clone()));
                }
                Ok(Term::constant(indexed(names::CODE, &[s])))
            }
            EncodingMode::Internalized => Ok(Term::cons(names::CODE, vec![self.sort_term(s)?])),
        }
    }

    /// Head constant and leading sort arguments for a product-family constant.
    fn product_head(&self, base: &str, s1: &Sort, s2: &Sort) -> Result<(String, Vec<Term>), EncodeError> {
        self.known(s1)?;
        self.known(s2)?;
        match self.mode {
            EncodingMode::Finite => {
                if self.spec.rule(s1, s2)?.is_none() {
                    return Err(EncodeError::NoProductRule { s1: s1.clone(), s2: s2.clone() });
                }
                Ok((indexed(base, &[s1, s2]), vec![]))
            }
            EncodingMode::Internalized => Ok((base.to_string(), vec![self.sort_term(s1)?, self.sort_term(s2)?])),
        }
    }

    /// `λx : El_s1 ⟦A⟧. ⟦body⟧`, keeping the binder's name.
    fn bind(&self, s1: &Sort, dom: &Term, name: &Name, body: Term) -> Result<Term, EncodeError> {
        Ok(Term::lam_raw(name.clone(), self.el(s1, dom.clone())?, body))
    }

    pub fn translate(&self, m: &EptsTerm) -> Result<Term, EncodeError> {
        match m {
            EptsTerm::BVar(i) => Ok(Term::BVar(*i)),
            EptsTerm::FVar(x) => Ok(Term::FVar(x.clone())),
            EptsTerm::Sort(s) => self.code(s),
            EptsTerm::Pi { s1, s2, dom, cod } => {
                let (head, mut args) = self.product_head(names::PROD, s1, s2)?;
                let a = self.translate(dom)?;
                let b = self.bind(s1, &a, &cod.name, self.translate(&cod.body)?)?;
                args.extend([a, b]);
                Ok(Term::cons(head.as_str(), args))
            }
            EptsTerm::Lam { s1, s2, dom, cod, body } => {
                let (head, mut args) = self.product_head(names::ABS, s1, s2)?;
                let a = self.translate(dom)?;
                let b = self.bind(s1, &a, &cod.name, self.translate(&cod.body)?)?;
                let m = self.bind(s1, &a, &body.name, self.translate(&body.body)?)?;
                args.extend([a, b, m]);
                Ok(Term::cons(head.as_str(), args))
            }
            EptsTerm::App { s1, s2, dom, cod, fun, arg } => {
                let (head, mut args) = self.product_head(names::APP, s1, s2)?;
                let a = self.translate(dom)?;
                let b = self.bind(s1, &a, &cod.name, self.translate(&cod.body)?)?;
                args.extend([a, b, self.translate(fun)?, self.translate(arg)?]);
                Ok(Term::cons(head.as_str(), args))
            }
        }
    }

    /// `x : El_{s_A} ⟦A⟧` for every entry, `s_A` the sort of `A`.
    pub fn translate_ctx(&self, ctx: &EptsContext) -> Result<DkContext, EncodeError> {
        let mut out = DkContext::new();
        let mut prefix = EptsContext::new();
        for (x, a) in ctx.entries() {
            let s = epts_sort_of(&self.spec, &prefix, a, DEFAULT_FUEL)?;
            out.push(x.clone(), self.el(&s, self.translate(a)?)?);
            prefix.push(x.clone(), a.clone());
        }
        Ok(out)
    }

    /// `U_A` when `A` is a top sort, `El_{s_A} ⟦A⟧` otherwise.
    pub fn expected_dk_type(&self, ctx: &EptsContext, a: &EptsTerm) -> Result<Term, EncodeError> {
        if let EptsTerm::Sort(s) = a {
            self.known(s)?;
            if self.spec.axiom(s)?.is_none() {
                return self.universe(s);
            }
        }
        let s = epts_sort_of(&self.spec, ctx, a, DEFAULT_FUEL)?;
        self.el(&s, self.translate(a)?)
    }

    /// Where copies of the source subterm at `path` sit inside `translate(m)`.
    /// Annotations are duplicated by the translation, so a subterm can have
    /// several images.
    pub fn image_positions(&self, m: &EptsTerm, path: &EptsPath) -> Vec<Path> {
        let Some((&i, rest)) = path.split_first() else {
            return vec![Vec::new()];
        };
        let Some(child) = m.children().get(i).copied() else {
            return Vec::new();
        };
        let o = self.sort_arity();
        let e = self.el_arg();
        let direct: Vec<Path> = match (m, i) {
            (EptsTerm::Pi { .. }, 0) => vec![vec![o], vec![o + 1, 0, e]],
            (EptsTerm::Pi { .. }, 1) => vec![vec![o + 1, 1]],
            (EptsTerm::Lam { .. }, 0) => vec![vec![o], vec![o + 1, 0, e], vec![o + 2, 0, e]],
            (EptsTerm::Lam { .. }, 1) => vec![vec![o + 1, 1]],
            (EptsTerm::Lam { .. }, 2) => vec![vec![o + 2, 1]],
            (EptsTerm::App { .. }, 0) => vec![vec![o], vec![o + 1, 0, e]],
            (EptsTerm::App { .. }, 1) => vec![vec![o + 1, 1]],
            (EptsTerm::App { .. }, 2) => vec![vec![o + 2]],
            (EptsTerm::App { .. }, 3) => vec![vec![o + 3]],
            _ => Vec::new(),
        };
        let inner = self.image_positions(child, &rest.to_vec());
        let mut out = Vec::new();
        for d in &direct {
            for p in &inner {
                let mut q = d.clone();
                q.extend(p.iter().copied());
                out.push(q);
            }
        }
        out
    }
}

pub fn translate(enc: &EncodingTheory, m: &EptsTerm) -> Result<Term, EncodeError> {
    enc.translate(m)
}

pub fn translate_ctx(enc: &EncodingTheory, ctx: &EptsContext) -> Result<DkContext, EncodeError> {
    enc.translate_ctx(ctx)
}

pub fn expected_dk_type(enc: &EncodingTheory, ctx: &EptsContext, a: &EptsTerm) -> Result<Term, EncodeError> {
    enc.expected_dk_type(ctx, a)
}
