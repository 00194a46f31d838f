//! Invertible forms, the inverse translation and the conservativity and
//! adequacy checks built on them.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::encode::{names, unescape_sort, EncodeError, EncodingMode, EncodingTheory};
use crate::epts::{self, epts_check_with_fuel, Binder, EptsContext, EptsError, EptsPath, EptsTerm, Sort};
use crate::reduce::{contract_at, convertible, nf, redexes, Budget, FuelExhausted, RuleFilter};
use crate::term::{fresh_name, Name, Path, Term};
use crate::theory::{Label, Theory};
use crate::typing::{check, infer, DkContext, TypeError, TypingConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("β-normal form is not an invertible form: {0}")]
    NotInvertible(Term),
    #[error("inverted term {term} does not check at {ty}: {error}")]
    EptsCheckFailed { term: EptsTerm, ty: EptsTerm, error: EptsError },
    #[error("β-normal form {normal} is not hidden-equivalent to the translation of its inverse {retranslated}")]
    HiddenMismatch { normal: Term, retranslated: Term },
    #[error("β-normalization ran out of fuel")]
    NormalizationFuel(#[source] FuelExhausted),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Typing(#[from] TypeError),
    #[error("no subterm at {0:?}")]
    BadPosition(Path),
    #[error("{0} is neither a universe nor the decoding of a code")]
    NotAnEncodedType(Term),
}

impl DecodeError {
    /// Failures that well-typed inputs cannot produce; they point at a bug
    /// in the kernel or the translation rather than at the input.
    pub fn is_soundness_violation(&self) -> bool {
        matches!(
            self,
            DecodeError::NotInvertible(_)
                | DecodeError::EptsCheckFailed { .. }
                | DecodeError::HiddenMismatch { .. }
                | DecodeError::NormalizationFuel(_)
        )
    }
}

/// A framework term known to lie in the invertible grammar.
#[derive(Clone, Debug, PartialEq)]
pub struct InvertibleForm(Term);

impl InvertibleForm {
    pub fn term(&self) -> &Term {
        &self.0
    }

    pub fn into_term(self) -> Term {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Code,
    Prod,
    Abs,
    App,
}

/// The encoding family and sort subscripts of a head constant applied to `args`.
fn head(enc: &EncodingTheory, c: &Name, args: &[Term]) -> Option<(Family, Vec<Sort>)> {
    let decl = enc.theory.decl(c.as_str())?;
    if decl.arity() != args.len() {
        return None;
    }
    let (base, sorts) = match enc.mode {
        EncodingMode::Finite => {
            let mut parts = c.as_str().split('@');
            let base = parts.next()?;
            let sorts = parts.map(unescape_sort).collect::<Option<Vec<_>>>()?;
            (base, sorts)
        }
        EncodingMode::Internalized => {
            let n = match c.as_str() {
                names::CODE => 1,
                names::PROD | names::ABS | names::APP => 2,
                _ => return None,
            };
            let spec = enc.spec().as_internalized()?;
            let mut sorts = Vec::new();
            for t in &args[..n] {
                if !t.free_vars().is_empty() || !t.is_locally_closed() {
                    return None;
                }
                sorts.push(spec.name_of(t));
            }
            (c.as_str(), sorts)
        }
    };
    let fam = match (base, sorts.len()) {
        (names::CODE, 1) => Family::Code,
        (names::PROD, 2) => Family::Prod,
        (names::ABS, 2) => Family::Abs,
        (names::APP, 2) => Family::App,
        _ => return None,
    };
    Some((fam, sorts))
}

/// Leading arguments that carry sort representations.
fn sort_args(enc: &EncodingTheory, sorts: &[Sort]) -> usize {
    match enc.mode {
        EncodingMode::Finite => 0,
        EncodingMode::Internalized => sorts.len(),
    }
}

fn binder_body(t: &Term) -> Option<(&Name, &Term)> {
    match t {
        Term::Lam(x, _, b) => Some((x, b)),
        _ => None,
    }
}

fn is_invertible(enc: &EncodingTheory, m: &Term) -> bool {
    match m {
        Term::BVar(_) | Term::FVar(_) => true,
        Term::App(f, n) => match &**f {
            Term::Lam(_, _, body) => is_invertible(enc, body) && is_invertible(enc, n),
            _ => false,
        },
        Term::Cons(c, args) => {
            let Some((fam, sorts)) = head(enc, c, args) else {
                return false;
            };
            let a = &args[sort_args(enc, &sorts)..];
            let bound = |t: &Term| binder_body(t).is_some_and(|(_, b)| is_invertible(enc, b));
            match fam {
                Family::Code => true,
                Family::Prod => is_invertible(enc, &a[0]) && bound(&a[1]),
                Family::Abs => is_invertible(enc, &a[0]) && bound(&a[1]) && bound(&a[2]),
                Family::App => {
                    is_invertible(enc, &a[0]) && bound(&a[1]) && is_invertible(enc, &a[2]) && is_invertible(enc, &a[3])
                }
            }
        }
        _ => false,
    }
}

pub fn recognize(enc: &EncodingTheory, m: &Term) -> Option<InvertibleForm> {
    is_invertible(enc, m).then(|| InvertibleForm(m.clone()))
}

fn invert_term(enc: &EncodingTheory, m: &Term) -> EptsTerm {
    match m {
        Term::BVar(i) => EptsTerm::BVar(*i),
        Term::FVar(x) => EptsTerm::FVar(x.clone()),
        Term::App(f, n) => match &**f {
            Term::Lam(_, _, body) => invert_term(enc, body).instantiate(&invert_term(enc, n)),
            _ => unreachable!("certified invertible"),
        },
        Term::Cons(c, args) => {
            let (fam, mut sorts) = head(enc, c, args).expect("certified invertible");
            let a = &args[sort_args(enc, &sorts)..];
            let bind = |t: &Term| {
                let (x, b) = binder_body(t).expect("certified invertible");
                Binder::raw(x.clone(), invert_term(enc, b))
            };
            if fam == Family::Code {
                return EptsTerm::Sort(sorts.remove(0));
            }
            let s2 = sorts.pop().expect("two sorts");
            let s1 = sorts.pop().expect("two sorts");
            let dom = std::sync::Arc::new(invert_term(enc, &a[0]));
            match fam {
                Family::Prod => EptsTerm::Pi { s1, s2, dom, cod: bind(&a[1]) },
                Family::Abs => EptsTerm::Lam { s1, s2, dom, cod: bind(&a[1]), body: bind(&a[2]) },
                Family::App => EptsTerm::App {
                    s1,
                    s2,
                    dom,
                    cod: bind(&a[1]),
                    fun: std::sync::Arc::new(invert_term(enc, &a[2])),
                    arg: std::sync::Arc::new(invert_term(enc, &a[3])),
                },
                Family::Code => unreachable!(),
            }
        }
        _ => unreachable!("certified invertible"),
    }
}

/// `|m|`; binder annotations are dropped.
pub fn invert(enc: &EncodingTheory, m: &InvertibleForm) -> EptsTerm {
    invert_term(enc, &m.0)
}

fn hidden(theory: &Theory, m: &Term, n: &Term, budget: &mut Budget) -> Result<bool, FuelExhausted> {
    match (m, n) {
        (Term::Lam(_, a, b), Term::Lam(_, a2, b2)) | (Term::Pi(_, a, b), Term::Pi(_, a2, b2)) => {
            Ok(hidden(theory, b, b2, budget)? && convertible(theory, a, a2, budget)?)
        }
        (Term::App(f, a), Term::App(g, b)) => Ok(hidden(theory, f, g, budget)? && hidden(theory, a, b, budget)?),
        (Term::Cons(c, xs), Term::Cons(d, ys)) => {
            if c != d || xs.len() != ys.len() {
                return Ok(false);
            }
            for (x, y) in xs.iter().zip(ys.iter()) {
                if !hidden(theory, x, y, budget)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Ok(m == n),
    }
}

/// Same skeleton once binder annotations are erased, with convertible
/// annotations at corresponding binders.
pub fn hidden_equiv(theory: &Theory, m: &Term, n: &Term, fuel: u64) -> Result<bool, FuelExhausted> {
    hidden(theory, m, n, &mut Budget::new(fuel))
}

/// `|NF_β(m)|`, re-checked at `a` and compared with its own translation.
pub fn conservative_invert(
    enc: &EncodingTheory,
    ctx: &EptsContext,
    m: &Term,
    a: &EptsTerm,
    fuel: u64,
) -> Result<EptsTerm, DecodeError> {
    let normal = nf(&enc.theory, m, &RuleFilter::beta(), &mut Budget::new(fuel)).map_err(DecodeError::NormalizationFuel)?;
    let form = recognize(enc, &normal).ok_or_else(|| DecodeError::NotInvertible(normal.clone()))?;
    let out = invert(enc, &form);
    epts_check_with_fuel(enc.spec(), ctx, &out, a, fuel).map_err(|error| DecodeError::EptsCheckFailed {
        term: out.clone(),
        ty: a.clone(),
        error,
    })?;
    let retranslated = enc.translate(&out)?;
    if !hidden_equiv(&enc.theory, &retranslated, &normal, fuel).map_err(DecodeError::NormalizationFuel)? {
        return Err(DecodeError::HiddenMismatch { normal, retranslated });
    }
    Ok(out)
}

/// The source type behind a framework type `U_s` or `El_s(A)`.
pub fn decode_type(enc: &EncodingTheory, t: &Term, fuel: u64) -> Result<EptsTerm, DecodeError> {
    let normal = nf(&enc.theory, t, &RuleFilter::All, &mut Budget::new(fuel)).map_err(DecodeError::NormalizationFuel)?;
    let not_encoded = || DecodeError::NotAnEncodedType(t.clone());
    let Term::Cons(c, args) = &normal else {
        return Err(not_encoded());
    };
    let (base, sort) = match enc.mode {
        EncodingMode::Finite => {
            let mut parts = c.as_str().split('@');
            let base = parts.next().unwrap_or("");
            let sort = parts.next().and_then(unescape_sort);
            (base, sort)
        }
        EncodingMode::Internalized => {
            let spec = enc.spec().as_internalized().ok_or_else(not_encoded)?;
            (c.as_str(), args.first().map(|s| spec.name_of(s)))
        }
    };
    match (base, sort) {
        (names::U, Some(s)) if enc.universe(&s).is_ok() => Ok(EptsTerm::Sort(s)),
        (names::EL, Some(_)) => {
            let code = args.get(enc.el_arg()).ok_or_else(not_encoded)?;
            let code = nf(&enc.theory, code, &RuleFilter::beta(), &mut Budget::new(fuel))
                .map_err(DecodeError::NormalizationFuel)?;
            recognize(enc, &code).map(|f| invert(enc, &f)).ok_or_else(not_encoded)
        }
        _ => Err(not_encoded()),
    }
}

/// Paths of the invertible subterms of an invertible form, outermost first.
pub fn invertible_positions(enc: &EncodingTheory, m: &Term) -> Vec<Path> {
    fn go(enc: &EncodingTheory, m: &Term, here: &mut Path, out: &mut Vec<Path>) {
        out.push(here.clone());
        let mut visit = |p: &[usize], out: &mut Vec<Path>| {
            if let Some(t) = m.subterm(p) {
                let len = here.len();
                here.extend_from_slice(p);
                go(enc, t, here, out);
                here.truncate(len);
            }
        };
        match m {
            Term::App(f, _) if matches!(**f, Term::Lam(..)) => {
                visit(&[0, 1], out);
                visit(&[1], out);
            }
            Term::Cons(c, args) => {
                let o = enc.sort_arity();
                match head(enc, c, args).map(|h| h.0) {
                    Some(Family::Prod) => {
                        visit(&[o], out);
                        visit(&[o + 1, 1], out);
                    }
                    Some(Family::Abs) => {
                        visit(&[o], out);
                        visit(&[o + 1, 1], out);
                        visit(&[o + 2, 1], out);
                    }
                    Some(Family::App) => {
                        visit(&[o], out);
                        visit(&[o + 1, 1], out);
                        visit(&[o + 2], out);
                        visit(&[o + 3], out);
                    }
                    _ => {}
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(enc, m, &mut Vec::new(), &mut out);
    out
}

/// Replaces the subterm `u` at `path` by `(λz:T. z) u`, with `T` the type
/// inferred for `u` in `ctx` extended by the binders crossed on the way.
pub fn identity_expand(
    theory: &Theory,
    ctx: &DkContext,
    m: &Term,
    path: &[usize],
    cfg: TypingConfig,
) -> Result<Term, DecodeError> {
    let mut inner = ctx.clone();
    let mut opened: Vec<Name> = Vec::new();
    let mut cur = m.clone();
    let mut taken: HashSet<String> = ctx.entries().iter().map(|(x, _)| x.as_str().to_string()).collect();
    taken.extend(m.free_vars().into_iter().map(|x| x.as_str().to_string()));
    for &i in path {
        let next = cur.children().get(i).map(|t| (*t).clone()).ok_or_else(|| DecodeError::BadPosition(path.to_vec()))?;
        cur = match (&cur, i) {
            (Term::Lam(x, a, _), 1) | (Term::Pi(x, a, _), 1) => {
                let y = fresh_name(x.as_str(), |s| taken.contains(s));
                taken.insert(y.as_str().to_string());
                inner.push(y.clone(), (**a).clone());
                opened.push(y.clone());
                next.open(&y)
            }
            _ => next,
        };
    }
    let mut ty = infer(theory, &inner, &cur, cfg)?;
    for y in &opened {
        ty = ty.abstract_fvar(y);
    }
    let u = m.subterm(path).ok_or_else(|| DecodeError::BadPosition(path.to_vec()))?.clone();
    let wrapped = Term::app(Term::lam_raw(Name::new("z"), ty, Term::BVar(0)), u);
    m.replace_at(path, wrapped).ok_or_else(|| DecodeError::BadPosition(path.to_vec()))
}

/// The framework reduction mirroring one source step of `m`: `beta` then `β`
/// at each copy of the redex in `⟦m⟧`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComputationTrace {
    pub source_path: EptsPath,
    pub reduct: EptsTerm,
    /// `⟦m⟧` followed by every intermediate term.
    pub terms: Vec<Term>,
    pub labels: Vec<Label>,
}

impl ComputationTrace {
    /// True if the labels are `beta, β` repeated.
    pub fn is_beta_then_framework_beta(&self) -> bool {
        !self.labels.is_empty()
            && self.labels.chunks(2).all(|c| c.len() == 2 && c[0].family() == names::BETA && c[1] == Label::Beta)
    }
}

/// Trace of the leftmost-outermost source step; `None` when `m` is normal.
pub fn computation_trace(enc: &EncodingTheory, m: &EptsTerm) -> Result<Option<ComputationTrace>, DecodeError> {
    match epts::reduce::step_at_path(m) {
        Some((_, path)) => computation_trace_at(enc, m, &path).map(Some),
        None => Ok(None),
    }
}

/// Trace of the source step contracting the redex at `path`.
pub fn computation_trace_at(enc: &EncodingTheory, m: &EptsTerm, path: &[usize]) -> Result<ComputationTrace, DecodeError> {
    let path: EptsPath = path.to_vec();
    let reduct = epts::reduce::contract_at(m, &path).ok_or_else(|| DecodeError::BadPosition(path.clone()))?;
    let mut t = enc.translate(m)?;
    let mut terms = vec![t.clone()];
    let mut labels = Vec::new();
    for pos in enc.image_positions(m, &path) {
        for filter in [RuleFilter::families([names::BETA]), RuleFilter::beta()] {
            let (next, label) =
                contract_at(&enc.theory, &t, &pos, &filter).ok_or_else(|| DecodeError::BadPosition(pos.clone()))?;
            t = next;
            terms.push(t.clone());
            labels.push(label);
        }
    }
    Ok(ComputationTrace { source_path: path, reduct, terms, labels })
}

/// Source terms reachable from `from` in at most `max_steps` steps include `to`.
pub fn epts_reaches(from: &EptsTerm, to: &EptsTerm, max_steps: usize) -> bool {
    let mut seen = vec![from.clone()];
    let mut queue = VecDeque::from([(from.clone(), 0)]);
    while let Some((t, d)) = queue.pop_front() {
        if t == *to {
            return true;
        }
        if d == max_steps {
            continue;
        }
        for p in epts::reduce::redexes(&t) {
            if let Some(n) = epts::reduce::contract_at(&t, &p) {
                if !seen.contains(&n) {
                    seen.push(n.clone());
                    queue.push_back((n, d + 1));
                }
            }
        }
    }
    false
}

/// Inverts every term of a framework reduction sequence.
pub fn replay(enc: &EncodingTheory, terms: &[Term]) -> Result<Vec<EptsTerm>, DecodeError> {
    terms
        .iter()
        .map(|t| {
            recognize(enc, t).map(|f| invert(enc, &f)).ok_or_else(|| DecodeError::NotInvertible(t.clone()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum LegOutcome {
    Pass,
    Fail(String),
    Vacuous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Leg {
    pub name: &'static str,
    pub outcome: LegOutcome,
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            LegOutcome::Pass => write!(f, "{}: pass", self.name),
            LegOutcome::Vacuous => write!(f, "{}: vacuous", self.name),
            LegOutcome::Fail(why) => write!(f, "{}: FAIL ({why})", self.name),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdequacyReport {
    pub legs: Vec<Leg>,
    pub trace: Option<ComputationTrace>,
}

impl AdequacyReport {
    pub fn passed(&self) -> bool {
        self.legs.iter().all(|l| !matches!(l.outcome, LegOutcome::Fail(_)))
    }
}

pub const LEG_SOUNDNESS: &str = "soundness";
pub const LEG_LEFT_INVERSE: &str = "left-inverse";
pub const LEG_BETA_NORMAL: &str = "beta-normal";
pub const LEG_COMPUTATION: &str = "computation";

fn leg(name: &'static str, r: Result<(), String>) -> Leg {
    Leg { name, outcome: r.map_or_else(LegOutcome::Fail, |_| LegOutcome::Pass) }
}

/// Runs the four adequacy legs on a checked source judgment `ctx ⊢ m : a`.
pub fn adequacy_roundtrip(
    enc: &EncodingTheory,
    ctx: &EptsContext,
    m: &EptsTerm,
    a: &EptsTerm,
    fuel: u64,
) -> Result<AdequacyReport, DecodeError> {
    let tm = enc.translate(m)?;
    let dctx = enc.translate_ctx(ctx)?;
    let ty = enc.expected_dk_type(ctx, a)?;
    let mut legs = Vec::new();
    legs.push(leg(
        LEG_SOUNDNESS,
        check(&enc.theory, &dctx, &tm, &ty, TypingConfig::with_fuel(fuel)).map_err(|e| e.to_string()),
    ));
    let back = recognize(enc, &tm).map(|f| invert(enc, &f));
    legs.push(leg(
        LEG_LEFT_INVERSE,
        match back {
            Some(b) if b == *m => Ok(()),
            Some(b) => Err(format!("inverse is {b}")),
            None => Err("translation is not invertible".into()),
        },
    ));
    let found = redexes(&enc.theory, &tm, &RuleFilter::beta());
    legs.push(leg(
        LEG_BETA_NORMAL,
        if found.is_empty() { Ok(()) } else { Err(format!("β-redex at {:?}", found[0].0)) },
    ));
    let trace = computation_trace(enc, m)?;
    let computation = match &trace {
        None => Leg { name: LEG_COMPUTATION, outcome: LegOutcome::Vacuous },
        Some(tr) => {
            let target = enc.translate(&tr.reduct)?;
            let last = tr.terms.last().expect("non-empty");
            let r = if *last != target {
                Err(format!("trace ends at {last}, expected {target}"))
            } else if !tr.is_beta_then_framework_beta() {
                let ls: Vec<String> = tr.labels.iter().map(|l| l.to_string()).collect();
                Err(format!("trace is [{}]", ls.join(", ")))
            } else {
                Ok(())
            };
            leg(LEG_COMPUTATION, r)
        }
    };
    legs.push(computation);
    Ok(AdequacyReport { legs, trace })
}

#[cfg(test)]
mod tests;
