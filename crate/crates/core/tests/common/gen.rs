//! Random well-typed System F terms, built type-directed in implicit syntax
//! and then elaborated.

use ptsdk::epts::{elaborate, EptsContext, EptsTerm, PtsTerm, SortSpec};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Debug, PartialEq)]
pub enum Ty {
    Base(String),
    Arrow(Box<Ty>, Box<Ty>),
    Forall(String, Box<Ty>),
}

fn base(s: &str) -> Ty {
    Ty::Base(s.to_string())
}

fn arrow(a: Ty, b: Ty) -> Ty {
    Ty::Arrow(Box::new(a), Box::new(b))
}

fn forall(x: &str, b: Ty) -> Ty {
    Ty::Forall(x.to_string(), Box::new(b))
}

impl Ty {
    pub fn to_pts(&self) -> PtsTerm {
        match self {
            Ty::Base(x) => PtsTerm::var(x.as_str()),
            Ty::Arrow(a, b) => PtsTerm::pi("_", a.to_pts(), b.to_pts()),
            Ty::Forall(x, b) => PtsTerm::pi(x, PtsTerm::sort("Type"), b.to_pts()),
        }
    }

    fn subst(&self, x: &str, t: &Ty) -> Ty {
        match self {
            Ty::Base(y) if y == x => t.clone(),
            Ty::Base(_) => self.clone(),
            Ty::Arrow(a, b) => arrow(a.subst(x, t), b.subst(x, t)),
            Ty::Forall(y, _) if y == x => self.clone(),
            Ty::Forall(y, b) => Ty::Forall(y.clone(), Box::new(b.subst(x, t))),
        }
    }
}

fn poly_id() -> Ty {
    forall("X", arrow(base("X"), base("X")))
}

/// `C : Type, c : C, h : C -> C, k : C -> C -> C, p : (X : Type) -> X -> X`.
pub fn base_entries() -> Vec<(String, Option<Ty>)> {
    vec![
        ("C".into(), None),
        ("c".into(), Some(base("C"))),
        ("h".into(), Some(arrow(base("C"), base("C")))),
        ("k".into(), Some(arrow(base("C"), arrow(base("C"), base("C"))))),
        ("p".into(), Some(poly_id())),
    ]
}

pub fn base_context(spec: &SortSpec) -> EptsContext {
    let mut ctx = EptsContext::new();
    for (x, t) in base_entries() {
        let ty = match t {
            None => PtsTerm::sort("Type"),
            Some(t) => t.to_pts(),
        };
        let a = elaborate(spec, &ctx, &ty, None).expect("base context elaborates");
        ctx.push(x.as_str(), a);
    }
    ctx
}

pub fn goal_types() -> Vec<Ty> {
    vec![
        base("C"),
        arrow(base("C"), base("C")),
        arrow(arrow(base("C"), base("C")), base("C")),
        poly_id(),
        forall("Y", arrow(base("Y"), arrow(base("C"), base("Y")))),
    ]
}

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    vars: Vec<(String, Ty)>,
    tvars: Vec<String>,
    fresh: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn fresh(&mut self, hint: &str) -> String {
        self.fresh += 1;
        format!("{hint}{}", self.fresh)
    }

    fn pool(&self) -> Vec<Ty> {
        let mut p = vec![base("C"), arrow(base("C"), base("C")), poly_id()];
        p.extend(self.tvars.iter().map(|x| base(x)));
        p
    }

    fn term(&mut self, goal: &Ty, fuel: usize) -> Option<PtsTerm> {
        let mut options: Vec<u8> = vec![0, 1, 2];
        if fuel > 0 {
            options.extend([3, 3, 4, 5, 6]);
        }
        options.shuffle(self.rng);
        for o in options {
            if let Some(t) = self.attempt(o, goal, fuel) {
                return Some(t);
            }
        }
        None
    }

    fn attempt(&mut self, option: u8, goal: &Ty, fuel: usize) -> Option<PtsTerm> {
        match option {
            // a variable of exactly the goal type
            0 => {
                let hits: Vec<String> = self.vars.iter().filter(|(_, t)| t == goal).map(|(x, _)| x.clone()).collect();
                hits.choose(self.rng).map(|x| PtsTerm::var(x.as_str()))
            }
            // polymorphic identity instantiated at the goal, applied to a variable
            1 => {
                let args: Vec<String> = self.vars.iter().filter(|(_, t)| t == goal).map(|(x, _)| x.clone()).collect();
                let a = args.choose(self.rng)?;
                Some(PtsTerm::app(PtsTerm::app(PtsTerm::var("p"), goal.to_pts()), PtsTerm::var(a.as_str())))
            }
            // introduction
            2 | 3 => match goal {
                Ty::Arrow(a, b) if fuel > 0 || option == 2 => {
                    let x = self.fresh("x");
                    self.vars.push((x.clone(), (**a).clone()));
                    let body = self.term(b, fuel.saturating_sub(1));
                    self.vars.pop();
                    Some(PtsTerm::lam(&x, a.to_pts(), body?))
                }
                Ty::Forall(y, b) if fuel > 0 || option == 2 => {
                    let x = self.fresh("T");
                    self.tvars.push(x.clone());
                    let body = self.term(&b.subst(y, &base(&x)), fuel.saturating_sub(1));
                    self.tvars.pop();
                    Some(PtsTerm::lam(&x, PtsTerm::sort("Type"), body?))
                }
                _ => None,
            },
            // elimination of a function variable with the goal as result
            4 => {
                let fs: Vec<(String, Ty)> = self
                    .vars
                    .iter()
                    .filter_map(|(x, t)| match t {
                        Ty::Arrow(a, b) if **b == *goal => Some((x.clone(), (**a).clone())),
                        _ => None,
                    })
                    .collect();
                let (f, a) = fs.choose(self.rng)?.clone();
                let arg = self.term(&a, fuel - 1)?;
                Some(PtsTerm::app(PtsTerm::var(f.as_str()), arg))
            }
            // polymorphic identity on a generated argument
            5 => {
                let arg = self.term(goal, fuel - 1)?;
                Some(PtsTerm::app(PtsTerm::app(PtsTerm::var("p"), goal.to_pts()), arg))
            }
            // a source-level redex
            _ => {
                let s = self.pool().choose(self.rng)?.clone();
                let z = self.fresh("z");
                let arg = self.term(&s, fuel.saturating_sub(2))?;
                self.vars.push((z.clone(), s.clone()));
                let body = self.term(goal, fuel.saturating_sub(2));
                self.vars.pop();
                Some(PtsTerm::app(PtsTerm::lam(&z, s.to_pts(), body?), arg))
            }
        }
    }
}

/// A raw implicit term of type `goal` in the base context, before elaboration.
pub fn generate_raw<R: Rng>(rng: &mut R, goal: &Ty) -> Option<PtsTerm> {
    let fuel = rng.gen_range(1..=4);
    let vars = base_entries().into_iter().filter_map(|(x, t)| t.map(|t| (x, t))).collect();
    let mut g = Gen { rng, vars, tvars: Vec::new(), fresh: 0 };
    g.term(goal, fuel)
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub raw: PtsTerm,
    pub term: EptsTerm,
    pub ty: EptsTerm,
}

/// A generated judgment `base ⊢ M : goal` with `M` of depth at most `max_depth`.
pub fn generate_at<R: Rng>(rng: &mut R, spec: &SortSpec, ctx: &EptsContext, goal: &Ty, max_depth: usize) -> Option<Sample> {
    let raw = generate_raw(rng, goal)?;
    let ty = elaborate(spec, ctx, &goal.to_pts(), None).ok()?;
    let term = elaborate(spec, ctx, &raw, Some(&goal.to_pts())).ok()?;
    (term.depth() <= max_depth).then_some(Sample { raw, term, ty })
}

/// A generated judgment `base ⊢ M : A` with `M` of depth at most `max_depth`.
pub fn generate<R: Rng>(rng: &mut R, spec: &SortSpec, ctx: &EptsContext, max_depth: usize) -> Option<(EptsTerm, EptsTerm)> {
    let goal = goal_types().choose(rng)?.clone();
    generate_at(rng, spec, ctx, &goal, max_depth).map(|s| (s.term, s.ty))
}

/// Retries `generate_at` from a seed until it succeeds.
pub fn sample_from_seed(seed: u64, spec: &SortSpec, ctx: &EptsContext, goal: Option<&Ty>, max_depth: usize) -> Sample {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    loop {
        let goal = match goal {
            Some(g) => g.clone(),
            None => goal_types().choose(&mut rng).expect("goals").clone(),
        };
        if let Some(s) = generate_at(&mut rng, spec, ctx, &goal, max_depth) {
            return s;
        }
    }
}

pub fn c_type() -> Ty {
    base("C")
}
