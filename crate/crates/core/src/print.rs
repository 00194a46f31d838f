//! Printing framework terms in the surface syntax.
//!
//! `c(a, b)` constant application, `f a` application, `\x : A => M`
//! abstraction, `(x : A) -> B` product and `A -> B` when `x` is unused.

use std::collections::BTreeSet;
use std::fmt;

use crate::term::{Name, Term};

/// Renders terms, choosing binder names that neither capture free
/// variables nor collide with `reserved` identifiers (typically constants).
#[derive(Default, Clone)]
pub struct TermPrinter {
    pub reserved: BTreeSet<String>,
}

impl TermPrinter {
    pub fn new() -> Self {
        TermPrinter::default()
    }

    pub fn with_reserved(reserved: impl IntoIterator<Item = String>) -> Self {
        TermPrinter { reserved: reserved.into_iter().collect() }
    }

    pub fn print(&self, t: &Term) -> String {
        let free: BTreeSet<String> = t.free_vars().into_iter().map(|n| n.as_str().to_string()).collect();
        let mut out = String::new();
        let mut env = Vec::new();
        self.go(t, 0, &free, &mut env, &mut out);
        out
    }

    /// Prints `t` under binders named `env` (innermost last).
    pub fn print_open(&self, t: &Term, env: &[Name]) -> String {
        let free: BTreeSet<String> = t.free_vars().into_iter().map(|n| n.as_str().to_string()).collect();
        let mut env: Vec<String> = env.iter().map(|n| n.as_str().to_string()).collect();
        let mut out = String::new();
        self.go(t, 0, &free, &mut env, &mut out);
        out
    }

    fn pick(&self, hint: &Name, used: bool, free: &BTreeSet<String>, env: &[String]) -> String {
        let base = hint.as_str();
        if !used && base == "_" {
            return "_".to_string();
        }
        let taken = |s: &str| free.contains(s) || env.iter().any(|e| e == s) || self.reserved.contains(s) || s == "_";
        crate::term::fresh_name(base, taken).as_str().to_string()
    }

    fn go(&self, t: &Term, prec: u8, free: &BTreeSet<String>, env: &mut Vec<String>, out: &mut String) {
        match t {
            Term::Type => out.push_str("TYPE"),
            Term::Kind => out.push_str("KIND"),
            Term::FVar(x) => out.push_str(x.as_str()),
            Term::BVar(i) => match env.len().checked_sub(*i as usize + 1) {
                Some(k) => out.push_str(&env[k]),
                None => out.push_str(&format!("#{i}")),
            },
            Term::Cons(c, args) => {
                out.push_str(c.as_str());
                if !args.is_empty() {
                    out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        self.go(a, 0, free, env, out);
                    }
                    out.push(')');
                }
            }
            Term::App(f, a) => {
                let paren = prec > 1;
                if paren {
                    out.push('(');
                }
                self.go(f, 1, free, env, out);
                out.push(' ');
                self.go(a, 2, free, env, out);
                if paren {
                    out.push(')');
                }
            }
            Term::Lam(x, a, body) => {
                let paren = prec > 0;
                if paren {
                    out.push('(');
                }
                let name = self.pick(x, body.has_bvar(0), free, env);
                out.push('\\');
                out.push_str(&name);
                out.push_str(" : ");
                self.go(a, 1, free, env, out);
                out.push_str(" => ");
                env.push(name);
                self.go(body, 0, free, env, out);
                env.pop();
                if paren {
                    out.push(')');
                }
            }
            Term::Pi(x, a, body) => {
                let paren = prec > 0;
                if paren {
                    out.push('(');
                }
                if body.has_bvar(0) {
                    let name = self.pick(x, true, free, env);
                    out.push('(');
                    out.push_str(&name);
                    out.push_str(" : ");
                    self.go(a, 0, free, env, out);
                    out.push_str(") -> ");
                    env.push(name);
                    self.go(body, 0, free, env, out);
                    env.pop();
                } else {
                    self.go(a, 1, free, env, out);
                    out.push_str(" -> ");
                    env.push("_".to_string());
                    self.go(body, 0, free, env, out);
                    env.pop();
                }
                if paren {
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&TermPrinter::new().print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let a = Term::constant("A");
        let el = |t| Term::cons("El", vec![t]);
        assert_eq!(Term::lam("x", a.clone(), Term::var("x")).to_string(), "\\x : A => x");
        assert_eq!(Term::arrow(a.clone(), a.clone()).to_string(), "A -> A");
        assert_eq!(Term::pi("x", a.clone(), el(Term::var("x"))).to_string(), "(x : A) -> El(x)");
        let f = Term::var("f");
        assert_eq!(Term::app(f.clone(), Term::app(f.clone(), a.clone())).to_string(), "f (f A)");
        assert_eq!(Term::arrow(Term::arrow(a.clone(), a.clone()), a.clone()).to_string(), "(A -> A) -> A");
    }

    #[test]
    fn shadowing_is_avoided() {
        let a = Term::constant("A");
        // λx. λx'. (outer x): inner binder must not reuse the outer name
        let t = Term::lam_raw("x".into(), a.clone(), Term::lam_raw("x".into(), a.clone(), Term::BVar(1)));
        assert_eq!(t.to_string(), "\\x : A => \\x1 : A => x");
        // a binder named like a free variable is renamed
        let t = Term::lam_raw("y".into(), a, Term::app(Term::BVar(0), Term::var("y")));
        assert_eq!(t.to_string(), "\\y1 : A => y1 y");
    }
}
