//! Morphism files: one `c := body.` line per source constant, the body
//! written over the target signature with `c`'s telescope variables free.

use super::dk::{print_dk_term, term_with};
use super::lexer::{lex, Cursor, Pos, Tok};
use super::SyntaxError;
use crate::morphism::TheoryMorphism;
use crate::term::Name;
use crate::theory::Theory;

pub fn parse_morphism(text: &str, source: &Theory, target: &Theory) -> Result<(TheoryMorphism, Vec<Pos>), SyntaxError> {
    let mut cur = Cursor::new(lex(text)?);
    let mut bodies = Vec::new();
    let mut spans = Vec::new();
    while !cur.at_eof() {
        let pos = cur.pos();
        let c = cur.ident()?;
        if source.decl(&c).is_none() {
            return Err(SyntaxError::new(pos, format!("{c} is not a source constant")));
        }
        cur.expect(&Tok::Define)?;
        let body = term_with(&mut cur, target)?;
        cur.expect(&Tok::Dot)?;
        bodies.push((Name::new(&c), body));
        spans.push(pos);
    }
    let end = cur.pos();
    let m = TheoryMorphism::new(source.clone(), target.clone(), bodies).map_err(|e| {
        SyntaxError::new(end, e.to_string())
    })?;
    Ok((m, spans))
}

pub fn print_morphism(m: &TheoryMorphism) -> String {
    let mut out = String::new();
    for (c, body) in m.bodies() {
        out.push_str(&format!("{c} := {}.\n", print_dk_term(&m.target, body)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_theory;

    #[test]
    fn round_trip() {
        let src = parse_theory("constant A : TYPE. constant f [x : A] : A.").unwrap();
        let tgt = parse_theory("constant B : TYPE. constant g [y : B; z : B] : B.").unwrap();
        let text = "A := B.\nf := g(x, x).\n";
        let (m, spans) = parse_morphism(text, &src, &tgt).unwrap();
        assert_eq!(spans.len(), 2);
        assert_eq!(print_morphism(&m), text);
        let (again, _) = parse_morphism(&print_morphism(&m), &src, &tgt).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn missing_body() {
        let src = parse_theory("constant A : TYPE. constant a : A.").unwrap();
        let e = parse_morphism("A := TYPE.", &src, &Theory::new()).unwrap_err();
        assert!(e.message.contains("no body for source constant a"));
    }

    #[test]
    fn stray_variable() {
        let src = parse_theory("constant A : TYPE.").unwrap();
        let e = parse_morphism("A := y.", &src, &Theory::new()).unwrap_err();
        assert!(e.message.contains("free variables"));
    }
}
