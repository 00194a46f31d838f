use super::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `{...}` with balanced braces; the text includes the braces.
    Braced(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Semi,
    Colon,
    Dot,
    Define,
    LongArrow,
    Arrow,
    FatArrow,
    Backslash,
    Hash,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Braced(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Define => "`:=`".into(),
            Tok::LongArrow => "`-->`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::Backslash => "`\\`".into(),
            Tok::Hash => "`#`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '@' | '%' | '\'' | '^')
}

pub fn is_identifier(s: &str) -> bool {
    let mut it = s.chars().peekable();
    let mut first = true;
    while let Some(c) = it.next() {
        if c == '-' {
            if first || matches!(it.peek(), None | Some('-') | Some('>')) {
                return false;
            }
        } else if !is_ident_char(c) {
            return false;
        }
        first = false;
    }
    !s.is_empty()
}

/// `line`/`col` are 1-based and added to every produced position; used to
/// lex a fragment embedded at a known location.
fn lex_at(src: &str, origin: Pos) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = origin.line;
    let mut col = origin.col;
    macro_rules! adv {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            adv!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                adv!();
            }
            continue;
        }
        let rest = |s: &str| chars[i..].iter().take(s.len()).copied().eq(s.chars());
        let fixed: Option<(Tok, usize)> = if rest("-->") {
            Some((Tok::LongArrow, 3))
        } else if rest("->") {
            Some((Tok::Arrow, 2))
        } else if rest("=>") {
            Some((Tok::FatArrow, 2))
        } else if rest(":=") {
            Some((Tok::Define, 2))
        } else {
            match c {
                '(' => Some((Tok::LParen, 1)),
                ')' => Some((Tok::RParen, 1)),
                '[' => Some((Tok::LBrack, 1)),
                ']' => Some((Tok::RBrack, 1)),
                ',' => Some((Tok::Comma, 1)),
                ';' => Some((Tok::Semi, 1)),
                ':' => Some((Tok::Colon, 1)),
                '.' => Some((Tok::Dot, 1)),
                '\\' => Some((Tok::Backslash, 1)),
                '#' => Some((Tok::Hash, 1)),
                _ => None,
            }
        };
        if let Some((tok, n)) = fixed {
            for _ in 0..n {
                adv!();
            }
            out.push(Token { tok, pos });
            continue;
        }
        if c == '{' {
            let mut depth = 0usize;
            let mut text = String::new();
            loop {
                let Some(&d) = chars.get(i) else {
                    return Err(SyntaxError::new(pos, "unterminated `{`"));
                };
                text.push(d);
                if d == '{' {
                    depth += 1;
                } else if d == '}' {
                    depth -= 1;
                }
                adv!();
                if depth == 0 {
                    break;
                }
            }
            out.push(Token { tok: Tok::Braced(text), pos });
            continue;
        }
        if is_ident_char(c) {
            let mut s = String::new();
            while i < chars.len() {
                let d = chars[i];
                let dash_ok = d == '-'
                    && !s.is_empty()
                    && !matches!(chars.get(i + 1), None | Some('-') | Some('>'))
                    && chars.get(i + 1).is_some_and(|e| is_ident_char(*e));
                if is_ident_char(d) || dash_ok {
                    s.push(d);
                    adv!();
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Ident(s), pos });
            continue;
        }
        return Err(SyntaxError::new(pos, format!("unexpected character `{c}`")));
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}

pub fn lex(src: &str) -> Result<Vec<Token>, SyntaxError> {
    lex_at(src, Pos { line: 1, col: 1 })
}

/// Cursor over a token stream.
pub struct Cursor {
    toks: Vec<Token>,
    i: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, i: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    pub fn next(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok) -> Result<(), SyntaxError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", t.describe(), self.peek().describe())))
        }
    }

    pub fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {}", other.describe()))),
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn error(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.pos(), msg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn arrows_and_dashes() {
        assert_eq!(
            toks("u-red A->B x-->y"),
            vec![
                Tok::Ident("u-red".into()),
                Tok::Ident("A".into()),
                Tok::Arrow,
                Tok::Ident("B".into()),
                Tok::Ident("x".into()),
                Tok::LongArrow,
                Tok::Ident("y".into()),
                Tok::Eof
            ]
        );
        assert!(is_identifier("beta@Type@Kind"));
        assert!(!is_identifier("a-"));
        assert!(!is_identifier("-a"));
    }

    #[test]
    fn braces_comments_positions() {
        let ts = lex("#{s(z)} // note\n  x").unwrap();
        assert_eq!(ts[1].tok, Tok::Braced("{s(z)}".into()));
        assert_eq!(ts[2].pos, Pos { line: 2, col: 3 });
        assert!(lex("{oops").is_err());
    }
}
