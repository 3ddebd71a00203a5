//! Hand-written lexer and recursive-descent parser for assertions,
//! commands, triples and `P ; C ; ε` wpo queries.

use std::fmt;

use thiserror::Error;

use crate::syntax::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at line {}, column {}: ", self.line, self.col)?;
        match self.expected.as_slice() {
            [] => write!(f, "unexpected {}", self.found),
            [one] => write!(f, "expected {one}, found {}", self.found),
            many => write!(f, "expected one of {}, found {}", many.join(", "), self.found),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Kw(k) => write!(f, "`{k}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "null", "emp", "exists", "false", "skip", "error", "assume", "local", "choice", "or", "star", "alloc", "free",
    "if", "else", "while", "assert", "malloc", "ok", "er",
];

// longest first so that `-/>` wins over `->`
const SYMBOLS: &[&str] = &[
    "-/>", "->", "==", "!=", ":=", "\\/", "*", ".", ";", ":", "(", ")", "{", "}", "[", "]",
];

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word),
            };
            out.push(Token { tok, line, col });
            col += i - start;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push(Token {
                    tok: Tok::Sym(s),
                    line,
                    col,
                });
                i += s.len();
                col += s.len();
            }
            None => {
                return Err(ParseError {
                    line,
                    col,
                    expected: Vec::new(),
                    found: format!("character `{c}`"),
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.to_string(),
        }
    }

    pub(crate) fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub(crate) fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == k)
    }

    pub(crate) fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{s}`")]))
        }
    }

    pub(crate) fn expect_kw(&mut self, k: &str) -> Result<(), ParseError> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&format!("`{k}`")]))
        }
    }

    pub(crate) fn expect_eof(&mut self) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<Var, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Var::new(&s))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Term::Var(Var::new(&s)))
            }
            Tok::Kw("null") => {
                self.bump();
                Ok(Term::Null)
            }
            _ => Err(self.error(&["identifier", "`null`"])),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        if self.is_kw("emp") {
            self.bump();
            return Ok(Atom::Emp);
        }
        let lhs = self.term()?;
        match self.peek() {
            Tok::Sym("->") | Tok::Sym("-/>") => {
                let neg = self.is_sym("-/>");
                let Term::Var(x) = lhs else {
                    return Err(self.error(&["`==`", "`!=`"]));
                };
                self.bump();
                if neg {
                    Ok(Atom::Spatial(SpatialAtom::NegPoints(x)))
                } else {
                    let t = self.term()?;
                    Ok(Atom::Spatial(SpatialAtom::PointsTo(x, t)))
                }
            }
            Tok::Sym("==") => {
                self.bump();
                Ok(Atom::Pure(PureAtom::new(PureKind::Eq, lhs, self.term()?)))
            }
            Tok::Sym("!=") => {
                self.bump();
                Ok(Atom::Pure(PureAtom::new(PureKind::Neq, lhs, self.term()?)))
            }
            _ => Err(self.error(&["`->`", "`-/>`", "`==`", "`!=`"])),
        }
    }

    pub(crate) fn heap(&mut self) -> Result<SymbolicHeap, ParseError> {
        let mut atoms = vec![self.atom()?];
        while self.eat_sym("*") {
            atoms.push(self.atom()?);
        }
        Ok(SymbolicHeap::from_atoms(atoms))
    }

    fn pure_heap(&mut self) -> Result<SymbolicHeap, ParseError> {
        let save = self.pos;
        let h = self.heap()?;
        if !h.is_pure() {
            self.pos = save;
            return Err(self.error(&["pure atoms"]));
        }
        Ok(h)
    }

    /// A disjunct, or `None` for the literal `false`.
    fn quantified(&mut self) -> Result<Option<QuantifiedHeap>, ParseError> {
        if self.is_kw("false") {
            self.bump();
            return Ok(None);
        }
        let mut binders = Vec::new();
        if self.is_kw("exists") {
            self.bump();
            binders.push(self.ident()?);
            while !self.is_sym(".") {
                let v = self.ident().map_err(|_| self.error(&["identifier", "`.`"]))?;
                if binders.contains(&v) {
                    return Err(self.error(&["distinct binder names"]));
                }
                binders.push(v);
            }
            self.bump();
        }
        Ok(Some(QuantifiedHeap::new(binders, self.heap()?)))
    }

    pub(crate) fn assertion(&mut self) -> Result<Assertion, ParseError> {
        let mut disjuncts = Vec::new();
        disjuncts.extend(self.quantified()?);
        while self.eat_sym("\\/") {
            disjuncts.extend(self.quantified()?);
        }
        Ok(Assertion::new(disjuncts))
    }

    fn block(&mut self) -> Result<Command, ParseError> {
        self.expect_sym("{")?;
        let c = self.command()?;
        self.expect_sym("}")?;
        Ok(c)
    }

    fn paren_pure(&mut self) -> Result<SymbolicHeap, ParseError> {
        self.expect_sym("(")?;
        let b = self.pure_heap()?;
        self.expect_sym(")")?;
        Ok(b)
    }

    fn simple_command(&mut self) -> Result<Command, ParseError> {
        match self.peek().clone() {
            Tok::Kw("skip") => {
                self.bump();
                Ok(Command::Skip)
            }
            Tok::Kw("error") => {
                self.bump();
                Ok(Command::Error)
            }
            Tok::Kw("assume") => {
                self.bump();
                Ok(Command::Assume(self.paren_pure()?))
            }
            Tok::Kw("assert") => {
                self.bump();
                Ok(Command::Assert(self.paren_pure()?))
            }
            Tok::Kw("free") => {
                self.bump();
                self.expect_sym("(")?;
                let x = self.ident()?;
                self.expect_sym(")")?;
                Ok(Command::Free(x))
            }
            Tok::Kw("local") => {
                self.bump();
                let x = self.ident()?;
                Ok(Command::local(x, self.block()?))
            }
            Tok::Kw("choice") => {
                self.bump();
                let a = self.block()?;
                self.expect_kw("or")?;
                let b = self.block()?;
                Ok(Command::choice(a, b))
            }
            Tok::Kw("star") => {
                self.bump();
                Ok(Command::star(self.block()?))
            }
            Tok::Kw("if") => {
                self.bump();
                let b = self.paren_pure()?;
                let c1 = self.block()?;
                self.expect_kw("else")?;
                let c2 = self.block()?;
                Ok(Command::If(b, Box::new(c1), Box::new(c2)))
            }
            Tok::Kw("while") => {
                self.bump();
                let b = self.paren_pure()?;
                Ok(Command::While(b, Box::new(self.block()?)))
            }
            Tok::Sym("{") => self.block(),
            Tok::Sym("[") => {
                self.bump();
                let x = self.ident()?;
                self.expect_sym("]")?;
                self.expect_sym(":=")?;
                Ok(Command::Store(x, self.term()?))
            }
            Tok::Ident(_) => {
                let x = self.ident()?;
                self.expect_sym(":=")?;
                match self.peek().clone() {
                    Tok::Sym("*") => {
                        self.bump();
                        Ok(Command::Havoc(x))
                    }
                    Tok::Kw("alloc") | Tok::Kw("malloc") => {
                        let m = self.is_kw("malloc");
                        self.bump();
                        self.expect_sym("(")?;
                        self.expect_sym(")")?;
                        Ok(if m { Command::Malloc(x) } else { Command::Alloc(x) })
                    }
                    Tok::Sym("[") => {
                        self.bump();
                        let y = self.ident()?;
                        self.expect_sym("]")?;
                        Ok(Command::Load(x, y))
                    }
                    _ => self
                        .term()
                        .map(|t| Command::Assign(x, t))
                        .map_err(|_| self.error(&["identifier", "`null`", "`*`", "`alloc`", "`malloc`", "`[`"])),
                }
            }
            _ => Err(self.error(&["command"])),
        }
    }

    pub(crate) fn command(&mut self) -> Result<Command, ParseError> {
        let first = self.simple_command()?;
        if self.is_sym(";") && !self.at_exit_suffix() {
            self.bump();
            let rest = self.command()?;
            return Ok(Command::seq(first, rest));
        }
        Ok(first)
    }

    // `; ok` or `; er` closing a wpo query
    fn at_exit_suffix(&self) -> bool {
        matches!(self.peek_at(1), Tok::Kw("ok") | Tok::Kw("er")) && matches!(self.peek_at(2), Tok::Eof)
    }

    pub(crate) fn exit(&mut self) -> Result<ExitCondition, ParseError> {
        match self.peek() {
            Tok::Kw("ok") => {
                self.bump();
                Ok(ExitCondition::Ok)
            }
            Tok::Kw("er") => {
                self.bump();
                Ok(ExitCondition::Er)
            }
            _ => Err(self.error(&["`ok`", "`er`"])),
        }
    }

    pub(crate) fn triple(&mut self) -> Result<Triple, ParseError> {
        self.expect_sym("[")?;
        let pre = self.assertion()?;
        self.expect_sym("]")?;
        let cmd = self.command()?;
        self.expect_sym("[")?;
        let exit = self.exit()?;
        self.expect_sym(":")?;
        let post = self.assertion()?;
        self.expect_sym("]")?;
        Ok(Triple::new(pre, cmd, exit, post))
    }
}

pub fn parse_assertion(src: &str) -> Result<Assertion, ParseError> {
    let mut p = Parser::new(src)?;
    let a = p.assertion()?;
    p.expect_eof()?;
    Ok(a)
}

/// A single quantifier-free heap, e.g. an `assume` payload or a frame.
pub fn parse_heap(src: &str) -> Result<SymbolicHeap, ParseError> {
    let mut p = Parser::new(src)?;
    let h = p.heap()?;
    p.expect_eof()?;
    Ok(h)
}

pub fn parse_command(src: &str) -> Result<Command, ParseError> {
    let mut p = Parser::new(src)?;
    let c = p.command()?;
    p.expect_eof()?;
    Ok(c)
}

pub fn parse_triple(src: &str) -> Result<Triple, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.triple()?;
    p.expect_eof()?;
    Ok(t)
}

/// The `P ; C ; ε` input of the wpo subcommand.
pub fn parse_wpo_query(src: &str) -> Result<(Assertion, Command, ExitCondition), ParseError> {
    let mut p = Parser::new(src)?;
    let a = p.assertion()?;
    p.expect_sym(";")?;
    let c = p.command()?;
    p.expect_sym(";")?;
    let e = p.exit()?;
    p.expect_eof()?;
    Ok((a, c, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_points_to() {
        let a = parse_assertion("x -> t").unwrap();
        let h = a.as_heap().unwrap();
        assert_eq!(h.spatial(), &[SpatialAtom::PointsTo(Var::new("x"), Term::var("t"))]);
    }

    #[test]
    fn free_triple() {
        let t = parse_triple("[ x -> v ] free(x) [ ok: x -/> ]").unwrap();
        assert_eq!(t.cmd, Command::Free(Var::new("x")));
        assert_eq!(t.exit, ExitCondition::Ok);
        assert_eq!(t.post.to_string(), "x -/>");
    }

    #[test]
    fn truncated_input_reports_position() {
        let e = parse_command("free(").unwrap_err();
        assert_eq!((e.line, e.col), (1, 6));
        assert_eq!(e.expected, vec!["identifier".to_string()]);
    }

    #[test]
    fn assume_rejects_spatial() {
        assert!(parse_command("assume(x -> y)").is_err());
    }

    #[test]
    fn quantified_disjunction_and_false() {
        let a = parse_assertion("exists a b . x -> a * a == b \\/ false \\/ emp").unwrap();
        assert_eq!(a.disjuncts.len(), 2);
        assert_eq!(a.disjuncts[0].binders.len(), 2);
        assert!(parse_assertion("false").unwrap().is_false());
    }

    #[test]
    fn wpo_query_splits_at_exit() {
        let (p, c, e) = parse_wpo_query("y -> e ; x := null ; free(x) ; er").unwrap();
        assert_eq!(p.to_string(), "y -> e");
        assert_eq!(c.to_string(), "x := null ; free(x)");
        assert_eq!(e, ExitCondition::Er);
    }

    #[test]
    fn comments_and_sugar() {
        let src = "# header\nif (x == null) { x := malloc() } else { skip } ; while (x != y) { x := [x] }";
        let c = parse_command(src).unwrap();
        assert_eq!(parse_command(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn printed_commands_reparse() {
        for src in [
            "local x { x := alloc() ; [x] := y ; free(x) }",
            "choice { x := * } or { assume(x == y * y != null) }",
            "star { x := [y] } ; error",
            "{ skip ; skip } ; skip",
        ] {
            let c = parse_command(src).unwrap();
            assert_eq!(parse_command(&c.to_string()).unwrap(), c, "{src}");
        }
    }
}
