//! Hand-written lexer and recursive-descent parser for the concrete grammar.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{
    Arm, BinOp, Chan, Expr, Label, LabelSet, Name, Polarity, Process, SessionType, UnOp, Value,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Plus,
    Minus,
    Star,
    Bang,
    Query,
    Shl,
    Shr,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Dot,
    Comma,
    Colon,
    Bar,
    OrOr,
    AndAnd,
    Amp,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    At,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => {
                let s = match other {
                    Tok::Plus => "+",
                    Tok::Minus => "-",
                    Tok::Star => "*",
                    Tok::Bang => "!",
                    Tok::Query => "?",
                    Tok::Shl => "<<",
                    Tok::Shr => ">>",
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBrack => "[",
                    Tok::RBrack => "]",
                    Tok::Dot => ".",
                    Tok::Comma => ",",
                    Tok::Colon => ":",
                    Tok::Bar => "|",
                    Tok::OrOr => "||",
                    Tok::AndAnd => "&&",
                    Tok::Amp => "&",
                    Tok::Eq => "=",
                    Tok::Ne => "!=",
                    Tok::Lt => "<",
                    Tok::Le => "<=",
                    Tok::Gt => ">",
                    Tok::Ge => ">=",
                    Tok::At => "@",
                    _ => unreachable!(),
                };
                format!("`{s}`")
            }
        }
    }
}

const KEYWORDS: &[&str] = &[
    "rec",
    "loop",
    "then",
    "else",
    "if",
    "invariant",
    "mu",
    "end",
    "true",
    "false",
];

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            advance(j - i, &mut i, &mut col);
            out.push(Spanned {
                tok: Tok::Ident(s),
                line: start_line,
                col: start_col,
            });
            continue;
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let n = s.parse::<i64>().map_err(|_| ParseError {
                line: start_line,
                col: start_col,
                message: format!("integer literal `{s}` out of range"),
            })?;
            advance(j - i, &mut i, &mut col);
            out.push(Spanned {
                tok: Tok::Int(n),
                line: start_line,
                col: start_col,
            });
            continue;
        } else {
            let (tok, len) = match (c, next) {
                ('<', Some('<')) => (Tok::Shl, 2),
                ('<', Some('=')) => (Tok::Le, 2),
                ('<', _) => (Tok::Lt, 1),
                ('>', Some('>')) => (Tok::Shr, 2),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('>', _) => (Tok::Gt, 1),
                ('!', Some('=')) => (Tok::Ne, 2),
                ('!', _) => (Tok::Bang, 1),
                ('|', Some('|')) => (Tok::OrOr, 2),
                ('|', _) => (Tok::Bar, 1),
                ('&', Some('&')) => (Tok::AndAnd, 2),
                ('&', _) => (Tok::Amp, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*', _) => (Tok::Star, 1),
                ('?', _) => (Tok::Query, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBrack, 1),
                (']', _) => (Tok::RBrack, 1),
                ('.', _) => (Tok::Dot, 1),
                (',', _) => (Tok::Comma, 1),
                (':', _) => (Tok::Colon, 1),
                ('=', _) => (Tok::Eq, 1),
                ('@', _) => (Tok::At, 1),
                _ => {
                    return Err(ParseError {
                        line,
                        col,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            advance(len, &mut i, &mut col);
            tok
        };
        out.push(Spanned {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let s = &self.toks[self.pos];
        Err(ParseError {
            line: s.line,
            col: s.col,
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        self.error(format!(
            "expected {wanted}, found {}",
            self.peek().describe()
        ))
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    /// An identifier that is not a reserved word.
    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.unexpected(what),
        }
    }

    fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    fn chan(&mut self) -> PResult<Chan> {
        let name = self.ident("a channel name")?;
        let pol = match self.peek() {
            Tok::Plus => Polarity::Plus,
            Tok::Minus => Polarity::Minus,
            _ => return self.unexpected("a polarity `+` or `-`"),
        };
        self.bump();
        Ok(Chan::new(&name, pol))
    }

    fn label_set(&mut self, close: Tok) -> PResult<LabelSet> {
        let mut set = BTreeSet::new();
        if self.eat(&close) {
            return Ok(set);
        }
        loop {
            let l = self.ident("a label")?;
            set.insert(Label::new(&l));
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(close)?;
            return Ok(set);
        }
    }

    // ---- processes ----

    fn process(&mut self) -> PResult<Process> {
        let mut left = self.unary_process()?;
        while self.eat(&Tok::Bar) {
            let right = self.unary_process()?;
            left = Process::par(left, right);
        }
        Ok(left)
    }

    fn unary_process(&mut self) -> PResult<Process> {
        match self.peek().clone() {
            Tok::Int(0) => {
                self.bump();
                Ok(Process::Inact)
            }
            Tok::LParen => {
                self.bump();
                let p = self.process()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Tok::Ident(kw) if kw == "rec" => {
                self.bump();
                let var = self.ident("a process variable")?;
                let invariant = if self.is_keyword("invariant") {
                    self.bump();
                    self.expect(Tok::LBrace)?;
                    Some(self.label_set(Tok::RBrace)?)
                } else {
                    None
                };
                self.expect(Tok::Dot)?;
                let body = self.unary_process()?;
                Ok(Process::Rec {
                    var: var.into(),
                    invariant,
                    body: Box::new(body),
                })
            }
            Tok::Ident(kw) if kw == "loop" => {
                self.bump();
                let var = self.ident("a process variable")?;
                self.expect(Tok::LParen)?;
                let index = self.ident("a loop index")?;
                self.expect(Tok::Lt)?;
                let count = self.expr()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::LBrace)?;
                let body = self.process()?;
                self.expect(Tok::RBrace)?;
                self.expect_keyword("then")?;
                self.expect(Tok::LBrace)?;
                let after = self.process()?;
                self.expect(Tok::RBrace)?;
                Ok(Process::looping(&var, &index, count, body, after))
            }
            Tok::Ident(kw) if kw == "if" => {
                self.bump();
                let cond = self.expr()?;
                self.expect_keyword("then")?;
                let then = self.unary_process()?;
                self.expect_keyword("else")?;
                let otherwise = self.unary_process()?;
                Ok(Process::cond(cond, then, otherwise))
            }
            Tok::Ident(_) if *self.peek_at(1) == Tok::LParen => {
                let var = self.ident("a process variable")?;
                self.bump();
                let mut chans = Vec::new();
                if !self.eat(&Tok::RParen) {
                    loop {
                        chans.push(self.chan()?);
                        if self.eat(&Tok::Comma) {
                            continue;
                        }
                        self.expect(Tok::RParen)?;
                        break;
                    }
                }
                Ok(Process::Call {
                    var: var.into(),
                    chans,
                })
            }
            Tok::Ident(_) => {
                let chan = self.chan()?;
                self.action(chan)
            }
            _ => self.unexpected("a process"),
        }
    }

    fn action(&mut self, chan: Chan) -> PResult<Process> {
        match self.bump() {
            Tok::Bang => {
                self.expect(Tok::LParen)?;
                let expr = self.expr()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Dot)?;
                let cont = self.unary_process()?;
                Ok(Process::send(chan, expr, cont))
            }
            Tok::Query => {
                self.expect(Tok::LParen)?;
                let var = self.ident("a variable")?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Dot)?;
                let cont = self.unary_process()?;
                Ok(Process::recv(chan, &var, cont))
            }
            Tok::Shl => {
                let label = self.ident("a label")?;
                self.expect(Tok::Dot)?;
                let cont = self.unary_process()?;
                Ok(Process::select(chan, &label, cont))
            }
            Tok::Shr => {
                self.expect(Tok::LBrace)?;
                let mut arms: Vec<(Label, Process)> = Vec::new();
                loop {
                    let label = Label::new(&self.ident("a label")?);
                    if arms.iter().any(|(l, _)| *l == label) {
                        return self.error(format!("label `{label}` occurs twice in a branch"));
                    }
                    self.expect(Tok::Colon)?;
                    let p = self.process()?;
                    arms.push((label, p));
                    if self.eat(&Tok::Comma) {
                        continue;
                    }
                    self.expect(Tok::RBrace)?;
                    break;
                }
                Ok(Process::Branch { chan, arms })
            }
            _ => {
                self.pos -= 1;
                self.unexpected("`!`, `?`, `<<` or `>>`")
            }
        }
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        let mut left = self.and_expr()?;
        while self.eat(&Tok::OrOr) {
            left = Expr::binary(BinOp::Or, left, self.and_expr()?);
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut left = self.cmp_expr()?;
        while self.eat(&Tok::AndAnd) {
            left = Expr::binary(BinOp::And, left, self.cmp_expr()?);
        }
        Ok(left)
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let left = self.add_expr()?;
        let op = match self.peek() {
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            _ => return Ok(left),
        };
        self.bump();
        Ok(Expr::binary(op, left, self.add_expr()?))
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut left = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(left),
            };
            self.bump();
            left = Expr::binary(op, left, self.mul_expr()?);
        }
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        let mut left = self.unary_expr()?;
        while self.eat(&Tok::Star) {
            left = Expr::binary(BinOp::Mul, left, self.unary_expr()?);
        }
        Ok(left)
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                if let Tok::Int(n) = *self.peek() {
                    self.bump();
                    return Ok(Expr::Lit(Value::Int(-n)));
                }
                Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary_expr()?)))
            }
            Tok::Bang => {
                self.bump();
                Ok(Expr::Unary(UnOp::Not, Box::new(self.unary_expr()?)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::int(n))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::bool(s == "true"))
            }
            Tok::At => Ok(Expr::Lit(self.value()?)),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(_) => {
                let x = self.ident("an expression")?;
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if !self.eat(&Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(&Tok::Comma) {
                                continue;
                            }
                            self.expect(Tok::RParen)?;
                            break;
                        }
                    }
                    Ok(Expr::Apply(x.into(), args))
                } else {
                    Ok(Expr::Var(x.into()))
                }
            }
            _ => self.unexpected("an expression"),
        }
    }

    fn value(&mut self) -> PResult<Value> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Value::Int(n))
            }
            Tok::Minus => {
                self.bump();
                match self.bump() {
                    Tok::Int(n) => Ok(Value::Int(-n)),
                    _ => {
                        self.pos -= 1;
                        self.unexpected("an integer")
                    }
                }
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Value::Bool(s == "true"))
            }
            Tok::At => {
                self.bump();
                let f: Name = self.ident("a constructor name")?.into();
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
                    loop {
                        args.push(self.value()?);
                        if self.eat(&Tok::Comma) {
                            continue;
                        }
                        self.expect(Tok::RParen)?;
                        break;
                    }
                }
                Ok(Value::Sym(f, args))
            }
            _ => self.unexpected("a value"),
        }
    }

    // ---- types ----

    fn session_type(&mut self) -> PResult<SessionType> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "end" => {
                self.bump();
                Ok(SessionType::End)
            }
            Tok::Ident(s) if s == "mu" => {
                self.bump();
                let t = self.ident("a type variable")?;
                self.expect(Tok::Dot)?;
                Ok(SessionType::mu(&t, self.session_type()?))
            }
            Tok::Ident(_) => Ok(SessionType::var(&self.ident("a type")?)),
            Tok::Bang => {
                self.bump();
                self.expect(Tok::Dot)?;
                Ok(SessionType::out(self.session_type()?))
            }
            Tok::Query => {
                self.bump();
                self.expect(Tok::Dot)?;
                Ok(SessionType::inp(self.session_type()?))
            }
            Tok::Amp => {
                self.bump();
                Ok(SessionType::Branch(self.type_arms()?))
            }
            Tok::Plus => {
                self.bump();
                Ok(SessionType::Select(self.type_arms()?))
            }
            Tok::LParen => {
                self.bump();
                let t = self.session_type()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            _ => self.unexpected("a session type"),
        }
    }

    fn type_arms(&mut self) -> PResult<Vec<Arm>> {
        self.expect(Tok::LBrace)?;
        let mut arms = Vec::new();
        loop {
            let label = self.ident("a label")?;
            let responses = if self.eat(&Tok::LBrack) {
                self.label_set(Tok::RBrack)?
            } else {
                LabelSet::new()
            };
            self.expect(Tok::Dot)?;
            let cont = self.session_type()?;
            arms.push(Arm::new(&label, responses, cont));
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(Tok::RBrace)?;
            return Ok(arms);
        }
    }

    fn checked_type(&mut self) -> PResult<SessionType> {
        let (line, col) = (self.toks[self.pos].line, self.toks[self.pos].col);
        let t = self.session_type()?;
        t.check_well_formed().map_err(|e| ParseError {
            line,
            col,
            message: e.to_string(),
        })?;
        Ok(t)
    }
}

/// Parses a process term.
pub fn parse_process(text: &str) -> Result<Process, ParseError> {
    let mut p = Parser::new(text)?;
    let proc = p.process()?;
    p.finish()?;
    Ok(proc)
}

/// Parses a closed, contractive session type.
pub fn parse_type(text: &str) -> Result<SessionType, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.checked_type()?;
    p.finish()?;
    Ok(t)
}

/// Parses a sequence of `k+ : T` entries (one per line by convention).
pub fn parse_env_entries(text: &str) -> Result<Vec<(Chan, SessionType)>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out: Vec<(Chan, SessionType)> = Vec::new();
    while *p.peek() != Tok::Eof {
        let chan = p.chan()?;
        if out.iter().any(|(c, _)| *c == chan) {
            return p.error(format!("channel `{chan}` declared twice"));
        }
        p.expect(Tok::Colon)?;
        let t = p.checked_type()?;
        out.push((chan, t));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::labels;

    #[test]
    fn trivial_processes() {
        assert_eq!(parse_process("0").unwrap(), Process::Inact);
        assert_eq!(
            parse_process("k+ << ai . 0").unwrap(),
            Process::select(Chan::plus("k"), "ai", Process::Inact)
        );
    }

    #[test]
    fn parallel_is_left_associative_and_loosest() {
        let p = parse_process("a+<<x.0 | b+<<y.0 | c+<<z.0").unwrap();
        let Process::Par(l, r) = p else { panic!() };
        assert!(matches!(*l, Process::Par(..)));
        assert!(matches!(*r, Process::Select { .. }));
    }

    #[test]
    fn branch_loop_and_call() {
        let p = parse_process(
            "k->>{ a: X(k-), b: loop Y (i < n(y) + 1) { k-!(i).Y(k-) } then { 0 } }",
        )
        .unwrap();
        let Process::Branch { arms, .. } = &p else {
            panic!()
        };
        assert_eq!(arms.len(), 2);
        assert!(matches!(arms[1].1, Process::Loop { .. }));
    }

    #[test]
    fn rec_with_invariant() {
        let p = parse_process("rec X invariant {b, a}. k+<<a.X(k+)").unwrap();
        let Process::Rec { invariant, .. } = p else {
            panic!()
        };
        assert_eq!(invariant, Some(labels(["a", "b"])));
    }

    #[test]
    fn expressions() {
        let p = parse_process("if n(y) > 0 && !b then k+!(-3).0 else k+!(x - -2 * 4).0").unwrap();
        let Process::If { cond, then, .. } = p else {
            panic!()
        };
        assert!(matches!(cond, Expr::Binary(BinOp::And, _, _)));
        assert!(matches!(
            *then,
            Process::Send {
                expr: Expr::Lit(Value::Int(-3)),
                ..
            }
        ));
        let q = parse_process("k+!(@item(1, @pair(true, -2))).0").unwrap();
        let Process::Send { expr, .. } = q else {
            panic!()
        };
        assert_eq!(
            expr,
            Expr::Lit(Value::Sym(
                "item".into(),
                vec![
                    Value::Int(1),
                    Value::Sym("pair".into(), vec![Value::Bool(true), Value::Int(-2)])
                ]
            ))
        );
    }

    #[test]
    fn comments_are_skipped() {
        let p = parse_process("# header\nk+<<a. # trailing\n0\n").unwrap();
        assert_eq!(p, Process::select(Chan::plus("k"), "a", Process::Inact));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_process("k+<<a.\n  k+ ?? 0").unwrap_err();
        assert_eq!((e.line, e.col), (2, 7));
        let e = parse_process("k+<<a.0 )").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse_process("k>>{a: 0}").is_err());
        assert!(parse_process("k+>>{a: 0, a: 0}").is_err());
    }

    #[test]
    fn types() {
        assert_eq!(parse_type("end").unwrap(), SessionType::End);
        let w = parse_type("mu t. +{ a[b].t , b[a].t }").unwrap();
        assert_eq!(
            w,
            SessionType::mu(
                "t",
                SessionType::Select(vec![
                    Arm::new("a", labels(["b"]), SessionType::var("t")),
                    Arm::new("b", labels(["a"]), SessionType::var("t")),
                ])
            )
        );
        let tp = parse_type(
            "mu t. &{ AI[].?.t , RI[].?.t , CO[SI].?.mu s. +{ DI[].!.s , SI[].!.end } }",
        )
        .unwrap();
        let SessionType::Branch(arms) = tp.unfold() else {
            panic!()
        };
        let names: Vec<_> = arms.iter().map(|a| a.label.as_str()).collect();
        assert_eq!(names, ["AI", "RI", "CO"]);
        assert_eq!(arms[2].responses, labels(["SI"]));
    }

    #[test]
    fn types_must_be_contractive_and_closed() {
        assert!(parse_type("mu t.t").is_err());
        assert!(parse_type("mu t. mu s. t").is_err());
        assert!(parse_type("!.t").is_err());
        assert!(parse_type("+{a.end, a.end}").is_err());
    }

    #[test]
    fn env_entries() {
        let env = parse_env_entries("# env\nk+ : !.end\nk- : ?.end\n").unwrap();
        assert_eq!(env.len(), 2);
        assert_eq!(env[1].0, Chan::minus("k"));
        assert!(parse_env_entries("k+ : end\nk+ : end").is_err());
    }
}
