use super::{Expr, Func};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn tokenize(source: &str) -> Result<Vec<(Token, Pos)>> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column };
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            ',' => Some(Token::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, pos));
            column += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text.parse().map_err(|_| Error::Syntax { line, column, message: format!("malformed number `{text}`") })?;
            out.push((Token::Number(value), pos));
            column += i - start;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Token::Ident(chars[start..i].iter().collect()), pos));
            column += i - start;
            continue;
        }
        return Err(Error::Syntax { line, column, message: format!("unexpected character `{c}`") });
    }
    out.push((Token::End, Pos { line, column }));
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, Pos)>,
    at: usize,
    coords: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.at].0
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].1
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.at].0.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        tok
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let pos = self.pos();
        Err(Error::Syntax { line: pos.line, column: pos.column, message: message.into() })
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Token::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Token::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Token::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() == Token::Caret {
            self.bump();
            let exponent = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), exponent));
        }
        Ok(base)
    }

    /// Constant exponent: `[-] number [/ number]`, a parenthesised constant
    /// expression, optionally followed by a further right-associative `^`.
    fn exponent(&mut self) -> Result<f64> {
        let negative = if *self.peek() == Token::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut value = match self.peek().clone() {
            Token::Number(n) => {
                self.bump();
                if *self.peek() == Token::Slash {
                    if let Token::Number(d) = self.tokens[self.at + 1].0 {
                        self.bump();
                        self.bump();
                        n / d
                    } else {
                        n
                    }
                } else {
                    n
                }
            }
            Token::LParen => {
                let pos = self.pos();
                self.bump();
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                match inner.constant_value() {
                    Some(v) => v,
                    None => return Err(Error::Syntax { line: pos.line, column: pos.column, message: "exponent must be a constant".into() }),
                }
            }
            other => return self.error(format!("expected a constant exponent, found {}", describe(&other))),
        };
        if *self.peek() == Token::Caret {
            self.bump();
            value = value.powf(self.exponent()?);
        }
        Ok(if negative { -value } else { value })
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Token::Number(n) => Ok(Expr::Const(n)),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Minus => Ok(Expr::Neg(Box::new(self.atom()?))),
            Token::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    return self.call(func, &name);
                }
                if name == "pow" {
                    self.expect(Token::LParen, "`(` after `pow`")?;
                    let base = self.expr()?;
                    self.expect(Token::Comma, "`,` in pow(base, exponent)")?;
                    let exp_pos = self.pos();
                    let exponent = self.expr()?;
                    self.expect(Token::RParen, "`)`")?;
                    let value = exponent.constant_value().ok_or(Error::Syntax {
                        line: exp_pos.line,
                        column: exp_pos.column,
                        message: "pow exponent must be a constant".into(),
                    })?;
                    return Ok(Expr::Pow(Box::new(base), value));
                }
                match self.coords.iter().position(|c| *c == name) {
                    Some(index) => Ok(Expr::Var { index, name }),
                    None => Err(Error::UndeclaredVariable(name)),
                }
            }
            other => {
                Err(Error::Syntax { line: pos.line, column: pos.column, message: format!("expected an expression, found {}", describe(&other)) })
            }
        }
    }

    fn call(&mut self, func: Func, name: &str) -> Result<Expr> {
        self.expect(Token::LParen, &format!("`(` after `{name}`"))?;
        let arg = self.expr()?;
        self.expect(Token::RParen, "`)`")?;
        Ok(Expr::Func(func, Box::new(arg)))
    }
}

fn describe(tok: &Token) -> String {
    match tok {
        Token::Number(n) => format!("number {n}"),
        Token::Ident(s) => format!("identifier `{s}`"),
        Token::End => "end of input".into(),
        Token::Plus => "`+`".into(),
        Token::Minus => "`-`".into(),
        Token::Star => "`*`".into(),
        Token::Slash => "`/`".into(),
        Token::Caret => "`^`".into(),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
        Token::Comma => "`,`".into(),
    }
}

/// Parses `source` against the declared coordinate names.
pub fn parse(source: &str, coords: &[String]) -> Result<Expr> {
    let tokens = tokenize(source)?;
    let mut parser = Parser { tokens, at: 0, coords };
    let expr = parser.expr()?;
    if *parser.peek() != Token::End {
        return parser.error(format!("unexpected {}", describe(parser.peek())));
    }
    Ok(expr)
}
