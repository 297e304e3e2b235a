use crate::numerics::Real;

use super::ast::{BinOp, Expr, Func, Pred};
use super::MapError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const RESERVED: [&str; 2] = ["x", "isint"];

fn lex(text: &str, line0: usize, col0: usize) -> Result<Vec<Token>, MapError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (line0, col0);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
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
        let start = i;
        let tok = if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
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
            Tok::Num(chars[start..i].iter().collect())
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if "+-*/^()?:<=".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(MapError::Syntax { line: tl, column: tc, message: format!("unexpected character {c:?}") });
        };
        col += i - start;
        out.push(Token { tok, line: tl, column: tc });
    }
    out.push(Token { tok: Tok::End, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, MapError> {
        let t = &self.toks[self.pos];
        Err(MapError::Syntax { line: t.line, column: t.column, message: message.into() })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Num(s) => format!("number {s}"),
            Tok::Ident(s) => format!("identifier {s}"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".to_string(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), MapError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected '{c}', found {}", self.describe()))
        }
    }

    fn expr(&mut self) -> Result<Expr, MapError> {
        if *self.peek() == Tok::Ident("isint".into()) {
            self.bump();
            self.expect('(')?;
            let arg = self.expr()?;
            self.expect(')')?;
            return self.finish_cond(Pred::IsInt(arg));
        }
        let lhs = self.sum()?;
        match self.peek() {
            Tok::Sym('<') => {
                self.bump();
                let rhs = self.sum()?;
                self.finish_cond(Pred::Lt(lhs, rhs))
            }
            Tok::Sym('=') => {
                self.bump();
                let rhs = self.sum()?;
                self.finish_cond(Pred::Eq(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn finish_cond(&mut self, pred: Pred) -> Result<Expr, MapError> {
        self.expect('?')?;
        let then = self.expr()?;
        self.expect(':')?;
        let other = self.expr()?;
        Ok(Expr::Cond(Box::new(pred), Box::new(then), Box::new(other)))
    }

    fn sum(&mut self) -> Result<Expr, MapError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, MapError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, MapError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, MapError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        let n = match self.peek().clone() {
            Tok::Num(s) if s.bytes().all(|b| b.is_ascii_digit()) => match s.parse::<i32>() {
                Ok(n) => n,
                Err(_) => return self.error("exponent out of range"),
            },
            _ => return self.error("exponent must be an integer literal"),
        };
        self.bump();
        if *self.peek() == Tok::Sym('^') {
            return self.error("chained powers need parentheses");
        }
        Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
    }

    fn primary(&mut self) -> Result<Expr, MapError> {
        match self.peek().clone() {
            Tok::Num(s) => {
                let v: Real = match s.parse() {
                    Ok(v) => v,
                    Err(_) => return self.error(format!("invalid number {s}")),
                };
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if name == "x" {
                    self.bump();
                    return Ok(Expr::Var);
                }
                if let Some(func) = Func::from_name(&name) {
                    if *self.peek_at(1) != Tok::Sym('(') {
                        return self.error(format!("function {name} needs an argument in parentheses"));
                    }
                    self.bump();
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if RESERVED.contains(&name.as_str()) {
                    return self.error(format!("{name} may only start a conditional"));
                }
                self.bump();
                Ok(Expr::Param(name))
            }
            _ => self.error(format!("expected an expression, found {}", self.describe())),
        }
    }
}

/// Parses an expression whose text starts at the given 1-based line and column
/// of some enclosing document (used for error positions).
pub(crate) fn parse_expr_at(text: &str, line: usize, column: usize) -> Result<Expr, MapError> {
    let toks = lex(text, line, column)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {} after expression", p.describe()));
    }
    Ok(e)
}

pub fn parse_expr(text: &str) -> Result<Expr, MapError> {
    parse_expr_at(text, 1, 1)
}
