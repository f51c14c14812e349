//! Parser for the formula surface grammar:
//!
//! ```text
//! formula := or
//! or      := and ( "\/" and )*
//! and     := unary ( "/\" unary )*
//! unary   := "~" unary | ("exists"|"forall") VAR "." formula
//!          | "(" formula ")" | atom
//! atom    := term ("<=" | "<" | "=") term | NUM "|" term
//! term    := factor ( "+" factor )*
//! factor  := NUM | "2" "*" "(" term ")" | VAR | "(" term ")"
//! ```
//!
//! `~` binds over `/\` over `\/`; quantifiers extend maximally to the right.
//! Decimal constants expand into the `{0,1,+,x2}` encoding, `t1 = t2` is
//! sugar for the corresponding pair of inequalities and `t1 < t2` for
//! `t1 + 1 <= t2`. Variables match `[a-z][a-z0-9]*`.

use super::{Atom, Formula, LinearTerm};
use num_bigint::BigInt;

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("formula syntax error at column {col}: {msg}")]
pub struct FormulaParseError {
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(BigInt),
    LParen,
    RParen,
    Dot,
    Tilde,
    AndOp,
    OrOp,
    Le,
    Lt,
    EqOp,
    Plus,
    Star,
    Bar,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Tilde => write!(f, "`~`"),
            Tok::AndOp => write!(f, "`/\\`"),
            Tok::OrOp => write!(f, "`\\/`"),
            Tok::Le => write!(f, "`<=`"),
            Tok::Lt => write!(f, "`<`"),
            Tok::EqOp => write!(f, "`=`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Bar => write!(f, "`|`"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, FormulaParseError> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i];
        let col = i + 1;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            '.' => {
                out.push((Tok::Dot, col));
                i += 1;
            }
            '~' => {
                out.push((Tok::Tilde, col));
                i += 1;
            }
            '+' => {
                out.push((Tok::Plus, col));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, col));
                i += 1;
            }
            '|' => {
                out.push((Tok::Bar, col));
                i += 1;
            }
            '=' => {
                out.push((Tok::EqOp, col));
                i += 1;
            }
            '<' => {
                if bytes.get(i + 1) == Some(&'=') {
                    out.push((Tok::Le, col));
                    i += 2;
                } else {
                    out.push((Tok::Lt, col));
                    i += 1;
                }
            }
            '/' => {
                if bytes.get(i + 1) == Some(&'\\') {
                    out.push((Tok::AndOp, col));
                    i += 2;
                } else {
                    return Err(FormulaParseError { col, msg: "expected `/\\`".into() });
                }
            }
            '\\' => {
                if bytes.get(i + 1) == Some(&'/') {
                    out.push((Tok::OrOp, col));
                    i += 2;
                } else {
                    return Err(FormulaParseError { col, msg: "expected `\\/`".into() });
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                out.push((Tok::Num(text.parse().unwrap()), start + 1));
            }
            c if c.is_ascii_lowercase() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit()) {
                    i += 1;
                }
                let text: String = bytes[start..i].iter().collect();
                out.push((Tok::Ident(text), start + 1));
            }
            other => {
                return Err(FormulaParseError {
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<(), FormulaParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {want}, found {t}"))),
            None => Err(self.err(format!("expected {want}, found end of input"))),
        }
    }

    fn err(&self, msg: String) -> FormulaParseError {
        FormulaParseError { col: self.col(), msg }
    }

    fn formula(&mut self) -> Result<Formula, FormulaParseError> {
        let mut parts = vec![self.and_expr()?];
        while self.peek() == Some(&Tok::OrOp) {
            self.pos += 1;
            parts.push(self.and_expr()?);
        }
        Ok(Formula::or(parts))
    }

    fn and_expr(&mut self) -> Result<Formula, FormulaParseError> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some(&Tok::AndOp) {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula, FormulaParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Ident(name)) if name == "exists" || name == "forall" => {
                let is_exists = name == "exists";
                self.pos += 1;
                let var = match self.bump() {
                    Some(Tok::Ident(v)) => v,
                    other => {
                        return Err(self.err(match other {
                            Some(t) => format!("expected variable after quantifier, found {t}"),
                            None => "expected variable after quantifier".into(),
                        }))
                    }
                };
                self.expect(&Tok::Dot)?;
                let body = self.formula()?;
                Ok(if is_exists {
                    Formula::exists(&var, body)
                } else {
                    Formula::forall(&var, body)
                })
            }
            Some(Tok::LParen) => {
                // Could open a parenthesized formula or the left term of an
                // atom; try the formula reading first and fall back.
                let save = self.pos;
                self.pos += 1;
                if let Ok(f) = self.formula() {
                    if self.peek() == Some(&Tok::RParen) {
                        // Guard against `(term)` followed by a relation.
                        let after = self.toks.get(self.pos + 1).map(|(t, _)| t);
                        if !matches!(after, Some(Tok::Le | Tok::Lt | Tok::EqOp | Tok::Plus)) {
                            self.pos += 1;
                            return Ok(f);
                        }
                    }
                }
                self.pos = save;
                self.atom()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, FormulaParseError> {
        let lhs = self.term()?;
        match self.peek() {
            Some(Tok::Le) => {
                self.pos += 1;
                let rhs = self.term()?;
                Ok(Formula::Atom(Atom::le(&lhs, &rhs)))
            }
            Some(Tok::Lt) => {
                self.pos += 1;
                let rhs = self.term()?;
                Ok(Formula::Atom(Atom::le(&lhs.add_const(&BigInt::from(1)), &rhs)))
            }
            Some(Tok::EqOp) => {
                self.pos += 1;
                let rhs = self.term()?;
                Ok(Formula::Atom(Atom::eq(&lhs, &rhs)))
            }
            Some(Tok::Bar) => {
                if !lhs.is_constant() || lhs.constant < BigInt::from(2) {
                    return Err(self.err("divisibility modulus must be a constant >= 2".into()));
                }
                self.pos += 1;
                let rhs = self.term()?;
                Ok(Formula::Atom(Atom::Div(lhs.constant, rhs)))
            }
            Some(t) => Err(self.err(format!("expected `<=`, `<`, `=` or `|`, found {t}"))),
            None => Err(self.err("expected a comparison operator".into())),
        }
    }

    fn term(&mut self) -> Result<LinearTerm, FormulaParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            acc = acc.add(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LinearTerm, FormulaParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Star) {
                    if n != BigInt::from(2) {
                        return Err(self.err("only doubling `2*(...)` is supported".into()));
                    }
                    self.pos += 1;
                    self.expect(&Tok::LParen)?;
                    let inner = self.term()?;
                    self.expect(&Tok::RParen)?;
                    Ok(inner.scale(&BigInt::from(2)))
                } else {
                    Ok(LinearTerm::constant(n))
                }
            }
            Some(Tok::Ident(name)) => {
                if name == "exists" || name == "forall" {
                    return Err(self.err("quantifier in term position".into()));
                }
                self.pos += 1;
                Ok(LinearTerm::var(&name))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.term()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            Some(t) => Err(self.err(format!("expected a term, found {t}"))),
            None => Err(self.err("expected a term".into())),
        }
    }
}

/// Parses a formula in the surface grammar and alpha-renames bound variables
/// apart from free ones.
pub fn parse_formula(src: &str) -> Result<Formula, FormulaParseError> {
    let toks = lex(src)?;
    let end_col = src.chars().count() + 1;
    let mut p = Parser { toks, pos: 0, end_col };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(p.err(format!(
            "unexpected trailing input starting with {}",
            p.peek().unwrap()
        )));
    }
    Ok(f.normalize_bound())
}

/// Parses a bare term into its linear normal form.
pub fn parse_term(src: &str) -> Result<LinearTerm, FormulaParseError> {
    let toks = lex(src)?;
    let end_col = src.chars().count() + 1;
    let mut p = Parser { toks, pos: 0, end_col };
    let t = p.term()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input after term".into()));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presburger::{Polarity, Valuation};

    #[test]
    fn spec_header_formula() {
        let f = parse_formula("exists y. x1 = y + y /\\ x2 <= x1").unwrap();
        assert_eq!(f.free_vars().len(), 2);
        // quantifier extends maximally right: one Sigma_1 block
        assert_eq!(f.classify(), (1, Polarity::Sigma));
    }

    #[test]
    fn precedence_not_over_and_over_or() {
        let f = parse_formula("~x <= 0 /\\ y <= 0 \\/ z <= 0").unwrap();
        match f {
            Formula::Or(parts) => {
                assert_eq!(parts.len(), 2);
                assert!(matches!(&parts[0], Formula::And(ps) if matches!(ps[0], Formula::Not(_))));
            }
            other => panic!("expected Or at top, got {other:?}"),
        }
    }

    #[test]
    fn decimal_constants_and_doubling() {
        let f = parse_formula("x < 13").unwrap();
        // x < 13 becomes x + 1 <= 13, i.e. x - 12 <= 0
        let v = |n: i64| Valuation::from_pairs([("x".to_string(), BigInt::from(n))]);
        assert!(f.eval_ground(&v(12)).unwrap());
        assert!(!f.eval_ground(&v(13)).unwrap());
        let g = parse_formula("2*(x + 1) = y").unwrap();
        let mut val = Valuation::new();
        val.set("x", BigInt::from(3));
        val.set("y", BigInt::from(8));
        assert!(g.eval_ground(&val).unwrap());
    }

    #[test]
    fn divisibility_atoms_parse() {
        let f = parse_formula("2 | x + 1").unwrap();
        let v = |n: i64| Valuation::from_pairs([("x".to_string(), BigInt::from(n))]);
        assert!(f.eval_ground(&v(3)).unwrap());
        assert!(!f.eval_ground(&v(2)).unwrap());
        assert!(parse_formula("1 | x").is_err());
        assert!(parse_formula("y | x").is_err());
    }

    #[test]
    fn parenthesized_terms_and_formulas() {
        assert!(parse_formula("(x + 1) <= y").is_ok());
        assert!(parse_formula("(x <= 1) /\\ y = 0").is_ok());
        assert!(parse_formula("(x) <= 1").is_ok());
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_formula("x <= ").unwrap_err();
        assert_eq!(e.col, 6);
        assert!(parse_formula("x ? y").is_err());
        assert!(parse_formula("3*(x) <= 1").is_err());
        assert!(parse_formula("X <= 1").is_err());
    }
}
