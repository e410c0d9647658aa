use std::sync::Arc;

use super::poly::{Coefficients, Laurent};
use super::prime::reduce_signed;
use super::vars::VarSpec;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(i128),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Token::Plus)),
            '-' => out.push((start, Token::Minus)),
            '*' => out.push((start, Token::Star)),
            '^' => out.push((start, Token::Caret)),
            '(' => out.push((start, Token::LParen)),
            ')' => out.push((start, Token::RParen)),
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                let v = digits.parse::<i128>().map_err(|_| {
                    Error::Parse(format!("integer `{digits}` at offset {start} is too large"))
                })?;
                out.push((start, Token::Int(v)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character `{other}` at offset {start} in `{text}`"
                )))
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error_here(&self, what: &str) -> Error {
        match self.tokens.get(self.pos) {
            Some((off, tok)) => Error::Parse(format!(
                "{what}: unexpected token {} at offset {off} in `{}`",
                describe(tok),
                self.text
            )),
            None => Error::Parse(format!("{what}: unexpected end of input in `{}`", self.text)),
        }
    }

    fn signed_int(&mut self) -> Result<i128> {
        let mut sign = 1;
        let mut parens = false;
        if self.peek() == Some(&Token::LParen) {
            self.pos += 1;
            parens = true;
        }
        match self.peek() {
            Some(Token::Minus) => {
                sign = -1;
                self.pos += 1;
            }
            Some(Token::Plus) => self.pos += 1,
            _ => {}
        }
        let v = match self.peek() {
            Some(Token::Int(v)) => *v,
            _ => return Err(self.error_here("expected exponent")),
        };
        self.pos += 1;
        if parens {
            if self.peek() != Some(&Token::RParen) {
                return Err(self.error_here("expected `)`"));
            }
            self.pos += 1;
        }
        Ok(sign * v)
    }
}

fn describe(tok: &Token) -> String {
    match tok {
        Token::Int(v) => format!("`{v}`"),
        Token::Ident(s) => format!("`{s}`"),
        Token::Plus => "`+`".into(),
        Token::Minus => "`-`".into(),
        Token::Star => "`*`".into(),
        Token::Caret => "`^`".into(),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
    }
}

impl<C: Coefficients> Laurent<C> {
    /// Parses `2*s^4 + s^2 - 3*w^-5`-style text. Integer coefficients are
    /// reduced into the coefficient ring.
    pub fn parse(text: &str, p: u64, vars: &Arc<VarSpec>) -> Result<Self> {
        let modulus = C::modulus(p);
        let mut parser = Parser {
            text,
            tokens: tokenize(text)?,
            pos: 0,
        };
        if parser.tokens.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut out = Self::zero(p, vars);
        let mut first = true;
        while parser.pos < parser.tokens.len() {
            let mut sign: i128 = 1;
            match parser.peek() {
                Some(Token::Plus) => parser.pos += 1,
                Some(Token::Minus) => {
                    sign = -1;
                    parser.pos += 1;
                }
                _ if first => {}
                _ => return Err(parser.error_here("expected `+` or `-`")),
            }
            first = false;
            let mut coeff: i128 = sign;
            let mut exps = vec![0i32; vars.len()];
            loop {
                match parser.next() {
                    Some((_, Token::Int(v))) => {
                        coeff = coeff.checked_mul(v).ok_or_else(|| {
                            Error::Parse(format!("coefficient overflow in `{text}`"))
                        })? % (modulus as i128);
                    }
                    Some((off, Token::Ident(name))) => {
                        let idx = vars.index_of(&name).ok_or_else(|| {
                            Error::Parse(format!(
                                "unknown variable `{name}` at offset {off} in `{text}`"
                            ))
                        })?;
                        let mut e: i128 = 1;
                        if parser.peek() == Some(&Token::Caret) {
                            parser.pos += 1;
                            e = parser.signed_int()?;
                        }
                        let e = i32::try_from(e)
                            .ok()
                            .and_then(|e| exps[idx].checked_add(e))
                            .ok_or_else(|| Error::Parse(format!("exponent overflow in `{text}`")))?;
                        exps[idx] = e;
                    }
                    _ => {
                        parser.pos -= 1;
                        return Err(parser.error_here("expected coefficient or variable"));
                    }
                }
                if parser.peek() == Some(&Token::Star) {
                    parser.pos += 1;
                } else {
                    break;
                }
            }
            vars.check_exponents(&exps)?;
            out.add_term(
                super::vars::Monomial::from_exponents(&exps),
                reduce_signed(coeff, modulus),
            );
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{LaurentPoly, LaurentPoly2};

    #[test]
    fn parses_and_reemits() {
        let v = VarSpec::new(&["s", "w"], &["w"]).unwrap();
        let f = LaurentPoly::parse("s^2 + 2*s^4", 3, &v).unwrap();
        assert_eq!(f.to_string(), "2*s^4 + s^2");
        let g = LaurentPoly2::parse("w^-3 - 3*w^-5", 3, &v).unwrap();
        assert_eq!(g.to_string(), "w^-3 + 6*w^-5");
        let h = LaurentPoly::parse("-1 + 4*s*w^(-2) + s*w^-2", 5, &v).unwrap();
        assert_eq!(h.to_string(), "4");
        assert_eq!(LaurentPoly::parse("0", 3, &v).unwrap().to_string(), "0");
    }

    #[test]
    fn rejects_malformed_input() {
        let v = VarSpec::polynomial(&["t"]).unwrap();
        let err = LaurentPoly::parse("t^2 + x", 3, &v).unwrap_err();
        assert!(err.to_string().contains("`x`"), "{err}");
        let err = LaurentPoly::parse("t^ * 2", 3, &v).unwrap_err();
        assert!(err.to_string().contains("`*`"), "{err}");
        let err = LaurentPoly::parse("t $ 1", 3, &v).unwrap_err();
        assert!(err.to_string().contains("`$`"), "{err}");
        assert!(matches!(
            LaurentPoly::parse("t^-1", 3, &v),
            Err(Error::NegativeExponent { .. })
        ));
        assert!(LaurentPoly::parse("", 3, &v).is_err());
        assert!(LaurentPoly::parse("2 3", 3, &v).is_err());
    }
}
