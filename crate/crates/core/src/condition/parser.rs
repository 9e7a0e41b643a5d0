//! Recursive-descent parser for the condition grammar.
//!
//! Precedence, loosest first: `or`, `and`, `not`, then atoms. Atoms are
//! comparisons (`term op literal`), `contains(column, "s")`, `column in
//! [literals]`, `column is null`, and parenthesized expressions. A term is a
//! column identifier or `year(column)`.

use thiserror::Error;

use super::{CompareOp, ConditionExpr, Literal, Term};
use crate::decimal::Decimal;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        offset,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Op(CompareOp),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Minus,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Op(op) => format!("`{}`", op.symbol()),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::LBracket => "`[`".to_string(),
            Tok::RBracket => "`]`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::Minus => "`-`".to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

struct Lexeme {
    tok: Tok,
    offset: usize,
}

fn lex(input: &str) -> Result<Vec<Lexeme>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'(' => {
                out.push(Lexeme {
                    tok: Tok::LParen,
                    offset: start,
                });
                i += 1;
            }
            b')' => {
                out.push(Lexeme {
                    tok: Tok::RParen,
                    offset: start,
                });
                i += 1;
            }
            b'[' => {
                out.push(Lexeme {
                    tok: Tok::LBracket,
                    offset: start,
                });
                i += 1;
            }
            b']' => {
                out.push(Lexeme {
                    tok: Tok::RBracket,
                    offset: start,
                });
                i += 1;
            }
            b',' => {
                out.push(Lexeme {
                    tok: Tok::Comma,
                    offset: start,
                });
                i += 1;
            }
            b'-' => {
                out.push(Lexeme {
                    tok: Tok::Minus,
                    offset: start,
                });
                i += 1;
            }
            b'=' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    out.push(Lexeme {
                        tok: Tok::Op(CompareOp::Eq),
                        offset: start,
                    });
                    i += 2;
                } else {
                    return err(start, "expected `==`");
                }
            }
            b'!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    out.push(Lexeme {
                        tok: Tok::Op(CompareOp::Ne),
                        offset: start,
                    });
                    i += 2;
                } else {
                    return err(start, "expected `!=`");
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    out.push(Lexeme {
                        tok: Tok::Op(CompareOp::Le),
                        offset: start,
                    });
                    i += 2;
                } else {
                    out.push(Lexeme {
                        tok: Tok::Op(CompareOp::Lt),
                        offset: start,
                    });
                    i += 1;
                }
            }
            b'>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    out.push(Lexeme {
                        tok: Tok::Op(CompareOp::Ge),
                        offset: start,
                    });
                    i += 2;
                } else {
                    out.push(Lexeme {
                        tok: Tok::Op(CompareOp::Gt),
                        offset: start,
                    });
                    i += 1;
                }
            }
            b'"' => {
                let mut value = String::new();
                i += 1;
                loop {
                    match bytes.get(i) {
                        None => return err(start, "unterminated string literal"),
                        Some(b'"') => {
                            i += 1;
                            break;
                        }
                        Some(b'\\') => match bytes.get(i + 1) {
                            Some(b'"') => {
                                value.push('"');
                                i += 2;
                            }
                            Some(b'\\') => {
                                value.push('\\');
                                i += 2;
                            }
                            _ => return err(i, "unsupported escape sequence"),
                        },
                        Some(_) => {
                            // Consume one UTF-8 scalar value.
                            let rest = &input[i..];
                            let c = rest.chars().next().unwrap();
                            value.push(c);
                            i += c.len_utf8();
                        }
                    }
                }
                out.push(Lexeme {
                    tok: Tok::Str(value),
                    offset: start,
                });
            }
            b'0'..=b'9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                out.push(Lexeme {
                    tok: Tok::Number(input[i..j].to_string()),
                    offset: start,
                });
                i = j;
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push(Lexeme {
                    tok: Tok::Ident(input[i..j].to_string()),
                    offset: start,
                });
                i = j;
            }
            _ => {
                let c = input[i..].chars().next().unwrap();
                return err(start, format!("unexpected character `{c}`"));
            }
        }
    }
    out.push(Lexeme {
        tok: Tok::Eof,
        offset: input.len(),
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexeme>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].offset
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if self.is_keyword(word) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            err(
                self.offset(),
                format!(
                    "expected {}, found {}",
                    tok.describe(),
                    self.peek().describe()
                ),
            )
        }
    }

    fn or_expr(&mut self) -> Result<ConditionExpr, ParseError> {
        let first = self.and_expr()?;
        if !self.is_keyword("or") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_keyword("or") {
            items.push(self.and_expr()?);
        }
        Ok(ConditionExpr::Or(items))
    }

    fn and_expr(&mut self) -> Result<ConditionExpr, ParseError> {
        let first = self.unary()?;
        if !self.is_keyword("and") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_keyword("and") {
            items.push(self.unary()?);
        }
        Ok(ConditionExpr::And(items))
    }

    fn unary(&mut self) -> Result<ConditionExpr, ParseError> {
        if self.eat_keyword("not") {
            let inner = self.unary()?;
            return Ok(ConditionExpr::Not(Box::new(inner)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ConditionExpr, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.or_expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(word) if word == "contains" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let column = self.ident("column name")?;
                self.expect(Tok::Comma)?;
                let needle = match self.bump() {
                    Tok::Str(s) => s,
                    other => {
                        return err(
                            self.toks[self.pos - 1].offset,
                            format!(
                                "contains() needs a string literal, found {}",
                                other.describe()
                            ),
                        )
                    }
                };
                self.expect(Tok::RParen)?;
                Ok(ConditionExpr::Contains { column, needle })
            }
            Tok::Ident(word) if word == "year" && self.next_is_lparen() => {
                self.bump();
                self.expect(Tok::LParen)?;
                let column = self.ident("column name")?;
                self.expect(Tok::RParen)?;
                let term = Term::YearOf(column);
                let op = match self.bump() {
                    Tok::Op(op) => op,
                    other => {
                        return err(
                            self.toks[self.pos - 1].offset,
                            format!(
                                "expected a comparison after year(), found {}",
                                other.describe()
                            ),
                        )
                    }
                };
                let literal = self.literal()?;
                Ok(ConditionExpr::Compare { term, op, literal })
            }
            Tok::Ident(word) if self.is_reserved(&word) => err(
                self.offset(),
                format!("keyword `{word}` cannot start a predicate"),
            ),
            Tok::Ident(_) => {
                let column = self.ident("column name")?;
                self.column_postfix(column)
            }
            other => err(
                self.offset(),
                format!("expected a predicate, found {}", other.describe()),
            ),
        }
    }

    fn column_postfix(&mut self, column: String) -> Result<ConditionExpr, ParseError> {
        match self.peek().clone() {
            Tok::Op(op) => {
                self.bump();
                let literal = self.literal()?;
                Ok(ConditionExpr::Compare {
                    term: Term::Column(column),
                    op,
                    literal,
                })
            }
            Tok::Ident(word) if word == "in" => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let mut values = vec![self.literal()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    values.push(self.literal()?);
                }
                self.expect(Tok::RBracket)?;
                Ok(ConditionExpr::InSet { column, values })
            }
            Tok::Ident(word) if word == "is" => {
                self.bump();
                if self.eat_keyword("null") {
                    Ok(ConditionExpr::IsNull { column })
                } else {
                    err(
                        self.offset(),
                        format!(
                            "expected `null` after `is`, found {}",
                            self.peek().describe()
                        ),
                    )
                }
            }
            other => err(
                self.offset(),
                format!(
                    "expected a comparison, `in`, or `is null` after `{column}`, found {}",
                    other.describe()
                ),
            ),
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Str(s) => Ok(Literal::Text(s)),
            Tok::Number(n) => self.number_literal(&n, offset, false),
            Tok::Minus => {
                let offset = self.offset();
                match self.bump() {
                    Tok::Number(n) => self.number_literal(&n, offset, true),
                    other => err(
                        offset,
                        format!("expected a number after `-`, found {}", other.describe()),
                    ),
                }
            }
            other => err(
                offset,
                format!("expected a literal, found {}", other.describe()),
            ),
        }
    }

    fn number_literal(
        &self,
        digits: &str,
        offset: usize,
        negative: bool,
    ) -> Result<Literal, ParseError> {
        let text = if negative {
            format!("-{digits}")
        } else {
            digits.to_string()
        };
        match text.parse::<Decimal>() {
            Ok(n) => Ok(Literal::Number(n)),
            Err(e) => err(offset, e.reason),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Ident(s) if !self.is_reserved(&s) => Ok(s),
            Tok::Ident(s) => err(offset, format!("keyword `{s}` cannot be used as a {what}")),
            other => err(
                offset,
                format!("expected a {what}, found {}", other.describe()),
            ),
        }
    }

    fn is_reserved(&self, word: &str) -> bool {
        matches!(
            word,
            "and" | "or" | "not" | "in" | "contains" | "is" | "null"
        )
    }

    fn next_is_lparen(&self) -> bool {
        self.toks
            .get(self.pos + 1)
            .map(|l| l.tok == Tok::LParen)
            .unwrap_or(false)
    }
}

/// Parse a condition string into an AST. Errors carry the byte offset of the
/// offending token.
pub fn parse_condition(text: &str) -> Result<ConditionExpr, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0 };
    let expr = parser.or_expr()?;
    if *parser.peek() != Tok::Eof {
        return err(
            parser.offset(),
            format!("unexpected {} after expression", parser.peek().describe()),
        );
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_in_set() {
        let expr = parse_condition("region in [\"Federal\",\"Saskatchewan\"]").unwrap();
        assert_eq!(
            expr,
            ConditionExpr::InSet {
                column: "region".to_string(),
                values: vec![
                    Literal::Text("Federal".to_string()),
                    Literal::Text("Saskatchewan".to_string()),
                ],
            }
        );
    }

    #[test]
    fn parses_not_contains() {
        let expr = parse_condition("not contains(donor_full_name, \"Estate of\")").unwrap();
        assert_eq!(
            expr,
            ConditionExpr::Not(Box::new(ConditionExpr::Contains {
                column: "donor_full_name".to_string(),
                needle: "Estate of".to_string(),
            }))
        );
    }

    #[test]
    fn malformed_input_reports_offset() {
        let e = parse_condition("year(date) > 2000 and (").unwrap_err();
        assert_eq!(e.offset, 23);
        let e = parse_condition("region ==").unwrap_err();
        assert_eq!(e.offset, 9);
    }

    #[test]
    fn precedence_binds_and_tighter_than_or() {
        let expr = parse_condition("a == 1 and b == 2 or c == 3").unwrap();
        match expr {
            ConditionExpr::Or(items) => {
                assert_eq!(items.len(), 2);
                assert!(matches!(items[0], ConditionExpr::And(_)));
            }
            other => panic!("expected or at top, got {other:?}"),
        }
    }

    #[test]
    fn year_without_parens_is_a_column() {
        let expr = parse_condition("year > 2000").unwrap();
        assert_eq!(
            expr,
            ConditionExpr::Compare {
                term: Term::Column("year".to_string()),
                op: CompareOp::Gt,
                literal: Literal::Number(Decimal::from_int(2000)),
            }
        );
    }

    #[test]
    fn negative_numbers_and_escapes() {
        let expr =
            parse_condition("delta >= -5.25 and contains(name, \"say \\\"hi\\\"\")").unwrap();
        let printed = expr.to_string();
        assert_eq!(parse_condition(&printed).unwrap(), expr);
    }

    #[test]
    fn pretty_print_reparses_identically() {
        for text in [
            "region in [\"Federal\", \"Saskatchewan\"]",
            "not (contains(donor_full_name, \"Estate of\"))",
            "year(date) > 2000 and (region == \"Federal\" or amount <= 1675.5)",
            "a is null or not (b is null) or c != -2",
        ] {
            let once = parse_condition(text).unwrap();
            let twice = parse_condition(&once.to_string()).unwrap();
            assert_eq!(once, twice, "for input {text}");
        }
    }
}
