//! Recursive-descent parser for the ASCII formula grammar.
//!
//! Precedence, tightest first: unary (`!`, `F`, `G`, `X`, `X^m`, freeze),
//! `U`/`R` (right-associative), `&`, `|`, `->`. The derived operators are
//! expanded during parsing, so the resulting AST only contains the core
//! connectives plus annotated Until.

use super::{Bound, Formula, Interval, IntervalUnion, Rel};
use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormulaError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("identifier `{name}` uses the reserved `$` prefix")]
    ReservedIdent { name: String },
    #[error("formula is not LTL (contains constraints or freeze quantifiers)")]
    NotLtl,
    #[error("formula uses {found} registers, but this engine allows at most {allowed}")]
    RegisterCount { found: usize, allowed: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    True,
    False,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Pipe,
    Amp,
    Bang,
    Arrow,
    Dot,
    Caret,
    UOp,
    ROp,
    FOp,
    GOp,
    XOp,
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    NegInf,
    Inf,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let err = |pos: usize, msg: &str| FormulaError::Syntax {
        pos,
        msg: msg.to_string(),
    };
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '(' => toks.push((start, Tok::LParen)),
            ')' => toks.push((start, Tok::RParen)),
            '[' => toks.push((start, Tok::LBracket)),
            ']' => toks.push((start, Tok::RBracket)),
            ',' => toks.push((start, Tok::Comma)),
            '|' => toks.push((start, Tok::Pipe)),
            '&' => toks.push((start, Tok::Amp)),
            '!' => toks.push((start, Tok::Bang)),
            '.' => toks.push((start, Tok::Dot)),
            '^' => toks.push((start, Tok::Caret)),
            '=' => toks.push((start, Tok::Eq)),
            '<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    toks.push((start, Tok::Le));
                } else {
                    toks.push((start, Tok::Lt));
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 1;
                    toks.push((start, Tok::Ge));
                } else {
                    toks.push((start, Tok::Gt));
                }
            }
            '-' | '+' => {
                if bytes.get(i + 1) == Some(&b'>') && c == '-' {
                    i += 1;
                    toks.push((start, Tok::Arrow));
                } else if text[i + 1..].starts_with("inf") {
                    i += 3;
                    toks.push((start, if c == '-' { Tok::NegInf } else { Tok::Inf }));
                } else if c == '-' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()) {
                    let mut j = i + 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    toks.push((start, Tok::Int(text[i..j].parse().unwrap())));
                    i = j - 1;
                } else {
                    return Err(err(start, "unexpected `-`"));
                }
            }
            '0'..='9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                toks.push((start, Tok::Int(text[i..j].parse().unwrap())));
                i = j - 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' || c == '$' => {
                let mut j = i + 1;
                while j < bytes.len() {
                    let b = bytes[j] as char;
                    if b.is_ascii_alphanumeric() || b == '_' || b == '\'' || b == '$' {
                        j += 1;
                    } else {
                        break;
                    }
                }
                let word = &text[i..j];
                let tok = match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "inf" => Tok::Inf,
                    "U" => Tok::UOp,
                    "R" => Tok::ROp,
                    "F" => Tok::FOp,
                    "G" => Tok::GOp,
                    "X" => Tok::XOp,
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((start, tok));
                i = j - 1;
            }
            _ => return Err(err(start, &format!("unexpected character `{c}`"))),
        }
        i += 1;
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    allow_reserved: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.toks.get(self.pos + n).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn fail<T>(&self, msg: &str) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            pos: self.here(),
            msg: msg.to_string(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), FormulaError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(&format!("expected {what}"))
        }
    }

    fn ident_ok(&self, name: &str) -> Result<(), FormulaError> {
        if name.starts_with('$') && !self.allow_reserved {
            Err(FormulaError::ReservedIdent {
                name: name.to_string(),
            })
        } else {
            Ok(())
        }
    }

    fn implies(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implies()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.and()?;
        if self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            let rhs = self.or()?;
            Ok(Formula::or(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.until()?;
        if self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let rhs = self.and()?;
            Ok(Formula::and(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn until(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::UOp) => {
                self.pos += 1;
                let ann = self.try_annotation()?;
                let rhs = self.until()?;
                Ok(match ann {
                    Some(iv) => Formula::until_in(lhs, iv, rhs),
                    None => Formula::until(lhs, rhs),
                })
            }
            Some(Tok::ROp) => {
                self.pos += 1;
                let rhs = self.until()?;
                Ok(Formula::release(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::FOp) => {
                self.pos += 1;
                let ann = self.try_annotation()?;
                let f = self.unary()?;
                Ok(match ann {
                    Some(iv) => Formula::finally_in(iv, f),
                    None => Formula::finally(f),
                })
            }
            Some(Tok::GOp) => {
                self.pos += 1;
                let ann = self.try_annotation()?;
                let f = self.unary()?;
                Ok(match ann {
                    Some(iv) => Formula::globally_in(iv, f),
                    None => Formula::globally(f),
                })
            }
            Some(Tok::XOp) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Caret) {
                    self.pos += 1;
                    let n = match self.bump() {
                        Some(Tok::Int(n)) if n >= BigInt::from(0) => n,
                        _ => return self.fail("expected a natural number after `^`"),
                    };
                    let n: u64 = n.try_into().map_err(|_| FormulaError::Syntax {
                        pos: self.here(),
                        msg: "exponent too large".to_string(),
                    })?;
                    let f = self.unary()?;
                    return Ok(Formula::next_n(n, f));
                }
                let ann = self.try_annotation()?;
                let f = self.unary()?;
                Ok(match ann {
                    Some(iv) => Formula::until_in(Formula::ff(), iv, f),
                    None => Formula::next(f),
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        match self.bump() {
            Some(Tok::True) => Ok(Formula::True),
            Some(Tok::False) => Ok(Formula::ff()),
            Some(Tok::LParen) => {
                let f = self.implies()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => match self.peek() {
                Some(Tok::Dot) => {
                    self.ident_ok(&name)?;
                    self.pos += 1;
                    self.expect(Tok::LParen, "`(` after freeze quantifier")?;
                    let body = self.implies()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Formula::Freeze(name, Box::new(body)))
                }
                Some(rel @ (Tok::Lt | Tok::Le | Tok::Eq | Tok::Ge | Tok::Gt)) => {
                    self.ident_ok(&name)?;
                    let rel = match rel {
                        Tok::Lt => Rel::Lt,
                        Tok::Le => Rel::Le,
                        Tok::Eq => Rel::Eq,
                        Tok::Ge => Rel::Ge,
                        _ => Rel::Gt,
                    };
                    self.pos += 1;
                    match self.bump() {
                        Some(Tok::Int(c)) => Ok(Formula::Constraint(name, rel, c)),
                        _ => self.fail("expected an integer constant in constraint"),
                    }
                }
                _ => {
                    self.ident_ok(&name)?;
                    Ok(Formula::Prop(name))
                }
            },
            _ => self.fail("expected a formula"),
        }
    }

    /// Recognizes an optional interval annotation after `U`, `F`, `G`, `X`.
    fn try_annotation(&mut self) -> Result<Option<IntervalUnion>, FormulaError> {
        match self.peek() {
            Some(Tok::LBracket) => {
                self.pos += 1;
                if let Some(rel @ (Tok::Lt | Tok::Le | Tok::Eq | Tok::Ge | Tok::Gt)) = self.peek() {
                    // pseudo-arithmetic shorthand like [=2] or [>=3]
                    let rel = rel.clone();
                    self.pos += 1;
                    let c = match self.bump() {
                        Some(Tok::Int(c)) => c,
                        _ => return self.fail("expected an integer in annotation"),
                    };
                    self.expect(Tok::RBracket, "`]`")?;
                    let iv = match rel {
                        Tok::Eq => Interval::singleton(c),
                        Tok::Lt => Interval {
                            lo: Bound::Unbounded,
                            hi: Bound::Excl(c),
                        },
                        Tok::Le => Interval {
                            lo: Bound::Unbounded,
                            hi: Bound::Incl(c),
                        },
                        Tok::Gt => Interval {
                            lo: Bound::Excl(c),
                            hi: Bound::Unbounded,
                        },
                        _ => Interval {
                            lo: Bound::Incl(c),
                            hi: Bound::Unbounded,
                        },
                    };
                    return Ok(Some(IntervalUnion(vec![iv])));
                }
                let iv = self.interval_body(false)?;
                Ok(Some(IntervalUnion(vec![iv])))
            }
            Some(Tok::LParen) => match self.peek_at(1) {
                Some(Tok::Int(_) | Tok::NegInf) => {
                    // a single interval with an open lower end, e.g. (-inf,5]
                    self.pos += 1;
                    let iv = self.interval_body(true)?;
                    Ok(Some(IntervalUnion(vec![iv])))
                }
                Some(Tok::LBracket) => self.union().map(Some),
                Some(Tok::LParen) if matches!(self.peek_at(2), Some(Tok::Int(_) | Tok::NegInf)) => {
                    self.union().map(Some)
                }
                _ => Ok(None),
            },
            _ => Ok(None),
        }
    }

    /// `( interval | interval | ... )`
    fn union(&mut self) -> Result<IntervalUnion, FormulaError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut parts = Vec::new();
        loop {
            let open = match self.bump() {
                Some(Tok::LBracket) => false,
                Some(Tok::LParen) => true,
                _ => return self.fail("expected an interval"),
            };
            parts.push(self.interval_body(open)?);
            match self.bump() {
                Some(Tok::Pipe) => continue,
                Some(Tok::RParen) => break,
                _ => return self.fail("expected `|` or `)` in interval union"),
            }
        }
        Ok(IntervalUnion(parts))
    }

    /// Bounds and the closing token, after the opening `[`/`(` was consumed.
    fn interval_body(&mut self, lo_open: bool) -> Result<Interval, FormulaError> {
        let lo = match self.bump() {
            Some(Tok::NegInf) => Bound::Unbounded,
            Some(Tok::Int(v)) => {
                if lo_open {
                    Bound::Excl(v)
                } else {
                    Bound::Incl(v)
                }
            }
            _ => return self.fail("expected an interval lower bound"),
        };
        self.expect(Tok::Comma, "`,`")?;
        let hi_val = match self.bump() {
            Some(Tok::Inf) => None,
            Some(Tok::Int(v)) => Some(v),
            _ => return self.fail("expected an interval upper bound"),
        };
        let hi = match (self.bump(), hi_val) {
            (Some(Tok::RBracket), Some(v)) => Bound::Incl(v),
            (Some(Tok::RParen), Some(v)) => Bound::Excl(v),
            (Some(Tok::RBracket | Tok::RParen), None) => Bound::Unbounded,
            _ => return self.fail("expected `]` or `)`"),
        };
        let iv = Interval { lo, hi };
        if iv.is_empty() {
            return self.fail("interval contains no integers");
        }
        Ok(iv)
    }
}

/// Parses a formula; identifiers starting with `$` are reserved for
/// generated registers and rejected.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    parse_inner(text, false)
}

/// Like [`parse`] but accepting `$`-prefixed identifiers; used to reload
/// formulas printed after desugaring.
pub fn parse_trusted(text: &str) -> Result<Formula, FormulaError> {
    parse_inner(text, true)
}

fn parse_inner(text: &str, allow_reserved: bool) -> Result<Formula, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        allow_reserved,
    };
    let f = p.implies()?;
    if p.pos != p.toks.len() {
        return p.fail("unexpected trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    #[test]
    fn freeze_until_constraints() {
        let f = parse("x.(p U (q & x >= 2 & x < 3))").unwrap();
        let expect = Formula::freeze(
            "x",
            Formula::until(
                Formula::prop("p"),
                Formula::and(
                    Formula::prop("q"),
                    Formula::and(
                        Formula::constraint("x", Rel::Ge, 2),
                        Formula::constraint("x", Rel::Lt, 3),
                    ),
                ),
            ),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn pseudo_arithmetic_annotation() {
        let f = parse("F[=2] p").unwrap();
        let expect = Formula::finally_in(
            IntervalUnion(vec![Interval::closed(2, 2)]),
            Formula::prop("p"),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn end_of_word_detector() {
        let f = parse("!X true").unwrap();
        assert_eq!(
            f,
            Formula::not(Formula::until(Formula::ff(), Formula::True))
        );
    }

    #[test]
    fn annotation_vs_parenthesized_operand() {
        // parenthesized operand, not an annotation
        let f = parse("F (p | q)").unwrap();
        assert_eq!(
            f,
            Formula::finally(Formula::or(Formula::prop("p"), Formula::prop("q")))
        );
        let f = parse("F ((p))").unwrap();
        assert_eq!(f, Formula::finally(Formula::prop("p")));
        // open-lower single interval
        let f = parse("F(-inf,5] p").unwrap();
        assert_eq!(
            f,
            Formula::finally_in(
                IntervalUnion(vec![Interval {
                    lo: Bound::Unbounded,
                    hi: Bound::Incl(BigInt::from(5)),
                }]),
                Formula::prop("p")
            )
        );
        // union of open intervals
        let f = parse("F((1,3)|(5,8)) p").unwrap();
        match f {
            Formula::Until(_, _) => panic!("lost annotation"),
            Formula::UntilAnnotated(_, iv, _) => assert_eq!(iv.0.len(), 2),
            _ => panic!("unexpected shape"),
        }
    }

    #[test]
    fn iterated_next() {
        let f = parse("X^3 p").unwrap();
        assert_eq!(f, Formula::next_n(3, Formula::prop("p")));
        assert_eq!(parse("X^0 p").unwrap(), Formula::prop("p"));
    }

    #[test]
    fn precedence() {
        // unary > U/R > & > | > ->
        let f = parse("!p U q & r | s -> t").unwrap();
        let expect = Formula::implies(
            Formula::or(
                Formula::and(
                    Formula::until(Formula::not(Formula::prop("p")), Formula::prop("q")),
                    Formula::prop("r"),
                ),
                Formula::prop("s"),
            ),
            Formula::prop("t"),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn right_associative_until() {
        let f = parse("p U q U r").unwrap();
        assert_eq!(
            f,
            Formula::until(
                Formula::prop("p"),
                Formula::until(Formula::prop("q"), Formula::prop("r"))
            )
        );
    }

    #[test]
    fn rejects_reserved_and_garbage() {
        assert!(matches!(
            parse("$u0.(p)"),
            Err(FormulaError::ReservedIdent { .. })
        ));
        assert!(matches!(parse("p U"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse("(p"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse("p q"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(
            parse("F[3,1] p"),
            Err(FormulaError::Syntax { .. })
        ));
        assert!(matches!(
            parse("F(2,3) p"),
            Err(FormulaError::Syntax { .. })
        ));
    }

    #[test]
    fn negative_constants() {
        let f = parse("x <= -3").unwrap();
        assert_eq!(f, Formula::constraint("x", Rel::Le, -3));
        let f = parse("p U[-5,-2] q").unwrap();
        match f {
            Formula::UntilAnnotated(_, iv, _) => {
                assert!(iv.contains(&BigInt::from(-3)));
                assert!(!iv.contains(&BigInt::from(-1)));
            }
            _ => panic!(),
        }
    }
}
