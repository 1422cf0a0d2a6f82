//! Recursive-descent parser for class expressions and `SubClassOf` axioms.
//!
//! ```text
//! expr    := term ('and' term)*
//! term    := '(' expr ')'
//!          | NAME 'some' '(' expr ')'
//!          | NAME 'some' NAME
//!          | NAME facet
//!          | NAME
//! facet   := ('min' | 'max' | 'value') literal
//! literal := NUMBER | 'true' | 'false' | QUOTED_STRING | NAME
//! axiom   := expr 'SubClassOf' expr
//! ```
//!
//! Keywords are case-insensitive and cannot be used as names.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::ast::{Axiom, ClassExpr, Facet, FacetKind, Literal, Name, Span};

const KEYWORDS: [&str; 8] = ["and", "some", "min", "max", "value", "subclassof", "true", "false"];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(word))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Error)]
#[error("{line}:{column}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    fn at(input: &str, offset: usize, expected: impl Into<String>, found: impl Into<String>) -> Self {
        let (line, column) = line_col(input, offset);
        ParseError { offset, line, column, expected: expected.into(), found: found.into() }
    }

    /// Moves the error into a larger document where `input` starts at
    /// `offset` on line `line` (1-based) and column `column`.
    pub fn relocate(mut self, line: usize, column: usize, offset: usize) -> Self {
        if self.line == 1 {
            self.column += column - 1;
        }
        self.line += line - 1;
        self.offset += offset;
        self
    }
}

/// Errors from [`parse_axiom`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Error)]
pub enum AxiomError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{line}:{column}: axiom head must be a class name or `property some Class`")]
    IllegalHeadShape { offset: usize, line: usize, column: usize },
}

/// 1-based line and column (in characters) of a byte offset.
pub fn line_col(input: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(input.len());
    let before = &input[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map(|i| i + 1).unwrap_or(0);
    (line, before[line_start..].chars().count() + 1)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Number(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(input: &str) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        match c {
            b'(' => {
                out.push((Tok::LParen, Span::new(i, i + 1)));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, Span::new(i, i + 1)));
                i += 1;
            }
            b'"' => {
                i += 1;
                let mut text = String::new();
                loop {
                    let Some(ch) = input[i..].chars().next() else {
                        return Err(ParseError::at(input, start, "closing `\"`", "end of input"));
                    };
                    i += ch.len_utf8();
                    match ch {
                        '"' => break,
                        '\\' => {
                            let esc = input[i..].chars().next();
                            let mapped = match esc {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                _ => {
                                    return Err(ParseError::at(
                                        input,
                                        i - 1,
                                        "escape sequence (\\\", \\\\, \\n, \\t)",
                                        format!("`\\{}`", esc.map(String::from).unwrap_or_default()),
                                    ))
                                }
                            };
                            i += esc.map(char::len_utf8).unwrap_or(0);
                            text.push(mapped);
                        }
                        ch => text.push(ch),
                    }
                }
                out.push((Tok::Str(text), Span::new(start, i)));
            }
            b'-' | b'0'..=b'9' => {
                i += 1;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || matches!(bytes[i], b'.' | b'_'))
                    || (i < bytes.len() && matches!(bytes[i], b'+' | b'-') && matches!(bytes[i - 1], b'e' | b'E'))
                {
                    i += 1;
                }
                out.push((Tok::Number(input[start..i].to_string()), Span::new(start, i)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(input[start..i].to_string()), Span::new(start, i)));
            }
            _ => {
                let ch = input[i..].chars().next().unwrap_or('?');
                return Err(ParseError::at(input, i, "a name, number, string, `(` or `)`", format!("`{ch}`")));
            }
        }
    }
    out.push((Tok::Eof, Span::new(input.len(), input.len())));
    Ok(out)
}

struct Parser<'a> {
    input: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Result<Self, ParseError> {
        Ok(Parser { input, toks: lex(input)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::at(self.input, self.span().start, expected, self.peek().to_string())
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s.eq_ignore_ascii_case(kw))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn expr(&mut self) -> Result<ClassExpr, ParseError> {
        let mut terms = vec![self.term()?];
        while self.at_keyword("and") {
            self.bump();
            terms.push(self.term()?);
        }
        Ok(ClassExpr::and(terms))
    }

    fn name(&mut self, expected: &str) -> Result<Name, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let (tok, span) = self.bump();
                let Tok::Ident(text) = tok else { unreachable!() };
                Ok(Name { text, span })
            }
            _ => Err(self.error(expected)),
        }
    }

    fn term(&mut self) -> Result<ClassExpr, ParseError> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let inner = self.expr()?;
            self.expect(Tok::RParen, "`and` or `)`")?;
            return Ok(inner);
        }
        let name = self.name("a class name, a property name or `(`")?;
        if self.at_keyword("some") {
            self.bump();
            let filler = if *self.peek() == Tok::LParen {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`and` or `)`")?;
                inner
            } else {
                ClassExpr::Named(self.name("`(` or a class name after `some`")?)
            };
            return Ok(ClassExpr::ObjectSome { property: name, filler: Box::new(filler) });
        }
        let kind = if self.at_keyword("min") {
            Some(FacetKind::Min)
        } else if self.at_keyword("max") {
            Some(FacetKind::Max)
        } else if self.at_keyword("value") {
            Some(FacetKind::Value)
        } else {
            None
        };
        match kind {
            Some(kind) => {
                self.bump();
                let span = self.span();
                let literal = self.literal()?;
                Ok(ClassExpr::DataSome { property: name, facet: Facet { kind, literal, span } })
            }
            None => Ok(ClassExpr::Named(name)),
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let expected = "a number, `true`, `false`, a quoted string or a name";
        let lit = match self.peek() {
            Tok::Number(text) => parse_number(text).ok_or_else(|| self.error(expected))?,
            Tok::Str(s) => Literal::Str(s.clone()),
            Tok::Ident(s) if s.eq_ignore_ascii_case("true") => Literal::Bool(true),
            Tok::Ident(s) if s.eq_ignore_ascii_case("false") => Literal::Bool(false),
            Tok::Ident(s) if !is_keyword(s) => Literal::Symbol(s.clone()),
            _ => return Err(self.error(expected)),
        };
        self.bump();
        Ok(lit)
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("`and` or end of input"))
        }
    }
}

/// Integers without `.`/exponent; everything else must be a finite double.
pub fn parse_number(text: &str) -> Option<Literal> {
    if !text.contains(['.', 'e', 'E']) {
        return text.parse::<i64>().ok().map(Literal::Int);
    }
    let digits = text.strip_prefix('-').unwrap_or(text);
    if !digits.starts_with(|c: char| c.is_ascii_digit()) {
        return None;
    }
    text.parse::<f64>().ok().filter(|v| v.is_finite()).map(Literal::Double)
}

pub fn parse_expr(text: &str) -> Result<ClassExpr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_axiom(text: &str) -> Result<Axiom, AxiomError> {
    let mut p = Parser::new(text)?;
    let lhs = p.expr()?;
    if !p.at_keyword("subclassof") {
        return Err(p.error("`and` or `SubClassOf`").into());
    }
    p.bump();
    let head_start = p.span().start;
    let rhs = p.expr()?;
    p.finish()?;
    let axiom = Axiom { lhs, rhs };
    if !axiom.head_is_legal() {
        let (line, column) = line_col(text, head_start);
        return Err(AxiomError::IllegalHeadShape { offset: head_start, line, column });
    }
    Ok(axiom)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const RULE1_BODY: &str = "AssessmentDecision and (isassessedBy some ( TargetEngagement and \
        (hasTargetAISystem some ( TargetAISystem and isValidatedBy some ( DataQualityMetric and \
        (hasDataQuality max 0.5)))) and (isProducingEffect some CollateralDamage)))";

    #[test]
    fn single_name() {
        assert_eq!(parse_expr("Effect").unwrap(), ClassExpr::named("Effect"));
        assert_eq!(parse_expr("((Effect))").unwrap(), ClassExpr::named("Effect"));
    }

    #[test]
    fn conjunctions_flatten() {
        let nested = parse_expr("A and (B and C)").unwrap();
        let flat = parse_expr("A and B and C").unwrap();
        assert_eq!(nested, flat);
        assert_eq!(
            flat,
            ClassExpr::And(vec![ClassExpr::named("A"), ClassExpr::named("B"), ClassExpr::named("C")])
        );
    }

    #[test]
    fn rule_one_body_shape() {
        let e = parse_expr(RULE1_BODY).unwrap();
        let ClassExpr::And(parts) = &e else { panic!("{e:?}") };
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], ClassExpr::named("AssessmentDecision"));
        let ClassExpr::ObjectSome { property, filler } = &parts[1] else { panic!() };
        assert_eq!(property.text, "isassessedBy");
        let ClassExpr::And(inner) = &**filler else { panic!() };
        assert_eq!(inner.len(), 3);
        assert_eq!(inner[2], ClassExpr::some("isProducingEffect", ClassExpr::named("CollateralDamage")));
    }

    #[test]
    fn keywords_case_insensitive() {
        let a = parse_expr("p SOME (C) AND q Max 1.5").unwrap();
        let b = parse_expr("p some (C) and q max 1.5").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn literals() {
        let lit = |src: &str| match parse_expr(src).unwrap() {
            ClassExpr::DataSome { facet, .. } => facet.literal,
            other => panic!("{other:?}"),
        };
        assert_eq!(lit("p value 3"), Literal::Int(3));
        assert_eq!(lit("p value -3"), Literal::Int(-3));
        assert_eq!(lit("p min 0.75"), Literal::Double(0.75));
        assert_eq!(lit("p min 1e3"), Literal::Double(1000.0));
        assert_eq!(lit("p value TRUE"), Literal::Bool(true));
        assert_eq!(lit(r#"p value "Sev\"ere""#), Literal::Str("Sev\"ere".into()));
        assert_eq!(lit("p min Regional"), Literal::Symbol("Regional".into()));
    }

    #[test]
    fn axioms() {
        let ax = parse_axiom("A SubClassOf B").unwrap();
        assert_eq!(ax, Axiom { lhs: ClassExpr::named("A"), rhs: ClassExpr::named("B") });
        let r2 = parse_axiom(
            "AssessmentDecision and (hasLikelihoodMetric some ( LikelihoodMetric and (hasProbability min 0.75))) \
             and (hasSeverityMetric some ( SeverityMetric and (hasSeverity value \"Severe\"))) \
             SubClassOf (hasAssessmentDecision some CDMitigationMethod)",
        )
        .unwrap();
        assert_eq!(r2.rhs, ClassExpr::some("hasAssessmentDecision", ClassExpr::named("CDMitigationMethod")));
        assert!(matches!(
            parse_axiom("A SubClassOf (B and C)"),
            Err(AxiomError::IllegalHeadShape { offset: 13, .. })
        ));
        assert!(matches!(parse_axiom("A SubClassOf p some (B and C)"), Err(AxiomError::IllegalHeadShape { .. })));
        assert!(matches!(parse_axiom("A SubClassOf p min 3"), Err(AxiomError::IllegalHeadShape { .. })));
    }

    #[test]
    fn errors_point_at_found_token() {
        let cases = [
            ("A and", "end of input"),
            ("A and )", "`)`"),
            ("(A and B", "end of input"),
            ("p some and", "`and`"),
            ("A B", "`B`"),
            ("p min and", "`and`"),
            ("A and $", "`$`"),
        ];
        for (src, found) in cases {
            let err = parse_expr(src).unwrap_err();
            assert_eq!(err.found, found, "{src}");
            let rest = &src[err.offset..];
            match found {
                "end of input" => assert_eq!(rest, ""),
                _ => assert!(rest.starts_with(found.trim_matches('`')), "{src}: {rest}"),
            }
        }
        let err = parse_expr("A and\n  )").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        let err = parse_axiom("A and B").unwrap_err();
        assert!(matches!(err, AxiomError::Parse(ParseError { offset: 7, .. })));
    }

    #[test]
    fn unterminated_string() {
        let err = parse_expr("p value \"abc").unwrap_err();
        assert_eq!(err.offset, 8);
    }
}
