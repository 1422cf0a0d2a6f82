use std::fmt;

use serde::Serialize;

use crate::dsl::{parse_axiom, parse_number, render_axiom, render_literal, Axiom, AxiomError, Literal};
use crate::kb::format_double;

use super::{ErrorKind, ScenarioError};

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigDirective {
    /// Lower bounds of Low, Medium, High and VeryHigh.
    LikelihoodBands([f64; 4]),
    DisableRule(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Directive {
    Class { name: String, parents: Vec<String> },
    Alias { alias: String, target: String },
    Enum { name: String, members: Vec<String> },
    DataProperty { name: String, ty: String, domain: Vec<String> },
    ObjectProperty { name: String, domain: Vec<String>, range: Vec<String> },
    Individual { name: String, classes: Vec<String> },
    Data { subject: String, property: String, value: Literal },
    Object { subject: String, property: String, object: String },
    Axiom { id: String, axiom: Axiom },
    Config(ConfigDirective),
}

/// A directive and where it was read from. Positions do not take part in
/// equality.
#[derive(Debug, Clone)]
pub struct Positioned {
    pub line: u32,
    /// 1-based start column of every token on the line.
    pub columns: Vec<u32>,
    /// Token texts, parallel to `columns`.
    pub tokens: Vec<String>,
    /// The raw line.
    pub text: String,
    pub directive: Directive,
}

impl PartialEq for Positioned {
    fn eq(&self, other: &Self) -> bool {
        self.directive == other.directive
    }
}

impl Positioned {
    pub fn new(directive: Directive) -> Self {
        Positioned { line: 0, columns: Vec::new(), tokens: Vec::new(), text: String::new(), directive }
    }

    /// Column of the first token spelled `name`, else of the first token.
    pub fn column_of(&self, name: &str) -> u32 {
        self.tokens
            .iter()
            .position(|t| t == name)
            .or_else(|| self.tokens.iter().position(|t| t.eq_ignore_ascii_case(name)))
            .and_then(|i| self.columns.get(i).copied())
            .unwrap_or_else(|| self.columns.first().copied().unwrap_or(1))
    }

    /// Column of byte `offset` within the text that starts at token `token`.
    pub fn column_within(&self, token: usize, offset: usize) -> u32 {
        let start = self.column(token);
        let Some((byte, _)) = self.text.char_indices().nth(start as usize - 1) else { return start };
        let rest = &self.text[byte..];
        start + rest[..offset.min(rest.len())].chars().count() as u32
    }

    pub fn column(&self, token: usize) -> u32 {
        self.columns.get(token).or(self.columns.last()).copied().unwrap_or(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDoc {
    pub id: String,
    pub directives: Vec<Positioned>,
}

impl ScenarioDoc {
    pub fn new(id: impl Into<String>) -> Self {
        ScenarioDoc { id: id.into(), directives: Vec::new() }
    }

    /// Last line number used by the document.
    pub fn last_line(&self) -> u32 {
        self.directives.iter().map(|d| d.line).max().unwrap_or(1).max(1)
    }
}

impl fmt::Display for ScenarioDoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_doc(self))
    }
}

/// A what-if replacement `subject.property=value`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Override {
    pub subject: String,
    pub property: String,
    #[serde(serialize_with = "ser_literal")]
    pub value: Literal,
}

fn ser_literal<S: serde::Serializer>(lit: &Literal, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&render_literal(lit))
}

impl fmt::Display for Override {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}={}", self.subject, self.property, render_literal(&self.value))
    }
}

impl std::str::FromStr for Override {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |column: usize, message: &str| ScenarioError::new(ErrorKind::Syntax, 1, column as u32, message);
        let (target, value) = s.split_once('=').ok_or_else(|| err(1, "expected subject.property=value"))?;
        let (subject, property) = target.split_once('.').ok_or_else(|| err(1, "expected subject.property before `=`"))?;
        let (subject, property) = (subject.trim(), property.trim());
        if subject.is_empty() || property.is_empty() {
            return Err(err(1, "expected subject.property before `=`"));
        }
        let value_col = target.chars().count() + 2;
        let value = parse_literal(value.trim()).ok_or_else(|| err(value_col, "expected a number, true, false, a quoted string or a name"))?;
        Ok(Override { subject: subject.to_string(), property: property.to_string(), value })
    }
}

struct Token {
    text: String,
    /// Byte offset in the line.
    offset: usize,
    column: u32,
    quoted: bool,
}

/// Splits a line into whitespace-separated tokens. Quoted strings are one
/// token; `#` outside a string starts a comment.
fn tokenize(line: &str, line_no: u32) -> Result<Vec<Token>, ScenarioError> {
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (offset, c) = chars[i];
        let column = i as u32 + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            break;
        }
        let mut text = String::new();
        if c == '"' {
            text.push('"');
            i += 1;
            let mut closed = false;
            while i < chars.len() {
                let c = chars[i].1;
                text.push(c);
                i += 1;
                if c == '\\' && i < chars.len() {
                    text.push(chars[i].1);
                    i += 1;
                } else if c == '"' {
                    closed = true;
                    break;
                }
            }
            if !closed {
                return Err(ScenarioError::new(ErrorKind::Syntax, line_no, column, "unterminated string"));
            }
            out.push(Token { text, offset, column, quoted: true });
            continue;
        }
        while i < chars.len() && !chars[i].1.is_whitespace() && chars[i].1 != '#' {
            text.push(chars[i].1);
            i += 1;
        }
        out.push(Token { text, offset, column, quoted: false });
    }
    Ok(out)
}

fn unquote(token: &str) -> Option<String> {
    let inner = token.strip_prefix('"')?.strip_suffix('"')?;
    let mut out = String::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next()? {
                'n' => out.push('\n'),
                't' => out.push('\t'),
                '"' => out.push('"'),
                '\\' => out.push('\\'),
                _ => return None,
            }
        } else {
            out.push(c);
        }
    }
    Some(out)
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_scenario_id(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// A data value as written in a scenario or override.
pub fn parse_literal(text: &str) -> Option<Literal> {
    if text.starts_with('"') {
        return unquote(text).map(Literal::Str);
    }
    if text.eq_ignore_ascii_case("true") {
        return Some(Literal::Bool(true));
    }
    if text.eq_ignore_ascii_case("false") {
        return Some(Literal::Bool(false));
    }
    if text.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '.') {
        return parse_number(text);
    }
    is_name(text).then(|| Literal::Symbol(text.to_string()))
}

struct LineParser<'a> {
    line: &'a str,
    line_no: u32,
    tokens: Vec<Token>,
}

impl LineParser<'_> {
    fn err(&self, token: usize, message: impl Into<String>) -> ScenarioError {
        let column = match self.tokens.get(token) {
            Some(t) => t.column,
            None => self.line.trim_end().chars().count() as u32 + 1,
        };
        ScenarioError::new(ErrorKind::Syntax, self.line_no, column, message)
    }

    fn name(&self, i: usize, what: &str) -> Result<String, ScenarioError> {
        match self.tokens.get(i) {
            Some(t) if !t.quoted && is_name(&t.text) => Ok(t.text.clone()),
            Some(t) => Err(self.err(i, format!("expected {what}, found `{}`", t.text))),
            None => Err(self.err(i, format!("expected {what}"))),
        }
    }

    fn names_from(&self, start: usize, what: &str) -> Result<Vec<String>, ScenarioError> {
        (start..self.tokens.len()).map(|i| self.name(i, what)).collect()
    }

    fn end(&self, i: usize) -> Result<(), ScenarioError> {
        match self.tokens.get(i) {
            None => Ok(()),
            Some(t) => Err(self.err(i, format!("unexpected `{}`", t.text))),
        }
    }

    fn keyword(&self, i: usize) -> Option<&str> {
        self.tokens.get(i).filter(|t| !t.quoted).map(|t| t.text.as_str())
    }

    fn directive(&self) -> Result<Directive, ScenarioError> {
        let head = self.keyword(0).unwrap_or_default();
        match head {
            "class" => {
                let name = self.name(1, "a class name")?;
                let parents = match self.keyword(2) {
                    None => Vec::new(),
                    Some("<") => {
                        if self.tokens.len() == 3 {
                            return Err(self.err(3, "expected a parent class after `<`"));
                        }
                        self.names_from(3, "a parent class name")?
                    }
                    Some(_) => return Err(self.err(2, "expected `<` or end of line")),
                };
                Ok(Directive::Class { name, parents })
            }
            "alias" => {
                let alias = self.name(1, "an alias")?;
                let target = self.name(2, "a class name")?;
                self.end(3)?;
                Ok(Directive::Alias { alias, target })
            }
            "enum" => {
                let name = self.name(1, "an enumeration name")?;
                let mut members = vec![self.name(2, "a member name")?];
                let mut i = 3;
                while i < self.tokens.len() {
                    if self.keyword(i) != Some("<") {
                        return Err(self.err(i, "expected `<` between members"));
                    }
                    members.push(self.name(i + 1, "a member name")?);
                    i += 2;
                }
                Ok(Directive::Enum { name, members })
            }
            "property" => match self.keyword(1) {
                Some("data") => {
                    let name = self.name(2, "a property name")?;
                    let ty = self.name(3, "a type (string, int, double, bool or an enumeration)")?;
                    let domain = match self.keyword(4) {
                        None => Vec::new(),
                        Some("domain") if self.tokens.len() > 5 => self.names_from(5, "a class name")?,
                        Some("domain") => return Err(self.err(5, "expected a class name")),
                        Some(_) => return Err(self.err(4, "expected `domain` or end of line")),
                    };
                    Ok(Directive::DataProperty { name, ty, domain })
                }
                Some("object") => {
                    let name = self.name(2, "a property name")?;
                    let mut domain = Vec::new();
                    let mut range = Vec::new();
                    let mut i = 3;
                    let mut seen_range = false;
                    while i < self.tokens.len() {
                        let target = match self.keyword(i) {
                            Some("domain") if domain.is_empty() && !seen_range => &mut domain,
                            Some("range") if !seen_range => {
                                seen_range = true;
                                &mut range
                            }
                            _ => return Err(self.err(i, "expected `domain`, `range` or end of line")),
                        };
                        i += 1;
                        let start = i;
                        while i < self.tokens.len() && !matches!(self.keyword(i), Some("domain" | "range")) {
                            target.push(self.name(i, "a class name")?);
                            i += 1;
                        }
                        if i == start {
                            return Err(self.err(i, "expected a class name"));
                        }
                    }
                    Ok(Directive::ObjectProperty { name, domain, range })
                }
                _ => Err(self.err(1, "expected `data` or `object`")),
            },
            "individual" => {
                let name = self.name(1, "an individual name")?;
                if self.tokens.len() < 3 {
                    return Err(self.err(2, "expected at least one class"));
                }
                Ok(Directive::Individual { name, classes: self.names_from(2, "a class name")? })
            }
            "data" => {
                let subject = self.name(1, "an individual name")?;
                let property = self.name(2, "a property name")?;
                let token = self.tokens.get(3).ok_or_else(|| self.err(3, "expected a value"))?;
                let value = parse_literal(&token.text)
                    .ok_or_else(|| self.err(3, "expected a number, true, false, a quoted string or a name"))?;
                self.end(4)?;
                Ok(Directive::Data { subject, property, value })
            }
            "object" => {
                let subject = self.name(1, "an individual name")?;
                let property = self.name(2, "a property name")?;
                let object = self.name(3, "an individual name")?;
                self.end(4)?;
                Ok(Directive::Object { subject, property, object })
            }
            "axiom" => {
                let id = self.name(1, "a rule id")?;
                let start = self.tokens.get(2).ok_or_else(|| self.err(2, "expected an axiom"))?;
                let text = self.rest(start.offset);
                let column = start.column;
                let axiom = parse_axiom(text).map_err(|e| {
                    let (col, message) = match e {
                        AxiomError::Parse(p) => (p.column, format!("expected {}, found {}", p.expected, p.found)),
                        AxiomError::IllegalHeadShape { column, .. } => {
                            (column, "axiom head must be a class name or `property some Class`".to_string())
                        }
                    };
                    ScenarioError::new(ErrorKind::Syntax, self.line_no, column + col as u32 - 1, message)
                })?;
                Ok(Directive::Axiom { id, axiom })
            }
            "config" => match self.keyword(1) {
                Some("likelihood_bands") => {
                    let mut cuts = [0.0; 4];
                    for (k, cut) in cuts.iter_mut().enumerate() {
                        let token = self.tokens.get(2 + k).ok_or_else(|| self.err(2 + k, "expected four cut-points"))?;
                        *cut = match parse_number(&token.text) {
                            Some(Literal::Double(d)) => d,
                            Some(Literal::Int(i)) => i as f64,
                            _ => return Err(self.err(2 + k, "expected a number")),
                        };
                    }
                    self.end(6)?;
                    Ok(Directive::Config(ConfigDirective::LikelihoodBands(cuts)))
                }
                Some("disable_rule") => {
                    let id = self.name(2, "a rule id")?;
                    self.end(3)?;
                    Ok(Directive::Config(ConfigDirective::DisableRule(id)))
                }
                _ => Err(self.err(1, "expected `likelihood_bands` or `disable_rule`")),
            },
            "scenario" => Err(self.err(0, "`scenario` may appear only once, on the first line")),
            other => Err(self.err(0, format!("unknown directive `{other}`"))),
        }
    }

    /// The line from `offset` up to a trailing comment.
    fn rest(&self, offset: usize) -> &str {
        let text = &self.line[offset..];
        let mut in_str = false;
        let mut escaped = false;
        for (i, c) in text.char_indices() {
            match c {
                _ if escaped => escaped = false,
                '\\' if in_str => escaped = true,
                '"' => in_str = !in_str,
                '#' if !in_str => return text[..i].trim_end(),
                _ => {}
            }
        }
        text.trim_end()
    }
}

/// Parses a scenario document. The first directive must be `scenario <id>`.
pub fn parse_scenario(text: &str) -> Result<ScenarioDoc, ScenarioError> {
    let mut doc: Option<ScenarioDoc> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let tokens = tokenize(line, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        let p = LineParser { line, line_no, tokens };
        let Some(doc) = doc.as_mut() else {
            if p.keyword(0) != Some("scenario") {
                return Err(p.err(0, "expected `scenario <id>` before any other directive"));
            }
            let id = match p.tokens.get(1) {
                Some(t) if !t.quoted && is_scenario_id(&t.text) => t.text.clone(),
                _ => return Err(p.err(1, "expected a scenario id")),
            };
            p.end(2)?;
            doc = Some(ScenarioDoc::new(id));
            continue;
        };
        let directive = p.directive()?;
        doc.directives.push(Positioned {
            line: line_no,
            columns: p.tokens.iter().map(|t| t.column).collect(),
            tokens: p.tokens.iter().map(|t| t.text.clone()).collect(),
            text: line.to_string(),
            directive,
        });
    }
    doc.ok_or_else(|| ScenarioError::new(ErrorKind::Syntax, 1, 1, "expected `scenario <id>`"))
}

/// Parses one directive line, numbering it `line`.
pub fn parse_directive(text: &str, line: u32) -> Result<Positioned, ScenarioError> {
    if text.contains('\n') {
        return Err(ScenarioError::new(ErrorKind::Syntax, line, 1, "expected a single line"));
    }
    let tokens = tokenize(text, line)?;
    if tokens.is_empty() {
        return Err(ScenarioError::new(ErrorKind::Syntax, line, 1, "expected a directive"));
    }
    let p = LineParser { line: text, line_no: line, tokens };
    let directive = p.directive()?;
    Ok(Positioned {
        line,
        columns: p.tokens.iter().map(|t| t.column).collect(),
        tokens: p.tokens.iter().map(|t| t.text.clone()).collect(),
        text: text.to_string(),
        directive,
    })
}

pub fn format_directive(d: &Directive) -> String {
    match d {
        Directive::Class { name, parents } if parents.is_empty() => format!("class {name}"),
        Directive::Class { name, parents } => format!("class {name} < {}", parents.join(" ")),
        Directive::Alias { alias, target } => format!("alias {alias} {target}"),
        Directive::Enum { name, members } => format!("enum {name} {}", members.join(" < ")),
        Directive::DataProperty { name, ty, domain } => {
            let mut s = format!("property data {name} {ty}");
            if !domain.is_empty() {
                s.push_str(&format!(" domain {}", domain.join(" ")));
            }
            s
        }
        Directive::ObjectProperty { name, domain, range } => {
            let mut s = format!("property object {name}");
            if !domain.is_empty() {
                s.push_str(&format!(" domain {}", domain.join(" ")));
            }
            if !range.is_empty() {
                s.push_str(&format!(" range {}", range.join(" ")));
            }
            s
        }
        Directive::Individual { name, classes } => format!("individual {name} {}", classes.join(" ")),
        Directive::Data { subject, property, value } => format!("data {subject} {property} {}", render_literal(value)),
        Directive::Object { subject, property, object } => format!("object {subject} {property} {object}"),
        Directive::Axiom { id, axiom } => format!("axiom {id} {}", render_axiom(axiom)),
        Directive::Config(ConfigDirective::LikelihoodBands(cuts)) => {
            let cuts: Vec<String> = cuts.iter().map(|c| format_double(*c)).collect();
            format!("config likelihood_bands {}", cuts.join(" "))
        }
        Directive::Config(ConfigDirective::DisableRule(id)) => format!("config disable_rule {id}"),
    }
}

/// Canonical text: the id line, then one directive per line.
pub fn format_doc(doc: &ScenarioDoc) -> String {
    let mut out = format!("scenario {}\n", doc.id);
    for d in &doc.directives {
        out.push_str(&format_directive(&d.directive));
        out.push('\n');
    }
    out
}

/// Replaces every `data` directive for each override's subject and property
/// by one carrying the override value, at the position of the first one.
/// Overrides with no matching directive are appended.
pub fn apply_overrides(doc: &ScenarioDoc, overrides: &[Override]) -> ScenarioDoc {
    let mut out = doc.clone();
    let mut next_line = doc.last_line();
    for o in overrides {
        let matches = |d: &Positioned| {
            matches!(&d.directive, Directive::Data { subject, property, .. }
                if *subject == o.subject && property.eq_ignore_ascii_case(&o.property))
        };
        let replacement = Directive::Data { subject: o.subject.clone(), property: o.property.clone(), value: o.value.clone() };
        match out.directives.iter().position(matches) {
            Some(first) => {
                let mut keep = out.directives[first].clone();
                keep.directive = replacement;
                out.directives.retain(|d| !matches(d));
                out.directives.insert(first, keep);
            }
            None => {
                next_line += 1;
                let mut p = Positioned::new(replacement);
                p.line = next_line;
                out.directives.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_directive() {
        let text = r#"
# leading comment
scenario demo-1
class Widget < TargetAISystem Effect
alias Gadget Widget
enum Size small < medium < large   # trailing comment
property data hasSize Size domain Widget
property object hasPart domain Widget range Widget
property object looseLink
individual w1 Widget
data w1 hasSize medium
data w1 hasAccuracy 0.9
data w1 hasAITechnique "rule # based"
object w1 hasPart w1
axiom X1 Widget and (hasSize min medium) SubClassOf Effect
config likelihood_bands 0.1 0.2 0.3 0.8
config disable_rule R3
"#;
        let doc = parse_scenario(text).unwrap();
        assert_eq!(doc.id, "demo-1");
        assert_eq!(doc.directives.len(), 14);
        assert_eq!(doc.directives[0].line, 4);
        assert_eq!(
            doc.directives[0].directive,
            Directive::Class { name: "Widget".into(), parents: vec!["TargetAISystem".into(), "Effect".into()] }
        );
        assert_eq!(
            doc.directives[2].directive,
            Directive::Enum { name: "Size".into(), members: vec!["small".into(), "medium".into(), "large".into()] }
        );
        assert_eq!(
            doc.directives[9].directive,
            Directive::Data { subject: "w1".into(), property: "hasAITechnique".into(), value: Literal::Str("rule # based".into()) }
        );
        assert_eq!(doc.directives[13].directive, Directive::Config(ConfigDirective::DisableRule("R3".into())));
        let again = parse_scenario(&format_doc(&doc)).unwrap();
        assert_eq!(again, doc);
        assert_eq!(format_doc(&again), format_doc(&doc));
    }

    #[test]
    fn literal_forms() {
        assert_eq!(parse_literal("1002"), Some(Literal::Int(1002)));
        assert_eq!(parse_literal("0.45"), Some(Literal::Double(0.45)));
        assert_eq!(parse_literal("-3"), Some(Literal::Int(-3)));
        assert_eq!(parse_literal("TRUE"), Some(Literal::Bool(true)));
        assert_eq!(parse_literal("high"), Some(Literal::Symbol("high".into())));
        assert_eq!(parse_literal("\"a\\\"b\""), Some(Literal::Str("a\"b".into())));
        assert_eq!(parse_literal("1x"), None);
        assert_eq!(parse_literal("a-b"), None);
    }

    #[test]
    fn error_positions() {
        let e = parse_scenario("scenario s\nindividual\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 11));
        let e = parse_scenario("scenario s\n  frobnicate x\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_scenario("individual x A\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        let e = parse_scenario("scenario s\naxiom A1 Foo and SubClassOf Bar\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.column, 18);
        let e = parse_scenario("scenario s\ndata x p \"open\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 10));
        assert!(parse_scenario("").is_err());
        assert!(parse_scenario("scenario a\nscenario b\n").is_err());
    }

    #[test]
    fn override_parsing() {
        let o: Override = "lm1.hasProbability=0.6".parse().unwrap();
        assert_eq!(o.subject, "lm1");
        assert_eq!(o.property, "hasProbability");
        assert_eq!(o.value, Literal::Double(0.6));
        assert_eq!(o.to_string(), "lm1.hasProbability=0.6");
        assert!("lm1=0.6".parse::<Override>().is_err());
        assert!("lm1.p".parse::<Override>().is_err());
    }

    #[test]
    fn overrides_replace_in_place() {
        let doc = parse_scenario("scenario s\ndata a p 1\ndata b p 2\ndata a p 3\n").unwrap();
        let o = Override { subject: "a".into(), property: "P".into(), value: Literal::Int(9) };
        let out = apply_overrides(&doc, &[o]);
        let lines: Vec<String> = out.directives.iter().map(|d| format_directive(&d.directive)).collect();
        assert_eq!(lines, ["data a P 9", "data b p 2"]);
        let o = Override { subject: "c".into(), property: "p".into(), value: Literal::Int(1) };
        let out = apply_overrides(&doc, &[o]);
        assert_eq!(out.directives.len(), 4);
        assert_eq!(out.directives[3].line, 5);
        assert_eq!(apply_overrides(&doc, &[]), doc);
    }
}
