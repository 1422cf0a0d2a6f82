use std::fmt;

/// Byte range in the source text.
///
/// Spans never participate in equality: two trees that differ only in source
/// positions compare equal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn shifted(self, by: usize) -> Self {
        Span { start: self.start + by, end: self.end + by }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

/// A name as written, with its position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub span: Span,
}

impl Name {
    pub fn new(text: impl Into<String>) -> Self {
        Name { text: text.into(), span: Span::default() }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Unbound facet literal. Bare names stay symbols until binding decides
/// whether they are enumeration members.
#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Double(f64),
    Bool(bool),
    Str(String),
    Symbol(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetKind {
    /// `min t`: value >= t
    Min,
    /// `max t`: value <= t
    Max,
    /// `value t`: value == t
    Value,
}

impl FacetKind {
    pub fn keyword(self) -> &'static str {
        match self {
            FacetKind::Min => "min",
            FacetKind::Max => "max",
            FacetKind::Value => "value",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub kind: FacetKind,
    pub literal: Literal,
    pub span: Span,
}

impl Facet {
    pub fn new(kind: FacetKind, literal: Literal) -> Self {
        Facet { kind, literal, span: Span::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassExpr {
    Named(Name),
    /// At least two conjuncts, none of them an `And`.
    And(Vec<ClassExpr>),
    ObjectSome { property: Name, filler: Box<ClassExpr> },
    DataSome { property: Name, facet: Facet },
}

impl ClassExpr {
    pub fn named(name: impl Into<String>) -> Self {
        ClassExpr::Named(Name::new(name))
    }

    pub fn some(property: impl Into<String>, filler: ClassExpr) -> Self {
        ClassExpr::ObjectSome { property: Name::new(property), filler: Box::new(filler) }
    }

    pub fn facet(property: impl Into<String>, kind: FacetKind, literal: Literal) -> Self {
        ClassExpr::DataSome { property: Name::new(property), facet: Facet::new(kind, literal) }
    }

    /// Conjunction with nested conjunctions spliced in place. A single
    /// conjunct is returned as is.
    pub fn and(parts: impl IntoIterator<Item = ClassExpr>) -> Self {
        let mut flat = Vec::new();
        for part in parts {
            match part {
                ClassExpr::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            ClassExpr::And(flat)
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ClassExpr::Named(_) | ClassExpr::DataSome { .. } => 1,
            ClassExpr::And(xs) => 1 + xs.iter().map(ClassExpr::depth).max().unwrap_or(0),
            ClassExpr::ObjectSome { filler, .. } => 1 + filler.depth(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axiom {
    pub lhs: ClassExpr,
    pub rhs: ClassExpr,
}

impl Axiom {
    /// Heads the reasoner can materialize: a named class, or a single
    /// existential over a named class.
    pub fn head_is_legal(&self) -> bool {
        match &self.rhs {
            ClassExpr::Named(_) => true,
            ClassExpr::ObjectSome { filler, .. } => matches!(**filler, ClassExpr::Named(_)),
            _ => false,
        }
    }
}
