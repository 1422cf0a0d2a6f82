//! Name resolution and kind checking of class expressions against a
//! knowledge base.

use std::fmt;

use serde::Serialize;

use crate::kb::{DataType, EntityName, KnowledgeBase, PropertyKind, Value};

use super::ast::{Axiom, ClassExpr, Facet, FacetKind, Literal, Name, Span};
use super::render::render_expr;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BoundFacet {
    Min(Value),
    Max(Value),
    Eq(Value),
}

impl BoundFacet {
    pub fn kind(&self) -> FacetKind {
        match self {
            BoundFacet::Min(_) => FacetKind::Min,
            BoundFacet::Max(_) => FacetKind::Max,
            BoundFacet::Eq(_) => FacetKind::Value,
        }
    }

    pub fn value(&self) -> &Value {
        match self {
            BoundFacet::Min(v) | BoundFacet::Max(v) | BoundFacet::Eq(v) => v,
        }
    }
}

/// A class expression whose names are resolved to their declared spelling and
/// whose facet literals are typed values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundExpr {
    Named(EntityName),
    And(Vec<BoundExpr>),
    ObjectSome { property: EntityName, filler: Box<BoundExpr> },
    DataSome { property: EntityName, facet: BoundFacet },
}

impl BoundExpr {
    /// Back to the surface syntax, for printing.
    pub fn to_expr(&self) -> ClassExpr {
        match self {
            BoundExpr::Named(c) => ClassExpr::named(c.as_str()),
            BoundExpr::And(parts) => ClassExpr::And(parts.iter().map(BoundExpr::to_expr).collect()),
            BoundExpr::ObjectSome { property, filler } => ClassExpr::some(property.as_str(), filler.to_expr()),
            BoundExpr::DataSome { property, facet } => {
                let literal = match facet.value() {
                    Value::Int(i) => Literal::Int(*i),
                    Value::Double(d) => Literal::Double(*d),
                    Value::Bool(b) => Literal::Bool(*b),
                    Value::Str(s) => Literal::Str(s.clone()),
                    Value::Enum { member, .. } => Literal::Symbol(member.to_string()),
                };
                ClassExpr::facet(property.as_str(), facet.kind(), literal)
            }
        }
    }

    /// Every class and property name mentioned.
    pub fn names(&self) -> Vec<&EntityName> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names<'a>(&'a self, out: &mut Vec<&'a EntityName>) {
        match self {
            BoundExpr::Named(c) => out.push(c),
            BoundExpr::And(parts) => parts.iter().for_each(|p| p.collect_names(out)),
            BoundExpr::ObjectSome { property, filler } => {
                out.push(property);
                filler.collect_names(out);
            }
            BoundExpr::DataSome { property, .. } => out.push(property),
        }
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_expr(&self.to_expr()))
    }
}

/// The two head shapes the reasoner materializes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundHead {
    Class(EntityName),
    Some { property: EntityName, class: EntityName },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundAxiom {
    pub lhs: BoundExpr,
    pub rhs: BoundHead,
}

impl BoundAxiom {
    pub fn to_axiom(&self) -> Axiom {
        let rhs = match &self.rhs {
            BoundHead::Class(c) => ClassExpr::named(c.as_str()),
            BoundHead::Some { property, class } => ClassExpr::some(property.as_str(), ClassExpr::named(class.as_str())),
        };
        Axiom { lhs: self.lhs.to_expr(), rhs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BindErrorKind {
    UnknownName,
    KindMismatch,
    EnumMemberUnknown,
    IllegalHeadShape,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BindError {
    pub kind: BindErrorKind,
    pub name: String,
    pub offset: usize,
    pub len: usize,
    pub message: String,
}

impl BindError {
    fn new(kind: BindErrorKind, name: &str, span: Span, message: String) -> Self {
        BindError { kind, name: name.to_string(), offset: span.start, len: span.end - span.start, message }
    }
}

impl fmt::Display for BindError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn bind(kb: &KnowledgeBase, expr: &ClassExpr) -> Result<BoundExpr, Vec<BindError>> {
    let mut errors = Vec::new();
    let bound = bind_expr(kb, expr, &mut errors);
    match bound {
        Some(b) if errors.is_empty() => Ok(b),
        _ => Err(errors),
    }
}

pub fn bind_axiom(kb: &KnowledgeBase, axiom: &Axiom) -> Result<BoundAxiom, Vec<BindError>> {
    let mut errors = Vec::new();
    let lhs = bind_expr(kb, &axiom.lhs, &mut errors);
    let rhs = match &axiom.rhs {
        ClassExpr::Named(name) => resolve_class(kb, name, &mut errors).map(BoundHead::Class),
        ClassExpr::ObjectSome { property, filler } => match &**filler {
            ClassExpr::Named(class) => {
                let p = resolve_property(kb, property, PropertyKind::Object, &mut errors);
                let c = resolve_class(kb, class, &mut errors);
                p.zip(c).map(|(property, class)| BoundHead::Some { property, class })
            }
            _ => {
                errors.push(BindError::new(
                    BindErrorKind::IllegalHeadShape,
                    &property.text,
                    property.span,
                    "existential head must have a named class filler".into(),
                ));
                None
            }
        },
        _ => {
            errors.push(BindError::new(
                BindErrorKind::IllegalHeadShape,
                "",
                Span::default(),
                "axiom head must be a class name or `property some Class`".into(),
            ));
            None
        }
    };
    match (lhs, rhs) {
        (Some(lhs), Some(rhs)) if errors.is_empty() => Ok(BoundAxiom { lhs, rhs }),
        _ => Err(errors),
    }
}

fn bind_expr(kb: &KnowledgeBase, expr: &ClassExpr, errors: &mut Vec<BindError>) -> Option<BoundExpr> {
    match expr {
        ClassExpr::Named(name) => resolve_class(kb, name, errors).map(BoundExpr::Named),
        ClassExpr::And(parts) => {
            let bound: Vec<Option<BoundExpr>> = parts.iter().map(|p| bind_expr(kb, p, errors)).collect();
            bound.into_iter().collect::<Option<Vec<_>>>().map(BoundExpr::And)
        }
        ClassExpr::ObjectSome { property, filler } => {
            let p = resolve_property(kb, property, PropertyKind::Object, errors);
            let f = bind_expr(kb, filler, errors);
            p.zip(f).map(|(property, f)| BoundExpr::ObjectSome { property, filler: Box::new(f) })
        }
        ClassExpr::DataSome { property, facet } => {
            let property = resolve_property(kb, property, PropertyKind::Data, errors)?;
            let ty = kb.resolve_property(property.as_str())?.data_type()?.clone();
            let facet = bind_facet(kb, &property, &ty, facet, errors)?;
            Some(BoundExpr::DataSome { property, facet })
        }
    }
}

fn resolve_class(kb: &KnowledgeBase, name: &Name, errors: &mut Vec<BindError>) -> Option<EntityName> {
    match kb.resolve_class(&name.text) {
        Some(c) => Some(c.clone()),
        None => {
            let message = if kb.resolve_property(&name.text).is_some() {
                format!("`{}` is a property, not a class", name.text)
            } else {
                format!("unknown class `{}`", name.text)
            };
            errors.push(BindError::new(BindErrorKind::UnknownName, &name.text, name.span, message));
            None
        }
    }
}

fn resolve_property(
    kb: &KnowledgeBase,
    name: &Name,
    want: PropertyKind,
    errors: &mut Vec<BindError>,
) -> Option<EntityName> {
    let Some(def) = kb.resolve_property(&name.text) else {
        errors.push(BindError::new(
            BindErrorKind::UnknownName,
            &name.text,
            name.span,
            format!("unknown property `{}`", name.text),
        ));
        return None;
    };
    if def.kind() != want {
        let usage = match want {
            PropertyKind::Object => "`some`",
            PropertyKind::Data => "a facet",
        };
        errors.push(BindError::new(
            BindErrorKind::KindMismatch,
            &name.text,
            name.span,
            format!("`{}` is a {} and cannot be used with {usage}", def.name, def.kind()),
        ));
        return None;
    }
    Some(def.name.clone())
}

fn bind_facet(
    kb: &KnowledgeBase,
    property: &EntityName,
    ty: &DataType,
    facet: &Facet,
    errors: &mut Vec<BindError>,
) -> Option<BoundFacet> {
    let shown = super::render::render_literal(&facet.literal);
    let mismatch = |errors: &mut Vec<BindError>, why: String| {
        errors.push(BindError::new(BindErrorKind::KindMismatch, property.as_str(), facet.span, why));
        None
    };
    if facet.kind != FacetKind::Value && !ty.is_ordered() {
        return mismatch(
            errors,
            format!("`{}` facet needs an ordered range but `{property}` is {ty}", facet.kind.keyword()),
        );
    }
    let value = match (ty, &facet.literal) {
        (DataType::Double, Literal::Double(d)) => Value::Double(*d),
        (DataType::Double, Literal::Int(i)) => Value::Double(*i as f64),
        (DataType::Int, Literal::Int(i)) => Value::Int(*i),
        (DataType::Bool, Literal::Bool(b)) => Value::Bool(*b),
        (DataType::String, Literal::Str(s)) => Value::Str(s.clone()),
        (DataType::Enum(e), Literal::Str(m) | Literal::Symbol(m)) => {
            if kb.enum_rank(e.as_str(), m).is_none() {
                errors.push(BindError::new(
                    BindErrorKind::EnumMemberUnknown,
                    m,
                    facet.span,
                    format!("`{m}` is not a member of `{e}`"),
                ));
                return None;
            }
            Value::Enum { enum_name: e.clone(), member: EntityName::new(m.as_str()).ok()? }
        }
        _ => return mismatch(errors, format!("`{property}` expects {ty}, found `{shown}`")),
    };
    Some(match facet.kind {
        FacetKind::Min => BoundFacet::Min(value),
        FacetKind::Max => BoundFacet::Max(value),
        FacetKind::Value => BoundFacet::Eq(value),
    })
}
