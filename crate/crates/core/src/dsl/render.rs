use crate::kb::{format_double, quote};

use super::ast::{Axiom, ClassExpr, Literal};

/// Canonical single-line text. Fillers of `some` and existential axiom heads
/// are always parenthesized; conjunctions never are.
pub fn render_expr(expr: &ClassExpr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr);
    out
}

pub fn render_axiom(axiom: &Axiom) -> String {
    let mut out = render_expr(&axiom.lhs);
    out.push_str(" SubClassOf ");
    match &axiom.rhs {
        ClassExpr::Named(name) => out.push_str(&name.text),
        other => {
            out.push('(');
            write_expr(&mut out, other);
            out.push(')');
        }
    }
    out
}

pub fn render_literal(lit: &Literal) -> String {
    match lit {
        Literal::Int(i) => i.to_string(),
        Literal::Double(d) => format_double(*d),
        Literal::Bool(b) => b.to_string(),
        Literal::Str(s) => quote(s),
        Literal::Symbol(s) => s.clone(),
    }
}

fn write_expr(out: &mut String, expr: &ClassExpr) {
    match expr {
        ClassExpr::Named(name) => out.push_str(&name.text),
        ClassExpr::And(parts) => {
            for (i, part) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" and ");
                }
                write_expr(out, part);
            }
        }
        ClassExpr::ObjectSome { property, filler } => {
            out.push_str(&property.text);
            out.push_str(" some (");
            write_expr(out, filler);
            out.push(')');
        }
        ClassExpr::DataSome { property, facet } => {
            out.push_str(&property.text);
            out.push(' ');
            out.push_str(facet.kind.keyword());
            out.push(' ');
            out.push_str(&render_literal(&facet.literal));
        }
    }
}
