use std::cmp::Ordering;

use crate::dsl::{BoundExpr, BoundFacet};
use crate::kb::{DataAssertion, EntityName, Fact, KnowledgeBase, ObjectAssertion, Value};

use super::{Derivations, FactSource, MatchTrace, ReasonError, TraceNode};

/// Closed-world instance check.
pub fn holds(kb: &KnowledgeBase, individual: &str, expr: &BoundExpr) -> Result<bool, ReasonError> {
    Ok(check(kb, individual, expr, None)?.is_some())
}

/// Like [`holds`], returning the witnessing trace when the expression holds.
/// With `derivations`, derived facts in the trace cite their producing step.
pub fn check(
    kb: &KnowledgeBase,
    individual: &str,
    expr: &BoundExpr,
    derivations: Option<&Derivations>,
) -> Result<Option<MatchTrace>, ReasonError> {
    let Some(ind) = kb.individual(individual) else {
        return Err(ReasonError::UnknownIndividual(individual.to_string()));
    };
    for name in expr.names() {
        if kb.resolve_class(name.as_str()).is_none() && kb.resolve_property(name.as_str()).is_none() {
            return Err(ReasonError::UnboundExpr(name.to_string()));
        }
    }
    let eval = Evaluator { kb, derivations };
    Ok(eval.eval(&ind.name, expr, &mut Vec::new()))
}

/// Compares an asserted value with a facet bound. `None` when the kinds are
/// incomparable (binding rules this out for well-typed expressions).
pub fn compare(kb: &KnowledgeBase, value: &Value, bound: &Value) -> Option<Ordering> {
    match (value, bound) {
        (Value::Double(a), Value::Double(b)) => a.partial_cmp(b),
        (Value::Int(a), Value::Int(b)) => Some(a.cmp(b)),
        (Value::Str(a), Value::Str(b)) => Some(a.cmp(b)),
        (Value::Bool(a), Value::Bool(b)) => Some(a.cmp(b)),
        (Value::Enum { enum_name: e1, member: m1 }, Value::Enum { enum_name: e2, member: m2 }) if e1 == e2 => {
            let r1 = kb.enum_rank(e1.as_str(), m1.as_str())?;
            let r2 = kb.enum_rank(e2.as_str(), m2.as_str())?;
            Some(r1.cmp(&r2))
        }
        _ => None,
    }
}

/// Facet test plus a human-readable record of the comparison made.
pub fn facet_satisfied(kb: &KnowledgeBase, value: &Value, facet: &BoundFacet) -> Option<String> {
    let ord = compare(kb, value, facet.value())?;
    let (ok, op) = match facet {
        BoundFacet::Min(_) => (ord != Ordering::Less, ">="),
        BoundFacet::Max(_) => (ord != Ordering::Greater, "<="),
        BoundFacet::Eq(_) => (ord == Ordering::Equal, "="),
    };
    ok.then(|| format!("{value} {op} {}", facet.value()))
}

struct Evaluator<'a> {
    kb: &'a KnowledgeBase,
    derivations: Option<&'a Derivations>,
}

impl Evaluator<'_> {
    fn source(&self, fact: &Fact, derived: bool) -> FactSource {
        if derived {
            FactSource::Derived { step: self.derivations.and_then(|d| d.get(fact).copied()) }
        } else {
            FactSource::Asserted { line: self.kb.source_line(fact) }
        }
    }

    fn eval(&self, x: &EntityName, expr: &BoundExpr, path: &mut Vec<usize>) -> Option<MatchTrace> {
        let node = match expr {
            BoundExpr::Named(class) => {
                let (via, asserted) = self.kb.membership_witness(x.as_str(), class.as_str())?;
                let fact = Fact::Membership { individual: x.clone(), class: via.clone() };
                TraceNode::Named { class: class.clone(), via: via.clone(), source: self.source(&fact, !asserted) }
            }
            BoundExpr::And(parts) => {
                let mut traces = Vec::with_capacity(parts.len());
                for (i, part) in parts.iter().enumerate() {
                    path.push(i);
                    let t = self.eval(x, part, path);
                    path.pop();
                    traces.push(t?);
                }
                TraceNode::And { parts: traces }
            }
            BoundExpr::ObjectSome { property, filler } => {
                path.push(0);
                let found = self.kb.links(x.as_str(), property.as_str()).find_map(|link: &ObjectAssertion| {
                    self.eval(&link.object, filler, path).map(|t| (link.clone(), t))
                });
                path.pop();
                let (link, filler) = found?;
                let derived = self.kb.is_derived_link(&link);
                let source = self.source(&Fact::Link(link.clone()), derived);
                TraceNode::ObjectSome { link, source, filler: Box::new(filler) }
            }
            BoundExpr::DataSome { property, facet } => {
                let (assertion, comparison) = self
                    .kb
                    .data_values(x.as_str(), property.as_str())
                    .find_map(|a: &DataAssertion| facet_satisfied(self.kb, &a.value, facet).map(|c| (a.clone(), c)))?;
                let source = self.source(&Fact::Data(assertion.clone()), false);
                TraceNode::DataSome { assertion, source, comparison }
            }
        };
        Some(MatchTrace { individual: x.clone(), path: path_string(path), node })
    }
}

fn path_string(path: &[usize]) -> String {
    if path.is_empty() {
        return "/".into();
    }
    path.iter().map(|i| format!("/{i}")).collect()
}
