//! Closed-world instance checking and monotone forward chaining of
//! `SubClassOf` axioms, with an audit trail for every derived fact.
//!
//! Existential heads are satisfied by an existing witness when one exists,
//! otherwise by one deterministic fresh individual per (subject, rule).

mod chase;
mod eval;
mod explain;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::kb::{DataAssertion, EntityName, Fact, KnowledgeBase, ObjectAssertion};

pub use chase::{apply_axiom, replay, saturate, skolem_name, Chase};
pub use eval::{check, compare, facet_satisfied, holds};
pub use explain::{explain, Justification, ProofTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct StepId(pub u32);

impl fmt::Display for StepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which step produced each derived fact.
pub type Derivations = BTreeMap<Fact, StepId>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactSource {
    Asserted { line: Option<u32> },
    /// `step` is known when the trace was taken during saturation.
    Derived { step: Option<StepId> },
}

/// How an individual satisfied one node of a class expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchTrace {
    pub individual: EntityName,
    /// Child indices from the root of the expression, e.g. `/1/0`.
    pub path: String,
    #[serde(flatten)]
    pub node: TraceNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TraceNode {
    Named { class: EntityName, via: EntityName, source: FactSource },
    And { parts: Vec<MatchTrace> },
    ObjectSome { link: ObjectAssertion, source: FactSource, filler: Box<MatchTrace> },
    DataSome { assertion: DataAssertion, source: FactSource, comparison: String },
}

impl MatchTrace {
    /// Facts the trace relies on, in expression order.
    pub fn facts(&self) -> Vec<(Fact, &FactSource)> {
        let mut out = Vec::new();
        self.collect_facts(&mut out);
        out
    }

    fn collect_facts<'a>(&'a self, out: &mut Vec<(Fact, &'a FactSource)>) {
        match &self.node {
            TraceNode::Named { via, source, .. } => {
                out.push((Fact::Membership { individual: self.individual.clone(), class: via.clone() }, source))
            }
            TraceNode::And { parts } => parts.iter().for_each(|p| p.collect_facts(out)),
            TraceNode::ObjectSome { link, source, filler } => {
                out.push((Fact::Link(link.clone()), source));
                filler.collect_facts(out);
            }
            TraceNode::DataSome { assertion, source, .. } => out.push((Fact::Data(assertion.clone()), source)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Effect {
    MembershipAdded { class: EntityName },
    LinkAdded { property: EntityName, object: EntityName },
    IndividualCreated { name: EntityName, class: EntityName },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InferenceStep {
    pub id: StepId,
    pub rule: String,
    pub subject: EntityName,
    pub effect: Effect,
    pub trace: MatchTrace,
}

impl InferenceStep {
    pub fn fact(&self) -> Fact {
        match &self.effect {
            Effect::MembershipAdded { class } => Fact::Membership { individual: self.subject.clone(), class: class.clone() },
            Effect::LinkAdded { property, object } => Fact::Link(ObjectAssertion {
                subject: self.subject.clone(),
                property: property.clone(),
                object: object.clone(),
            }),
            Effect::IndividualCreated { name, class } => Fact::Membership { individual: name.clone(), class: class.clone() },
        }
    }
}

#[derive(Debug, Clone)]
pub struct SaturationResult {
    pub kb_after: KnowledgeBase,
    pub steps: Vec<InferenceStep>,
    pub iterations: usize,
    pub derivations: Derivations,
}

impl SaturationResult {
    pub fn step(&self, id: StepId) -> Option<&InferenceStep> {
        let idx = (id.0 as usize).checked_sub(1)?;
        self.steps.get(idx).filter(|s| s.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonError {
    #[error("unknown individual `{0}`")]
    UnknownIndividual(String),
    #[error("expression mentions `{0}`, which this knowledge base does not declare")]
    UnboundExpr(String),
    #[error("rule id `{0}` cannot form a witness name")]
    InvalidRuleId(String),
    #[error("witness name `{0}` is taken by an individual of another class")]
    SkolemCollision(String),
    #[error("step {0} does not apply to this knowledge base")]
    ReplayMismatch(StepId),
    #[error("`{0}` is not a fact of the saturated knowledge base")]
    UnknownFact(String),
    #[error("no step {0}")]
    UnknownStep(StepId),
    #[error("step {0} cites a fact that was not yet derived")]
    OrphanStep(StepId),
}
