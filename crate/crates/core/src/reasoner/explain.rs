use serde::Serialize;

use crate::kb::{EntityName, Fact};

use super::{FactSource, MatchTrace, ReasonError, SaturationResult, StepId, TraceNode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Justification {
    /// Stated in the scenario.
    Asserted { line: Option<u32> },
    /// Produced by a rule application.
    Rule { rule: String, step: StepId },
    /// Membership inherited from a subclass the individual belongs to.
    Subsumption { via: EntityName },
}

/// Why a fact holds, down to asserted facts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofTree {
    pub fact: Fact,
    pub justification: Justification,
    /// The facet comparison this fact satisfied, for data facts used by a rule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
    pub children: Vec<ProofTree>,
}

impl ProofTree {
    pub fn leaves(&self) -> Vec<&ProofTree> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            if node.children.is_empty() {
                out.push(node);
            } else {
                stack.extend(node.children.iter().rev());
            }
        }
        out
    }

    /// Indented text rendering, one fact per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&self.fact.to_string());
        let why = match &self.justification {
            Justification::Asserted { line: Some(l) } => format!("asserted, line {l}"),
            Justification::Asserted { line: None } => "asserted".to_string(),
            Justification::Rule { rule, step } => format!("{rule}, step {step}"),
            Justification::Subsumption { via } => format!("subclass via {via}"),
        };
        out.push_str(&format!("  [{why}]"));
        if let Some(check) = &self.check {
            out.push_str(&format!("  ({check})"));
        }
        out.push('\n');
        for child in &self.children {
            child.render_into(out, depth + 1);
        }
    }
}

/// Proof tree for `fact` in the saturated knowledge base.
pub fn explain(result: &SaturationResult, fact: &Fact) -> Result<ProofTree, ReasonError> {
    explain_fact(result, fact, None)
}

fn explain_fact(result: &SaturationResult, fact: &Fact, check: Option<String>) -> Result<ProofTree, ReasonError> {
    let kb = &result.kb_after;
    let unknown = || ReasonError::UnknownFact(fact.to_string());
    let asserted = |check| ProofTree {
        fact: fact.clone(),
        justification: Justification::Asserted { line: kb.source_line(fact) },
        check,
        children: Vec::new(),
    };
    if let Some(&step) = result.derivations.get(fact) {
        return from_step(result, fact, step, check);
    }
    match fact {
        Fact::Membership { individual, class } => {
            let ind = kb.individual(individual.as_str()).ok_or_else(unknown)?;
            if ind.asserted_classes.contains(class) {
                return Ok(asserted(check));
            }
            let (via, _) = kb.membership_witness(individual.as_str(), class.as_str()).ok_or_else(unknown)?;
            if via == class {
                return Err(unknown());
            }
            let inner = Fact::Membership { individual: individual.clone(), class: via.clone() };
            Ok(ProofTree {
                fact: fact.clone(),
                justification: Justification::Subsumption { via: via.clone() },
                check,
                children: vec![explain_fact(result, &inner, None)?],
            })
        }
        Fact::Link(link) if kb.has_link(link) => Ok(asserted(check)),
        Fact::Data(data) if kb.has_data(data) => Ok(asserted(check)),
        _ => Err(unknown()),
    }
}

fn from_step(result: &SaturationResult, fact: &Fact, step: StepId, check: Option<String>) -> Result<ProofTree, ReasonError> {
    let s = result.step(step).ok_or(ReasonError::UnknownStep(step))?;
    let mut children = Vec::new();
    collect_children(result, &s.trace, step, &mut children)?;
    Ok(ProofTree {
        fact: fact.clone(),
        justification: Justification::Rule { rule: s.rule.clone(), step },
        check,
        children,
    })
}

fn collect_children(
    result: &SaturationResult,
    trace: &MatchTrace,
    current: StepId,
    out: &mut Vec<ProofTree>,
) -> Result<(), ReasonError> {
    let guard = |source: &FactSource| match source {
        FactSource::Derived { step: Some(s) } if *s >= current => Err(ReasonError::OrphanStep(current)),
        _ => Ok(()),
    };
    match &trace.node {
        TraceNode::Named { class, via, source } => {
            guard(source)?;
            let exact = Fact::Membership { individual: trace.individual.clone(), class: via.clone() };
            let tree = explain_fact(result, &exact, None)?;
            if via == class {
                out.push(tree);
            } else {
                out.push(ProofTree {
                    fact: Fact::Membership { individual: trace.individual.clone(), class: class.clone() },
                    justification: Justification::Subsumption { via: via.clone() },
                    check: None,
                    children: vec![tree],
                });
            }
        }
        TraceNode::And { parts } => {
            for part in parts {
                collect_children(result, part, current, out)?;
            }
        }
        TraceNode::ObjectSome { link, source, filler } => {
            guard(source)?;
            out.push(explain_fact(result, &Fact::Link(link.clone()), None)?);
            collect_children(result, filler, current, out)?;
        }
        TraceNode::DataSome { assertion, source, comparison } => {
            guard(source)?;
            out.push(explain_fact(result, &Fact::Data(assertion.clone()), Some(comparison.clone()))?);
        }
    }
    Ok(())
}
