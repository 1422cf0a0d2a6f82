use crate::dsl::{BoundAxiom, BoundHead};
use crate::kb::{EntityName, Fact, KnowledgeBase, ObjectAssertion};

use super::eval::check;
use super::{Derivations, Effect, InferenceStep, ReasonError, SaturationResult, StepId};

/// Deterministic witness name for an existential head fired by `rule` on
/// `subject`.
pub fn skolem_name(rule: &str, subject: &str) -> String {
    format!("sk_{rule}_{subject}")
}

/// Forward-chaining state: the knowledge base being extended, the steps so
/// far, and which step produced each derived fact.
#[derive(Debug, Clone)]
pub struct Chase {
    kb: KnowledgeBase,
    steps: Vec<InferenceStep>,
    derivations: Derivations,
}

struct Firing {
    rule: String,
    subject: EntityName,
    effects: Vec<Effect>,
    trace: super::MatchTrace,
}

impl Chase {
    pub fn new(kb: KnowledgeBase) -> Self {
        Chase { kb, steps: Vec::new(), derivations: Derivations::new() }
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn steps(&self) -> &[InferenceStep] {
        &self.steps
    }

    /// Fires one axiom against the current state. All matches are found
    /// first, then applied, so the result does not depend on individual
    /// order. Returns the new steps.
    pub fn apply_axiom(&mut self, rule: &str, axiom: &BoundAxiom) -> Result<&[InferenceStep], ReasonError> {
        let firings = self.collect(rule, axiom)?;
        let first = self.steps.len();
        self.fire(firings)?;
        Ok(&self.steps[first..])
    }

    fn collect(&self, rule: &str, axiom: &BoundAxiom) -> Result<Vec<Firing>, ReasonError> {
        let existential = matches!(axiom.rhs, BoundHead::Some { .. });
        let mut out = Vec::new();
        for ind in self.kb.individuals() {
            // skolem witnesses never spawn further witnesses; this bounds
            // the number of fresh individuals
            if existential && ind.skolem {
                continue;
            }
            let Some(trace) = check(&self.kb, ind.name.as_str(), &axiom.lhs, Some(&self.derivations))? else {
                continue;
            };
            let effects = match &axiom.rhs {
                BoundHead::Class(class) => {
                    if self.kb.is_instance(ind.name.as_str(), class.as_str()) {
                        continue;
                    }
                    vec![Effect::MembershipAdded { class: class.clone() }]
                }
                BoundHead::Some { property, class } => {
                    let witnessed = self
                        .kb
                        .links(ind.name.as_str(), property.as_str())
                        .any(|l| self.kb.is_instance(l.object.as_str(), class.as_str()));
                    if witnessed {
                        continue;
                    }
                    let sk = EntityName::new(skolem_name(rule, ind.name.as_str()))
                        .map_err(|_| ReasonError::InvalidRuleId(rule.to_string()))?;
                    let mut effects = Vec::new();
                    match self.kb.individual(sk.as_str()) {
                        None => effects.push(Effect::IndividualCreated { name: sk.clone(), class: class.clone() }),
                        Some(_) if self.kb.is_instance(sk.as_str(), class.as_str()) => {}
                        Some(_) => return Err(ReasonError::SkolemCollision(sk.to_string())),
                    }
                    effects.push(Effect::LinkAdded { property: property.clone(), object: sk });
                    effects
                }
            };
            out.push(Firing { rule: rule.to_string(), subject: ind.name.clone(), effects, trace });
        }
        Ok(out)
    }

    fn fire(&mut self, firings: Vec<Firing>) -> Result<(), ReasonError> {
        for firing in firings {
            for effect in firing.effects {
                let id = StepId(self.steps.len() as u32 + 1);
                let fresh = apply_effect(&mut self.kb, &firing.subject, &effect);
                if !fresh {
                    continue;
                }
                for fact in effect_facts(&firing.subject, &effect) {
                    self.derivations.entry(fact).or_insert(id);
                }
                self.steps.push(InferenceStep {
                    id,
                    rule: firing.rule.clone(),
                    subject: firing.subject.clone(),
                    effect,
                    trace: firing.trace.clone(),
                });
            }
        }
        Ok(())
    }

    /// Runs the axioms to a fixpoint.
    ///
    /// Each round first closes the class-headed axioms, then fires every
    /// existential axiom against one shared snapshot. Skolem names are
    /// deterministic, so the final knowledge base is independent of axiom
    /// order.
    pub fn run(&mut self, axioms: &[(String, BoundAxiom)]) -> Result<usize, ReasonError> {
        let (class_heads, some_heads): (Vec<_>, Vec<_>) =
            axioms.iter().partition(|(_, ax)| matches!(ax.rhs, BoundHead::Class(_)));
        let mut rounds = 0;
        loop {
            rounds += 1;
            let before = self.steps.len();
            loop {
                let mark = self.steps.len();
                for (rule, ax) in &class_heads {
                    self.apply_axiom(rule, ax)?;
                }
                if self.steps.len() == mark {
                    break;
                }
            }
            let mut firings = Vec::new();
            for (rule, ax) in &some_heads {
                firings.extend(self.collect(rule, ax)?);
            }
            self.fire(firings)?;
            if self.steps.len() == before {
                return Ok(rounds);
            }
        }
    }

    pub fn finish(self, iterations: usize) -> SaturationResult {
        SaturationResult { kb_after: self.kb, steps: self.steps, iterations, derivations: self.derivations }
    }
}

fn apply_effect(kb: &mut KnowledgeBase, subject: &EntityName, effect: &Effect) -> bool {
    match effect {
        Effect::MembershipAdded { class } => kb.add_derived_class(subject, class),
        Effect::LinkAdded { property, object } => kb.add_derived_link(ObjectAssertion {
            subject: subject.clone(),
            property: property.clone(),
            object: object.clone(),
        }),
        Effect::IndividualCreated { name, class } => kb.create_skolem(name, class),
    }
}

fn effect_facts(subject: &EntityName, effect: &Effect) -> Vec<Fact> {
    match effect {
        Effect::MembershipAdded { class } => {
            vec![Fact::Membership { individual: subject.clone(), class: class.clone() }]
        }
        Effect::LinkAdded { property, object } => vec![Fact::Link(ObjectAssertion {
            subject: subject.clone(),
            property: property.clone(),
            object: object.clone(),
        })],
        Effect::IndividualCreated { name, class } => {
            vec![Fact::Membership { individual: name.clone(), class: class.clone() }]
        }
    }
}

/// Fires a single axiom on `kb` in place.
pub fn apply_axiom(kb: &mut KnowledgeBase, rule: &str, axiom: &BoundAxiom) -> Result<Vec<InferenceStep>, ReasonError> {
    let mut chase = Chase::new(std::mem::take(kb));
    let steps = chase.apply_axiom(rule, axiom).map(<[_]>::to_vec);
    *kb = chase.kb;
    steps
}

pub fn saturate(kb: KnowledgeBase, axioms: &[(String, BoundAxiom)]) -> Result<SaturationResult, ReasonError> {
    let mut chase = Chase::new(kb);
    let rounds = chase.run(axioms)?;
    Ok(chase.finish(rounds))
}

/// Re-applies recorded steps to a knowledge base. Fails if a step's effect
/// is not new, which means the steps do not belong to this knowledge base.
pub fn replay(kb: &KnowledgeBase, steps: &[InferenceStep]) -> Result<KnowledgeBase, ReasonError> {
    let mut kb = kb.clone();
    for step in steps {
        if !apply_effect(&mut kb, &step.subject, &step.effect) {
            return Err(ReasonError::ReplayMismatch(step.id));
        }
    }
    Ok(kb)
}
