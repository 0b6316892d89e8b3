//! Indefeasible lexical presuppositions (SEM): `too` and `back`.
//!
//! These filter hypothesized interpretations absolutely; no defeasible
//! source can bring a rejected one back.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::context::{DiscourseModel, Eventuality};
use crate::ilf::{AdverbTrigger, ResolvedLf};

/// Kind of constraint a trigger imposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PresuppositionKind {
    /// Maximal similarity with an eventuality in the LF register (`too`).
    Similarity,
    /// A prior eventuality with the same predicate and agent/theme swapped
    /// (`back`).
    ReverseParallel,
}

/// Trigger table: the lexical-knowledge component L of the context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub triggers: BTreeMap<AdverbTrigger, PresuppositionKind>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon {
            triggers: BTreeMap::from([
                (AdverbTrigger::Too, PresuppositionKind::Similarity),
                (AdverbTrigger::Back, PresuppositionKind::ReverseParallel),
            ]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SemDecision {
    Accept,
    Reject(String),
}

impl SemDecision {
    pub fn is_accept(&self) -> bool {
        matches!(self, SemDecision::Accept)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemError {
    #[error("`back` presupposes an earlier `{pred}` event, but the discourse has none")]
    NoAntecedentEvent { pred: String },
}

/// TOO similarity: matching components among predicate, agent and theme.
/// Symmetric in its arguments.
pub fn similarity(a: &Eventuality, b: &Eventuality) -> u8 {
    u8::from(a.pred == b.pred)
        + u8::from(a.agent().is_some() && a.agent() == b.agent())
        + u8::from(a.theme().is_some() && a.theme() == b.theme())
}

fn event<'a>(evs: &'a [Eventuality], var: &str) -> Option<&'a Eventuality> {
    evs.iter().find(|e| e.id == var)
}

/// Decides each hypothesized interpretation of the current utterance.
///
/// `hypotheses` are the current utterance specialized under each
/// feature-valid assignment; the decision vector is parallel to it. An
/// utterance without adverb triggers accepts everything.
pub fn sem_filter(
    register: Option<&ResolvedLf>,
    hypotheses: &[ResolvedLf],
    model: &DiscourseModel,
    lexicon: &Lexicon,
) -> Result<Vec<SemDecision>, SemError> {
    let mut decisions = alloc::vec![SemDecision::Accept; hypotheses.len()];
    let Some(first) = hypotheses.first() else {
        return Ok(decisions);
    };
    let register_events = register.map(ResolvedLf::eventualities).unwrap_or_default();
    let current: Vec<Vec<Eventuality>> = hypotheses.iter().map(ResolvedLf::eventualities).collect();

    for (event_var, trigger) in first.adverbs() {
        let Some(kind) = lexicon.triggers.get(&trigger) else { continue };
        match kind {
            PresuppositionKind::Similarity => {
                let scores: Vec<u8> = current
                    .iter()
                    .map(|evs| {
                        let Some(cur) = event(evs, event_var.as_str()) else { return 0 };
                        register_events.iter().map(|r| similarity(cur, r)).max().unwrap_or(0)
                    })
                    .collect();
                let best = scores.iter().copied().max().unwrap_or(0);
                for (d, s) in decisions.iter_mut().zip(&scores) {
                    if *s < best && d.is_accept() {
                        *d = SemDecision::Reject(alloc::format!("too: similarity {s} < {best}"));
                    }
                }
            }
            PresuppositionKind::ReverseParallel => {
                for (d, evs) in decisions.iter_mut().zip(&current) {
                    let Some(cur) = event(evs, event_var.as_str()) else { continue };
                    if !model.eventualities().iter().any(|p| p.pred == cur.pred) {
                        return Err(SemError::NoAntecedentEvent { pred: cur.pred.clone() });
                    }
                    let reversed = model.eventualities().iter().any(|p| {
                        p.pred == cur.pred
                            && p.agent().is_some()
                            && p.agent() == cur.theme()
                            && p.theme() == cur.agent()
                    });
                    if !reversed && d.is_accept() {
                        *d = SemDecision::Reject(alloc::format!("back: no earlier reversed `{}` event", cur.pred));
                    }
                }
            }
        }
    }
    Ok(decisions)
}
