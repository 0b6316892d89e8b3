//! Attentional rules: CENTER, GF ORDER, EXP ORDER and EXP CENTER.
//!
//! Salience is a partial order, represented as rank-groups (highest first)
//! whose members are mutually incomparable. GF ORDER ranks the entities
//! realized in the latest utterance; CENTER lifts the Center, and where the
//! two rules disagree the Center joins the top group instead of winning
//! outright. A pronoun normally picks a maximally salient entity of its
//! feature-compatible candidates (EXP ORDER), so the candidate partition
//! from [`att_preference`] is the ATT verdict for that pronoun.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::ilf::{EntityId, SurfaceInfo, Var};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttentionalState {
    /// Disjoint rank-groups, most salient first.
    pub ranks: Vec<BTreeSet<EntityId>>,
    pub center: Option<EntityId>,
}

impl AttentionalState {
    /// The set of maximally salient entities (Cp when it is a singleton).
    pub fn maximal(&self) -> Option<&BTreeSet<EntityId>> {
        self.ranks.first()
    }

    pub fn rank_of(&self, id: &EntityId) -> Option<usize> {
        self.ranks.iter().position(|g| g.contains(id))
    }

    pub fn contains(&self, id: &EntityId) -> bool {
        self.rank_of(id).is_some()
    }
}

/// Computes the output attentional state of an utterance.
///
/// `center` is the Center of the output state (see [`update_center`]);
/// `entities` lists every entity of the discourse model, so that entities
/// the utterance did not realize can be ranked below all realized ones.
pub fn salience_order(
    center: Option<&EntityId>,
    surface: &SurfaceInfo,
    entity_map: &BTreeMap<Var, EntityId>,
    entities: &[EntityId],
) -> AttentionalState {
    let mut best: BTreeMap<&EntityId, (usize, usize)> = BTreeMap::new();
    for n in &surface.nominals {
        let Some(e) = entity_map.get(&n.var) else { continue };
        let key = (n.depth, n.gf.rank());
        best.entry(e).and_modify(|k| *k = (*k).min(key)).or_insert(key);
    }
    let mut by_key: BTreeMap<(usize, usize), BTreeSet<EntityId>> = BTreeMap::new();
    for (e, key) in &best {
        by_key.entry(*key).or_default().insert((*e).clone());
    }
    let mut ranks: Vec<BTreeSet<EntityId>> = by_key.into_values().collect();

    // CENTER vs GF ORDER: a Center below the top shares the top group.
    if let Some(c) = center {
        if let Some(i) = ranks.iter().position(|g| g.contains(c)) {
            if i > 0 {
                ranks[i].remove(c);
                if ranks[i].is_empty() {
                    ranks.remove(i);
                }
                ranks[0].insert(c.clone());
            }
        }
    }

    let rest: BTreeSet<EntityId> = entities.iter().filter(|e| !best.contains_key(e)).cloned().collect();
    if !rest.is_empty() {
        ranks.push(rest);
    }
    let center = center.filter(|c| ranks.iter().any(|g| g.contains(*c))).cloned();
    AttentionalState { ranks, center }
}

/// EXP CENTER, pronominal reading: the referent of the pronoun in the
/// highest grammatical function becomes the Center. Without pronominals the
/// Center carries over.
pub fn update_center(
    surface: &SurfaceInfo,
    assignment: &BTreeMap<Var, EntityId>,
    prev_center: Option<&EntityId>,
) -> Option<EntityId> {
    surface
        .pronouns()
        .filter(|n| assignment.contains_key(&n.var))
        .min_by_key(|n| (n.depth, n.gf.rank(), n.position))
        .map(|n| assignment[&n.var].clone())
        .or_else(|| prev_center.cloned())
}

/// Partitions a pronoun's candidates by the rank-groups of `state`,
/// restricted to the candidate set. Determinate iff the first group is a
/// singleton.
pub fn att_preference(candidates: &BTreeSet<EntityId>, state: &AttentionalState) -> Vec<BTreeSet<EntityId>> {
    let mut out: Vec<BTreeSet<EntityId>> = state
        .ranks
        .iter()
        .map(|g| g.intersection(candidates).cloned().collect::<BTreeSet<_>>())
        .filter(|g| !g.is_empty())
        .collect();
    let unranked: BTreeSet<EntityId> = candidates.iter().filter(|c| !state.contains(c)).cloned().collect();
    if !unranked.is_empty() {
        out.push(unranked);
    }
    out
}
