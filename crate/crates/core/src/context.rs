//! The discourse context ⟨φ, D, A, I, L, K⟩ and the per-utterance transition.
//!
//! φ is a short-term register holding exactly the previous utterance's
//! resolved form (with its surface annotation). D only grows. A is
//! recomputed from the utterance just integrated. L and K are shared,
//! slow-changing handles.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::attention::{self, AttentionalState};
use crate::ilf::{EntityId, ExprType, Features, Gender, Number, ResolvedAtom, ResolvedLf};
use crate::semrules::Lexicon;
use crate::worldkb::KnowledgeBase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityKind {
    Person,
    Thing,
    Group,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub id: EntityId,
    /// Human-readable label: the name, else the head noun.
    pub label: String,
    pub name: Option<String>,
    pub head_noun: Option<String>,
    /// Noun predicates true of the entity.
    pub properties: BTreeSet<String>,
    pub features: Features,
    pub kind: EntityKind,
    pub introduced_as: ExprType,
    /// False for entities a pronoun cannot reach (DRT accessibility).
    pub accessible: bool,
    /// Utterance that introduced the entity (1-based; 0 if not yet integrated).
    pub utterance: usize,
}

impl Entity {
    /// A named person or thing, with id derived from the name.
    pub fn named(name: &str, features: Features) -> Self {
        let kind = match (features.number, features.gender) {
            (Some(Number::Pl), _) => EntityKind::Group,
            (_, Some(Gender::Male | Gender::Female)) => EntityKind::Person,
            _ => EntityKind::Thing,
        };
        Entity {
            id: EntityId(name.to_lowercase().replace(' ', "_")),
            label: name.to_string(),
            name: Some(name.to_string()),
            head_noun: None,
            properties: BTreeSet::new(),
            features,
            kind,
            introduced_as: ExprType::Name,
            accessible: true,
            utterance: 0,
        }
    }
}

/// A resolved event with its role fillers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eventuality {
    pub id: String,
    pub pred: String,
    /// (thematic role, filler) in source order.
    pub roles: Vec<(String, EntityId)>,
    pub utterance: usize,
}

impl Eventuality {
    pub fn role(&self, theta: &str) -> Option<&EntityId> {
        self.roles.iter().find(|(t, _)| t == theta).map(|(_, e)| e)
    }

    pub fn agent(&self) -> Option<&EntityId> {
        self.role("agent")
    }

    pub fn theme(&self) -> Option<&EntityId> {
        self.role("theme")
    }

    /// Participants in canonical order: agent, theme, then the remaining
    /// roles as written. Passives and actives of one event agree.
    pub fn participants(&self) -> Vec<&EntityId> {
        let mut out: Vec<&EntityId> = Vec::with_capacity(self.roles.len());
        out.extend(self.agent());
        out.extend(self.theme());
        out.extend(
            self.roles
                .iter()
                .filter(|(t, _)| t != "agent" && t != "theme")
                .map(|(_, e)| e),
        );
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiscourseModel {
    entities: BTreeMap<EntityId, Entity>,
    eventualities: Vec<Eventuality>,
}

impl DiscourseModel {
    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    pub fn entity(&self, id: &EntityId) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn contains(&self, id: &EntityId) -> bool {
        self.entities.contains_key(id)
    }

    pub fn eventualities(&self) -> &[Eventuality] {
        &self.eventualities
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    /// Adds or replaces an entity.
    pub fn insert(&mut self, entity: Entity) {
        self.entities.insert(entity.id.clone(), entity);
    }

    /// Adds an eventuality. Its participants must already be present.
    pub fn add_eventuality(&mut self, ev: Eventuality) -> Result<(), ContextError> {
        if let Some((_, missing)) = ev.roles.iter().find(|(_, e)| !self.contains(e)) {
            return Err(ContextError::UnknownEntity(missing.clone()));
        }
        self.eventualities.push(ev);
        Ok(())
    }

    pub fn find_by_name(&self, name: &str) -> Option<&Entity> {
        self.entities().find(|e| e.accessible && e.name.as_deref() == Some(name))
    }

    /// Most recently introduced accessible entity with this head noun.
    pub fn find_by_head_noun(&self, noun: &str) -> Option<&Entity> {
        self.entities()
            .filter(|e| e.accessible && e.head_noun.as_deref() == Some(noun))
            .max_by_key(|e| e.utterance)
    }

    pub fn label(&self, id: &EntityId) -> String {
        self.entity(id).map_or_else(|| id.0.clone(), |e| e.label.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Indexical {
    Speaker,
    Addressee,
    Here,
    Now,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ContextError {
    #[error("entity `{0}` is neither in the discourse model nor introduced by the utterance")]
    UnknownEntity(EntityId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    /// φ: the previous utterance's resolved form, with its surface info.
    pub lf_register: Option<ResolvedLf>,
    /// D
    pub discourse_model: DiscourseModel,
    /// A
    pub attention: AttentionalState,
    /// I
    pub indexicals: BTreeMap<Indexical, EntityId>,
    /// L
    pub lexicon: Arc<Lexicon>,
    /// K
    pub world_kb: Arc<KnowledgeBase>,
    /// Number of utterances integrated so far.
    pub utterances: usize,
}

pub fn init_context(kb: impl Into<Arc<KnowledgeBase>>, indexicals: BTreeMap<Indexical, EntityId>) -> Context {
    Context {
        lf_register: None,
        discourse_model: DiscourseModel::default(),
        attention: AttentionalState::default(),
        indexicals,
        lexicon: Arc::new(Lexicon::default()),
        world_kb: kb.into(),
        utterances: 0,
    }
}

impl Context {
    /// The transition C_{i-1} → C_i for one resolved utterance. `self` is
    /// left untouched.
    pub fn update(&self, resolved: &ResolvedLf) -> Result<Context, ContextError> {
        let index = self.utterances + 1;
        let fresh: BTreeSet<&EntityId> = resolved.introduced.iter().map(|e| &e.id).collect();
        for id in resolved.entities() {
            if !self.discourse_model.contains(id) && !fresh.contains(id) {
                return Err(ContextError::UnknownEntity(id.clone()));
            }
        }

        let mut model = self.discourse_model.clone();
        for e in &resolved.introduced {
            let mut e = e.clone();
            e.utterance = index;
            model.insert(e);
        }
        for atom in &resolved.atoms {
            if let ResolvedAtom::Noun { arg, pred, .. } = atom {
                if let Some(e) = model.entities.get_mut(&arg.entity) {
                    e.properties.insert(pred.clone());
                }
            }
        }
        for mut ev in resolved.eventualities() {
            ev.id = format!("{}@{}", ev.id, index);
            ev.utterance = index;
            model.add_eventuality(ev)?;
        }

        let center = attention::update_center(&resolved.surface, &resolved.bindings, self.attention.center.as_ref());
        let all: Vec<EntityId> = model.entities().map(|e| e.id.clone()).collect();
        let attention = attention::salience_order(center.as_ref(), &resolved.surface, &resolved.bindings, &all);

        Ok(Context {
            lf_register: Some(resolved.clone()),
            discourse_model: model,
            attention,
            indexicals: self.indexicals.clone(),
            lexicon: Arc::clone(&self.lexicon),
            world_kb: Arc::clone(&self.world_kb),
            utterances: index,
        })
    }
}
