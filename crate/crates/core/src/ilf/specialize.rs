use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{AdverbTrigger, Atom, EntityId, ExprType, Features, Gender, GramFunction, Ilf, Mood, Number, SurfaceInfo, Tense, Var};
use crate::context::{DiscourseModel, Entity, EntityKind, Eventuality};

/// A nominal variable together with the entity constant it now denotes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding {
    pub var: Var,
    pub entity: EntityId,
}

/// Atom of a resolved, DRS-like logical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ResolvedAtom {
    Event { var: Var, pred: String },
    /// `Time(e, t)`: the tense operator anchored to a time variable.
    Time { event: Var, time: Var },
    Role { theta: String, gf: GramFunction, event: Var, arg: Binding },
    Named { arg: Binding, name: String, features: Features },
    Definite { arg: Binding },
    Indefinite { number: Number, arg: Binding },
    Noun { arg: Binding, pred: String, features: Features },
    /// Left underspecified on purpose.
    NnRelation { arg: Binding, pred: String },
    Adverb { event: Var, trigger: AdverbTrigger },
}

/// Record of a pronoun that specialization discharged.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResolvedPronoun {
    pub var: Var,
    pub entity: EntityId,
    pub gender: Gender,
    pub number: Number,
    /// Index of the `pro` atom in the source ILF.
    pub atom_index: usize,
}

/// A specialization of an [`Ilf`]: no `pro` atoms, every nominal bound to an
/// entity constant, tense anchored to a time variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedLf {
    pub mood: Mood,
    pub tense: Option<Tense>,
    pub atoms: Vec<ResolvedAtom>,
    pub surface: SurfaceInfo,
    pub bindings: BTreeMap<Var, EntityId>,
    pub pronouns: Vec<ResolvedPronoun>,
    /// Entities this utterance introduces into the discourse model.
    pub introduced: Vec<Entity>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecializeError {
    #[error("pronoun `{0}` has no assigned referent")]
    IncompleteAssignment(Var),
    #[error("`{entity}` is not a candidate referent of `{var}`")]
    NonCandidate { var: Var, entity: EntityId },
    #[error("`{0}` is not a pronoun variable of this utterance")]
    NotAPronoun(Var),
}

/// Accessible entities whose features unify with each pronoun's. An empty
/// set means the pronoun is unresolvable in this model.
pub fn candidate_referents(ilf: &Ilf, model: &DiscourseModel) -> BTreeMap<Var, BTreeSet<EntityId>> {
    ilf.pronouns()
        .into_iter()
        .map(|(var, features)| {
            let set = model
                .entities()
                .filter(|e| e.accessible && e.features.unifies_with(&features))
                .map(|e| e.id.clone())
                .collect();
            (var, set)
        })
        .collect()
}

fn slug(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    let out = out.trim_matches('_');
    if out.is_empty() {
        "x".to_string()
    } else {
        out.to_string()
    }
}

/// Binds every pronoun per `assignment`, names and definites to existing
/// entities where possible, and fresh constants otherwise.
pub fn specialize(
    ilf: &Ilf,
    assignment: &BTreeMap<Var, EntityId>,
    model: &DiscourseModel,
) -> Result<ResolvedLf, SpecializeError> {
    let pronouns = ilf.pronouns();
    for var in assignment.keys() {
        if !pronouns.iter().any(|(p, _)| p == var) {
            return Err(SpecializeError::NotAPronoun(var.clone()));
        }
    }
    let candidates = candidate_referents(ilf, model);
    let mut bindings: BTreeMap<Var, EntityId> = BTreeMap::new();
    for (var, _) in &pronouns {
        let entity = assignment.get(var).ok_or_else(|| SpecializeError::IncompleteAssignment(var.clone()))?;
        if !candidates[var].contains(entity) {
            return Err(SpecializeError::NonCandidate { var: var.clone(), entity: entity.clone() });
        }
        bindings.insert(var.clone(), entity.clone());
    }

    let nouns_of = |var: &Var| -> Vec<&str> {
        ilf.atoms()
            .iter()
            .filter_map(|a| match a {
                Atom::Noun { var: v, pred, .. } if v == var => Some(pred.as_str()),
                _ => None,
            })
            .collect()
    };
    let mut introduced: Vec<Entity> = Vec::new();
    let mut taken: BTreeSet<String> = model.entities().map(|e| e.id.0.clone()).collect();
    for nominal in &ilf.surface().nominals {
        if nominal.expr_type.is_pronominal() {
            continue;
        }
        let var = &nominal.var;
        let nouns = nouns_of(var);
        let name = ilf.atoms().iter().find_map(|a| match a {
            Atom::Name { var: v, name, .. } if v == var => Some(name.as_str()),
            _ => None,
        });
        let existing = match nominal.expr_type {
            ExprType::Name => name.and_then(|n| model.find_by_name(n)),
            ExprType::DefiniteNp => nouns.first().and_then(|n| model.find_by_head_noun(n)),
            _ => None,
        };
        if let Some(e) = existing {
            bindings.insert(var.clone(), e.id.clone());
            continue;
        }
        let base = slug(name.or(nouns.first().copied()).unwrap_or(var.as_str()));
        let mut id = base.clone();
        let mut k = 2;
        while taken.contains(&id) {
            id = format!("{base}_{k}");
            k += 1;
        }
        taken.insert(id.clone());
        let features = ilf.features_of(var);
        let kind = match (features.number, features.gender) {
            (Some(Number::Pl), _) => EntityKind::Group,
            (_, Some(Gender::Male | Gender::Female)) => EntityKind::Person,
            _ => EntityKind::Thing,
        };
        let entity = Entity {
            id: EntityId(id),
            label: name.map(ToString::to_string).or(nouns.first().map(|n| n.to_string())).unwrap_or_else(|| var.0.clone()),
            name: name.map(ToString::to_string),
            head_noun: nouns.first().map(|n| n.to_string()),
            properties: nouns.iter().map(|n| n.to_string()).collect(),
            features,
            kind,
            introduced_as: nominal.expr_type,
            accessible: true,
            utterance: 0,
        };
        bindings.insert(var.clone(), entity.id.clone());
        introduced.push(entity);
    }

    let bind = |v: &Var| Binding { var: v.clone(), entity: bindings[v].clone() };
    let mut atoms = Vec::with_capacity(ilf.atoms().len() + 1);
    let mut resolved_pronouns = Vec::new();
    let mut anchored = ilf.tense().is_none();
    let time = fresh_time_var(ilf);
    for (i, atom) in ilf.atoms().iter().enumerate() {
        let r = match atom {
            Atom::Event { var, pred } => {
                atoms.push(ResolvedAtom::Event { var: var.clone(), pred: pred.clone() });
                if !anchored {
                    atoms.push(ResolvedAtom::Time { event: var.clone(), time: time.clone() });
                    anchored = true;
                }
                continue;
            }
            Atom::Pro { var, gender, number } => {
                resolved_pronouns.push(ResolvedPronoun {
                    var: var.clone(),
                    entity: bindings[var].clone(),
                    gender: *gender,
                    number: *number,
                    atom_index: i,
                });
                continue;
            }
            Atom::Role { theta, gf, event, arg } => {
                ResolvedAtom::Role { theta: theta.clone(), gf: *gf, event: event.clone(), arg: bind(arg) }
            }
            Atom::Name { var, name, features } => {
                ResolvedAtom::Named { arg: bind(var), name: name.clone(), features: *features }
            }
            Atom::Definite { var } => ResolvedAtom::Definite { arg: bind(var) },
            Atom::Indefinite { number, var } => ResolvedAtom::Indefinite { number: *number, arg: bind(var) },
            Atom::Noun { var, pred, features } => {
                ResolvedAtom::Noun { arg: bind(var), pred: pred.clone(), features: *features }
            }
            Atom::NnRelation { var, pred } => ResolvedAtom::NnRelation { arg: bind(var), pred: pred.clone() },
            Atom::Adverb { event, trigger } => ResolvedAtom::Adverb { event: event.clone(), trigger: *trigger },
        };
        atoms.push(r);
    }

    Ok(ResolvedLf {
        mood: ilf.mood(),
        tense: ilf.tense(),
        atoms,
        surface: ilf.surface().clone(),
        bindings,
        pronouns: resolved_pronouns,
        introduced,
    })
}

fn fresh_time_var(ilf: &Ilf) -> Var {
    let used: BTreeSet<&str> = ilf.atoms().iter().flat_map(|a| a.vars()).map(Var::as_str).collect();
    let mut name = String::from("t");
    let mut k = 1;
    while used.contains(name.as_str()) {
        name = format!("t{k}");
        k += 1;
    }
    Var(name)
}

impl ResolvedLf {
    /// Entity a nominal variable is bound to.
    pub fn entity_of(&self, var: &Var) -> Option<&EntityId> {
        self.bindings.get(var)
    }

    /// Every entity constant the form mentions.
    pub fn entities(&self) -> BTreeSet<&EntityId> {
        self.bindings.values().collect()
    }

    /// Event atoms with their role fillers, in source order.
    pub fn eventualities(&self) -> Vec<Eventuality> {
        self.atoms
            .iter()
            .filter_map(|a| match a {
                ResolvedAtom::Event { var, pred } => Some((var, pred)),
                _ => None,
            })
            .map(|(var, pred)| Eventuality {
                id: var.0.clone(),
                pred: pred.clone(),
                roles: self
                    .atoms
                    .iter()
                    .filter_map(|a| match a {
                        ResolvedAtom::Role { theta, event, arg, .. } if event == var => {
                            Some((theta.clone(), arg.entity.clone()))
                        }
                        _ => None,
                    })
                    .collect(),
                utterance: 0,
            })
            .collect()
    }

    /// Eventuality an adverb attaches to.
    pub fn adverbs(&self) -> impl Iterator<Item = (&Var, AdverbTrigger)> {
        self.atoms.iter().filter_map(|a| match a {
            ResolvedAtom::Adverb { event, trigger } => Some((event, *trigger)),
            _ => None,
        })
    }

    /// Erases constants back to variables and restores the `pro` atoms.
    pub fn generalize(&self) -> Result<Ilf, super::WellFormednessError> {
        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .filter_map(|a| {
                Some(match a {
                    ResolvedAtom::Time { .. } => return None,
                    ResolvedAtom::Event { var, pred } => Atom::Event { var: var.clone(), pred: pred.clone() },
                    ResolvedAtom::Role { theta, gf, event, arg } => {
                        Atom::Role { theta: theta.clone(), gf: *gf, event: event.clone(), arg: arg.var.clone() }
                    }
                    ResolvedAtom::Named { arg, name, features } => {
                        Atom::Name { var: arg.var.clone(), name: name.clone(), features: *features }
                    }
                    ResolvedAtom::Definite { arg } => Atom::Definite { var: arg.var.clone() },
                    ResolvedAtom::Indefinite { number, arg } => Atom::Indefinite { number: *number, var: arg.var.clone() },
                    ResolvedAtom::Noun { arg, pred, features } => {
                        Atom::Noun { var: arg.var.clone(), pred: pred.clone(), features: *features }
                    }
                    ResolvedAtom::NnRelation { arg, pred } => Atom::NnRelation { var: arg.var.clone(), pred: pred.clone() },
                    ResolvedAtom::Adverb { event, trigger } => Atom::Adverb { event: event.clone(), trigger: *trigger },
                })
            })
            .collect();
        let mut pronouns: Vec<&ResolvedPronoun> = self.pronouns.iter().collect();
        pronouns.sort_by_key(|p| p.atom_index);
        for p in pronouns {
            atoms.insert(p.atom_index, Atom::Pro { var: p.var.clone(), gender: p.gender, number: p.number });
        }
        Ilf::new(self.mood, self.tense, atoms)
    }
}
