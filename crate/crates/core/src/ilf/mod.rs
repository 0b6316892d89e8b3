//! Initial logical forms: the underspecified, indefeasible output of grammar.
//!
//! An [`Ilf`] is a davidsonian conjunction of [`Atom`]s under a mood tag and
//! an optional tense tag. It leaves reference, quantifier scope and
//! noun-noun relations open; pragmatics narrows it to a [`ResolvedLf`] by
//! [`specialize`]-ing pronoun variables to discourse entities.
//!
//! The concrete syntax is a parenthesized prefix notation:
//!
//! ```text
//! (decl (past (ev e make) (role agent subj e x) (pro x male sg)
//!             (role theme obj e y) (indef sg y) (noun y spider) (nn y robot)))
//! ```

mod parse;
mod print;
mod specialize;

pub use parse::{parse_discourse, parse_ilf, IlfError};
pub use specialize::{
    candidate_referents, specialize, Binding, ResolvedAtom, ResolvedLf, ResolvedPronoun,
    SpecializeError,
};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A variable of the logical form (event or nominal).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Constant naming a discourse entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(pub String);

impl EntityId {
    pub fn new(name: impl Into<String>) -> Self {
        EntityId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mood {
    Decl,
    Interrog,
    Imper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tense {
    Past,
    Pres,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gender {
    Male,
    Female,
    Neuter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Number {
    Sg,
    Pl,
}

/// Gender/number annotation. `None` components are unknown and unify with
/// anything.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Features {
    pub gender: Option<Gender>,
    pub number: Option<Number>,
}

impl Features {
    pub const fn new(gender: Gender, number: Number) -> Self {
        Features { gender: Some(gender), number: Some(number) }
    }

    pub fn unifies_with(&self, other: &Features) -> bool {
        fn ok<T: PartialEq>(a: Option<T>, b: Option<T>) -> bool {
            match (a, b) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            }
        }
        ok(self.gender, other.gender) && ok(self.number, other.number)
    }

    /// Combines two annotations of the same entity; known values win.
    pub fn merge(&self, other: &Features) -> Features {
        Features {
            gender: self.gender.or(other.gender),
            number: self.number.or(other.number),
        }
    }

    pub fn is_known(&self) -> bool {
        self.gender.is_some() || self.number.is_some()
    }
}

/// Grammatical function of a nominal, in GF ORDER (highest first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GramFunction {
    Subject,
    Object,
    Object2,
    Other,
}

impl GramFunction {
    pub fn rank(self) -> usize {
        self as usize
    }
}

/// Nominal expression type, in EXP ORDER (highest first). Names are not in
/// the hierarchy; they sit with definite descriptions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExprType {
    Zero,
    Pronoun,
    DefiniteNp,
    Name,
    IndefiniteNp,
}

impl ExprType {
    pub fn rank(self) -> usize {
        match self {
            ExprType::Zero => 0,
            ExprType::Pronoun => 1,
            ExprType::DefiniteNp | ExprType::Name => 2,
            ExprType::IndefiniteNp => 3,
        }
    }

    pub fn is_pronominal(self) -> bool {
        matches!(self, ExprType::Zero | ExprType::Pronoun)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdverbTrigger {
    Too,
    Back,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    /// `pred(e)`
    Event { var: Var, pred: String },
    /// `Theta_GF(e, x)`
    Role { theta: String, gf: GramFunction, event: Var, arg: Var },
    /// `pro(x) ∧ he(x)`
    Pro { var: Var, gender: Gender, number: Number },
    Name { var: Var, name: String, features: Features },
    Definite { var: Var },
    Indefinite { number: Number, var: Var },
    Noun { var: Var, pred: String, features: Features },
    NnRelation { var: Var, pred: String },
    Adverb { event: Var, trigger: AdverbTrigger },
}

impl Atom {
    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        let (a, b) = match self {
            Atom::Role { event, arg, .. } => (event, Some(arg)),
            Atom::Event { var, .. }
            | Atom::Pro { var, .. }
            | Atom::Name { var, .. }
            | Atom::Definite { var }
            | Atom::Indefinite { var, .. }
            | Atom::Noun { var, .. }
            | Atom::NnRelation { var, .. } => (var, None),
            Atom::Adverb { event, .. } => (event, None),
        };
        core::iter::once(a).chain(b)
    }

    /// Nominal variable this atom declares (its determiner), if any.
    fn declared_nominal(&self) -> Option<(&Var, ExprType)> {
        match self {
            Atom::Pro { var, .. } => Some((var, ExprType::Pronoun)),
            Atom::Name { var, .. } => Some((var, ExprType::Name)),
            Atom::Definite { var } => Some((var, ExprType::DefiniteNp)),
            Atom::Indefinite { var, .. } => Some((var, ExprType::IndefiniteNp)),
            _ => None,
        }
    }
}

/// Surface annotation of one nominal variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NominalInfo {
    pub var: Var,
    pub gf: GramFunction,
    pub expr_type: ExprType,
    /// 1-based order of first mention.
    pub position: usize,
    /// Nesting depth of the clause that assigns `gf` (0 = main clause).
    pub depth: usize,
}

/// Structured-LF surface information: grammatical function, expression type
/// and linear order per nominal, sorted by position.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SurfaceInfo {
    pub nominals: Vec<NominalInfo>,
}

impl SurfaceInfo {
    pub fn get(&self, var: &Var) -> Option<&NominalInfo> {
        self.nominals.iter().find(|n| &n.var == var)
    }

    pub fn pronouns(&self) -> impl Iterator<Item = &NominalInfo> {
        self.nominals.iter().filter(|n| n.expr_type.is_pronominal())
    }
}

/// Reason an atom list is not a well-formed ILF, pointing at the offending
/// atom by index.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WellFormednessError {
    #[error("utterance has no atoms")]
    Empty,
    #[error("variable `{var}` declared more than once")]
    DuplicateVariable { var: Var, atom: usize },
    #[error("variable `{var}` is used both as an event and as a nominal")]
    SortClash { var: Var, atom: usize },
    #[error("nominal `{var}` has no pro, name, def or indef atom")]
    Undeclared { var: Var, atom: usize },
    #[error("`{var}` is not a declared event")]
    NotAnEvent { var: Var, atom: usize },
    #[error("clause `{event}` has more than one {gf:?}")]
    DuplicateFunction { event: Var, gf: GramFunction, atom: usize },
}

impl WellFormednessError {
    pub fn atom(&self) -> Option<usize> {
        match self {
            WellFormednessError::Empty => None,
            WellFormednessError::DuplicateVariable { atom, .. }
            | WellFormednessError::SortClash { atom, .. }
            | WellFormednessError::Undeclared { atom, .. }
            | WellFormednessError::NotAnEvent { atom, .. }
            | WellFormednessError::DuplicateFunction { atom, .. } => Some(*atom),
        }
    }
}

/// Underspecified logical form of one utterance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ilf {
    mood: Mood,
    tense: Option<Tense>,
    atoms: Vec<Atom>,
    surface: SurfaceInfo,
}

impl Ilf {
    /// Validates the atoms and derives the surface annotation.
    pub fn new(mood: Mood, tense: Option<Tense>, atoms: Vec<Atom>) -> Result<Self, WellFormednessError> {
        if atoms.is_empty() {
            return Err(WellFormednessError::Empty);
        }
        let mut events: BTreeMap<&Var, usize> = BTreeMap::new();
        for (i, atom) in atoms.iter().enumerate() {
            if let Atom::Event { var, .. } = atom {
                if events.insert(var, events.len()).is_some() {
                    return Err(WellFormednessError::DuplicateVariable { var: var.clone(), atom: i });
                }
            }
        }
        let mut declared: BTreeMap<&Var, ExprType> = BTreeMap::new();
        for (i, atom) in atoms.iter().enumerate() {
            if let Some((var, ty)) = atom.declared_nominal() {
                if events.contains_key(var) {
                    return Err(WellFormednessError::SortClash { var: var.clone(), atom: i });
                }
                if declared.insert(var, ty).is_some() {
                    return Err(WellFormednessError::DuplicateVariable { var: var.clone(), atom: i });
                }
            }
        }

        let mut order: Vec<&Var> = Vec::new();
        let mut functions: BTreeMap<&Var, (usize, GramFunction)> = BTreeMap::new();
        let mut taken: BTreeSet<(&Var, GramFunction)> = BTreeSet::new();
        for (i, atom) in atoms.iter().enumerate() {
            let nominal = |v: &Var| -> Result<(), WellFormednessError> {
                if events.contains_key(v) {
                    Err(WellFormednessError::SortClash { var: v.clone(), atom: i })
                } else if !declared.contains_key(v) {
                    Err(WellFormednessError::Undeclared { var: v.clone(), atom: i })
                } else {
                    Ok(())
                }
            };
            let event = |v: &Var| -> Result<usize, WellFormednessError> {
                events
                    .get(v)
                    .copied()
                    .ok_or_else(|| WellFormednessError::NotAnEvent { var: v.clone(), atom: i })
            };
            match atom {
                Atom::Event { .. } => {}
                Atom::Role { gf, event: e, arg, .. } => {
                    let depth = event(e)?;
                    nominal(arg)?;
                    if matches!(gf, GramFunction::Subject | GramFunction::Object) && !taken.insert((e, *gf)) {
                        return Err(WellFormednessError::DuplicateFunction { event: e.clone(), gf: *gf, atom: i });
                    }
                    let depth = depth.min(1);
                    let better = functions
                        .get(arg)
                        .is_none_or(|&(d, g)| (depth, gf.rank()) < (d, g.rank()));
                    if better {
                        functions.insert(arg, (depth, *gf));
                    }
                    if !order.contains(&arg) {
                        order.push(arg);
                    }
                }
                Atom::Adverb { event: e, .. } => {
                    event(e)?;
                }
                other => {
                    for v in other.vars() {
                        nominal(v)?;
                        if !order.contains(&v) {
                            order.push(v);
                        }
                    }
                }
            }
        }
        let nominals = order
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let (depth, gf) = functions.get(v).copied().unwrap_or((0, GramFunction::Other));
                NominalInfo { var: (*v).clone(), gf, expr_type: declared[v], position: i + 1, depth }
            })
            .collect();
        let surface = SurfaceInfo { nominals };
        Ok(Ilf { mood, tense, atoms, surface })
    }

    pub fn mood(&self) -> Mood {
        self.mood
    }

    pub fn tense(&self) -> Option<Tense> {
        self.tense
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn surface(&self) -> &SurfaceInfo {
        &self.surface
    }

    /// Pronoun variables in linear order with their features.
    pub fn pronouns(&self) -> Vec<(Var, Features)> {
        self.surface
            .pronouns()
            .filter_map(|n| {
                self.atoms.iter().find_map(|a| match a {
                    Atom::Pro { var, gender, number } if var == &n.var => {
                        Some((var.clone(), Features::new(*gender, *number)))
                    }
                    _ => None,
                })
            })
            .collect()
    }

    /// Accumulated gender/number annotation of a nominal variable.
    pub fn features_of(&self, var: &Var) -> Features {
        self.atoms.iter().fold(Features::default(), |acc, a| match a {
            Atom::Pro { var: v, gender, number } if v == var => acc.merge(&Features::new(*gender, *number)),
            Atom::Name { var: v, features, .. } | Atom::Noun { var: v, features, .. } if v == var => {
                acc.merge(features)
            }
            _ => acc,
        })
    }

    pub fn adverbs(&self) -> impl Iterator<Item = (&Var, AdverbTrigger)> {
        self.atoms.iter().filter_map(|a| match a {
            Atom::Adverb { event, trigger } => Some((event, *trigger)),
            _ => None,
        })
    }

    pub fn has_adverb(&self) -> bool {
        self.adverbs().next().is_some()
    }
}

/// Conventional English form of a pronoun, for reports.
pub fn pronoun_word(features: Features, gf: GramFunction) -> &'static str {
    let subject = gf == GramFunction::Subject;
    match (features.number, features.gender) {
        (Some(Number::Pl), _) => {
            if subject {
                "they"
            } else {
                "them"
            }
        }
        (_, Some(Gender::Female)) => {
            if subject {
                "she"
            } else {
                "her"
            }
        }
        (_, Some(Gender::Neuter)) => "it",
        _ => {
            if subject {
                "he"
            } else {
                "him"
            }
        }
    }
}
