use core::fmt;

use super::{AdverbTrigger, Atom, Features, Gender, GramFunction, Ilf, Mood, Number, Tense};
use crate::sexpr::write_str;

impl fmt::Display for Mood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mood::Decl => "decl",
            Mood::Interrog => "interrog",
            Mood::Imper => "imper",
        })
    }
}

impl fmt::Display for Tense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tense::Past => "past",
            Tense::Pres => "pres",
        })
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::Male => "male",
            Gender::Female => "female",
            Gender::Neuter => "neuter",
        })
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Number::Sg => "sg",
            Number::Pl => "pl",
        })
    }
}

impl fmt::Display for GramFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GramFunction::Subject => "subj",
            GramFunction::Object => "obj",
            GramFunction::Object2 => "obj2",
            GramFunction::Other => "other",
        })
    }
}

impl fmt::Display for AdverbTrigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdverbTrigger::Too => "too",
            AdverbTrigger::Back => "back",
        })
    }
}

fn write_features(f: &mut fmt::Formatter<'_>, features: &Features) -> fmt::Result {
    // The concrete syntax only has the two-slot form, so partial
    // annotations print as absent.
    if let (Some(g), Some(n)) = (features.gender, features.number) {
        write!(f, " {g} {n}")?;
    }
    Ok(())
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Event { var, pred } => write!(f, "(ev {var} {pred})"),
            Atom::Role { theta, gf, event, arg } => write!(f, "(role {theta} {gf} {event} {arg})"),
            Atom::Pro { var, gender, number } => write!(f, "(pro {var} {gender} {number})"),
            Atom::Name { var, name, features } => {
                write!(f, "(name {var} ")?;
                write_str(f, name)?;
                write_features(f, features)?;
                f.write_str(")")
            }
            Atom::Definite { var } => write!(f, "(def {var})"),
            Atom::Indefinite { number, var } => write!(f, "(indef {number} {var})"),
            Atom::Noun { var, pred, features } => {
                write!(f, "(noun {var} {pred}")?;
                write_features(f, features)?;
                f.write_str(")")
            }
            Atom::NnRelation { var, pred } => write!(f, "(nn {var} {pred})"),
            Atom::Adverb { event, trigger } => write!(f, "(adv {event} {trigger})"),
        }
    }
}

impl fmt::Display for Ilf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.mood())?;
        if let Some(t) = self.tense() {
            write!(f, " ({t}")?;
        }
        for atom in self.atoms() {
            write!(f, " {atom}")?;
        }
        if self.tense().is_some() {
            f.write_str(")")?;
        }
        f.write_str(")")
    }
}
