use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{AdverbTrigger, Atom, Features, Gender, GramFunction, Ilf, Mood, Number, Tense, Var};
use crate::sexpr::{self, Pos, Sexp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IlfError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: missing mood (expected decl, interrog or imper)")]
    MissingMood { line: usize, column: usize },
    #[error("{line}:{column}: variable `{var}` declared more than once")]
    DuplicateVariable { line: usize, column: usize, var: String },
    #[error("{line}:{column}: {message}")]
    Invalid { line: usize, column: usize, message: String },
}

impl IlfError {
    pub fn line(&self) -> usize {
        match self {
            IlfError::Syntax { line, .. }
            | IlfError::MissingMood { line, .. }
            | IlfError::DuplicateVariable { line, .. }
            | IlfError::Invalid { line, .. } => *line,
        }
    }

    fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        IlfError::Syntax { line: pos.line, column: pos.column, message: message.into() }
    }
}

impl From<sexpr::ReadError> for IlfError {
    fn from(e: sexpr::ReadError) -> Self {
        IlfError::syntax(e.pos, e.message)
    }
}

/// Parses one utterance.
pub fn parse_ilf(text: &str) -> Result<Ilf, IlfError> {
    parse_ilf_at(text, 1)
}

/// Parses a discourse file: one utterance per line, `;` lines are comments.
pub fn parse_discourse(text: &str) -> Result<Vec<Ilf>, IlfError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with(';')
        })
        .map(|(i, l)| parse_ilf_at(l, i + 1))
        .collect()
}

fn parse_ilf_at(text: &str, first_line: usize) -> Result<Ilf, IlfError> {
    let exprs = sexpr::read_all_at(text, first_line)?;
    let top = match exprs.as_slice() {
        [one] => one,
        [] => {
            return Err(IlfError::syntax(Pos { line: first_line, column: 1 }, "empty input"));
        }
        [_, second, ..] => return Err(IlfError::syntax(second.pos(), "expected a single utterance")),
    };
    let items = top.as_list().ok_or_else(|| IlfError::syntax(top.pos(), "utterance must be a list"))?;
    let mood = match items.first().and_then(Sexp::as_symbol) {
        Some("decl") => Mood::Decl,
        Some("interrog") => Mood::Interrog,
        Some("imper") => Mood::Imper,
        _ => {
            let pos = items.first().map_or(top.pos(), Sexp::pos);
            return Err(IlfError::MissingMood { line: pos.line, column: pos.column });
        }
    };
    let rest = &items[1..];
    let (tense, body) = match rest {
        [wrapped] if matches!(wrapped.head(), Some("past" | "pres")) => {
            let inner = wrapped.as_list().unwrap_or_default();
            let tense = if inner[0].as_symbol() == Some("past") { Tense::Past } else { Tense::Pres };
            (Some(tense), &inner[1..])
        }
        _ => (None, rest),
    };
    if body.is_empty() {
        return Err(IlfError::syntax(top.pos(), "utterance needs at least one atom"));
    }
    let mut atoms = Vec::with_capacity(body.len());
    for e in body {
        if matches!(e.head(), Some("past" | "pres")) {
            return Err(IlfError::syntax(e.pos(), "tense must wrap all atoms of the utterance"));
        }
        if matches!(e.head(), Some("decl" | "interrog" | "imper")) {
            return Err(IlfError::syntax(e.pos(), "more than one mood"));
        }
        atoms.push(parse_atom(e)?);
    }
    let positions: Vec<Pos> = body.iter().map(Sexp::pos).collect();
    Ilf::new(mood, tense, atoms).map_err(|err| {
        let pos = err.atom().map_or(top.pos(), |i| positions[i]);
        match err {
            super::WellFormednessError::DuplicateVariable { var, .. } => {
                IlfError::DuplicateVariable { line: pos.line, column: pos.column, var: var.0 }
            }
            other => IlfError::Invalid { line: pos.line, column: pos.column, message: other.to_string() },
        }
    })
}

fn parse_atom(e: &Sexp) -> Result<Atom, IlfError> {
    let items = e.as_list().ok_or_else(|| IlfError::syntax(e.pos(), "expected an atom list"))?;
    let head = items
        .first()
        .and_then(Sexp::as_symbol)
        .ok_or_else(|| IlfError::syntax(e.pos(), "atom must start with a symbol"))?;
    let args = &items[1..];
    let arity = |n: core::ops::RangeInclusive<usize>| -> Result<(), IlfError> {
        if n.contains(&args.len()) {
            Ok(())
        } else {
            Err(IlfError::syntax(e.pos(), format!("`{head}` takes {} arguments, got {}", describe(&n), args.len())))
        }
    };
    let atom = match head {
        "ev" => {
            arity(2..=2)?;
            Atom::Event { var: var(&args[0])?, pred: symbol(&args[1])? }
        }
        "role" => {
            arity(4..=4)?;
            Atom::Role { theta: symbol(&args[0])?, gf: gram_function(&args[1])?, event: var(&args[2])?, arg: var(&args[3])? }
        }
        "pro" => {
            arity(3..=3)?;
            Atom::Pro { var: var(&args[0])?, gender: gender(&args[1])?, number: number(&args[2])? }
        }
        "name" => {
            arity(2..=4)?;
            let name = match &args[1] {
                Sexp::Str(s, _) => s.clone(),
                other => return Err(IlfError::syntax(other.pos(), "name must be a string literal")),
            };
            Atom::Name { var: var(&args[0])?, name, features: features(e, &args[2..])? }
        }
        "def" => {
            arity(1..=1)?;
            Atom::Definite { var: var(&args[0])? }
        }
        "indef" => {
            arity(2..=2)?;
            Atom::Indefinite { number: number(&args[0])?, var: var(&args[1])? }
        }
        "noun" => {
            arity(2..=4)?;
            Atom::Noun { var: var(&args[0])?, pred: symbol(&args[1])?, features: features(e, &args[2..])? }
        }
        "nn" => {
            arity(2..=2)?;
            Atom::NnRelation { var: var(&args[0])?, pred: symbol(&args[1])? }
        }
        "adv" => {
            arity(2..=2)?;
            let trigger = match args[1].as_symbol() {
                Some("too") => AdverbTrigger::Too,
                Some("back") => AdverbTrigger::Back,
                _ => return Err(IlfError::syntax(args[1].pos(), "adverb must be `too` or `back`")),
            };
            Atom::Adverb { event: var(&args[0])?, trigger }
        }
        other => return Err(IlfError::syntax(e.pos(), format!("unknown atom `{other}`"))),
    };
    Ok(atom)
}

fn describe(n: &core::ops::RangeInclusive<usize>) -> String {
    if n.start() == n.end() {
        format!("{}", n.start())
    } else {
        format!("{} to {}", n.start(), n.end())
    }
}

fn symbol(e: &Sexp) -> Result<String, IlfError> {
    e.as_symbol().map(ToString::to_string).ok_or_else(|| IlfError::syntax(e.pos(), "expected a symbol"))
}

fn var(e: &Sexp) -> Result<Var, IlfError> {
    let s = symbol(e)?;
    let ok = s.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(Var(s))
    } else {
        Err(IlfError::syntax(e.pos(), format!("`{s}` is not a variable")))
    }
}

fn gram_function(e: &Sexp) -> Result<GramFunction, IlfError> {
    match e.as_symbol() {
        Some("subj") => Ok(GramFunction::Subject),
        Some("obj") => Ok(GramFunction::Object),
        Some("obj2") => Ok(GramFunction::Object2),
        Some("other") => Ok(GramFunction::Other),
        _ => Err(IlfError::syntax(e.pos(), "grammatical function must be subj, obj, obj2 or other")),
    }
}

fn gender(e: &Sexp) -> Result<Gender, IlfError> {
    match e.as_symbol() {
        Some("male") => Ok(Gender::Male),
        Some("female") => Ok(Gender::Female),
        Some("neuter") => Ok(Gender::Neuter),
        _ => Err(IlfError::syntax(e.pos(), "gender must be male, female or neuter")),
    }
}

fn number(e: &Sexp) -> Result<Number, IlfError> {
    match e.as_symbol() {
        Some("sg") => Ok(Number::Sg),
        Some("pl") => Ok(Number::Pl),
        _ => Err(IlfError::syntax(e.pos(), "number must be sg or pl")),
    }
}

fn features(atom: &Sexp, tail: &[Sexp]) -> Result<Features, IlfError> {
    match tail {
        [] => Ok(Features::default()),
        [g, n] => Ok(Features::new(gender(g)?, number(n)?)),
        _ => Err(IlfError::syntax(atom.pos(), "feature annotation needs both gender and number")),
    }
}
