use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{GroundAtom, KbError, KnowledgeBase, Literal, Pattern, Rule, Strength, Term};
use crate::sexpr::{self, Sexp};

fn syntax(e: &Sexp, message: impl Into<String>) -> KbError {
    let pos = e.pos();
    KbError::Syntax { line: pos.line, column: pos.column, message: message.into() }
}

fn symbol(e: &Sexp) -> Result<&str, KbError> {
    e.as_symbol().ok_or_else(|| syntax(e, "expected a symbol"))
}

fn term(e: &Sexp) -> Result<Term, KbError> {
    let s = symbol(e)?;
    match s.strip_prefix('?') {
        Some("") => Err(syntax(e, "empty variable name")),
        Some(v) => Ok(Term::Var(v.to_string())),
        None => Ok(Term::Const(s.to_string())),
    }
}

fn pattern(e: &Sexp) -> Result<Pattern, KbError> {
    let items = e.as_list().ok_or_else(|| syntax(e, "expected a pattern list"))?;
    let (head, args) = items.split_first().ok_or_else(|| syntax(e, "empty pattern"))?;
    let pred = symbol(head)?;
    if pred.starts_with('?') || matches!(pred, "and" | "not") {
        return Err(syntax(head, format!("`{pred}` cannot be a predicate")));
    }
    Ok(Pattern { pred: pred.to_string(), args: args.iter().map(term).collect::<Result<_, _>>()? })
}

fn antecedent(e: &Sexp) -> Result<Vec<Pattern>, KbError> {
    if e.head() == Some("and") {
        let items = &e.as_list().unwrap_or_default()[1..];
        if items.is_empty() {
            return Err(syntax(e, "`and` needs at least one pattern"));
        }
        items.iter().map(pattern).collect()
    } else {
        Ok(alloc::vec![pattern(e)?])
    }
}

fn literal(e: &Sexp) -> Result<Literal, KbError> {
    if e.head() == Some("not") {
        match e.as_list().unwrap_or_default() {
            [_, inner] => Ok(Literal { positive: false, pattern: pattern(inner)? }),
            _ => Err(syntax(e, "`not` takes exactly one pattern")),
        }
    } else {
        Ok(Literal { positive: true, pattern: pattern(e)? })
    }
}

impl KnowledgeBase {
    /// Parses the line-oriented s-expression KB format and validates it.
    pub fn parse(src: &str) -> Result<Self, KbError> {
        let mut rules = Vec::new();
        let mut facts = BTreeSet::new();
        let mut aliases = BTreeMap::new();
        for e in sexpr::read_all(src).map_err(|r| KbError::Syntax {
            line: r.pos.line,
            column: r.pos.column,
            message: r.message,
        })? {
            let items = e.as_list().ok_or_else(|| syntax(&e, "expected a declaration list"))?;
            match e.head() {
                Some("rule") => {
                    let (id, strength, ante, cons, rest) = match items {
                        [_, id, s, a, c, rest @ ..] => (id, s, a, c, rest),
                        _ => return Err(syntax(&e, "rule needs an id, a strength, an antecedent and a consequent")),
                    };
                    let strength = match symbol(strength)? {
                        "defeasible" => Strength::Defeasible,
                        "indefeasible" => Strength::Indefeasible,
                        _ => return Err(syntax(strength, "strength must be defeasible or indefeasible")),
                    };
                    let mut more_specific_than = Vec::new();
                    for r in rest {
                        match r.as_list() {
                            Some([head, parents @ ..]) if head.as_symbol() == Some("more-specific-than") && !parents.is_empty() => {
                                for p in parents {
                                    more_specific_than.push(symbol(p)?.to_string());
                                }
                            }
                            _ => return Err(syntax(r, "expected (more-specific-than ID...)")),
                        }
                    }
                    rules.push(Rule {
                        id: symbol(id)?.to_string(),
                        strength,
                        antecedent: antecedent(ante)?,
                        consequent: literal(cons)?,
                        more_specific_than,
                    });
                }
                Some("fact") => {
                    let [_, body] = items else {
                        return Err(syntax(&e, "fact takes one ground pattern"));
                    };
                    let p = pattern(body)?;
                    let args = p
                        .args
                        .iter()
                        .map(|t| match t {
                            Term::Const(c) => Ok(c.clone()),
                            Term::Var(_) => Err(syntax(body, "facts must be ground")),
                        })
                        .collect::<Result<_, _>>()?;
                    facts.insert(GroundAtom { pred: p.pred, args });
                }
                Some("alias") => {
                    let [_, from, to] = items else {
                        return Err(syntax(&e, "alias takes two predicates"));
                    };
                    aliases.insert(symbol(from)?.to_string(), symbol(to)?.to_string());
                }
                _ => return Err(syntax(&e, "expected rule, fact or alias")),
            }
        }
        KnowledgeBase::new(rules, facts, aliases)
    }
}
