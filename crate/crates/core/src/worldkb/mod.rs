//! Defeasible commonsense knowledge (WK).
//!
//! Rules are applied one step over a fact base built from the discourse
//! model plus one hypothesized interpretation. Conflicts between firing
//! rules are settled by specificity (a rule silences any transitively more
//! general parent whose conclusion it contradicts) and by strength (an
//! indefeasible conclusion overrides a defeasible one). Whatever conflict
//! remains is a Nixon diamond.

mod parse;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::context::DiscourseModel;
use crate::ilf::{EntityId, Ilf, ResolvedAtom, ResolvedLf, Var};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Pattern {
    fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Const(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub pattern: Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strength {
    Indefeasible,
    Defeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub strength: Strength,
    /// Conjunction of patterns.
    pub antecedent: Vec<Pattern>,
    pub consequent: Literal,
    /// Ids of the rules this one is more specific than.
    pub more_specific_than: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(pred: impl Into<String>, args: impl IntoIterator<Item = impl Into<String>>) -> Self {
        GroundAtom { pred: pred.into(), args: args.into_iter().map(Into::into).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundLiteral {
    pub positive: bool,
    pub atom: GroundAtom,
}

impl GroundLiteral {
    pub fn conflicts_with(&self, other: &GroundLiteral) -> bool {
        self.atom == other.atom && self.positive != other.positive
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.pred)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for GroundLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "(not {})", self.atom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KbError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("duplicate rule id `{0}`")]
    DuplicateRule(String),
    #[error("rule `{rule}` names unknown parent `{parent}`")]
    UnknownParent { rule: String, parent: String },
    #[error("specificity cycle through rule `{0}`")]
    SpecificityCycle(String),
    #[error("antecedent of `{rule}` does not entail that of its parent `{parent}`")]
    NotMoreSpecific { rule: String, parent: String },
    #[error("consequent of `{rule}` uses `?{var}`, which its antecedent never binds")]
    UnboundVariable { rule: String, var: String },
    #[error("alias cycle through `{0}`")]
    AliasCycle(String),
}

/// A validated rule base with its ground facts and predicate aliases.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    rules: Vec<Rule>,
    facts: BTreeSet<GroundAtom>,
    aliases: BTreeMap<String, String>,
    /// Transitive specificity parents, parallel to `rules`.
    ancestors: Vec<BTreeSet<usize>>,
}

impl KnowledgeBase {
    pub fn new(
        rules: Vec<Rule>,
        facts: BTreeSet<GroundAtom>,
        aliases: BTreeMap<String, String>,
    ) -> Result<Self, KbError> {
        for start in aliases.keys() {
            let mut seen = BTreeSet::from([start.as_str()]);
            let mut cur = start.as_str();
            while let Some(next) = aliases.get(cur) {
                if !seen.insert(next.as_str()) {
                    return Err(KbError::AliasCycle(start.clone()));
                }
                cur = next;
            }
        }

        let mut index = BTreeMap::new();
        for (i, r) in rules.iter().enumerate() {
            if index.insert(r.id.as_str(), i).is_some() {
                return Err(KbError::DuplicateRule(r.id.clone()));
            }
        }
        let mut parents = Vec::with_capacity(rules.len());
        for r in &rules {
            let bound: BTreeSet<&str> = r.antecedent.iter().flat_map(Pattern::vars).collect();
            if let Some(v) = r.consequent.pattern.vars().find(|v| !bound.contains(v)) {
                return Err(KbError::UnboundVariable { rule: r.id.clone(), var: v.into() });
            }
            let mut ps = BTreeSet::new();
            for p in &r.more_specific_than {
                let Some(&j) = index.get(p.as_str()) else {
                    return Err(KbError::UnknownParent { rule: r.id.clone(), parent: p.clone() });
                };
                ps.insert(j);
            }
            parents.push(ps);
        }

        let mut kb = KnowledgeBase { rules, facts: BTreeSet::new(), aliases, ancestors: Vec::new() };
        kb.facts = facts.into_iter().map(|a| kb.canonical_atom(a)).collect();
        kb.ancestors = (0..kb.rules.len())
            .map(|i| {
                let mut seen = BTreeSet::new();
                let mut stack: Vec<usize> = parents[i].iter().copied().collect();
                while let Some(j) = stack.pop() {
                    if j == i {
                        return Err(KbError::SpecificityCycle(kb.rules[i].id.clone()));
                    }
                    if seen.insert(j) {
                        stack.extend(parents[j].iter().copied());
                    }
                }
                Ok(seen)
            })
            .collect::<Result<_, _>>()?;

        for (i, ps) in parents.iter().enumerate() {
            for &j in ps {
                let child: Vec<Pattern> = kb.rules[i].antecedent.iter().map(|p| kb.canonical_pattern(p)).collect();
                let parent: Vec<Pattern> = kb.rules[j].antecedent.iter().map(|p| kb.canonical_pattern(p)).collect();
                if !subsumes(&parent, &child) {
                    return Err(KbError::NotMoreSpecific { rule: kb.rules[i].id.clone(), parent: kb.rules[j].id.clone() });
                }
            }
        }
        Ok(kb)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn facts(&self) -> &BTreeSet<GroundAtom> {
        &self.facts
    }

    pub fn aliases(&self) -> &BTreeMap<String, String> {
        &self.aliases
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// True if rule `a` is transitively more specific than rule `b`.
    pub fn more_specific(&self, a: &str, b: &str) -> bool {
        let pos = |id: &str| self.rules.iter().position(|r| r.id == id);
        matches!((pos(a), pos(b)), (Some(i), Some(j)) if self.ancestors[i].contains(&j))
    }

    /// Follows aliases to the canonical predicate name.
    pub fn canonical<'a>(&'a self, pred: &'a str) -> &'a str {
        let mut cur = pred;
        while let Some(next) = self.aliases.get(cur) {
            cur = next;
        }
        cur
    }

    fn canonical_atom(&self, a: GroundAtom) -> GroundAtom {
        GroundAtom { pred: self.canonical(&a.pred).into(), args: a.args }
    }

    fn canonical_pattern(&self, p: &Pattern) -> Pattern {
        Pattern { pred: self.canonical(&p.pred).into(), args: p.args.clone() }
    }

    /// Copy with one more rule, revalidated.
    pub fn with_rule(&self, rule: Rule) -> Result<Self, KbError> {
        let mut rules = self.rules.clone();
        rules.push(rule);
        KnowledgeBase::new(rules, self.facts.clone(), self.aliases.clone())
    }

    /// Copy without the named rule; dangling parent links are dropped.
    pub fn without_rule(&self, id: &str) -> Self {
        let rules = self
            .rules
            .iter()
            .filter(|r| r.id != id)
            .cloned()
            .map(|mut r| {
                r.more_specific_than.retain(|p| p != id);
                r
            })
            .collect();
        KnowledgeBase::new(rules, self.facts.clone(), self.aliases.clone())
            .expect("removing a rule preserves validity")
    }
}

/// Finds a substitution mapping every `general` pattern onto some
/// `specific` pattern, so that the specific conjunction entails the general.
fn subsumes(general: &[Pattern], specific: &[Pattern]) -> bool {
    fn go<'a>(general: &'a [Pattern], specific: &'a [Pattern], theta: &mut BTreeMap<&'a str, &'a Term>) -> bool {
        let Some((g, rest)) = general.split_first() else { return true };
        for s in specific.iter().filter(|s| s.pred == g.pred && s.args.len() == g.args.len()) {
            let mut added = Vec::new();
            let ok = g.args.iter().zip(&s.args).all(|(gt, st)| match gt {
                Term::Const(_) => gt == st,
                Term::Var(v) => match theta.get(v.as_str()) {
                    Some(bound) => *bound == st,
                    None => {
                        theta.insert(v, st);
                        added.push(v.as_str());
                        true
                    }
                },
            });
            if ok && go(rest, specific, theta) {
                return true;
            }
            for v in added {
                theta.remove(v);
            }
        }
        false
    }
    go(general, specific, &mut BTreeMap::new())
}

/// Per-assignment standing of the hypothesized proposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Support {
    Supported,
    Opposed,
    /// Both the proposition and its negation survive conflict resolution.
    Contested,
    Neutral,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WkOverall {
    Determinate(usize),
    Indeterminate(BTreeSet<usize>),
    Abstain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActivationStatus {
    /// Survives and bears on the hypothesized proposition.
    Active,
    /// Defeated by a more specific rule with the contrary conclusion.
    Silenced { by: String },
    /// Defeated by an indefeasible rule with the contrary conclusion.
    Overridden { by: String },
    /// Survives, but so does a contrary conclusion.
    Contested,
    /// Survives, but concludes nothing about the hypothesis.
    Irrelevant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activation {
    pub rule: String,
    pub conclusion: GroundLiteral,
    pub status: ActivationStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WkVerdict {
    /// Parallel to the hypotheses.
    pub per_assignment: Vec<Support>,
    pub overall: WkOverall,
    pub nixon: bool,
    /// Rule instances that fired, per hypothesis.
    pub activations: Vec<Vec<Activation>>,
}

impl WkVerdict {
    pub fn supported(&self) -> BTreeSet<usize> {
        self.indices(Support::Supported)
    }

    pub fn opposed(&self) -> BTreeSet<usize> {
        self.indices(Support::Opposed)
    }

    fn indices(&self, s: Support) -> BTreeSet<usize> {
        self.per_assignment.iter().enumerate().filter(|(_, x)| **x == s).map(|(i, _)| i).collect()
    }
}

type Facts = BTreeMap<String, BTreeSet<Vec<String>>>;

fn add_fact(facts: &mut Facts, kb: &KnowledgeBase, pred: &str, args: Vec<String>) {
    facts.entry(kb.canonical(pred).into()).or_default().insert(args);
}

fn fact_base(hyp: &ResolvedLf, model: &DiscourseModel, kb: &KnowledgeBase) -> Facts {
    let mut facts = Facts::new();
    for a in kb.facts() {
        add_fact(&mut facts, kb, &a.pred, a.args.clone());
    }
    let evs = model.eventualities().iter().cloned().chain(hyp.eventualities());
    for ev in evs {
        let mut args = alloc::vec![ev.id.clone()];
        args.extend(ev.participants().into_iter().map(|e| e.0.clone()));
        add_fact(&mut facts, kb, &ev.pred, args);
    }
    for e in model.entities().chain(&hyp.introduced) {
        for p in &e.properties {
            add_fact(&mut facts, kb, p, alloc::vec![e.id.0.clone()]);
        }
    }
    for a in &hyp.atoms {
        if let ResolvedAtom::Noun { arg, pred, .. } = a {
            add_fact(&mut facts, kb, pred, alloc::vec![arg.entity.0.clone()]);
        }
    }
    facts
}

/// Propositions the hypothesis asserts: each eventuality without its event
/// argument.
fn propositions(hyp: &ResolvedLf, kb: &KnowledgeBase) -> BTreeSet<GroundAtom> {
    hyp.eventualities()
        .iter()
        .map(|ev| GroundAtom {
            pred: kb.canonical(&ev.pred).into(),
            args: ev.participants().into_iter().map(|e| e.0.clone()).collect(),
        })
        .collect()
}

fn matches<'a>(patterns: &'a [Pattern], facts: &Facts, kb: &KnowledgeBase) -> Vec<BTreeMap<&'a str, String>> {
    let mut out = alloc::vec![BTreeMap::new()];
    for p in patterns {
        let Some(rows) = facts.get(kb.canonical(&p.pred)) else { return Vec::new() };
        let mut next = Vec::new();
        for theta in &out {
            'row: for row in rows.iter().filter(|r| r.len() == p.args.len()) {
                let mut t = theta.clone();
                for (term, val) in p.args.iter().zip(row) {
                    match term {
                        Term::Const(c) if c != val => continue 'row,
                        Term::Const(_) => {}
                        Term::Var(v) => match t.get(v.as_str()) {
                            Some(b) if b != val => continue 'row,
                            Some(_) => {}
                            None => {
                                t.insert(v.as_str(), val.clone());
                            }
                        },
                    }
                }
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn instantiate(lit: &Literal, theta: &BTreeMap<&str, String>, kb: &KnowledgeBase) -> GroundLiteral {
    let args = lit
        .pattern
        .args
        .iter()
        .map(|t| match t {
            Term::Const(c) => c.clone(),
            Term::Var(v) => theta[v.as_str()].clone(),
        })
        .collect();
    GroundLiteral { positive: lit.positive, atom: GroundAtom { pred: kb.canonical(&lit.pattern.pred).into(), args } }
}

/// One-step rule application with specificity and strength resolution.
fn evaluate(hyp: &ResolvedLf, model: &DiscourseModel, kb: &KnowledgeBase) -> (Support, Vec<Activation>) {
    let facts = fact_base(hyp, model, kb);
    let mut fired: BTreeSet<(usize, GroundLiteral)> = BTreeSet::new();
    for (i, r) in kb.rules.iter().enumerate() {
        for theta in matches(&r.antecedent, &facts, kb) {
            fired.insert((i, instantiate(&r.consequent, &theta, kb)));
        }
    }
    let fired: Vec<(usize, GroundLiteral)> = fired.into_iter().collect();

    let mut statuses: Vec<Option<ActivationStatus>> = fired
        .iter()
        .map(|(i, c)| {
            fired
                .iter()
                .find(|(j, d)| kb.ancestors[*j].contains(i) && d.conflicts_with(c))
                .map(|(j, _)| ActivationStatus::Silenced { by: kb.rules[*j].id.clone() })
        })
        .collect();
    for (k, (i, c)) in fired.iter().enumerate() {
        if statuses[k].is_some() || kb.rules[*i].strength == Strength::Indefeasible {
            continue;
        }
        let by = fired.iter().enumerate().find(|(m, (j, d))| {
            statuses[*m].is_none() && kb.rules[*j].strength == Strength::Indefeasible && d.conflicts_with(c)
        });
        if let Some((_, (j, _))) = by {
            statuses[k] = Some(ActivationStatus::Overridden { by: kb.rules[*j].id.clone() });
        }
    }

    let props = propositions(hyp, kb);
    let surviving: Vec<&GroundLiteral> = fired
        .iter()
        .zip(&statuses)
        .filter(|(_, s)| s.is_none())
        .map(|((_, c), _)| c)
        .filter(|c| props.contains(&c.atom))
        .collect();
    let contested = |c: &GroundLiteral| surviving.iter().any(|d| d.conflicts_with(c));

    let activations = fired
        .iter()
        .zip(statuses)
        .map(|((i, c), s)| Activation {
            rule: kb.rules[*i].id.clone(),
            conclusion: c.clone(),
            status: s.unwrap_or(if !props.contains(&c.atom) {
                ActivationStatus::Irrelevant
            } else if contested(c) {
                ActivationStatus::Contested
            } else {
                ActivationStatus::Active
            }),
        })
        .collect();

    let pos = surviving.iter().any(|c| c.positive);
    let neg = surviving.iter().any(|c| !c.positive);
    let support = match (pos, neg) {
        (true, true) => Support::Contested,
        (true, false) => Support::Supported,
        (false, true) => Support::Opposed,
        (false, false) => Support::Neutral,
    };
    (support, activations)
}

/// WK verdict over already specialized hypotheses, one per assignment.
pub fn wk_evaluate(hypotheses: &[ResolvedLf], model: &DiscourseModel, kb: &KnowledgeBase) -> WkVerdict {
    let (per_assignment, activations): (Vec<Support>, Vec<Vec<Activation>>) =
        hypotheses.iter().map(|h| evaluate(h, model, kb)).unzip();
    let nixon = per_assignment.contains(&Support::Contested);
    let non_opposed: BTreeSet<usize> =
        (0..per_assignment.len()).filter(|i| per_assignment[*i] != Support::Opposed).collect();
    let supported: Vec<usize> =
        (0..per_assignment.len()).filter(|i| per_assignment[*i] == Support::Supported).collect();
    let overall = if per_assignment.iter().all(|s| *s == Support::Neutral) {
        WkOverall::Abstain
    } else if nixon {
        WkOverall::Indeterminate(non_opposed)
    } else {
        match supported.as_slice() {
            [only] => WkOverall::Determinate(*only),
            [] => WkOverall::Indeterminate(non_opposed),
            many => WkOverall::Indeterminate(many.iter().copied().collect()),
        }
    };
    WkVerdict { per_assignment, overall, nixon, activations }
}

/// WK verdict for each candidate assignment of `current`. Assignments that
/// cannot be specialized count as neutral.
pub fn wk_preference(
    assignments: &[BTreeMap<Var, EntityId>],
    current: &Ilf,
    model: &DiscourseModel,
    kb: &KnowledgeBase,
) -> WkVerdict {
    let hyps: Vec<Option<ResolvedLf>> =
        assignments.iter().map(|a| crate::ilf::specialize(current, a, model).ok()).collect();
    let ok: Vec<ResolvedLf> = hyps.iter().flatten().cloned().collect();
    let inner = wk_evaluate(&ok, model, kb);
    if ok.len() == hyps.len() {
        return inner;
    }
    // Re-spread over the original indices.
    let mut per_assignment = Vec::with_capacity(hyps.len());
    let mut activations = Vec::with_capacity(hyps.len());
    let mut map = Vec::with_capacity(ok.len());
    let mut k = 0;
    for (i, h) in hyps.iter().enumerate() {
        if h.is_some() {
            per_assignment.push(inner.per_assignment[k]);
            activations.push(inner.activations[k].clone());
            map.push(i);
            k += 1;
        } else {
            per_assignment.push(Support::Neutral);
            activations.push(Vec::new());
        }
    }
    let overall = match inner.overall {
        WkOverall::Determinate(i) => WkOverall::Determinate(map[i]),
        WkOverall::Indeterminate(s) => WkOverall::Indeterminate(s.into_iter().map(|i| map[i]).collect()),
        WkOverall::Abstain => WkOverall::Abstain,
    };
    WkVerdict { per_assignment, overall, nixon: inner.nixon, activations }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match &self.status {
            ActivationStatus::Active => String::from("active"),
            ActivationStatus::Silenced { by } => format!("silenced by {by}"),
            ActivationStatus::Overridden { by } => format!("overridden by {by}"),
            ActivationStatus::Contested => String::from("contested"),
            ActivationStatus::Irrelevant => String::from("irrelevant"),
        };
        write!(f, "{} => {} [{status}]", self.rule, self.conclusion)
    }
}
