//! The pragmatics engine: `[LF;ATT];WK` under the SEM filter.
//!
//! Every full assignment of referents to the pronouns of an utterance is a
//! hypothesis. SEM removes hypotheses outright. LF and ATT rank the rest,
//! ATT's verdict replacing LF's wherever ATT distinguishes two hypotheses
//! and LF breaking ATT's ties. WK, when it has anything to say, overrides
//! the grammatical ranking in turn.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::attention::att_preference;
use crate::context::{Context, ContextError, DiscourseModel};
use crate::ilf::{candidate_referents, specialize, EntityId, GramFunction, Ilf, ResolvedLf, SpecializeError, Var};
use crate::parallelism::para_preference;
use crate::semrules::{sem_filter, SemDecision, SemError};
use crate::worldkb::{wk_evaluate, WkOverall, WkVerdict};

/// Referent per pronoun variable.
pub type Assignment = BTreeMap<Var, EntityId>;

/// Ranked groups of assignments, most preferred first.
pub type Ranking = Vec<Vec<Assignment>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Determinate,
    Ambiguous,
    InfelicitousTie,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Winner {
    Sem,
    Att,
    Lf,
    AttLf,
    Wk,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Sem,
    Lf,
    Att,
    Wk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Filter,
    Set,
    Override,
    Join,
    Tie,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Determinate => "determinate",
            Status::Ambiguous => "ambiguous",
            Status::InfelicitousTie => "infelicitous-tie",
        }
    }
}

impl Winner {
    pub fn as_str(self) -> &'static str {
        match self {
            Winner::Sem => "SEM",
            Winner::Att => "ATT",
            Winner::Lf => "LF",
            Winner::AttLf => "ATT+LF",
            Winner::Wk => "WK",
            Winner::None => "none",
        }
    }
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Sem => "SEM",
            Source::Lf => "LF",
            Source::Att => "ATT",
            Source::Wk => "WK",
        }
    }
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Filter => "filter",
            Action::Set => "set",
            Action::Override => "override",
            Action::Join => "join",
            Action::Tie => "tie",
        }
    }
}

macro_rules! display_via_as_str {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    )*};
}
display_via_as_str!(Status, Winner, Source, Action);

macro_rules! from_str_via_as_str {
    ($t:ty, [$($v:expr),*]) => {
        impl core::str::FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                [$($v),*].into_iter().find(|v| v.as_str() == s).ok_or_else(|| alloc::format!("unknown value `{s}`"))
            }
        }
    };
}
from_str_via_as_str!(Status, [Status::Determinate, Status::Ambiguous, Status::InfelicitousTie]);
from_str_via_as_str!(Winner, [Winner::Sem, Winner::Att, Winner::Lf, Winner::AttLf, Winner::Wk, Winner::None]);
from_str_via_as_str!(Source, [Source::Sem, Source::Lf, Source::Att, Source::Wk]);
from_str_via_as_str!(Action, [Action::Filter, Action::Set, Action::Override, Action::Join, Action::Tie]);

/// One pipeline step. `verdict` holds ranked groups of assignment labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub source: Source,
    pub verdict: Vec<Vec<String>>,
    pub action: Action,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "source={} verdict=", self.source)?;
        for (i, g) in self.verdict.iter().enumerate() {
            if i > 0 {
                f.write_str(">")?;
            }
            f.write_str(&g.join("/"))?;
        }
        write!(f, " action={}", self.action)
    }
}

impl core::str::FromStr for TraceStep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut fields = BTreeMap::new();
        for part in s.split(' ') {
            let (k, v) = part.split_once('=').ok_or_else(|| alloc::format!("malformed field `{part}`"))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| alloc::format!("missing `{k}`"));
        let verdict = get("verdict")?;
        Ok(TraceStep {
            source: get("source")?.parse()?,
            verdict: if verdict.is_empty() {
                Vec::new()
            } else {
                verdict.split('>').map(|g| g.split('/').map(ToString::to_string).collect()).collect()
            },
            action: get("action")?.parse()?,
        })
    }
}

/// ATT verdict over whole assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttVerdict {
    pub ranking: Ranking,
    /// True when every top-ranked assignment gives each pronoun a maximally
    /// salient referent.
    pub supported: bool,
}

/// PARA verdict over whole assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LfVerdict {
    pub ranking: Ranking,
    /// Parallel counterpart chosen for each pronoun, if any.
    pub picks: BTreeMap<Var, Option<EntityId>>,
}

impl LfVerdict {
    /// True if PARA separates at least two assignments.
    pub fn discriminates(&self) -> bool {
        self.ranking.len() > 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedGrammatical {
    pub ranking: Ranking,
    /// LF and ATT single out the same top group.
    pub joined: bool,
    /// LF narrowed a tied ATT top group.
    pub tiebreak: bool,
}

impl CombinedGrammatical {
    pub fn top(&self) -> &[Assignment] {
        self.ranking.first().map(Vec::as_slice).unwrap_or_default()
    }

    /// The single preferred assignment, if the top group is a singleton.
    pub fn pick(&self) -> Option<&Assignment> {
        match self.top() {
            [only] => Some(only),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceVerdict {
    /// Pronoun variables in linear order.
    pub pronouns: Vec<Var>,
    pub assignments: Ranking,
    pub status: Status,
    pub winner: Winner,
    pub garden_path: bool,
    pub trace: Vec<TraceStep>,
    /// Assignments the SEM filter removed, with the reason.
    pub rejected: Vec<(Assignment, String)>,
    pub grammatical: CombinedGrammatical,
    /// WK verdict over the SEM survivors, in `survivors` order.
    pub wk: WkVerdict,
    pub survivors: Vec<Assignment>,
}

impl PreferenceVerdict {
    pub fn top(&self) -> &[Assignment] {
        self.assignments.first().map(Vec::as_slice).unwrap_or_default()
    }

    /// Referents of one top-ranked assignment in pronoun order.
    pub fn referents<'a>(&'a self, a: &'a Assignment) -> impl Iterator<Item = &'a EntityId> + 'a {
        self.pronouns.iter().filter_map(move |p| a.get(p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("pronoun `{0}` has no accessible, feature-compatible referent")]
    NoCandidate(Var),
    #[error(transparent)]
    Sem(#[from] SemError),
    #[error(transparent)]
    Specialize(#[from] SpecializeError),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error("every candidate interpretation violates a presupposition")]
    AllRejected,
}

/// Cartesian product of the candidate sets in pronoun order, keeping
/// distinct pronouns disjoint in reference unless that leaves nothing.
pub fn enumerate_assignments(pronouns: &[Var], candidates: &BTreeMap<Var, BTreeSet<EntityId>>) -> Vec<Assignment> {
    let product = |distinct: bool| {
        let mut out: Vec<Assignment> = alloc::vec![Assignment::new()];
        for p in pronouns {
            let cands = candidates.get(p).cloned().unwrap_or_default();
            out = out
                .into_iter()
                .flat_map(|a| {
                    cands
                        .iter()
                        .filter(|c| !distinct || !a.values().any(|v| v == *c))
                        .map(|c| {
                            let mut b = a.clone();
                            b.insert(p.clone(), c.clone());
                            b
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        out
    };
    let distinct = product(true);
    if distinct.is_empty() {
        product(false)
    } else {
        distinct
    }
}

/// Non-dominated layering of rank vectors (lower is better); returns
/// index groups, best first.
pub fn pareto_layers(vectors: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let dominates = |u: &[usize], v: &[usize]| u.iter().zip(v).all(|(a, b)| a <= b) && u != v;
    let mut left: Vec<usize> = (0..vectors.len()).collect();
    let mut layers = Vec::new();
    while !left.is_empty() {
        let (layer, rest): (Vec<usize>, Vec<usize>) = left
            .iter()
            .partition(|&&i| !left.iter().any(|&j| dominates(&vectors[j], &vectors[i])));
        layers.push(layer);
        left = rest;
    }
    layers
}

fn to_ranking(assignments: &[Assignment], layers: &[Vec<usize>]) -> Ranking {
    layers.iter().map(|l| l.iter().map(|&i| assignments[i].clone()).collect()).collect()
}

/// ATT preference lifted from pronouns to whole assignments.
pub fn att_verdict(
    ctx: &Context,
    pronouns: &[Var],
    candidates: &BTreeMap<Var, BTreeSet<EntityId>>,
    assignments: &[Assignment],
) -> AttVerdict {
    let groups: BTreeMap<&Var, Vec<BTreeSet<EntityId>>> = pronouns
        .iter()
        .map(|p| (p, att_preference(&candidates.get(p).cloned().unwrap_or_default(), &ctx.attention)))
        .collect();
    let vectors: Vec<Vec<usize>> = assignments
        .iter()
        .map(|a| {
            pronouns
                .iter()
                .map(|p| groups[p].iter().position(|g| g.contains(&a[p])).unwrap_or(usize::MAX))
                .collect()
        })
        .collect();
    let layers = pareto_layers(&vectors);
    let supported = layers.first().is_some_and(|l| l.iter().all(|&i| vectors[i].iter().all(|r| *r == 0)));
    AttVerdict { ranking: to_ranking(assignments, &layers), supported }
}

/// PARA preference lifted from pronouns to whole assignments.
pub fn lf_verdict(
    ctx: &Context,
    ilf: &Ilf,
    pronouns: &[Var],
    candidates: &BTreeMap<Var, BTreeSet<EntityId>>,
    assignments: &[Assignment],
) -> LfVerdict {
    let picks: BTreeMap<Var, Option<EntityId>> = pronouns
        .iter()
        .map(|p| {
            let pick = ctx.lf_register.as_ref().and_then(|reg| {
                para_preference(reg, ilf.surface(), p, &candidates.get(p).cloned().unwrap_or_default())
            });
            (p.clone(), pick)
        })
        .collect();
    let vectors: Vec<Vec<usize>> = assignments
        .iter()
        .map(|a| {
            pronouns
                .iter()
                .map(|p| match &picks[p] {
                    Some(e) if *e != a[p] => 1,
                    _ => 0,
                })
                .collect()
        })
        .collect();
    LfVerdict { ranking: to_ranking(assignments, &pareto_layers(&vectors)), picks }
}

fn layer_index(ranking: &Ranking) -> Vec<(&Assignment, usize)> {
    ranking.iter().enumerate().flat_map(|(i, g)| g.iter().map(move |a| (a, i))).collect()
}

/// `LF;ATT`: lexicographic on (ATT layer, LF layer).
pub fn combine_grammatical(lf: &LfVerdict, att: &AttVerdict) -> CombinedGrammatical {
    let lf_of = layer_index(&lf.ranking);
    let lf_layer = |a: &Assignment| lf_of.iter().find(|(b, _)| *b == a).map_or(0, |(_, i)| *i);
    let mut keyed: BTreeMap<(usize, usize), Vec<Assignment>> = BTreeMap::new();
    for (a, i) in layer_index(&att.ranking) {
        keyed.entry((i, lf_layer(a))).or_default().push(a.clone());
    }
    let ranking: Ranking = keyed.into_values().collect();
    let att_top = att.ranking.first().map(Vec::as_slice).unwrap_or_default();
    let lf_top = lf.ranking.first().map(Vec::as_slice).unwrap_or_default();
    let same = |x: &[Assignment], y: &[Assignment]| x.len() == y.len() && x.iter().all(|a| y.contains(a));
    let joined = lf.discriminates() && same(att_top, lf_top);
    let tiebreak = att_top.len() > 1 && ranking.first().is_some_and(|t| t.len() < att_top.len());
    CombinedGrammatical { ranking, joined, tiebreak }
}

fn label(model: &DiscourseModel, pronouns: &[Var], a: &Assignment) -> String {
    if pronouns.is_empty() {
        return String::from("none");
    }
    pronouns
        .iter()
        .filter_map(|p| a.get(p))
        .map(|e| model.label(e))
        .collect::<Vec<_>>()
        .join("-")
}

fn labels(model: &DiscourseModel, pronouns: &[Var], r: &Ranking) -> Vec<Vec<String>> {
    r.iter().map(|g| g.iter().map(|a| label(model, pronouns, a)).collect()).collect()
}

/// Keeps `ranking`'s order but moves the assignments selected by `first`
/// ahead of the rest.
fn promote(ranking: &Ranking, first: impl Fn(&Assignment) -> bool) -> Ranking {
    let pick = |keep: bool| -> Ranking {
        ranking
            .iter()
            .map(|g| g.iter().filter(|a| first(a) == keep).cloned().collect::<Vec<_>>())
            .filter(|g| !g.is_empty())
            .collect()
    };
    let mut out = pick(true);
    out.extend(pick(false));
    out
}

/// Resolves one utterance against the context and returns the verdict
/// together with the updated context.
pub fn resolve(ctx: &Context, ilf: &Ilf) -> Result<(PreferenceVerdict, Context), ResolveError> {
    let model = &ctx.discourse_model;
    let pronouns: Vec<Var> = ilf.pronouns().into_iter().map(|(v, _)| v).collect();
    let candidates = candidate_referents(ilf, model);
    if let Some(p) = pronouns.iter().find(|p| candidates.get(*p).is_none_or(BTreeSet::is_empty)) {
        return Err(ResolveError::NoCandidate(p.clone()));
    }
    let all = enumerate_assignments(&pronouns, &candidates);
    let hyps: Vec<ResolvedLf> = all.iter().map(|a| specialize(ilf, a, model)).collect::<Result<_, _>>()?;

    // Indefeasible filter.
    let decisions = sem_filter(ctx.lf_register.as_ref(), &hyps, model, &ctx.lexicon)?;
    let mut survivors = Vec::new();
    let mut surviving_hyps = Vec::new();
    let mut rejected = Vec::new();
    for ((a, h), d) in all.iter().zip(&hyps).zip(&decisions) {
        match d {
            SemDecision::Accept => {
                survivors.push(a.clone());
                surviving_hyps.push(h.clone());
            }
            SemDecision::Reject(why) => rejected.push((a.clone(), why.clone())),
        }
    }
    if survivors.is_empty() {
        return Err(ResolveError::AllRejected);
    }

    // [LF;ATT] over the survivors, and over everything for comparison.
    let lf = lf_verdict(ctx, ilf, &pronouns, &candidates, &survivors);
    let att = att_verdict(ctx, &pronouns, &candidates, &survivors);
    let grammatical = combine_grammatical(&lf, &att);
    let unfiltered = combine_grammatical(
        &lf_verdict(ctx, ilf, &pronouns, &candidates, &all),
        &att_verdict(ctx, &pronouns, &candidates, &all),
    );

    let mut trace = Vec::new();
    if ilf.has_adverb() {
        let mut groups = alloc::vec![survivors.clone()];
        if !rejected.is_empty() {
            groups.push(rejected.iter().map(|(a, _)| a.clone()).collect());
        }
        trace.push(TraceStep { source: Source::Sem, verdict: labels(model, &pronouns, &groups), action: Action::Filter });
    }
    trace.push(TraceStep { source: Source::Lf, verdict: labels(model, &pronouns, &lf.ranking), action: Action::Set });
    let att_top_len = att.ranking.first().map_or(0, Vec::len);
    let att_action = if survivors.len() == 1 {
        Action::Set
    } else if grammatical.joined {
        Action::Join
    } else if !att.supported {
        Action::Tie
    } else if att_top_len > 1 {
        if grammatical.tiebreak { Action::Join } else { Action::Tie }
    } else if lf.discriminates() {
        Action::Override
    } else {
        Action::Set
    };
    trace.push(TraceStep { source: Source::Att, verdict: labels(model, &pronouns, &att.ranking), action: att_action });

    // ;WK
    let wk = wk_evaluate(&surviving_hyps, model, &ctx.world_kb);
    let gpick = grammatical.pick().cloned();
    let supported = wk.supported();
    let mut status = None;
    let mut wk_won = false;
    let (ranking, wk_action) = match &wk.overall {
        WkOverall::Abstain => (grammatical.ranking.clone(), None),
        WkOverall::Determinate(i) => {
            wk_won = true;
            let agrees = gpick.as_ref() == Some(&survivors[*i]);
            let top = &survivors[*i];
            (promote(&grammatical.ranking, |a| a == top), Some(if agrees { Action::Join } else { Action::Override }))
        }
        WkOverall::Indeterminate(set) if wk.nixon => {
            wk_won = true;
            status = Some(Status::Ambiguous);
            let members: Vec<&Assignment> = set.iter().map(|&i| &survivors[i]).collect();
            (lift_as_group(&grammatical.ranking, &members), Some(Action::Tie))
        }
        WkOverall::Indeterminate(_) if supported.len() >= 2 => {
            let members: Vec<&Assignment> = supported.iter().map(|&i| &survivors[i]).collect();
            match &gpick {
                Some(g) if members.contains(&g) => {
                    status = Some(Status::InfelicitousTie);
                    (lift_as_group(&grammatical.ranking, &members), Some(Action::Tie))
                }
                _ => {
                    wk_won = true;
                    (promote(&grammatical.ranking, |a| members.contains(&a)), Some(Action::Override))
                }
            }
        }
        WkOverall::Indeterminate(_) => {
            let opposed: Vec<&Assignment> = wk.opposed().iter().map(|&i| &survivors[i]).collect();
            let ranking = promote(&grammatical.ranking, |a| !opposed.contains(&a));
            let changed = ranking.first() != grammatical.ranking.first();
            wk_won = changed;
            (ranking, Some(if changed { Action::Override } else { Action::Set }))
        }
    };
    if let Some(action) = wk_action {
        let groups = wk_ranking(&wk, &survivors);
        trace.push(TraceStep { source: Source::Wk, verdict: labels(model, &pronouns, &groups), action });
    }

    if pronouns.is_empty() {
        trace.clear();
    }
    let top_len = ranking.first().map_or(0, Vec::len);
    let status = status.unwrap_or(if top_len == 1 { Status::Determinate } else { Status::Ambiguous });

    let sem_decisive = !rejected.is_empty() && grammatical.top() != unfiltered.top();
    let winner = if status == Status::InfelicitousTie {
        Winner::None
    } else if sem_decisive {
        Winner::Sem
    } else if wk_won {
        Winner::Wk
    } else if all.len() == 1 {
        Winner::None
    } else if att.supported {
        if att_top_len == 1 {
            if grammatical.joined { Winner::AttLf } else { Winner::Att }
        } else if grammatical.tiebreak && top_len == 1 {
            Winner::AttLf
        } else {
            Winner::Att
        }
    } else if lf.discriminates() {
        Winner::Lf
    } else {
        Winner::None
    };

    let final_top = ranking.first().and_then(|g| match g.as_slice() {
        [only] => Some(only),
        _ => None,
    });
    let garden_path = winner == Winner::Wk
        && status == Status::Determinate
        && match (&gpick, final_top, &ctx.attention.center) {
            (Some(g), Some(f), Some(center)) => {
                g != f
                    && ilf.surface().pronouns().any(|n| n.gf == GramFunction::Subject && g.get(&n.var) == Some(center))
            }
            _ => false,
        };

    let chosen = &ranking[0][0];
    let chosen_hyp = &surviving_hyps[survivors.iter().position(|s| s == chosen).expect("ranked assignments are survivors")];
    let next = ctx.update(chosen_hyp)?;

    let verdict = PreferenceVerdict {
        pronouns,
        assignments: ranking,
        status,
        winner,
        garden_path,
        trace,
        rejected,
        grammatical,
        wk,
        survivors,
    };
    Ok((verdict, next))
}

/// WK's own ranking: its verdict set, then the other non-opposed
/// assignments, then the opposed ones.
fn wk_ranking(wk: &WkVerdict, survivors: &[Assignment]) -> Ranking {
    let top: BTreeSet<usize> = match &wk.overall {
        WkOverall::Determinate(i) => BTreeSet::from([*i]),
        WkOverall::Indeterminate(s) => s.clone(),
        WkOverall::Abstain => (0..survivors.len()).collect(),
    };
    let opposed = wk.opposed();
    let tiers = [
        top.clone(),
        (0..survivors.len()).filter(|i| !top.contains(i) && !opposed.contains(i)).collect(),
        opposed.difference(&top).copied().collect(),
    ];
    tiers
        .iter()
        .filter(|t| !t.is_empty())
        .map(|t| t.iter().map(|&i| survivors[i].clone()).collect())
        .collect()
}

/// One group holding `members` (in `ranking` order), then the rest of
/// `ranking`.
fn lift_as_group(ranking: &Ranking, members: &[&Assignment]) -> Ranking {
    let top: Vec<Assignment> = ranking.iter().flatten().filter(|a| members.contains(a)).cloned().collect();
    let mut out = alloc::vec![top];
    out.extend(
        ranking
            .iter()
            .map(|g| g.iter().filter(|a| !members.contains(a)).cloned().collect::<Vec<_>>())
            .filter(|g| !g.is_empty()),
    );
    out
}

/// Resolves a sequence of utterances, threading the context through.
pub fn resolve_discourse(ctx: &Context, ilfs: &[Ilf]) -> Result<(Vec<PreferenceVerdict>, Context), (usize, ResolveError)> {
    let mut cur = ctx.clone();
    let mut out = Vec::with_capacity(ilfs.len());
    for (i, ilf) in ilfs.iter().enumerate() {
        let (v, next) = resolve(&cur, ilf).map_err(|e| (i, e))?;
        out.push(v);
        cur = next;
    }
    Ok((out, cur))
}
