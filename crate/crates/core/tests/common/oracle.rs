//! Brute-force reference for the resolver: enumerate every assignment,
//! ask each source for its raw verdict, and combine them with a literal
//! override table.

use std::collections::{BTreeMap, BTreeSet};

use ddp_core::ilf::{candidate_referents, specialize, EntityId, Var};
use ddp_core::resolver::{Assignment, Status};
use ddp_core::worldkb::{wk_preference, Support};
use ddp_core::{att_preference, para_preference, sem_filter, Context, Ilf};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    NoCandidate,
    AllRejected,
    SemError,
    Verdict { status: Status, top: BTreeSet<Assignment> },
}

fn product(pronouns: &[Var], cands: &BTreeMap<Var, BTreeSet<EntityId>>, distinct: bool) -> Vec<Assignment> {
    fn go(
        rest: &[Var],
        cands: &BTreeMap<Var, BTreeSet<EntityId>>,
        distinct: bool,
        cur: &mut Assignment,
        out: &mut Vec<Assignment>,
    ) {
        let Some((p, rest)) = rest.split_first() else {
            out.push(cur.clone());
            return;
        };
        for c in &cands[p] {
            if distinct && cur.values().any(|v| v == c) {
                continue;
            }
            cur.insert(p.clone(), c.clone());
            go(rest, cands, distinct, cur, out);
            cur.remove(p);
        }
    }
    let mut out = Vec::new();
    go(pronouns, cands, distinct, &mut Assignment::new(), &mut out);
    out
}

/// Layer = length of the longest chain of strict dominators above a vector.
fn chain_layers(vectors: &[Vec<usize>]) -> Vec<usize> {
    let dominated_by = |i: usize, j: usize| {
        vectors[j] != vectors[i] && vectors[j].iter().zip(&vectors[i]).all(|(a, b)| a <= b)
    };
    fn layer(i: usize, memo: &mut Vec<Option<usize>>, dom: &dyn Fn(usize, usize) -> bool, n: usize) -> usize {
        if let Some(l) = memo[i] {
            return l;
        }
        let l = (0..n).filter(|&j| dom(i, j)).map(|j| layer(j, memo, dom, n) + 1).max().unwrap_or(0);
        memo[i] = Some(l);
        l
    }
    let mut memo = vec![None; vectors.len()];
    (0..vectors.len()).map(|i| layer(i, &mut memo, &dominated_by, vectors.len())).collect()
}

fn argmin<K: Ord + Copy>(xs: &[usize], key: impl Fn(usize) -> K) -> BTreeSet<usize> {
    let Some(best) = xs.iter().map(|&i| key(i)).min() else { return BTreeSet::new() };
    xs.iter().copied().filter(|&i| key(i) == best).collect()
}

pub fn oracle(ctx: &Context, ilf: &Ilf) -> Outcome {
    let model = &ctx.discourse_model;
    let pronouns: Vec<Var> = ilf.pronouns().into_iter().map(|(v, _)| v).collect();
    let cands = candidate_referents(ilf, model);
    if pronouns.iter().any(|p| cands.get(p).is_none_or(|c| c.is_empty())) {
        return Outcome::NoCandidate;
    }
    let mut all = product(&pronouns, &cands, true);
    if all.is_empty() {
        all = product(&pronouns, &cands, false);
    }
    let hyps: Vec<_> = all.iter().map(|a| specialize(ilf, a, model).unwrap()).collect();
    let Ok(sem) = sem_filter(ctx.lf_register.as_ref(), &hyps, model, &ctx.lexicon) else {
        return Outcome::SemError;
    };
    let s: Vec<Assignment> = all.iter().zip(&sem).filter(|(_, d)| d.is_accept()).map(|(a, _)| a.clone()).collect();
    if s.is_empty() {
        return Outcome::AllRejected;
    }
    let idx: Vec<usize> = (0..s.len()).collect();

    let att: Vec<Vec<usize>> = s
        .iter()
        .map(|a| {
            pronouns
                .iter()
                .map(|p| att_preference(&cands[p], &ctx.attention).iter().position(|g| g.contains(&a[p])).unwrap())
                .collect()
        })
        .collect();
    let picks: BTreeMap<&Var, Option<EntityId>> = pronouns
        .iter()
        .map(|p| (p, ctx.lf_register.as_ref().and_then(|r| para_preference(r, ilf.surface(), p, &cands[p]))))
        .collect();
    let lf: Vec<Vec<usize>> = s
        .iter()
        .map(|a| pronouns.iter().map(|p| usize::from(picks[p].as_ref().is_some_and(|e| *e != a[p]))).collect())
        .collect();
    let (att_l, lf_l) = (chain_layers(&att), chain_layers(&lf));
    let gkey = |i: usize| (att_l[i], lf_l[i]);
    let gtop = argmin(&idx, gkey);

    let wk = wk_preference(&s, ilf, model, &ctx.world_kb);
    let with = |x: Support| -> Vec<usize> { idx.iter().copied().filter(|&i| wk.per_assignment[i] == x).collect() };
    let (sup, opp, con) = (with(Support::Supported), with(Support::Opposed), with(Support::Contested));
    let not_opp: Vec<usize> = idx.iter().copied().filter(|i| !opp.contains(i)).collect();

    // The override table.
    let nixon = !con.is_empty();
    let (top, infelicitous) = if sup.is_empty() && opp.is_empty() && !nixon {
        (gtop, false)
    } else if nixon {
        (not_opp.iter().copied().collect(), false)
    } else if sup.len() == 1 {
        (sup.iter().copied().collect(), false)
    } else if sup.len() >= 2 {
        if gtop.len() == 1 && sup.contains(gtop.first().unwrap()) {
            (sup.iter().copied().collect(), true)
        } else {
            (argmin(&sup, gkey), false)
        }
    } else if !not_opp.is_empty() {
        (argmin(&not_opp, gkey), false)
    } else {
        (gtop, false)
    };
    let status = if infelicitous {
        Status::InfelicitousTie
    } else if top.len() == 1 && !nixon {
        Status::Determinate
    } else {
        Status::Ambiguous
    };
    Outcome::Verdict { status, top: top.into_iter().map(|i| s[i].clone()).collect() }
}
