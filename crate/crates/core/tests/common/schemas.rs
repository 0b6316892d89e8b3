//! Property checks for the override schemas, shared by the property tests
//! and the acceptance harness.

use std::collections::BTreeSet;
use std::sync::Arc;

use ddp_core::resolver::{resolve, Assignment, PreferenceVerdict, ResolveError, Status};
use ddp_core::worldkb::{wk_evaluate, ActivationStatus, WkOverall};
use ddp_core::{specialize, Context, Ilf, KnowledgeBase};
use proptest::prelude::*;

use super::oracle::{oracle, Outcome};
use super::{arb_perturbed_kb, arb_scenario, before_last, check, corpus, ctx, Scenario};

/// One resolution step of a discourse, with the context it ran in.
pub struct Step {
    pub ctx: Context,
    pub ilf: Ilf,
    pub result: Result<PreferenceVerdict, ResolveError>,
}

/// Resolves every utterance, stopping after the first error.
pub fn steps(ilfs: &[Ilf], kb: KnowledgeBase) -> Vec<Step> {
    let mut cur = ctx(kb);
    let mut out = Vec::new();
    for ilf in ilfs {
        let result = resolve(&cur, ilf);
        let next = result.as_ref().ok().map(|(_, c)| c.clone());
        out.push(Step { ctx: cur.clone(), ilf: ilf.clone(), result: result.map(|(v, _)| v) });
        match next {
            Some(c) => cur = c,
            None => break,
        }
    }
    out
}

fn with_kb(c: &Context, kb: &KnowledgeBase) -> Context {
    let mut c = c.clone();
    c.world_kb = Arc::new(kb.clone());
    c
}

/// Reorders the salience ranks: a stand-in for strengthening or weakening
/// the attentional rules.
fn shake_attention(c: &mut Context, seed: u8) {
    let ranks = &mut c.attention.ranks;
    if ranks.len() > 1 {
        let k = seed as usize % ranks.len();
        ranks.rotate_left(k);
        if seed & 0x80 != 0 {
            ranks.reverse();
        }
    }
}

fn rejected_set(v: &PreferenceVerdict) -> BTreeSet<Assignment> {
    v.rejected.iter().map(|(a, _)| a.clone()).collect()
}

fn same_error_kind(a: &ResolveError, b: &ResolveError) -> bool {
    std::mem::discriminant(a) == std::mem::discriminant(b)
}

/// Sem-rejected assignments never change under defeasible perturbations and
/// never reach the final ranking.
pub fn indefeasible_override(cases: u32) -> Result<(), String> {
    let fixtures: Vec<(Context, Ilf)> =
        ["C", "E", "A", "D"].iter().map(|id| before_last(corpus(id), KnowledgeBase::default())).collect();
    check(cases, (arb_scenario(), arb_perturbed_kb(), any::<u8>()), |(scenario, kb, seed)| {
        let base = steps(&scenario.ilfs(), KnowledgeBase::default());
        let pairs = fixtures.iter().map(|(c, i)| (c.clone(), i.clone())).chain(base.iter().map(|s| (s.ctx.clone(), s.ilf.clone())));
        for (c, ilf) in pairs {
            let mut perturbed = with_kb(&c, &kb);
            shake_attention(&mut perturbed, seed);
            match (resolve(&c, &ilf), resolve(&perturbed, &ilf)) {
                (Ok((b, _)), Ok((p, _))) => {
                    let rejected = rejected_set(&b);
                    prop_assert_eq!(&rejected, &rejected_set(&p));
                    for a in p.assignments.iter().flatten() {
                        prop_assert!(!rejected.contains(a), "rejected assignment {:?} ranked", a);
                    }
                }
                (Err(e), Err(f)) => prop_assert!(same_error_kind(&e, &f), "{e} vs {f}"),
                (b, p) => prop_assert!(false, "outcome kind changed: {:?} vs {:?}", b.err(), p.err()),
            }
        }
        Ok(())
    })
}

fn twin_kb(parent: bool, hurt_target: &str, marker: &str, bearer: &str) -> KnowledgeBase {
    let mut src = String::new();
    let link = if parent {
        src += "(rule BASE defeasible (hit ?e ?x ?y) (hurt ?y))\n";
        " (more-specific-than BASE)"
    } else {
        ""
    };
    src += &format!("(rule PRO defeasible (and (hit ?e ?x ?y) ({marker} ?y)) (hurt ?{hurt_target}){link})\n");
    src += &format!("(rule CON defeasible (and (hit ?e ?x ?y) ({marker} ?y)) (not (hurt ?{hurt_target})){link})\n");
    src += &format!("(fact ({marker} {bearer}))\n(alias injured hurt)\n");
    KnowledgeBase::parse(&src).unwrap()
}

fn hit_then_injured(a: &str, b: &str) -> Vec<Ilf> {
    ddp_core::parse_discourse(&format!(
        "(decl (past (ev e hit) (role agent subj e x) (name x \"{a}\" male sg) (role theme obj e y) (name y \"{b}\" male sg)))\n\
         (decl (past (ev e injured) (role theme subj e x) (pro x male sg)))"
    ))
    .unwrap()
}

fn pair_of_names() -> impl Strategy<Value = (&'static str, &'static str)> {
    (0usize..4, 1usize..4).prop_map(|(i, d)| {
        const N: [&str; 4] = ["Ann", "Bob", "Cy", "Di"];
        (N[i], N[(i + d) % 4])
    })
}

/// Two firing defaults with contradictory conclusions and no specificity
/// between them always leave WK indeterminate and flag a Nixon diamond.
pub fn nixon_diamond(cases: u32) -> Result<(), String> {
    let marker = prop::sample::select(vec!["twin", "normal-or-strong", "odd"]);
    check(cases, (pair_of_names(), any::<bool>(), any::<bool>(), marker), |((a, b), parent, on_hitter, marker)| {
        let target = if on_hitter { "x" } else { "y" };
        let kb = twin_kb(parent, target, marker, &b.to_lowercase());
        let steps = steps(&hit_then_injured(a, b), kb);
        let v = steps[1].result.as_ref().map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(v.wk.nixon);
        prop_assert!(!matches!(v.wk.overall, WkOverall::Determinate(_)));
        prop_assert_eq!(v.status, Status::Ambiguous);
        Ok(())
    })
}

/// A firing rule silences every transitively more general firing rule
/// whose conclusion it contradicts, both in constructed specificity pairs
/// and in arbitrary perturbed KBs.
pub fn penguin_principle(cases: u32) -> Result<(), String> {
    let constructed = (pair_of_names(), any::<bool>(), any::<bool>()).prop_map(|((a, b), parent_positive, on_hitter)| {
        let (pp, cp) = if parent_positive { ("(hurt ?y)", "(not (hurt ?y))") } else { ("(not (hurt ?y))", "(hurt ?y)") };
        let (pp, cp) = if on_hitter { (pp.replace("?y", "?x"), cp.replace("?y", "?x")) } else { (pp.into(), cp.into()) };
        let src = format!(
            "(rule GENERAL defeasible (hit ?e ?x ?y) {pp})\n\
             (rule SPECIFIC defeasible (and (hit ?e ?x ?y) (special ?y)) {cp} (more-specific-than GENERAL))\n\
             (fact (special {}))\n(alias injured hurt)",
            b.to_lowercase()
        );
        (hit_then_injured(a, b), KnowledgeBase::parse(&src).unwrap(), true)
    });
    let generic = (arb_scenario(), arb_perturbed_kb()).prop_map(|(s, kb)| (s.ilfs(), kb, false));
    check(cases, prop_oneof![constructed, generic], |(ilfs, kb, must_silence)| {
        let mut silenced = 0;
        for step in steps(&ilfs, kb.clone()) {
            let Ok(v) = &step.result else { continue };
            for acts in &v.wk.activations {
                for a in acts {
                    let beaten = acts.iter().any(|b| {
                        kb.more_specific(&b.rule, &a.rule)
                            && b.conclusion.conflicts_with(&a.conclusion)
                    });
                    if beaten {
                        prop_assert!(
                            matches!(a.status, ActivationStatus::Silenced { .. }),
                            "{} should be silenced",
                            a
                        );
                        silenced += 1;
                    }
                }
            }
        }
        prop_assert!(!must_silence || silenced > 0, "no silencing in a constructed case");
        Ok(())
    })
}

/// A determinate WK verdict always tops the final ranking.
pub fn defeasible_override(cases: u32) -> Result<(), String> {
    check(cases, (arb_scenario(), arb_perturbed_kb()), |(scenario, kb)| {
        for step in steps(&scenario.ilfs(), kb) {
            let Ok(v) = step.result else { continue };
            if let WkOverall::Determinate(i) = v.wk.overall {
                prop_assert_eq!(v.top(), std::slice::from_ref(&v.survivors[i]));
            }
        }
        Ok(())
    })
}

fn engine_outcome(r: &Result<PreferenceVerdict, ResolveError>) -> Outcome {
    match r {
        Ok(v) => Outcome::Verdict { status: v.status, top: v.top().iter().cloned().collect() },
        Err(ResolveError::NoCandidate(_)) => Outcome::NoCandidate,
        Err(ResolveError::AllRejected) => Outcome::AllRejected,
        Err(ResolveError::Sem(_)) => Outcome::SemError,
        Err(e) => panic!("unexpected engine error {e}"),
    }
}

/// Compares the engine with the brute-force oracle at every step.
pub fn oracle_agrees(ilfs: &[Ilf], kb: KnowledgeBase) -> Result<usize, String> {
    let mut compared = 0;
    for (i, step) in steps(ilfs, kb).iter().enumerate() {
        let expected = oracle(&step.ctx, &step.ilf);
        let actual = engine_outcome(&step.result);
        if expected != actual {
            return Err(format!("utterance {}: oracle {expected:?}, engine {actual:?}", i + 1));
        }
        compared += 1;
    }
    Ok(compared)
}

pub fn oracle_on_corpus(kb: &KnowledgeBase) -> Result<usize, String> {
    let mut n = 0;
    for ex in &ddp_core::CORPUS {
        let ilfs = ddp_core::parse_discourse(ex.source).unwrap();
        n += oracle_agrees(&ilfs, kb.clone()).map_err(|e| format!("{}: {e}", ex.id))?;
    }
    Ok(n)
}

pub fn oracle_on_generated(cases: u32) -> Result<(), String> {
    let kb = prop_oneof![
        Just(KnowledgeBase::default()),
        Just(ddp_core::core_kb()),
        arb_perturbed_kb(),
    ];
    check(cases, (arb_scenario(), kb), |(scenario, kb): (Scenario, KnowledgeBase)| {
        oracle_agrees(&scenario.ilfs(), kb).map_err(TestCaseError::fail)?;
        Ok(())
    })
}

/// Removing a rule that never fired leaves the WK verdict unchanged.
pub fn relevance(cases: u32) -> Result<(), String> {
    check(cases, (arb_scenario(), arb_perturbed_kb()), |(scenario, kb)| {
        for step in steps(&scenario.ilfs(), kb.clone()) {
            let Ok(v) = &step.result else { continue };
            let hyps: Vec<_> = v
                .survivors
                .iter()
                .map(|a| specialize(&step.ilf, a, &step.ctx.discourse_model).unwrap())
                .collect();
            let fired: BTreeSet<&str> = v.wk.activations.iter().flatten().map(|a| a.rule.as_str()).collect();
            for r in kb.rules().iter().filter(|r| !fired.contains(r.id.as_str())) {
                let smaller = kb.without_rule(&r.id);
                let w = wk_evaluate(&hyps, &step.ctx.discourse_model, &smaller);
                prop_assert_eq!(&w.per_assignment, &v.wk.per_assignment);
                prop_assert_eq!(&w.overall, &v.wk.overall);
                prop_assert_eq!(w.nixon, v.wk.nixon);
            }
        }
        Ok(())
    })
}
