#![allow(dead_code)]

pub mod criteria;
pub mod oracle;
pub mod schemas;

use std::collections::BTreeMap;
use std::sync::Arc;

use ddp_core::ilf::{Atom, Features, Gender, GramFunction, Mood, Number, Tense, Var};
use ddp_core::resolver::{resolve_discourse, PreferenceVerdict};
use ddp_core::survey::{self, SurveyExample};
use ddp_core::{init_context, parse_discourse, Context, Ilf, KnowledgeBase};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Runs `f` over `cases` generated values with a fixed seed.
pub fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    f: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, f).map_err(|e| e.to_string())
}

pub fn ctx(kb: KnowledgeBase) -> Context {
    init_context(kb, BTreeMap::new())
}

pub fn corpus(id: &str) -> &'static SurveyExample {
    survey::example(id).unwrap_or_else(|| panic!("no example {id}"))
}

/// Context before the last utterance of a corpus example, plus that
/// utterance.
pub fn before_last(ex: &SurveyExample, kb: KnowledgeBase) -> (Context, Ilf) {
    let mut ilfs = parse_discourse(ex.source).unwrap();
    let last = ilfs.pop().unwrap();
    let (_, c) = resolve_discourse(&ctx(kb), &ilfs).unwrap();
    (c, last)
}

pub fn run_source(src: &str, kb: impl Into<Arc<KnowledgeBase>>) -> Vec<PreferenceVerdict> {
    let ilfs = parse_discourse(src).unwrap();
    resolve_discourse(&init_context(kb, BTreeMap::new()), &ilfs).unwrap().0
}

/// Referent ids of every top-ranked assignment, in pronoun order.
pub fn top_ids(v: &PreferenceVerdict) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = v.top().iter().map(|a| v.referents(a).map(|e| e.0.clone()).collect()).collect();
    out.sort();
    out
}

// Generators.

pub fn gender() -> impl Strategy<Value = Gender> {
    prop_oneof![Just(Gender::Male), Just(Gender::Female), Just(Gender::Neuter)]
}

pub fn person_gender() -> impl Strategy<Value = Gender> {
    prop_oneof![Just(Gender::Male), Just(Gender::Female)]
}

pub fn number() -> impl Strategy<Value = Number> {
    prop_oneof![Just(Number::Sg), Just(Number::Pl)]
}

fn features() -> impl Strategy<Value = Option<Features>> {
    proptest::option::of((gender(), number()).prop_map(|(g, n)| Features::new(g, n)))
}

#[derive(Debug, Clone)]
enum Decl {
    Pro(Gender, Number),
    Name(&'static str, Option<Features>),
    Def(&'static str, Option<Features>),
    Indef(Number, &'static str, Option<Features>, Option<&'static str>),
}

fn decl() -> impl Strategy<Value = Decl> {
    let noun = prop::sample::select(vec!["baker", "door", "pie", "spider", "boy"]);
    prop_oneof![
        (gender(), number()).prop_map(|(g, n)| Decl::Pro(g, n)),
        (prop::sample::select(vec!["John", "Bill", "Mary", "Ann Lee"]), features()).prop_map(|(s, f)| Decl::Name(s, f)),
        (noun.clone(), features()).prop_map(|(s, f)| Decl::Def(s, f)),
        (number(), noun, features(), proptest::option::of(prop::sample::select(vec!["robot", "blueberry"])))
            .prop_map(|(n, s, f, nn)| Decl::Indef(n, s, f, nn)),
    ]
}

fn gram_function() -> impl Strategy<Value = GramFunction> {
    prop_oneof![
        Just(GramFunction::Subject),
        Just(GramFunction::Object),
        Just(GramFunction::Object2),
        Just(GramFunction::Other)
    ]
}

/// Well-formed ILFs covering every atom kind.
pub fn arb_ilf() -> impl Strategy<Value = Ilf> {
    let mood = prop_oneof![Just(Mood::Decl), Just(Mood::Interrog), Just(Mood::Imper)];
    let tense = proptest::option::of(prop_oneof![Just(Tense::Past), Just(Tense::Pres)]);
    let events = prop::collection::vec(prop::sample::select(vec!["hit", "see", "like", "go_home"]), 1..=2);
    let nominals = prop::collection::vec((decl(), 0usize..2, gram_function(), prop::sample::select(vec!["agent", "theme", "goal"])), 1..=4);
    let adverb = proptest::option::of(prop_oneof![Just("too"), Just("back")]);
    (mood, tense, events, nominals, adverb).prop_map(|(mood, tense, events, nominals, adverb)| {
        let mut atoms = Vec::new();
        let ev = |i: usize| Var::new(format!("e{}", i + 1));
        for (i, p) in events.iter().enumerate() {
            atoms.push(Atom::Event { var: ev(i), pred: (*p).into() });
        }
        let mut taken = std::collections::BTreeSet::new();
        for (k, (d, e, gf, theta)) in nominals.into_iter().enumerate() {
            let var = Var::new(format!("x{}", k + 1));
            let e = e % events.len();
            let gf = if matches!(gf, GramFunction::Subject | GramFunction::Object) && !taken.insert((e, gf)) {
                GramFunction::Other
            } else {
                gf
            };
            atoms.push(Atom::Role { theta: theta.into(), gf, event: ev(e), arg: var.clone() });
            match d {
                Decl::Pro(gender, number) => atoms.push(Atom::Pro { var, gender, number }),
                Decl::Name(s, f) => atoms.push(Atom::Name { var, name: s.into(), features: f.unwrap_or_default() }),
                Decl::Def(s, f) => {
                    atoms.push(Atom::Definite { var: var.clone() });
                    atoms.push(Atom::Noun { var, pred: s.into(), features: f.unwrap_or_default() });
                }
                Decl::Indef(n, s, f, nn) => {
                    atoms.push(Atom::Indefinite { number: n, var: var.clone() });
                    atoms.push(Atom::Noun { var: var.clone(), pred: s.into(), features: f.unwrap_or_default() });
                    if let Some(nn) = nn {
                        atoms.push(Atom::NnRelation { var, pred: nn.into() });
                    }
                }
            }
        }
        if let Some(a) = adverb {
            atoms.push(Atom::Adverb {
                event: ev(0),
                trigger: if a == "too" { ddp_core::ilf::AdverbTrigger::Too } else { ddp_core::ilf::AdverbTrigger::Back },
            });
        }
        Ilf::new(mood, tense, atoms).expect("generator builds well-formed ILFs")
    })
}

/// A small discourse: up to four named people introduced in the first
/// utterance, then one or two utterances with at most two pronouns each.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub people: Vec<(&'static str, &'static str)>,
    pub utterances: Vec<String>,
}

impl Scenario {
    pub fn source(&self) -> String {
        self.utterances.join("\n")
    }

    pub fn ilfs(&self) -> Vec<Ilf> {
        parse_discourse(&self.source()).expect("scenario ILF parses")
    }
}

const NAMES: [&str; 4] = ["Ann", "Bob", "Cy", "Di"];

fn gender_word(male: bool) -> &'static str {
    if male { "male" } else { "female" }
}

#[derive(Debug, Clone)]
struct Follow {
    pred: &'static str,
    /// Per slot (subj, obj): a pronoun of the given gender, a person by
    /// index, or nothing.
    slots: [Option<Result<bool, usize>>; 2],
    adverb: Option<&'static str>,
}

fn follow() -> impl Strategy<Value = Follow> {
    let slot = prop_oneof![
        3 => any::<bool>().prop_map(|m| Some(Ok(m))),
        1 => (0usize..4).prop_map(|i| Some(Err(i))),
        1 => Just(None),
    ];
    (
        prop::sample::select(vec!["hit", "like", "see", "injured"]),
        slot.clone(),
        slot,
        prop_oneof![4 => Just(None), 1 => Just(Some("too")), 1 => Just(Some("back"))],
    )
        .prop_map(|(pred, s, o, adverb)| {
            let s = s.or(Some(Ok(true)));
            let o = if pred == "injured" { None } else { o };
            Follow { pred, slots: [s, o], adverb }
        })
}

fn render_follow(f: &Follow, people: &[(&str, &str)]) -> String {
    let mut atoms = vec![format!("(ev e {})", f.pred)];
    let roles = if f.pred == "injured" { ["theme", "agent"] } else { ["agent", "theme"] };
    let mut used = std::collections::BTreeSet::new();
    for (k, (slot, gf)) in f.slots.iter().zip(["subj", "obj"]).enumerate() {
        let var = if k == 0 { "x" } else { "y" };
        match slot {
            Some(Ok(male)) => {
                atoms.push(format!("(role {} {gf} e {var}) (pro {var} {} sg)", roles[k], gender_word(*male)));
            }
            Some(Err(i)) => {
                let (name, g) = people[i % people.len()];
                if used.insert(name) {
                    atoms.push(format!("(role {} {gf} e {var}) (name {var} \"{name}\" {g} sg)", roles[k]));
                }
            }
            None => {}
        }
    }
    if let Some(a) = f.adverb {
        atoms.push(format!("(adv e {a})"));
    }
    format!("(decl (past {}))", atoms.join(" "))
}

pub fn arb_scenario() -> impl Strategy<Value = Scenario> {
    (
        prop::collection::vec(any::<bool>(), 2..=4),
        prop::sample::select(vec!["hit", "see", "greet"]),
        any::<bool>(),
        prop::collection::vec(follow(), 1..=2),
    )
        .prop_map(|(genders, pred, passive, follows)| {
            let people: Vec<(&str, &str)> =
                genders.iter().enumerate().map(|(i, m)| (NAMES[i], gender_word(*m))).collect();
            let name = |i: usize, v: &str| format!("(name {v} \"{}\" {} sg)", people[i].0, people[i].1);
            let mut first = if passive {
                format!("(ev e {pred}) (role theme subj e a) {} (role agent other e b) {}", name(0, "a"), name(1, "b"))
            } else {
                format!("(ev e {pred}) (role agent subj e a) {} (role theme obj e b) {}", name(0, "a"), name(1, "b"))
            };
            if people.len() > 2 {
                first += &format!(" (role location other e c) {}", name(2, "c"));
            }
            if people.len() > 3 {
                first += &format!(" (ev e2 smile) (role agent subj e2 d) {}", name(3, "d"));
            }
            let mut utterances = vec![format!("(decl (past {first}))")];
            utterances.extend(follows.iter().map(|f| render_follow(f, &people)));
            Scenario { people, utterances }
        })
}

/// A random defeasible rule over the corpus vocabulary.
pub fn arb_defeasible_rule(id: String) -> impl Strategy<Value = String> {
    let ante = prop::sample::select(vec![
        "(hit ?e ?x ?y)",
        "(and (hit ?e ?x ?y) (member ?y))",
        "(see ?e ?x ?y)",
        "(like ?e ?x ?y)",
        "(and (hit ?e ?x ?y) (abnormally-strong ?x))",
        "(greet ?e ?x ?y)",
    ]);
    let cons = prop::sample::select(vec![
        "(hurt ?x)",
        "(hurt ?y)",
        "(not (hurt ?x))",
        "(not (hurt ?y))",
        "(hit ?x ?y)",
        "(hit ?y ?x)",
        "(not (hit ?y ?x))",
        "(not (hit ?x ?y))",
        "(like ?y ?x)",
        "(not (like ?x ?y))",
    ]);
    (ante, cons).prop_map(move |(a, c)| format!("(rule {id} defeasible {a} {c})"))
}

/// The bundled KB plus up to four random defeasible rules and facts.
pub fn arb_perturbed_kb() -> impl Strategy<Value = KnowledgeBase> {
    let rules = (0usize..=4).prop_flat_map(|n| {
        (0..n).map(|i| arb_defeasible_rule(format!("R{i}"))).collect::<Vec<_>>()
    });
    let facts = prop::collection::vec(
        (prop::sample::select(vec!["member", "abnormally-strong"]), prop::sample::select(vec!["john", "bill", "mary", "ann", "bob"])),
        0..=2,
    );
    (any::<bool>(), rules, facts).prop_map(|(base, rules, facts)| {
        let mut src = if base { survey::CORE_KB.to_string() } else { String::new() };
        for r in rules {
            src += &r;
            src.push('\n');
        }
        for (p, e) in facts {
            src += &format!("(fact ({p} {e}))\n");
        }
        KnowledgeBase::parse(&src).expect("generated KB is valid")
    })
}
