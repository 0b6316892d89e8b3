//! Serializable mirrors of verdicts, context snapshots and survey records.

use std::collections::BTreeMap;

use ddp_core::ilf::pronoun_word;
use ddp_core::resolver::ResolveError;
use ddp_core::survey::ExampleResult;
use ddp_core::{Context, Ilf, PreferenceVerdict, TraceStep};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binding {
    pub pronoun: String,
    pub var: String,
    pub entity: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub source: String,
    pub verdict: Vec<Vec<String>>,
    pub action: String,
}

impl From<&TraceStep> for Trace {
    fn from(t: &TraceStep) -> Self {
        Trace { source: t.source.to_string(), verdict: t.verdict.clone(), action: t.action.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityDump {
    pub id: String,
    pub label: String,
    pub gender: Option<String>,
    pub number: Option<String>,
    pub properties: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventDump {
    pub id: String,
    pub pred: String,
    pub roles: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterDump {
    pub ilf: String,
    pub bindings: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextDump {
    pub entities: Vec<EntityDump>,
    pub events: Vec<EventDump>,
    pub salience: Vec<Vec<String>>,
    pub center: Option<String>,
    pub lf_register: Option<RegisterDump>,
}

impl From<&Context> for ContextDump {
    fn from(c: &Context) -> Self {
        let d = &c.discourse_model;
        ContextDump {
            entities: d
                .entities()
                .map(|e| EntityDump {
                    id: e.id.0.clone(),
                    label: e.label.clone(),
                    gender: e.features.gender.map(|g| g.to_string()),
                    number: e.features.number.map(|n| n.to_string()),
                    properties: e.properties.iter().cloned().collect(),
                })
                .collect(),
            events: d
                .eventualities()
                .iter()
                .map(|ev| EventDump {
                    id: ev.id.clone(),
                    pred: ev.pred.clone(),
                    roles: ev.roles.iter().map(|(t, e)| (t.clone(), e.0.clone())).collect(),
                })
                .collect(),
            salience: c.attention.ranks.iter().map(|g| g.iter().map(|e| e.0.clone()).collect()).collect(),
            center: c.attention.center.as_ref().map(|e| e.0.clone()),
            lf_register: c.lf_register.as_ref().map(|r| RegisterDump {
                ilf: r.generalize().map(|i| i.to_string()).unwrap_or_default(),
                bindings: r.bindings.iter().map(|(v, e)| (v.0.clone(), e.0.clone())).collect(),
            }),
        }
    }
}

/// One utterance of a resolved discourse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub utterance: usize,
    pub status: String,
    pub winner: String,
    pub garden_path: bool,
    pub nixon: bool,
    /// Top group: one binding list per tied assignment.
    pub top: Vec<Vec<Binding>>,
    /// Full ranking as assignment labels.
    pub ranking: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<Trace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextDump>,
}

impl Utterance {
    /// `after` is the context the utterance produced; labels come from it.
    pub fn new(index: usize, ilf: &Ilf, v: &PreferenceVerdict, after: &Context, trace: bool) -> Self {
        let model = &after.discourse_model;
        let bindings = |a: &ddp_core::Assignment| -> Vec<Binding> {
            v.pronouns
                .iter()
                .filter_map(|p| {
                    let e = a.get(p)?;
                    let gf = ilf.surface().get(p).map(|n| n.gf).unwrap_or(ddp_core::ilf::GramFunction::Other);
                    Some(Binding {
                        pronoun: pronoun_word(ilf.features_of(p), gf).to_string(),
                        var: p.0.clone(),
                        entity: e.0.clone(),
                        label: model.label(e),
                    })
                })
                .collect()
        };
        let label = |a: &ddp_core::Assignment| {
            let l: Vec<String> = v.referents(a).map(|e| model.label(e)).collect();
            if l.is_empty() { "none".to_string() } else { l.join("-") }
        };
        Utterance {
            utterance: index,
            status: v.status.to_string(),
            winner: v.winner.to_string(),
            garden_path: v.garden_path,
            nixon: v.wk.nixon,
            top: v.top().iter().map(bindings).collect(),
            ranking: v.assignments.iter().map(|g| g.iter().map(label).collect()).collect(),
            trace: if trace { v.trace.iter().map(Trace::from).collect() } else { Vec::new() },
            context: trace.then(|| ContextDump::from(after)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub utterance: usize,
    pub error: String,
}

impl Failure {
    pub fn new(index: usize, e: &ResolveError) -> Self {
        Failure { utterance: index, error: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discourse {
    pub file: String,
    pub utterances: Vec<Utterance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

/// One survey row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub expected: String,
    pub actual: String,
    pub chi2: f64,
    pub band: String,
    pub pass: bool,
    pub expected_winner: String,
    pub winner: String,
    pub status: String,
    pub garden_path: bool,
}

impl Record {
    pub fn new(r: &ExampleResult) -> Self {
        let ex = ddp_core::survey::example(r.id).expect("results come from the corpus");
        Record {
            id: r.id.to_string(),
            expected: r.expected_label.clone(),
            actual: match &r.error {
                Some(e) => format!("error: {e}"),
                None => r.outcome_label.clone(),
            },
            chi2: (r.chi2 * 100.0).round() / 100.0,
            band: r.band.to_string(),
            pass: r.pass,
            expected_winner: ex.expected_winner.to_string(),
            winner: r.winner.map_or_else(|| "-".to_string(), |w| w.to_string()),
            status: r.status.map_or_else(|| "-".to_string(), |s| s.to_string()),
            garden_path: r.garden_path,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<Record>,
    pub passed: usize,
    pub total: usize,
}

impl From<&ddp_core::SurveyReport> for Report {
    fn from(r: &ddp_core::SurveyReport) -> Self {
        let records: Vec<Record> = r.results.iter().map(Record::new).collect();
        Report { passed: records.iter().filter(|r| r.pass).count(), total: records.len(), records }
    }
}
