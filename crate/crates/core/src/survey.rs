//! The survey corpus, its observed answer counts, and the engine's
//! reproduction of the predicted outcomes and winning sources.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::context::init_context;
use crate::ilf::{parse_discourse, EntityId, IlfError};
use crate::resolver::{resolve_discourse, PreferenceVerdict, Status, Winner};
use crate::worldkb::KnowledgeBase;

/// The bundled commonsense knowledge base.
pub const CORE_KB: &str = include_str!("../kb/core.kb");

/// Parses [`CORE_KB`].
pub fn core_kb() -> KnowledgeBase {
    KnowledgeBase::parse(CORE_KB).expect("bundled KB is valid")
}

/// χ² (df = 1) critical values, strongest first.
pub const CRITICAL_VALUES: [(f64, f64); 7] =
    [(0.001, 10.828), (0.01, 6.635), (0.05, 3.841), (0.10, 2.706), (0.20, 1.642), (0.50, 0.455), (0.70, 0.148)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SignificanceBand {
    Below001,
    From001To01,
    From01To05,
    From05To10,
    From10To20,
    From20To50,
    From50To70,
    Above70,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Classification {
    Significant,
    WeaklySignificant,
    Insignificant,
}

const BANDS: [SignificanceBand; 8] = [
    SignificanceBand::Below001,
    SignificanceBand::From001To01,
    SignificanceBand::From01To05,
    SignificanceBand::From05To10,
    SignificanceBand::From10To20,
    SignificanceBand::From20To50,
    SignificanceBand::From50To70,
    SignificanceBand::Above70,
];

impl SignificanceBand {
    pub fn from_chi2(chi2: f64) -> Self {
        let i = CRITICAL_VALUES.iter().position(|(_, c)| chi2 >= *c).unwrap_or(CRITICAL_VALUES.len());
        BANDS[i]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SignificanceBand::Below001 => "p<.001",
            SignificanceBand::From001To01 => ".001<p<.01",
            SignificanceBand::From01To05 => ".01<p<.05",
            SignificanceBand::From05To10 => ".05<p<.10",
            SignificanceBand::From10To20 => ".10<p<.20",
            SignificanceBand::From20To50 => ".20<p<.50",
            SignificanceBand::From50To70 => ".50<p<.70",
            SignificanceBand::Above70 => "p>.70",
        }
    }

    pub fn classification(self) -> Classification {
        match self {
            SignificanceBand::Below001 | SignificanceBand::From001To01 | SignificanceBand::From01To05 => {
                Classification::Significant
            }
            SignificanceBand::From05To10 => Classification::WeaklySignificant,
            _ => Classification::Insignificant,
        }
    }
}

impl core::str::FromStr for SignificanceBand {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        BANDS.into_iter().find(|b| b.as_str() == s).ok_or_else(|| alloc::format!("unknown band `{s}`"))
    }
}

impl fmt::Display for SignificanceBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Significant => "significant",
            Classification::WeaklySignificant => "weakly-significant",
            Classification::Insignificant => "insignificant",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurveyError {
    #[error("no answers to test")]
    ZeroTotal,
    #[error("example {id}: {source}")]
    Fixture { id: &'static str, source: IlfError },
}

/// Goodness of fit against an even split, with unclear answers divided
/// evenly between the two explicit ones.
pub fn chi_square(a: u32, b: u32, unclear: u32) -> Result<(f64, SignificanceBand), SurveyError> {
    let n = f64::from(a) + f64::from(b) + f64::from(unclear);
    if n == 0.0 {
        return Err(SurveyError::ZeroTotal);
    }
    let half = f64::from(unclear) / 2.0;
    let expected = n / 2.0;
    let chi2 = [f64::from(a) + half, f64::from(b) + half]
        .iter()
        .map(|o| (o - expected) * (o - expected) / expected)
        .sum::<f64>();
    Ok((chi2, SignificanceBand::from_chi2(chi2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub answer1: u32,
    pub answer2: u32,
    pub unclear: u32,
}

impl Counts {
    pub fn total(&self) -> u32 {
        self.answer1 + self.answer2 + self.unclear
    }
}

/// One corpus discourse with everything known about it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurveyExample {
    pub id: &'static str,
    pub text: &'static str,
    /// ILF source, one utterance per line.
    pub source: &'static str,
    pub answers: [&'static str; 2],
    pub counts: Counts,
    pub respondents: u32,
    pub expected_chi2: f64,
    pub expected_band: SignificanceBand,
    /// Top group of the last utterance: entity ids per assignment, in
    /// pronoun order.
    pub expected_outcome: &'static [&'static [&'static str]],
    pub expected_status: Status,
    pub expected_winner: Winner,
    pub expected_garden_path: bool,
    pub expected_nixon: bool,
    /// Outcome with no commonsense knowledge at all.
    pub grammatical_outcome: &'static [&'static [&'static str]],
}

const fn counts(answer1: u32, answer2: u32, unclear: u32) -> Counts {
    Counts { answer1, answer2, unclear }
}

macro_rules! example {
    ($id:literal, $text:literal, [$a1:literal, $a2:literal], ($x:expr, $y:expr, $u:expr), $n:expr, $chi:expr, $band:ident,
     $out:expr, $status:ident, $winner:ident, $gp:expr, $nixon:expr, $gram:expr) => {
        SurveyExample {
            id: $id,
            text: $text,
            source: include_str!(concat!("../corpus/", $id, ".ilf")),
            answers: [$a1, $a2],
            counts: counts($x, $y, $u),
            respondents: $n,
            expected_chi2: $chi,
            expected_band: SignificanceBand::$band,
            expected_outcome: $out,
            expected_status: Status::$status,
            expected_winner: Winner::$winner,
            expected_garden_path: $gp,
            expected_nixon: $nixon,
            grammatical_outcome: $gram,
        }
    };
}

pub const CORPUS: [SurveyExample; 12] = [
    example!("A", "John hit Bill. Mary told him to go home.", ["John", "Bill"], (42, 0, 5), 47, 37.53, Below001,
        &[&["john"]], Determinate, Att, false, false, &[&["john"]]),
    example!("B", "Bill was hit by John. Mary told him to go home.", ["John", "Bill"], (7, 33, 7), 47, 14.38, Below001,
        &[&["bill"]], Determinate, Att, false, false, &[&["bill"]]),
    example!("C", "John hit Bill. Mary hit him too.", ["John", "Bill"], (0, 47, 0), 47, 47.0, Below001,
        &[&["bill"]], Determinate, Sem, false, false, &[&["bill"]]),
    example!("D", "John hit Bill. He doesn't like him.", ["J. dislikes B.", "B. dislikes J."], (42, 0, 5), 47, 37.53, Below001,
        &[&["john", "bill"]], Determinate, Lf, false, false, &[&["john", "bill"]]),
    example!("E", "John hit Bill. He hit him back.", ["John hit Bill", "Bill hit John"], (2, 45, 0), 47, 39.34, Below001,
        &[&["bill", "john"]], Determinate, Sem, false, false, &[&["bill", "john"]]),
    example!("K", "Babar went to a bakery. He greeted the baker. He pointed at a blueberry pie.", ["Babar", "Baker"], (13, 0, 0), 13, 13.0, Below001,
        &[&["babar"]], Determinate, AttLf, false, false, &[&["babar"]]),
    example!("L", "Babar went to a bakery. The baker greeted him. He pointed at a blueberry pie.", ["Babar", "Baker"], (3, 10, 0), 13, 3.77, From05To10,
        &[&["baker"]], Determinate, AttLf, false, false, &[&["baker"]]),
    example!("F", "John hit Bill. He was severely injured.", ["John", "Bill"], (0, 46, 1), 47, 45.02, Below001,
        &[&["bill"]], Determinate, Wk, false, false, &[&["john"]]),
    example!("G", "John hit Arnold Schwarzenegger. He was severely injured.", ["John", "Arnold"], (24, 13, 10), 47, 2.57, From10To20,
        &[&["john"], &["arnold"]], Ambiguous, Wk, false, true, &[&["john"]]),
    example!("H", "John hit the Terminator. He was severely injured.", ["John", "Terminator"], (34, 6, 7), 47, 16.68, Below001,
        &[&["john"]], Determinate, Wk, false, false, &[&["john"]]),
    example!("I", "Tommy came into the classroom. He saw Billy at the door. He hit him on the chin. He was severely injured.", ["Tommy", "Billy"], (3, 17, 1), 21, 9.33, From001To01,
        &[&["billy"]], Determinate, Wk, true, false, &[&["tommy"]]),
    example!("J", "Tommy came into the classroom. He saw a group of boys at the door. He hit one of them on the chin. He was severely injured.", ["Tommy", "Boy"], (10, 7, 3), 20, 0.45, From50To70,
        &[&["tommy"], &["boy"]], InfelicitousTie, None, false, false, &[&["tommy"]]),
];

/// Looks up a corpus example by id.
pub fn example(id: &str) -> Option<&'static SurveyExample> {
    CORPUS.iter().find(|e| e.id == id)
}

/// Tolerance on recomputed χ² values.
pub const CHI2_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleResult {
    pub id: &'static str,
    pub expected_outcome: Vec<Vec<String>>,
    pub outcome: Vec<Vec<String>>,
    /// Human-readable outcome, e.g. `John-Bill` or `Tommy/boy`.
    pub outcome_label: String,
    pub expected_label: String,
    pub status: Option<Status>,
    pub winner: Option<Winner>,
    pub garden_path: bool,
    pub nixon: bool,
    pub chi2: f64,
    pub band: SignificanceBand,
    /// One verdict per utterance.
    pub verdicts: Vec<PreferenceVerdict>,
    pub error: Option<String>,
    pub outcome_ok: bool,
    pub winner_ok: bool,
    pub chi2_ok: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyReport {
    pub results: Vec<ExampleResult>,
}

impl SurveyReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.pass).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.results.len()
    }

    pub fn get(&self, id: &str) -> Option<&ExampleResult> {
        self.results.iter().find(|r| r.id == id)
    }
}

fn as_sets(groups: &[&[&str]]) -> BTreeSet<Vec<String>> {
    groups.iter().map(|g| g.iter().map(|s| s.to_string()).collect()).collect()
}

/// Runs one example; `expected` picks the outcome the engine is held to.
fn label_groups(groups: &[&[&str]], label: impl Fn(&str) -> String) -> String {
    groups.iter().map(|g| g.iter().map(|id| label(id)).collect::<Vec<_>>().join("-")).collect::<Vec<_>>().join("/")
}

pub fn run_example(ex: &SurveyExample, kb: Arc<KnowledgeBase>, expected: &[&[&str]]) -> ExampleResult {
    let (chi2, band) = chi_square(ex.counts.answer1, ex.counts.answer2, ex.counts.unclear).unwrap_or((f64::NAN, SignificanceBand::Above70));
    let chi2_ok = (chi2 - ex.expected_chi2).abs() <= CHI2_TOLERANCE && band == ex.expected_band;
    let mut r = ExampleResult {
        id: ex.id,
        expected_outcome: as_sets(expected).into_iter().collect(),
        outcome: Vec::new(),
        outcome_label: String::new(),
        expected_label: label_groups(expected, |id| id.to_string()),
        status: None,
        winner: None,
        garden_path: false,
        nixon: false,
        chi2,
        band,
        verdicts: Vec::new(),
        error: None,
        outcome_ok: false,
        winner_ok: false,
        chi2_ok,
        pass: false,
    };
    let ilfs = match parse_discourse(ex.source) {
        Ok(i) => i,
        Err(e) => {
            r.error = Some(SurveyError::Fixture { id: ex.id, source: e }.to_string());
            return r;
        }
    };
    let ctx = init_context(kb, BTreeMap::new());
    match resolve_discourse(&ctx, &ilfs) {
        Err((i, e)) => r.error = Some(alloc::format!("utterance {}: {e}", i + 1)),
        Ok((verdicts, end)) => {
            let last = verdicts.last().expect("corpus examples are non-empty");
            r.outcome = last
                .top()
                .iter()
                .map(|a| last.referents(a).map(|e| e.0.clone()).collect())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            r.outcome_label = last
                .top()
                .iter()
                .map(|a| {
                    last.referents(a).map(|e| end.discourse_model.label(e)).collect::<Vec<_>>().join("-")
                })
                .collect::<Vec<_>>()
                .join("/");
            r.expected_label = label_groups(expected, |id| end.discourse_model.label(&EntityId::new(id)));
            r.status = Some(last.status);
            r.winner = Some(last.winner);
            r.garden_path = last.garden_path;
            r.nixon = last.wk.nixon;
            r.verdicts = verdicts;
        }
    }
    r.outcome_ok = r.error.is_none() && r.outcome == r.expected_outcome;
    r
}

/// Runs the whole corpus against `kb` and checks every expectation.
pub fn run_survey_suite(kb: KnowledgeBase) -> SurveyReport {
    let kb = Arc::new(kb);
    let results = CORPUS
        .iter()
        .map(|ex| {
            let mut r = run_example(ex, kb.clone(), ex.expected_outcome);
            r.winner_ok = r.winner == Some(ex.expected_winner);
            r.pass = r.outcome_ok
                && r.winner_ok
                && r.chi2_ok
                && r.status == Some(ex.expected_status)
                && r.garden_path == ex.expected_garden_path
                && r.nixon == ex.expected_nixon;
            r
        })
        .collect();
    SurveyReport { results }
}
