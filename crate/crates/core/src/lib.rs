//! Two-tier discourse processing.
//!
//! The first tier builds an underspecified, context-independent logical
//! form (ILF) for each utterance. The second tier resolves its pronouns
//! against a discourse context by combining indefeasible presuppositions
//! with defeasible attentional, parallelism and commonsense preferences,
//! each later source overriding the earlier ones.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod attention;
pub mod context;
pub mod ilf;
pub mod parallelism;
pub mod resolver;
pub mod semrules;
pub mod sexpr;
pub mod survey;
pub mod worldkb;

pub use attention::{att_preference, salience_order, update_center, AttentionalState};
pub use context::{init_context, Context, ContextError, DiscourseModel, Entity, Eventuality, Indexical};
pub use ilf::{parse_discourse, parse_ilf, specialize, Ilf, IlfError, ResolvedLf};
pub use parallelism::para_preference;
pub use resolver::{combine_grammatical, resolve, resolve_discourse, Assignment, PreferenceVerdict, ResolveError, Status, TraceStep, Winner};
pub use semrules::{sem_filter, Lexicon, SemDecision, SemError};
pub use worldkb::{wk_preference, KbError, KnowledgeBase, Support, WkOverall, WkVerdict};
pub use survey::{chi_square, core_kb, run_survey_suite, SignificanceBand, SurveyReport, CORE_KB, CORPUS};
