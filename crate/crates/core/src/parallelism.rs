//! PARA: the LF register and the utterance being interpreted seek maximal
//! parallelism. Only the grammatical-function subcase is implemented: a
//! pronoun prefers the register entity realized in its own grammatical
//! function.

use alloc::collections::BTreeSet;

use crate::ilf::{EntityId, GramFunction, ResolvedLf, SurfaceInfo, Var};

fn is_subject(gf: GramFunction) -> bool {
    gf == GramFunction::Subject
}

/// Register entity realized in the pronoun's grammatical function, if it
/// is unique and a candidate.
///
/// When the register realizes nothing in that exact function, the match
/// falls back to the SUBJECT / non-SUBJECT split, so that a passive
/// by-phrase still parallels an OBJECT pronoun.
pub fn para_preference(
    register: &ResolvedLf,
    current: &SurfaceInfo,
    pronoun: &Var,
    candidates: &BTreeSet<EntityId>,
) -> Option<EntityId> {
    let gf = current.get(pronoun)?.gf;
    let realized_with = |keep: &dyn Fn(GramFunction) -> bool| -> BTreeSet<&EntityId> {
        register
            .surface
            .nominals
            .iter()
            .filter(|n| keep(n.gf))
            .filter_map(|n| register.bindings.get(&n.var))
            .collect()
    };
    let mut matches = realized_with(&|g| g == gf);
    if matches.is_empty() {
        matches = realized_with(&|g| is_subject(g) == is_subject(gf));
    }
    match matches.into_iter().collect::<alloc::vec::Vec<_>>().as_slice() {
        [only] if candidates.contains(*only) => Some((*only).clone()),
        _ => None,
    }
}
