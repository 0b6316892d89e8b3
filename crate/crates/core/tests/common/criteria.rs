//! Table reproductions and counterfactual checks, each returning a short
//! summary on success.

use ddp_core::resolver::Winner;
use ddp_core::survey::{chi_square, SignificanceBand, CHI2_TOLERANCE};
use ddp_core::{core_kb, run_survey_suite, KnowledgeBase, CORPUS};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{check, run_source, top_ids};

/// Printed p-band edges, weakest last.
const P_EDGES: [f64; 7] = [0.001, 0.01, 0.05, 0.10, 0.20, 0.50, 0.70];

/// Band from the exact upper-tail probability of χ²(1).
pub fn band_from_p(chi2: f64) -> SignificanceBand {
    let p = 1.0 - ChiSquared::new(1.0).unwrap().cdf(chi2);
    const BANDS: [&str; 8] =
        ["p<.001", ".001<p<.01", ".01<p<.05", ".05<p<.10", ".10<p<.20", ".20<p<.50", ".50<p<.70", "p>.70"];
    let i = P_EDGES.iter().position(|e| p < *e).unwrap_or(P_EDGES.len());
    BANDS[i].parse().unwrap()
}

/// Recomputes χ² by hand: unclear answers split evenly, even expectation.
pub fn chi2_by_hand(a: u32, b: u32, u: u32) -> f64 {
    let (a, b, u) = (a as f64, b as f64, u as f64);
    let e = (a + b + u) / 2.0;
    let (oa, ob) = (a + u / 2.0, b + u / 2.0);
    (oa - e).powi(2) / e + (ob - e).powi(2) / e
}

pub fn table2() -> Result<String, String> {
    for ex in &CORPUS {
        let c = ex.counts;
        let (chi2, band) = chi_square(c.answer1, c.answer2, c.unclear).map_err(|e| e.to_string())?;
        if (chi2 - ex.expected_chi2).abs() > CHI2_TOLERANCE {
            return Err(format!("{}: chi2 {chi2:.3}, printed {}", ex.id, ex.expected_chi2));
        }
        if (chi2 - chi2_by_hand(c.answer1, c.answer2, c.unclear)).abs() > 1e-9 {
            return Err(format!("{}: chi2 {chi2} disagrees with hand computation", ex.id));
        }
        if band != ex.expected_band || band != band_from_p(chi2) {
            return Err(format!("{}: band {band}, printed {}, exact {}", ex.id, ex.expected_band, band_from_p(chi2)));
        }
    }
    Ok(format!("{} rows", CORPUS.len()))
}

pub fn table3() -> Result<String, String> {
    let report = run_survey_suite(core_kb());
    for (r, ex) in report.results.iter().zip(&CORPUS) {
        if let Some(e) = &r.error {
            return Err(format!("{}: {e}", ex.id));
        }
        if !r.outcome_ok || r.status != Some(ex.expected_status) || r.nixon != ex.expected_nixon {
            return Err(format!(
                "{}: got {:?} ({:?}), expected {:?} ({})",
                ex.id, r.outcome, r.status, r.expected_outcome, ex.expected_status
            ));
        }
    }
    Ok(format!("{} outcomes", report.results.len()))
}

pub fn table4() -> Result<String, String> {
    let report = run_survey_suite(core_kb());
    for (r, ex) in report.results.iter().zip(&CORPUS) {
        if r.winner != Some(ex.expected_winner) {
            return Err(format!("{}: winner {:?}, expected {}", ex.id, r.winner, ex.expected_winner));
        }
        if r.garden_path != (ex.id == "I") {
            return Err(format!("{}: garden_path {}", ex.id, r.garden_path));
        }
    }
    let wk = report.results.iter().filter(|r| r.winner == Some(Winner::Wk)).count();
    Ok(format!("{} winners, {wk} WK", report.results.len()))
}

/// Swaps `subj` and `obj` labels in the first utterance only.
pub fn swap_first_gfs(src: &str) -> String {
    let mut lines: Vec<String> = src.lines().filter(|l| !l.starts_with(';')).map(String::from).collect();
    lines[0] = lines[0].replace(" subj ", " @@ ").replace(" obj ", " subj ").replace(" @@ ", " obj ");
    lines.join("\n")
}

fn last_top(src: &str, kb: KnowledgeBase) -> Vec<Vec<String>> {
    top_ids(run_source(src, kb).last().expect("non-empty discourse"))
}

fn as_ids(groups: &[&[&str]]) -> Vec<Vec<String>> {
    let mut v: Vec<Vec<String>> = groups.iter().map(|g| g.iter().map(|s| s.to_string()).collect()).collect();
    v.sort();
    v
}

/// Empty KB: F to J fall back to the grammatical reading. Swapping the
/// grammatical functions of the antecedent utterance swaps the verdict, in
/// A and in generated two-person discourses.
pub fn counterfactuals(cases: u32) -> Result<String, String> {
    for id in ["F", "G", "H", "I", "J"] {
        let ex = super::corpus(id);
        let got = last_top(ex.source, KnowledgeBase::default());
        if got != as_ids(ex.grammatical_outcome) {
            return Err(format!("{id} with empty KB: {got:?}"));
        }
    }
    let a = super::corpus("A");
    let swapped = last_top(&swap_first_gfs(a.source), core_kb());
    if swapped != as_ids(&[&["bill"]]) {
        return Err(format!("A swapped: {swapped:?}"));
    }

    let names = (0usize..4, 1usize..4, any::<bool>(), prop::sample::select(vec!["hit", "see", "greet"]));
    check(cases, (names, any::<bool>(), any::<bool>()), |((i, d, male, pred), subject_pronoun, with_kb)| {
        const N: [&str; 4] = ["Ann", "Bob", "Cy", "Di"];
        let (s, o) = (N[i], N[(i + d) % 4]);
        let g = if male { "male" } else { "female" };
        let first = format!(
            "(decl (past (ev e {pred}) (role agent subj e x) (name x \"{s}\" {g} sg) (role theme obj e y) (name y \"{o}\" {g} sg)))"
        );
        let second = if subject_pronoun {
            format!("(decl (past (ev e smile) (role agent subj e x) (pro x {g} sg)))")
        } else {
            format!("(decl (past (ev e tell) (role agent subj e m) (name m \"Mo\" neuter sg) (role theme obj e x) (pro x {g} sg)))")
        };
        let src = format!("{first}\n{second}");
        let kb = if with_kb { core_kb() } else { KnowledgeBase::default() };
        let before = last_top(&src, kb.clone());
        let after = last_top(&swap_first_gfs(&src), kb);
        prop_assert_eq!(before, vec![vec![s.to_lowercase()]]);
        prop_assert_eq!(after, vec![vec![o.to_lowercase()]]);
        Ok(())
    })?;
    Ok(format!("5 fallbacks, A swap, {cases} generated swaps"))
}
