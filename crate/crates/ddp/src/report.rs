//! Plain-text rendering.

use std::fmt::Write;

use crate::dto::{Discourse, Report, Utterance};

fn assignment(b: &[crate::dto::Binding]) -> String {
    b.iter().map(|b| format!("{} = {}", b.pronoun, b.label)).collect::<Vec<_>>().join(", ")
}

/// `utt2: him = John (winner: ATT)`; ties list each reading.
pub fn utterance_line(u: &Utterance) -> String {
    if u.top.iter().all(Vec::is_empty) {
        return format!("utt{}: no pronouns", u.utterance);
    }
    let readings = if u.top.first().is_some_and(|b| b.len() == 1) {
        let b = &u.top[0][0];
        let labels: Vec<&str> = u.top.iter().map(|r| r[0].label.as_str()).collect();
        format!("{} = {}", b.pronoun, labels.join(" | "))
    } else {
        u.top.iter().map(|r| assignment(r)).collect::<Vec<_>>().join(" | ")
    };
    let mut notes = vec![format!("winner: {}", u.winner)];
    if u.status != "determinate" {
        notes.push(u.status.clone());
    }
    if u.garden_path {
        notes.push("garden path".into());
    }
    format!("utt{}: {readings} ({})", u.utterance, notes.join(", "))
}

pub fn discourse(d: &Discourse) -> String {
    let mut out = String::new();
    for u in &d.utterances {
        writeln!(out, "{}", utterance_line(u)).unwrap();
        for t in &u.trace {
            let verdict: Vec<String> = t.verdict.iter().map(|g| g.join("/")).collect();
            writeln!(out, "  source={} verdict={} action={}", t.source, verdict.join(">"), t.action).unwrap();
        }
        if let Some(c) = &u.context {
            writeln!(out, "  context: {}", serde_json::to_string(c).unwrap()).unwrap();
        }
    }
    if let Some(f) = &d.failure {
        writeln!(out, "utt{}: error: {}", f.utterance, f.error).unwrap();
    }
    out
}

pub fn survey(r: &Report) -> String {
    let rows: Vec<[String; 8]> = r
        .records
        .iter()
        .map(|x| {
            [
                x.id.clone(),
                x.expected.clone(),
                x.actual.clone(),
                x.expected_winner.clone(),
                x.winner.clone(),
                format!("{:.2}", x.chi2),
                x.band.clone(),
                if x.pass { "PASS" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    let header = ["id", "expected", "actual", "expected winner", "winner", "chi2", "band", "result"].map(String::from);
    let widths: Vec<usize> =
        (0..8).map(|i| rows.iter().chain([&header]).map(|r| r[i].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in [&header].into_iter().chain(&rows) {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
    }
    writeln!(out, "{}/{} PASS", r.passed, r.total).unwrap();
    out
}
