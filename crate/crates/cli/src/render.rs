//! Fixed-width text output. Scores are shown in points with one decimal,
//! rounded half-up, with per-dimension columns adding up to the total.

use std::fmt::Write;

use dhub_core::engine::{format_tenths, shown_tenths};
use dhub_core::{Challenge, Dimension, RankedMatch, WeightProfile};

const COLUMNS: [&str; 6] = ["Geo", "Time", "Budget", "Capab", "Cred", "Pop"];

pub fn profile_line(profile: &WeightProfile, is_default: bool) -> String {
    let weights = Dimension::ALL
        .iter()
        .map(|d| format!("{} {:.2}", d.key(), profile.weights.get(*d)))
        .collect::<Vec<_>>()
        .join(", ");
    let origin = if is_default { "default weights" } else { "custom weights, normalized" };
    format!("Profile {} ({origin}): {weights}", profile.id)
}

pub fn match_table(challenge: &Challenge, profile: &WeightProfile, is_default: bool, ranked: &[RankedMatch]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Challenge {}: {} ({}, {})",
        challenge.id, challenge.title, challenge.domain, challenge.country
    );
    let _ = writeln!(out, "{}", profile_line(profile, is_default));
    if ranked.is_empty() {
        let _ = writeln!(out, "no candidate solutions");
        return out;
    }
    let _ = write!(out, "{:>4}  {:<12}  {:>6}", "Rank", "Solution", "Total");
    for c in COLUMNS {
        let _ = write!(out, "  {c:>6}");
    }
    out.push('\n');
    for r in ranked {
        let (parts, total) = shown_tenths(&r.result);
        let _ = write!(out, "{:>4}  {:<12}  {:>6}", r.rank, r.result.solution_id, format_tenths(total as i64));
        for p in parts {
            let _ = write!(out, "  {:>6}", format_tenths(p as i64));
        }
        out.push('\n');
    }
    out
}
