//! An independent restatement of the scoring rules, used as a test oracle.
//!
//! Kept deliberately naive: no shared helpers with the engine beyond the
//! country → region table.

use dhub_core::region::region_of;
use dhub_core::{Challenge, Coverage, Organization, Solution};

fn ratio(have: f64, need: f64) -> f64 {
    if need <= 0.0 || have >= need {
        1.0
    } else {
        have / need
    }
}

fn region(code: &str) -> Option<&'static str> {
    match region_of(code) {
        Ok("OTHER") | Err(_) => None,
        Ok(r) => Some(r),
    }
}

pub fn raw_scores(ch: &Challenge, sol: &Solution, provider: &Organization) -> [f64; 6] {
    let geo = match &sol.coverage {
        Coverage::Global => 0.8,
        Coverage::Countries(set) if set.contains(&ch.country) => 1.0,
        Coverage::Countries(set) => {
            let home = region(&ch.country);
            if home.is_some() && set.iter().any(|c| region(c) == home) {
                0.5
            } else {
                0.0
            }
        }
    };
    let temporal = ratio(f64::from(ch.window_months), f64::from(sol.lead_time_months));
    let budget = ratio(ch.budget_usd.cents() as f64 / 100.0, sol.cost_usd.cents() as f64 / 100.0);
    let mut need: Vec<String> = ch.required_tags.iter().cloned().collect();
    need.push(ch.domain.as_str().to_lowercase());
    let mut offer: Vec<String> = sol.tags.iter().cloned().collect();
    offer.push(sol.domain.as_str().to_lowercase());
    need.sort();
    need.dedup();
    offer.sort();
    offer.dedup();
    let shared = need.iter().filter(|t| offer.contains(t)).count();
    let union = need.len() + offer.len() - shared;
    let capability = if union == 0 { 0.0 } else { shared as f64 / union as f64 };
    let credibility = 0.5 * if provider.verified { 1.0 } else { 0.0 }
        + 0.5 * (f64::from(sol.deployments_successful) + 1.0) / (f64::from(sol.deployments_completed) + 2.0);
    let population = ratio(sol.capacity_population as f64, ch.affected_population as f64);
    [geo, temporal, budget, capability, credibility, population]
}

pub fn total(raw: [f64; 6], weights: [f64; 6]) -> f64 {
    let mut sum = 0.0;
    for k in 0..6 {
        sum += 100.0 * raw[k] * weights[k];
    }
    sum
}

/// Solution ids for one challenge, best first, ties by ascending id.
pub fn ranking(ch: &Challenge, candidates: &[(&Solution, &Organization)], weights: [f64; 6]) -> Vec<String> {
    let mut scored: Vec<(f64, String)> = candidates
        .iter()
        .map(|(s, p)| (total(raw_scores(ch, s, p), weights), s.id.clone()))
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(&b.1)));
    scored.into_iter().map(|(_, id)| id).collect()
}
