//! Explainable six-dimension matching.
//!
//! Each dimension yields a score in `[0, 1]`. The composite is
//! `100 × Σ w_k f_k` over a weight profile that sums to one, so totals live on
//! a 0–100 scale and every point of the total is attributable to exactly one
//! dimension.

use std::cmp::Ordering;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::apportion::round_to_sum;
use crate::error::EngineError;
use crate::model::{
    Challenge, Coverage, Dimension, DimensionScore, MatchResult, Organization, Solution,
    WeightProfile, Weights,
};
use crate::region::{region_of, OTHER};
use crate::validate::PROFILE_SUM_TOLERANCE;

/// Default weights in whole percent, in [`Dimension::ALL`] order.
pub const DEFAULT_WEIGHT_PERCENT: [u32; 6] = [20, 15, 20, 25, 15, 5];

pub const DEFAULT_PROFILE_ID: &str = "wp-default";

pub const EXACT_COUNTRY_SCORE: f64 = 1.0;
pub const GLOBAL_COVERAGE_SCORE: f64 = 0.8;
pub const SAME_REGION_SCORE: f64 = 0.5;

/// Normalized weights are snapped to this many decimal places.
const WEIGHT_DECIMALS: i32 = 12;

pub fn default_weights() -> Weights {
    Weights::from_array(DEFAULT_WEIGHT_PERCENT.map(|p| f64::from(p) / 100.0))
}

pub fn default_profile() -> WeightProfile {
    WeightProfile { id: DEFAULT_PROFILE_ID.to_string(), weights: default_weights() }
}

/// Scales six non-negative raw weights to sum to one.
///
/// Results are snapped to a 1e-12 grid, so rescaling the raw input by any
/// positive constant yields the same profile, and the default percentages map
/// back to the default profile bit for bit.
pub fn normalize_profile(raw: [f64; 6]) -> Result<WeightProfile, EngineError> {
    for (index, &value) in raw.iter().enumerate() {
        if !(value.is_finite() && value >= 0.0) {
            return Err(EngineError::InvalidWeight { index, value });
        }
    }
    let sum: f64 = raw.iter().sum();
    if sum <= 0.0 || !sum.is_finite() {
        return Err(EngineError::DegenerateProfile);
    }
    let scale = 10f64.powi(WEIGHT_DECIMALS);
    let weights = Weights::from_array(raw.map(|r| ((r / sum) * scale).round() / scale));
    Ok(WeightProfile { id: profile_id(&weights), weights })
}

/// Content-derived identifier: identical weights always share an id.
pub fn profile_id(weights: &Weights) -> String {
    if *weights == default_weights() {
        return DEFAULT_PROFILE_ID.to_string();
    }
    let mut hasher = Sha256::new();
    for w in weights.to_array() {
        hasher.update(w.to_bits().to_be_bytes());
    }
    let digest = hasher.finalize();
    let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    format!("wp-{hex}")
}

pub fn check_profile(profile: &WeightProfile) -> Result<(), EngineError> {
    for (index, value) in profile.weights.to_array().into_iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(EngineError::InvalidWeight { index, value });
        }
    }
    let sum = profile.weights.sum();
    if (sum - 1.0).abs() > PROFILE_SUM_TOLERANCE {
        return Err(EngineError::UnnormalizedProfile(sum));
    }
    Ok(())
}

fn shared_region(a: &str, b: &str) -> Option<&'static str> {
    let ra = region_of(a).ok().filter(|r| *r != OTHER)?;
    (region_of(b).ok() == Some(ra)).then_some(ra)
}

/// Exact country beats GLOBAL, which beats a same-region neighbour.
pub fn geographic_fit(challenge: &Challenge, solution: &Solution) -> f64 {
    match &solution.coverage {
        c if c.lists(&challenge.country) => EXACT_COUNTRY_SCORE,
        Coverage::Global => GLOBAL_COVERAGE_SCORE,
        Coverage::Countries(set) => {
            if set.iter().any(|c| shared_region(&challenge.country, c).is_some()) {
                SAME_REGION_SCORE
            } else {
                0.0
            }
        }
    }
}

pub fn temporal_fit(challenge: &Challenge, solution: &Solution) -> f64 {
    capped_ratio(f64::from(challenge.window_months), f64::from(solution.lead_time_months))
}

pub fn budget_fit(challenge: &Challenge, solution: &Solution) -> f64 {
    capped_ratio(challenge.budget_usd.as_f64(), solution.cost_usd.as_f64())
}

/// Jaccard similarity of the tag sets, each extended with its domain.
pub fn capability_fit(challenge: &Challenge, solution: &Solution) -> f64 {
    let (shared, union) = capability_overlap(challenge, solution);
    if union == 0 {
        0.0
    } else {
        shared as f64 / union as f64
    }
}

fn capability_overlap(challenge: &Challenge, solution: &Solution) -> (usize, usize) {
    let mut need = challenge.required_tags.clone();
    need.insert(challenge.domain.tag());
    let mut offer = solution.tags.clone();
    offer.insert(solution.domain.tag());
    (need.intersection(&offer).count(), need.union(&offer).count())
}

/// Half verification, half Laplace-smoothed success rate.
pub fn provider_credibility(solution: &Solution, provider: &Organization) -> f64 {
    let verified = if provider.verified { 1.0 } else { 0.0 };
    let rate = (f64::from(solution.deployments_successful) + 1.0)
        / (f64::from(solution.deployments_completed) + 2.0);
    0.5 * verified + 0.5 * rate
}

pub fn population_alignment(challenge: &Challenge, solution: &Solution) -> f64 {
    capped_ratio(solution.capacity_population as f64, challenge.affected_population as f64)
}

fn capped_ratio(have: f64, need: f64) -> f64 {
    if need <= 0.0 || have >= need {
        1.0
    } else {
        (have / need).clamp(0.0, 1.0)
    }
}

/// The six raw scores in [`Dimension::ALL`] order.
pub fn dimension_scores(challenge: &Challenge, solution: &Solution, provider: &Organization) -> [f64; 6] {
    [
        geographic_fit(challenge, solution),
        temporal_fit(challenge, solution),
        budget_fit(challenge, solution),
        capability_fit(challenge, solution),
        provider_credibility(solution, provider),
        population_alignment(challenge, solution),
    ]
}

fn detail(dim: Dimension, challenge: &Challenge, solution: &Solution, provider: &Organization) -> String {
    match dim {
        Dimension::Geographic => match &solution.coverage {
            c if c.lists(&challenge.country) => format!("solution covers {} directly", challenge.country),
            Coverage::Global => "solution has global coverage".to_string(),
            Coverage::Countries(set) => match set
                .iter()
                .find_map(|c| shared_region(&challenge.country, c).map(|r| (c, r)))
            {
                Some((c, r)) => format!("solution covers {c}, in the same region ({r}) as {}", challenge.country),
                None => format!("no coverage in {} or its region", challenge.country),
            },
        },
        Dimension::Temporal => format!(
            "lead time {} months against a {}-month window",
            solution.lead_time_months, challenge.window_months
        ),
        Dimension::Budget => format!(
            "budget {} USD against cost {} USD",
            challenge.budget_usd, solution.cost_usd
        ),
        Dimension::Capability => {
            let (shared, union) = capability_overlap(challenge, solution);
            format!("{shared} of {union} capability tags shared")
        }
        Dimension::Credibility => format!(
            "{} provider, {} of {} past deployments successful",
            if provider.verified { "verified" } else { "unverified" },
            solution.deployments_successful,
            solution.deployments_completed
        ),
        Dimension::Population => format!(
            "capacity {} for {} affected people",
            solution.capacity_population, challenge.affected_population
        ),
    }
}

fn reason(dim: Dimension, raw: f64, weight: f64, detail: Option<String>) -> String {
    let head = format!("{} scored {:.2} with weight {:.2}", dim.label(), raw, weight);
    match detail {
        Some(d) => format!("{head}: {d}."),
        None => format!("{head}."),
    }
}

/// Builds the weighted breakdown for a raw score vector.
pub fn compose(raw: [f64; 6], profile: &WeightProfile, details: Option<[String; 6]>) -> (Vec<DimensionScore>, f64) {
    let weights = profile.weights.to_array();
    let mut details = details.map(|d| d.map(Some)).unwrap_or_default();
    let breakdown: Vec<DimensionScore> = Dimension::ALL
        .into_iter()
        .map(|dim| {
            let k = dim.index();
            let f = raw[k].clamp(0.0, 1.0);
            DimensionScore {
                dimension: dim,
                raw: f,
                weight: weights[k],
                contribution: 100.0 * f * weights[k],
                reason: reason(dim, f, weights[k], details[k].take()),
            }
        })
        .collect();
    let total: f64 = breakdown.iter().map(|d| d.contribution).sum();
    (breakdown, total.clamp(0.0, 100.0))
}

/// Scores a raw vector directly, with template reasons only.
pub fn score_raw(raw: [f64; 6], profile: &WeightProfile) -> Result<(Vec<DimensionScore>, f64), EngineError> {
    check_profile(profile)?;
    Ok(compose(raw, profile, None))
}

/// Scores one challenge–solution pair. The result has an empty id; the store
/// assigns one on persistence.
pub fn score_pair(
    challenge: &Challenge,
    solution: &Solution,
    provider: &Organization,
    profile: &WeightProfile,
) -> Result<MatchResult, EngineError> {
    score_pair_at(challenge, solution, provider, profile, Utc::now())
}

pub fn score_pair_at(
    challenge: &Challenge,
    solution: &Solution,
    provider: &Organization,
    profile: &WeightProfile,
    computed_at: DateTime<Utc>,
) -> Result<MatchResult, EngineError> {
    if provider.id != solution.provider_id {
        return Err(EngineError::ProviderMismatch {
            solution: solution.id.clone(),
            expected: solution.provider_id.clone(),
            given: provider.id.clone(),
        });
    }
    check_profile(profile)?;
    let raw = dimension_scores(challenge, solution, provider);
    let details = Dimension::ALL.map(|d| detail(d, challenge, solution, provider));
    let (breakdown, total) = compose(raw, profile, Some(details));
    Ok(MatchResult {
        id: String::new(),
        challenge_id: challenge.id.clone(),
        solution_id: solution.id.clone(),
        profile_id: profile.id.clone(),
        breakdown,
        total,
        computed_at,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedMatch {
    pub rank: usize,
    #[serde(rename = "match")]
    pub result: MatchResult,
}

/// Higher total first, then ascending solution id.
pub fn ranking_order(a: &MatchResult, b: &MatchResult) -> Ordering {
    b.total.total_cmp(&a.total).then_with(|| a.solution_id.cmp(&b.solution_id))
}

/// Sorts already-scored matches, truncates to `top_k` and assigns ranks 1..n.
pub fn rank_matches(mut matches: Vec<MatchResult>, top_k: Option<usize>) -> Result<Vec<RankedMatch>, EngineError> {
    if top_k == Some(0) {
        return Err(EngineError::ZeroTopK);
    }
    matches.sort_by(ranking_order);
    if let Some(k) = top_k {
        matches.truncate(k);
    }
    Ok(matches
        .into_iter()
        .enumerate()
        .map(|(i, result)| RankedMatch { rank: i + 1, result })
        .collect())
}

pub fn rank_solutions<'a, I>(
    challenge: &Challenge,
    candidates: I,
    profile: &WeightProfile,
    top_k: Option<usize>,
) -> Result<Vec<RankedMatch>, EngineError>
where
    I: IntoIterator<Item = (&'a Solution, &'a Organization)>,
{
    rank_solutions_at(challenge, candidates, profile, top_k, Utc::now())
}

pub fn rank_solutions_at<'a, I>(
    challenge: &Challenge,
    candidates: I,
    profile: &WeightProfile,
    top_k: Option<usize>,
    computed_at: DateTime<Utc>,
) -> Result<Vec<RankedMatch>, EngineError>
where
    I: IntoIterator<Item = (&'a Solution, &'a Organization)>,
{
    if top_k == Some(0) {
        return Err(EngineError::ZeroTopK);
    }
    check_profile(profile)?;
    let scored = candidates
        .into_iter()
        .map(|(s, p)| score_pair_at(challenge, s, p, profile, computed_at))
        .collect::<Result<Vec<_>, _>>()?;
    rank_matches(scored, top_k)
}

/// Half-up rounding to tenths, as an integer count of tenths.
pub fn tenths_half_up(x: f64) -> i64 {
    (x * 10.0 + 0.5 + 1e-9).floor() as i64
}

pub fn format_tenths(tenths: i64) -> String {
    let sign = if tenths < 0 { "-" } else { "" };
    let t = tenths.unsigned_abs();
    format!("{sign}{}.{}", t / 10, t % 10)
}

/// One-decimal display, rounding half up.
pub fn display_points(x: f64) -> String {
    format_tenths(tenths_half_up(x))
}

/// Per-dimension contributions and the total in tenths of a point, as
/// displayed: the total is rounded half-up and the contributions are
/// apportioned so that they add up to it exactly.
pub fn shown_tenths(m: &MatchResult) -> (Vec<u64>, u64) {
    let total_tenths = tenths_half_up(m.total).max(0) as u64;
    let scaled: Vec<f64> = m.breakdown.iter().map(|d| d.contribution * 10.0).collect();
    (round_to_sum(&scaled, total_tenths), total_tenths)
}

/// Six per-dimension lines followed by a summary line.
///
/// Contributions are shown to one decimal and apportioned so the shown values
/// add up to the shown total.
pub fn explain(m: &MatchResult) -> Vec<String> {
    let (shown, total_tenths) = shown_tenths(m);
    let mut lines: Vec<String> = m
        .breakdown
        .iter()
        .zip(shown)
        .map(|(d, tenths)| {
            format!(
                "{:<21} raw {:.3} × weight {:.3} = {:>5} pts",
                d.dimension.label(),
                d.raw,
                d.weight,
                format_tenths(tenths as i64)
            )
        })
        .collect();
    lines.push(format!(
        "Total compatibility {} / 100 for {} → {}",
        format_tenths(total_tenths as i64),
        m.challenge_id,
        m.solution_id
    ));
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::collections::BTreeSet;

    fn tags(t: &[&str]) -> BTreeSet<String> {
        t.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn geographic_rules() {
        let ch = fixtures::challenge();
        let mut sol = fixtures::solution();
        sol.coverage = Coverage::countries(["KE", "TZ"]);
        assert_eq!(geographic_fit(&ch, &sol), 1.0);
        sol.coverage = Coverage::Global;
        assert_eq!(geographic_fit(&ch, &sol), 0.8);
        sol.coverage = Coverage::countries(["TZ"]);
        assert_eq!(geographic_fit(&ch, &sol), 0.5);
        sol.coverage = Coverage::countries(["BR"]);
        assert_eq!(geographic_fit(&ch, &sol), 0.0);
    }

    #[test]
    fn unknown_countries_do_not_share_a_region() {
        let mut ch = fixtures::challenge();
        ch.country = "ZZ".into();
        let mut sol = fixtures::solution();
        sol.coverage = Coverage::countries(["ZY"]);
        assert_eq!(geographic_fit(&ch, &sol), 0.0);
    }

    #[test]
    fn temporal_rules() {
        let mut ch = fixtures::challenge();
        let mut sol = fixtures::solution();
        for (window, lead, want) in [(12, 6, 1.0), (6, 12, 0.5), (1, 1, 1.0)] {
            ch.window_months = window;
            sol.lead_time_months = lead;
            assert_eq!(temporal_fit(&ch, &sol), want);
        }
    }

    #[test]
    fn budget_rules() {
        use crate::model::Usd;
        let mut ch = fixtures::challenge();
        let mut sol = fixtures::solution();
        for (budget, cost, want) in [(1_000_000, 800_000, 1.0), (500_000, 1_000_000, 0.5), (1, 1, 1.0)] {
            ch.budget_usd = Usd::from_dollars(budget);
            sol.cost_usd = Usd::from_dollars(cost);
            assert_eq!(budget_fit(&ch, &sol), want);
        }
    }

    #[test]
    fn capability_rules() {
        use crate::model::Domain;
        let mut ch = fixtures::challenge();
        let mut sol = fixtures::solution();
        ch.required_tags = tags(&["irrigation", "solar"]);
        sol.tags = tags(&["irrigation", "drip"]);
        assert_eq!(capability_fit(&ch, &sol), 0.5);
        sol.tags = ch.required_tags.clone();
        assert_eq!(capability_fit(&ch, &sol), 1.0);
        sol.tags = tags(&["vaccines"]);
        sol.domain = Domain::Health;
        assert_eq!(capability_fit(&ch, &sol), 0.0);
    }

    #[test]
    fn credibility_rules() {
        let mut sol = fixtures::solution();
        let mut org = fixtures::provider();
        org.verified = true;
        sol.deployments_completed = 8;
        sol.deployments_successful = 6;
        assert!((provider_credibility(&sol, &org) - 0.85).abs() < 1e-12);
        org.verified = false;
        sol.deployments_completed = 0;
        sol.deployments_successful = 0;
        assert_eq!(provider_credibility(&sol, &org), 0.25);
        org.verified = true;
        assert_eq!(provider_credibility(&sol, &org), 0.75);
    }

    #[test]
    fn population_rules() {
        let mut ch = fixtures::challenge();
        let mut sol = fixtures::solution();
        for (cap, affected, want) in [(100_000, 50_000, 1.0), (25_000, 100_000, 0.25), (1, 1, 1.0)] {
            sol.capacity_population = cap;
            ch.affected_population = affected;
            assert_eq!(population_alignment(&ch, &sol), want);
        }
    }

    #[test]
    fn worked_example_totals_57() {
        let (breakdown, total) = score_raw([1.0, 0.8, 0.6, 0.4, 0.2, 0.0], &default_profile()).unwrap();
        assert!((total - 57.0).abs() < 1e-9, "{total}");
        assert!((breakdown[3].contribution - 10.0).abs() < 1e-9);
    }

    #[test]
    fn bounds_of_composite() {
        let p = normalize_profile([3.0, 1.0, 4.0, 1.0, 5.0, 9.0]).unwrap();
        assert!((score_raw([1.0; 6], &p).unwrap().1 - 100.0).abs() < 1e-9);
        assert_eq!(score_raw([0.0; 6], &p).unwrap().1, 0.0);
    }

    #[test]
    fn provider_mismatch_is_rejected() {
        let ch = fixtures::challenge();
        let sol = fixtures::solution();
        let other = fixtures::deployer();
        let err = score_pair(&ch, &sol, &other, &default_profile()).unwrap_err();
        assert!(matches!(err, EngineError::ProviderMismatch { .. }));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_profile([0.20, 0.15, 0.20, 0.25, 0.15, 0.05]).unwrap(), default_profile());
        let p = normalize_profile([2.0, 1.0, 2.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(p.weights.to_array(), [0.25, 0.125, 0.25, 0.25, 0.125, 0.0]);
        let eq = normalize_profile([1.0; 6]).unwrap();
        for w in eq.weights.to_array() {
            assert!((w - 1.0 / 6.0).abs() < 1e-11);
        }
        assert!((eq.weights.sum() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn normalize_errors() {
        assert_eq!(normalize_profile([0.0; 6]), Err(EngineError::DegenerateProfile));
        assert!(matches!(
            normalize_profile([1.0, -1.0, 0.0, 0.0, 0.0, 0.0]),
            Err(EngineError::InvalidWeight { index: 1, .. })
        ));
        assert!(normalize_profile([f64::NAN, 1.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn scaled_raw_weights_give_identical_profile() {
        let raw = [0.3, 0.7, 0.11, 0.0, 2.5, 0.01];
        let base = normalize_profile(raw).unwrap();
        for c in [0.5, 3.0, 1000.0, 1e-6, 7.77] {
            assert_eq!(normalize_profile(raw.map(|r| r * c)).unwrap(), base, "c = {c}");
        }
    }

    #[test]
    fn ranking_tie_breaks_by_solution_id() {
        let ch = fixtures::challenge();
        let org = fixtures::provider();
        let mut a = fixtures::solution();
        a.id = "sol-000002".into();
        let mut b = fixtures::solution();
        b.id = "sol-000001".into();
        let ranked = rank_solutions(&ch, [(&a, &org), (&b, &org)], &default_profile(), None).unwrap();
        let ids: Vec<_> = ranked.iter().map(|r| r.result.solution_id.as_str()).collect();
        assert_eq!(ids, ["sol-000001", "sol-000002"]);
        assert_eq!(ranked.iter().map(|r| r.rank).collect::<Vec<_>>(), [1, 2]);
    }

    #[test]
    fn ranking_orders_by_total_and_truncates() {
        let ch = fixtures::challenge();
        let org = fixtures::provider();
        let good = fixtures::solution();
        let mut poor = fixtures::solution();
        poor.id = "sol-000000".into();
        poor.coverage = Coverage::countries(["BR"]);
        let ranked = rank_solutions(&ch, [(&poor, &org), (&good, &org)], &default_profile(), None).unwrap();
        assert_eq!(ranked[0].result.solution_id, good.id);
        assert!(ranked[0].result.total > ranked[1].result.total);
        let top = rank_solutions(&ch, [(&poor, &org), (&good, &org)], &default_profile(), Some(1)).unwrap();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].rank, 1);
        assert_eq!(
            rank_solutions(&ch, [(&good, &org)], &default_profile(), Some(0)),
            Err(EngineError::ZeroTopK)
        );
    }

    #[test]
    fn single_candidate_ranks_first() {
        let ch = fixtures::challenge();
        let org = fixtures::provider();
        let mut sol = fixtures::solution();
        sol.coverage = Coverage::countries(["BR"]);
        let ranked = rank_solutions(&ch, [(&sol, &org)], &default_profile(), None).unwrap();
        assert_eq!(ranked.len(), 1);
        assert_eq!(ranked[0].rank, 1);
    }

    fn worked_match() -> MatchResult {
        let (breakdown, total) = score_raw([1.0, 0.8, 0.6, 0.4, 0.2, 0.0], &default_profile()).unwrap();
        MatchResult {
            id: "mat-000001".into(),
            challenge_id: "chl-000001".into(),
            solution_id: "sol-000001".into(),
            profile_id: DEFAULT_PROFILE_ID.into(),
            breakdown,
            total,
            computed_at: fixtures::epoch(),
        }
    }

    #[test]
    fn explain_worked_example() {
        let lines = explain(&worked_match());
        assert_eq!(lines.len(), 7);
        assert!(lines[6].contains("57.0"), "{}", lines[6]);
        assert!(lines[3].starts_with("Capability fit"));
        assert!(lines[3].contains("10.0"), "{}", lines[3]);
        assert_eq!(lines, explain(&worked_match()));
    }

    #[test]
    fn explain_zero_match() {
        let mut m = worked_match();
        let (breakdown, total) = score_raw([0.0; 6], &default_profile()).unwrap();
        m.breakdown = breakdown;
        m.total = total;
        let lines = explain(&m);
        for line in &lines[..6] {
            assert!(line.ends_with(" 0.0 pts"), "{line}");
        }
    }

    #[test]
    fn display_rounds_half_up() {
        assert_eq!(display_points(57.0), "57.0");
        assert_eq!(display_points(56.99999999999999), "57.0");
        assert_eq!(display_points(0.05), "0.1");
        assert_eq!(display_points(12.34), "12.3");
        assert_eq!(display_points(100.0), "100.0");
    }

    #[test]
    fn reasons_name_dimension_raw_and_weight() {
        let m = score_pair(&fixtures::challenge(), &fixtures::solution(), &fixtures::provider(), &default_profile()).unwrap();
        let geo = &m.breakdown[0].reason;
        assert!(geo.starts_with("Geographic fit scored 1.00 with weight 0.20"), "{geo}");
        assert!(m.breakdown[4].reason.contains("verified provider"));
    }
}
