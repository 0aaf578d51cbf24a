#![allow(dead_code)]

pub mod fuzz;
pub mod oracle;

use std::collections::BTreeSet;

use chrono::{DateTime, TimeZone, Utc};
use dhub_core::region::{region_of, COUNTRY_POOL};
use dhub_core::*;
use proptest::prelude::*;

pub fn epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
}

pub const TAGS: [&str; 10] =
    ["irrigation", "solar", "drip", "storage", "mobile", "clinic", "sensor", "training", "water", "grid"];

pub fn arb_domain() -> impl Strategy<Value = Domain> {
    prop::sample::select(Domain::ALL.to_vec())
}

pub fn arb_country() -> impl Strategy<Value = String> {
    prop::sample::select(COUNTRY_POOL.to_vec()).prop_map(str::to_string)
}

pub fn arb_tags() -> impl Strategy<Value = BTreeSet<String>> {
    prop::collection::btree_set(prop::sample::select(TAGS.to_vec()).prop_map(str::to_string), 1..5)
}

pub fn arb_unit() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), 0.0..=1.0]
}

pub fn arb_raw() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(arb_unit())
}

/// Raw weight vectors that normalize: non-negative with a positive sum.
pub fn arb_raw_weights() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(prop_oneof![Just(0.0), 0.0..10.0f64])
        .prop_filter("positive sum", |w| w.iter().sum::<f64>() > 1e-6)
}

pub fn org(id: &str, role: OrgRole, country: &str, verified: bool) -> Organization {
    Organization {
        id: id.into(),
        name: format!("Org {id}"),
        role,
        country: country.into(),
        region: region_of(country).unwrap().into(),
        domains: [Domain::Agriculture].into(),
        verified,
        scale_tier: ScaleTier::National,
        created_at: epoch(),
    }
}

pub fn arb_provider() -> impl Strategy<Value = Organization> {
    (arb_country(), any::<bool>()).prop_map(|(c, v)| org("org-000002", OrgRole::Provider, &c, v))
}

pub fn arb_challenge() -> impl Strategy<Value = Challenge> {
    (arb_domain(), arb_country(), arb_tags(), 1u64..2_000_000, 1i64..5_000_000, 1u32..40).prop_map(
        |(domain, country, tags, pop, budget, window)| Challenge {
            id: "chl-000001".into(),
            deployer_id: "org-000001".into(),
            title: "Challenge".into(),
            domain,
            country,
            required_tags: tags,
            affected_population: pop,
            budget_usd: Usd::from_dollars(budget),
            window_months: window,
            status: ChallengeStatus::Open,
            intake_answers: Vec::new(),
        },
    )
}

pub fn arb_coverage() -> impl Strategy<Value = Coverage> {
    prop_oneof![
        1 => Just(Coverage::Global),
        4 => prop::collection::btree_set(arb_country(), 1..4).prop_map(Coverage::Countries),
    ]
}

pub fn arb_solution() -> impl Strategy<Value = Solution> {
    (arb_domain(), arb_tags(), arb_coverage(), 1i64..5_000_000, 1u32..30, 1u64..2_000_000, 0u32..15, 0u32..=100)
        .prop_map(|(domain, tags, coverage, cost, lead, cap, completed, pct)| Solution {
            id: "sol-000001".into(),
            provider_id: "org-000002".into(),
            title: "Solution".into(),
            domain,
            tags,
            coverage,
            cost_usd: Usd::from_dollars(cost),
            lead_time_months: lead,
            capacity_population: cap,
            deployments_completed: completed,
            deployments_successful: completed * pct / 100,
        })
}

pub fn seed42() -> dataset::Dataset {
    synth::generate(&synth::GenConfig::default()).expect("default config generates")
}
