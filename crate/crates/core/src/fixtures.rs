//! Small hand-built records shared by unit tests.

use std::collections::BTreeSet;

use chrono::{DateTime, TimeZone, Utc};

use crate::model::*;

pub fn epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
}

fn set<T: Ord + Clone>(items: &[T]) -> BTreeSet<T> {
    items.iter().cloned().collect()
}

fn org(id: &str, role: OrgRole, country: &str, verified: bool) -> Organization {
    Organization {
        id: id.into(),
        name: format!("{role} {id}"),
        role,
        country: country.into(),
        region: crate::region::region_of(country).unwrap().into(),
        domains: set(&[Domain::Agriculture]),
        verified,
        scale_tier: ScaleTier::National,
        created_at: epoch(),
    }
}

pub fn deployer() -> Organization {
    org("org-000001", OrgRole::Deployer, "KE", false)
}

pub fn provider() -> Organization {
    org("org-000002", OrgRole::Provider, "TZ", true)
}

pub fn financier() -> Organization {
    org("org-000003", OrgRole::Financier, "GB", true)
}

pub fn challenge() -> Challenge {
    Challenge {
        id: "chl-000001".into(),
        deployer_id: "org-000001".into(),
        title: "Smallholder irrigation".into(),
        domain: Domain::Agriculture,
        country: "KE".into(),
        required_tags: set(&["irrigation".to_string(), "solar".to_string()]),
        affected_population: 50_000,
        budget_usd: Usd::from_dollars(1_000_000),
        window_months: 12,
        status: ChallengeStatus::Open,
        intake_answers: Vec::new(),
    }
}

pub fn solution() -> Solution {
    Solution {
        id: "sol-000001".into(),
        provider_id: "org-000002".into(),
        title: "Drip irrigation kits".into(),
        domain: Domain::Agriculture,
        tags: set(&["irrigation".to_string(), "drip".to_string()]),
        coverage: Coverage::countries(["KE", "TZ"]),
        cost_usd: Usd::from_dollars(800_000),
        lead_time_months: 6,
        capacity_population: 100_000,
        deployments_completed: 8,
        deployments_successful: 6,
    }
}

pub fn deployment() -> Deployment {
    Deployment {
        id: "dep-000001".into(),
        match_id: "mat-000001".into(),
        financier_id: None,
        committed_usd: Usd::from_dollars(250_000),
        milestones: Vec::new(),
        status: DeploymentStatus::Proposed,
        created_at: epoch(),
    }
}
