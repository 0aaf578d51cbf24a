//! Intrinsic invariant checks for every entity.
//!
//! Checks here need no context beyond the record itself. Cross-record rules
//! (references, roles of referenced organizations) live in the store and
//! dataset loaders.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    normalize_tag, Challenge, Coverage, Deployment, Dimension, Entity, MatchResult, Organization,
    Solution, WeightProfile,
};
use crate::region::{is_country_code, region_of};

pub const PROFILE_SUM_TOLERANCE: f64 = 1e-9;
pub const CONTRIBUTION_TOLERANCE: f64 = 1e-9;
pub const TOTAL_TOLERANCE: f64 = 1e-6;

/// One broken invariant on one record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub entity_id: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity_id, self.rule)
    }
}

struct Checker<'a> {
    id: &'a str,
    found: Vec<Violation>,
}

impl<'a> Checker<'a> {
    fn new(id: &'a str) -> Self {
        let mut c = Checker { id, found: Vec::new() };
        c.require(!id.trim().is_empty(), "id non-empty");
        c
    }

    fn require(&mut self, ok: bool, rule: impl Into<String>) {
        if !ok {
            self.found.push(Violation { entity_id: self.id.to_string(), rule: rule.into() });
        }
    }

    fn country(&mut self, field: &str, code: &str) {
        self.require(is_country_code(code), format!("{field} is a two-letter uppercase code"));
    }

    fn tags(&mut self, field: &str, tags: &BTreeSet<String>) {
        self.require(!tags.is_empty(), format!("{field} non-empty"));
        self.require(
            tags.iter().all(|t| !t.is_empty() && normalize_tag(t) == *t),
            format!("{field} are trimmed lowercase"),
        );
    }

    fn unit_interval(&mut self, field: &str, x: f64) {
        self.require((0.0..=1.0).contains(&x), format!("{field} in [0, 1]"));
    }
}

pub fn validate_organization(org: &Organization) -> Vec<Violation> {
    let mut c = Checker::new(&org.id);
    c.require(!org.name.trim().is_empty(), "name non-empty");
    c.country("country", &org.country);
    if let Ok(region) = region_of(&org.country) {
        c.require(org.region == region, format!("region equals region_of(country) = {region}"));
    }
    c.require(!org.domains.is_empty(), "domains non-empty");
    c.found
}

pub fn validate_challenge(ch: &Challenge) -> Vec<Violation> {
    let mut c = Checker::new(&ch.id);
    c.require(!ch.deployer_id.trim().is_empty(), "deployer_id non-empty");
    c.require(!ch.title.trim().is_empty(), "title non-empty");
    c.country("country", &ch.country);
    c.tags("required_tags", &ch.required_tags);
    c.require(ch.affected_population >= 1, "affected_population ≥ 1");
    c.require(ch.budget_usd.is_positive(), "budget_usd > 0");
    c.require(ch.window_months >= 1, "window_months ≥ 1");
    c.found
}

pub fn validate_solution(sol: &Solution) -> Vec<Violation> {
    let mut c = Checker::new(&sol.id);
    c.require(!sol.provider_id.trim().is_empty(), "provider_id non-empty");
    c.require(!sol.title.trim().is_empty(), "title non-empty");
    c.tags("tags", &sol.tags);
    if let Coverage::Countries(set) = &sol.coverage {
        c.require(!set.is_empty(), "coverage is GLOBAL or a non-empty country set");
        c.require(
            set.iter().all(|code| is_country_code(code)),
            "coverage countries are two-letter uppercase codes",
        );
    }
    c.require(sol.cost_usd.is_positive(), "cost_usd > 0");
    c.require(sol.lead_time_months >= 1, "lead_time_months ≥ 1");
    c.require(sol.capacity_population >= 1, "capacity_population ≥ 1");
    c.require(
        sol.deployments_successful <= sol.deployments_completed,
        "successes ≤ completed",
    );
    c.found
}

pub fn validate_profile(profile: &WeightProfile) -> Vec<Violation> {
    let mut c = Checker::new(&profile.id);
    for dim in Dimension::ALL {
        c.unit_interval(&format!("weight {}", dim.key()), profile.weights.get(dim));
    }
    let sum = profile.weights.sum();
    c.require((sum - 1.0).abs() <= PROFILE_SUM_TOLERANCE, "weights sum to 1");
    c.found
}

pub fn validate_match(m: &MatchResult) -> Vec<Violation> {
    let mut c = Checker::new(&m.id);
    c.require(!m.challenge_id.trim().is_empty(), "challenge_id non-empty");
    c.require(!m.solution_id.trim().is_empty(), "solution_id non-empty");
    let order: Vec<Dimension> = m.breakdown.iter().map(|d| d.dimension).collect();
    c.require(order == Dimension::ALL, "breakdown holds the six dimensions in fixed order");
    for d in &m.breakdown {
        c.unit_interval(&format!("{} raw", d.dimension.key()), d.raw);
        c.unit_interval(&format!("{} weight", d.dimension.key()), d.weight);
        c.require(
            (d.contribution - 100.0 * d.raw * d.weight).abs() <= CONTRIBUTION_TOLERANCE,
            format!("{} contribution = 100 × raw × weight", d.dimension.key()),
        );
    }
    let sum: f64 = m.breakdown.iter().map(|d| d.contribution).sum();
    c.require((m.total - sum).abs() <= TOTAL_TOLERANCE, "total = sum of contributions");
    c.require((0.0..=100.0).contains(&m.total), "total in [0, 100]");
    c.found
}

pub fn validate_deployment(dep: &Deployment) -> Vec<Violation> {
    let mut c = Checker::new(&dep.id);
    c.require(!dep.match_id.trim().is_empty(), "match_id non-empty");
    c.require(dep.committed_usd.cents() >= 0, "committed_usd ≥ 0");
    c.require(
        dep.milestones.iter().all(|m| !m.name.trim().is_empty()),
        "milestone names non-empty",
    );
    let names: BTreeSet<&str> = dep.milestones.iter().map(|m| m.name.as_str()).collect();
    c.require(names.len() == dep.milestones.len(), "milestone names unique");
    c.found
}

/// Every violated invariant of the entity; empty means valid.
pub fn validate_entity(entity: &Entity) -> Vec<Violation> {
    match entity {
        Entity::Organization(e) => validate_organization(e),
        Entity::Challenge(e) => validate_challenge(e),
        Entity::Solution(e) => validate_solution(e),
        Entity::Match(e) => validate_match(e),
        Entity::Deployment(e) => validate_deployment(e),
    }
}
