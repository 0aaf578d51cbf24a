//! Store-level operations shared by the HTTP service and the command line.
//!
//! Each function takes the store explicitly and, where records are written,
//! the timestamp to stamp them with, so the same call on the same state
//! always gives the same result.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, default_profile, normalize_profile, rank_solutions_at, RankedMatch};
use crate::error::{EngineError, IntakeError, StoreError};
use crate::model::{
    ChallengeStatus, Deployment, DeploymentStatus, Domain, Entity, EntityKind, MatchResult,
    Milestone, MilestoneStatus, OrgRole, Solution, Usd, Challenge, Organization, WeightProfile,
};
use crate::store::Store;

pub const DEFAULT_TOP_K: usize = 10;
pub const DEFAULT_OPPORTUNITY_THRESHOLD: f64 = 70.0;
pub const DEPLOYER_TOP_MATCHES: usize = 3;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Intake(#[from] IntakeError),
    #[error("{0}")]
    BadRequest(String),
}

fn not_found(kind: EntityKind, id: &str) -> ServiceError {
    StoreError::NotFound { kind, id: id.to_string() }.into()
}

/// The profile for an optional set of raw weights; defaults when absent.
pub fn resolve_profile(raw: Option<[f64; 6]>) -> Result<WeightProfile, EngineError> {
    match raw {
        Some(w) => normalize_profile(w),
        None => Ok(default_profile()),
    }
}

/// Ranks every stored solution for the challenge without writing anything.
pub fn rank_for_challenge(
    store: &Store,
    challenge_id: &str,
    profile: &WeightProfile,
    top_k: Option<usize>,
    now: DateTime<Utc>,
) -> Result<Vec<RankedMatch>, ServiceError> {
    let challenge = store.challenge(challenge_id).ok_or_else(|| not_found(EntityKind::Challenge, challenge_id))?;
    Ok(rank_solutions_at(challenge, store.candidates(), profile, top_k, now)?)
}

/// Ranks, then persists each returned match under a fresh id.
pub fn compute_matches(
    store: &mut Store,
    challenge_id: &str,
    raw_weights: Option<[f64; 6]>,
    top_k: Option<usize>,
    now: DateTime<Utc>,
) -> Result<Vec<RankedMatch>, ServiceError> {
    let profile = resolve_profile(raw_weights)?;
    let mut ranked = rank_for_challenge(store, challenge_id, &profile, Some(top_k.unwrap_or(DEFAULT_TOP_K)), now)?;
    for r in &mut ranked {
        r.result.id = store.allocate_id(EntityKind::Match);
        store.put(r.result.clone())?;
    }
    Ok(ranked)
}

/// Persisted matches for one challenge, best first.
pub fn stored_matches(store: &Store, challenge_id: &str) -> Result<Vec<MatchResult>, ServiceError> {
    if store.challenge(challenge_id).is_none() {
        return Err(not_found(EntityKind::Challenge, challenge_id));
    }
    let mut out: Vec<MatchResult> = store.matches().filter(|m| m.challenge_id == challenge_id).cloned().collect();
    out.sort_by(|a, b| engine::ranking_order(a, b).then_with(|| a.id.cmp(&b.id)));
    Ok(out)
}

/// Stores a new record under a freshly allocated id, normalizing tags first.
pub fn create(store: &mut Store, entity: impl Into<Entity>) -> Result<Entity, ServiceError> {
    let mut entity = entity.into();
    let id = store.allocate_id(entity.kind());
    match &mut entity {
        Entity::Organization(o) => {
            o.id = id;
            o.country = o.country.trim().to_ascii_uppercase();
            if let Ok(region) = crate::region::region_of(&o.country) {
                o.region = region.to_string();
            }
        }
        Entity::Challenge(c) => {
            c.id = id;
            c.normalize();
        }
        Entity::Solution(s) => {
            s.id = id;
            s.normalize();
        }
        Entity::Match(m) => m.id = id,
        Entity::Deployment(d) => d.id = id,
    }
    store.put(entity.clone())?;
    Ok(entity)
}

/// Replaces an existing record; the id in the path wins over the body.
pub fn update(store: &mut Store, id: &str, entity: impl Into<Entity>) -> Result<Entity, ServiceError> {
    let mut entity = entity.into();
    let kind = entity.kind();
    if !store.contains(kind, id) {
        return Err(not_found(kind, id));
    }
    match &mut entity {
        Entity::Organization(o) => {
            o.id = id.to_string();
            o.country = o.country.trim().to_ascii_uppercase();
            if let Ok(region) = crate::region::region_of(&o.country) {
                o.region = region.to_string();
            }
        }
        Entity::Challenge(c) => {
            c.id = id.to_string();
            c.normalize();
        }
        Entity::Solution(s) => {
            s.id = id.to_string();
            s.normalize();
        }
        Entity::Match(m) => m.id = id.to_string(),
        Entity::Deployment(d) => d.id = id.to_string(),
    }
    store.put(entity.clone())?;
    Ok(entity)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageCell {
    pub country: String,
    pub open_challenges: u64,
    pub available_solutions: u64,
    pub active_deployments: u64,
    pub gap: i64,
}

/// One cell per country named by any organization, challenge or coverage list.
pub fn coverage(store: &Store) -> Vec<CoverageCell> {
    let mut countries: BTreeSet<&str> = BTreeSet::new();
    countries.extend(store.organizations().map(|o| o.country.as_str()));
    countries.extend(store.challenges().map(|c| c.country.as_str()));
    for s in store.solutions() {
        if let crate::model::Coverage::Countries(set) = &s.coverage {
            countries.extend(set.iter().map(String::as_str));
        }
    }
    let active_by_country: BTreeMap<&str, u64> = store
        .deployments()
        .filter(|d| d.status == DeploymentStatus::Active)
        .filter_map(|d| store.match_result(&d.match_id))
        .filter_map(|m| store.challenge(&m.challenge_id))
        .fold(BTreeMap::new(), |mut acc, c| {
            *acc.entry(c.country.as_str()).or_default() += 1;
            acc
        });
    countries
        .into_iter()
        .map(|country| {
            let open = store
                .challenges()
                .filter(|c| c.country == country && c.status == ChallengeStatus::Open)
                .count() as u64;
            let available = store.solutions().filter(|s| s.coverage.reaches(country)).count() as u64;
            let active = active_by_country.get(country).copied().unwrap_or(0);
            CoverageCell {
                country: country.to_string(),
                open_challenges: open,
                available_solutions: available,
                active_deployments: active,
                gap: open as i64 - active as i64,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChallengeView {
    pub challenge: Challenge,
    pub top_matches: Vec<MatchResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionView {
    pub solution: Solution,
    pub opportunities: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DashboardPayload {
    Deployer {
        challenges: Vec<ChallengeView>,
    },
    Provider {
        threshold: f64,
        solutions: Vec<SolutionView>,
    },
    Financier {
        deployments: Vec<Deployment>,
        committed_by_status: BTreeMap<DeploymentStatus, Usd>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleDashboard {
    pub role: OrgRole,
    pub org_id: String,
    pub payload: DashboardPayload,
}

/// Per-role aggregates computed from current state.
///
/// `threshold` only affects provider dashboards.
pub fn dashboard(store: &Store, role: OrgRole, org_id: &str, threshold: f64) -> Result<RoleDashboard, ServiceError> {
    let org: &Organization = store.organization(org_id).ok_or_else(|| not_found(EntityKind::Organization, org_id))?;
    if org.role != role {
        return Err(ServiceError::BadRequest(format!("{org_id} is a {}, not a {role}", org.role)));
    }
    let payload = match role {
        OrgRole::Deployer => DashboardPayload::Deployer {
            challenges: store
                .challenges()
                .filter(|c| c.deployer_id == org_id)
                .map(|c| {
                    let mut seen = BTreeSet::new();
                    let top = stored_matches(store, &c.id)
                        .unwrap_or_default()
                        .into_iter()
                        .filter(|m| seen.insert(m.solution_id.clone()))
                        .take(DEPLOYER_TOP_MATCHES)
                        .collect();
                    ChallengeView { challenge: c.clone(), top_matches: top }
                })
                .collect(),
        },
        OrgRole::Provider => DashboardPayload::Provider {
            threshold,
            solutions: store
                .solutions()
                .filter(|s| s.provider_id == org_id)
                .map(|s| {
                    let challenges: BTreeSet<&str> = store
                        .matches()
                        .filter(|m| m.solution_id == s.id && m.total >= threshold)
                        .map(|m| m.challenge_id.as_str())
                        .collect();
                    SolutionView { solution: s.clone(), opportunities: challenges.len() as u64 }
                })
                .collect(),
        },
        OrgRole::Financier => {
            let deployments: Vec<Deployment> = store
                .deployments()
                .filter(|d| d.financier_id.as_deref() == Some(org_id))
                .cloned()
                .collect();
            let mut committed: BTreeMap<DeploymentStatus, Usd> =
                DeploymentStatus::ALL.into_iter().map(|s| (s, Usd::ZERO)).collect();
            for d in &deployments {
                let slot = committed.entry(d.status).or_default();
                *slot = slot.checked_add(d.committed_usd).unwrap_or(*slot);
            }
            DashboardPayload::Financier { deployments, committed_by_status: committed }
        }
    };
    Ok(RoleDashboard { role, org_id: org_id.to_string(), payload })
}

/// Opens a deal on a persisted match. The challenge moves to Matched.
pub fn create_deployment(
    store: &mut Store,
    match_id: &str,
    financier_id: Option<&str>,
    committed_usd: Usd,
    now: DateTime<Utc>,
) -> Result<Deployment, ServiceError> {
    let m = store.match_result(match_id).ok_or_else(|| not_found(EntityKind::Match, match_id))?;
    let challenge_id = m.challenge_id.clone();
    let id = store.allocate_id(EntityKind::Deployment);
    let dep = Deployment {
        id,
        match_id: match_id.to_string(),
        financier_id: financier_id.map(str::to_string),
        committed_usd,
        milestones: Vec::new(),
        status: DeploymentStatus::Proposed,
        created_at: now,
    };
    store.put(dep.clone())?;
    if let Some(c) = store.challenge(&challenge_id) {
        if matches!(c.status, ChallengeStatus::Draft | ChallengeStatus::Open) {
            let mut c = c.clone();
            c.status = ChallengeStatus::Matched;
            store.put(c)?;
        }
    }
    Ok(dep)
}

fn deployment_mut(store: &Store, id: &str) -> Result<Deployment, ServiceError> {
    store.deployment(id).cloned().ok_or_else(|| not_found(EntityKind::Deployment, id))
}

pub fn add_milestone(store: &mut Store, deployment_id: &str, name: &str, due: NaiveDate) -> Result<Deployment, ServiceError> {
    let mut dep = deployment_mut(store, deployment_id)?;
    if dep.status.is_terminal() {
        return Err(StoreError::State(format!("deployment {deployment_id} is {:?}", dep.status)).into());
    }
    dep.milestones.push(Milestone { name: name.trim().to_string(), due, status: MilestoneStatus::Pending });
    store.put(dep.clone())?;
    Ok(dep)
}

pub fn set_milestone_status(
    store: &mut Store,
    deployment_id: &str,
    name: &str,
    status: MilestoneStatus,
) -> Result<Deployment, ServiceError> {
    let mut dep = deployment_mut(store, deployment_id)?;
    let milestone = dep
        .milestones
        .iter_mut()
        .find(|m| m.name == name)
        .ok_or_else(|| StoreError::State(format!("deployment {deployment_id} has no milestone {name:?}")))?;
    milestone.status = status;
    store.put(dep.clone())?;
    Ok(dep)
}

pub fn transition(store: &mut Store, deployment_id: &str, next: DeploymentStatus) -> Result<Deployment, ServiceError> {
    let mut dep = deployment_mut(store, deployment_id)?;
    if !dep.status.can_transition_to(next) {
        return Err(StoreError::IllegalTransition { from: dep.status, to: next }.into());
    }
    dep.status = next;
    store.put(dep.clone())?;
    Ok(dep)
}

/// Compiles intake answers; the caller decides whether to store the draft.
pub fn compile_intake(
    templates: &crate::intake::TemplateSet,
    store: &Store,
    deployer_id: &str,
    domain: Domain,
    answers: &[(String, String)],
) -> Result<Challenge, ServiceError> {
    let org = store.organization(deployer_id).ok_or_else(|| not_found(EntityKind::Organization, deployer_id))?;
    if org.role != OrgRole::Deployer {
        return Err(ServiceError::BadRequest(format!("{deployer_id} is a {}, not a Deployer", org.role)));
    }
    Ok(templates.compile(deployer_id, domain, answers)?)
}
