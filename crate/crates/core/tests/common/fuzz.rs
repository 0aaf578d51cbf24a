//! Random put/delete sequences over a small id space, so that references,
//! role checks and delete protection are exercised constantly.

use chrono::{DateTime, TimeZone, Utc};
use dhub_core::engine::{default_profile, score_pair_at, score_raw};
use dhub_core::region::{region_of, COUNTRY_POOL};
use dhub_core::*;
use proptest::prelude::*;

/// Ids are drawn from `1..=SLOTS` per kind.
pub const SLOTS: u64 = 6;

#[derive(Debug, Clone)]
pub enum Op {
    Org { slot: u64, role: OrgRole, country: usize, verified: bool },
    Challenge { slot: u64, deployer: u64, domain: Domain, budget: i64 },
    Solution { slot: u64, provider: u64, domain: Domain, cost: i64 },
    Match { slot: u64, challenge: u64, solution: u64 },
    Deployment { slot: u64, match_slot: u64, financier: Option<u64>, status: DeploymentStatus },
    Delete { kind: EntityKind, slot: u64 },
}

fn slot() -> impl Strategy<Value = u64> {
    1..=SLOTS
}

pub fn arb_op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (slot(), prop::sample::select(OrgRole::ALL.to_vec()), 0..COUNTRY_POOL.len(), any::<bool>())
            .prop_map(|(slot, role, country, verified)| Op::Org { slot, role, country, verified }),
        (slot(), slot(), prop::sample::select(Domain::ALL.to_vec()), 1i64..1_000_000)
            .prop_map(|(slot, deployer, domain, budget)| Op::Challenge { slot, deployer, domain, budget }),
        (slot(), slot(), prop::sample::select(Domain::ALL.to_vec()), 1i64..1_000_000)
            .prop_map(|(slot, provider, domain, cost)| Op::Solution { slot, provider, domain, cost }),
        (slot(), slot(), slot()).prop_map(|(slot, challenge, solution)| Op::Match { slot, challenge, solution }),
        (slot(), slot(), prop::option::of(slot()), prop::sample::select(DeploymentStatus::ALL.to_vec()))
            .prop_map(|(slot, match_slot, financier, status)| Op::Deployment { slot, match_slot, financier, status }),
        (prop::sample::select(EntityKind::ALL.to_vec()), slot()).prop_map(|(kind, slot)| Op::Delete { kind, slot }),
    ]
}

fn at() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
}

fn id(kind: EntityKind, slot: u64) -> String {
    kind.format_id(slot)
}

/// Applies one operation; `Ok` when the store accepted it.
pub fn apply(store: &mut Store, op: &Op) -> Result<(), StoreError> {
    match *op {
        Op::Org { slot, role, country, verified } => {
            let code = COUNTRY_POOL[country];
            store.put(Organization {
                id: id(EntityKind::Organization, slot),
                name: format!("Org {slot}"),
                role,
                country: code.to_string(),
                region: region_of(code).unwrap().to_string(),
                domains: [Domain::Water].into(),
                verified,
                scale_tier: ScaleTier::Local,
                created_at: at(),
            })?;
        }
        Op::Challenge { slot, deployer, domain, budget } => {
            store.put(Challenge {
                id: id(EntityKind::Challenge, slot),
                deployer_id: id(EntityKind::Organization, deployer),
                title: format!("Challenge {slot}"),
                domain,
                country: "KE".into(),
                required_tags: ["water".to_string()].into(),
                affected_population: 1_000,
                budget_usd: Usd::from_dollars(budget),
                window_months: 12,
                status: ChallengeStatus::Open,
                intake_answers: Vec::new(),
            })?;
        }
        Op::Solution { slot, provider, domain, cost } => {
            store.put(Solution {
                id: id(EntityKind::Solution, slot),
                provider_id: id(EntityKind::Organization, provider),
                title: format!("Solution {slot}"),
                domain,
                tags: ["water".to_string()].into(),
                coverage: Coverage::countries(["KE"]),
                cost_usd: Usd::from_dollars(cost),
                lead_time_months: 3,
                capacity_population: 500,
                deployments_completed: 2,
                deployments_successful: 1,
            })?;
        }
        Op::Match { slot, challenge, solution } => {
            let (cid, sid) = (id(EntityKind::Challenge, challenge), id(EntityKind::Solution, solution));
            let profile = default_profile();
            let scored = match (store.challenge(&cid), store.solution(&sid)) {
                (Some(c), Some(s)) => {
                    let p = store.organization(&s.provider_id).expect("stored solutions have providers");
                    score_pair_at(c, s, p, &profile, at()).expect("stored pairs score")
                }
                _ => {
                    let (breakdown, total) = score_raw([0.5; 6], &profile).unwrap();
                    MatchResult {
                        id: String::new(),
                        challenge_id: cid,
                        solution_id: sid,
                        profile_id: profile.id.clone(),
                        breakdown,
                        total,
                        computed_at: at(),
                    }
                }
            };
            store.put(MatchResult { id: id(EntityKind::Match, slot), ..scored })?;
        }
        Op::Deployment { slot, match_slot, financier, status } => {
            let dep_id = id(EntityKind::Deployment, slot);
            let milestones = store.deployment(&dep_id).map(|d| d.milestones.clone()).unwrap_or_default();
            store.put(Deployment {
                id: dep_id,
                match_id: id(EntityKind::Match, match_slot),
                financier_id: financier.map(|f| id(EntityKind::Organization, f)),
                committed_usd: Usd::from_dollars(1_000),
                milestones,
                status,
                created_at: at(),
            })?;
        }
        Op::Delete { kind, slot } => store.delete(kind, &id(kind, slot))?,
    }
    Ok(())
}

/// Problems found after a run: integrity violations and broken trace chains.
pub fn audit(store: &Store) -> Vec<String> {
    let mut problems: Vec<String> = store.integrity_scan().iter().map(ToString::to_string).collect();
    for d in store.deployments() {
        match store.trace(&d.id) {
            Ok(chain) => {
                let m = &chain.match_result;
                if chain.challenge.id != m.challenge_id || chain.solution.id != m.solution_id {
                    problems.push(format!("{}: trace mismatched", d.id));
                }
                let challenges = store.challenges().filter(|c| c.id == m.challenge_id).count();
                let solutions = store.solutions().filter(|s| s.id == m.solution_id).count();
                if challenges != 1 || solutions != 1 {
                    problems.push(format!("{}: traces to {challenges} challenges, {solutions} solutions", d.id));
                }
            }
            Err(e) => problems.push(format!("{}: {e}", d.id)),
        }
    }
    problems
}
