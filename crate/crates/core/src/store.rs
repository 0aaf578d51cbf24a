//! In-memory entity store backed by a single snapshot file.
//!
//! Every write is checked so that no stored record ever points at a missing
//! or wrongly-typed record. Deletes are refused while anything still refers
//! to the target.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{all_violations, read_text, to_file_text, write_text, Dataset, Meta, Records};
use crate::error::{FormatError, StoreError};
use crate::model::{
    Challenge, Deployment, Entity, EntityKind, MatchResult, OrgRole, Organization, Solution,
};
use crate::validate::{validate_entity, Violation};

pub const SNAPSHOT_VERSION: &str = "dhub-store/1";

/// Snapshot file: the dataset layout plus matches and deployments.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub meta: Meta,
    pub organizations: Vec<Organization>,
    pub challenges: Vec<Challenge>,
    pub solutions: Vec<Solution>,
    #[serde(default)]
    pub matches: Vec<MatchResult>,
    #[serde(default)]
    pub deployments: Vec<Deployment>,
}

impl Snapshot {
    pub fn records(&self) -> Records<'_> {
        Records {
            organizations: &self.organizations,
            challenges: &self.challenges,
            solutions: &self.solutions,
            matches: &self.matches,
            deployments: &self.deployments,
        }
    }

    pub fn parse(text: &str) -> Result<Snapshot, FormatError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// The resolved provenance of one deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceChain {
    pub deployment: Deployment,
    #[serde(rename = "match")]
    pub match_result: MatchResult,
    pub challenge: Challenge,
    pub solution: Solution,
    pub deployer: Organization,
    pub provider: Organization,
    pub financier: Option<Organization>,
}

impl TraceChain {
    /// Number of resolved records: six, or seven with a financier.
    pub fn len(&self) -> usize {
        6 + usize::from(self.financier.is_some())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entities(&self) -> Vec<Entity> {
        let mut out = vec![
            Entity::Deployment(self.deployment.clone()),
            Entity::Match(self.match_result.clone()),
            Entity::Challenge(self.challenge.clone()),
            Entity::Solution(self.solution.clone()),
            Entity::Organization(self.deployer.clone()),
            Entity::Organization(self.provider.clone()),
        ];
        if let Some(f) = &self.financier {
            out.push(Entity::Organization(f.clone()));
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Store {
    path: Option<PathBuf>,
    organizations: BTreeMap<String, Organization>,
    challenges: BTreeMap<String, Challenge>,
    solutions: BTreeMap<String, Solution>,
    matches: BTreeMap<String, MatchResult>,
    deployments: BTreeMap<String, Deployment>,
    last_seq: BTreeMap<EntityKind, u64>,
    dirty: bool,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    /// Opens the snapshot at `path`, or starts empty when the file is absent.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        let mut store = if path.exists() { Store::restore(&path)? } else { Store::new() };
        store.path = Some(path);
        Ok(store)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn set_path(&mut self, path: impl Into<PathBuf>) {
        self.path = Some(path.into());
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn len(&self) -> usize {
        self.organizations.len()
            + self.challenges.len()
            + self.solutions.len()
            + self.matches.len()
            + self.deployments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn organization(&self, id: &str) -> Option<&Organization> {
        self.organizations.get(id)
    }

    pub fn challenge(&self, id: &str) -> Option<&Challenge> {
        self.challenges.get(id)
    }

    pub fn solution(&self, id: &str) -> Option<&Solution> {
        self.solutions.get(id)
    }

    pub fn match_result(&self, id: &str) -> Option<&MatchResult> {
        self.matches.get(id)
    }

    pub fn deployment(&self, id: &str) -> Option<&Deployment> {
        self.deployments.get(id)
    }

    pub fn organizations(&self) -> impl Iterator<Item = &Organization> {
        self.organizations.values()
    }

    pub fn challenges(&self) -> impl Iterator<Item = &Challenge> {
        self.challenges.values()
    }

    pub fn solutions(&self) -> impl Iterator<Item = &Solution> {
        self.solutions.values()
    }

    pub fn matches(&self) -> impl Iterator<Item = &MatchResult> {
        self.matches.values()
    }

    pub fn deployments(&self) -> impl Iterator<Item = &Deployment> {
        self.deployments.values()
    }

    pub fn get(&self, kind: EntityKind, id: &str) -> Option<Entity> {
        match kind {
            EntityKind::Organization => self.organizations.get(id).cloned().map(Entity::from),
            EntityKind::Challenge => self.challenges.get(id).cloned().map(Entity::from),
            EntityKind::Solution => self.solutions.get(id).cloned().map(Entity::from),
            EntityKind::Match => self.matches.get(id).cloned().map(Entity::from),
            EntityKind::Deployment => self.deployments.get(id).cloned().map(Entity::from),
        }
    }

    pub fn contains(&self, kind: EntityKind, id: &str) -> bool {
        match kind {
            EntityKind::Organization => self.organizations.contains_key(id),
            EntityKind::Challenge => self.challenges.contains_key(id),
            EntityKind::Solution => self.solutions.contains_key(id),
            EntityKind::Match => self.matches.contains_key(id),
            EntityKind::Deployment => self.deployments.contains_key(id),
        }
    }

    pub fn kind_of(&self, id: &str) -> Option<EntityKind> {
        EntityKind::ALL.into_iter().find(|k| self.contains(*k, id))
    }

    /// Hands out the next unused identifier of the kind.
    pub fn allocate_id(&mut self, kind: EntityKind) -> String {
        let next = self.last_seq.get(&kind).copied().unwrap_or(0) + 1;
        self.last_seq.insert(kind, next);
        kind.format_id(next)
    }

    fn note_id(&mut self, kind: EntityKind, id: &str) {
        if let Some(n) = kind.parse_seq(id) {
            let last = self.last_seq.entry(kind).or_insert(0);
            *last = (*last).max(n);
        }
    }

    /// Solutions paired with their providers, in id order.
    pub fn candidates(&self) -> Vec<(&Solution, &Organization)> {
        self.solutions
            .values()
            .filter_map(|s| self.organizations.get(&s.provider_id).map(|p| (s, p)))
            .collect()
    }

    fn check_org_ref(&self, from: &str, target: &str, role: OrgRole) -> Result<(), StoreError> {
        match self.organizations.get(target) {
            None => Err(StoreError::Dangling {
                from: from.to_string(),
                kind: EntityKind::Organization,
                missing: target.to_string(),
            }),
            Some(o) if o.role != role => Err(StoreError::RoleMismatch(format!(
                "{from} needs {target} to be a {role}, but it is a {}",
                o.role
            ))),
            Some(_) => Ok(()),
        }
    }

    fn check_references(&self, entity: &Entity) -> Result<(), StoreError> {
        let id = entity.id();
        match entity {
            Entity::Challenge(c) => self.check_org_ref(id, &c.deployer_id, OrgRole::Deployer)?,
            Entity::Solution(s) => self.check_org_ref(id, &s.provider_id, OrgRole::Provider)?,
            Entity::Deployment(d) => {
                if let Some(f) = &d.financier_id {
                    self.check_org_ref(id, f, OrgRole::Financier)?;
                }
            }
            _ => {}
        }
        for (kind, target) in entity.references() {
            if !self.contains(kind, target) {
                return Err(StoreError::Dangling {
                    from: id.to_string(),
                    kind,
                    missing: target.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Inserts or updates a record. Updates must keep the same kind.
    pub fn put(&mut self, entity: impl Into<Entity>) -> Result<String, StoreError> {
        let entity = entity.into();
        let violations = validate_entity(&entity);
        if !violations.is_empty() {
            return Err(StoreError::Validation(violations));
        }
        let id = entity.id().to_string();
        let kind = entity.kind();
        if let Some(existing) = self.kind_of(&id) {
            if existing != kind {
                return Err(StoreError::KindConflict { id, existing });
            }
        }
        self.check_references(&entity)?;
        match entity {
            Entity::Organization(org) => {
                if let Some(old) = self.organizations.get(&id) {
                    if old.role != org.role {
                        let referrers = self.referrers(EntityKind::Organization, &id);
                        if !referrers.is_empty() {
                            return Err(StoreError::RoleMismatch(format!(
                                "cannot change role of {id} from {} to {} while referenced by {}",
                                old.role,
                                org.role,
                                referrers.join(", ")
                            )));
                        }
                    }
                }
                self.organizations.insert(id.clone(), org);
            }
            Entity::Challenge(c) => {
                self.challenges.insert(id.clone(), c);
            }
            Entity::Solution(s) => {
                self.solutions.insert(id.clone(), s);
            }
            Entity::Match(m) => {
                self.matches.insert(id.clone(), m);
            }
            Entity::Deployment(d) => {
                if let Some(old) = self.deployments.get(&id) {
                    if old.status != d.status && !old.status.can_transition_to(d.status) {
                        return Err(StoreError::IllegalTransition { from: old.status, to: d.status });
                    }
                }
                self.deployments.insert(id.clone(), d);
            }
        }
        self.note_id(kind, &id);
        self.dirty = true;
        Ok(id)
    }

    /// Ids of every record that points at `(kind, id)`.
    pub fn referrers(&self, kind: EntityKind, id: &str) -> Vec<String> {
        let all = self
            .challenges
            .values()
            .map(|e| Entity::Challenge(e.clone()))
            .chain(self.solutions.values().map(|e| Entity::Solution(e.clone())))
            .chain(self.matches.values().map(|e| Entity::Match(e.clone())))
            .chain(self.deployments.values().map(|e| Entity::Deployment(e.clone())));
        all.filter(|e| e.references().iter().any(|(k, t)| *k == kind && *t == id))
            .map(|e| e.id().to_string())
            .collect()
    }

    pub fn delete(&mut self, kind: EntityKind, id: &str) -> Result<(), StoreError> {
        if !self.contains(kind, id) {
            return Err(StoreError::NotFound { kind, id: id.to_string() });
        }
        let referrers = self.referrers(kind, id);
        if !referrers.is_empty() {
            return Err(StoreError::Referenced { kind, id: id.to_string(), referrers });
        }
        match kind {
            EntityKind::Organization => self.organizations.remove(id).map(drop),
            EntityKind::Challenge => self.challenges.remove(id).map(drop),
            EntityKind::Solution => self.solutions.remove(id).map(drop),
            EntityKind::Match => self.matches.remove(id).map(drop),
            EntityKind::Deployment => self.deployments.remove(id).map(drop),
        };
        self.dirty = true;
        Ok(())
    }

    pub fn trace(&self, deployment_id: &str) -> Result<TraceChain, StoreError> {
        let missing = |kind: EntityKind, id: &str| StoreError::NotFound { kind, id: id.to_string() };
        let deployment = self
            .deployments
            .get(deployment_id)
            .ok_or_else(|| missing(EntityKind::Deployment, deployment_id))?;
        let m = self.matches.get(&deployment.match_id).ok_or_else(|| missing(EntityKind::Match, &deployment.match_id))?;
        let challenge = self.challenges.get(&m.challenge_id).ok_or_else(|| missing(EntityKind::Challenge, &m.challenge_id))?;
        let solution = self.solutions.get(&m.solution_id).ok_or_else(|| missing(EntityKind::Solution, &m.solution_id))?;
        let org = |id: &str| self.organizations.get(id).cloned().ok_or_else(|| missing(EntityKind::Organization, id));
        Ok(TraceChain {
            deployment: deployment.clone(),
            match_result: m.clone(),
            challenge: challenge.clone(),
            solution: solution.clone(),
            deployer: org(&challenge.deployer_id)?,
            provider: org(&solution.provider_id)?,
            financier: deployment.financier_id.as_deref().map(org).transpose()?,
        })
    }

    /// Full consistency scan; empty when every invariant and reference holds.
    pub fn integrity_scan(&self) -> Vec<Violation> {
        let snap = self.to_snapshot();
        all_violations(&snap.records())
    }

    pub fn to_snapshot(&self) -> Snapshot {
        Snapshot {
            meta: Meta { generator_version: SNAPSHOT_VERSION.to_string(), ..Meta::default() },
            organizations: self.organizations.values().cloned().collect(),
            challenges: self.challenges.values().cloned().collect(),
            solutions: self.solutions.values().cloned().collect(),
            matches: self.matches.values().cloned().collect(),
            deployments: self.deployments.values().cloned().collect(),
        }
    }

    pub fn to_json(&self) -> String {
        to_file_text(&self.to_snapshot())
    }

    pub fn snapshot(&mut self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        write_text(path.as_ref(), &self.to_json())?;
        self.dirty = false;
        Ok(())
    }

    /// Writes to the backing path, when one is set and there are unsaved writes.
    pub fn flush(&mut self) -> Result<bool, StoreError> {
        match self.path.clone() {
            Some(p) if self.dirty => {
                self.snapshot(p)?;
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    pub fn restore(path: impl AsRef<Path>) -> Result<Store, StoreError> {
        let text = read_text(path.as_ref())?;
        let mut store = Store::from_snapshot(Snapshot::parse(&text)?)?;
        store.path = Some(path.as_ref().to_path_buf());
        Ok(store)
    }

    /// Loads records in dependency order so each write sees its references.
    pub fn from_snapshot(snap: Snapshot) -> Result<Store, StoreError> {
        let mut store = Store::new();
        let Snapshot { organizations, challenges, solutions, matches, deployments, .. } = snap;
        let entities = organizations
            .into_iter()
            .map(Entity::from)
            .chain(challenges.into_iter().map(Entity::from))
            .chain(solutions.into_iter().map(Entity::from))
            .chain(matches.into_iter().map(Entity::from))
            .chain(deployments.into_iter().map(Entity::from));
        for e in entities {
            let (kind, id) = (e.kind(), e.id().to_string());
            if store.contains(kind, &id) {
                return Err(StoreError::Validation(vec![Violation {
                    entity_id: id,
                    rule: "id unique".into(),
                }]));
            }
            store.put(e)?;
        }
        store.dirty = false;
        Ok(store)
    }

    pub fn from_dataset(ds: Dataset) -> Result<Store, StoreError> {
        Store::from_snapshot(Snapshot {
            meta: ds.meta,
            organizations: ds.organizations,
            challenges: ds.challenges,
            solutions: ds.solutions,
            ..Snapshot::default()
        })
    }
}
