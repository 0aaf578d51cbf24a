//! Dataset files: one JSON object with `meta`, `organizations`, `challenges`
//! and `solutions`, each array sorted by id, newline-terminated.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::FormatError;
use crate::model::{Challenge, Deployment, Entity, MatchResult, OrgRole, Organization, Solution};
use crate::synth::GenConfig;
use crate::validate::{validate_entity, Violation};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub generator_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<GenConfig>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub distributions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub meta: Meta,
    pub organizations: Vec<Organization>,
    pub challenges: Vec<Challenge>,
    pub solutions: Vec<Solution>,
}

impl Dataset {
    pub fn sort(&mut self) {
        self.organizations.sort_by(|a, b| a.id.cmp(&b.id));
        self.challenges.sort_by(|a, b| a.id.cmp(&b.id));
        self.solutions.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn to_json(&self) -> String {
        let mut sorted = self.clone();
        sorted.sort();
        to_file_text(&sorted)
    }

    pub fn export(&self, path: impl AsRef<Path>) -> Result<(), FormatError> {
        write_text(path.as_ref(), &self.to_json())
    }

    /// Parses without integrity checks.
    pub fn parse(text: &str) -> Result<Dataset, FormatError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Parses and rejects unresolved references or invalid records.
    pub fn from_json(text: &str) -> Result<Dataset, FormatError> {
        let ds = Dataset::parse(text)?;
        ds.check()?;
        Ok(ds)
    }

    pub fn import(path: impl AsRef<Path>) -> Result<Dataset, FormatError> {
        Dataset::from_json(&read_text(path.as_ref())?)
    }

    pub fn check(&self) -> Result<(), FormatError> {
        check_records(&self.records())
    }

    pub fn records(&self) -> Records<'_> {
        Records {
            organizations: &self.organizations,
            challenges: &self.challenges,
            solutions: &self.solutions,
            matches: &[],
            deployments: &[],
        }
    }

    pub fn get_org(&self, id: &str) -> Option<&Organization> {
        self.organizations.iter().find(|o| o.id == id)
    }

    pub fn role_counts(&self) -> [usize; 3] {
        OrgRole::ALL.map(|r| self.organizations.iter().filter(|o| o.role == r).count())
    }
}

/// Borrowed view over every record kind, used for whole-file checks.
#[derive(Debug, Clone, Copy)]
pub struct Records<'a> {
    pub organizations: &'a [Organization],
    pub challenges: &'a [Challenge],
    pub solutions: &'a [Solution],
    pub matches: &'a [MatchResult],
    pub deployments: &'a [Deployment],
}

/// Reference problems (dangling ids, wrong roles) across the record set.
pub fn reference_violations(r: &Records<'_>) -> Vec<Violation> {
    let orgs: HashMap<&str, OrgRole> = r.organizations.iter().map(|o| (o.id.as_str(), o.role)).collect();
    let challenges: HashMap<&str, ()> = r.challenges.iter().map(|c| (c.id.as_str(), ())).collect();
    let solutions: HashMap<&str, ()> = r.solutions.iter().map(|s| (s.id.as_str(), ())).collect();
    let matches: HashMap<&str, ()> = r.matches.iter().map(|m| (m.id.as_str(), ())).collect();

    let mut out = Vec::new();
    let mut flag = |id: &str, rule: String| out.push(Violation { entity_id: id.to_string(), rule });
    let mut org_ref = |id: &str, field: &str, target: &str, role: OrgRole| match orgs.get(target) {
        None => flag(id, format!("unresolved reference {field} {target}")),
        Some(r) if *r != role => flag(id, format!("{field} {target} must be a {role}, found {r}")),
        Some(_) => {}
    };
    for c in r.challenges {
        org_ref(&c.id, "deployer_id", &c.deployer_id, OrgRole::Deployer);
    }
    for s in r.solutions {
        org_ref(&s.id, "provider_id", &s.provider_id, OrgRole::Provider);
    }
    for d in r.deployments {
        if let Some(f) = &d.financier_id {
            org_ref(&d.id, "financier_id", f, OrgRole::Financier);
        }
    }
    for m in r.matches {
        if !challenges.contains_key(m.challenge_id.as_str()) {
            out.push(Violation { entity_id: m.id.clone(), rule: format!("unresolved reference challenge_id {}", m.challenge_id) });
        }
        if !solutions.contains_key(m.solution_id.as_str()) {
            out.push(Violation { entity_id: m.id.clone(), rule: format!("unresolved reference solution_id {}", m.solution_id) });
        }
    }
    for d in r.deployments {
        if !matches.contains_key(d.match_id.as_str()) {
            out.push(Violation { entity_id: d.id.clone(), rule: format!("unresolved reference match_id {}", d.match_id) });
        }
    }
    out
}

/// Every intrinsic and referential violation, plus duplicate ids.
pub fn all_violations(r: &Records<'_>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let ids = r
        .organizations
        .iter()
        .map(|e| e.id.as_str())
        .chain(r.challenges.iter().map(|e| e.id.as_str()))
        .chain(r.solutions.iter().map(|e| e.id.as_str()))
        .chain(r.matches.iter().map(|e| e.id.as_str()))
        .chain(r.deployments.iter().map(|e| e.id.as_str()));
    for id in ids {
        *seen.entry(id).or_default() += 1;
    }
    let mut dups: Vec<_> = seen.into_iter().filter(|(_, n)| *n > 1).collect();
    dups.sort();
    for (id, n) in dups {
        out.push(Violation { entity_id: id.to_string(), rule: format!("id unique (appears {n} times)") });
    }
    let entities = r
        .organizations
        .iter()
        .cloned()
        .map(Entity::from)
        .chain(r.challenges.iter().cloned().map(Entity::from))
        .chain(r.solutions.iter().cloned().map(Entity::from))
        .chain(r.matches.iter().cloned().map(Entity::from))
        .chain(r.deployments.iter().cloned().map(Entity::from));
    for e in entities {
        out.extend(validate_entity(&e));
    }
    out.extend(reference_violations(r));
    out
}

pub(crate) fn check_records(r: &Records<'_>) -> Result<(), FormatError> {
    let refs = reference_violations(r);
    if refs.iter().any(|v| v.rule.starts_with("unresolved reference")) {
        return Err(FormatError::UnresolvedReference(refs.iter().map(ToString::to_string).collect()));
    }
    let all = all_violations(r);
    if all.is_empty() {
        Ok(())
    } else {
        Err(FormatError::Invalid(all))
    }
}

pub(crate) fn to_file_text<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("dataset types always serialize");
    text.push('\n');
    text
}

pub(crate) fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}
