//! Core entities of the coordination platform and their canonical JSON form.
//!
//! Every entity is a plain value object. Field names serialize exactly as
//! declared (snake_case), timestamps as RFC 3339 UTC and money as a string
//! with two decimals.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OrgRole {
    Deployer,
    Provider,
    Financier,
}

impl OrgRole {
    pub const ALL: [OrgRole; 3] = [OrgRole::Deployer, OrgRole::Provider, OrgRole::Financier];

    pub fn as_str(self) -> &'static str {
        match self {
            OrgRole::Deployer => "Deployer",
            OrgRole::Provider => "Provider",
            OrgRole::Financier => "Financier",
        }
    }
}

impl fmt::Display for OrgRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrgRole {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OrgRole::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ModelError::UnknownVariant { kind: "role", value: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Domain {
    Agriculture,
    Water,
    Energy,
    Health,
    Education,
}

impl Domain {
    pub const ALL: [Domain; 5] = [
        Domain::Agriculture,
        Domain::Water,
        Domain::Energy,
        Domain::Health,
        Domain::Education,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Agriculture => "Agriculture",
            Domain::Water => "Water",
            Domain::Energy => "Energy",
            Domain::Health => "Health",
            Domain::Education => "Education",
        }
    }

    /// Lowercase form used as an implicit capability tag.
    pub fn tag(self) -> String {
        self.as_str().to_ascii_lowercase()
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Domain::ALL
            .into_iter()
            .find(|d| d.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ModelError::UnknownVariant { kind: "domain", value: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScaleTier {
    Local,
    National,
    Regional,
    Global,
}

impl ScaleTier {
    pub const ALL: [ScaleTier; 4] =
        [ScaleTier::Local, ScaleTier::National, ScaleTier::Regional, ScaleTier::Global];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChallengeStatus {
    Draft,
    Open,
    Matched,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MilestoneStatus {
    Pending,
    Done,
    Missed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DeploymentStatus {
    Proposed,
    Active,
    Completed,
    Cancelled,
}

impl DeploymentStatus {
    pub const ALL: [DeploymentStatus; 4] = [
        DeploymentStatus::Proposed,
        DeploymentStatus::Active,
        DeploymentStatus::Completed,
        DeploymentStatus::Cancelled,
    ];

    /// Legal edges: Proposed→Active→{Completed, Cancelled} and Proposed→Cancelled.
    pub fn can_transition_to(self, next: DeploymentStatus) -> bool {
        use DeploymentStatus::*;
        matches!(
            (self, next),
            (Proposed, Active) | (Proposed, Cancelled) | (Active, Completed) | (Active, Cancelled)
        )
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, DeploymentStatus::Completed | DeploymentStatus::Cancelled)
    }
}

/// US dollars held as integer cents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Usd(i64);

impl Usd {
    pub const ZERO: Usd = Usd(0);

    pub fn from_cents(cents: i64) -> Self {
        Usd(cents)
    }

    pub fn from_dollars(dollars: i64) -> Self {
        Usd(dollars * 100)
    }

    /// Rounds half away from zero to the nearest cent.
    pub fn from_f64(dollars: f64) -> Self {
        Usd((dollars * 100.0).round() as i64)
    }

    pub fn cents(self) -> i64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn checked_add(self, other: Usd) -> Option<Usd> {
        self.0.checked_add(other.0).map(Usd)
    }
}

impl fmt::Display for Usd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", abs / 100, abs % 100)
    }
}

impl FromStr for Usd {
    type Err = ModelError;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidMoney(raw.to_string());
        let s = raw.trim().replace(',', "");
        let (neg, s) = match s.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, s),
        };
        let (whole, frac) = match s.split_once('.') {
            Some((w, f)) => (w, f),
            None => (s.as_str(), ""),
        };
        if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if frac.len() > 2 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: i64 = whole.parse().map_err(|_| bad())?;
        let frac_cents: i64 = match frac.len() {
            0 => 0,
            1 => frac.parse::<i64>().map_err(|_| bad())? * 10,
            _ => frac.parse().map_err(|_| bad())?,
        };
        let cents = whole.checked_mul(100).and_then(|c| c.checked_add(frac_cents)).ok_or_else(bad)?;
        Ok(Usd(if neg { -cents } else { cents }))
    }
}

impl Serialize for Usd {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Usd {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Where a solution can be deployed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coverage {
    Global,
    Countries(BTreeSet<String>),
}

impl Coverage {
    pub fn countries<I, S>(codes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Coverage::Countries(codes.into_iter().map(Into::into).collect())
    }

    pub fn is_global(&self) -> bool {
        matches!(self, Coverage::Global)
    }

    /// True when the country is listed explicitly. GLOBAL lists nothing.
    pub fn lists(&self, country: &str) -> bool {
        match self {
            Coverage::Global => false,
            Coverage::Countries(set) => set.contains(country),
        }
    }

    /// True when the country is listed or the coverage is GLOBAL.
    pub fn reaches(&self, country: &str) -> bool {
        self.is_global() || self.lists(country)
    }
}

impl Serialize for Coverage {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Coverage::Global => serializer.serialize_str("GLOBAL"),
            Coverage::Countries(set) => {
                let mut seq = serializer.serialize_seq(Some(set.len()))?;
                for code in set {
                    seq.serialize_element(code)?;
                }
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Coverage {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CoverageVisitor;

        impl<'de> Visitor<'de> for CoverageVisitor {
            type Value = Coverage;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"GLOBAL\" or an array of country codes")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Coverage, E> {
                if v == "GLOBAL" {
                    Ok(Coverage::Global)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Coverage, A::Error> {
                let mut set = BTreeSet::new();
                while let Some(code) = seq.next_element::<String>()? {
                    set.insert(code);
                }
                Ok(Coverage::Countries(set))
            }
        }

        deserializer.deserialize_any(CoverageVisitor)
    }
}

/// Trims and lowercases a capability tag.
pub fn normalize_tag(tag: &str) -> String {
    tag.trim().to_lowercase()
}

/// Normalizes every tag and drops the ones that end up empty.
pub fn normalize_tags<I, S>(tags: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    tags.into_iter()
        .map(|t| normalize_tag(t.as_ref()))
        .filter(|t| !t.is_empty())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Organization {
    pub id: String,
    pub name: String,
    pub role: OrgRole,
    pub country: String,
    pub region: String,
    pub domains: BTreeSet<Domain>,
    pub verified: bool,
    pub scale_tier: ScaleTier,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Challenge {
    pub id: String,
    pub deployer_id: String,
    pub title: String,
    pub domain: Domain,
    pub country: String,
    pub required_tags: BTreeSet<String>,
    pub affected_population: u64,
    pub budget_usd: Usd,
    pub window_months: u32,
    pub status: ChallengeStatus,
    #[serde(default)]
    pub intake_answers: Vec<(String, String)>,
}

impl Challenge {
    pub fn normalize(&mut self) {
        self.required_tags = normalize_tags(&self.required_tags);
        self.country = self.country.trim().to_ascii_uppercase();
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub id: String,
    pub provider_id: String,
    pub title: String,
    pub domain: Domain,
    pub tags: BTreeSet<String>,
    pub coverage: Coverage,
    pub cost_usd: Usd,
    pub lead_time_months: u32,
    pub capacity_population: u64,
    pub deployments_completed: u32,
    pub deployments_successful: u32,
}

impl Solution {
    pub fn normalize(&mut self) {
        self.tags = normalize_tags(&self.tags);
        if let Coverage::Countries(set) = &mut self.coverage {
            *set = set.iter().map(|c| c.trim().to_ascii_uppercase()).collect();
        }
    }
}

/// The six scoring axes, in their fixed presentation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Geographic,
    Temporal,
    Budget,
    Capability,
    Credibility,
    Population,
}

impl Dimension {
    pub const ALL: [Dimension; 6] = [
        Dimension::Geographic,
        Dimension::Temporal,
        Dimension::Budget,
        Dimension::Capability,
        Dimension::Credibility,
        Dimension::Population,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn key(self) -> &'static str {
        match self {
            Dimension::Geographic => "geographic",
            Dimension::Temporal => "temporal",
            Dimension::Budget => "budget",
            Dimension::Capability => "capability",
            Dimension::Credibility => "credibility",
            Dimension::Population => "population",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Dimension::Geographic => "Geographic fit",
            Dimension::Temporal => "Temporal fit",
            Dimension::Budget => "Budget fit",
            Dimension::Capability => "Capability fit",
            Dimension::Credibility => "Provider credibility",
            Dimension::Population => "Population alignment",
        }
    }
}

/// Six named weights. Field order matches [`Dimension::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub geographic: f64,
    pub temporal: f64,
    pub budget: f64,
    pub capability: f64,
    pub credibility: f64,
    pub population: f64,
}

impl Weights {
    pub fn from_array(w: [f64; 6]) -> Self {
        Weights {
            geographic: w[0],
            temporal: w[1],
            budget: w[2],
            capability: w[3],
            credibility: w[4],
            population: w[5],
        }
    }

    pub fn to_array(self) -> [f64; 6] {
        [
            self.geographic,
            self.temporal,
            self.budget,
            self.capability,
            self.credibility,
            self.population,
        ]
    }

    pub fn get(&self, dim: Dimension) -> f64 {
        self.to_array()[dim.index()]
    }

    pub fn sum(&self) -> f64 {
        self.to_array().iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub id: String,
    pub weights: Weights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionScore {
    pub dimension: Dimension,
    pub raw: f64,
    pub weight: f64,
    pub contribution: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub id: String,
    pub challenge_id: String,
    pub solution_id: String,
    pub profile_id: String,
    pub breakdown: Vec<DimensionScore>,
    pub total: f64,
    pub computed_at: DateTime<Utc>,
}

impl MatchResult {
    pub fn score(&self, dim: Dimension) -> Option<&DimensionScore> {
        self.breakdown.iter().find(|d| d.dimension == dim)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Milestone {
    pub name: String,
    pub due: NaiveDate,
    pub status: MilestoneStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deployment {
    pub id: String,
    pub match_id: String,
    #[serde(default)]
    pub financier_id: Option<String>,
    pub committed_usd: Usd,
    #[serde(default)]
    pub milestones: Vec<Milestone>,
    pub status: DeploymentStatus,
    pub created_at: DateTime<Utc>,
}

/// Kinds of stored entity, each with its own identifier prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Organization,
    Challenge,
    Solution,
    Match,
    Deployment,
}

impl EntityKind {
    pub const ALL: [EntityKind; 5] = [
        EntityKind::Organization,
        EntityKind::Challenge,
        EntityKind::Solution,
        EntityKind::Match,
        EntityKind::Deployment,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            EntityKind::Organization => "org",
            EntityKind::Challenge => "chl",
            EntityKind::Solution => "sol",
            EntityKind::Match => "mat",
            EntityKind::Deployment => "dep",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Organization => "organization",
            EntityKind::Challenge => "challenge",
            EntityKind::Solution => "solution",
            EntityKind::Match => "match",
            EntityKind::Deployment => "deployment",
        }
    }

    /// Formats the n-th identifier of this kind, e.g. `org-000001`.
    pub fn format_id(self, n: u64) -> String {
        format!("{}-{:06}", self.prefix(), n)
    }

    /// Numeric suffix of an identifier of this kind, when it follows the scheme.
    pub fn parse_seq(self, id: &str) -> Option<u64> {
        id.strip_prefix(self.prefix())?.strip_prefix('-')?.parse().ok()
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Any storable entity.
#[derive(Debug, Clone, PartialEq)]
pub enum Entity {
    Organization(Organization),
    Challenge(Challenge),
    Solution(Solution),
    Match(MatchResult),
    Deployment(Deployment),
}

impl Entity {
    pub fn kind(&self) -> EntityKind {
        match self {
            Entity::Organization(_) => EntityKind::Organization,
            Entity::Challenge(_) => EntityKind::Challenge,
            Entity::Solution(_) => EntityKind::Solution,
            Entity::Match(_) => EntityKind::Match,
            Entity::Deployment(_) => EntityKind::Deployment,
        }
    }

    pub fn id(&self) -> &str {
        match self {
            Entity::Organization(e) => &e.id,
            Entity::Challenge(e) => &e.id,
            Entity::Solution(e) => &e.id,
            Entity::Match(e) => &e.id,
            Entity::Deployment(e) => &e.id,
        }
    }

    /// Foreign identifiers this entity points at, with the kind each must have.
    pub fn references(&self) -> Vec<(EntityKind, &str)> {
        match self {
            Entity::Organization(_) => Vec::new(),
            Entity::Challenge(c) => vec![(EntityKind::Organization, c.deployer_id.as_str())],
            Entity::Solution(s) => vec![(EntityKind::Organization, s.provider_id.as_str())],
            Entity::Match(m) => vec![
                (EntityKind::Challenge, m.challenge_id.as_str()),
                (EntityKind::Solution, m.solution_id.as_str()),
            ],
            Entity::Deployment(d) => {
                let mut refs = vec![(EntityKind::Match, d.match_id.as_str())];
                if let Some(f) = &d.financier_id {
                    refs.push((EntityKind::Organization, f.as_str()));
                }
                refs
            }
        }
    }
}

macro_rules! entity_from {
    ($($variant:ident => $ty:ty),*) => {
        $(impl From<$ty> for Entity {
            fn from(e: $ty) -> Self {
                Entity::$variant(e)
            }
        })*
    };
}

entity_from!(
    Organization => Organization,
    Challenge => Challenge,
    Solution => Solution,
    Match => MatchResult,
    Deployment => Deployment
);
