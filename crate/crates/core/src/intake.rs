//! Guided challenge intake.
//!
//! A template set holds domain-agnostic questions (scope `ALL`) and
//! domain-specific ones. Answers are normalized per answer kind and compiled
//! into a draft [`Challenge`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::read_text;
use crate::error::{FormatError, IntakeError};
use crate::model::{normalize_tags, Challenge, ChallengeStatus, Domain, Usd};
use crate::region::is_country_code;

pub const DRAFT_CHALLENGE_ID: &str = "chl-draft";

/// Challenge fields that a template set must be able to fill.
pub const REQUIRED_FIELDS: [&str; 7] = [
    "title",
    "domain",
    "country",
    "affected_population",
    "budget_usd",
    "window_months",
    "required_tags",
];

const BUILTIN_TEMPLATES: &str = include_str!("../data/templates.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scope {
    All,
    Domain(Domain),
}

impl Scope {
    fn applies_to(self, domain: Domain) -> bool {
        match self {
            Scope::All => true,
            Scope::Domain(d) => d == domain,
        }
    }
}

impl TryFrom<String> for Scope {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if s == "ALL" {
            Ok(Scope::All)
        } else {
            s.parse().map(Scope::Domain).map_err(|e: crate::error::ModelError| e.to_string())
        }
    }
}

impl From<Scope> for String {
    fn from(s: Scope) -> String {
        match s {
            Scope::All => "ALL".to_string(),
            Scope::Domain(d) => d.as_str().to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnswerKind {
    Text,
    Integer,
    Money,
    CountryCode,
    TagList,
    Months,
}

impl AnswerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AnswerKind::Text => "text",
            AnswerKind::Integer => "positive integer",
            AnswerKind::Money => "positive USD amount",
            AnswerKind::CountryCode => "two-letter country code",
            AnswerKind::TagList => "comma-separated tag list",
            AnswerKind::Months => "number of months",
        }
    }
}

impl fmt::Display for AnswerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionTemplate {
    pub question_id: String,
    pub domain: Scope,
    pub prompt: String,
    pub answer_kind: AnswerKind,
    pub required: bool,
    #[serde(default)]
    pub maps_to: Option<String>,
}

/// Canonical form of an answer; `None` when it does not parse.
///
/// Applying it to its own output returns the same string.
pub fn normalize_answer(kind: AnswerKind, raw: &str) -> Option<String> {
    let trimmed = raw.trim();
    match kind {
        AnswerKind::Text => (!trimmed.is_empty()).then(|| trimmed.to_string()),
        AnswerKind::Integer | AnswerKind::Months => {
            let digits: String = trimmed.chars().filter(|c| *c != ',' && *c != '_').collect();
            let n: u64 = digits.parse().ok()?;
            if n == 0 || (kind == AnswerKind::Months && n > u64::from(u32::MAX)) {
                return None;
            }
            Some(n.to_string())
        }
        AnswerKind::Money => {
            let usd: Usd = trimmed.trim_start_matches('$').parse().ok()?;
            usd.is_positive().then(|| usd.to_string())
        }
        AnswerKind::CountryCode => {
            let code = trimmed.to_ascii_uppercase();
            is_country_code(&code).then_some(code)
        }
        AnswerKind::TagList => {
            let tags = normalize_tags(trimmed.split([',', ';']));
            (!tags.is_empty()).then(|| tags.into_iter().collect::<Vec<_>>().join(", "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    templates: Vec<QuestionTemplate>,
}

impl TemplateSet {
    /// The template set shipped with the crate.
    pub fn builtin() -> TemplateSet {
        TemplateSet::from_json(BUILTIN_TEMPLATES).expect("built-in templates are valid")
    }

    pub fn from_json(text: &str) -> Result<TemplateSet, IntakeError> {
        let templates: Vec<QuestionTemplate> =
            serde_json::from_str(text).map_err(|e| IntakeError::Templates(FormatError::from(e).to_string()))?;
        TemplateSet::new(templates)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TemplateSet, IntakeError> {
        let text = read_text(path.as_ref()).map_err(|e| IntakeError::Templates(e.to_string()))?;
        TemplateSet::from_json(&text)
    }

    pub fn new(templates: Vec<QuestionTemplate>) -> Result<TemplateSet, IntakeError> {
        let set = TemplateSet { templates };
        set.check()?;
        Ok(set)
    }

    pub fn templates(&self) -> &[QuestionTemplate] {
        &self.templates
    }

    fn check(&self) -> Result<(), IntakeError> {
        let mut ids = BTreeSet::new();
        for t in &self.templates {
            if !ids.insert(t.question_id.as_str()) {
                return Err(IntakeError::Templates(format!("duplicate question_id {}", t.question_id)));
            }
            if let Some(field) = &t.maps_to {
                if !REQUIRED_FIELDS.contains(&field.as_str()) {
                    return Err(IntakeError::Templates(format!(
                        "{} maps to unknown field {field}",
                        t.question_id
                    )));
                }
            }
        }
        for domain in Domain::ALL {
            for field in REQUIRED_FIELDS {
                let n = self
                    .questions_for(domain)
                    .iter()
                    .filter(|t| t.required && t.maps_to.as_deref() == Some(field))
                    .count();
                if n != 1 {
                    return Err(IntakeError::Templates(format!(
                        "{domain}: field {field} is covered by {n} required templates, expected 1"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `ALL` templates first, then the domain's own, each in file order.
    pub fn questions_for(&self, domain: Domain) -> Vec<QuestionTemplate> {
        let all = self.templates.iter().filter(|t| t.domain == Scope::All);
        let own = self.templates.iter().filter(|t| t.domain == Scope::Domain(domain));
        all.chain(own).cloned().collect()
    }

    pub fn compile(
        &self,
        deployer_id: &str,
        domain: Domain,
        answers: &[(String, String)],
    ) -> Result<Challenge, IntakeError> {
        let questions = self.questions_for(domain);
        let by_id: BTreeMap<&str, &QuestionTemplate> =
            questions.iter().map(|q| (q.question_id.as_str(), q)).collect();

        let mut given: BTreeMap<&str, &str> = BTreeMap::new();
        for (qid, value) in answers {
            if !by_id.contains_key(qid.as_str()) {
                return Err(IntakeError::UnknownQuestion(qid.clone()));
            }
            if given.insert(qid, value).is_some() {
                return Err(IntakeError::DuplicateAnswer(qid.clone()));
            }
        }
        let missing: Vec<String> = questions
            .iter()
            .filter(|q| q.required && given.get(q.question_id.as_str()).is_none_or(|v| v.trim().is_empty()))
            .map(|q| q.question_id.clone())
            .collect();
        if !missing.is_empty() {
            return Err(IntakeError::Incomplete { missing });
        }

        let mut fields: BTreeMap<&str, String> = BTreeMap::new();
        let mut tags = BTreeSet::new();
        for q in questions.iter().filter(|q| q.applies(domain)) {
            let Some(raw) = given.get(q.question_id.as_str()) else { continue };
            if raw.trim().is_empty() {
                continue;
            }
            let value = normalize_answer(q.answer_kind, raw).ok_or_else(|| IntakeError::Parse {
                question_id: q.question_id.clone(),
                kind: q.answer_kind.as_str(),
                value: raw.to_string(),
            })?;
            match q.maps_to.as_deref() {
                Some("required_tags") => tags.extend(normalize_tags(value.split(','))),
                Some(field) if q.required => {
                    fields.insert(field, value);
                }
                _ => {}
            }
        }

        let parse_err = |field: &str, kind: &'static str| {
            let q = questions.iter().find(|q| q.maps_to.as_deref() == Some(field) && q.required);
            IntakeError::Parse {
                question_id: q.map(|q| q.question_id.clone()).unwrap_or_else(|| field.to_string()),
                kind,
                value: fields.get(field).cloned().unwrap_or_default(),
            }
        };
        let answered_domain: Domain =
            fields["domain"].parse().map_err(|_| parse_err("domain", "domain name"))?;
        if answered_domain != domain {
            return Err(parse_err("domain", "domain matching the selected template domain"));
        }
        Ok(Challenge {
            id: DRAFT_CHALLENGE_ID.to_string(),
            deployer_id: deployer_id.to_string(),
            title: fields["title"].clone(),
            domain,
            country: fields["country"].clone(),
            required_tags: tags,
            affected_population: fields["affected_population"].parse().map_err(|_| parse_err("affected_population", "positive integer"))?,
            budget_usd: fields["budget_usd"].parse().map_err(|_| parse_err("budget_usd", "positive USD amount"))?,
            window_months: fields["window_months"].parse().map_err(|_| parse_err("window_months", "number of months"))?,
            status: ChallengeStatus::Draft,
            intake_answers: answers.to_vec(),
        })
    }
}

impl QuestionTemplate {
    fn applies(&self, domain: Domain) -> bool {
        self.domain.applies_to(domain)
    }
}

impl Default for TemplateSet {
    fn default() -> Self {
        TemplateSet::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::validate_challenge;

    fn answers(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(q, a)| (q.to_string(), a.to_string())).collect()
    }

    fn full() -> Vec<(String, String)> {
        answers(&[
            ("title", "Irrigation for smallholders"),
            ("domain", "Agriculture"),
            ("country", "ke"),
            ("affected_population", "40000"),
            ("budget", "250000.00"),
            ("window", "12"),
            ("capabilities", "Irrigation, SOLAR pumps"),
        ])
    }

    #[test]
    fn builtin_set_is_valid() {
        let set = TemplateSet::builtin();
        assert!(set.templates().len() >= REQUIRED_FIELDS.len());
    }

    #[test]
    fn agriculture_questions() {
        let qs = TemplateSet::builtin().questions_for(Domain::Agriculture);
        assert!(qs.iter().any(|q| q.question_id == "budget" && q.domain == Scope::All));
        assert!(qs.iter().any(|q| q.question_id == "agri_capabilities"));
        let first_specific = qs.iter().position(|q| q.domain != Scope::All).unwrap();
        assert!(qs[first_specific..].iter().all(|q| q.domain == Scope::Domain(Domain::Agriculture)));
        assert_eq!(qs, TemplateSet::builtin().questions_for(Domain::Agriculture));
    }

    #[test]
    fn compiles_full_answers() {
        let c = TemplateSet::builtin().compile("org-000001", Domain::Agriculture, &full()).unwrap();
        assert_eq!(c.budget_usd, Usd::from_dollars(250_000));
        assert_eq!(c.affected_population, 40_000);
        assert_eq!(c.window_months, 12);
        assert_eq!(c.country, "KE");
        assert_eq!(c.status, ChallengeStatus::Draft);
        assert_eq!(c.required_tags, BTreeSet::from(["irrigation".to_string(), "solar pumps".to_string()]));
        assert_eq!(c.intake_answers, full());
        assert!(validate_challenge(&c).is_empty());
    }

    #[test]
    fn domain_specific_tags_merge() {
        let mut a = full();
        a.push(("agri_capabilities".into(), "Cold Storage".into()));
        let c = TemplateSet::builtin().compile("org-000001", Domain::Agriculture, &a).unwrap();
        assert!(c.required_tags.contains("cold storage"));
        assert_eq!(c.required_tags.len(), 3);
    }

    #[test]
    fn missing_budget_is_named() {
        let a: Vec<_> = full().into_iter().filter(|(q, _)| q != "budget").collect();
        let err = TemplateSet::builtin().compile("org-000001", Domain::Agriculture, &a).unwrap_err();
        assert_eq!(err, IntakeError::Incomplete { missing: vec!["budget".into()] });
    }

    #[test]
    fn unparseable_answer_is_typed() {
        let mut a = full();
        a[4].1 = "a lot".into();
        match TemplateSet::builtin().compile("org-000001", Domain::Agriculture, &a).unwrap_err() {
            IntakeError::Parse { question_id, kind, .. } => {
                assert_eq!(question_id, "budget");
                assert_eq!(kind, "positive USD amount");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_and_duplicate_answers() {
        let mut a = full();
        a.push(("water_source".into(), "river".into()));
        assert_eq!(
            TemplateSet::builtin().compile("org-000001", Domain::Agriculture, &a),
            Err(IntakeError::UnknownQuestion("water_source".into()))
        );
        let mut a = full();
        a.push(("title".into(), "again".into()));
        assert_eq!(
            TemplateSet::builtin().compile("org-000001", Domain::Agriculture, &a),
            Err(IntakeError::DuplicateAnswer("title".into()))
        );
    }

    #[test]
    fn domain_answer_must_match() {
        let mut a = full();
        a[1].1 = "Water".into();
        assert!(matches!(
            TemplateSet::builtin().compile("org-000001", Domain::Agriculture, &a),
            Err(IntakeError::Parse { .. })
        ));
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_answer(AnswerKind::TagList, "Irrigation, SOLAR pumps").unwrap(), "irrigation, solar pumps");
        assert_eq!(normalize_answer(AnswerKind::Money, "$1,250,000").unwrap(), "1250000.00");
        assert_eq!(normalize_answer(AnswerKind::Integer, "40,000").unwrap(), "40000");
        assert_eq!(normalize_answer(AnswerKind::Integer, "0"), None);
        assert_eq!(normalize_answer(AnswerKind::CountryCode, " br ").unwrap(), "BR");
        assert_eq!(normalize_answer(AnswerKind::CountryCode, "BRA"), None);
        assert_eq!(normalize_answer(AnswerKind::TagList, " , "), None);
    }

    #[test]
    fn broken_template_sets_rejected() {
        let mut ts = TemplateSet::builtin().templates().to_vec();
        ts.retain(|t| t.question_id != "budget");
        assert!(matches!(TemplateSet::new(ts), Err(IntakeError::Templates(_))));
        let mut ts = TemplateSet::builtin().templates().to_vec();
        ts.push(ts[0].clone());
        assert!(matches!(TemplateSet::new(ts), Err(IntakeError::Templates(_))));
        assert!(matches!(TemplateSet::from_json("[{"), Err(IntakeError::Templates(_))));
    }

    #[test]
    fn template_json_round_trip() {
        let set = TemplateSet::builtin();
        let text = serde_json::to_string(set.templates()).unwrap();
        assert!(text.contains("\"domain\":\"ALL\""));
        assert_eq!(TemplateSet::from_json(&text).unwrap(), set);
    }
}
