use axum::body::Bytes;
use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{StatusCode, Uri};
use axum::Json;
use chrono::NaiveDate;
use dhub_core::intake::QuestionTemplate;
use dhub_core::service::{self, CoverageCell, RoleDashboard};
use dhub_core::store::TraceChain;
use dhub_core::{
    Challenge, Deployment, DeploymentStatus, Domain, Entity, EntityKind, MatchResult, Milestone, MilestoneStatus,
    OrgRole, Organization, RankedMatch, Solution, Usd,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ApiError;
use crate::AppState;

type ApiResult<T> = Result<T, ApiError>;

fn path<T>(p: Result<Path<T>, PathRejection>) -> ApiResult<T> {
    Ok(p?.0)
}

fn query<T>(q: Result<Query<T>, QueryRejection>) -> ApiResult<T> {
    Ok(q?.0)
}

fn json<T>(b: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    Ok(b?.0)
}

/// Parses a record body; `id` may be omitted because the server assigns it.
fn record<T: DeserializeOwned>(body: Result<Json<Value>, JsonRejection>) -> ApiResult<T> {
    let mut value = json(body)?;
    if let Value::Object(map) = &mut value {
        map.entry("id").or_insert_with(|| Value::String(String::new()));
    }
    serde_json::from_value(value).map_err(|e| ApiError::bad_request(format!("invalid record: {e}")))
}

async fn write<T>(state: &AppState, f: impl FnOnce(&mut dhub_core::Store) -> ApiResult<T>) -> ApiResult<T> {
    let mut store = state.store.write().await;
    let out = f(&mut store)?;
    store.flush().map_err(|e| ApiError::internal(format!("snapshot failed: {e}")))?;
    Ok(out)
}

fn found<T: Clone>(item: Option<&T>, kind: EntityKind, id: &str) -> ApiResult<T> {
    item.cloned().ok_or_else(|| dhub_core::StoreError::NotFound { kind, id: id.to_string() }.into())
}

pub async fn not_found(uri: Uri) -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "route_not_found", format!("no route for {}", uri.path()), Value::Null)
}

macro_rules! resource {
    ($ty:ty, $variant:ident, $kind:expr, $getter:ident, $iter:ident,
     $list:ident, $get:ident, $create:ident, $update:ident, $delete:ident) => {
        pub async fn $list(State(state): State<AppState>) -> Json<Vec<$ty>> {
            Json(state.store.read().await.$iter().cloned().collect())
        }

        pub async fn $get(State(state): State<AppState>, id: Result<Path<String>, PathRejection>) -> ApiResult<Json<$ty>> {
            let id = path(id)?;
            Ok(Json(found(state.store.read().await.$getter(&id), $kind, &id)?))
        }

        pub async fn $create(
            State(state): State<AppState>,
            body: Result<Json<Value>, JsonRejection>,
        ) -> ApiResult<(StatusCode, Json<$ty>)> {
            let item: $ty = record(body)?;
            let created = write(&state, |s| Ok(service::create(s, item)?)).await?;
            match created {
                Entity::$variant(x) => Ok((StatusCode::CREATED, Json(x))),
                _ => Err(ApiError::internal("created a record of another kind")),
            }
        }

        pub async fn $update(
            State(state): State<AppState>,
            id: Result<Path<String>, PathRejection>,
            body: Result<Json<Value>, JsonRejection>,
        ) -> ApiResult<Json<$ty>> {
            let id = path(id)?;
            let item: $ty = record(body)?;
            let updated = write(&state, |s| Ok(service::update(s, &id, item)?)).await?;
            match updated {
                Entity::$variant(x) => Ok(Json(x)),
                _ => Err(ApiError::internal("updated a record of another kind")),
            }
        }

        pub async fn $delete(
            State(state): State<AppState>,
            id: Result<Path<String>, PathRejection>,
        ) -> ApiResult<StatusCode> {
            let id = path(id)?;
            write(&state, |s| Ok(s.delete($kind, &id)?)).await?;
            Ok(StatusCode::NO_CONTENT)
        }
    };
}

resource!(
    Organization, Organization, EntityKind::Organization, organization, organizations,
    list_organizations, get_organization, create_organization, update_organization, delete_organization
);
resource!(
    Challenge, Challenge, EntityKind::Challenge, challenge, challenges,
    list_challenges, get_challenge, create_challenge, update_challenge, delete_challenge
);
resource!(
    Solution, Solution, EntityKind::Solution, solution, solutions,
    list_solutions, get_solution, create_solution, update_solution, delete_solution
);

/// Optional body of `POST /v1/challenges/{id}/matches`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchRequest {
    /// Raw, unnormalized weights in dimension order; defaults when absent.
    #[serde(default)]
    pub weights: Option<[f64; 6]>,
    #[serde(default)]
    pub top_k: Option<usize>,
}

pub async fn compute_matches(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<Vec<RankedMatch>>)> {
    let id = path(id)?;
    let req: MatchRequest = if body.iter().all(u8::is_ascii_whitespace) {
        MatchRequest::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("invalid match request: {e}")))?
    };
    let now = state.now();
    let ranked = write(&state, |s| Ok(service::compute_matches(s, &id, req.weights, req.top_k, now)?)).await?;
    Ok((StatusCode::CREATED, Json(ranked)))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchQuery {
    #[serde(default)]
    pub profile_id: Option<String>,
}

pub async fn list_matches(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
    q: Result<Query<MatchQuery>, QueryRejection>,
) -> ApiResult<Json<Vec<MatchResult>>> {
    let (id, q) = (path(id)?, query(q)?);
    let mut matches = service::stored_matches(&*state.store.read().await, &id)?;
    if let Some(p) = q.profile_id {
        matches.retain(|m| m.profile_id == p);
    }
    Ok(Json(matches))
}

pub async fn coverage(State(state): State<AppState>) -> Json<Vec<CoverageCell>> {
    Json(service::coverage(&*state.store.read().await))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateDeploymentRequest {
    pub match_id: String,
    #[serde(default)]
    pub financier_id: Option<String>,
    #[serde(default)]
    pub committed_usd: Usd,
}

pub async fn list_deployments(State(state): State<AppState>) -> Json<Vec<Deployment>> {
    Json(state.store.read().await.deployments().cloned().collect())
}

pub async fn create_deployment(
    State(state): State<AppState>,
    body: Result<Json<CreateDeploymentRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<Deployment>)> {
    let req = json(body)?;
    let now = state.now();
    let dep = write(&state, |s| {
        Ok(service::create_deployment(s, &req.match_id, req.financier_id.as_deref(), req.committed_usd, now)?)
    })
    .await?;
    Ok((StatusCode::CREATED, Json(dep)))
}

pub async fn get_deployment(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
) -> ApiResult<Json<Deployment>> {
    let id = path(id)?;
    Ok(Json(found(state.store.read().await.deployment(&id), EntityKind::Deployment, &id)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRequest {
    pub status: DeploymentStatus,
}

pub async fn transition(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
    body: Result<Json<TransitionRequest>, JsonRejection>,
) -> ApiResult<Json<Deployment>> {
    let (id, req) = (path(id)?, json(body)?);
    Ok(Json(write(&state, |s| Ok(service::transition(s, &id, req.status)?)).await?))
}

pub async fn list_milestones(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
) -> ApiResult<Json<Vec<Milestone>>> {
    let id = path(id)?;
    Ok(Json(found(state.store.read().await.deployment(&id), EntityKind::Deployment, &id)?.milestones))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MilestoneRequest {
    pub name: String,
    pub due: NaiveDate,
}

pub async fn add_milestone(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
    body: Result<Json<MilestoneRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<Deployment>)> {
    let (id, req) = (path(id)?, json(body)?);
    let dep = write(&state, |s| Ok(service::add_milestone(s, &id, &req.name, req.due)?)).await?;
    Ok((StatusCode::CREATED, Json(dep)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MilestoneStatusRequest {
    pub status: MilestoneStatus,
}

pub async fn set_milestone_status(
    State(state): State<AppState>,
    p: Result<Path<(String, String)>, PathRejection>,
    body: Result<Json<MilestoneStatusRequest>, JsonRejection>,
) -> ApiResult<Json<Deployment>> {
    let ((id, name), req) = (path(p)?, json(body)?);
    Ok(Json(write(&state, |s| Ok(service::set_milestone_status(s, &id, &name, req.status)?)).await?))
}

pub async fn trace(
    State(state): State<AppState>,
    id: Result<Path<String>, PathRejection>,
) -> ApiResult<Json<TraceChain>> {
    let id = path(id)?;
    Ok(Json(state.store.read().await.trace(&id)?))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QuestionsQuery {
    #[serde(default)]
    pub domain: Option<String>,
}

fn parse_domain(s: &str) -> ApiResult<Domain> {
    s.parse().map_err(|e: dhub_core::ModelError| ApiError::bad_request(e.to_string()))
}

/// Questions for one domain, or the whole template set without `domain`.
pub async fn questions(
    State(state): State<AppState>,
    q: Result<Query<QuestionsQuery>, QueryRejection>,
) -> ApiResult<Json<Vec<QuestionTemplate>>> {
    Ok(Json(match query(q)?.domain {
        Some(d) => state.templates.questions_for(parse_domain(&d)?),
        None => state.templates.templates().to_vec(),
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompileRequest {
    pub deployer_id: String,
    pub domain: String,
    /// `[question_id, answer]` pairs in the order they were given.
    pub answers: Vec<(String, String)>,
}

pub async fn compile(
    State(state): State<AppState>,
    body: Result<Json<CompileRequest>, JsonRejection>,
) -> ApiResult<Json<Challenge>> {
    let req = json(body)?;
    let domain = parse_domain(&req.domain)?;
    let store = state.store.read().await;
    Ok(Json(service::compile_intake(&state.templates, &store, &req.deployer_id, domain, &req.answers)?))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DashboardQuery {
    #[serde(default)]
    pub threshold: Option<f64>,
}

pub async fn dashboard(
    State(state): State<AppState>,
    p: Result<Path<(String, String)>, PathRejection>,
    q: Result<Query<DashboardQuery>, QueryRejection>,
) -> ApiResult<Json<RoleDashboard>> {
    let ((role, org_id), q) = (path(p)?, query(q)?);
    let role: OrgRole = role.parse().map_err(|e: dhub_core::ModelError| ApiError::bad_request(e.to_string()))?;
    let threshold = q.threshold.unwrap_or(state.opportunity_threshold);
    if !threshold.is_finite() {
        return Err(ApiError::bad_request("threshold must be a finite number"));
    }
    Ok(Json(service::dashboard(&*state.store.read().await, role, &org_id, threshold)?))
}

