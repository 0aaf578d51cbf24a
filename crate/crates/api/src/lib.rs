//! HTTP service under `/v1`.
//!
//! Handlers are thin: each one locks the shared store, calls the matching
//! function in `dhub_core::service` (or the store directly) and serializes the
//! result. All writes go through one write lock and are flushed to the
//! snapshot file, when one is configured, before the response is sent.

mod error;
mod handlers;

use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use axum::http::{HeaderValue, Method};
use axum::routing::{get, post, put};
use axum::Router;
use chrono::{DateTime, Utc};
use dhub_core::{Store, TemplateSet};
use thiserror::Error;
use tokio::sync::RwLock;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use error::{ApiError, ErrorBody};
pub use handlers::{
    CompileRequest, CreateDeploymentRequest, DashboardQuery, MatchQuery, MatchRequest, MilestoneRequest,
    MilestoneStatusRequest, QuestionsQuery, TransitionRequest,
};

pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<RwLock<Store>>,
    pub templates: Arc<TemplateSet>,
    pub clock: Clock,
    pub opportunity_threshold: f64,
}

impl AppState {
    pub fn new(store: Store, templates: TemplateSet) -> Self {
        AppState {
            store: Arc::new(RwLock::new(store)),
            templates: Arc::new(templates),
            clock: Arc::new(Utc::now),
            opportunity_threshold: dhub_core::service::DEFAULT_OPPORTUNITY_THRESHOLD,
        }
    }

    /// Stamps every computed record with `at` instead of the wall clock.
    pub fn with_fixed_clock(mut self, at: DateTime<Utc>) -> Self {
        self.clock = Arc::new(move || at);
        self
    }

    pub fn now(&self) -> DateTime<Utc> {
        (self.clock)()
    }
}

/// Every `/v1` route, without CORS.
pub fn router(state: AppState) -> Router {
    let v1 = Router::new()
        .route("/organizations", get(handlers::list_organizations).post(handlers::create_organization))
        .route(
            "/organizations/{id}",
            get(handlers::get_organization).put(handlers::update_organization).delete(handlers::delete_organization),
        )
        .route("/challenges", get(handlers::list_challenges).post(handlers::create_challenge))
        .route(
            "/challenges/{id}",
            get(handlers::get_challenge).put(handlers::update_challenge).delete(handlers::delete_challenge),
        )
        .route("/challenges/{id}/matches", get(handlers::list_matches).post(handlers::compute_matches))
        .route("/solutions", get(handlers::list_solutions).post(handlers::create_solution))
        .route(
            "/solutions/{id}",
            get(handlers::get_solution).put(handlers::update_solution).delete(handlers::delete_solution),
        )
        .route("/coverage", get(handlers::coverage))
        .route("/deployments", get(handlers::list_deployments).post(handlers::create_deployment))
        .route("/deployments/{id}", get(handlers::get_deployment))
        .route("/deployments/{id}/transition", post(handlers::transition))
        .route("/deployments/{id}/milestones", get(handlers::list_milestones).post(handlers::add_milestone))
        .route("/deployments/{id}/milestones/{name}", put(handlers::set_milestone_status))
        .route("/deployments/{id}/trace", get(handlers::trace))
        .route("/intake/questions", get(handlers::questions))
        .route("/intake/compile", post(handlers::compile))
        .route("/dashboards/{role}/{org_id}", get(handlers::dashboard));
    Router::new()
        .nest("/v1", v1)
        .route("/health", get(|| async { "ok" }))
        .fallback(handlers::not_found)
        .with_state(state)
}

/// CORS for the listed origins only; an empty list allows none.
pub fn cors_layer(origins: &[String]) -> Result<CorsLayer, ServeError> {
    let parsed = origins
        .iter()
        .map(|o| HeaderValue::from_str(o).map_err(|_| ServeError::Config(format!("invalid CORS origin {o:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CorsLayer::new()
        .allow_origin(AllowOrigin::list(parsed))
        .allow_methods([Method::GET, Method::POST, Method::PUT, Method::DELETE])
        .allow_headers([axum::http::header::CONTENT_TYPE]))
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub port: u16,
    pub host: IpAddr,
    /// Snapshot file; created on first write when missing.
    pub store_path: Option<PathBuf>,
    /// Dataset to load into an empty store at start-up.
    pub seed_data: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub cors_origins: Vec<String>,
}

impl Default for ServeConfig {
    fn default() -> Self {
        ServeConfig {
            port: 8080,
            host: IpAddr::from([127, 0, 0, 1]),
            store_path: None,
            seed_data: None,
            templates: None,
            cors_origins: Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Store(#[from] dhub_core::StoreError),
    #[error(transparent)]
    Format(#[from] dhub_core::FormatError),
    #[error(transparent)]
    Intake(#[from] dhub_core::IntakeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Builds the state a server with this configuration would start with.
pub fn load_state(config: &ServeConfig) -> Result<AppState, ServeError> {
    let mut store = match &config.store_path {
        Some(p) => Store::open(p)?,
        None => Store::new(),
    };
    if let Some(data) = &config.seed_data {
        if store.is_empty() {
            let mut seeded = Store::from_dataset(dhub_core::dataset::Dataset::import(data)?)?;
            if let Some(p) = &config.store_path {
                seeded.set_path(p);
                seeded.snapshot(p)?;
            }
            store = seeded;
        }
    }
    let templates = match &config.templates {
        Some(p) => TemplateSet::load(p)?,
        None => TemplateSet::builtin(),
    };
    Ok(AppState::new(store, templates))
}

/// Runs until Ctrl-C or SIGTERM, then writes any unsaved state.
pub async fn serve(config: ServeConfig) -> Result<(), ServeError> {
    let state = load_state(&config)?;
    let app = router(state.clone()).layer(cors_layer(&config.cors_origins)?);
    let addr = SocketAddr::from((config.host, config.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).with_graceful_shutdown(shutdown_signal()).await?;
    state.store.write().await.flush()?;
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = terminate => {},
    }
}
