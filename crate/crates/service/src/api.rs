use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use pb_core::model::EntryRecord;
use pb_core::{
    GroupId, GroupKind, InstanceFile, LabelId, ProjectId, SolveMode, SolverConfig, VoterId,
};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;
use crate::store::{Accepted, Credential, Election, Store};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub solver: SolverConfig,
    pub default_mode: SolveMode,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/elections", post(create))
        .route("/elections/{id}/schema", get(schema))
        .route("/elections/{id}/votes", post(submit))
        .route("/elections/{id}/close", post(close))
        .route("/elections/{id}/results", get(results))
        .with_state(state)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub instance: InstanceFile,
    #[serde(default)]
    pub voters: Vec<VoterId>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreateResponse {
    pub id: String,
    pub credentials: Vec<Credential>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmitRequest {
    /// Must match the credential's voter when given.
    #[serde(default)]
    pub voter: Option<VoterId>,
    #[serde(default)]
    pub entries: BTreeMap<GroupId, EntryRecord>,
}

#[derive(Debug, Serialize)]
pub struct SubmitResponse {
    pub voter: VoterId,
    #[serde(flatten)]
    pub accepted: Accepted,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloseRequest {
    #[serde(default)]
    pub mode: Option<SolveMode>,
}

#[derive(Debug, Default, Deserialize)]
pub struct SchemaQuery {
    #[serde(default)]
    pub constraints: bool,
}

/// What a ballot needs to render and pre-validate a vote.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallotSchema {
    pub id: String,
    pub open: bool,
    pub budget: u64,
    pub groups: Vec<SchemaGroup>,
    pub rules: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Vec<SchemaLabel>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaGroup {
    pub id: GroupId,
    /// `standard` or `contradictory`.
    pub kind: String,
    /// Contradictory groups only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_approvals: Option<u32>,
    /// Whether the ballot should ask if the approvals are complements.
    pub ask_complements: bool,
    pub projects: Vec<SchemaProject>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaProject {
    pub id: ProjectId,
    pub name: String,
    pub cost: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaLabel {
    pub id: LabelId,
    pub parent: Option<LabelId>,
    pub min: u64,
    pub max: Option<u64>,
    pub groups: Vec<GroupId>,
}

pub fn ballot_schema(election: &Election, constraints: bool) -> BallotSchema {
    let inst = &election.instance;
    let groups = inst
        .groups()
        .iter()
        .map(|g| {
            let (kind, max_approvals) = match g.kind {
                GroupKind::Standard => ("standard", None),
                GroupKind::Contradictory { max_approvals } => {
                    ("contradictory", Some(max_approvals))
                }
            };
            SchemaGroup {
                id: g.id,
                kind: kind.to_string(),
                max_approvals,
                ask_complements: !g.kind.is_contradictory() && g.projects.len() >= 2,
                projects: g
                    .projects
                    .iter()
                    .map(|&p| {
                        let proj = inst.project(p).expect("group members exist");
                        SchemaProject {
                            id: p,
                            name: proj.name.clone(),
                            cost: proj.cost,
                        }
                    })
                    .collect(),
            }
        })
        .collect();
    let labels = constraints.then(|| {
        inst.labels()
            .iter()
            .map(|l| SchemaLabel {
                id: l.id,
                parent: l.parent,
                min: l.b_min,
                max: l.declared_max,
                groups: inst
                    .groups()
                    .iter()
                    .filter(|g| g.label_leaf == l.id)
                    .map(|g| g.id)
                    .collect(),
            })
            .collect()
    });
    BallotSchema {
        id: election.id.clone(),
        open: !election.is_closed(),
        budget: inst.budget(),
        groups,
        rules: vec![
            format!("total funds across groups at most {}", inst.budget()),
            "funds and approvals per group are non-negative; zero funds means no approvals".into(),
            "contradictory groups accept at most max_approvals approvals and no complement flag"
                .into(),
        ],
        constraints: labels,
    }
}

fn parse_body<T: serde::de::DeserializeOwned + Default>(body: &Bytes) -> Result<T, ServiceError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ServiceError::BadBody(e.to_string()))
}

fn bearer(headers: &HeaderMap) -> Option<&str> {
    headers
        .get(header::AUTHORIZATION)?
        .to_str()
        .ok()?
        .strip_prefix("Bearer ")
        .map(str::trim)
}

fn json_text(status: StatusCode, text: &str) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, "application/json")],
        text.to_string(),
    )
        .into_response()
}

async fn create(State(state): State<AppState>, body: Bytes) -> Result<Response, ServiceError> {
    let req: CreateRequest =
        serde_json::from_slice(&body).map_err(|e| ServiceError::BadBody(e.to_string()))?;
    let (election, credentials) = state.store.create(&req.instance, &req.voters)?;
    log::info!(
        "created election {} with {} voters",
        election.id,
        credentials.len()
    );
    let resp = CreateResponse {
        id: election.id.clone(),
        credentials,
    };
    Ok((StatusCode::CREATED, Json(resp)).into_response())
}

async fn schema(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<SchemaQuery>,
) -> Result<Json<BallotSchema>, ServiceError> {
    let election = state.store.get(&id)?;
    Ok(Json(ballot_schema(&election, q.constraints)))
}

async fn submit(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Json<SubmitResponse>, ServiceError> {
    let election = state.store.get(&id)?;
    let voter = bearer(&headers)
        .and_then(|t| election.voter_for(t))
        .ok_or(ServiceError::Unauthorized)?;
    let req: SubmitRequest =
        serde_json::from_slice(&body).map_err(|e| ServiceError::BadBody(e.to_string()))?;
    if req.voter.is_some_and(|v| v != voter) {
        return Err(ServiceError::Unauthorized);
    }
    let accepted = election.submit(voter, req.entries)?;
    Ok(Json(SubmitResponse { voter, accepted }))
}

async fn close(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ServiceError> {
    let election = state.store.get(&id)?;
    let req: CloseRequest = parse_body(&body)?;
    let mode = req.mode.unwrap_or(state.default_mode);
    let config = state.solver.clone();
    let json = tokio::task::spawn_blocking(move || election.close(mode, &config))
        .await
        .map_err(|e| ServiceError::Io(std::io::Error::other(e.to_string())))??;
    Ok(json_text(StatusCode::OK, &json))
}

async fn results(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Response, ServiceError> {
    let election = state.store.get(&id)?;
    let json = election.result_json().ok_or(ServiceError::NotClosed(id))?;
    Ok(json_text(StatusCode::OK, &json))
}
