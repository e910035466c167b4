use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use pb_core::{ModelError, SolveError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Invalid(#[from] ModelError),
    #[error("malformed request body: {0}")]
    BadBody(String),
    #[error("no election with id {0}")]
    NotFound(String),
    #[error("missing or unknown voter credential")]
    Unauthorized,
    #[error("election {0} is closed")]
    Closed(String),
    #[error("election {0} is not closed yet")]
    NotClosed(String),
    #[error(transparent)]
    Tally(SolveError),
    #[error("storage failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt election data in {path}: {detail}")]
    Corrupt { path: String, detail: String },
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    pub entity: Option<String>,
}

impl ServiceError {
    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::Invalid(_) | ServiceError::BadBody(_) => StatusCode::BAD_REQUEST,
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Unauthorized => StatusCode::UNAUTHORIZED,
            ServiceError::Closed(_) | ServiceError::NotClosed(_) => StatusCode::CONFLICT,
            ServiceError::Tally(e) if e.is_capacity() => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Tally(SolveError::Model(_)) => StatusCode::BAD_REQUEST,
            ServiceError::Tally(_) | ServiceError::Io(_) | ServiceError::Corrupt { .. } => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Invalid(e) => e.code(),
            ServiceError::BadBody(_) => "BadRequest",
            ServiceError::NotFound(_) => "NotFound",
            ServiceError::Unauthorized => "Unauthorized",
            ServiceError::Closed(_) => "ElectionClosed",
            ServiceError::NotClosed(_) => "ElectionOpen",
            ServiceError::Tally(e) => e.code(),
            ServiceError::Io(_) => "StorageError",
            ServiceError::Corrupt { .. } => "CorruptData",
        }
    }

    pub fn entity(&self) -> Option<String> {
        match self {
            ServiceError::Invalid(e) => e.entity(),
            ServiceError::NotFound(id) | ServiceError::Closed(id) | ServiceError::NotClosed(id) => {
                Some(id.clone())
            }
            ServiceError::Tally(e) => e.entity(),
            _ => None,
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            code: self.code().to_string(),
            message: self.to_string(),
            entity: self.entity(),
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        if self.status().is_server_error() {
            log::error!("{self}");
        }
        (self.status(), Json(self.body())).into_response()
    }
}
