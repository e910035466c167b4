//! HTTP election service.
//!
//! Routes:
//!
//! * `POST /elections` with `{"instance": ..., "voters": [1, 2, ...]}` creates an
//!   election and returns one bearer credential per voter.
//! * `GET /elections/{id}/schema[?constraints=true]` serves the ballot schema.
//! * `POST /elections/{id}/votes` with `Authorization: Bearer <token>` and
//!   `{"entries": {...}}` records a ballot; resubmission replaces it.
//! * `POST /elections/{id}/close` with an optional `{"mode": "force-exact"}`
//!   tallies and seals the election.
//! * `GET /elections/{id}/results` returns the stored tally.
//!
//! Errors carry `{code, message, entity}`.

pub mod api;
pub mod error;
pub mod store;

use std::path::PathBuf;
use std::sync::Arc;

use pb_core::{SolveMode, SolverConfig};

pub use api::{router, AppState, BallotSchema};
pub use error::ServiceError;
pub use store::{Election, Store};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub bind: String,
    pub data_dir: PathBuf,
    pub solver: SolverConfig,
    pub mode: SolveMode,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: "127.0.0.1:8080".into(),
            data_dir: PathBuf::from("pb-data"),
            solver: SolverConfig::default(),
            mode: SolveMode::Auto,
        }
    }
}

impl ServiceConfig {
    /// Reads `PB_BIND`, `PB_DATA_DIR`, `PB_SMAX_CAP`, `PB_DISTINCT_CAP` and
    /// `PB_ORACLE_CAP` over the defaults.
    pub fn from_env() -> Result<Self, String> {
        let mut c = ServiceConfig::default();
        if let Ok(v) = std::env::var("PB_BIND") {
            c.bind = v;
        }
        if let Ok(v) = std::env::var("PB_DATA_DIR") {
            c.data_dir = v.into();
        }
        let num = |name: &str, slot: &mut usize| -> Result<(), String> {
            if let Ok(v) = std::env::var(name) {
                *slot = v
                    .parse()
                    .map_err(|_| format!("{name} must be a non-negative integer, got {v:?}"))?;
            }
            Ok(())
        };
        num("PB_SMAX_CAP", &mut c.solver.smax_cap)?;
        num("PB_DISTINCT_CAP", &mut c.solver.distinct_cap)?;
        num("PB_ORACLE_CAP", &mut c.solver.oracle_cap)?;
        Ok(c)
    }

    pub fn app_state(&self) -> Result<AppState, ServiceError> {
        Ok(AppState {
            store: Arc::new(Store::open(&self.data_dir)?),
            solver: self.solver.clone(),
            default_mode: self.mode,
        })
    }
}

/// Replays the data directory and serves until ctrl-c.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let state = config.app_state()?;
    let listener = tokio::net::TcpListener::bind(&config.bind).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
