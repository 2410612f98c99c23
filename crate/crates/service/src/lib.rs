//! HTTP/JSON API, configuration and operator CLI over `noosphere-core`.

pub mod api;
pub mod auth;
pub mod cli;
pub mod config;
pub mod data;
pub mod error;

pub use api::{router, AppState};
pub use config::{Config, ConfigError};
pub use data::DataDir;
pub use error::{ApiError, ServiceError};
