//! Command-line interface and HTTP service for the healthroute planner.
//!
//! - [`cli`]: the `healthroute` command (route, compare, generate, bench, serve).
//! - [`http`]: the JSON API over preloaded scenarios.
//! - [`documents`]: request and response documents shared by both surfaces.
//! - [`error`]: structured `{code, message, detail}` errors.

pub mod cli;
pub mod documents;
pub mod error;
pub mod http;

pub use error::{ErrorBody, ServiceError};
