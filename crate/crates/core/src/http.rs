//! JSON-over-HTTP transport shared by the remote generator, the neural constraint
//! providers and the verifier client.

use std::time::Duration;

use serde_json::Value;
use thiserror::Error;

/// Environment variable consulted for the default model endpoint.
pub const ENDPOINT_ENV: &str = "STEPDECODE_ENDPOINT";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HttpError {
    /// Connection, timeout or server-side (5xx / 429) failure.
    #[error("transport failure: {0}")]
    Network(String),
    /// The server rejected the request or returned something that is not JSON.
    #[error("bad response: {0}")]
    Protocol(String),
}

impl HttpError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, HttpError::Network(_))
    }
}

/// One JSON request, one JSON response.
pub trait JsonTransport: Send + Sync {
    fn post(&self, body: &Value) -> Result<Value, HttpError>;

    fn describe(&self) -> String {
        "json transport".to_string()
    }
}

#[derive(Debug, Clone)]
pub struct HttpJson {
    agent: ureq::Agent,
    url: String,
}

impl HttpJson {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build();
        HttpJson {
            agent: ureq::Agent::new_with_config(config),
            url: url.into(),
        }
    }

    pub fn url(&self) -> &str {
        &self.url
    }
}

impl JsonTransport for HttpJson {
    fn post(&self, body: &Value) -> Result<Value, HttpError> {
        let mut resp = self
            .agent
            .post(&self.url)
            .send_json(body)
            .map_err(|e| HttpError::Network(e.to_string()))?;
        let status = resp.status().as_u16();
        if status == 429 || status >= 500 {
            return Err(HttpError::Network(format!("server status {status}")));
        }
        if !(200..300).contains(&status) {
            let text = resp.body_mut().read_to_string().unwrap_or_default();
            return Err(HttpError::Protocol(format!("status {status}: {text}")));
        }
        resp.body_mut()
            .read_json::<Value>()
            .map_err(|e| HttpError::Protocol(format!("response is not JSON: {e}")))
    }

    fn describe(&self) -> String {
        self.url.clone()
    }
}
