//! Client for completion servers speaking the JSON completion protocol.
//!
//! Request:
//! `{"prompt", "max_tokens", "temperature", "top_k"?, "top_p"?, "stop": [..], "logprobs": true, "seed"?}`
//!
//! Response:
//! `{"text", "tokens": [..], "token_logprobs": [..], "finish_reason": "stop" | "length"}`
//!
//! One request produces one step; the step delimiters travel as stop sequences.

use std::time::Duration;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{FinishReason, GeneratedStep, GenerationContext, GenerationError, StepGenerator};
use crate::http::{HttpError, HttpJson, JsonTransport};
use crate::types::Token;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub prompt: String,
    pub max_tokens: usize,
    pub temperature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_p: Option<f64>,
    pub stop: Vec<String>,
    pub logprobs: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CompletionRequest {
    pub fn from_context(ctx: &GenerationContext) -> Self {
        CompletionRequest {
            prompt: ctx.full_prompt(),
            max_tokens: ctx.max_tokens,
            temperature: ctx.params.temperature,
            top_k: ctx.params.top_k,
            top_p: ctx.params.top_p,
            stop: ctx.stop_markers.clone(),
            logprobs: true,
            seed: ctx.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionResponse {
    pub text: String,
    pub tokens: Vec<String>,
    pub token_logprobs: Vec<f64>,
    pub finish_reason: String,
}

/// Sends a completion request, retrying transport failures up to `retry_budget` times.
pub fn complete(
    transport: &dyn JsonTransport,
    request: &CompletionRequest,
    retry_budget: usize,
) -> Result<CompletionResponse, GenerationError> {
    let body = serde_json::to_value(request)
        .map_err(|e| GenerationError::Protocol(format!("cannot encode request: {e}")))?;
    let mut attempts = 0;
    let raw = loop {
        attempts += 1;
        match transport.post(&body) {
            Ok(v) => break v,
            Err(HttpError::Network(detail)) => {
                if attempts > retry_budget {
                    return Err(GenerationError::Network { attempts, detail });
                }
            }
            Err(HttpError::Protocol(detail)) => return Err(GenerationError::Protocol(detail)),
        }
    };
    parse_response(raw)
}

fn parse_response(raw: serde_json::Value) -> Result<CompletionResponse, GenerationError> {
    let obj = raw
        .as_object()
        .ok_or_else(|| GenerationError::Protocol("response is not an object".into()))?;
    for field in ["text", "tokens", "token_logprobs", "finish_reason"] {
        if obj.get(field).is_none_or(|v| v.is_null()) {
            return Err(GenerationError::Protocol(format!("response lacks {field}")));
        }
    }
    let resp: CompletionResponse = serde_json::from_value(raw)
        .map_err(|e| GenerationError::Protocol(format!("malformed response: {e}")))?;
    if resp.tokens.len() != resp.token_logprobs.len() {
        return Err(GenerationError::Protocol(format!(
            "{} tokens but {} logprobs",
            resp.tokens.len(),
            resp.token_logprobs.len()
        )));
    }
    Ok(resp)
}

/// Maps a wire response onto the generator contract.
pub fn to_generated_step(
    resp: CompletionResponse,
    max_tokens: usize,
) -> Result<GeneratedStep, GenerationError> {
    let finish_reason = match resp.finish_reason.as_str() {
        "stop" => FinishReason::StopMarker,
        "length" => FinishReason::Length,
        other => {
            return Err(GenerationError::Protocol(format!(
                "unknown finish_reason {other:?}"
            )))
        }
    };
    if resp.tokens.len() > max_tokens {
        return Err(GenerationError::Protocol(format!(
            "{} tokens exceed max_tokens {max_tokens}",
            resp.tokens.len()
        )));
    }
    let tokens = resp
        .tokens
        .into_iter()
        .zip(resp.token_logprobs)
        .filter(|(t, _)| !t.is_empty())
        .map(|(t, lp)| {
            // servers occasionally report +1e-7 for certain tokens
            let lp = if lp > 0.0 && lp < 1e-6 { 0.0 } else { lp };
            Token::new(t, lp).map_err(|e| GenerationError::Protocol(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GeneratedStep {
        tokens,
        finish_reason,
    })
}

pub struct RemoteGenerator {
    transport: Box<dyn JsonTransport>,
    retry_budget: usize,
}

impl RemoteGenerator {
    pub fn new(transport: Box<dyn JsonTransport>, retry_budget: usize) -> Self {
        RemoteGenerator {
            transport,
            retry_budget,
        }
    }

    pub fn http(endpoint: &str, timeout: Duration, retry_budget: usize) -> Self {
        Self::new(Box::new(HttpJson::new(endpoint, timeout)), retry_budget)
    }

    pub fn remote_generate_step(
        &self,
        context: &GenerationContext,
    ) -> Result<GeneratedStep, GenerationError> {
        context.validate()?;
        let req = CompletionRequest::from_context(context);
        let resp = complete(self.transport.as_ref(), &req, self.retry_budget)?;
        to_generated_step(resp, context.max_tokens)
    }
}

impl StepGenerator for RemoteGenerator {
    fn name(&self) -> &str {
        "remote"
    }

    /// The random source is unused; a seed in the context is forwarded to the server.
    fn generate_step(
        &self,
        context: &GenerationContext,
        _rng: &mut dyn RngCore,
    ) -> Result<GeneratedStep, GenerationError> {
        self.remote_generate_step(context)
    }
}
