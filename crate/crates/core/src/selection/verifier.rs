//! External verifier: a completion model asked, with five worked examples, whether a
//! chain is (A) correct or (B) incorrect. The probability of option A is the score.

use crate::generation::remote::{complete, CompletionRequest};
use crate::generation::GenerationError;
use crate::http::JsonTransport;

pub const VERIFIER_TEMPLATE: &str = include_str!("../../assets/prompts/verifier.txt");

pub struct VerifierClient {
    transport: Box<dyn JsonTransport>,
    template: String,
    retry_budget: usize,
}

impl VerifierClient {
    pub fn new(transport: Box<dyn JsonTransport>, retry_budget: usize) -> Self {
        VerifierClient {
            transport,
            template: VERIFIER_TEMPLATE.to_string(),
            retry_budget,
        }
    }

    pub fn with_template(mut self, template: impl Into<String>) -> Self {
        self.template = template.into();
        self
    }

    pub fn endpoint(&self) -> String {
        self.transport.describe()
    }

    pub fn render(&self, question: &str, reasoning: &str) -> String {
        self.template
            .replace("{question}", question)
            .replace("{reasoning}", reasoning)
    }

    /// Probability in [0, 1] that the verifier picks option A.
    ///
    /// The server decodes one token greedily. An "A" token scores exp(logprob); a "B"
    /// token scores 1 - exp(logprob), treating the two options as the whole mass.
    pub fn score(&self, question: &str, reasoning: &str) -> Result<f64, GenerationError> {
        let req = CompletionRequest {
            prompt: self.render(question, reasoning),
            max_tokens: 1,
            temperature: 0.0,
            top_k: Some(1),
            top_p: None,
            stop: vec!["\n".to_string()],
            logprobs: true,
            seed: None,
        };
        let resp = complete(self.transport.as_ref(), &req, self.retry_budget)?;
        let (Some(token), Some(lp)) = (resp.tokens.first(), resp.token_logprobs.first()) else {
            return Err(GenerationError::Protocol(
                "verifier returned no tokens".into(),
            ));
        };
        let p = lp.exp().clamp(0.0, 1.0);
        match token.trim().trim_start_matches('(').trim_end_matches(')') {
            "A" => Ok(p),
            "B" => Ok(1.0 - p),
            other => Err(GenerationError::Protocol(format!(
                "verifier answered {other:?}, expected A or B"
            ))),
        }
    }
}
