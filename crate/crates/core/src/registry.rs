//! Name-keyed factories for the pluggable components: step generators, scorers,
//! similarity providers and entailment providers.

use std::collections::BTreeMap;
use std::time::Duration;

use thiserror::Error;

use crate::constraints::{
    EntailmentProvider, HttpEntailment, HttpSimilarity, LexicalSimilarity, NeutralEntailment,
    RuleEntailment, SimilarityProvider,
};
use crate::generation::remote::RemoteGenerator;
use crate::generation::toy::{ToyLm, ToyLmSpec};
use crate::generation::StepGenerator;
use crate::http::HttpJson;
use crate::selection::{
    CosineScorer, NGramScorer, Scorer, SelfConsistencyScorer, VerifierClient, VerifierScorer,
};

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown {kind} {name:?} (available: {available})")]
    Unknown {
        kind: &'static str,
        name: String,
        available: String,
    },
    #[error("{kind} {name:?} needs {what}")]
    Missing {
        kind: &'static str,
        name: String,
        what: &'static str,
    },
    #[error("{0}")]
    Build(String),
}

/// Everything a factory may need. Unused fields are ignored.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub endpoint: Option<String>,
    pub embedding_endpoint: Option<String>,
    pub nli_endpoint: Option<String>,
    pub verifier_endpoint: Option<String>,
    pub timeout: Duration,
    pub retry_budget: usize,
    pub ngram_n: usize,
    pub toy_spec: Option<ToyLmSpec>,
    pub similarity: String,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            endpoint: None,
            embedding_endpoint: None,
            nli_endpoint: None,
            verifier_endpoint: None,
            timeout: Duration::from_secs(60),
            retry_budget: 2,
            ngram_n: 3,
            toy_spec: None,
            similarity: "lexical".to_string(),
        }
    }
}

type Factory<T> = Box<dyn Fn(&str, &BuildOptions) -> Result<Box<T>, RegistryError> + Send + Sync>;

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    factories: BTreeMap<String, Factory<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            factories: BTreeMap::new(),
        }
    }

    /// Adds or replaces the factory registered under `name`.
    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&str, &BuildOptions) -> Result<Box<T>, RegistryError> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn build(&self, name: &str, opts: &BuildOptions) -> Result<Box<T>, RegistryError> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| RegistryError::Unknown {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })?;
        factory(name, opts)
    }
}

fn need<'a>(
    value: &'a Option<String>,
    kind: &'static str,
    name: &str,
    what: &'static str,
) -> Result<&'a str, RegistryError> {
    value.as_deref().ok_or_else(|| RegistryError::Missing {
        kind,
        name: name.to_string(),
        what,
    })
}

pub fn generators() -> Registry<dyn StepGenerator> {
    let mut r: Registry<dyn StepGenerator> = Registry::new("model");
    r.register("toy", |name, o| {
        let spec = o.toy_spec.clone().ok_or_else(|| RegistryError::Missing {
            kind: "model",
            name: name.to_string(),
            what: "a toy grammar",
        })?;
        let lm = ToyLm::new(spec).map_err(|e| RegistryError::Build(e.to_string()))?;
        Ok(Box::new(lm) as Box<dyn StepGenerator>)
    });
    r.register("remote", |name, o| {
        let url = need(&o.endpoint, "model", name, "an endpoint")?;
        Ok(
            Box::new(RemoteGenerator::http(url, o.timeout, o.retry_budget))
                as Box<dyn StepGenerator>,
        )
    });
    r
}

pub fn similarity_providers() -> Registry<dyn SimilarityProvider> {
    let mut r: Registry<dyn SimilarityProvider> = Registry::new("similarity provider");
    r.register("lexical", |_, _| {
        Ok(Box::new(LexicalSimilarity) as Box<dyn SimilarityProvider>)
    });
    r.register("http", |name, o| {
        let url = need(
            &o.embedding_endpoint,
            "similarity provider",
            name,
            "an embedding endpoint",
        )?;
        Ok(
            Box::new(HttpSimilarity::new(Box::new(HttpJson::new(url, o.timeout))))
                as Box<dyn SimilarityProvider>,
        )
    });
    r
}

pub fn entailment_providers() -> Registry<dyn EntailmentProvider> {
    let mut r: Registry<dyn EntailmentProvider> = Registry::new("entailment provider");
    r.register("rule", |_, _| {
        Ok(Box::new(RuleEntailment) as Box<dyn EntailmentProvider>)
    });
    r.register("neutral", |_, _| {
        Ok(Box::new(NeutralEntailment) as Box<dyn EntailmentProvider>)
    });
    r.register("http", |name, o| {
        let url = need(
            &o.nli_endpoint,
            "entailment provider",
            name,
            "an NLI endpoint",
        )?;
        Ok(
            Box::new(HttpEntailment::new(Box::new(HttpJson::new(url, o.timeout))))
                as Box<dyn EntailmentProvider>,
        )
    });
    r
}

pub fn scorers() -> Registry<dyn Scorer> {
    let mut r: Registry<dyn Scorer> = Registry::new("scorer");
    r.register("ngram", |_, o| {
        if o.ngram_n == 0 {
            return Err(RegistryError::Build("ngram-n must be >= 1".into()));
        }
        Ok(Box::new(NGramScorer { n: o.ngram_n }) as Box<dyn Scorer>)
    });
    r.register("selfcons", |_, _| {
        Ok(Box::new(SelfConsistencyScorer) as Box<dyn Scorer>)
    });
    r.register("cosine", |_, o| {
        let provider = similarity_providers().build(&o.similarity, o)?;
        Ok(Box::new(CosineScorer { provider }) as Box<dyn Scorer>)
    });
    r.register("verifier", |name, o| {
        let url = need(&o.verifier_endpoint, "scorer", name, "a verifier endpoint")?;
        let client = VerifierClient::new(Box::new(HttpJson::new(url, o.timeout)), o.retry_budget);
        Ok(Box::new(VerifierScorer { client }) as Box<dyn Scorer>)
    });
    r
}
