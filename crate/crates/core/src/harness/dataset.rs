//! JSONL task files: one object per line with `id`, `question`, `gold_answer`, and
//! optionally `prompt`, `task_kind` and `template`.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::prompts::{build_prompt, template, template_task_kind};
use crate::selection::TaskKind;

pub const DATASET_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub id: String,
    pub question: String,
    pub prompt: String,
    pub gold_answer: String,
    pub task_kind: TaskKind,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    id: String,
    question: String,
    gold_answer: String,
    #[serde(default)]
    prompt: Option<String>,
    #[serde(default)]
    task_kind: Option<TaskKind>,
    #[serde(default)]
    template: Option<String>,
    #[serde(default)]
    schema_version: Option<u32>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {cause}")]
    Io { path: String, cause: std::io::Error },
    #[error("line {line}: {detail}")]
    Line { line: usize, detail: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("{path} contains no instances")]
    Empty { path: String },
}

/// Parses JSONL text. Lines that only carry a question get their prompt from the
/// line's `template`, else `default_template`, else the bare question.
pub fn parse_dataset(
    text: &str,
    default_template: Option<&str>,
) -> Result<Vec<TaskInstance>, DatasetError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |detail: String| DatasetError::Line {
            line: line_no,
            detail,
        };
        let raw: RawInstance = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        if let Some(v) = raw.schema_version {
            if v != DATASET_SCHEMA_VERSION {
                return Err(err(format!("unsupported schema_version {v}")));
            }
        }
        if raw.id.trim().is_empty() {
            return Err(err("empty id".into()));
        }
        if raw.question.trim().is_empty() {
            return Err(err("empty question".into()));
        }
        if raw.gold_answer.trim().is_empty() {
            return Err(err("empty gold_answer".into()));
        }
        let template_name = raw.template.as_deref().or(default_template);
        let prompt = match (raw.prompt, template_name) {
            (Some(p), _) => p,
            (None, Some(name)) => {
                let t = template(name).ok_or_else(|| err(format!("unknown template {name:?}")))?;
                build_prompt(t, &raw.question)
            }
            (None, None) => raw.question.clone(),
        };
        let task_kind = raw
            .task_kind
            .or_else(|| template_name.and_then(template_task_kind))
            .unwrap_or_default();
        if !seen.insert(raw.id.clone()) {
            return Err(DatasetError::DuplicateId {
                line: line_no,
                id: raw.id,
            });
        }
        out.push(TaskInstance {
            id: raw.id,
            question: raw.question,
            prompt,
            gold_answer: raw.gold_answer,
            task_kind,
        });
    }
    Ok(out)
}

pub fn load_dataset(
    path: &Path,
    default_template: Option<&str>,
) -> Result<Vec<TaskInstance>, DatasetError> {
    let text = fs::read_to_string(path).map_err(|cause| DatasetError::Io {
        path: path.display().to_string(),
        cause,
    })?;
    let instances = parse_dataset(&text, default_template)?;
    if instances.is_empty() {
        return Err(DatasetError::Empty {
            path: path.display().to_string(),
        });
    }
    Ok(instances)
}

pub fn write_dataset(path: &Path, instances: &[TaskInstance]) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    for inst in instances {
        serde_json::to_writer(&mut f, inst)?;
        f.write_all(b"\n")?;
    }
    f.flush()
}
