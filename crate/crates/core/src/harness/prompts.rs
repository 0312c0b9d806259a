//! Few-shot prompt templates for the arithmetic, yes/no and multiple-choice tasks.

use crate::selection::TaskKind;

pub const GSM8K: &str = include_str!("../../assets/prompts/gsm8k.txt");
pub const STRATEGYQA: &str = include_str!("../../assets/prompts/strategyqa.txt");
pub const CSQA: &str = include_str!("../../assets/prompts/csqa.txt");

pub const TEMPLATE_NAMES: [&str; 3] = ["gsm8k", "strategyqa", "csqa"];

pub fn template(name: &str) -> Option<&'static str> {
    match name {
        "gsm8k" => Some(GSM8K),
        "strategyqa" => Some(STRATEGYQA),
        "csqa" => Some(CSQA),
        _ => None,
    }
}

/// Answer format each template teaches.
pub fn template_task_kind(name: &str) -> Option<TaskKind> {
    match name {
        "gsm8k" => Some(TaskKind::Numeric),
        "strategyqa" => Some(TaskKind::YesNo),
        "csqa" => Some(TaskKind::MultipleChoice),
        _ => None,
    }
}

/// Template followed by the question in the exemplars' `Q:`/`A:` layout.
pub fn build_prompt(template: &str, question: &str) -> String {
    format!("{template}Q: {}\nA:", question.trim())
}
