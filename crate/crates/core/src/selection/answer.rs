//! Final-answer extraction and normalization.

use serde::{Deserialize, Serialize};

use crate::types::{ReasoningChain, ANSWER_MARKER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    #[default]
    Numeric,
    YesNo,
    MultipleChoice,
}

impl std::str::FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "numeric" => Ok(TaskKind::Numeric),
            "yes_no" => Ok(TaskKind::YesNo),
            "multiple_choice" => Ok(TaskKind::MultipleChoice),
            other => Err(format!(
                "unknown task kind {other:?} (expected numeric, yes_no or multiple_choice)"
            )),
        }
    }
}

/// Answer carried by the chain's final step, if it states one.
pub fn extract_answer(chain: &ReasoningChain, kind: TaskKind) -> Option<String> {
    extract_answer_text(&chain.last_step()?.text, kind)
}

/// Reads the answer after the last answer marker in `text`.
pub fn extract_answer_text(text: &str, kind: TaskKind) -> Option<String> {
    let at = text.rfind(ANSWER_MARKER)?;
    let rest = &text[at + ANSWER_MARKER.len()..];
    match kind {
        TaskKind::Numeric => first_number(rest).map(|n| normalize_answer(&n)),
        TaskKind::YesNo => {
            let word = first_word(rest)?.to_lowercase();
            matches!(word.as_str(), "yes" | "no").then_some(word)
        }
        TaskKind::MultipleChoice => {
            let word = first_word(rest)?;
            let mut chars = word.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if ('A'..='E').contains(&c.to_ascii_uppercase()) => {
                    Some(c.to_ascii_uppercase().to_string())
                }
                _ => None,
            }
        }
    }
}

fn first_word(text: &str) -> Option<&str> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .find(|w| !w.is_empty())
}

fn first_number(text: &str) -> Option<String> {
    let cleaned: String = text.chars().filter(|c| *c != ',' && *c != '$').collect();
    let chars: Vec<char> = cleaned.chars().collect();
    let start = chars.iter().position(char::is_ascii_digit)?;
    let mut end = start;
    while end < chars.len() && chars[end].is_ascii_digit() {
        end += 1;
    }
    if end + 1 < chars.len() && chars[end] == '.' && chars[end + 1].is_ascii_digit() {
        end += 1;
        while end < chars.len() && chars[end].is_ascii_digit() {
            end += 1;
        }
    }
    let negative = start > 0 && chars[start - 1] == '-';
    let digits: String = chars[start..end].iter().collect();
    Some(if negative {
        format!("-{digits}")
    } else {
        digits
    })
}

/// Lowercases, strips trailing punctuation and canonicalizes numbers
/// ("$1,000.0" and "1000" both become "1000").
pub fn normalize_answer(answer: &str) -> String {
    let s = answer
        .trim()
        .to_lowercase()
        .trim_end_matches(['.', ',', '!', '?', ';', ':'])
        .trim()
        .to_string();
    let numeric: String = s
        .trim_start_matches('$')
        .chars()
        .filter(|c| *c != ',')
        .collect();
    match numeric.parse::<f64>() {
        Ok(v)
            if v.is_finite()
                && !numeric.is_empty()
                && numeric.chars().any(|c| c.is_ascii_digit()) =>
        {
            if v.fract() == 0.0 && v.abs() < 1e15 {
                format!("{}", v as i64)
            } else {
                format!("{v}")
            }
        }
        _ => s,
    }
}

/// True when both answers normalize to the same string.
pub fn answers_match(a: &str, b: &str) -> bool {
    normalize_answer(a) == normalize_answer(b)
}
