//! Tree serialization: lossless JSON and Graphviz DOT.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::types::{NodeStatus, ReasoningTree};

pub const TREE_SCHEMA_VERSION: u32 = 1;
pub const DOT_LABEL_CHARS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeFormat {
    Json,
    Dot,
}

impl TreeFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TreeFormat::Json => "json",
            TreeFormat::Dot => "dot",
        }
    }
}

impl std::str::FromStr for TreeFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(TreeFormat::Json),
            "dot" => Ok(TreeFormat::Dot),
            other => Err(format!(
                "unknown tree format {other:?} (expected json or dot)"
            )),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TreeDocument {
    schema_version: u32,
    tree: ReasoningTree,
}

pub fn export_tree(tree: &ReasoningTree, format: TreeFormat) -> String {
    match format {
        TreeFormat::Json => tree_to_json(tree),
        TreeFormat::Dot => tree_to_dot(tree),
    }
}

pub fn tree_to_json(tree: &ReasoningTree) -> String {
    let doc = TreeDocument {
        schema_version: TREE_SCHEMA_VERSION,
        tree: tree.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("trees serialize");
    s.push('\n');
    s
}

pub fn tree_from_json(text: &str) -> Result<ReasoningTree, serde_json::Error> {
    let doc: TreeDocument = serde_json::from_str(text)?;
    if doc.schema_version != TREE_SCHEMA_VERSION {
        return Err(serde::de::Error::custom(format!(
            "unsupported tree schema_version {}",
            doc.schema_version
        )));
    }
    Ok(doc.tree)
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n")
}

fn truncate(s: &str, max: usize) -> String {
    if s.chars().count() <= max {
        s.to_string()
    } else {
        let cut: String = s.chars().take(max - 3).collect();
        format!("{cut}...")
    }
}

pub fn tree_to_dot(tree: &ReasoningTree) -> String {
    let mut out = String::from("digraph reasoning {\n  node [shape=box, fontsize=10];\n");
    for node in &tree.nodes {
        let label = match &node.step {
            None => "root".to_string(),
            Some(step) => format!(
                "{}\\nπ={:.4}",
                escape(&truncate(&step.text, DOT_LABEL_CHARS)),
                step.score
            ),
        };
        let style = match node.status {
            NodeStatus::Pruned => ", style=dashed",
            NodeStatus::Exhausted => ", style=dotted",
            NodeStatus::Terminal => ", peripheries=2",
            NodeStatus::Active => "",
        };
        let _ = writeln!(out, "  {} [label=\"{}\"{}];", node.id, label, style);
    }
    for node in &tree.nodes {
        for child in &node.children {
            let _ = writeln!(out, "  {} -> {};", node.id, child);
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{DecodeConfig, ReasoningStep, Token};

    fn step(text: &str, lp: f64) -> ReasoningStep {
        ReasoningStep::from_tokens(vec![Token::new(text, lp).unwrap()], 1.0, false).unwrap()
    }

    fn three_branch() -> ReasoningTree {
        let mut t = ReasoningTree::new("Q", DecodeConfig::default());
        for (i, s) in ["first branch", "second branch", "third branch"]
            .iter()
            .enumerate()
        {
            t.add_child(ReasoningTree::ROOT, step(s, -0.1 * (i + 1) as f64))
                .unwrap();
        }
        t.set_status(crate::types::NodeId(2), NodeStatus::Pruned)
            .unwrap();
        t
    }

    #[test]
    fn root_only() {
        let t = ReasoningTree::new("Q", DecodeConfig::default());
        let j = tree_to_json(&t);
        assert_eq!(tree_from_json(&j).unwrap(), t);
        let d = tree_to_dot(&t);
        assert_eq!(d.matches("[label=").count(), 1);
        assert!(!d.contains("->"));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let mut t = three_branch();
        t.add_child(crate::types::NodeId(1), step("deeper", -1.0 / 3.0))
            .unwrap();
        let a = tree_to_json(&t);
        let back = tree_from_json(&a).unwrap();
        assert_eq!(back, t);
        assert_eq!(tree_to_json(&back), a);
    }

    #[test]
    fn dot_structure() {
        let d = tree_to_dot(&three_branch());
        assert_eq!(d.matches("n0 -> ").count(), 3);
        assert!(d.contains("n2 [label=\"second branch\\nπ=-0.2000\", style=dashed];"));
        let mut t = ReasoningTree::new("Q", DecodeConfig::default());
        t.add_child(ReasoningTree::ROOT, step(&"x".repeat(100), -1.0))
            .unwrap();
        let d = tree_to_dot(&t);
        assert!(d.contains(&format!("\"{}...\\n", "x".repeat(57))));
    }

    #[test]
    fn format_names() {
        assert_eq!("dot".parse::<TreeFormat>().unwrap(), TreeFormat::Dot);
        assert!("svg".parse::<TreeFormat>().is_err());
    }
}
