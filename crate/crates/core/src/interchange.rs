//! JSON interchange documents for dialogues and strategies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialogue::{replay, Dialogue, DialogueError, Move};
use crate::formula::{parse, Formula, ParseError};
use crate::rules::{parse_ruleset, Ruleset, RulesetError};
use crate::strategy::{Constraint, SearchReport, SearchResult, StrategyNode, StrategyTree, Verdict};

#[derive(Debug, Error)]
pub enum InterchangeError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad formula: {0}")]
    Formula(#[from] ParseError),
    #[error(transparent)]
    Ruleset(#[from] RulesetError),
    #[error(transparent)]
    Dialogue(#[from] DialogueError),
    #[error("a strategy document needs exactly one root move")]
    Root,
}

/// `{formula, ruleset, moves}` with the initial move included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueDocument {
    pub formula: String,
    pub ruleset: String,
    pub moves: Vec<Move>,
}

impl DialogueDocument {
    pub fn from_dialogue(d: &Dialogue) -> DialogueDocument {
        DialogueDocument {
            formula: d.thesis().render(),
            ruleset: d.ruleset().spec_text(),
            moves: d.moves().to_vec(),
        }
    }

    pub fn from_json(text: &str) -> Result<DialogueDocument, InterchangeError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn formula(&self) -> Result<Formula, InterchangeError> {
        Ok(parse(&self.formula)?)
    }

    pub fn ruleset(&self) -> Result<Ruleset, InterchangeError> {
        Ok(parse_ruleset(&self.ruleset)?)
    }

    /// Replays the moves under the document's own ruleset.
    pub fn replay(&self) -> Result<Dialogue, InterchangeError> {
        self.replay_under(&self.ruleset()?)
    }

    pub fn replay_under(&self, rs: &Ruleset) -> Result<Dialogue, InterchangeError> {
        Ok(replay(&self.formula()?, rs, &self.moves)?)
    }
}

/// A move with the moves that may follow it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveNode {
    #[serde(flatten)]
    pub mv: Move,
    #[serde(default)]
    pub children: Vec<MoveNode>,
}

impl From<&StrategyNode> for MoveNode {
    fn from(n: &StrategyNode) -> Self {
        MoveNode {
            mv: n.mv.clone(),
            children: n.children.iter().map(MoveNode::from).collect(),
        }
    }
}

impl From<&MoveNode> for StrategyNode {
    fn from(n: &MoveNode) -> Self {
        StrategyNode {
            mv: n.mv.clone(),
            children: n.children.iter().map(StrategyNode::from).collect(),
        }
    }
}

/// Dialogue document whose single root move carries `children` arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyDocument {
    pub formula: String,
    pub ruleset: String,
    pub moves: Vec<MoveNode>,
}

impl StrategyDocument {
    pub fn from_tree(t: &StrategyTree) -> StrategyDocument {
        StrategyDocument {
            formula: t.formula.render(),
            ruleset: t.ruleset.spec_text(),
            moves: vec![MoveNode::from(&t.root)],
        }
    }

    pub fn from_json(text: &str) -> Result<StrategyDocument, InterchangeError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn to_tree(&self) -> Result<StrategyTree, InterchangeError> {
        let [root] = self.moves.as_slice() else {
            return Err(InterchangeError::Root);
        };
        Ok(StrategyTree {
            formula: parse(&self.formula)?,
            ruleset: parse_ruleset(&self.ruleset)?,
            root: StrategyNode::from(root),
        })
    }
}

/// Result of a validity check, as printed by `check --format json` and
/// returned by the server's check endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckDocument {
    pub formula: String,
    pub ruleset: String,
    pub constraint: Constraint,
    pub verdict: Verdict,
    /// `valid`, `invalid` or `unknown(depth=N)`.
    pub text: String,
    pub depth: usize,
    pub nodes: u64,
    pub elapsed_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyDocument>,
}

impl CheckDocument {
    pub fn from_report(f: &Formula, rs: &Ruleset, c: Constraint, r: &SearchReport) -> CheckDocument {
        let verdict = r.result.verdict();
        let text = match &r.result {
            SearchResult::ProponentWins(_) => "valid".to_string(),
            SearchResult::NoStrategy => "invalid".to_string(),
            SearchResult::Exhausted(d) => format!("unknown(depth={d})"),
        };
        CheckDocument {
            formula: f.render(),
            ruleset: rs.spec_text(),
            constraint: c,
            verdict,
            text,
            depth: r.depth,
            nodes: r.nodes,
            elapsed_ms: r.elapsed_ms,
            strategy: r.result.tree().map(StrategyDocument::from_tree),
        }
    }
}
