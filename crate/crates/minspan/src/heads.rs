//! Head-word selection for mention trees.
//!
//! Noun-phrase-like roots go through the classic seven-rule cascade: a
//! final possessive marker wins outright, then rightmost nominal child,
//! leftmost NP child, rightmost adjectival phrase, rightmost cardinal,
//! rightmost adjective-like child, and finally the last word. A matched
//! constituent child is resolved by reapplying the cascade inside it until
//! a single token remains; the reported rule is the one that fired at the
//! root.
//!
//! Roots outside the noun family fall back to the last non-punctuation
//! token unless a head-table configuration covers their tag.

use thiserror::Error;

use crate::mina::TagPolicy;
use crate::treebank::ParseNode;

/// Rules match on these nominal child tags (second rule).
const RIGHT_NOMINAL: [&str; 7] = ["NN", "NNP", "NNPS", "NNS", "NX", "POS", "JJR"];
/// Adjectival-phrase tags for the fourth rule.
const RIGHT_ADJP: [&str; 3] = ["$", "ADJP", "PRN"];
/// Adjective-like tags for the sixth rule.
const RIGHT_ADJ: [&str; 4] = ["JJ", "JJS", "RB", "QP"];
/// Tags that never serve as a fallback head.
const PUNCT_TAGS: [&str; 8] = [",", ".", ":", "``", "''", "-LRB-", "-RRB-", "HYPH"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeadError {
    #[error("tree has no tokens to pick a head from")]
    EmptyTree,
}

/// Which cascade step produced the head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum HeadRule {
    LastWordPos,
    RightNn,
    LeftNp,
    RightAdj,
    RightCd,
    RightJj,
    LastWord,
    NonNpFallback,
    /// A head-table entry matched the root tag.
    Table,
}

impl HeadRule {
    pub fn name(&self) -> &'static str {
        match self {
            HeadRule::LastWordPos => "LastWordPOS",
            HeadRule::RightNn => "RightNN",
            HeadRule::LeftNp => "LeftNP",
            HeadRule::RightAdj => "RightAdj",
            HeadRule::RightCd => "RightCD",
            HeadRule::RightJj => "RightJJ",
            HeadRule::LastWord => "LastWord",
            HeadRule::NonNpFallback => "NonNPFallback",
            HeadRule::Table => "Table",
        }
    }
}

/// A selected head token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeadResult {
    pub token_index: usize,
    pub rule_fired: HeadRule,
}

/// Direction a head-table entry scans children in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanDirection {
    Left,
    Right,
}

/// One configured head rule: parent tag, scan direction, child priorities.
#[derive(Debug, Clone)]
pub struct HeadTableEntry {
    pub parent: String,
    pub direction: ScanDirection,
    pub priorities: Vec<String>,
}

/// Head rules for tags outside the noun family, keyed by parent tag.
#[derive(Debug, Clone, Default)]
pub struct HeadTable {
    entries: Vec<HeadTableEntry>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeadTableError {
    #[error("line {line}: expected TAG;left|right;TAG1,TAG2,..., got {content:?}")]
    BadLine { line: usize, content: String },
}

impl HeadTable {
    /// Parses `TAG;left|right;TAG1,TAG2,...` lines; `#` comments and blank
    /// lines are ignored. A later entry for the same tag wins.
    pub fn parse(text: &str) -> Result<HeadTable, HeadTableError> {
        let mut entries = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || HeadTableError::BadLine {
                line: index + 1,
                content: raw.to_string(),
            };
            let mut fields = line.splitn(3, ';');
            let parent = fields.next().ok_or_else(bad)?.trim();
            let direction = match fields.next().ok_or_else(bad)?.trim() {
                "left" => ScanDirection::Left,
                "right" => ScanDirection::Right,
                _ => return Err(bad()),
            };
            let priorities: Vec<String> = fields
                .next()
                .unwrap_or("")
                .split(',')
                .map(|t| t.trim().to_string())
                .filter(|t| !t.is_empty())
                .collect();
            if parent.is_empty() {
                return Err(bad());
            }
            entries.push(HeadTableEntry {
                parent: parent.to_string(),
                direction,
                priorities,
            });
        }
        Ok(HeadTable { entries })
    }

    fn entry_for(&self, tag: &str) -> Option<&HeadTableEntry> {
        self.entries.iter().rev().find(|e| e.parent == tag)
    }
}

/// Applies the noun-phrase cascade to a node whose tag is in the noun
/// family.
pub fn collins_np_head(node: &ParseNode) -> Result<HeadResult, HeadError> {
    cascade(node)
}

fn cascade(node: &ParseNode) -> Result<HeadResult, HeadError> {
    let tokens = node.tokens_with_pos();
    let (last_index, _, last_pos) = *tokens.last().ok_or(HeadError::EmptyTree)?;
    if last_pos == "POS" {
        return Ok(HeadResult {
            token_index: last_index,
            rule_fired: HeadRule::LastWordPos,
        });
    }
    let children = node.children();
    let right = |tags: &[&str]| {
        children
            .iter()
            .rev()
            .find(|c| tags.contains(&c.label()))
    };
    if let Some(child) = right(&RIGHT_NOMINAL) {
        return resolve(child, HeadRule::RightNn);
    }
    if let Some(child) = children.iter().find(|c| c.label() == "NP") {
        return resolve(child, HeadRule::LeftNp);
    }
    if let Some(child) = right(&RIGHT_ADJP) {
        return resolve(child, HeadRule::RightAdj);
    }
    if let Some(child) = right(&["CD"]) {
        return resolve(child, HeadRule::RightCd);
    }
    if let Some(child) = right(&RIGHT_ADJ) {
        return resolve(child, HeadRule::RightJj);
    }
    Ok(HeadResult {
        token_index: last_index,
        rule_fired: HeadRule::LastWord,
    })
}

/// Digs into a matched child until a single token remains; the rule that
/// matched at the top keeps the credit.
fn resolve(node: &ParseNode, rule: HeadRule) -> Result<HeadResult, HeadError> {
    let token_index = match node {
        ParseNode::Leaf { index, .. } => *index,
        _ if node.is_preterminal() => match &node.children()[0] {
            ParseNode::Leaf { index, .. } => *index,
            _ => unreachable!("preterminal child is a leaf"),
        },
        _ => cascade(node)?.token_index,
    };
    Ok(HeadResult { token_index, rule_fired: rule })
}

/// Picks the head token of any mention tree.
///
/// Noun-family roots use the cascade. Other roots consult the head table
/// when one covers their tag, and otherwise take the last token that is not
/// punctuation (or the very last token when everything is punctuation).
pub fn head_span(
    tree: &ParseNode,
    policy: &TagPolicy,
    table: Option<&HeadTable>,
) -> Result<HeadResult, HeadError> {
    if !tree.is_leaf() && policy.np_tags.contains(tree.label()) {
        return cascade(tree);
    }
    if let Some(entry) = table.and_then(|t| t.entry_for(tree.label())) {
        return apply_table_entry(tree, entry);
    }
    let tokens = tree.tokens_with_pos();
    if tokens.is_empty() {
        return Err(HeadError::EmptyTree);
    }
    let token_index = tokens
        .iter()
        .rev()
        .find(|(_, _, pos)| !PUNCT_TAGS.contains(pos))
        .or_else(|| tokens.last())
        .map(|(index, _, _)| *index)
        .expect("token list is non-empty");
    Ok(HeadResult {
        token_index,
        rule_fired: HeadRule::NonNpFallback,
    })
}

/// Scans children per the entry's priorities, falling back to the first or
/// last child in scan direction.
fn apply_table_entry(node: &ParseNode, entry: &HeadTableEntry) -> Result<HeadResult, HeadError> {
    let children = node.children();
    if children.is_empty() {
        return Err(HeadError::EmptyTree);
    }
    let scan = |tag: &str| -> Option<&ParseNode> {
        match entry.direction {
            ScanDirection::Left => children.iter().find(|c| c.label() == tag),
            ScanDirection::Right => children.iter().rev().find(|c| c.label() == tag),
        }
    };
    for tag in &entry.priorities {
        if let Some(child) = scan(tag) {
            return resolve(child, HeadRule::Table);
        }
    }
    let child = match entry.direction {
        ScanDirection::Left => &children[0],
        ScanDirection::Right => children.last().expect("children checked non-empty"),
    };
    resolve(child, HeadRule::Table)
}
