//! Bracketed constituency trees.
//!
//! Trees arrive either as complete Penn-Treebank-style bracketings
//! (`(NP (DT a) (NN copy))`) or as the degenerate form where a constituent
//! holds bare words directly (`(NP a copy)`). Both parse to the same
//! [`ParseNode`] shape: internal nodes carry labels, leaves carry tokens with
//! their 0-based position in the sentence.
//!
//! Labels are normalized at parse time: functional-tag suffixes introduced by
//! `-` or `=` are stripped (`NP-SBJ` becomes `NP`), while labels that begin
//! with `-` (`-LRB-`, `-NONE-`) are kept verbatim. The original label is
//! retained for emission so that parse/emit round-trips.
//!
//! Parsing and emission are iterative; nesting depth is limited by memory,
//! not by the call stack.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors produced while parsing or inspecting bracketed trees.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    /// A `(` without its `)` or a stray `)`, reported at byte offset.
    #[error("unbalanced brackets at byte {position}")]
    UnbalancedBrackets { position: usize },
    /// A constituent with no label or no children, reported at byte offset.
    #[error("empty constituent at byte {position}")]
    EmptyConstituent { position: usize },
    /// Non-whitespace input after the root constituent closed.
    #[error("trailing garbage at byte {position}")]
    TrailingGarbage { position: usize },
    /// A node with no token descendants has no span.
    #[error("tree has no tokens")]
    EmptyTree,
}

/// Inclusive token-index interval within one sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpanInterval {
    pub start: usize,
    pub end: usize,
}

impl SpanInterval {
    /// Builds an interval; `start` must not exceed `end`.
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start <= end, "span start {start} exceeds end {end}");
        SpanInterval { start, end }
    }

    /// Number of tokens covered; intervals are inclusive, so never zero.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.start <= index && index <= self.end
    }

    /// True when `other` lies entirely inside this interval.
    pub fn contains(&self, other: &SpanInterval) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &SpanInterval) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

impl fmt::Display for SpanInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

impl FromStr for SpanInterval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| format!("expected START-END, got {s:?}"))?;
        let start: usize = a.trim().parse().map_err(|_| format!("bad span start {a:?}"))?;
        let end: usize = b.trim().parse().map_err(|_| format!("bad span end {b:?}"))?;
        if start > end {
            return Err(format!("span start {start} exceeds end {end}"));
        }
        Ok(SpanInterval::new(start, end))
    }
}

/// One node of a constituency tree.
///
/// A node is a leaf iff it carries a token and has no children; internal
/// nodes always have at least one child.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseNode {
    Internal {
        /// Normalized label with any `-`/`=` functional suffix removed.
        label: String,
        /// Label exactly as it appeared in the input, used when emitting.
        raw_label: String,
        children: Vec<ParseNode>,
    },
    Leaf {
        /// Surface form of the token.
        text: String,
        /// 0-based position of the token in its sentence.
        index: usize,
    },
}

impl ParseNode {
    /// Builds an internal node from parts; the label is normalized.
    pub fn internal(raw_label: impl Into<String>, children: Vec<ParseNode>) -> Self {
        let raw_label = raw_label.into();
        ParseNode::Internal {
            label: normalize_label(&raw_label).to_string(),
            raw_label,
            children,
        }
    }

    pub fn leaf(text: impl Into<String>, index: usize) -> Self {
        ParseNode::Leaf { text: text.into(), index }
    }

    /// Normalized label for internal nodes, token text for leaves.
    pub fn label(&self) -> &str {
        match self {
            ParseNode::Internal { label, .. } => label,
            ParseNode::Leaf { text, .. } => text,
        }
    }

    pub fn raw_label(&self) -> &str {
        match self {
            ParseNode::Internal { raw_label, .. } => raw_label,
            ParseNode::Leaf { text, .. } => text,
        }
    }

    pub fn children(&self) -> &[ParseNode] {
        match self {
            ParseNode::Internal { children, .. } => children,
            ParseNode::Leaf { .. } => &[],
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, ParseNode::Leaf { .. })
    }

    /// True for a part-of-speech node: exactly one child, which is a leaf.
    pub fn is_preterminal(&self) -> bool {
        match self {
            ParseNode::Internal { children, .. } => {
                children.len() == 1 && children[0].is_leaf()
            }
            ParseNode::Leaf { .. } => false,
        }
    }

    /// All token leaves under this node, left to right.
    pub fn leaves(&self) -> Vec<&ParseNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            match node {
                ParseNode::Leaf { .. } => out.push(node),
                ParseNode::Internal { children, .. } => {
                    stack.extend(children.iter().rev());
                }
            }
        }
        out
    }

    /// Tokens under this node as (index, text, part-of-speech).
    ///
    /// The part of speech is the label of the token's preterminal when it
    /// has one; a bare word under a multi-child constituent reports its own
    /// text, which matches the Penn convention of punctuation tagged as
    /// itself.
    pub fn tokens_with_pos(&self) -> Vec<(usize, &str, &str)> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            match node {
                ParseNode::Leaf { text, index } => out.push((*index, text.as_str(), text.as_str())),
                ParseNode::Internal { label, children, .. } => {
                    if node.is_preterminal() {
                        if let ParseNode::Leaf { text, index } = &children[0] {
                            out.push((*index, text.as_str(), label.as_str()));
                        }
                    } else {
                        stack.extend(children.iter().rev());
                    }
                }
            }
        }
        out
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    /// Token-index interval covered by this node.
    pub fn span(&self) -> Result<SpanInterval, TreeError> {
        let leaves = self.leaves();
        match (leaves.first(), leaves.last()) {
            (
                Some(ParseNode::Leaf { index: first, .. }),
                Some(ParseNode::Leaf { index: last, .. }),
            ) => Ok(SpanInterval::new(*first, *last)),
            _ => Err(TreeError::EmptyTree),
        }
    }
}

/// Emits the node in canonical single-line bracketed form.
impl fmt::Display for ParseNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        enum Step<'a> {
            Node(&'a ParseNode),
            Text(&'static str),
        }
        let mut stack = vec![Step::Node(self)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Text(s) => f.write_str(s)?,
                Step::Node(ParseNode::Leaf { text, .. }) => f.write_str(text)?,
                Step::Node(ParseNode::Internal { raw_label, children, .. }) => {
                    write!(f, "({raw_label}")?;
                    stack.push(Step::Text(")"));
                    for child in children.iter().rev() {
                        stack.push(Step::Node(child));
                        stack.push(Step::Text(" "));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Strips a functional-tag suffix (`NP-SBJ`, `NP=2`) down to the base tag.
/// Labels beginning with `-` (`-LRB-`, `-NONE-`) are already base tags.
pub fn normalize_label(raw: &str) -> &str {
    if raw.starts_with('-') {
        return raw;
    }
    match raw.find(['-', '=']) {
        Some(at) => &raw[..at],
        None => raw,
    }
}

/// Parses one bracketed tree covering the whole input.
///
/// Token indices are assigned left to right starting at 0. Trailing
/// whitespace is allowed; anything else after the root constituent is an
/// error.
pub fn parse_bracketed(text: &str) -> Result<ParseNode, TreeError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut next_index = 0usize;
    // Stack of open constituents: (raw label, children built so far, byte
    // offset of the opening bracket).
    let mut open: Vec<(String, Vec<ParseNode>, usize)> = Vec::new();
    let mut root: Option<ParseNode> = None;

    while pos < bytes.len() {
        let b = bytes[pos];
        if b.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        if root.is_some() {
            return Err(TreeError::TrailingGarbage { position: pos });
        }
        match b {
            b'(' => {
                let open_at = pos;
                pos += 1;
                while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                let label_start = pos;
                while pos < bytes.len()
                    && !bytes[pos].is_ascii_whitespace()
                    && bytes[pos] != b'('
                    && bytes[pos] != b')'
                {
                    pos += 1;
                }
                if pos == label_start {
                    return Err(TreeError::EmptyConstituent { position: open_at });
                }
                let raw_label = text[label_start..pos].to_string();
                open.push((raw_label, Vec::new(), open_at));
            }
            b')' => {
                let (raw_label, children, open_at) = match open.pop() {
                    Some(frame) => frame,
                    None => return Err(TreeError::UnbalancedBrackets { position: pos }),
                };
                if children.is_empty() {
                    return Err(TreeError::EmptyConstituent { position: open_at });
                }
                let node = ParseNode::internal(raw_label, children);
                match open.last_mut() {
                    Some((_, parent_children, _)) => parent_children.push(node),
                    None => root = Some(node),
                }
                pos += 1;
            }
            _ => {
                let token_start = pos;
                while pos < bytes.len()
                    && !bytes[pos].is_ascii_whitespace()
                    && bytes[pos] != b'('
                    && bytes[pos] != b')'
                {
                    pos += 1;
                }
                let token = text[token_start..pos].to_string();
                match open.last_mut() {
                    Some((_, children, _)) => {
                        children.push(ParseNode::leaf(token, next_index));
                        next_index += 1;
                    }
                    None => return Err(TreeError::TrailingGarbage { position: token_start }),
                }
            }
        }
    }

    if let Some((_, _, open_at)) = open.last() {
        return Err(TreeError::UnbalancedBrackets { position: *open_at });
    }
    root.ok_or(TreeError::UnbalancedBrackets { position: text.len() })
}

/// Canonical single-line bracketing of a tree; inverse of [`parse_bracketed`]
/// up to whitespace.
pub fn emit_bracketed(tree: &ParseNode) -> String {
    tree.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_preterminal_tree() {
        let t = parse_bracketed("(NP (DT a) (NN copy))").unwrap();
        assert_eq!(t.label(), "NP");
        assert_eq!(t.children().len(), 2);
        assert!(t.children()[0].is_preterminal());
        assert_eq!(t.span().unwrap(), SpanInterval::new(0, 1));
        let tokens = t.tokens_with_pos();
        assert_eq!(tokens, vec![(0, "a", "DT"), (1, "copy", "NN")]);
    }

    #[test]
    fn parses_bare_word_constituents() {
        let t = parse_bracketed("(NP (NP a copy) (PP of (NP the statement)))").unwrap();
        assert_eq!(t.leaf_count(), 5);
        // Bare words report themselves as their part of speech.
        assert_eq!(t.tokens_with_pos()[0], (0, "a", "a"));
        assert_eq!(t.children()[1].span().unwrap(), SpanInterval::new(2, 4));
    }

    #[test]
    fn parses_conll_style_concatenation() {
        // No whitespace between an opening bracket and the next bracket.
        let t = parse_bracketed("(TOP(S(NP(DT a)(NN dog))(VP(VBZ barks))))").unwrap();
        assert_eq!(t.label(), "TOP");
        assert_eq!(t.leaf_count(), 3);
    }

    #[test]
    fn normalizes_functional_suffixes() {
        let t = parse_bracketed("(NP-SBJ-1 (NNP-HL Fred))").unwrap();
        assert_eq!(t.label(), "NP");
        assert_eq!(t.raw_label(), "NP-SBJ-1");
        assert_eq!(t.children()[0].label(), "NNP");
        assert_eq!(normalize_label("NP=2"), "NP");
        assert_eq!(normalize_label("-LRB-"), "-LRB-");
        assert_eq!(normalize_label("-NONE-"), "-NONE-");
    }

    #[test]
    fn keeps_bracket_escape_tokens() {
        let t = parse_bracketed("(NP (-LRB- -LRB-) (NN word) (-RRB- -RRB-))").unwrap();
        let tokens = t.tokens_with_pos();
        assert_eq!(tokens[0], (0, "-LRB-", "-LRB-"));
        assert_eq!(tokens[2], (2, "-RRB-", "-RRB-"));
    }

    #[test]
    fn rejects_unbalanced_input() {
        assert_eq!(
            parse_bracketed("(NP (DT a)"),
            Err(TreeError::UnbalancedBrackets { position: 0 })
        );
        assert_eq!(
            parse_bracketed("(NP a))"),
            Err(TreeError::TrailingGarbage { position: 6 })
        );
        assert_eq!(
            parse_bracketed("   "),
            Err(TreeError::UnbalancedBrackets { position: 3 })
        );
    }

    #[test]
    fn rejects_empty_constituents() {
        assert_eq!(
            parse_bracketed("( )"),
            Err(TreeError::EmptyConstituent { position: 0 })
        );
        assert_eq!(
            parse_bracketed("(NP (DT) a)"),
            Err(TreeError::EmptyConstituent { position: 4 })
        );
    }

    #[test]
    fn rejects_trailing_garbage() {
        assert_eq!(
            parse_bracketed("(NP a) extra"),
            Err(TreeError::TrailingGarbage { position: 7 })
        );
        assert_eq!(
            parse_bracketed("stray (NP a)"),
            Err(TreeError::TrailingGarbage { position: 0 })
        );
    }

    #[test]
    fn emit_round_trips() {
        for text in [
            "(NP (DT a) (NN copy))",
            "(NP (NP Shantou's) new (NML (NML (NML high level) technology) development) zone)",
            "(TOP (S (NP-SBJ (PRP it)) (VP (VBZ works))))",
        ] {
            let t = parse_bracketed(text).unwrap();
            let emitted = emit_bracketed(&t);
            assert_eq!(parse_bracketed(&emitted).unwrap(), t);
        }
    }

    #[test]
    fn round_trips_random_trees() {
        // Deterministic linear congruential sequence; no RNG dependency here.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move |bound: usize| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) as usize) % bound
        };
        let labels = ["NP", "VP", "PP", "NML", "S", "NP-SBJ", "QP"];
        let words = ["alpha", "beta", "gamma", "delta", ",", "of"];
        for _ in 0..200 {
            let mut index = 0usize;
            let tree = build_random(&mut next, &labels, &words, &mut index, 4);
            let emitted = emit_bracketed(&tree);
            assert_eq!(parse_bracketed(&emitted).unwrap(), tree);
        }
    }

    fn build_random(
        next: &mut impl FnMut(usize) -> usize,
        labels: &[&str],
        words: &[&str],
        index: &mut usize,
        depth_left: usize,
    ) -> ParseNode {
        let n_children = 1 + next(3);
        let children = (0..n_children)
            .map(|_| {
                if depth_left == 0 || next(3) == 0 {
                    let leaf = ParseNode::leaf(words[next(words.len())], *index);
                    *index += 1;
                    leaf
                } else {
                    build_random(next, labels, words, index, depth_left - 1)
                }
            })
            .collect();
        ParseNode::internal(labels[next(labels.len())], children)
    }

    #[test]
    fn survives_deep_nesting() {
        let mut text = String::new();
        for _ in 0..1000 {
            text.push_str("(NP ");
        }
        text.push_str("(NN core)");
        text.push_str(&")".repeat(1000));
        let tree = parse_bracketed(&text).unwrap();
        assert_eq!(tree.leaf_count(), 1);
        let emitted = emit_bracketed(&tree);
        assert_eq!(parse_bracketed(&emitted).unwrap(), tree);
    }

    #[test]
    fn span_of_childless_internal_node_is_an_error() {
        // Constructed by hand; the parser never yields this shape.
        let node = ParseNode::Internal {
            label: "NP".into(),
            raw_label: "NP".into(),
            children: vec![],
        };
        assert_eq!(node.span(), Err(TreeError::EmptyTree));
    }

    #[test]
    fn span_interval_parses_and_prints() {
        let span: SpanInterval = "4-6".parse().unwrap();
        assert_eq!(span, SpanInterval::new(4, 6));
        assert_eq!(span.to_string(), "4-6");
        assert_eq!(span.len(), 3);
        assert!(span.contains(&SpanInterval::new(5, 6)));
        assert!(!span.overlaps(&SpanInterval::new(7, 9)));
        assert!("6-4".parse::<SpanInterval>().is_err());
        assert!("x-4".parse::<SpanInterval>().is_err());
    }
}
