//! Minimum-span extraction from mention parse trees.
//!
//! A mention's maximum span is the full token interval it was annotated
//! with. Its minimum span is the smallest set of tokens that still
//! identifies the mention: the content of the shallowest acceptable units of
//! its parse subtree. Extraction walks the mention tree breadth-first,
//! keeps to noun-phrase-like (or verb-phrase-like) constituents, and emits
//! the units closest to the root, measured at the token level.
//!
//! Units come in two shapes. A constituent whose children are all words or
//! part-of-speech nodes is a unit as a whole and is never split further. A
//! bare word or part-of-speech child sitting directly under a larger
//! acceptable constituent is a unit on its own. A unit only counts when it
//! contains at least one token whose tag is outside the excluded set
//! (determiners, conjunctions, and punctuation by default), so a lone
//! determiner or comma can never become a minimum span.
//!
//! When the mention's root is neither noun- nor verb-phrase-like (including
//! the synthetic `X` root built for non-constituent spans), the tag family
//! is adopted from the first phrase-like node in breadth-first order. When
//! no unit qualifies at all, extraction falls back to the complete token
//! set of the mention and says so.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::conll::{Document, Mention};
use crate::treebank::{ParseNode, SpanInterval};

/// Errors from span extraction.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinaError {
    #[error("span {span} exceeds the sentence's {sentence_len} tokens")]
    SpanOutOfBounds { span: SpanInterval, sentence_len: usize },
    #[error(
        "mention {doc_id} part {part} sentence {sentence} span {span} exceeds the sentence's {sentence_len} tokens"
    )]
    MentionOutOfBounds {
        doc_id: String,
        part: u32,
        sentence: usize,
        span: SpanInterval,
        sentence_len: usize,
    },
    #[error(
        "document {doc_id} part {part} sentence {sentence} has no parse tree; tree-based modes need parsed key input"
    )]
    MissingParse { doc_id: String, part: u32, sentence: usize },
}

/// Which constituent tags extraction may enter, and which token tags never
/// count as content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagPolicy {
    /// Tags treated as noun-phrase-like.
    pub np_tags: BTreeSet<String>,
    /// Tags treated as verb-phrase-like.
    pub vp_tags: BTreeSet<String>,
    /// Token tags that never carry a unit on their own.
    pub excluded_pos: BTreeSet<String>,
}

fn tag_set(tags: &[&str]) -> BTreeSet<String> {
    tags.iter().map(|t| t.to_string()).collect()
}

impl Default for TagPolicy {
    /// Noun family NP/NML/QP/NX, verb family VP; excludes determiners,
    /// conjunctions, and punctuation tags.
    fn default() -> Self {
        TagPolicy {
            np_tags: tag_set(&["NP", "NML", "QP", "NX"]),
            vp_tags: tag_set(&["VP"]),
            excluded_pos: tag_set(&[
                "DT", "CC", ",", ".", ":", "``", "''", "-LRB-", "-RRB-", "HYPH",
            ]),
        }
    }
}

impl TagPolicy {
    /// Excludes only determiners and conjunctions, leaving punctuation
    /// tokens eligible as unit content.
    pub fn strict_paper() -> Self {
        TagPolicy {
            excluded_pos: tag_set(&["DT", "CC"]),
            ..TagPolicy::default()
        }
    }

    fn family_of(&self, label: &str) -> Option<&BTreeSet<String>> {
        if self.np_tags.contains(label) {
            Some(&self.np_tags)
        } else if self.vp_tags.contains(label) {
            Some(&self.vp_tags)
        } else {
            None
        }
    }
}

/// Result of extracting one mention's minimum span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinSpanResult {
    /// Token indices of the minimum span, sentence-level, ascending.
    pub token_indices: BTreeSet<usize>,
    /// True when no acceptable unit existed and the maximum span was kept.
    pub used_fallback: bool,
    /// Emitted units as (label, covered interval), left to right. Empty on
    /// fallback.
    pub units: Vec<(String, SpanInterval)>,
}

/// Cuts the subtree that covers exactly `span` out of a sentence tree.
///
/// When a single node covers the span, the highest such node is returned.
/// Otherwise the span crosses constituent boundaries and a synthetic `X`
/// root is built over the shallowest nodes that tile the span exactly, in
/// surface order. Token indices keep their sentence-level values either
/// way.
pub fn mention_subtree(tree: &ParseNode, span: SpanInterval) -> Result<ParseNode, MinaError> {
    let tree_span = tree.span().map_err(|_| MinaError::SpanOutOfBounds {
        span,
        sentence_len: 0,
    })?;
    if !tree_span.contains(&span) {
        return Err(MinaError::SpanOutOfBounds {
            span,
            sentence_len: tree_span.end + 1,
        });
    }

    // Descend while some node covers the span exactly or some child still
    // contains all of it; the first exact cover found from the top is the
    // highest one.
    let mut node = tree;
    loop {
        let node_span = node.span().expect("nodes on the span path have tokens");
        if node_span == span {
            return Ok(node.clone());
        }
        match node
            .children()
            .iter()
            .find(|c| c.span().map(|s| s.contains(&span)).unwrap_or(false))
        {
            Some(child) => node = child,
            None => break,
        }
    }

    // No exact cover: tile the span with maximal fully-contained nodes.
    let mut tiles = Vec::new();
    let mut stack = vec![node];
    while let Some(n) = stack.pop() {
        let n_span = n.span().expect("span path nodes have tokens");
        if span.contains(&n_span) {
            tiles.push(n.clone());
        } else if span.overlaps(&n_span) {
            stack.extend(n.children().iter().rev());
        }
    }
    // A left-to-right stack visit appends left tiles first only when
    // children are pushed reversed, but the pops above interleave; restore
    // surface order explicitly.
    tiles.sort_by_key(|t| t.span().expect("tiles have tokens").start);
    Ok(ParseNode::internal("X", tiles))
}

/// One candidate unit found during the walk.
struct Candidate {
    label: String,
    span: SpanInterval,
    token_depth: usize,
    acceptable: bool,
    tokens: Vec<usize>,
}

/// Extracts the minimum span of a mention tree.
///
/// The walk adopts the noun or verb tag family from the root, or from the
/// first family-tagged node in breadth-first order when the root is
/// something else. Constituents outside the adopted family are opaque:
/// nothing beneath them is considered. Among the acceptable units found,
/// exactly those at the smallest token depth are emitted; their tokens form
/// the minimum span. With no acceptable unit the whole token set is
/// returned with `used_fallback` set.
pub fn extract_min_span(tree: &ParseNode, policy: &TagPolicy) -> MinSpanResult {
    let fallback = || MinSpanResult {
        token_indices: tree
            .leaves()
            .iter()
            .filter_map(|leaf| match leaf {
                ParseNode::Leaf { index, .. } => Some(*index),
                _ => None,
            })
            .collect(),
        used_fallback: true,
        units: Vec::new(),
    };

    // Adoption: the shallowest family-tagged node, leftmost on ties, names
    // the tag family. Leaves never carry constituent tags.
    let mut queue: VecDeque<(&ParseNode, usize)> = VecDeque::new();
    queue.push_back((tree, 0));
    let mut adopted: Option<(&BTreeSet<String>, usize)> = None;
    while let Some((node, depth)) = queue.pop_front() {
        if node.is_leaf() {
            continue;
        }
        if let Some(family) = policy.family_of(node.label()) {
            adopted = Some((family, depth));
            break;
        }
        for child in node.children() {
            queue.push_back((child, depth + 1));
        }
    }
    let Some((family, entry_depth)) = adopted else {
        return fallback();
    };

    // Processing roots: every family-tagged node at the adoption depth.
    // All their ancestors are family-free, so each is a legitimate entry.
    let mut roots: Vec<&ParseNode> = Vec::new();
    let mut level: Vec<&ParseNode> = vec![tree];
    for _ in 0..entry_depth {
        level = level
            .iter()
            .flat_map(|n| n.children().iter())
            .filter(|n| !n.is_leaf())
            .collect();
    }
    for node in level {
        if family.contains(node.label()) {
            roots.push(node);
        }
    }

    let mut candidates: Vec<Candidate> = Vec::new();
    for root in roots {
        collect_units(root, entry_depth, family, policy, &mut candidates);
    }

    let min_depth = candidates
        .iter()
        .filter(|c| c.acceptable)
        .map(|c| c.token_depth)
        .min();
    let Some(min_depth) = min_depth else {
        return fallback();
    };

    let mut emitted: Vec<&Candidate> = candidates
        .iter()
        .filter(|c| c.acceptable && c.token_depth == min_depth)
        .collect();
    emitted.sort_by_key(|c| c.span);
    MinSpanResult {
        token_indices: emitted.iter().flat_map(|c| c.tokens.iter().copied()).collect(),
        used_fallback: false,
        units: emitted.iter().map(|c| (c.label.clone(), c.span)).collect(),
    }
}

/// Walks an in-family constituent, recording candidate units.
///
/// A constituent dominating only tokens is one unit and is not split. Other
/// constituents contribute each bare word or part-of-speech child as its
/// own unit and recurse into in-family constituent children only.
fn collect_units(
    root: &ParseNode,
    root_depth: usize,
    family: &BTreeSet<String>,
    policy: &TagPolicy,
    out: &mut Vec<Candidate>,
) {
    let mut stack: Vec<(&ParseNode, usize)> = vec![(root, root_depth)];
    while let Some((node, depth)) = stack.pop() {
        let children = node.children();
        if children.iter().all(|c| c.is_leaf() || c.is_preterminal()) {
            out.push(candidate_for(node, depth, policy));
            continue;
        }
        for child in children.iter().rev() {
            if child.is_leaf() || child.is_preterminal() {
                out.push(candidate_for(child, depth + 1, policy));
            } else if family.contains(child.label()) {
                stack.push((child, depth + 1));
            }
        }
    }
}

/// Part-of-speech tag implied by a bare function word in tag-free trees.
/// Only exact lowercase forms map; capitalized placeholder names stay
/// content words.
fn bare_tag(word: &str) -> Option<&'static str> {
    match word {
        "a" | "an" | "the" => Some("DT"),
        "and" | "or" | "but" | "nor" => Some("CC"),
        _ => None,
    }
}

/// True when the token may carry a unit. A token whose leaf has no
/// part-of-speech layer reports its own text as the tag; determiners and
/// conjunctions written as bare words still fall under the tag exclusion.
fn token_counts(word: &str, pos: &str, policy: &TagPolicy) -> bool {
    if policy.excluded_pos.contains(pos) {
        return false;
    }
    if pos == word {
        if let Some(tag) = bare_tag(word) {
            return !policy.excluded_pos.contains(tag);
        }
    }
    true
}

/// Describes `node` as a candidate unit rooted at `depth`.
fn candidate_for(node: &ParseNode, depth: usize, policy: &TagPolicy) -> Candidate {
    let tokens = node.tokens_with_pos();
    let token_depth = depth
        + match node {
            ParseNode::Leaf { .. } => 0,
            _ if node.is_preterminal() => 1,
            // Token depth beneath a mixed constituent is the shallowest
            // word: +1 past any bare word child, +2 otherwise.
            _ if node.children().iter().any(|c| c.is_leaf()) => 1,
            _ => 2,
        };
    Candidate {
        label: node.label().to_string(),
        span: node.span().expect("candidate units contain tokens"),
        token_depth,
        acceptable: tokens
            .iter()
            .any(|(_, word, pos)| token_counts(word, pos, policy)),
        tokens: tokens.iter().map(|(index, _, _)| *index).collect(),
    }
}

/// Minimum spans for every mention of a document, keyed by mention.
///
/// Every mentioned sentence must carry a parse tree and every span must fit
/// its sentence.
pub fn min_spans_for_document(
    doc: &Document,
    policy: &TagPolicy,
) -> Result<BTreeMap<Mention, MinSpanResult>, MinaError> {
    let mut out = BTreeMap::new();
    for mention in doc.mentions() {
        let sentence = &doc.sentences[mention.sentence_index];
        let sentence_len = sentence.tokens.len();
        if mention.span.end >= sentence_len {
            return Err(MinaError::MentionOutOfBounds {
                doc_id: mention.doc_id.clone(),
                part: mention.part,
                sentence: mention.sentence_index,
                span: mention.span,
                sentence_len,
            });
        }
        let tree = sentence.tree.as_ref().ok_or_else(|| MinaError::MissingParse {
            doc_id: doc.doc_id.clone(),
            part: doc.part,
            sentence: mention.sentence_index,
        })?;
        let subtree = mention_subtree(tree, mention.span)?;
        out.insert(mention.clone(), extract_min_span(&subtree, policy));
    }
    Ok(out)
}
