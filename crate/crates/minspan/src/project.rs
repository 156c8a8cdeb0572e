//! Projection of mentions onto canonical identities under a matching mode.
//!
//! Scoring never compares raw spans across files. Each mention is first
//! replaced by a [`SpanIdentity`]: the full token interval (max mode), the
//! extracted minimum span (min mode), the selected head token (head mode),
//! or the annotated MIN tokens with containment matching (MIN mode).
//! System mentions are always projected through the key file's parse
//! trees, so a response never needs trees of its own.
//!
//! Projection can be lossy. Two distinct mentions of one side may land on
//! one identity; the resolution rules are documented on
//! [`project_corpus`].

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::conll::{Corpus, Document, Mention};
use crate::heads::{head_span, HeadError, HeadTable};
use crate::metrics::EntitySet;
use crate::mina::{extract_min_span, mention_subtree, MinaError, TagPolicy};
use crate::treebank::{ParseNode, SpanInterval};

/// How mentions from the two sides are considered equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MatchingMode {
    /// Full annotated spans must be identical.
    MaxSpan,
    /// Extracted minimum spans must be identical.
    MinaSpan,
    /// Selected head tokens must be identical.
    HeadWord,
    /// A system span matches a key mention when it contains the key's MIN
    /// tokens and stays inside the key's full span.
    MucMin,
}

impl MatchingMode {
    pub const ALL: [MatchingMode; 4] = [
        MatchingMode::MaxSpan,
        MatchingMode::MinaSpan,
        MatchingMode::HeadWord,
        MatchingMode::MucMin,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MatchingMode::MaxSpan => "max",
            MatchingMode::MinaSpan => "mina",
            MatchingMode::HeadWord => "head",
            MatchingMode::MucMin => "mucmin",
        }
    }
}

impl FromStr for MatchingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "max" => Ok(MatchingMode::MaxSpan),
            "mina" => Ok(MatchingMode::MinaSpan),
            "head" => Ok(MatchingMode::HeadWord),
            "mucmin" => Ok(MatchingMode::MucMin),
            other => Err(format!(
                "unknown matching mode {other:?}; expected max, mina, head, or mucmin"
            )),
        }
    }
}

/// Canonical equality key for one mention under one matching mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpanIdentity {
    pub doc_id: String,
    pub part: u32,
    pub sentence_index: usize,
    /// Ascending, nonempty token indices.
    pub tokens: Vec<usize>,
}

/// MIN annotations keyed by the mention they belong to.
#[derive(Debug, Clone, Default)]
pub struct MinSidecar {
    entries: BTreeMap<(String, u32, usize, SpanInterval), SpanInterval>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SidecarError {
    #[error(
        "line {line}: expected 5 tab-separated fields: doc_id, part, sentence, max START-END, min START-END"
    )]
    Malformed { line: usize },
    #[error("line {line}: {detail}")]
    BadField { line: usize, detail: String },
    #[error("line {line}: MIN span {min} is not contained in the full span {max}")]
    MinOutsideMax {
        line: usize,
        min: SpanInterval,
        max: SpanInterval,
    },
    #[error("line {line}: duplicate MIN entry for one mention")]
    Duplicate { line: usize },
}

impl MinSidecar {
    /// Parses tab-separated lines `doc_id part sentence max min` where both
    /// spans are inclusive `START-END` token intervals. Blank lines and `#`
    /// comments are skipped.
    pub fn parse(text: &str) -> Result<MinSidecar, SidecarError> {
        let mut entries = BTreeMap::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() != 5 {
                return Err(SidecarError::Malformed { line });
            }
            let bad = |detail: String| SidecarError::BadField { line, detail };
            let part: u32 = fields[1]
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad part number {:?}", fields[1])))?;
            let sentence: usize = fields[2]
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad sentence index {:?}", fields[2])))?;
            let max: SpanInterval = fields[3].trim().parse().map_err(bad)?;
            let min: SpanInterval = fields[4].trim().parse().map_err(bad)?;
            if !max.contains(&min) {
                return Err(SidecarError::MinOutsideMax { line, min, max });
            }
            let key = (fields[0].trim().to_string(), part, sentence, max);
            if entries.insert(key, min).is_some() {
                return Err(SidecarError::Duplicate { line });
            }
        }
        Ok(MinSidecar { entries })
    }

    pub fn lookup(&self, mention: &Mention) -> Option<SpanInterval> {
        self.entries
            .get(&(
                mention.doc_id.clone(),
                mention.part,
                mention.sentence_index,
                mention.span,
            ))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error(
        "document parts differ between the files:{}",
        format_mismatch(.missing_in_key, .missing_in_response)
    )]
    DocumentSetMismatch {
        missing_in_key: Vec<String>,
        missing_in_response: Vec<String>,
    },
    #[error("tokenization differs in {doc_id} part {part}: {detail}")]
    TokenizationMismatch {
        doc_id: String,
        part: u32,
        detail: String,
    },
    #[error(
        "no MIN annotation for key mention {doc_id} part {part} sentence {sentence} span {span}"
    )]
    MinAnnotationMissing {
        doc_id: String,
        part: u32,
        sentence: usize,
        span: SpanInterval,
    },
    #[error("MIN-containment matching needs a MIN sidecar file")]
    SidecarRequired,
    #[error(transparent)]
    Extraction(#[from] MinaError),
    #[error(transparent)]
    Head(#[from] HeadError),
    #[error(transparent)]
    Sidecar(#[from] SidecarError),
}

fn format_mismatch(missing_in_key: &[String], missing_in_response: &[String]) -> String {
    let mut out = String::new();
    if !missing_in_key.is_empty() {
        out.push_str(&format!(" only in response: {}.", missing_in_key.join(", ")));
    }
    if !missing_in_response.is_empty() {
        out.push_str(&format!(" only in key: {}.", missing_in_response.join(", ")));
    }
    out
}

/// Knobs for one projection run.
#[derive(Clone, Copy)]
pub struct ProjectOptions<'a> {
    pub mode: MatchingMode,
    pub policy: &'a TagPolicy,
    pub head_table: Option<&'a HeadTable>,
    pub sidecar: Option<&'a MinSidecar>,
}

/// Projected identities for one `(doc_id, part)` pair.
#[derive(Debug)]
pub struct ProjectedPart {
    pub doc_id: String,
    pub part: u32,
    pub key: EntitySet<SpanIdentity>,
    pub resp: EntitySet<SpanIdentity>,
    /// Key mentions with their final identity; `None` means the mention
    /// was dropped by collision resolution.
    pub key_identities: Vec<(Mention, Option<SpanIdentity>)>,
    pub resp_identities: Vec<(Mention, Option<SpanIdentity>)>,
    pub warnings: Vec<String>,
}

/// Projects both corpora under one mode, one result per document part,
/// ordered by `(doc_id, part)`.
///
/// Both files must contain the same document parts with identical
/// tokenization. Within each side, mentions of one entity that project to
/// one identity are merged; when mentions of different entities collide,
/// every collided mention reverts to its full-span identity, and a mention
/// whose reverted identity still belongs to an earlier entity is dropped.
/// Each merge, reversion, and drop is reported as a warning.
pub fn project_corpus(
    key: &Corpus,
    resp: &Corpus,
    opts: ProjectOptions<'_>,
) -> Result<Vec<ProjectedPart>, ProjectError> {
    let key_parts: BTreeMap<(&str, u32), &Document> = key
        .documents
        .iter()
        .map(|d| ((d.doc_id.as_str(), d.part), d))
        .collect();
    let resp_parts: BTreeMap<(&str, u32), &Document> = resp
        .documents
        .iter()
        .map(|d| ((d.doc_id.as_str(), d.part), d))
        .collect();
    let describe = |(id, part): &(&str, u32)| format!("{id} part {part}");
    let missing_in_key: Vec<String> = resp_parts
        .keys()
        .filter(|k| !key_parts.contains_key(*k))
        .map(describe)
        .collect();
    let missing_in_response: Vec<String> = key_parts
        .keys()
        .filter(|k| !resp_parts.contains_key(*k))
        .map(describe)
        .collect();
    if !missing_in_key.is_empty() || !missing_in_response.is_empty() {
        return Err(ProjectError::DocumentSetMismatch {
            missing_in_key,
            missing_in_response,
        });
    }
    let pairs: Vec<(&Document, &Document)> = key_parts
        .iter()
        .map(|(k, kd)| (*kd, resp_parts[k]))
        .collect();
    pairs
        .into_par_iter()
        .map(|(kd, rd)| project_part(kd, rd, opts))
        .collect()
}

fn check_tokenization(kd: &Document, rd: &Document) -> Result<(), ProjectError> {
    let mismatch = |detail: String| ProjectError::TokenizationMismatch {
        doc_id: kd.doc_id.clone(),
        part: kd.part,
        detail,
    };
    if kd.sentences.len() != rd.sentences.len() {
        return Err(mismatch(format!(
            "key has {} sentences, response has {}",
            kd.sentences.len(),
            rd.sentences.len()
        )));
    }
    for (index, (ks, rs)) in kd.sentences.iter().zip(&rd.sentences).enumerate() {
        if ks.tokens.len() != rs.tokens.len() {
            return Err(mismatch(format!(
                "sentence {index}: key has {} tokens, response has {}",
                ks.tokens.len(),
                rs.tokens.len()
            )));
        }
        for (kt, rt) in ks.tokens.iter().zip(&rs.tokens) {
            if kt.word != rt.word {
                return Err(mismatch(format!(
                    "sentence {index} token {}: key word {:?}, response word {:?}",
                    kt.token_index, kt.word, rt.word
                )));
            }
        }
    }
    Ok(())
}

fn project_part(
    kd: &Document,
    rd: &Document,
    opts: ProjectOptions<'_>,
) -> Result<ProjectedPart, ProjectError> {
    check_tokenization(kd, rd)?;
    let key_mentions: Vec<Mention> = kd.mentions().into_iter().cloned().collect();
    let resp_mentions: Vec<Mention> = rd.mentions().into_iter().cloned().collect();
    let (key_raw, resp_raw) = match opts.mode {
        MatchingMode::MaxSpan => (
            key_mentions.iter().map(max_tokens).collect::<Vec<_>>(),
            resp_mentions.iter().map(max_tokens).collect::<Vec<_>>(),
        ),
        MatchingMode::MinaSpan => (
            projected_tokens(kd, &key_mentions, opts, mina_tokens)?,
            projected_tokens(kd, &resp_mentions, opts, mina_tokens)?,
        ),
        MatchingMode::HeadWord => (
            projected_tokens(kd, &key_mentions, opts, head_tokens)?,
            projected_tokens(kd, &resp_mentions, opts, head_tokens)?,
        ),
        MatchingMode::MucMin => {
            let sidecar = opts.sidecar.ok_or(ProjectError::SidecarRequired)?;
            let key_min: Vec<SpanInterval> = key_mentions
                .iter()
                .map(|m| {
                    sidecar
                        .lookup(m)
                        .ok_or_else(|| ProjectError::MinAnnotationMissing {
                            doc_id: m.doc_id.clone(),
                            part: m.part,
                            sentence: m.sentence_index,
                            span: m.span,
                        })
                })
                .collect::<Result<_, _>>()?;
            let key_raw: Vec<Vec<usize>> =
                key_min.iter().map(|min| min.indices().collect()).collect();
            let resp_raw = resp_mentions
                .iter()
                .map(|s| min_containment_tokens(s, &key_mentions, &key_min))
                .collect();
            (key_raw, resp_raw)
        }
    };
    let mut warnings = Vec::new();
    let (key_identities, key_set) =
        resolve_side("key", kd, key_mentions, key_raw, opts.mode, &mut warnings);
    let (resp_identities, resp_set) = resolve_side(
        "response",
        kd,
        resp_mentions,
        resp_raw,
        opts.mode,
        &mut warnings,
    );
    Ok(ProjectedPart {
        doc_id: kd.doc_id.clone(),
        part: kd.part,
        key: key_set,
        resp: resp_set,
        key_identities,
        resp_identities,
        warnings,
    })
}

fn max_tokens(m: &Mention) -> Vec<usize> {
    m.span.indices().collect()
}

fn projected_tokens(
    kd: &Document,
    mentions: &[Mention],
    opts: ProjectOptions<'_>,
    project: fn(&Document, &Mention, ProjectOptions<'_>) -> Result<Vec<usize>, ProjectError>,
) -> Result<Vec<Vec<usize>>, ProjectError> {
    mentions.iter().map(|m| project(kd, m, opts)).collect()
}

/// Extracts the minimum span of one mention against the key parse tree.
fn mina_tokens(
    kd: &Document,
    m: &Mention,
    opts: ProjectOptions<'_>,
) -> Result<Vec<usize>, ProjectError> {
    let tree = sentence_tree(kd, m)?;
    let subtree = mention_subtree(tree, m.span).map_err(|e| widen_bounds(kd, m, e))?;
    let result = extract_min_span(&subtree, opts.policy);
    Ok(result.token_indices.into_iter().collect())
}

/// Selects the head token of one mention against the key parse tree.
fn head_tokens(
    kd: &Document,
    m: &Mention,
    opts: ProjectOptions<'_>,
) -> Result<Vec<usize>, ProjectError> {
    let tree = sentence_tree(kd, m)?;
    let subtree = mention_subtree(tree, m.span).map_err(|e| widen_bounds(kd, m, e))?;
    let head = head_span(&subtree, opts.policy, opts.head_table)?;
    Ok(vec![head.token_index])
}

fn sentence_tree<'a>(kd: &'a Document, m: &Mention) -> Result<&'a ParseNode, ProjectError> {
    kd.sentences[m.sentence_index]
        .tree
        .as_ref()
        .ok_or(ProjectError::Extraction(MinaError::MissingParse {
            doc_id: kd.doc_id.clone(),
            part: kd.part,
            sentence: m.sentence_index,
        }))
}

fn widen_bounds(kd: &Document, m: &Mention, err: MinaError) -> ProjectError {
    let widened = match err {
        MinaError::SpanOutOfBounds { span, sentence_len } => MinaError::MentionOutOfBounds {
            doc_id: kd.doc_id.clone(),
            part: kd.part,
            sentence: m.sentence_index,
            span,
            sentence_len,
        },
        other => other,
    };
    ProjectError::Extraction(widened)
}

/// Matches a system span against key mentions by MIN containment: the key
/// MIN must fit inside the system span, and the system span inside the
/// key's full span. Among several matching key mentions the one with the
/// smallest full span wins, then the smallest MIN, then textual order. An
/// unmatched system span keeps its own tokens.
fn min_containment_tokens(
    sys: &Mention,
    key_mentions: &[Mention],
    key_min: &[SpanInterval],
) -> Vec<usize> {
    let best = key_mentions
        .iter()
        .zip(key_min)
        .filter(|(k, min)| {
            k.sentence_index == sys.sentence_index
                && k.span.contains(&sys.span)
                && sys.span.contains(min)
        })
        .min_by_key(|(k, min)| (k.span.len(), min.len(), k.span.start, k.span.end));
    match best {
        Some((_, min)) => min.indices().collect(),
        None => sys.span.indices().collect(),
    }
}

/// Local identity key during collision handling.
type LocalId = (usize, Vec<usize>);

/// Applies collision resolution to one side and groups the surviving
/// identities by entity.
fn resolve_side(
    side: &str,
    kd: &Document,
    mentions: Vec<Mention>,
    raw: Vec<Vec<usize>>,
    mode: MatchingMode,
    warnings: &mut Vec<String>,
) -> (Vec<(Mention, Option<SpanIdentity>)>, EntitySet<SpanIdentity>) {
    let context = format!("{} part {}", kd.doc_id, kd.part);
    let mut ids: Vec<LocalId> = mentions
        .iter()
        .zip(&raw)
        .map(|(m, tokens)| (m.sentence_index, tokens.clone()))
        .collect();
    // Cross-entity collisions revert every collided mention to its full
    // span; the full spans of distinct mentions are distinct unless the
    // input itself repeats a span across entities.
    if mode != MatchingMode::MaxSpan {
        let mut entities_of: BTreeMap<LocalId, BTreeSet<u32>> = BTreeMap::new();
        for (m, id) in mentions.iter().zip(&ids) {
            entities_of.entry(id.clone()).or_default().insert(m.entity);
        }
        for (id, entities) in entities_of.iter().filter(|(_, e)| e.len() > 1) {
            warnings.push(format!(
                "{side} side {context} sentence {}: {} identity over tokens {:?} is shared by entities {:?}; collided mentions revert to their full spans",
                id.0,
                mode.name(),
                id.1,
                entities.iter().collect::<Vec<_>>(),
            ));
        }
        for (m, id) in mentions.iter().zip(ids.iter_mut()) {
            if entities_of[id].len() > 1 {
                *id = (m.sentence_index, max_tokens(m));
            }
        }
    }
    // Remaining duplicates either merge inside one entity (with a warning,
    // since scores change) or, across entities, drop every mention after
    // the first.
    let mut owner: BTreeMap<LocalId, (u32, SpanInterval)> = BTreeMap::new();
    let mut kept: Vec<(Mention, Option<SpanIdentity>)> = Vec::with_capacity(mentions.len());
    let mut entities: BTreeMap<u32, BTreeSet<SpanIdentity>> = BTreeMap::new();
    for (m, id) in mentions.iter().zip(&ids) {
        let identity = SpanIdentity {
            doc_id: m.doc_id.clone(),
            part: m.part,
            sentence_index: id.0,
            tokens: id.1.clone(),
        };
        match owner.get(id) {
            None => {
                owner.insert(id.clone(), (m.entity, m.span));
                entities
                    .entry(m.entity)
                    .or_default()
                    .insert(identity.clone());
                kept.push((m.clone(), Some(identity)));
            }
            Some(&(entity, first_span)) if entity == m.entity => {
                warnings.push(format!(
                    "{side} side {context} sentence {}: spans {} and {} share one {} identity inside entity {}; mentions merged",
                    id.0,
                    first_span,
                    m.span,
                    mode.name(),
                    entity,
                ));
                kept.push((m.clone(), Some(identity)));
            }
            Some(&(entity, _)) => {
                warnings.push(format!(
                    "{side} side {context} sentence {}: full span {} of entity {} still collides with entity {} after reverting; mention dropped",
                    id.0, m.span, m.entity, entity,
                ));
                kept.push((m.clone(), None));
            }
        }
    }
    let set: EntitySet<SpanIdentity> = entities.into_values().collect();
    (kept, set)
}
