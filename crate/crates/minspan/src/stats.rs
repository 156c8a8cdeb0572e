//! Span-length, MIN-containment, and overlap-distinctness statistics.
//!
//! All statistics read the key corpus only. Documents are processed in
//! parallel and merged in file order, so repeated runs produce identical
//! reports.

use rayon::prelude::*;
use serde::Serialize;

use crate::conll::{Corpus, Document};
use crate::heads::{head_span, HeadTable};
use crate::mina::{mention_subtree, min_spans_for_document, MinaError, TagPolicy};
use crate::project::{MinSidecar, ProjectError};
use crate::treebank::SpanInterval;

/// Mention span lengths in words, for full spans and extracted minimum
/// spans. Histogram bins count lengths 1, 2, 3, and 4-or-more.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LengthStats {
    pub mention_count: u64,
    pub mean_max_len: f64,
    pub mean_min_len: f64,
    pub histogram_max: [u64; 4],
    pub histogram_min: [u64; 4],
    pub fallback_count: u64,
    pub warnings: Vec<String>,
}

fn bin(len: usize) -> usize {
    len.min(4) - 1
}

#[derive(Default)]
struct LengthTotals {
    count: u64,
    sum_max: u64,
    sum_min: u64,
    histogram_max: [u64; 4],
    histogram_min: [u64; 4],
    fallback_count: u64,
}

impl LengthTotals {
    fn add(&mut self, other: &LengthTotals) {
        self.count += other.count;
        self.sum_max += other.sum_max;
        self.sum_min += other.sum_min;
        for i in 0..4 {
            self.histogram_max[i] += other.histogram_max[i];
            self.histogram_min[i] += other.histogram_min[i];
        }
        self.fallback_count += other.fallback_count;
    }
}

/// Computes length statistics over every mention of the corpus.
pub fn length_stats(corpus: &Corpus, policy: &TagPolicy) -> Result<LengthStats, ProjectError> {
    let per_doc: Vec<LengthTotals> = corpus
        .documents
        .par_iter()
        .map(|doc| -> Result<LengthTotals, MinaError> {
            let spans = min_spans_for_document(doc, policy)?;
            let mut totals = LengthTotals::default();
            for (mention, result) in &spans {
                let max_len = mention.span.len();
                let min_len = result.token_indices.len();
                totals.count += 1;
                totals.sum_max += max_len as u64;
                totals.sum_min += min_len as u64;
                totals.histogram_max[bin(max_len)] += 1;
                totals.histogram_min[bin(min_len)] += 1;
                if result.used_fallback {
                    totals.fallback_count += 1;
                }
            }
            Ok(totals)
        })
        .collect::<Result<_, _>>()?;
    let mut totals = LengthTotals::default();
    for doc_totals in &per_doc {
        totals.add(doc_totals);
    }
    let mut warnings = Vec::new();
    let (mean_max_len, mean_min_len) = if totals.count == 0 {
        warnings.push("corpus contains no mentions; mean lengths reported as 0".to_string());
        (0.0, 0.0)
    } else {
        (
            totals.sum_max as f64 / totals.count as f64,
            totals.sum_min as f64 / totals.count as f64,
        )
    };
    Ok(LengthStats {
        mention_count: totals.count,
        mean_max_len,
        mean_min_len,
        histogram_max: totals.histogram_max,
        histogram_min: totals.histogram_min,
        fallback_count: totals.fallback_count,
        warnings,
    })
}

/// One mention whose extracted tokens do not cover its MIN annotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContainmentMismatch {
    /// Which extractor missed: "mina" or "head".
    pub extractor: String,
    pub doc_id: String,
    pub part: u32,
    pub sentence: usize,
    pub span: String,
    pub min_span: String,
    pub extracted: Vec<usize>,
}

/// How often extracted minimum spans and head words cover the annotated
/// MIN tokens. Mentions without a MIN annotation are excluded from the
/// denominator and reported as warnings.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ContainmentStats {
    pub evaluated: u64,
    pub excluded: u64,
    pub mina_contained: u64,
    pub head_contained: u64,
    pub mina_contains_min_ratio: f64,
    pub head_contains_min_ratio: f64,
    pub mismatches: Vec<ContainmentMismatch>,
    pub warnings: Vec<String>,
}

struct DocContainment {
    evaluated: u64,
    excluded: u64,
    mina_contained: u64,
    head_contained: u64,
    mismatches: Vec<ContainmentMismatch>,
    warnings: Vec<String>,
}

/// Checks every annotated MIN span against the extracted minimum span and
/// head word of its mention.
pub fn containment_stats(
    corpus: &Corpus,
    sidecar: &MinSidecar,
    policy: &TagPolicy,
    head_table: Option<&HeadTable>,
) -> Result<ContainmentStats, ProjectError> {
    let per_doc: Vec<DocContainment> = corpus
        .documents
        .par_iter()
        .map(|doc| contain_one_document(doc, sidecar, policy, head_table))
        .collect::<Result<_, _>>()?;
    let mut stats = ContainmentStats::default();
    for doc in per_doc {
        stats.evaluated += doc.evaluated;
        stats.excluded += doc.excluded;
        stats.mina_contained += doc.mina_contained;
        stats.head_contained += doc.head_contained;
        stats.mismatches.extend(doc.mismatches);
        stats.warnings.extend(doc.warnings);
    }
    if stats.evaluated == 0 {
        stats
            .warnings
            .push("no mentions with MIN annotations; containment ratios reported as 0".to_string());
    } else {
        stats.mina_contains_min_ratio =
            stats.mina_contained as f64 / stats.evaluated as f64 * 100.0;
        stats.head_contains_min_ratio =
            stats.head_contained as f64 / stats.evaluated as f64 * 100.0;
    }
    Ok(stats)
}

fn contain_one_document(
    doc: &Document,
    sidecar: &MinSidecar,
    policy: &TagPolicy,
    head_table: Option<&HeadTable>,
) -> Result<DocContainment, ProjectError> {
    let spans = min_spans_for_document(doc, policy)?;
    let mut out = DocContainment {
        evaluated: 0,
        excluded: 0,
        mina_contained: 0,
        head_contained: 0,
        mismatches: Vec::new(),
        warnings: Vec::new(),
    };
    for (mention, result) in &spans {
        let Some(min_span) = sidecar.lookup(mention) else {
            out.excluded += 1;
            out.warnings.push(format!(
                "no MIN annotation for mention {} part {} sentence {} span {}; excluded from containment",
                mention.doc_id, mention.part, mention.sentence_index, mention.span
            ));
            continue;
        };
        out.evaluated += 1;
        if min_span
            .indices()
            .all(|index| result.token_indices.contains(&index))
        {
            out.mina_contained += 1;
        } else {
            out.mismatches.push(ContainmentMismatch {
                extractor: "mina".to_string(),
                doc_id: mention.doc_id.clone(),
                part: mention.part,
                sentence: mention.sentence_index,
                span: mention.span.to_string(),
                min_span: min_span.to_string(),
                extracted: result.token_indices.iter().copied().collect(),
            });
        }
        let tree = doc.sentences[mention.sentence_index]
            .tree
            .as_ref()
            .ok_or(MinaError::MissingParse {
                doc_id: mention.doc_id.clone(),
                part: mention.part,
                sentence: mention.sentence_index,
            })?;
        let subtree = mention_subtree(tree, mention.span)?;
        let head = head_span(&subtree, policy, head_table)?;
        if min_span.len() == 1 && min_span.start == head.token_index {
            out.head_contained += 1;
        } else {
            out.mismatches.push(ContainmentMismatch {
                extractor: "head".to_string(),
                doc_id: mention.doc_id.clone(),
                part: mention.part,
                sentence: mention.sentence_index,
                span: mention.span.to_string(),
                min_span: min_span.to_string(),
                extracted: vec![head.token_index],
            });
        }
    }
    Ok(out)
}

/// A pair of distinct overlapping mention spans that received the same
/// extracted identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct OverlapCollision {
    pub doc_id: String,
    pub part: u32,
    pub sentence: usize,
    pub span_a: String,
    pub span_b: String,
    pub tokens: Vec<usize>,
}

/// Identity collisions among overlapping mentions, per extractor.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DistinctnessReport {
    pub mina_violations: Vec<OverlapCollision>,
    pub head_violations: Vec<OverlapCollision>,
}

/// Finds pairs of distinct overlapping mention spans in the same sentence
/// whose minimum spans, or head words, coincide.
pub fn overlap_distinctness(
    corpus: &Corpus,
    policy: &TagPolicy,
    head_table: Option<&HeadTable>,
) -> Result<DistinctnessReport, ProjectError> {
    let per_doc: Vec<DistinctnessReport> = corpus
        .documents
        .par_iter()
        .map(|doc| distinctness_one_document(doc, policy, head_table))
        .collect::<Result<_, _>>()?;
    let mut report = DistinctnessReport::default();
    for doc in per_doc {
        report.mina_violations.extend(doc.mina_violations);
        report.head_violations.extend(doc.head_violations);
    }
    Ok(report)
}

fn distinctness_one_document(
    doc: &Document,
    policy: &TagPolicy,
    head_table: Option<&HeadTable>,
) -> Result<DistinctnessReport, ProjectError> {
    let min_spans = min_spans_for_document(doc, policy)?;
    // Unique spans per sentence, in order, with their extracted tokens.
    let mut by_sentence: std::collections::BTreeMap<usize, Vec<SpanInterval>> =
        std::collections::BTreeMap::new();
    let mut mina_map: std::collections::BTreeMap<(usize, SpanInterval), Vec<usize>> =
        std::collections::BTreeMap::new();
    for (mention, result) in &min_spans {
        let spans = by_sentence.entry(mention.sentence_index).or_default();
        if !spans.contains(&mention.span) {
            spans.push(mention.span);
        }
        mina_map.insert(
            (mention.sentence_index, mention.span),
            result.token_indices.iter().copied().collect(),
        );
    }
    let mina_of =
        |sentence: usize, span: SpanInterval| -> Vec<usize> { mina_map[&(sentence, span)].clone() };
    let mut report = DistinctnessReport::default();
    for (&sentence, spans) in &by_sentence {
        let tree = doc.sentences[sentence]
            .tree
            .as_ref()
            .ok_or(MinaError::MissingParse {
                doc_id: doc.doc_id.clone(),
                part: doc.part,
                sentence,
            })?;
        let mut heads = Vec::with_capacity(spans.len());
        for &span in spans.iter() {
            let subtree = mention_subtree(tree, span)?;
            heads.push(head_span(&subtree, policy, head_table)?.token_index);
        }
        for i in 0..spans.len() {
            for j in (i + 1)..spans.len() {
                let (a, b) = if spans[i] <= spans[j] {
                    (spans[i], spans[j])
                } else {
                    (spans[j], spans[i])
                };
                if !a.overlaps(&b) {
                    continue;
                }
                let mina_a = mina_of(sentence, a);
                let mina_b = mina_of(sentence, b);
                if mina_a == mina_b {
                    report.mina_violations.push(OverlapCollision {
                        doc_id: doc.doc_id.clone(),
                        part: doc.part,
                        sentence,
                        span_a: a.to_string(),
                        span_b: b.to_string(),
                        tokens: mina_a,
                    });
                }
                let (head_i, head_j) = (heads[i], heads[j]);
                if head_i == head_j {
                    report.head_violations.push(OverlapCollision {
                        doc_id: doc.doc_id.clone(),
                        part: doc.part,
                        sentence,
                        span_a: a.to_string(),
                        span_b: b.to_string(),
                        tokens: vec![head_i],
                    });
                }
            }
        }
    }
    report.mina_violations.sort();
    report.head_violations.sort();
    Ok(report)
}
