//! Corpus-level score reports and boundary comparison.
//!
//! Counts are accumulated per document part in `(doc_id, part)` order and
//! summed before the final division, so corpus scores are ratio-of-sums,
//! not averages of per-part scores. All reported values are percentages
//! rounded half-up to two decimals.

use serde::Serialize;

use crate::conll::Corpus;
use crate::heads::HeadTable;
use crate::metrics::{b3_counts, ceafe_counts, lea_counts, muc_counts, MetricCounts};
use crate::mina::TagPolicy;
use crate::project::{
    project_corpus, MatchingMode, MinSidecar, ProjectError, ProjectOptions, ProjectedPart,
};

/// Rounds to two decimals, half-up.
pub fn round2(x: f64) -> f64 {
    (x * 100.0 + 0.5).floor() / 100.0
}

/// One metric's rounded percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricScores {
    #[serde(rename = "r")]
    pub recall: f64,
    #[serde(rename = "p")]
    pub precision: f64,
    #[serde(rename = "f1")]
    pub f1: f64,
}

/// All four metrics for one scoring unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricBlock {
    pub muc: MetricScores,
    pub b3: MetricScores,
    pub ceafe: MetricScores,
    pub lea: MetricScores,
}

/// Scores of one document part, reported behind the per-document flag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DocumentScores {
    pub doc_id: String,
    pub part: u32,
    pub metrics: MetricBlock,
    pub conll_avg: f64,
}

/// One matching mode's corpus-level report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub mode: String,
    pub metrics: MetricBlock,
    /// Mean of the MUC, B-cubed, and CEAF F1 values.
    pub conll_avg: f64,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub documents: Option<Vec<DocumentScores>>,
}

/// Knobs for one scoring run.
pub struct ScoreOptions<'a> {
    pub modes: &'a [MatchingMode],
    pub policy: &'a TagPolicy,
    pub head_table: Option<&'a HeadTable>,
    pub sidecar: Option<&'a MinSidecar>,
    pub per_document: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct CountsBundle {
    muc: MetricCounts,
    b3: MetricCounts,
    ceafe: MetricCounts,
    lea: MetricCounts,
}

impl CountsBundle {
    fn from_part(part: &ProjectedPart) -> CountsBundle {
        CountsBundle {
            muc: muc_counts(&part.key, &part.resp),
            b3: b3_counts(&part.key, &part.resp),
            ceafe: ceafe_counts(&part.key, &part.resp),
            lea: lea_counts(&part.key, &part.resp),
        }
    }

    fn add(&mut self, other: &CountsBundle) {
        self.muc.add(&other.muc);
        self.b3.add(&other.b3);
        self.ceafe.add(&other.ceafe);
        self.lea.add(&other.lea);
    }

    fn block(&self) -> MetricBlock {
        let rounded = |c: &MetricCounts| {
            let s = c.scores();
            MetricScores {
                recall: round2(s.recall),
                precision: round2(s.precision),
                f1: round2(s.f1),
            }
        };
        MetricBlock {
            muc: rounded(&self.muc),
            b3: rounded(&self.b3),
            ceafe: rounded(&self.ceafe),
            lea: rounded(&self.lea),
        }
    }

    /// The average is taken over unrounded F1 values, then rounded once.
    fn conll_avg(&self) -> f64 {
        round2((self.muc.f1() + self.b3.f1() + self.ceafe.f1()) / 3.0 * 100.0)
    }
}

/// Scores the response against the key under every requested mode.
pub fn score_corpora(
    key: &Corpus,
    resp: &Corpus,
    opts: &ScoreOptions<'_>,
) -> Result<Vec<ScoreReport>, ProjectError> {
    opts.modes
        .iter()
        .map(|&mode| score_one_mode(key, resp, mode, opts))
        .collect()
}

fn score_one_mode(
    key: &Corpus,
    resp: &Corpus,
    mode: MatchingMode,
    opts: &ScoreOptions<'_>,
) -> Result<ScoreReport, ProjectError> {
    let parts = project_corpus(
        key,
        resp,
        ProjectOptions {
            mode,
            policy: opts.policy,
            head_table: opts.head_table,
            sidecar: opts.sidecar,
        },
    )?;
    let mut total = CountsBundle::default();
    let mut warnings = Vec::new();
    let mut documents = Vec::new();
    for part in &parts {
        let counts = CountsBundle::from_part(part);
        total.add(&counts);
        warnings.extend(part.warnings.iter().cloned());
        if opts.per_document {
            documents.push(DocumentScores {
                doc_id: part.doc_id.clone(),
                part: part.part,
                metrics: counts.block(),
                conll_avg: counts.conll_avg(),
            });
        }
    }
    Ok(ScoreReport {
        mode: mode.name().to_string(),
        metrics: total.block(),
        conll_avg: total.conll_avg(),
        warnings,
        documents: opts.per_document.then_some(documents),
    })
}

/// One (key, system) mention pair with one minimum span but two different
/// full spans.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BoundaryMismatch {
    pub doc_id: String,
    pub part: u32,
    pub sentence: usize,
    pub key_span: String,
    pub key_text: String,
    pub sys_span: String,
    pub sys_text: String,
}

/// Lists every (key, system) mention pair whose extracted minimum spans
/// are equal while the full spans differ. Pairs are reported once, in
/// `(doc_id, part, sentence, key span, system span)` order, with the
/// surface words of both spans.
pub fn compare_boundaries(
    key: &Corpus,
    resp: &Corpus,
    policy: &TagPolicy,
) -> Result<Vec<BoundaryMismatch>, ProjectError> {
    let parts = project_corpus(
        key,
        resp,
        ProjectOptions {
            mode: MatchingMode::MinaSpan,
            policy,
            head_table: None,
            sidecar: None,
        },
    )?;
    // Raw extraction drives the comparison: identity reversion exists to
    // keep scoring well-defined and would hide genuine same-minimum pairs
    // here, so spans are re-projected without collision handling.
    let key_docs: std::collections::BTreeMap<(&str, u32), &crate::conll::Document> = key
        .documents
        .iter()
        .map(|d| ((d.doc_id.as_str(), d.part), d))
        .collect();
    let mut rows = std::collections::BTreeSet::new();
    for part in &parts {
        let kd = key_docs[&(part.doc_id.as_str(), part.part)];
        let mut key_min: Vec<(&crate::conll::Mention, Vec<usize>)> = Vec::new();
        for (m, _) in &part.key_identities {
            key_min.push((m, raw_min_tokens(kd, m, policy)?));
        }
        let mut sys_min: Vec<(&crate::conll::Mention, Vec<usize>)> = Vec::new();
        for (m, _) in &part.resp_identities {
            sys_min.push((m, raw_min_tokens(kd, m, policy)?));
        }
        for (km, kt) in &key_min {
            for (sm, st) in &sys_min {
                if km.sentence_index == sm.sentence_index && km.span != sm.span && kt == st {
                    rows.insert(BoundaryMismatch {
                        doc_id: part.doc_id.clone(),
                        part: part.part,
                        sentence: km.sentence_index,
                        key_span: km.span.to_string(),
                        key_text: surface(kd, km.sentence_index, km.span),
                        sys_span: sm.span.to_string(),
                        sys_text: surface(kd, sm.sentence_index, sm.span),
                    });
                }
            }
        }
    }
    Ok(rows.into_iter().collect())
}

fn raw_min_tokens(
    kd: &crate::conll::Document,
    m: &crate::conll::Mention,
    policy: &TagPolicy,
) -> Result<Vec<usize>, ProjectError> {
    let tree = kd.sentences[m.sentence_index]
        .tree
        .as_ref()
        .ok_or(ProjectError::Extraction(crate::mina::MinaError::MissingParse {
            doc_id: kd.doc_id.clone(),
            part: kd.part,
            sentence: m.sentence_index,
        }))?;
    let subtree = crate::mina::mention_subtree(tree, m.span)?;
    Ok(crate::mina::extract_min_span(&subtree, policy)
        .token_indices
        .into_iter()
        .collect())
}

fn surface(kd: &crate::conll::Document, sentence: usize, span: crate::treebank::SpanInterval) -> String {
    kd.sentences[sentence].tokens[span.start..=span.end]
        .iter()
        .map(|t| t.word.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}
