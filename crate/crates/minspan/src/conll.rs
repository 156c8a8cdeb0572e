//! CoNLL-2012 coreference file reading and writing.
//!
//! A file is a sequence of `#begin document (<id>); part <nnn>` ...
//! `#end document` blocks. Sentences are separated by blank lines. Token
//! rows are whitespace-separated columns: the word is column 4, the part of
//! speech column 5, the parse bit column 6, and the coreference field the
//! last column (overridable for nonstandard layouts).
//!
//! Parse bits concatenate across a sentence into a bracketed tree once each
//! `*` placeholder is replaced by `(POS word)`. Sentences whose bits carry
//! no brackets at all yield no tree; modes that need trees reject such
//! documents later with a pointed error.

use std::collections::BTreeMap;
use std::io::BufRead;

use thiserror::Error;

use crate::treebank::{parse_bracketed, ParseNode, SpanInterval};

/// Errors raised while reading a CoNLL file.
#[derive(Debug, Error)]
pub enum ConllError {
    #[error("line {line}: token row before any #begin document directive")]
    MissingBeginDirective { line: usize },
    #[error("line {line}: expected at least {required} columns, found {found}")]
    ColumnCountTooSmall { line: usize, required: usize, found: usize },
    #[error("document {doc_id} part {part} sentence {sentence}: parse bits do not form a tree")]
    ParseBitImbalance { doc_id: String, part: u32, sentence: usize },
    #[error("line {line}: malformed coreference field {field:?}")]
    CorefFieldMalformed { line: usize, field: String },
    #[error("entity {entity} opened but never closed in sentence {sentence}")]
    UnclosedMention { entity: u32, sentence: usize },
    #[error("line {line}: entity {entity} closed without a matching open")]
    CloseWithoutOpen { line: usize, entity: u32 },
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Errors from decoding one sentence's coreference column in isolation;
/// positions are token offsets within the sentence.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorefError {
    #[error("token {token}: malformed coreference field {field:?}")]
    Malformed { token: usize, field: String },
    #[error("token {token}: entity {entity} closed without a matching open")]
    CloseWithoutOpen { token: usize, entity: u32 },
    #[error("entity {entity} opened but never closed")]
    Unclosed { entity: u32 },
}

/// One token row, keeping the columns this toolkit consumes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub doc_id: String,
    pub part: u32,
    pub sentence_index: usize,
    /// Position within the sentence; restarts at 0 each sentence.
    pub token_index: usize,
    pub word: String,
    pub pos: String,
    pub parse_bit: String,
    pub coref_field: String,
}

/// One sentence: its tokens and, when parse bits were present, its tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub tree: Option<ParseNode>,
}

/// One coreference mention: a token interval in one sentence of one
/// document part, tied to its entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mention {
    pub doc_id: String,
    pub part: u32,
    pub sentence_index: usize,
    pub span: SpanInterval,
    pub entity: u32,
}

/// One `(doc_id, part)` block of a CoNLL file.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub part: u32,
    pub sentences: Vec<Sentence>,
    /// Entity id to its mentions in document order.
    pub chains: BTreeMap<u32, Vec<Mention>>,
}

impl Document {
    /// All mentions of the document in (sentence, span, entity) order.
    pub fn mentions(&self) -> Vec<&Mention> {
        let mut out: Vec<&Mention> = self.chains.values().flatten().collect();
        out.sort_by_key(|m| (m.sentence_index, m.span, m.entity));
        out
    }
}

/// Documents read from one file plus non-fatal findings.
#[derive(Debug, Default)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub warnings: Vec<String>,
}

/// Knobs for nonstandard files.
#[derive(Debug, Clone, Default)]
pub struct ReadOptions {
    /// 1-based column holding the coreference field; last column when unset.
    pub coref_column: Option<usize>,
}

/// Reads a whole CoNLL file with default options.
pub fn read_conll(reader: impl BufRead) -> Result<Corpus, ConllError> {
    read_conll_with(reader, &ReadOptions::default())
}

/// Convenience wrapper over [`read_conll`] for in-memory input.
pub fn read_conll_str(text: &str) -> Result<Corpus, ConllError> {
    read_conll(text.as_bytes())
}

struct PendingRow {
    line: usize,
    word: String,
    pos: String,
    parse_bit: String,
    coref_field: String,
    part_column: Option<u32>,
}

struct OpenDocument {
    doc_id: String,
    part: Option<u32>,
    sentences: Vec<Sentence>,
    chains: BTreeMap<u32, Vec<Mention>>,
    rows: Vec<PendingRow>,
}

/// Reads a whole CoNLL file.
pub fn read_conll_with(reader: impl BufRead, options: &ReadOptions) -> Result<Corpus, ConllError> {
    let mut corpus = Corpus::default();
    let mut current: Option<OpenDocument> = None;

    for (line_index, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = line_index + 1;
        let trimmed = line.trim();

        if let Some(rest) = trimmed.strip_prefix("#begin document") {
            if let Some(doc) = current.take() {
                corpus.warnings.push(format!(
                    "document {} part {} not closed before line {line_no}; treating as ended",
                    doc.doc_id,
                    doc.part.unwrap_or(0)
                ));
                finish_document(doc, &mut corpus)?;
            }
            let (doc_id, part) = parse_begin_directive(rest);
            current = Some(OpenDocument {
                doc_id,
                part,
                sentences: Vec::new(),
                chains: BTreeMap::new(),
                rows: Vec::new(),
            });
            continue;
        }
        if trimmed == "#end document" {
            match current.take() {
                Some(mut doc) => {
                    flush_sentence(&mut doc)?;
                    finish_document(doc, &mut corpus)?;
                }
                None => corpus
                    .warnings
                    .push(format!("line {line_no}: #end document without open document")),
            }
            continue;
        }
        if trimmed.starts_with('#') {
            // Unrecognized comment lines carry no data.
            continue;
        }
        if trimmed.is_empty() {
            if let Some(doc) = current.as_mut() {
                flush_sentence(doc)?;
            }
            continue;
        }

        let doc = current
            .as_mut()
            .ok_or(ConllError::MissingBeginDirective { line: line_no })?;
        let columns: Vec<&str> = trimmed.split_whitespace().collect();
        let coref_index = match options.coref_column {
            Some(column) => column.saturating_sub(1),
            None => columns.len().saturating_sub(1),
        };
        let required = 7.max(coref_index + 1);
        if columns.len() < required {
            return Err(ConllError::ColumnCountTooSmall {
                line: line_no,
                required,
                found: columns.len(),
            });
        }
        doc.rows.push(PendingRow {
            line: line_no,
            word: columns[3].to_string(),
            pos: columns[4].to_string(),
            parse_bit: columns[5].to_string(),
            coref_field: columns[coref_index].to_string(),
            part_column: columns[1].parse().ok(),
        });
    }

    if let Some(mut doc) = current.take() {
        corpus.warnings.push(format!(
            "document {} part {} missing #end document at end of input",
            doc.doc_id,
            doc.part.unwrap_or(0)
        ));
        flush_sentence(&mut doc)?;
        finish_document(doc, &mut corpus)?;
    }
    Ok(corpus)
}

/// Splits `(id); part nnn` into its pieces; either piece may be absent.
fn parse_begin_directive(rest: &str) -> (String, Option<u32>) {
    let rest = rest.trim();
    let (doc_id, tail) = match (rest.strip_prefix('('), rest.find(')')) {
        (Some(_), Some(close)) => (rest[1..close].to_string(), &rest[close + 1..]),
        _ => (rest.to_string(), ""),
    };
    let part = tail
        .trim_start_matches(';')
        .trim()
        .strip_prefix("part")
        .and_then(|n| n.trim().parse().ok());
    (doc_id, part)
}

/// Converts buffered rows into a [`Sentence`], decoding tree and mentions.
fn flush_sentence(doc: &mut OpenDocument) -> Result<(), ConllError> {
    if doc.rows.is_empty() {
        return Ok(());
    }
    let sentence_index = doc.sentences.len();
    if doc.part.is_none() {
        doc.part = doc.rows[0].part_column;
    }
    let part = doc.part.unwrap_or(0);

    let rows = std::mem::take(&mut doc.rows);
    let tokens: Vec<Token> = rows
        .iter()
        .enumerate()
        .map(|(token_index, row)| Token {
            doc_id: doc.doc_id.clone(),
            part,
            sentence_index,
            token_index,
            word: row.word.clone(),
            pos: row.pos.clone(),
            parse_bit: row.parse_bit.clone(),
            coref_field: row.coref_field.clone(),
        })
        .collect();

    let tree = reconstruct_tree(&tokens)?;

    let cells: Vec<&str> = rows.iter().map(|r| r.coref_field.as_str()).collect();
    let decoded = decode_coref_column(&cells).map_err(|e| match e {
        CorefError::Malformed { token, field } => ConllError::CorefFieldMalformed {
            line: rows[token].line,
            field,
        },
        CorefError::CloseWithoutOpen { token, entity } => ConllError::CloseWithoutOpen {
            line: rows[token].line,
            entity,
        },
        CorefError::Unclosed { entity } => ConllError::UnclosedMention {
            entity,
            sentence: sentence_index,
        },
    })?;
    for (entity, span) in decoded {
        doc.chains.entry(entity).or_default().push(Mention {
            doc_id: doc.doc_id.clone(),
            part,
            sentence_index,
            span,
            entity,
        });
    }

    doc.sentences.push(Sentence { tokens, tree });
    Ok(())
}

/// Deduplicates repeated identical mentions, then stores the document.
fn finish_document(doc: OpenDocument, corpus: &mut Corpus) -> Result<(), ConllError> {
    let part = doc.part.unwrap_or(0);
    let mut chains = doc.chains;
    for (entity, mentions) in chains.iter_mut() {
        let mut seen = std::collections::BTreeSet::new();
        let before = mentions.len();
        mentions.retain(|m| seen.insert((m.sentence_index, m.span)));
        if mentions.len() < before {
            corpus.warnings.push(format!(
                "document {} part {part}: dropped {} duplicate mention(s) of entity {entity}",
                doc.doc_id,
                before - mentions.len()
            ));
        }
    }
    if corpus
        .documents
        .iter()
        .any(|d| d.doc_id == doc.doc_id && d.part == part)
    {
        corpus.warnings.push(format!(
            "duplicate document block for {} part {part}",
            doc.doc_id
        ));
    }
    corpus.documents.push(Document {
        doc_id: doc.doc_id,
        part,
        sentences: doc.sentences,
        chains,
    });
    Ok(())
}

/// Rebuilds a sentence tree from per-token parse bits.
///
/// Returns `Ok(None)` when no bit contains a bracket, which is how unparsed
/// system files look. Each bit must otherwise hold exactly one `*`, and the
/// concatenation must close every bracket it opens.
pub fn reconstruct_tree(tokens: &[Token]) -> Result<Option<ParseNode>, ConllError> {
    if tokens.is_empty() || tokens.iter().all(|t| !t.parse_bit.contains('(')) {
        return Ok(None);
    }
    let context = || ConllError::ParseBitImbalance {
        doc_id: tokens[0].doc_id.clone(),
        part: tokens[0].part,
        sentence: tokens[0].sentence_index,
    };
    let mut text = String::new();
    for token in tokens {
        if token.parse_bit.matches('*').count() != 1 {
            return Err(context());
        }
        let substituted = token
            .parse_bit
            .replacen('*', &format!("({} {})", token.pos, token.word), 1);
        text.push_str(&substituted);
    }
    let tree = parse_bracketed(&text).map_err(|_| context())?;
    let words_match = tree
        .leaves()
        .iter()
        .zip(tokens)
        .all(|(leaf, token)| leaf.label() == token.word)
        && tree.leaf_count() == tokens.len();
    if !words_match {
        return Err(context());
    }
    Ok(Some(tree))
}

/// Decodes one sentence's coreference column into (entity, span) pairs.
///
/// Fields are `-` or `|`-separated items of the forms `(N`, `N)`, and
/// `(N)`. Nested spans of one entity close innermost-first. Pairs are
/// returned in close order.
pub fn decode_coref_column(cells: &[&str]) -> Result<Vec<(u32, SpanInterval)>, CorefError> {
    let mut open: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut out = Vec::new();
    for (token, cell) in cells.iter().enumerate() {
        if *cell == "-" {
            continue;
        }
        for item in cell.split('|') {
            let malformed = || CorefError::Malformed {
                token,
                field: (*cell).to_string(),
            };
            let opens = item.starts_with('(');
            let closes = item.ends_with(')');
            let digits = item
                .trim_start_matches('(')
                .trim_end_matches(')');
            if digits.is_empty() || !(opens || closes) {
                return Err(malformed());
            }
            let entity: u32 = digits.parse().map_err(|_| malformed())?;
            match (opens, closes) {
                (true, true) => out.push((entity, SpanInterval::new(token, token))),
                (true, false) => open.entry(entity).or_default().push(token),
                (false, true) => {
                    let start = open
                        .get_mut(&entity)
                        .and_then(Vec::pop)
                        .ok_or(CorefError::CloseWithoutOpen { token, entity })?;
                    out.push((entity, SpanInterval::new(start, token)));
                }
                (false, false) => return Err(malformed()),
            }
        }
    }
    if let Some((&entity, _)) = open.iter().find(|(_, starts)| !starts.is_empty()) {
        return Err(CorefError::Unclosed { entity });
    }
    Ok(out)
}

/// Writes documents back out in the 7-column layout this reader accepts.
/// Reading the emitted text yields equal [`Document`] values.
pub fn emit_conll(documents: &[Document]) -> String {
    let mut out = String::new();
    for doc in documents {
        out.push_str(&format!(
            "#begin document ({}); part {:03}\n",
            doc.doc_id, doc.part
        ));
        for sentence in &doc.sentences {
            for token in &sentence.tokens {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    token.doc_id,
                    token.part,
                    token.token_index,
                    token.word,
                    token.pos,
                    token.parse_bit,
                    token.coref_field
                ));
            }
            out.push('\n');
        }
        out.push_str("#end document\n");
    }
    out
}
