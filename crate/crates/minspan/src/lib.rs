//! Coreference evaluation over constituency parse trees.
//!
//! The crate reads CoNLL-2012 coreference files, extracts the minimum
//! content-bearing span of each mention from the key parse tree, selects
//! head words, and scores key/response pairs with the MUC, B-cubed,
//! CEAF_e, and LEA metrics under four mention-matching modes: full spans,
//! extracted minimum spans, head words, and annotated-MIN containment.
//!
//! The library layers are independent: [`treebank`] parses bracketed
//! trees, [`conll`] reads and writes the file format, [`mina`] extracts
//! minimum spans, [`heads`] picks head tokens, [`project`] turns mentions
//! into canonical identities, [`metrics`] scores entity sets, [`score`]
//! assembles corpus-level reports, and [`stats`] computes span-length and
//! containment summaries.

pub mod cli;
pub mod conll;
pub mod heads;
pub mod metrics;
pub mod mina;
pub mod project;
pub mod score;
pub mod stats;
pub mod treebank;

pub use conll::{read_conll, read_conll_str, Corpus, Document, Mention};
pub use heads::{collins_np_head, head_span, HeadResult, HeadRule, HeadTable};
pub use mina::{extract_min_span, mention_subtree, MinSpanResult, TagPolicy};
pub use project::{MatchingMode, MinSidecar, SpanIdentity};
pub use score::{score_corpora, ScoreOptions, ScoreReport};
pub use treebank::{parse_bracketed, ParseNode, SpanInterval};
