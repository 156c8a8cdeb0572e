//! Shared helpers for the integration suites: a deterministic RNG, random
//! tree and partition generators, an exhaustive alignment oracle over exact
//! fractions, and synthetic corpus builders.
#![allow(dead_code)]

use std::collections::BTreeSet;

use minspan::mina::TagPolicy;
use minspan::treebank::{ParseNode, SpanInterval};

/// Deterministic linear congruential generator so test inputs are stable
/// across runs and platforms.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.next() % bound
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    /// True with probability `num`/`den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.index(items.len())]
    }
}

// ---------------------------------------------------------------------------
// Random trees
// ---------------------------------------------------------------------------

const CONTENT_WORDS: &[&str] = &[
    "man", "copy", "zone", "army", "officer", "statement", "presence", "bridge", "letter",
    "price", "company", "country", "technology", "horses", "investment", "liberation",
];

/// Bare words mixed into tag-free trees; determiners and conjunctions keep
/// their lowercase surface forms on purpose.
const BARE_WORDS: &[&str] = &[
    "a", "an", "the", "and", "or", ",", "new", "old", "big", "Cornelius", "Shantou", "course",
];

const PRETERMINAL_TAGS: &[&str] = &["NN", "NNS", "NNP", "JJ", "CD", "DT", "CC", "IN", ",", "VBD"];

const INTERNAL_LABELS: &[&str] = &["NP", "NP", "NP", "VP", "PP", "NML", "ADJP", "QP", "S", "X"];

const ROOT_LABELS: &[&str] = &["NP", "NP", "NP", "VP", "NML", "X", "S", "ADJP"];

/// Builds one random mention-like tree with at most `max_tokens` tokens.
/// Leaves are a mix of bare words and preterminal-wrapped words so the
/// extraction walk sees both leaf shapes it accepts.
pub fn random_tree(rng: &mut Lcg, max_tokens: usize) -> ParseNode {
    let budget = 1 + rng.index(max_tokens);
    let mut next_index = 0;
    let label = rng.pick(ROOT_LABELS).to_string();
    grow_node(rng, &label, budget, &mut next_index, 0)
}

fn grow_node(
    rng: &mut Lcg,
    label: &str,
    budget: usize,
    next_index: &mut usize,
    depth: usize,
) -> ParseNode {
    debug_assert!(budget >= 1);
    if budget == 1 {
        // A single-token constituent wraps one word; the word itself is
        // inserted bare or under a part-of-speech node one level down.
        return ParseNode::internal(label, vec![grow_token(rng, next_index)]);
    }
    let max_arity = budget.min(4);
    let arity = 2 + rng.index(max_arity - 1);
    let mut shares = vec![1usize; arity];
    for _ in 0..budget - arity {
        let slot = rng.index(arity);
        shares[slot] += 1;
    }
    let mut children = Vec::with_capacity(arity);
    for share in shares {
        let deep = depth < 6 && rng.chance(1, 2);
        if share == 1 && !deep {
            children.push(grow_token(rng, next_index));
        } else {
            let child_label = rng.pick(INTERNAL_LABELS).to_string();
            children.push(grow_node(rng, &child_label, share, next_index, depth + 1));
        }
    }
    ParseNode::internal(label, children)
}

fn grow_token(rng: &mut Lcg, next_index: &mut usize) -> ParseNode {
    let index = *next_index;
    *next_index += 1;
    if rng.chance(2, 5) {
        ParseNode::leaf(*rng.pick(BARE_WORDS), index)
    } else {
        let tag = rng.pick(PRETERMINAL_TAGS).to_string();
        let word = *rng.pick(CONTENT_WORDS);
        ParseNode::internal(tag, vec![ParseNode::leaf(word, index)])
    }
}

/// Builds a random sentence tree in treebank shape: every token sits under
/// a part-of-speech node, so the tree can be encoded as CoNLL parse bits.
pub fn random_pos_tree(rng: &mut Lcg, max_tokens: usize) -> ParseNode {
    let budget = 1 + rng.index(max_tokens);
    let mut next_index = 0;
    let body = grow_pos_node(rng, "S", budget, &mut next_index, 0);
    ParseNode::internal("TOP", vec![body])
}

fn grow_pos_node(
    rng: &mut Lcg,
    label: &str,
    budget: usize,
    next_index: &mut usize,
    depth: usize,
) -> ParseNode {
    if budget == 1 {
        let grown = grow_pos_token(rng, next_index);
        if depth == 0 {
            return ParseNode::internal(label, vec![grown]);
        }
        return grown;
    }
    let max_arity = budget.min(4);
    let arity = 2 + rng.index(max_arity - 1);
    let mut shares = vec![1usize; arity];
    for _ in 0..budget - arity {
        let slot = rng.index(arity);
        shares[slot] += 1;
    }
    let mut children = Vec::with_capacity(arity);
    for share in shares {
        if share == 1 && (depth >= 6 || rng.chance(2, 3)) {
            children.push(grow_pos_token(rng, next_index));
        } else {
            let child_label = rng.pick(INTERNAL_LABELS).to_string();
            children.push(grow_pos_node(rng, &child_label, share, next_index, depth + 1));
        }
    }
    ParseNode::internal(label, children)
}

fn grow_pos_token(rng: &mut Lcg, next_index: &mut usize) -> ParseNode {
    let index = *next_index;
    *next_index += 1;
    let tag = rng.pick(PRETERMINAL_TAGS).to_string();
    let word = *rng.pick(CONTENT_WORDS);
    ParseNode::internal(tag, vec![ParseNode::leaf(word, index)])
}

/// Keeps only the leaves named in `keep`, dropping emptied constituents.
/// Token indices keep their original values.
pub fn restrict_tree(node: &ParseNode, keep: &BTreeSet<usize>) -> Option<ParseNode> {
    match node {
        ParseNode::Leaf { text, index } => keep
            .contains(index)
            .then(|| ParseNode::leaf(text.clone(), *index)),
        ParseNode::Internal { raw_label, children, .. } => {
            let kept: Vec<ParseNode> = children
                .iter()
                .filter_map(|c| restrict_tree(c, keep))
                .collect();
            if kept.is_empty() {
                None
            } else {
                Some(ParseNode::internal(raw_label.clone(), kept))
            }
        }
    }
}

/// All leaf indices of a tree.
pub fn leaf_indices(tree: &ParseNode) -> BTreeSet<usize> {
    tree.tokens_with_pos().iter().map(|(i, _, _)| *i).collect()
}

// ---------------------------------------------------------------------------
// Extraction oracles, written independently of the library walk
// ---------------------------------------------------------------------------

/// The tag family adopted for a tree, with the breadth-first depth of the
/// node that named it. Mirrors the documented adoption rule.
pub fn adopted_family(tree: &ParseNode, policy: &TagPolicy) -> Option<(BTreeSet<String>, usize)> {
    let mut level = vec![tree];
    let mut depth = 0;
    while !level.is_empty() {
        for node in &level {
            if node.is_leaf() {
                continue;
            }
            if policy.np_tags.contains(node.label()) {
                return Some((policy.np_tags.clone(), depth));
            }
            if policy.vp_tags.contains(node.label()) {
                return Some((policy.vp_tags.clone(), depth));
            }
        }
        level = level.iter().flat_map(|n| n.children().iter()).collect();
        depth += 1;
    }
    None
}

fn word_is_excluded(word: &str, pos: &str, policy: &TagPolicy) -> bool {
    if policy.excluded_pos.contains(pos) {
        return true;
    }
    let implied = match word {
        "a" | "an" | "the" => Some("DT"),
        "and" | "or" | "but" | "nor" => Some("CC"),
        _ => None,
    };
    pos == word && implied.is_some_and(|tag| policy.excluded_pos.contains(tag))
}

fn node_has_content(node: &ParseNode, policy: &TagPolicy) -> bool {
    node.tokens_with_pos()
        .iter()
        .any(|(_, word, pos)| !word_is_excluded(word, pos, policy))
}

/// True when the documented walk would find at least one acceptable unit:
/// starting from every family node at the adoption depth, a constituent
/// dominating only tokens is one unit, other constituents offer each bare
/// word or part-of-speech child and recurse into family children only.
pub fn acceptable_unit_exists(tree: &ParseNode, policy: &TagPolicy) -> bool {
    let Some((family, depth)) = adopted_family(tree, policy) else {
        return false;
    };
    let mut level = vec![tree];
    for _ in 0..depth {
        level = level
            .iter()
            .flat_map(|n| n.children().iter())
            .filter(|n| !n.is_leaf())
            .collect();
    }
    level
        .into_iter()
        .filter(|n| family.contains(n.label()))
        .any(|root| subtree_has_acceptable_unit(root, &family, policy))
}

fn subtree_has_acceptable_unit(
    node: &ParseNode,
    family: &BTreeSet<String>,
    policy: &TagPolicy,
) -> bool {
    let children = node.children();
    if children.iter().all(|c| c.is_leaf() || c.is_preterminal()) {
        return node_has_content(node, policy);
    }
    children.iter().any(|child| {
        if child.is_leaf() || child.is_preterminal() {
            node_has_content(child, policy)
        } else if family.contains(child.label()) {
            subtree_has_acceptable_unit(child, family, policy)
        } else {
            false
        }
    })
}

/// Tokens that sit beneath an out-of-family constituent found at or below
/// the adoption depth. The walk never crosses such constituents, so these
/// tokens cannot surface unless the extraction fell back.
pub fn opaque_tokens(tree: &ParseNode, family: &BTreeSet<String>, depth: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    collect_opaque(tree, family, depth, 0, false, &mut out);
    out
}

fn collect_opaque(
    node: &ParseNode,
    family: &BTreeSet<String>,
    adoption_depth: usize,
    depth: usize,
    blocked: bool,
    out: &mut BTreeSet<usize>,
) {
    match node {
        ParseNode::Leaf { index, .. } => {
            if blocked {
                out.insert(*index);
            }
        }
        ParseNode::Internal { children, .. } => {
            let opaque_here = depth >= adoption_depth
                && !node.is_preterminal()
                && !family.contains(node.label());
            let blocked = blocked || opaque_here;
            for child in children {
                collect_opaque(child, family, adoption_depth, depth + 1, blocked, out);
            }
        }
    }
}

/// Token depths a reported unit could stand at, judged by the shapes a
/// candidate may take: a bare word, a part-of-speech node, or a constituent
/// dominating only tokens. Matched by label and covered interval.
pub fn unit_token_depths(tree: &ParseNode, label: &str, span: SpanInterval) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    collect_unit_depths(tree, label, span, 0, &mut out);
    out
}

fn collect_unit_depths(
    node: &ParseNode,
    label: &str,
    span: SpanInterval,
    depth: usize,
    out: &mut BTreeSet<usize>,
) {
    match node {
        ParseNode::Leaf { text, index } => {
            if text == label && span == SpanInterval::new(*index, *index) {
                out.insert(depth);
            }
        }
        ParseNode::Internal { children, .. } => {
            if node.label() == label && node.span().ok() == Some(span) {
                if node.is_preterminal() {
                    out.insert(depth + 1);
                } else if children.iter().all(|c| c.is_leaf() || c.is_preterminal()) {
                    let step = if children.iter().any(|c| c.is_leaf()) { 1 } else { 2 };
                    out.insert(depth + step);
                }
            }
            for child in children {
                collect_unit_depths(child, label, span, depth + 1, out);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Exact fractions and the exhaustive alignment oracle
// ---------------------------------------------------------------------------

/// Exact rational number; denominators stay tiny (entity sizes), so i64
/// never overflows after reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frac {
    pub num: i64,
    pub den: i64,
}

impl Frac {
    pub fn new(num: i64, den: i64) -> Frac {
        assert!(den > 0, "denominator must be positive");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        Frac {
            num: num / g,
            den: den / g,
        }
    }

    pub fn zero() -> Frac {
        Frac { num: 0, den: 1 }
    }

    pub fn add(self, other: Frac) -> Frac {
        Frac::new(
            self.num * other.den + other.num * self.den,
            self.den * other.den,
        )
    }

    pub fn less_than(self, other: Frac) -> bool {
        (self.num as i128) * (other.den as i128) < (other.num as i128) * (self.den as i128)
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Similarity of two entities: twice the overlap over the size sum.
pub fn phi4_exact(key: &BTreeSet<u32>, resp: &BTreeSet<u32>) -> Frac {
    let overlap = key.intersection(resp).count() as i64;
    Frac::new(2 * overlap, (key.len() + resp.len()) as i64)
}

/// Total similarity of a specific one-to-one alignment, exactly.
pub fn alignment_total(
    key: &[BTreeSet<u32>],
    resp: &[BTreeSet<u32>],
    pairs: &[(usize, usize)],
) -> Frac {
    pairs
        .iter()
        .fold(Frac::zero(), |acc, &(k, r)| acc.add(phi4_exact(&key[k], &resp[r])))
}

/// Maximum total similarity over every injective alignment, by brute force.
/// Sides are small (at most six entities), so full enumeration is cheap.
pub fn best_alignment_exhaustive(key: &[BTreeSet<u32>], resp: &[BTreeSet<u32>]) -> Frac {
    fn recurse(
        key: &[BTreeSet<u32>],
        resp: &[BTreeSet<u32>],
        next_key: usize,
        used: &mut Vec<bool>,
        acc: Frac,
        best: &mut Frac,
    ) {
        if next_key == key.len() {
            if best.less_than(acc) {
                *best = acc;
            }
            return;
        }
        // The key entity may also stay unmatched.
        recurse(key, resp, next_key + 1, used, acc, best);
        for r in 0..resp.len() {
            if used[r] {
                continue;
            }
            used[r] = true;
            let total = acc.add(phi4_exact(&key[next_key], &resp[r]));
            recurse(key, resp, next_key + 1, used, total, best);
            used[r] = false;
        }
    }
    let mut best = Frac::zero();
    let mut used = vec![false; resp.len()];
    recurse(key, resp, 0, &mut used, Frac::zero(), &mut best);
    best
}

/// Partitions a random subset of `0..universe` into at most `max_entities`
/// nonempty groups.
pub fn random_partition(rng: &mut Lcg, universe: u32, max_entities: usize) -> Vec<BTreeSet<u32>> {
    loop {
        let groups = 1 + rng.index(max_entities);
        let mut entities: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); groups];
        for item in 0..universe {
            // A slot one past the last group leaves the item out entirely.
            let slot = rng.index(groups + 1);
            if slot < groups {
                entities[slot].insert(item);
            }
        }
        entities.retain(|e| !e.is_empty());
        if !entities.is_empty() {
            return entities;
        }
    }
}

// ---------------------------------------------------------------------------
// CoNLL synthesis
// ---------------------------------------------------------------------------

/// One synthetic sentence: a treebank-shaped tree plus its mentions as
/// (entity, span) pairs and the annotated MIN span of each mention.
pub struct SynthSentence {
    pub tree: ParseNode,
    pub mentions: Vec<(u32, SpanInterval)>,
    pub min_spans: Vec<SpanInterval>,
}

/// Encodes a tree whose tokens all sit under part-of-speech nodes as
/// per-token (word, pos, parse bit) rows.
pub fn tree_to_parse_bits(tree: &ParseNode) -> Vec<(String, String, String)> {
    let mut rows: Vec<(String, String, String)> = Vec::new();
    let mut pending = String::new();
    encode_bits(tree, &mut rows, &mut pending);
    assert!(pending.is_empty(), "tree ended without a token");
    rows
}

fn encode_bits(node: &ParseNode, rows: &mut Vec<(String, String, String)>, pending: &mut String) {
    if node.is_preterminal() {
        let word = node.children()[0].label().to_string();
        let mut bit = std::mem::take(pending);
        bit.push('*');
        rows.push((word, node.raw_label().to_string(), bit));
        return;
    }
    match node {
        ParseNode::Leaf { .. } => panic!("parse bits need a part-of-speech node on every token"),
        ParseNode::Internal { raw_label, children, .. } => {
            pending.push('(');
            pending.push_str(raw_label);
            for child in children {
                encode_bits(child, rows, pending);
            }
            rows.last_mut().expect("constituents contain tokens").2.push(')');
        }
    }
}

/// Renders sentences of one document part as CoNLL text.
pub fn render_conll(doc_id: &str, part: u32, sentences: &[SynthSentence]) -> String {
    let mut out = format!("#begin document ({doc_id}); part {part:03}\n");
    for sentence in sentences {
        let rows = tree_to_parse_bits(&sentence.tree);
        for (index, (word, pos, bit)) in rows.iter().enumerate() {
            let mut marks: Vec<String> = Vec::new();
            for (entity, span) in &sentence.mentions {
                if span.start == index && span.end == index {
                    marks.push(format!("({entity})"));
                } else if span.start == index {
                    marks.push(format!("({entity}"));
                } else if span.end == index {
                    marks.push(format!("{entity})"));
                }
            }
            let coref = if marks.is_empty() { "-".to_string() } else { marks.join("|") };
            out.push_str(&format!(
                "{doc_id}\t{part}\t{index}\t{word}\t{pos}\t{bit}\t{coref}\n"
            ));
        }
        out.push('\n');
    }
    out.push_str("#end document\n");
    out
}

/// Renders the MIN sidecar rows for one document part.
pub fn render_sidecar(doc_id: &str, part: u32, sentences: &[SynthSentence]) -> String {
    let mut out = String::new();
    for (sentence_index, sentence) in sentences.iter().enumerate() {
        for ((_, span), min) in sentence.mentions.iter().zip(&sentence.min_spans) {
            out.push_str(&format!("{doc_id}\t{part}\t{sentence_index}\t{span}\t{min}\n"));
        }
    }
    out
}

fn pos(tag: &str, word: &str, index: &mut usize) -> ParseNode {
    let node = ParseNode::internal(tag, vec![ParseNode::leaf(word, *index)]);
    *index += 1;
    node
}

fn span(start: usize, end: usize) -> SpanInterval {
    SpanInterval::new(start, end)
}

const NESTING_NOUNS: &[(&str, &str)] = &[
    ("copy", "statement"),
    ("report", "letter"),
    ("summary", "article"),
    ("review", "decision"),
];

const NAME_POOL: &[(&str, &str, &str, &str)] = &[
    ("John", "Smith", "Mary", "Jones"),
    ("Alice", "Brown", "Peter", "Clark"),
    ("Laura", "Adams", "Simon", "Baker"),
];

const POSSESSIVE_POOL: &[(&str, &str)] = &[("Shantou", "zone"), ("Madrid", "bridge"), ("Quebec", "harbor")];

const APPOSITIVE_POOL: &[(&str, &str)] = &[("man", "officer"), ("woman", "driver"), ("singer", "author")];

/// "the copy of the statement arrived": a nested prepositional mention.
fn nested_sentence(rng: &mut Lcg, outer: u32, inner: u32) -> SynthSentence {
    let (head, object) = *rng.pick(NESTING_NOUNS);
    let mut i = 0;
    let tree = ParseNode::internal(
        "TOP",
        vec![ParseNode::internal(
            "S",
            vec![
                ParseNode::internal(
                    "NP",
                    vec![
                        ParseNode::internal(
                            "NP",
                            vec![pos("DT", "the", &mut i), pos("NN", head, &mut i)],
                        ),
                        ParseNode::internal(
                            "PP",
                            vec![
                                pos("IN", "of", &mut i),
                                ParseNode::internal(
                                    "NP",
                                    vec![pos("DT", "the", &mut i), pos("NN", object, &mut i)],
                                ),
                            ],
                        ),
                    ],
                ),
                ParseNode::internal("VP", vec![pos("VBD", "arrived", &mut i)]),
            ],
        )],
    );
    SynthSentence {
        tree,
        mentions: vec![(outer, span(0, 4)), (inner, span(3, 4))],
        min_spans: vec![span(1, 1), span(4, 4)],
    }
}

/// "John Smith and Mary Jones smiled": a conjoined mention over two names.
pub fn conjunction_sentence(rng: &mut Lcg, whole: u32, left: u32, right: u32) -> SynthSentence {
    let (first_a, last_a, first_b, last_b) = *rng.pick(NAME_POOL);
    let mut i = 0;
    let tree = ParseNode::internal(
        "TOP",
        vec![ParseNode::internal(
            "S",
            vec![
                ParseNode::internal(
                    "NP",
                    vec![
                        ParseNode::internal(
                            "NP",
                            vec![pos("NNP", first_a, &mut i), pos("NNP", last_a, &mut i)],
                        ),
                        pos("CC", "and", &mut i),
                        ParseNode::internal(
                            "NP",
                            vec![pos("NNP", first_b, &mut i), pos("NNP", last_b, &mut i)],
                        ),
                    ],
                ),
                ParseNode::internal("VP", vec![pos("VBD", "smiled", &mut i)]),
            ],
        )],
    );
    SynthSentence {
        tree,
        mentions: vec![(whole, span(0, 4)), (left, span(0, 1)), (right, span(3, 4))],
        min_spans: vec![span(0, 0), span(1, 1), span(4, 4)],
    }
}

/// "Shantou 's new zone opened": a possessive modifier inside the mention.
fn possessive_sentence(rng: &mut Lcg, whole: u32, owner: u32) -> SynthSentence {
    let (name, noun) = *rng.pick(POSSESSIVE_POOL);
    let mut i = 0;
    let tree = ParseNode::internal(
        "TOP",
        vec![ParseNode::internal(
            "S",
            vec![
                ParseNode::internal(
                    "NP",
                    vec![
                        ParseNode::internal(
                            "NP",
                            vec![pos("NNP", name, &mut i), pos("POS", "'s", &mut i)],
                        ),
                        pos("JJ", "new", &mut i),
                        pos("NN", noun, &mut i),
                    ],
                ),
                ParseNode::internal("VP", vec![pos("VBD", "opened", &mut i)]),
            ],
        )],
    );
    SynthSentence {
        tree,
        mentions: vec![(whole, span(0, 3)), (owner, span(0, 1))],
        min_spans: vec![span(3, 3), span(0, 0)],
    }
}

/// "a man , an officer spoke": an appositive pair of noun phrases.
fn appositive_sentence(rng: &mut Lcg, whole: u32, left: u32, right: u32) -> SynthSentence {
    let (noun_a, noun_b) = *rng.pick(APPOSITIVE_POOL);
    let mut i = 0;
    let tree = ParseNode::internal(
        "TOP",
        vec![ParseNode::internal(
            "S",
            vec![
                ParseNode::internal(
                    "NP",
                    vec![
                        ParseNode::internal(
                            "NP",
                            vec![pos("DT", "a", &mut i), pos("NN", noun_a, &mut i)],
                        ),
                        pos(",", ",", &mut i),
                        ParseNode::internal(
                            "NP",
                            vec![pos("DT", "an", &mut i), pos("NN", noun_b, &mut i)],
                        ),
                    ],
                ),
                ParseNode::internal("VP", vec![pos("VBD", "spoke", &mut i)]),
            ],
        )],
    );
    SynthSentence {
        tree,
        mentions: vec![(whole, span(0, 4)), (left, span(0, 1)), (right, span(3, 4))],
        min_spans: vec![span(0, 0), span(1, 1), span(4, 4)],
    }
}

/// Builds one synthetic document part with nesting, conjunction,
/// possessive, and appositive sentences. Entity ids are drawn from a small
/// pool so chains span several sentences.
pub fn synthetic_sentences(rng: &mut Lcg, sentence_count: usize) -> Vec<SynthSentence> {
    let mut sentences = Vec::with_capacity(sentence_count);
    for _ in 0..sentence_count {
        let a = rng.below(8) as u32;
        let b = (a + 1 + rng.below(7) as u32) % 8;
        let mut c = rng.below(8) as u32;
        while c == a || c == b {
            c = (c + 1) % 8;
        }
        let sentence = match rng.below(4) {
            0 => nested_sentence(rng, a, b),
            1 => conjunction_sentence(rng, a, b, c),
            2 => possessive_sentence(rng, a, b),
            _ => appositive_sentence(rng, a, b, c),
        };
        sentences.push(sentence);
    }
    sentences
}

/// One synthetic corpus as (CoNLL text, MIN sidecar text, mention count).
pub fn synthetic_corpus(seed: u64) -> (String, String, usize) {
    let mut rng = Lcg(seed);
    let mut conll = String::new();
    let mut sidecar = String::new();
    let mut mentions = 0;
    for part in 0..2u32 {
        let doc_id = format!("synthetic/{seed:#x}");
        let sentences = synthetic_sentences(&mut rng, 14);
        mentions += sentences.iter().map(|s| s.mentions.len()).sum::<usize>();
        conll.push_str(&render_conll(&doc_id, part, &sentences));
        sidecar.push_str(&render_sidecar(&doc_id, part, &sentences));
    }
    (conll, sidecar, mentions)
}

/// The synthetic corpus with every entity id remapped, so the clustering
/// differs while each mention span stays put.
pub fn recluster(conll: &str, merge: fn(u32) -> u32) -> String {
    let mut out = String::new();
    for line in conll.lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            out.push_str(line);
            out.push('\n');
            continue;
        }
        let mut fields: Vec<&str> = line.split('\t').collect();
        let coref = fields.last().expect("rows have columns").to_string();
        let remapped = if coref == "-" {
            coref
        } else {
            coref
                .split('|')
                .map(|item| {
                    let opens = item.starts_with('(');
                    let closes = item.ends_with(')');
                    let digits = item.trim_start_matches('(').trim_end_matches(')');
                    let entity: u32 = digits.parse().expect("entity ids are numeric");
                    let entity = merge(entity);
                    match (opens, closes) {
                        (true, true) => format!("({entity})"),
                        (true, false) => format!("({entity}"),
                        (false, true) => format!("{entity})"),
                        (false, false) => unreachable!("coref items open or close"),
                    }
                })
                .collect::<Vec<_>>()
                .join("|")
        };
        *fields.last_mut().expect("rows have columns") = &remapped;
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    out
}
