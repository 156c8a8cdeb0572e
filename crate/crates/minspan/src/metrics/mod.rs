//! Coreference metrics over aligned entity sets.
//!
//! Every metric reduces a (key, response) pair of entity sets to four
//! counts: recall numerator and denominator, precision numerator and
//! denominator. Counts from many document parts can be summed before the
//! final division, which is how corpus-level scores are formed.
//!
//! The metrics are the four standard ones: link-based MUC, mention-based
//! B-cubed, entity-alignment CEAF (the phi-4 variant), and link-based LEA
//! with its singleton rule.

pub mod assignment;

use std::collections::BTreeSet;

/// One entity is a set of mention identities; a side is a list of
/// entities.
pub type EntitySet<T> = Vec<BTreeSet<T>>;

/// Accumulated numerators and denominators for one metric.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MetricCounts {
    pub recall_num: f64,
    pub recall_den: f64,
    pub precision_num: f64,
    pub precision_den: f64,
}

impl MetricCounts {
    pub fn add(&mut self, other: &MetricCounts) {
        self.recall_num += other.recall_num;
        self.recall_den += other.recall_den;
        self.precision_num += other.precision_num;
        self.precision_den += other.precision_den;
    }

    pub fn recall(&self) -> f64 {
        ratio(self.recall_num, self.recall_den)
    }

    pub fn precision(&self) -> f64 {
        ratio(self.precision_num, self.precision_den)
    }

    pub fn f1(&self) -> f64 {
        let r = self.recall();
        let p = self.precision();
        if r + p == 0.0 {
            0.0
        } else {
            2.0 * r * p / (r + p)
        }
    }

    /// Percentage scores in [0, 100].
    pub fn scores(&self) -> Scores {
        Scores {
            recall: self.recall() * 100.0,
            precision: self.precision() * 100.0,
            f1: self.f1() * 100.0,
        }
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Recall, precision, and F1 as percentages.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Scores {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

/// Link-based counts: an entity of size n is worth n - 1 links, and a key
/// entity loses one link for every extra partition the response splits it
/// into. Response mentions absent from the key act as singletons, and
/// symmetrically for precision.
pub fn muc_counts<T: Ord>(key: &EntitySet<T>, resp: &EntitySet<T>) -> MetricCounts {
    MetricCounts {
        recall_num: muc_num(key, resp),
        recall_den: key.iter().map(|e| e.len().saturating_sub(1) as f64).sum(),
        precision_num: muc_num(resp, key),
        precision_den: resp.iter().map(|e| e.len().saturating_sub(1) as f64).sum(),
    }
}

fn muc_num<T: Ord>(gold: &EntitySet<T>, other: &EntitySet<T>) -> f64 {
    let mut total = 0.0;
    for entity in gold {
        let mut touched = BTreeSet::new();
        let mut unmatched = 0usize;
        for mention in entity {
            match other.iter().position(|e| e.contains(mention)) {
                Some(index) => {
                    touched.insert(index);
                }
                None => unmatched += 1,
            }
        }
        let partitions = touched.len() + unmatched;
        total += (entity.len() - partitions) as f64;
    }
    total
}

/// Mention-based counts: each key entity contributes the squared overlap
/// with every response entity, normalized by its own size; the denominator
/// is the mention count. Precision swaps the roles.
pub fn b3_counts<T: Ord>(key: &EntitySet<T>, resp: &EntitySet<T>) -> MetricCounts {
    MetricCounts {
        recall_num: b3_num(key, resp),
        recall_den: key.iter().map(|e| e.len() as f64).sum(),
        precision_num: b3_num(resp, key),
        precision_den: resp.iter().map(|e| e.len() as f64).sum(),
    }
}

fn b3_num<T: Ord>(gold: &EntitySet<T>, other: &EntitySet<T>) -> f64 {
    let mut total = 0.0;
    for entity in gold {
        for candidate in other {
            let overlap = entity.intersection(candidate).count() as f64;
            if overlap > 0.0 {
                total += overlap * overlap / entity.len() as f64;
            }
        }
    }
    total
}

/// Entity-alignment counts: key and response entities are matched
/// one-to-one to maximize total similarity phi(K, R) =
/// 2|K and R| / (|K| + |R|); the total is divided by the entity count of
/// each side.
pub fn ceafe_counts<T: Ord>(key: &EntitySet<T>, resp: &EntitySet<T>) -> MetricCounts {
    let (total, _) = ceafe_alignment(key, resp);
    MetricCounts {
        recall_num: total,
        recall_den: key.len() as f64,
        precision_num: total,
        precision_den: resp.len() as f64,
    }
}

/// The optimal one-to-one entity alignment and its total similarity.
/// Exposed so the chosen pairs can be re-scored independently.
pub fn ceafe_alignment<T: Ord>(
    key: &EntitySet<T>,
    resp: &EntitySet<T>,
) -> (f64, Vec<(usize, usize)>) {
    if key.is_empty() || resp.is_empty() {
        return (0.0, Vec::new());
    }
    let weights: Vec<Vec<f64>> = key
        .iter()
        .map(|k| resp.iter().map(|r| phi4(k, r)).collect())
        .collect();
    assignment::max_weight_matching(&weights)
}

fn phi4<T: Ord>(k: &BTreeSet<T>, r: &BTreeSet<T>) -> f64 {
    let overlap = k.intersection(r).count() as f64;
    2.0 * overlap / (k.len() + r.len()) as f64
}

/// Link-based counts with entity-size weighting. An entity of size n has
/// n(n-1)/2 links; its resolution score is the fraction of those links
/// reproduced by the other side. A singleton has one conceptual link,
/// reproduced only when the other side also holds the mention as a
/// singleton.
pub fn lea_counts<T: Ord>(key: &EntitySet<T>, resp: &EntitySet<T>) -> MetricCounts {
    MetricCounts {
        recall_num: lea_num(key, resp),
        recall_den: key.iter().map(|e| e.len() as f64).sum(),
        precision_num: lea_num(resp, key),
        precision_den: resp.iter().map(|e| e.len() as f64).sum(),
    }
}

fn links(n: usize) -> f64 {
    (n * n.saturating_sub(1)) as f64 / 2.0
}

fn lea_num<T: Ord>(gold: &EntitySet<T>, other: &EntitySet<T>) -> f64 {
    let mut total = 0.0;
    for entity in gold {
        let resolved = if entity.len() == 1 {
            let mention = entity.iter().next().expect("singleton has a mention");
            let as_singleton = other
                .iter()
                .any(|e| e.len() == 1 && e.contains(mention));
            if as_singleton {
                1.0
            } else {
                0.0
            }
        } else {
            let common: f64 = other
                .iter()
                .map(|e| links(entity.intersection(e).count()))
                .sum();
            common / links(entity.len())
        };
        total += entity.len() as f64 * resolved;
    }
    total
}
