//! Heterogeneous user–item knowledge graph.
//!
//! The graph is a multiset of typed triplets `(head, relation, tail)` over
//! five entity kinds (users, items, words, brands, categories) plus the
//! frequency indexes needed for training and explanation: per-(head, relation)
//! tail lists, occurrence counts, and per-relation tail marginals.
//!
//! Build the graph once, single writer, then share it read-only; all
//! downstream stages (`train`, `evaluate`, `best_explanation`) take `&Graph`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::seeds;

/// The five kinds of nodes the graph contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityType {
    User,
    Item,
    Word,
    Brand,
    Category,
}

impl EntityType {
    pub const ALL: [EntityType; 5] = [
        EntityType::User,
        EntityType::Item,
        EntityType::Word,
        EntityType::Brand,
        EntityType::Category,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EntityType::User => "user",
            EntityType::Item => "item",
            EntityType::Word => "word",
            EntityType::Brand => "brand",
            EntityType::Category => "category",
        }
    }

    pub fn parse(s: &str) -> Option<EntityType> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The seven edge kinds. Head/tail types are fixed per relation; `Mention`
/// accepts both user and item heads (review text is attributed to both the
/// reviewer and the reviewed item) while sharing a single relation embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationType {
    Purchase,
    Mention,
    BelongsTo,
    ProducedBy,
    BoughtTogether,
    AlsoBought,
    AlsoViewed,
}

impl RelationType {
    pub const ALL: [RelationType; 7] = [
        RelationType::Purchase,
        RelationType::Mention,
        RelationType::BelongsTo,
        RelationType::ProducedBy,
        RelationType::BoughtTogether,
        RelationType::AlsoBought,
        RelationType::AlsoViewed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationType::Purchase => "purchase",
            RelationType::Mention => "mention",
            RelationType::BelongsTo => "belongs_to",
            RelationType::ProducedBy => "produced_by",
            RelationType::BoughtTogether => "bought_together",
            RelationType::AlsoBought => "also_bought",
            RelationType::AlsoViewed => "also_viewed",
        }
    }

    pub fn parse(s: &str) -> Option<RelationType> {
        Self::ALL.into_iter().find(|r| r.name() == s)
    }

    /// Entity types allowed on the head side.
    pub fn head_types(self) -> &'static [EntityType] {
        match self {
            RelationType::Purchase => &[EntityType::User],
            RelationType::Mention => &[EntityType::User, EntityType::Item],
            RelationType::BelongsTo
            | RelationType::ProducedBy
            | RelationType::BoughtTogether
            | RelationType::AlsoBought
            | RelationType::AlsoViewed => &[EntityType::Item],
        }
    }

    /// The single entity type on the tail side.
    pub fn tail_type(self) -> EntityType {
        match self {
            RelationType::Purchase => EntityType::Item,
            RelationType::Mention => EntityType::Word,
            RelationType::BelongsTo => EntityType::Category,
            RelationType::ProducedBy => EntityType::Brand,
            RelationType::BoughtTogether | RelationType::AlsoBought | RelationType::AlsoViewed => {
                EntityType::Item
            }
        }
    }

    /// Position of this relation's embedding row (declaration order).
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|r| *r == self).unwrap()
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dense typed handle for one entity: `(type, index into that type's vocabulary)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId {
    pub entity_type: EntityType,
    pub index: u32,
}

impl EntityId {
    pub fn new(entity_type: EntityType, index: u32) -> Self {
        EntityId { entity_type, index }
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.entity_type, self.index)
    }
}

/// One directed, typed edge occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triplet {
    pub head: EntityId,
    pub relation: RelationType,
    pub tail: EntityId,
}

impl Triplet {
    pub fn new(head: EntityId, relation: RelationType, tail: EntityId) -> Self {
        Triplet { head, relation, tail }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("schema violation: {relation} expects {expected} but got {head} -> {tail}")]
    SchemaViolation {
        relation: RelationType,
        head: EntityType,
        tail: EntityType,
        expected: String,
    },
    #[error("unknown {entity_type} entity: {key}")]
    UnknownEntity { entity_type: EntityType, key: String },
    #[error("user {user} has {purchases} purchase(s); splitting requires at least 2 per user")]
    InsufficientPurchases { user: String, purchases: usize },
    #[error("relation subset must contain purchase")]
    MissingPurchase,
    #[error("no tail entities available for {relation} (tail type {tail_type})")]
    EmptyVocabulary {
        relation: RelationType,
        tail_type: EntityType,
    },
    #[error("split ratio must lie strictly between 0 and 1, got {0}")]
    InvalidRatio(f64),
}

/// Bijective mapping between external string keys and dense indexes,
/// in first-registration order.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    keys: Vec<String>,
    by_key: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<u32> {
        self.by_key.get(key).copied()
    }

    pub fn key(&self, index: u32) -> &str {
        &self.keys[index as usize]
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    fn get_or_insert(&mut self, key: &str) -> u32 {
        if let Some(&i) = self.by_key.get(key) {
            return i;
        }
        let i = self.keys.len() as u32;
        self.keys.push(key.to_string());
        self.by_key.insert(key.to_string(), i);
        i
    }

    /// Rebuilds a vocabulary from an ordered key list; `None` if any key
    /// repeats.
    pub(crate) fn from_keys(keys: Vec<String>) -> Option<Self> {
        let mut by_key = HashMap::with_capacity(keys.len());
        for (i, key) in keys.iter().enumerate() {
            if by_key.insert(key.clone(), i as u32).is_some() {
                return None;
            }
        }
        Some(Vocabulary { keys, by_key })
    }
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.keys == other.keys
    }
}
impl Eq for Vocabulary {}

/// One vocabulary per entity type.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabularies {
    per_type: [Vocabulary; 5],
}

impl Vocabularies {
    pub fn vocab(&self, t: EntityType) -> &Vocabulary {
        &self.per_type[t as usize]
    }

    pub fn size(&self, t: EntityType) -> usize {
        self.vocab(t).len()
    }

    pub fn id_of(&self, t: EntityType, key: &str) -> Option<EntityId> {
        self.vocab(t).get(key).map(|i| EntityId::new(t, i))
    }

    pub fn key_of(&self, id: EntityId) -> &str {
        self.vocab(id.entity_type).key(id.index)
    }

    fn vocab_mut(&mut self, t: EntityType) -> &mut Vocabulary {
        &mut self.per_type[t as usize]
    }

    pub(crate) fn from_parts(per_type: [Vocabulary; 5]) -> Self {
        Vocabularies { per_type }
    }

    fn contains(&self, id: EntityId) -> bool {
        (id.index as usize) < self.size(id.entity_type)
    }
}

/// Sampling distribution over the tail vocabulary of one relation: uniform
/// for `Purchase`, proportional to observed tail frequency otherwise.
/// Stores plain probabilities plus a cumulative table for inverse-CDF draws.
#[derive(Debug, Clone)]
pub struct NoiseDistribution {
    relation: RelationType,
    tail_type: EntityType,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl NoiseDistribution {
    fn from_weights(relation: RelationType, weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        debug_assert!(total > 0.0);
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0; // guard the final bucket against rounding
        }
        NoiseDistribution { relation, tail_type: relation.tail_type(), probs, cdf }
    }

    pub fn relation(&self) -> RelationType {
        self.relation
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Probability mass assigned to `tail`.
    pub fn probability(&self, tail: EntityId) -> f64 {
        debug_assert_eq!(tail.entity_type, self.tail_type);
        self.probs[tail.index as usize]
    }

    /// One draw by binary search over the cumulative table.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EntityId {
        let u: f64 = rng.gen();
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.probs.len() - 1);
        EntityId::new(self.tail_type, idx as u32)
    }
}

/// Immutable-after-build multiset of triplets with frequency indexes.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    vocabs: Vocabularies,
    triplets: Vec<Triplet>,
    tails_by_head_rel: HashMap<(EntityId, RelationType), Vec<EntityId>>,
    cnt_head_rel_tail: HashMap<(EntityId, RelationType, EntityId), u64>,
    cnt_head_rel: HashMap<(EntityId, RelationType), u64>,
    tail_counts: HashMap<(RelationType, EntityId), u64>,
    relation_totals: HashMap<RelationType, u64>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    /// Register `key` under `entity_type`, returning an existing id when the
    /// key was seen before. Registration order defines the dense index.
    pub fn register_entity(&mut self, entity_type: EntityType, key: &str) -> EntityId {
        let index = self.vocabs.vocab_mut(entity_type).get_or_insert(key);
        EntityId::new(entity_type, index)
    }

    pub fn entity_id(&self, entity_type: EntityType, key: &str) -> Option<EntityId> {
        self.vocabs.id_of(entity_type, key)
    }

    pub fn key_of(&self, id: EntityId) -> &str {
        self.vocabs.key_of(id)
    }

    pub fn vocabularies(&self) -> &Vocabularies {
        &self.vocabs
    }

    pub fn vocab_size(&self, t: EntityType) -> usize {
        self.vocabs.size(t)
    }

    /// Append one triplet occurrence. Duplicates accumulate multiplicity.
    pub fn add_triplet(&mut self, t: Triplet) -> Result<(), GraphError> {
        for (id, side) in [(t.head, "head"), (t.tail, "tail")] {
            if !self.vocabs.contains(id) {
                return Err(GraphError::UnknownEntity {
                    entity_type: id.entity_type,
                    key: format!("{side} {id}"),
                });
            }
        }
        if !t.relation.head_types().contains(&t.head.entity_type)
            || t.relation.tail_type() != t.tail.entity_type
        {
            return Err(GraphError::SchemaViolation {
                relation: t.relation,
                head: t.head.entity_type,
                tail: t.tail.entity_type,
                expected: format!(
                    "{} -> {}",
                    t.relation
                        .head_types()
                        .iter()
                        .map(|h| h.name())
                        .collect::<Vec<_>>()
                        .join("|"),
                    t.relation.tail_type()
                ),
            });
        }
        self.triplets.push(t);
        self.tails_by_head_rel.entry((t.head, t.relation)).or_default().push(t.tail);
        *self.cnt_head_rel_tail.entry((t.head, t.relation, t.tail)).or_insert(0) += 1;
        *self.cnt_head_rel.entry((t.head, t.relation)).or_insert(0) += 1;
        *self.tail_counts.entry((t.relation, t.tail)).or_insert(0) += 1;
        *self.relation_totals.entry(t.relation).or_insert(0) += 1;
        Ok(())
    }

    pub fn triplets(&self) -> &[Triplet] {
        &self.triplets
    }

    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    /// Observed tails of `(head, relation)`, one entry per occurrence,
    /// in insertion order. Empty slice when the pair was never seen.
    pub fn tails_of(&self, head: EntityId, relation: RelationType) -> &[EntityId] {
        self.tails_by_head_rel
            .get(&(head, relation))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Number of occurrences of the exact triplet.
    pub fn count(&self, head: EntityId, relation: RelationType, tail: EntityId) -> u64 {
        self.cnt_head_rel_tail.get(&(head, relation, tail)).copied().unwrap_or(0)
    }

    /// Number of triplet occurrences with this head and relation.
    pub fn count_head_rel(&self, head: EntityId, relation: RelationType) -> u64 {
        self.cnt_head_rel.get(&(head, relation)).copied().unwrap_or(0)
    }

    /// Number of occurrences of `relation` arriving at `tail`.
    pub fn tail_count(&self, relation: RelationType, tail: EntityId) -> u64 {
        self.tail_counts.get(&(relation, tail)).copied().unwrap_or(0)
    }

    /// Total occurrences of `relation`.
    pub fn relation_total(&self, relation: RelationType) -> u64 {
        self.relation_totals.get(&relation).copied().unwrap_or(0)
    }

    /// Relations with at least one observed triplet, in declaration order.
    pub fn relations_present(&self) -> Vec<RelationType> {
        RelationType::ALL
            .into_iter()
            .filter(|r| self.relation_total(*r) > 0)
            .collect()
    }

    /// The full tail vocabulary of `relation`, in index order. This is the
    /// candidate set every tail probability normalizes over.
    pub fn tail_candidates(&self, relation: RelationType) -> Vec<EntityId> {
        let t = relation.tail_type();
        (0..self.vocabs.size(t) as u32).map(|i| EntityId::new(t, i)).collect()
    }

    pub fn entities(&self, t: EntityType) -> impl Iterator<Item = EntityId> + '_ {
        (0..self.vocabs.size(t) as u32).map(move |i| EntityId::new(t, i))
    }

    /// Noise distribution over the tail vocabulary of `relation`: uniform for
    /// `Purchase`, otherwise proportional to observed tail frequency (unseen
    /// tails get zero mass).
    pub fn noise_distribution(&self, relation: RelationType) -> Result<NoiseDistribution, GraphError> {
        let tail_type = relation.tail_type();
        let n = self.vocabs.size(tail_type);
        if n == 0 {
            return Err(GraphError::EmptyVocabulary { relation, tail_type });
        }
        let weights: Vec<f64> = if relation == RelationType::Purchase {
            vec![1.0; n]
        } else {
            if self.relation_total(relation) == 0 {
                return Err(GraphError::EmptyVocabulary { relation, tail_type });
            }
            (0..n as u32)
                .map(|i| self.tail_count(relation, EntityId::new(tail_type, i)) as f64)
                .collect()
        };
        Ok(NoiseDistribution::from_weights(relation, weights))
    }

    /// New graph containing only the relations in `keep` (vocabularies are
    /// preserved so entity ids stay stable). `Purchase` must be kept.
    pub fn filter_relations(&self, keep: &BTreeSet<RelationType>) -> Result<Graph, GraphError> {
        if !keep.contains(&RelationType::Purchase) {
            return Err(GraphError::MissingPurchase);
        }
        let mut g = Graph { vocabs: self.vocabs.clone(), ..Graph::default() };
        for t in &self.triplets {
            if keep.contains(&t.relation) {
                g.add_triplet(*t).expect("filtered triplet was valid in the source graph");
            }
        }
        Ok(g)
    }

    /// Per-user split of purchase triplets: a seeded shuffle keeps
    /// `ceil(ratio * n)` occurrences in the training graph and holds out the
    /// rest. All non-purchase triplets stay in training. Every user needs at
    /// least two purchases.
    pub fn split_train_test(&self, ratio: f64, seed: u64) -> Result<SplitResult, GraphError> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(GraphError::InvalidRatio(ratio));
        }
        let n_users = self.vocabs.size(EntityType::User);
        // Positions of each user's purchase occurrences within the triplet list.
        let mut purchases: Vec<Vec<usize>> = vec![Vec::new(); n_users];
        for (pos, t) in self.triplets.iter().enumerate() {
            if t.relation == RelationType::Purchase {
                purchases[t.head.index as usize].push(pos);
            }
        }
        for (u, list) in purchases.iter().enumerate() {
            if list.len() < 2 {
                return Err(GraphError::InsufficientPurchases {
                    user: self.vocabs.vocab(EntityType::User).key(u as u32).to_string(),
                    purchases: list.len(),
                });
            }
        }

        let mut rng = seeds::stream_rng(seed, seeds::STREAM_SPLIT);
        let mut keep_in_train = vec![true; self.triplets.len()];
        let mut test_purchases: Vec<Vec<EntityId>> = vec![Vec::new(); n_users];
        for (u, list) in purchases.iter_mut().enumerate() {
            list.shuffle(&mut rng);
            let n_train = ((ratio * list.len() as f64).ceil() as usize).min(list.len());
            for &pos in &list[n_train..] {
                keep_in_train[pos] = false;
                test_purchases[u].push(self.triplets[pos].tail);
            }
            test_purchases[u].sort();
        }

        let mut train = Graph { vocabs: self.vocabs.clone(), ..Graph::default() };
        for (pos, t) in self.triplets.iter().enumerate() {
            if keep_in_train[pos] {
                train.add_triplet(*t).expect("split triplet was valid in the source graph");
            }
        }
        Ok(SplitResult { train, test_purchases, ratio, seed })
    }
}

/// Outcome of [`Graph::split_train_test`].
#[derive(Debug, Clone)]
pub struct SplitResult {
    /// Training graph: all non-purchase triplets plus the kept purchases.
    pub train: Graph,
    /// Held-out purchased items per user index (sorted; multiset when a user
    /// purchased the same item repeatedly).
    pub test_purchases: Vec<Vec<EntityId>>,
    pub ratio: f64,
    pub seed: u64,
}
