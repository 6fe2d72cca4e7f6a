//! Graph construction: triplet files, review/metadata corpora, and synthetic
//! clustered data.
//!
//! The triplet file is the interchange format between pipeline stages. One
//! line per occurrence:
//!
//! ```text
//! user:u42<TAB>purchase<TAB>item:B000F3A
//! item:B000F3A<TAB>belongs_to<TAB>category:hair-care
//! ```
//!
//! Lines starting with `#` and blank lines are skipped. Entities are
//! registered in first-appearance order, so parsing is fully deterministic.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use rand::Rng;
use thiserror::Error;

use crate::graph::{EntityId, EntityType, Graph, GraphError, RelationType, Triplet};
use crate::seeds;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Schema {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error("invalid synthetic config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> IngestError {
    IngestError::Parse { line, message: message.into() }
}

/// One review: who bought what and what the review text said.
#[derive(Debug, Clone)]
pub struct ReviewRecord {
    pub user_key: String,
    pub item_key: String,
    pub review_text: String,
}

/// Catalog facts about one item. Every field except the key is optional.
#[derive(Debug, Clone, Default)]
pub struct ItemMetadata {
    pub item_key: String,
    pub brand_key: Option<String>,
    pub category_keys: Vec<String>,
    pub bought_together: Vec<String>,
    pub also_bought: Vec<String>,
    pub also_viewed: Vec<String>,
}

/// Controls review tokenization and word-vocabulary selection.
#[derive(Debug, Clone)]
pub struct VocabConfig {
    /// Keep a word only if its corpus occurrence count reaches this.
    pub min_word_count: u64,
    /// Hard cap on vocabulary size; most frequent words win, ties broken by
    /// first appearance.
    pub max_vocab_size: usize,
    pub lowercase: bool,
}

impl Default for VocabConfig {
    fn default() -> Self {
        VocabConfig { min_word_count: 1, max_vocab_size: usize::MAX, lowercase: true }
    }
}

/// Split `text` into maximal alphanumeric runs, lowercased when configured.
pub fn tokenize(text: &str, cfg: &VocabConfig) -> Vec<String> {
    let lowered;
    let text = if cfg.lowercase {
        lowered = text.to_lowercase();
        &lowered
    } else {
        text
    };
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Parse a triplet file into a graph.
pub fn parse_triplets<R: BufRead>(reader: R) -> Result<Graph, IngestError> {
    let mut g = Graph::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (head, rel, tail) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(h), Some(r), Some(t), None) => (h, r, t),
            _ => return Err(parse_err(line_no, "expected exactly 3 tab-separated fields")),
        };
        let relation = RelationType::parse(rel)
            .ok_or_else(|| parse_err(line_no, format!("unknown relation '{rel}'")))?;
        let head = parse_entity_ref(&mut g, head, line_no)?;
        let tail = parse_entity_ref(&mut g, tail, line_no)?;
        g.add_triplet(Triplet::new(head, relation, tail))
            .map_err(|source| IngestError::Schema { line: line_no, source })?;
    }
    Ok(g)
}

fn parse_entity_ref(g: &mut Graph, s: &str, line_no: usize) -> Result<EntityId, IngestError> {
    let (tname, key) = s
        .split_once(':')
        .ok_or_else(|| parse_err(line_no, format!("expected type:key, got '{s}'")))?;
    let etype = EntityType::parse(tname)
        .ok_or_else(|| parse_err(line_no, format!("unknown entity type '{tname}'")))?;
    if key.is_empty() {
        return Err(parse_err(line_no, "empty entity key"));
    }
    Ok(g.register_entity(etype, key))
}

/// Serialize a graph back to the triplet format, one occurrence per line in
/// insertion order. Re-parsing the output reconstructs identical count tables.
pub fn write_triplets<W: Write>(g: &Graph, mut w: W) -> io::Result<()> {
    for t in g.triplets() {
        writeln!(
            w,
            "{}:{}\t{}\t{}:{}",
            t.head.entity_type,
            g.key_of(t.head),
            t.relation,
            t.tail.entity_type,
            g.key_of(t.tail)
        )?;
    }
    Ok(())
}

/// Build a graph from reviews and item metadata.
///
/// Each review contributes one `purchase` edge plus, for every kept token
/// occurrence, a `mention` edge from the reviewer and another from the item
/// (token multiplicity counts). Metadata contributes `produced_by`,
/// `belongs_to`, and the three item-to-item link kinds; absent fields are
/// simply skipped.
pub fn build_from_reviews(
    reviews: &[ReviewRecord],
    metadata: &[ItemMetadata],
    cfg: &VocabConfig,
) -> Graph {
    let mut g = Graph::new();

    // Corpus pass: register users/items, count token frequencies.
    let mut word_stats: HashMap<String, (u64, usize)> = HashMap::new(); // count, first position
    let mut next_pos = 0usize;
    let mut tokenized: Vec<Vec<String>> = Vec::with_capacity(reviews.len());
    for r in reviews {
        debug_assert!(!r.user_key.is_empty() && !r.item_key.is_empty());
        g.register_entity(EntityType::User, &r.user_key);
        g.register_entity(EntityType::Item, &r.item_key);
        let tokens = tokenize(&r.review_text, cfg);
        for t in &tokens {
            let e = word_stats.entry(t.clone()).or_insert((0, next_pos));
            e.0 += 1;
            next_pos += 1;
        }
        tokenized.push(tokens);
    }

    // Vocabulary selection: frequency-ranked, first appearance breaks ties.
    let mut candidates: Vec<(&String, u64, usize)> = word_stats
        .iter()
        .filter(|(_, (count, _))| *count >= cfg.min_word_count)
        .map(|(w, &(count, first))| (w, count, first))
        .collect();
    candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    candidates.truncate(cfg.max_vocab_size);
    // Register kept words in first-appearance order.
    candidates.sort_by_key(|&(_, _, first)| first);
    for (w, _, _) in &candidates {
        g.register_entity(EntityType::Word, w);
    }

    // Emission pass: purchases and mentions in review order.
    for (r, tokens) in reviews.iter().zip(&tokenized) {
        let u = g.entity_id(EntityType::User, &r.user_key).unwrap();
        let i = g.entity_id(EntityType::Item, &r.item_key).unwrap();
        g.add_triplet(Triplet::new(u, RelationType::Purchase, i)).unwrap();
        for t in tokens {
            if let Some(w) = g.entity_id(EntityType::Word, t) {
                g.add_triplet(Triplet::new(u, RelationType::Mention, w)).unwrap();
                g.add_triplet(Triplet::new(i, RelationType::Mention, w)).unwrap();
            }
        }
    }

    // Metadata pass: catalog edges, auto-registering referenced entities.
    for m in metadata {
        let i = g.register_entity(EntityType::Item, &m.item_key);
        if let Some(b) = m.brand_key.as_deref().filter(|b| !b.is_empty()) {
            let b = g.register_entity(EntityType::Brand, b);
            g.add_triplet(Triplet::new(i, RelationType::ProducedBy, b)).unwrap();
        }
        for c in &m.category_keys {
            let c = g.register_entity(EntityType::Category, c);
            g.add_triplet(Triplet::new(i, RelationType::BelongsTo, c)).unwrap();
        }
        for (list, rel) in [
            (&m.bought_together, RelationType::BoughtTogether),
            (&m.also_bought, RelationType::AlsoBought),
            (&m.also_viewed, RelationType::AlsoViewed),
        ] {
            for other_key in list {
                let other = g.register_entity(EntityType::Item, other_key);
                g.add_triplet(Triplet::new(i, rel, other)).unwrap();
            }
        }
    }

    g
}

/// Read reviews from JSON lines with `reviewerID`, `asin`, and optional
/// `reviewText` fields.
pub fn read_reviews_jsonl<R: BufRead>(reader: R) -> Result<Vec<ReviewRecord>, IngestError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| parse_err(line_no, format!("invalid JSON: {e}")))?;
        let user_key = required_str(&v, "reviewerID", line_no)?;
        let item_key = required_str(&v, "asin", line_no)?;
        let review_text = v
            .get("reviewText")
            .and_then(|t| t.as_str())
            .unwrap_or_default()
            .to_string();
        out.push(ReviewRecord { user_key, item_key, review_text });
    }
    Ok(out)
}

/// Read item metadata from JSON lines with an `asin` field and optional
/// `brand`, `categories` (flat or nested string arrays), and
/// `related.{bought_together, also_bought, also_viewed}` fields.
pub fn read_metadata_jsonl<R: BufRead>(reader: R) -> Result<Vec<ItemMetadata>, IngestError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| parse_err(line_no, format!("invalid JSON: {e}")))?;
        let item_key = required_str(&v, "asin", line_no)?;
        let brand_key = v
            .get("brand")
            .and_then(|b| b.as_str())
            .filter(|b| !b.is_empty())
            .map(str::to_string);
        let mut category_keys = Vec::new();
        if let Some(cats) = v.get("categories").and_then(|c| c.as_array()) {
            for entry in cats {
                match entry {
                    serde_json::Value::String(s) => push_unique(&mut category_keys, s),
                    serde_json::Value::Array(path) => {
                        for s in path.iter().filter_map(|s| s.as_str()) {
                            push_unique(&mut category_keys, s);
                        }
                    }
                    _ => {}
                }
            }
        }
        let related = v.get("related");
        let list = |k: &str| -> Vec<String> {
            related
                .and_then(|r| r.get(k))
                .and_then(|l| l.as_array())
                .map(|l| l.iter().filter_map(|s| s.as_str()).map(str::to_string).collect())
                .unwrap_or_default()
        };
        out.push(ItemMetadata {
            item_key,
            brand_key,
            category_keys,
            bought_together: list("bought_together"),
            also_bought: list("also_bought"),
            also_viewed: list("also_viewed"),
        });
    }
    Ok(out)
}

fn required_str(v: &serde_json::Value, field: &str, line_no: usize) -> Result<String, IngestError> {
    v.get(field)
        .and_then(|f| f.as_str())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .ok_or_else(|| parse_err(line_no, format!("missing or empty '{field}'")))
}

fn push_unique(list: &mut Vec<String>, s: &str) {
    if !list.iter().any(|x| x == s) {
        list.push(s.to_string());
    }
}

/// Parameters for [`generate_synthetic`].
#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub num_users: usize,
    pub num_items: usize,
    pub num_words: usize,
    pub num_brands: usize,
    pub num_categories: usize,
    pub cluster_count: usize,
    pub purchases_per_user: usize,
    /// Probability that a purchase stays inside the user's own cluster.
    /// Must exceed 0.5 so clusters carry signal; 1.0 means no cross traffic.
    pub within_cluster_affinity: f64,
    pub seed: u64,
}

/// Cluster labels assigned by [`generate_synthetic`], index-aligned with the
/// user and item vocabularies.
#[derive(Debug, Clone)]
pub struct ClusterAssignments {
    pub users: Vec<u32>,
    pub items: Vec<u32>,
}

/// Generate a clustered graph with planted, recoverable structure.
///
/// Users and items are assigned to clusters round-robin. Each user draws
/// `purchases_per_user` distinct items, each from the own cluster with
/// probability `within_cluster_affinity` and uniformly from the other
/// clusters otherwise. Every item carries one brand and one category aligned
/// with its cluster, and (when words are configured) one distinctive word
/// that the item and each of its buyers mention.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<(Graph, ClusterAssignments), IngestError> {
    if cfg.cluster_count == 0 {
        return Err(IngestError::Config("cluster_count must be at least 1".into()));
    }
    if !(cfg.within_cluster_affinity > 0.5 && cfg.within_cluster_affinity <= 1.0) {
        return Err(IngestError::Config(format!(
            "within_cluster_affinity must lie in (0.5, 1.0], got {}",
            cfg.within_cluster_affinity
        )));
    }
    if cfg.purchases_per_user > 0 && cfg.num_items < cfg.purchases_per_user {
        return Err(IngestError::Config(format!(
            "cannot draw {} distinct items from a catalog of {}",
            cfg.purchases_per_user, cfg.num_items
        )));
    }
    // Round-robin assignment makes the smallest cluster exactly this large.
    let min_cluster_items = cfg.num_items / cfg.cluster_count;
    if cfg.within_cluster_affinity == 1.0 && cfg.purchases_per_user > min_cluster_items {
        return Err(IngestError::Config(format!(
            "affinity 1.0 needs purchases_per_user <= smallest cluster ({min_cluster_items} items)"
        )));
    }

    let mut g = Graph::new();
    for u in 0..cfg.num_users {
        g.register_entity(EntityType::User, &format!("u{u}"));
    }
    for i in 0..cfg.num_items {
        g.register_entity(EntityType::Item, &format!("i{i}"));
    }
    for w in 0..cfg.num_words {
        g.register_entity(EntityType::Word, &format!("w{w}"));
    }
    for b in 0..cfg.num_brands {
        g.register_entity(EntityType::Brand, &format!("b{b}"));
    }
    for c in 0..cfg.num_categories {
        g.register_entity(EntityType::Category, &format!("c{c}"));
    }

    let assign = ClusterAssignments {
        users: (0..cfg.num_users as u32).map(|u| u % cfg.cluster_count as u32).collect(),
        items: (0..cfg.num_items as u32).map(|i| i % cfg.cluster_count as u32).collect(),
    };
    let cluster_items: Vec<Vec<u32>> = (0..cfg.cluster_count as u32)
        .map(|c| (0..cfg.num_items as u32).filter(|i| i % cfg.cluster_count as u32 == c).collect())
        .collect();
    // The word planted for item i: cluster-aligned, unique per item when the
    // word vocabulary is at least as large as the catalog.
    let item_word = |i: u32| -> Option<EntityId> {
        if cfg.num_words == 0 {
            return None;
        }
        let c = i % cfg.cluster_count as u32;
        let ordinal = i / cfg.cluster_count as u32;
        let per_cluster =
            (0..cfg.num_words as u32).filter(|w| w % cfg.cluster_count as u32 == c).count() as u32;
        if per_cluster == 0 {
            return None;
        }
        let w = c + cfg.cluster_count as u32 * (ordinal % per_cluster);
        Some(EntityId::new(EntityType::Word, w))
    };

    let mut rng = seeds::stream_rng(cfg.seed, seeds::STREAM_SYNTHETIC);
    for u in 0..cfg.num_users {
        let user = EntityId::new(EntityType::User, u as u32);
        let own_cluster = assign.users[u] as usize;
        let mut own_pool = cluster_items[own_cluster].clone();
        let mut other_pool: Vec<u32> = (0..cfg.num_items as u32)
            .filter(|i| *i % cfg.cluster_count as u32 != own_cluster as u32)
            .collect();
        for _ in 0..cfg.purchases_per_user {
            let in_cluster = rng.gen::<f64>() < cfg.within_cluster_affinity;
            // Fall back to the other pool when the preferred one is exhausted
            // so draws stay distinct.
            let pool = if in_cluster {
                if own_pool.is_empty() { &mut other_pool } else { &mut own_pool }
            } else if other_pool.is_empty() {
                &mut own_pool
            } else {
                &mut other_pool
            };
            let item_idx = pool.swap_remove(rng.gen_range(0..pool.len()));
            let item = EntityId::new(EntityType::Item, item_idx);
            g.add_triplet(Triplet::new(user, RelationType::Purchase, item)).unwrap();
            if let Some(w) = item_word(item_idx) {
                g.add_triplet(Triplet::new(user, RelationType::Mention, w)).unwrap();
            }
        }
    }
    for i in 0..cfg.num_items as u32 {
        let item = EntityId::new(EntityType::Item, i);
        let c = assign.items[i as usize];
        if let Some(w) = item_word(i) {
            g.add_triplet(Triplet::new(item, RelationType::Mention, w)).unwrap();
        }
        if cfg.num_categories > 0 {
            let cat = EntityId::new(EntityType::Category, c % cfg.num_categories as u32);
            g.add_triplet(Triplet::new(item, RelationType::BelongsTo, cat)).unwrap();
        }
        if cfg.num_brands > 0 {
            let b = EntityId::new(EntityType::Brand, c % cfg.num_brands as u32);
            g.add_triplet(Triplet::new(item, RelationType::ProducedBy, b)).unwrap();
        }
    }

    Ok((g, assign))
}
