//! Explanation paths between a user and a recommended item.
//!
//! An explanation is an intermediate entity `e` plus two relation chains: one
//! walked forward from the user, one walked forward from the item, both
//! ending at `e`'s type. Candidate chains and meeting entities come from
//! breadth-first search over the observed triplets; each side is then scored
//! in latent space as the softmax probability of reaching `e` under the
//! chain's translated query (normalized over the full vocabulary of the
//! terminal type), and the path probability is the product of the two sides.
//! Soft matching means a path can score well even where the observed edge
//! structure is sparse, while the BFS keeps every candidate replayable
//! against real data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{EntityId, EntityType, Graph, RelationType, Vocabularies};
use crate::model::{chain_tail_type, softmax_prob, EmbeddingModel, ModelError};

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("search depth must be at least 1")]
    InvalidDepth,
    #[error("relation chains must contain at least one step")]
    EmptyChain,
    #[error("entity {0} is not registered")]
    UnknownEntity(EntityId),
    #[error("chain ends at {terminal} entities but the via entity is {via}")]
    TerminalMismatch { terminal: EntityType, via: EntityId },
    #[error("explanation queries pair a user with an item, got {user} and {item}")]
    InvalidQuery { user: EntityId, item: EntityId },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Best relation chain found for one reached entity plus its soft-matching
/// probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachEntry {
    pub probability: f64,
    pub rels: Vec<RelationType>,
}

/// Entities reachable from one start entity within a hop budget, each scored
/// by its best chain.
#[derive(Debug, Clone)]
pub struct ReachSet {
    start: EntityId,
    depth: usize,
    entries: BTreeMap<EntityId, ReachEntry>,
}

impl ReachSet {
    pub fn start(&self) -> EntityId {
        self.start
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, e: EntityId) -> Option<&ReachEntry> {
        self.entries.get(&e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (EntityId, &ReachEntry)> {
        self.entries.iter().map(|(e, entry)| (*e, entry))
    }
}

/// One ranked explanation connecting `user` and `item` through `via`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplanationPath {
    pub user: EntityId,
    pub item: EntityId,
    pub via: EntityId,
    pub user_rels: Vec<RelationType>,
    pub item_rels: Vec<RelationType>,
    pub user_side_prob: f64,
    pub item_side_prob: f64,
    /// Product of the two side probabilities.
    pub probability: f64,
}

fn check_registered(kg: &Graph, e: EntityId) -> Result<(), ExplainError> {
    if (e.index as usize) < kg.vocab_size(e.entity_type) {
        Ok(())
    } else {
        Err(ExplainError::UnknownEntity(e))
    }
}

/// Entities reachable from `start` within `z` hops of observed triplets.
///
/// Every schema-valid relation chain realized by the data is followed; each
/// reached entity is scored by the softmax probability of its chain over the
/// full vocabulary of the terminal type, and the highest-probability chain
/// per entity is kept (on an exact tie, the one earliest in (length,
/// relation-order) wins). The start entity's own chains of length zero are
/// not part of the result.
pub fn bfs_reach(
    kg: &Graph,
    model: &EmbeddingModel,
    start: EntityId,
    z: usize,
) -> Result<ReachSet, ExplainError> {
    bfs_reach_excluding(kg, model, start, z, None)
}

/// Like [`bfs_reach`] but skipping the purchase edges between one (user,
/// item) pair, so a recommendation is never explained by itself.
fn bfs_reach_excluding(
    kg: &Graph,
    model: &EmbeddingModel,
    start: EntityId,
    z: usize,
    skip_purchase: Option<(EntityId, EntityId)>,
) -> Result<ReachSet, ExplainError> {
    if z == 0 {
        return Err(ExplainError::InvalidDepth);
    }
    check_registered(kg, start)?;

    let mut entries: BTreeMap<EntityId, ReachEntry> = BTreeMap::new();
    // Chains realized at the current depth and the entities they reach.
    let mut frontier: BTreeMap<Vec<RelationType>, BTreeSet<EntityId>> = BTreeMap::new();
    frontier.insert(Vec::new(), BTreeSet::from([start]));

    for _ in 0..z {
        let mut next: BTreeMap<Vec<RelationType>, BTreeSet<EntityId>> = BTreeMap::new();
        for (chain, heads) in &frontier {
            for head in heads {
                for r in RelationType::ALL {
                    if !r.head_types().contains(&head.entity_type) {
                        continue;
                    }
                    let tails = kg.tails_of(*head, r);
                    if tails.is_empty() {
                        continue;
                    }
                    let mut chain_next = chain.clone();
                    chain_next.push(r);
                    let bucket = next.entry(chain_next).or_default();
                    for t in tails {
                        if skip_purchase == Some((*head, *t)) && r == RelationType::Purchase {
                            continue;
                        }
                        bucket.insert(*t);
                    }
                }
            }
        }
        next.retain(|_, tails| !tails.is_empty());
        for (chain, tails) in &next {
            let terminal = chain.last().expect("chains in the frontier are nonempty");
            let candidates = kg.tail_candidates(*terminal);
            for t in tails {
                let p = softmax_prob(model, start, chain, *t, &candidates)?;
                match entries.get_mut(t) {
                    Some(best) if best.probability >= p => {}
                    Some(best) => {
                        *best = ReachEntry { probability: p, rels: chain.clone() };
                    }
                    None => {
                        entries.insert(*t, ReachEntry { probability: p, rels: chain.clone() });
                    }
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }

    Ok(ReachSet { start, depth: z, entries })
}

/// Probability of an explanation path: the user-side chain probability of
/// `via` times the item-side chain probability of `via`, each a softmax over
/// the full vocabulary of `via`'s type.
pub fn path_probability(
    model: &EmbeddingModel,
    user: EntityId,
    user_rels: &[RelationType],
    item: EntityId,
    item_rels: &[RelationType],
    via: EntityId,
) -> Result<f64, ExplainError> {
    if user_rels.is_empty() || item_rels.is_empty() {
        return Err(ExplainError::EmptyChain);
    }
    for (start, rels) in [(user, user_rels), (item, item_rels)] {
        let terminal = chain_tail_type(start.entity_type, rels)?;
        if terminal != via.entity_type {
            return Err(ExplainError::TerminalMismatch { terminal, via });
        }
    }
    let candidates: Vec<EntityId> = (0..model.vocabularies().size(via.entity_type) as u32)
        .map(|i| EntityId::new(via.entity_type, i))
        .collect();
    let p_user = softmax_prob(model, user, user_rels, via, &candidates)?;
    let p_item = softmax_prob(model, item, item_rels, via, &candidates)?;
    Ok(p_user * p_item)
}

/// All explanation paths between `user` and `item` within `z_max` hops per
/// side, sorted by probability (best first, ties by via entity).
///
/// Both reach sets are computed over observed triplets, excluding the
/// purchase edges from `user` to `item` itself; every entity reached from
/// both sides yields one path combining each side's best chain. An empty
/// result means the two are not connected within the budget.
pub fn best_explanation(
    kg: &Graph,
    model: &EmbeddingModel,
    user: EntityId,
    item: EntityId,
    z_max: usize,
) -> Result<Vec<ExplanationPath>, ExplainError> {
    if user.entity_type != EntityType::User || item.entity_type != EntityType::Item {
        return Err(ExplainError::InvalidQuery { user, item });
    }
    check_registered(kg, user)?;
    check_registered(kg, item)?;
    let skip = Some((user, item));
    let user_reach = bfs_reach_excluding(kg, model, user, z_max, skip)?;
    let item_reach = bfs_reach_excluding(kg, model, item, z_max, skip)?;

    let mut paths = Vec::new();
    for (via, user_entry) in user_reach.iter() {
        let Some(item_entry) = item_reach.entry(via) else {
            continue;
        };
        paths.push(ExplanationPath {
            user,
            item,
            via,
            user_rels: user_entry.rels.clone(),
            item_rels: item_entry.rels.clone(),
            user_side_prob: user_entry.probability,
            item_side_prob: item_entry.probability,
            probability: user_entry.probability * item_entry.probability,
        });
    }
    paths.sort_by(|a, b| b.probability.total_cmp(&a.probability).then(a.via.cmp(&b.via)));
    Ok(paths)
}

fn join_rels(rels: &[RelationType]) -> String {
    let mut out = String::new();
    for (i, r) in rels.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{r}");
    }
    out
}

/// Natural-language rendering of a path, one template per known chain shape
/// and a generic fallback otherwise. Entities are shown by their keys.
pub fn render_explanation(path: &ExplanationPath, vocabs: &Vocabularies) -> String {
    use RelationType::*;
    let item = vocabs.key_of(path.item);
    let via = vocabs.key_of(path.via);
    match (path.user_rels.as_slice(), path.item_rels.as_slice()) {
        ([Mention], [Mention]) => format!(
            "{item} is recommended because the user often mentions '{via}' in their reviews, \
             and '{via}' is often mentioned in the reviews of {item}"
        ),
        ([Purchase, BoughtTogether], [BoughtTogether]) => format!(
            "{item} is recommended because the user often purchases items that are bought \
             with {via} together, and {item} is also frequently bought with {via} together"
        ),
        ([Purchase, ProducedBy], [ProducedBy]) => format!(
            "{item} is recommended because the user often purchases products produced by \
             {via}, and {item} is also produced by {via}"
        ),
        ([Purchase, BelongsTo], [BelongsTo]) => format!(
            "{item} is recommended because the user often purchases items related to the \
             category {via}, and {item} belongs to the category {via}"
        ),
        ([Purchase, AlsoBought], [AlsoBought]) => format!(
            "{item} is recommended because the user often purchases items whose buyers also \
             bought {via}, and buyers of {item} also bought {via}"
        ),
        ([Purchase, AlsoViewed], [AlsoViewed]) => format!(
            "{item} is recommended because the user often purchases items whose viewers also \
             viewed {via}, and viewers of {item} also viewed {via}"
        ),
        (user_rels, item_rels) => format!(
            "{item} is recommended because it is linked via {via} through {} and {}",
            join_rels(user_rels),
            join_rels(item_rels),
        ),
    }
}
