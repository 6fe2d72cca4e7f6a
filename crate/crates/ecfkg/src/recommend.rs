//! Top-N item recommendation from a trained embedding model.
//!
//! A user's purchase preference for an item is the inner product between the
//! item embedding and the user's purchase-translated query `e_u + r`. Ranking
//! all items by that score (optionally after removing already-purchased ones)
//! yields the recommendation list; the softmax over items is monotone in the
//! same score, so the ranking equals the probability ranking.

use std::collections::HashSet;

use thiserror::Error;

use crate::graph::{EntityId, EntityType, RelationType};
use crate::model::{dot, trans, EmbeddingModel};

#[derive(Debug, Error)]
pub enum RecommendError {
    #[error("recommendation queries start from a user, got {0}")]
    NotAUser(EntityId),
    #[error("entity {0} is outside the model vocabulary")]
    UnknownEntity(EntityId),
}

/// Ranked recommendation list for one user: `(item, score)` pairs in
/// descending score order, at most `cutoff` long.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub user: EntityId,
    pub items: Vec<(EntityId, f64)>,
    pub cutoff: usize,
}

/// Purchase-preference score of every item for `user`, indexed by item.
pub fn score_items(model: &EmbeddingModel, user: EntityId) -> Result<Vec<f64>, RecommendError> {
    if user.entity_type != EntityType::User {
        return Err(RecommendError::NotAUser(user));
    }
    if user.index as usize >= model.vocabularies().size(EntityType::User) {
        return Err(RecommendError::UnknownEntity(user));
    }
    let query = trans(model, user, &[RelationType::Purchase])
        .expect("a user always heads the purchase relation");
    let items = model.vocabularies().size(EntityType::Item);
    Ok((0..items as u32)
        .map(|i| dot(model.entity_vector(EntityId::new(EntityType::Item, i)), &query))
        .collect())
}

/// The `n` best items for `user`, skipping `exclude` (typically the user's
/// training purchases). Ties break toward the lower item index, so the
/// ranking is total and reproducible.
pub fn top_n(
    model: &EmbeddingModel,
    user: EntityId,
    n: usize,
    exclude: &HashSet<EntityId>,
) -> Result<RankedList, RecommendError> {
    let scores = score_items(model, user)?;
    let mut items: Vec<(EntityId, f64)> = scores
        .into_iter()
        .enumerate()
        .map(|(i, s)| (EntityId::new(EntityType::Item, i as u32), s))
        .filter(|(id, _)| !exclude.contains(id))
        .collect();
    items.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.index.cmp(&b.0.index)));
    items.truncate(n);
    Ok(RankedList { user, items, cutoff: n })
}
