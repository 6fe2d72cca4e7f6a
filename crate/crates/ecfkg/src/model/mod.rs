//! Translation embeddings over the knowledge graph.
//!
//! Every entity and every relation owns one `d`-dimensional vector in a
//! shared space. A head entity predicts its tail through translation,
//! `trans(h, r) = e_h + r`, and the probability of an actual tail is the
//! softmax of inner products over the full tail vocabulary of the relation.
//! Training maximizes the likelihood of the observed triplet multiset with
//! the standard negative-sampling approximation
//!
//! ```text
//! log σ(e_t · trans) + Σ_{t' ~ noise} log σ(−e_t' · trans)
//! ```
//!
//! minimized as its negation by mini-batch SGD with a linearly decaying
//! learning rate and a global L2 clip on each batch gradient. Run
//! single-threaded, training is bitwise reproducible for a given seed.

mod checkpoint;

pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointError, CHECKPOINT_MAGIC};

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::{
    EntityId, EntityType, Graph, GraphError, RelationType, Triplet, Vocabularies,
};
pub use crate::graph::NoiseDistribution;
use crate::seeds;

/// Inputs to the sigmoid are clamped to this magnitude before
/// exponentiation, which keeps losses and gradients finite for any dot
/// product the optimizer wanders into.
pub const SIGMOID_CLAMP: f64 = 30.0;

pub(crate) fn sigmoid(x: f64) -> f64 {
    let x = x.clamp(-SIGMOID_CLAMP, SIGMOID_CLAMP);
    1.0 / (1.0 + (-x).exp())
}

pub(crate) fn log_sigmoid(x: f64) -> f64 {
    let x = x.clamp(-SIGMOID_CLAMP, SIGMOID_CLAMP);
    -(-x).exp().ln_1p()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid hyperparameters: {0}")]
    Config(String),
    #[error("cannot train on a graph with no triplets")]
    EmptyGraph,
    #[error("relation chain broken: {relation} cannot follow an entity of type {have}")]
    ChainMismatch { relation: RelationType, have: EntityType },
    #[error("candidate list is empty")]
    EmptyCandidates,
    #[error("tail entity is not among the candidates")]
    TailNotInCandidates,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Training configuration. The defaults are the reference settings:
/// 300 dimensions, 20 epochs, batches of 64, 5 negative samples, learning
/// rate decaying linearly from 0.5 to 0, batch-gradient norm clipped at 5.
#[derive(Debug, Clone)]
pub struct Hyperparams {
    pub dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    /// Negative samples drawn per observed triplet.
    pub negatives: usize,
    pub lr_initial: f64,
    pub lr_final: f64,
    pub grad_clip_norm: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            dim: 300,
            epochs: 20,
            batch_size: 64,
            negatives: 5,
            lr_initial: 0.5,
            lr_final: 0.0,
            grad_clip_norm: 5.0,
            seed: 1,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |msg: String| Err(ModelError::Config(msg));
        if self.dim == 0 {
            return fail("dim must be at least 1".into());
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1".into());
        }
        if self.batch_size == 0 {
            return fail("batch_size must be at least 1".into());
        }
        if !(self.lr_final >= 0.0 && self.lr_final <= self.lr_initial) {
            return fail(format!(
                "learning rates must satisfy 0 <= lr_final <= lr_initial, got {} -> {}",
                self.lr_initial, self.lr_final
            ));
        }
        if self.grad_clip_norm.is_nan() || self.grad_clip_norm <= 0.0 {
            return fail(format!("grad_clip_norm must be positive, got {}", self.grad_clip_norm));
        }
        Ok(())
    }
}

/// The learned embedding space: one row per entity (grouped by type) and one
/// row per relation, all `dim` wide, plus a copy of the vocabularies so a
/// model resolves keys on its own once loaded from a checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    dim: usize,
    vocabs: Vocabularies,
    entity_vecs: [Vec<f64>; 5],
    relation_vecs: Vec<f64>,
}

impl EmbeddingModel {
    /// All-zero model, the starting point for hand-built embeddings.
    pub fn zeros(vocabs: Vocabularies, dim: usize) -> Self {
        let entity_vecs = EntityType::ALL.map(|t| vec![0.0; vocabs.size(t) * dim]);
        let relation_vecs = vec![0.0; RelationType::ALL.len() * dim];
        EmbeddingModel { dim, vocabs, entity_vecs, relation_vecs }
    }

    /// Fresh model with every coordinate drawn uniformly from
    /// `[-0.5/dim, 0.5/dim]`, rows filled in type then index order.
    fn init<R: Rng>(vocabs: Vocabularies, dim: usize, rng: &mut R) -> Self {
        let bound = 0.5 / dim as f64;
        let mut m = EmbeddingModel::zeros(vocabs, dim);
        for t in EntityType::ALL {
            for v in &mut m.entity_vecs[t as usize] {
                *v = rng.gen_range(-bound..=bound);
            }
        }
        for v in &mut m.relation_vecs {
            *v = rng.gen_range(-bound..=bound);
        }
        m
    }

    pub(crate) fn from_parts(
        dim: usize,
        vocabs: Vocabularies,
        entity_vecs: [Vec<f64>; 5],
        relation_vecs: Vec<f64>,
    ) -> Self {
        for t in EntityType::ALL {
            debug_assert_eq!(entity_vecs[t as usize].len(), vocabs.size(t) * dim);
        }
        debug_assert_eq!(relation_vecs.len(), RelationType::ALL.len() * dim);
        EmbeddingModel { dim, vocabs, entity_vecs, relation_vecs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocabularies(&self) -> &Vocabularies {
        &self.vocabs
    }

    pub fn entity_vector(&self, id: EntityId) -> &[f64] {
        let start = id.index as usize * self.dim;
        &self.entity_vecs[id.entity_type as usize][start..start + self.dim]
    }

    pub fn entity_vector_mut(&mut self, id: EntityId) -> &mut [f64] {
        let start = id.index as usize * self.dim;
        &mut self.entity_vecs[id.entity_type as usize][start..start + self.dim]
    }

    pub fn relation_vector(&self, r: RelationType) -> &[f64] {
        let start = r.index() * self.dim;
        &self.relation_vecs[start..start + self.dim]
    }

    pub fn relation_vector_mut(&mut self, r: RelationType) -> &mut [f64] {
        let start = r.index() * self.dim;
        &mut self.relation_vecs[start..start + self.dim]
    }

    pub(crate) fn entity_matrix(&self, t: EntityType) -> &[f64] {
        &self.entity_vecs[t as usize]
    }

    pub(crate) fn relation_matrix(&self) -> &[f64] {
        &self.relation_vecs
    }
}

/// Entity type reached by following `rels` from an entity of type `start`,
/// or an error at the first link whose head type does not match.
pub fn chain_tail_type(
    start: EntityType,
    rels: &[RelationType],
) -> Result<EntityType, ModelError> {
    let mut running = start;
    for r in rels {
        if !r.head_types().contains(&running) {
            return Err(ModelError::ChainMismatch { relation: *r, have: running });
        }
        running = r.tail_type();
    }
    Ok(running)
}

/// Translated query vector: the entity embedding plus each relation vector in
/// the chain. The chain must be schema-compatible starting from `start`'s
/// type; an empty chain returns the entity embedding itself.
pub fn trans(
    model: &EmbeddingModel,
    start: EntityId,
    rels: &[RelationType],
) -> Result<Vec<f64>, ModelError> {
    chain_tail_type(start.entity_type, rels)?;
    let mut v = model.entity_vector(start).to_vec();
    for r in rels {
        for (vi, ri) in v.iter_mut().zip(model.relation_vector(*r)) {
            *vi += ri;
        }
    }
    Ok(v)
}

/// Softmax probability of `tail` given the translated query `start + rels`,
/// normalized over `candidates` (inner-product logits, max-stabilized).
pub fn softmax_prob(
    model: &EmbeddingModel,
    start: EntityId,
    rels: &[RelationType],
    tail: EntityId,
    candidates: &[EntityId],
) -> Result<f64, ModelError> {
    if candidates.is_empty() {
        return Err(ModelError::EmptyCandidates);
    }
    let query = trans(model, start, rels)?;
    let mut dots = Vec::with_capacity(candidates.len());
    let mut max = f64::NEG_INFINITY;
    let mut tail_dot = None;
    for c in candidates {
        let d = dot(model.entity_vector(*c), &query);
        if tail_dot.is_none() && *c == tail {
            tail_dot = Some(d);
        }
        if d > max {
            max = d;
        }
        dots.push(d);
    }
    let tail_dot = tail_dot.ok_or(ModelError::TailNotInCandidates)?;
    let z: f64 = dots.iter().map(|d| (d - max).exp()).sum();
    Ok((tail_dot - max).exp() / z)
}

/// Negative-sampling loss of one triplet:
/// `-(log σ(x_pos) + Σ log σ(−x_neg))` where `x = e · (e_head + r)`.
pub fn ns_loss(model: &EmbeddingModel, t: &Triplet, negatives: &[EntityId]) -> f64 {
    let head = model.entity_vector(t.head);
    let rel = model.relation_vector(t.relation);
    let query: Vec<f64> = head.iter().zip(rel).map(|(h, r)| h + r).collect();
    let mut loss = -log_sigmoid(dot(model.entity_vector(t.tail), &query));
    for n in negatives {
        loss -= log_sigmoid(-dot(model.entity_vector(*n), &query));
    }
    loss
}

/// Addressable row in a sparse gradient: either an entity embedding or a
/// relation embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GradKey {
    Entity(EntityId),
    Relation(RelationType),
}

/// Sparse gradient holding only the rows a triplet touches. Ordered keys keep
/// norm computation and updates reproducible.
#[derive(Debug, Clone, Default)]
pub struct SparseGrad {
    pub rows: BTreeMap<GradKey, Vec<f64>>,
}

impl SparseGrad {
    pub fn get(&self, key: GradKey) -> Option<&[f64]> {
        self.rows.get(&key).map(Vec::as_slice)
    }

    pub fn l2_norm(&self) -> f64 {
        self.rows
            .values()
            .map(|g| g.iter().map(|x| x * x).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }
}

/// Gradient of [`ns_loss`] with respect to every touched row: the tail, each
/// negative (duplicates accumulate), and the shared head/relation direction.
pub fn ns_gradients(model: &EmbeddingModel, t: &Triplet, negatives: &[EntityId]) -> SparseGrad {
    let mut grad = SparseGrad::default();
    accumulate_ns(model, t, negatives, &mut grad.rows);
    grad
}

/// Adds one triplet's loss gradient into `grad`, returning the loss value.
fn accumulate_ns(
    model: &EmbeddingModel,
    t: &Triplet,
    negatives: &[EntityId],
    grad: &mut BTreeMap<GradKey, Vec<f64>>,
) -> f64 {
    let d = model.dim;
    let head = model.entity_vector(t.head);
    let rel = model.relation_vector(t.relation);
    let query: Vec<f64> = head.iter().zip(rel).map(|(h, r)| h + r).collect();

    let tail_vec = model.entity_vector(t.tail);
    let x_pos = dot(tail_vec, &query);
    let mut loss = -log_sigmoid(x_pos);
    // d(-log σ(x))/dx = -σ(-x)
    let coef_pos = -sigmoid(-x_pos);

    // Direction shared by the head and relation rows.
    let mut head_dir: Vec<f64> = tail_vec.iter().map(|v| coef_pos * v).collect();
    axpy(grad.entry(GradKey::Entity(t.tail)).or_insert_with(|| vec![0.0; d]), coef_pos, &query);

    for n in negatives {
        let neg_vec = model.entity_vector(*n);
        let x_neg = dot(neg_vec, &query);
        loss -= log_sigmoid(-x_neg);
        // d(-log σ(-x))/dx = σ(x)
        let coef_neg = sigmoid(x_neg);
        axpy(grad.entry(GradKey::Entity(*n)).or_insert_with(|| vec![0.0; d]), coef_neg, &query);
        for (h, v) in head_dir.iter_mut().zip(neg_vec) {
            *h += coef_neg * v;
        }
    }

    axpy(grad.entry(GradKey::Entity(t.head)).or_insert_with(|| vec![0.0; d]), 1.0, &head_dir);
    axpy(grad.entry(GradKey::Relation(t.relation)).or_insert_with(|| vec![0.0; d]), 1.0, &head_dir);
    loss
}

fn axpy(acc: &mut [f64], a: f64, x: &[f64]) {
    for (acc_i, x_i) in acc.iter_mut().zip(x) {
        *acc_i += a * x_i;
    }
}

/// `k` independent draws from the relation's noise distribution, with
/// replacement and without filtering against the observed tail.
pub fn sample_negatives<R: Rng + ?Sized>(
    dist: &NoiseDistribution,
    k: usize,
    rng: &mut R,
) -> Vec<EntityId> {
    (0..k).map(|_| dist.sample(rng)).collect()
}

/// Per-epoch training trace.
#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Mean negative-sampling loss per triplet, one entry per epoch.
    pub epoch_losses: Vec<f64>,
    pub triplets_processed: u64,
    pub duration: Duration,
}

/// Train an embedding model on `kg`.
///
/// Each epoch shuffles the triplet multiset (seeded), walks it in batches,
/// accumulates the batch gradient, clips its global L2 norm at
/// `grad_clip_norm`, and applies one SGD step with the learning rate decayed
/// linearly per batch from `lr_initial` toward `lr_final` over the whole run.
pub fn train(kg: &Graph, hp: &Hyperparams) -> Result<(EmbeddingModel, TrainReport), ModelError> {
    hp.validate()?;
    if kg.is_empty() {
        return Err(ModelError::EmptyGraph);
    }

    let start = Instant::now();
    let mut init_rng = seeds::stream_rng(hp.seed, seeds::STREAM_INIT);
    let mut model = EmbeddingModel::init(kg.vocabularies().clone(), hp.dim, &mut init_rng);

    let mut dists: [Option<NoiseDistribution>; 7] = Default::default();
    for r in kg.relations_present() {
        dists[r.index()] = Some(kg.noise_distribution(r)?);
    }

    let n = kg.len();
    let batches_per_epoch = n.div_ceil(hp.batch_size);
    let total_batches = (hp.epochs * batches_per_epoch) as f64;
    let mut shuffle_rng = seeds::stream_rng(hp.seed, seeds::STREAM_SHUFFLE);
    let mut neg_rng = seeds::stream_rng(hp.seed, seeds::STREAM_NEGATIVE);

    let mut order: Vec<usize> = (0..n).collect();
    let mut epoch_losses = Vec::with_capacity(hp.epochs);
    let mut global_batch = 0usize;
    for _ in 0..hp.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(hp.batch_size) {
            let lr = hp.lr_initial
                + (hp.lr_final - hp.lr_initial) * (global_batch as f64 / total_batches);
            let mut grad: BTreeMap<GradKey, Vec<f64>> = BTreeMap::new();
            for &idx in chunk {
                let t = &kg.triplets()[idx];
                let dist = dists[t.relation.index()]
                    .as_ref()
                    .expect("noise distribution exists for every observed relation");
                let negatives = sample_negatives(dist, hp.negatives, &mut neg_rng);
                epoch_loss += accumulate_ns(&model, t, &negatives, &mut grad);
            }
            let norm = grad
                .values()
                .map(|g| g.iter().map(|x| x * x).sum::<f64>())
                .sum::<f64>()
                .sqrt();
            let step = if norm > hp.grad_clip_norm {
                lr * hp.grad_clip_norm / norm
            } else {
                lr
            };
            for (key, g) in &grad {
                let row = match key {
                    GradKey::Entity(id) => model.entity_vector_mut(*id),
                    GradKey::Relation(r) => model.relation_vector_mut(*r),
                };
                for (w, g_i) in row.iter_mut().zip(g) {
                    *w -= step * g_i;
                }
            }
            global_batch += 1;
        }
        epoch_losses.push(epoch_loss / n as f64);
    }

    let report = TrainReport {
        epoch_losses,
        triplets_processed: (hp.epochs * n) as u64,
        duration: start.elapsed(),
    };
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::ingest::{generate_synthetic, SyntheticConfig};

    fn uid(i: u32) -> EntityId {
        EntityId::new(EntityType::User, i)
    }
    fn iid(i: u32) -> EntityId {
        EntityId::new(EntityType::Item, i)
    }

    /// 2 users, 3 items, 2 words, dim-2 zero model over a tiny graph.
    fn tiny_setup(dim: usize) -> (Graph, EmbeddingModel) {
        let mut g = Graph::new();
        for k in ["u0", "u1"] {
            g.register_entity(EntityType::User, k);
        }
        for k in ["i0", "i1", "i2"] {
            g.register_entity(EntityType::Item, k);
        }
        for k in ["w0", "w1"] {
            g.register_entity(EntityType::Word, k);
        }
        g.add_triplet(Triplet::new(uid(0), RelationType::Purchase, iid(0))).unwrap();
        g.add_triplet(Triplet::new(uid(0), RelationType::Purchase, iid(1))).unwrap();
        g.add_triplet(Triplet::new(uid(1), RelationType::Purchase, iid(2))).unwrap();
        let model = EmbeddingModel::zeros(g.vocabularies().clone(), dim);
        (g, model)
    }

    #[test]
    fn trans_adds_relation_vectors_along_the_chain() {
        let (_, mut m) = tiny_setup(2);
        m.entity_vector_mut(uid(0)).copy_from_slice(&[0.5, 0.5]);
        m.relation_vector_mut(RelationType::Purchase).copy_from_slice(&[1.0, 0.0]);
        m.relation_vector_mut(RelationType::BoughtTogether).copy_from_slice(&[0.0, 2.0]);
        let v = trans(&m, uid(0), &[RelationType::Purchase, RelationType::BoughtTogether]).unwrap();
        assert_eq!(v, vec![1.5, 2.5]);
        // empty chain is the identity
        assert_eq!(trans(&m, uid(0), &[]).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn trans_rejects_incompatible_chains() {
        let (_, m) = tiny_setup(2);
        // a word cannot head any relation; an item cannot head a purchase
        let err = trans(&m, iid(0), &[RelationType::Purchase]).unwrap_err();
        assert!(matches!(err, ModelError::ChainMismatch { .. }));
        let err =
            trans(&m, uid(0), &[RelationType::Mention, RelationType::Purchase]).unwrap_err();
        assert!(matches!(
            err,
            ModelError::ChainMismatch { relation: RelationType::Purchase, have: EntityType::Word }
        ));
    }

    #[test]
    fn softmax_is_uniform_when_logits_tie() {
        let (g, m) = tiny_setup(2);
        let candidates = g.tail_candidates(RelationType::Purchase);
        let p = softmax_prob(&m, uid(0), &[RelationType::Purchase], iid(1), &candidates).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn softmax_single_candidate_is_certain() {
        let (_, m) = tiny_setup(2);
        let p = softmax_prob(&m, uid(0), &[RelationType::Purchase], iid(0), &[iid(0)]).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn softmax_matches_a_hand_computed_case() {
        // dots (ln 2, 0, 0) over three candidates puts probability 1/2 on the first
        let (g, mut m) = tiny_setup(2);
        m.entity_vector_mut(uid(0)).copy_from_slice(&[1.0, 0.0]);
        m.entity_vector_mut(iid(0)).copy_from_slice(&[2.0f64.ln(), 0.0]);
        let candidates = g.tail_candidates(RelationType::Purchase);
        let p = softmax_prob(&m, uid(0), &[], iid(0), &candidates).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn softmax_normalizes_over_candidates() {
        let (g, mut m) = tiny_setup(4);
        let mut rng = seeds::stream_rng(3, 0);
        for i in 0..3 {
            let row: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            m.entity_vector_mut(iid(i)).copy_from_slice(&row);
        }
        let candidates = g.tail_candidates(RelationType::Purchase);
        let total: f64 = candidates
            .iter()
            .map(|c| softmax_prob(&m, uid(0), &[RelationType::Purchase], *c, &candidates).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_rejects_empty_candidates() {
        let (_, m) = tiny_setup(2);
        assert!(matches!(
            softmax_prob(&m, uid(0), &[RelationType::Purchase], iid(0), &[]),
            Err(ModelError::EmptyCandidates)
        ));
    }

    #[test]
    fn zero_model_loss_is_a_known_constant() {
        // every dot is 0, σ(0) = 1/2: loss = (1 + k) ln 2
        let (_, m) = tiny_setup(8);
        let t = Triplet::new(uid(0), RelationType::Purchase, iid(0));
        let negs = vec![iid(1); 5];
        let loss = ns_loss(&m, &t, &negs);
        assert!((loss - 6.0 * std::f64::consts::LN_2).abs() < 1e-12);
        // no negatives at all
        assert!((ns_loss(&m, &t, &[]) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn loss_decreases_as_the_positive_dot_grows() {
        let (_, mut m) = tiny_setup(2);
        let t = Triplet::new(uid(0), RelationType::Purchase, iid(0));
        m.entity_vector_mut(iid(0)).copy_from_slice(&[1.0, 0.0]);
        let mut last = f64::INFINITY;
        for s in 0..5 {
            m.entity_vector_mut(uid(0)).copy_from_slice(&[s as f64, 0.0]);
            let loss = ns_loss(&m, &t, &[]);
            assert!(loss < last);
            last = loss;
        }
    }

    #[test]
    fn zero_model_gradients_balance_positive_and_negatives() {
        // With all vectors zero: query = 0, every coefficient is ±1/2, but all
        // directions are zero vectors, so the gradient rows are exactly zero.
        let (_, m) = tiny_setup(4);
        let t = Triplet::new(uid(0), RelationType::Purchase, iid(0));
        let g = ns_gradients(&m, &t, &[iid(1), iid(2)]);
        for row in g.rows.values() {
            assert!(row.iter().all(|x| *x == 0.0));
        }
        assert_eq!(g.rows.len(), 5); // head, tail, 2 negatives, relation
    }

    #[test]
    fn duplicate_negatives_accumulate_linearly() {
        let (_, mut m) = tiny_setup(3);
        let mut rng = seeds::stream_rng(9, 0);
        for i in 0..3 {
            let row: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            m.entity_vector_mut(iid(i)).copy_from_slice(&row);
        }
        let t = Triplet::new(uid(0), RelationType::Purchase, iid(0));
        let single = ns_gradients(&m, &t, &[iid(2)]);
        let double = ns_gradients(&m, &t, &[iid(2), iid(2)]);
        let s = single.get(GradKey::Entity(iid(2))).unwrap();
        let d = double.get(GradKey::Entity(iid(2))).unwrap();
        for (a, b) in s.iter().zip(d) {
            assert!((2.0 * a - b).abs() < 1e-12);
        }
    }

    /// Central finite difference of ns_loss with respect to one coordinate.
    fn fd_grad(
        model: &EmbeddingModel,
        t: &Triplet,
        negs: &[EntityId],
        key: GradKey,
        coord: usize,
        h: f64,
    ) -> f64 {
        let mut plus = model.clone();
        let mut minus = model.clone();
        match key {
            GradKey::Entity(id) => {
                plus.entity_vector_mut(id)[coord] += h;
                minus.entity_vector_mut(id)[coord] -= h;
            }
            GradKey::Relation(r) => {
                plus.relation_vector_mut(r)[coord] += h;
                minus.relation_vector_mut(r)[coord] -= h;
            }
        }
        (ns_loss(&plus, t, negs) - ns_loss(&minus, t, negs)) / (2.0 * h)
    }

    #[test]
    fn gradients_match_finite_differences() {
        let dim = 5;
        let (_, mut m) = tiny_setup(dim);
        let mut rng = seeds::stream_rng(4, 0);
        for i in 0..3 {
            let row: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            m.entity_vector_mut(iid(i)).copy_from_slice(&row);
        }
        let row: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        m.entity_vector_mut(uid(0)).copy_from_slice(&row);
        let row: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        m.relation_vector_mut(RelationType::Purchase).copy_from_slice(&row);

        let t = Triplet::new(uid(0), RelationType::Purchase, iid(0));
        let negs = vec![iid(1), iid(2), iid(1)];
        let grad = ns_gradients(&m, &t, &negs);
        for (key, row) in &grad.rows {
            let mut diff_sq = 0.0;
            let mut fd_sq = 0.0;
            for (coord, analytic) in row.iter().enumerate() {
                let fd = fd_grad(&m, &t, &negs, *key, coord, 1e-5);
                diff_sq += (analytic - fd).powi(2);
                fd_sq += fd * fd;
            }
            let rel = diff_sq.sqrt() / fd_sq.sqrt().max(1e-12);
            assert!(rel < 1e-6, "row {key:?} relative error {rel}");
        }
    }

    #[test]
    fn negative_sampling_matches_the_noise_distribution() {
        let mut g = Graph::new();
        g.register_entity(EntityType::User, "u0");
        for i in 0..2 {
            g.register_entity(EntityType::Item, &format!("i{i}"));
        }
        let w0 = g.register_entity(EntityType::Word, "w0");
        let w1 = g.register_entity(EntityType::Word, "w1");
        for _ in 0..9 {
            g.add_triplet(Triplet::new(uid(0), RelationType::Mention, w0)).unwrap();
        }
        g.add_triplet(Triplet::new(uid(0), RelationType::Mention, w1)).unwrap();
        let dist = g.noise_distribution(RelationType::Mention).unwrap();
        let mut rng = seeds::stream_rng(8, 0);
        let draws = sample_negatives(&dist, 100_000, &mut rng);
        let w0_share = draws.iter().filter(|e| **e == w0).count() as f64 / draws.len() as f64;
        assert!((w0_share - 0.9).abs() < 0.01, "share {w0_share}");
        assert!(sample_negatives(&dist, 0, &mut rng).is_empty());
    }

    fn small_synthetic() -> Graph {
        let cfg = SyntheticConfig {
            num_users: 12,
            num_items: 12,
            num_words: 12,
            num_brands: 2,
            num_categories: 2,
            cluster_count: 2,
            purchases_per_user: 4,
            within_cluster_affinity: 0.9,
            seed: 5,
        };
        generate_synthetic(&cfg).unwrap().0
    }

    #[test]
    fn training_reduces_the_mean_loss() {
        let g = small_synthetic();
        let hp = Hyperparams { dim: 16, epochs: 20, seed: 3, ..Hyperparams::default() };
        let (_, report) = train(&g, &hp).unwrap();
        let first = report.epoch_losses[0];
        let last = *report.epoch_losses.last().unwrap();
        assert!(
            last < first,
            "loss did not decrease: first {first}, last {last}"
        );
        assert_eq!(report.epoch_losses.len(), 20);
        assert_eq!(report.triplets_processed, 20 * g.len() as u64);
    }

    #[test]
    fn training_is_bitwise_reproducible() {
        let g = small_synthetic();
        let hp = Hyperparams { dim: 8, epochs: 3, seed: 11, ..Hyperparams::default() };
        let (a, ra) = train(&g, &hp).unwrap();
        let (b, rb) = train(&g, &hp).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.epoch_losses, rb.epoch_losses);
        let hp2 = Hyperparams { seed: 12, ..hp };
        let (c, _) = train(&g, &hp2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_learning_rate_leaves_the_initialization_untouched() {
        let g = small_synthetic();
        let hp = Hyperparams {
            dim: 8,
            epochs: 2,
            lr_initial: 0.0,
            lr_final: 0.0,
            seed: 21,
            ..Hyperparams::default()
        };
        let (trained, _) = train(&g, &hp).unwrap();
        let mut init_rng = seeds::stream_rng(21, seeds::STREAM_INIT);
        let init = EmbeddingModel::init(g.vocabularies().clone(), 8, &mut init_rng);
        assert_eq!(trained, init);
    }

    #[test]
    fn initialization_respects_the_uniform_bound() {
        let g = small_synthetic();
        let dim = 8;
        let mut rng = seeds::stream_rng(2, seeds::STREAM_INIT);
        let m = EmbeddingModel::init(g.vocabularies().clone(), dim, &mut rng);
        let bound = 0.5 / dim as f64;
        for t in EntityType::ALL {
            for v in m.entity_matrix(t) {
                assert!(v.abs() <= bound);
            }
        }
        for v in m.relation_matrix() {
            assert!(v.abs() <= bound);
        }
    }

    #[test]
    fn clipped_batch_updates_have_the_exact_budget_norm() {
        // One triplet, one batch, a clip far below the raw gradient norm: the
        // applied update must have L2 norm equal to lr * clip.
        let mut g = Graph::new();
        g.register_entity(EntityType::User, "u0");
        g.register_entity(EntityType::Item, "i0");
        g.register_entity(EntityType::Item, "i1");
        g.add_triplet(Triplet::new(uid(0), RelationType::Purchase, iid(0))).unwrap();
        let hp = Hyperparams {
            dim: 4,
            epochs: 1,
            batch_size: 1,
            negatives: 5,
            lr_initial: 0.25,
            lr_final: 0.25,
            grad_clip_norm: 1e-6,
            seed: 6,
        };
        let (trained, _) = train(&g, &hp).unwrap();
        let mut init_rng = seeds::stream_rng(6, seeds::STREAM_INIT);
        let init = EmbeddingModel::init(g.vocabularies().clone(), 4, &mut init_rng);

        let mut update_sq = 0.0;
        for t in EntityType::ALL {
            for (a, b) in trained.entity_matrix(t).iter().zip(init.entity_matrix(t)) {
                update_sq += (a - b).powi(2);
            }
        }
        for (a, b) in trained.relation_matrix().iter().zip(init.relation_matrix()) {
            update_sq += (a - b).powi(2);
        }
        let expected = 0.25 * 1e-6;
        assert!(
            (update_sq.sqrt() - expected).abs() < expected * 1e-9,
            "update norm {} vs {}",
            update_sq.sqrt(),
            expected
        );
    }

    #[test]
    fn invalid_hyperparameters_are_rejected() {
        let g = small_synthetic();
        for hp in [
            Hyperparams { dim: 0, ..Hyperparams::default() },
            Hyperparams { epochs: 0, ..Hyperparams::default() },
            Hyperparams { batch_size: 0, ..Hyperparams::default() },
            Hyperparams { lr_initial: 0.1, lr_final: 0.2, ..Hyperparams::default() },
            Hyperparams { lr_final: -0.1, ..Hyperparams::default() },
            Hyperparams { grad_clip_norm: 0.0, ..Hyperparams::default() },
        ] {
            assert!(matches!(train(&g, &hp), Err(ModelError::Config(_))), "{hp:?}");
        }
        assert!(matches!(
            train(&Graph::new(), &Hyperparams::default()),
            Err(ModelError::EmptyGraph)
        ));
    }
}
