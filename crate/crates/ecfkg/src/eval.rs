//! Top-N ranking metrics, test-split evaluation, ablation runs, and paired
//! significance testing.
//!
//! Metrics are macro-averaged: each user contributes one [`MetricSet`]
//! computed from their top-k list against their held-out purchases, and the
//! aggregate is the arithmetic mean. Per-user evaluation runs in parallel;
//! results are collected in user order before aggregation, so reports are
//! deterministic for a given model and split.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{
    EntityId, EntityType, Graph, GraphError, RelationType, SplitResult, Vocabularies,
};
use crate::model::{train, EmbeddingModel, Hyperparams, ModelError};
use crate::recommend::{top_n, RecommendError};
use crate::seeds;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot compute metrics against an empty relevant set")]
    EmptyRelevantSet,
    #[error("model vocabularies do not match the split's training graph")]
    VocabularyMismatch,
    #[error("paired samples differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("significance testing needs at least one paired sample")]
    EmptySamples,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Recommend(#[from] RecommendError),
}

/// Ranking quality of one top-k list (or a macro-average of many).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSet {
    pub ndcg: f64,
    pub recall: f64,
    pub precision: f64,
    pub hit_ratio: f64,
    pub k: usize,
}

/// Binary-relevance ranking metrics over the first `k` ranked items.
///
/// `precision = |hits|/k`, `recall = |hits|/|relevant|`, `hit_ratio` is 1
/// exactly when any hit occurs, and NDCG discounts each hit at 1-based
/// position `p` by `1/log2(p+1)`, normalized by the ideal prefix of length
/// `min(k, |relevant|)`.
pub fn metrics_at_k(
    ranked: &[EntityId],
    relevant: &HashSet<EntityId>,
    k: usize,
) -> Result<MetricSet, EvalError> {
    assert!(k >= 1, "cutoff must be at least 1");
    debug_assert!(
        {
            let mut seen = HashSet::new();
            ranked.iter().all(|i| seen.insert(*i))
        },
        "ranked items must be distinct"
    );
    if relevant.is_empty() {
        return Err(EvalError::EmptyRelevantSet);
    }
    let discount = |p: usize| 1.0 / ((p + 1) as f64).log2();
    let mut hits = 0usize;
    let mut dcg = 0.0;
    for (i, item) in ranked.iter().take(k).enumerate() {
        if relevant.contains(item) {
            hits += 1;
            dcg += discount(i + 1);
        }
    }
    let idcg: f64 = (1..=k.min(relevant.len())).map(discount).sum();
    Ok(MetricSet {
        ndcg: dcg / idcg,
        recall: hits as f64 / relevant.len() as f64,
        precision: hits as f64 / k as f64,
        hit_ratio: if hits >= 1 { 1.0 } else { 0.0 },
        k,
    })
}

/// Configuration echoed into a report so result files are self-describing.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub relations: Vec<RelationType>,
    pub dim: usize,
    pub seed: u64,
}

/// Evaluation results: one metric set per test user plus their macro-average
/// (`None` when no user had held-out purchases).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_user: Vec<(EntityId, MetricSet)>,
    pub aggregate: Option<MetricSet>,
    pub users: usize,
    pub config: EvalConfig,
}

impl EvalReport {
    /// Fixed-width summary table, metric values as percentages.
    pub fn to_pretty_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:<4} {:<10} {:<10} {:<10} {:<10}",
            "users", "k", "NDCG", "Recall", "HR", "Prec."
        );
        match &self.aggregate {
            Some(m) => {
                let pct = |v: f64| format!("{:.3}%", v * 100.0);
                let _ = writeln!(
                    out,
                    "{:<8} {:<4} {:<10} {:<10} {:<10} {:<10}",
                    self.users,
                    m.k,
                    pct(m.ndcg),
                    pct(m.recall),
                    pct(m.hit_ratio),
                    pct(m.precision)
                );
            }
            None => {
                let _ = writeln!(out, "no users with held-out purchases");
            }
        }
        out
    }

    /// Per-user TSV with a trailing macro-average row, raw fractions.
    pub fn to_tsv(&self, vocabs: &Vocabularies) -> String {
        let mut out = String::from("user\tk\tndcg\trecall\thit_ratio\tprecision\n");
        for (user, m) in &self.per_user {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                vocabs.key_of(*user),
                m.k,
                m.ndcg,
                m.recall,
                m.hit_ratio,
                m.precision
            );
        }
        if let Some(m) = &self.aggregate {
            let _ = writeln!(
                out,
                "macro_average\t{}\t{}\t{}\t{}\t{}",
                m.k, m.ndcg, m.recall, m.hit_ratio, m.precision
            );
        }
        out
    }
}

/// Evaluate a trained model against a split's held-out purchases at
/// cutoff `k`.
///
/// Each user with nonempty test purchases is scored on their top-k list with
/// training purchases excluded. Users whose purchases all landed in the
/// training side are skipped.
pub fn evaluate(
    model: &EmbeddingModel,
    split: &SplitResult,
    k: usize,
) -> Result<EvalReport, EvalError> {
    if model.vocabularies() != split.train.vocabularies() {
        return Err(EvalError::VocabularyMismatch);
    }
    let users: Vec<u32> = (0..split.test_purchases.len() as u32)
        .filter(|u| !split.test_purchases[*u as usize].is_empty())
        .collect();
    let per_user: Result<Vec<(EntityId, MetricSet)>, EvalError> = users
        .par_iter()
        .map(|&u| {
            let user = EntityId::new(EntityType::User, u);
            let relevant: HashSet<EntityId> =
                split.test_purchases[u as usize].iter().copied().collect();
            let exclude: HashSet<EntityId> = split
                .train
                .tails_of(user, RelationType::Purchase)
                .iter()
                .copied()
                .collect();
            let ranked = top_n(model, user, k, &exclude)?;
            let items: Vec<EntityId> = ranked.items.iter().map(|(id, _)| *id).collect();
            let metrics = metrics_at_k(&items, &relevant, k)?;
            Ok((user, metrics))
        })
        .collect();
    let per_user = per_user?;

    let users = per_user.len();
    let aggregate = (users > 0).then(|| {
        let mut sum = MetricSet { ndcg: 0.0, recall: 0.0, precision: 0.0, hit_ratio: 0.0, k };
        for (_, m) in &per_user {
            sum.ndcg += m.ndcg;
            sum.recall += m.recall;
            sum.precision += m.precision;
            sum.hit_ratio += m.hit_ratio;
        }
        let n = users as f64;
        MetricSet {
            ndcg: sum.ndcg / n,
            recall: sum.recall / n,
            precision: sum.precision / n,
            hit_ratio: sum.hit_ratio / n,
            k,
        }
    });

    Ok(EvalReport {
        per_user,
        aggregate,
        users,
        config: EvalConfig {
            relations: split.train.relations_present(),
            dim: model.dim(),
            seed: split.seed,
        },
    })
}

/// Outcome of a paired sign-flip randomization test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignificanceResult {
    pub p_value: f64,
    /// Sign patterns examined: `2^n` when enumerated exactly, the requested
    /// iteration count when sampled.
    pub iterations: u64,
    /// Mean of the paired differences `a - b`.
    pub observed_diff: f64,
}

/// Two-sided paired randomization test on per-user values.
///
/// The observed statistic is the mean difference; each permutation flips the
/// sign of every pair independently, and the p-value is the share of
/// permutations at least as extreme. Up to 12 pairs all `2^n` sign patterns
/// are enumerated and the p-value is exact; beyond that `iterations` random
/// patterns are sampled and the add-one-smoothed estimate
/// `(c + 1) / (iterations + 1)` is returned.
pub fn fisher_randomization(
    a: &[f64],
    b: &[f64],
    iterations: u64,
    seed: u64,
) -> Result<SignificanceResult, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(EvalError::EmptySamples);
    }
    let n = a.len();
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let observed = diffs.iter().sum::<f64>() / n as f64;
    // Tolerance for "at least as extreme": permuted sums are the same values
    // re-added with flipped signs, so exact ties can drift by rounding.
    let threshold = observed.abs() - 1e-12;

    if n <= 12 {
        let patterns: u64 = 1 << n;
        let mut extreme = 0u64;
        for mask in 0..patterns {
            let sum: f64 = diffs
                .iter()
                .enumerate()
                .map(|(i, d)| if mask >> i & 1 == 1 { -d } else { *d })
                .sum();
            if (sum / n as f64).abs() >= threshold {
                extreme += 1;
            }
        }
        return Ok(SignificanceResult {
            p_value: extreme as f64 / patterns as f64,
            iterations: patterns,
            observed_diff: observed,
        });
    }

    let mut rng = seeds::stream_rng(seed, seeds::STREAM_SIGNIFICANCE);
    let mut extreme = 0u64;
    for _ in 0..iterations {
        let sum: f64 = diffs.iter().map(|d| if rng.gen::<bool>() { -d } else { *d }).sum();
        if (sum / n as f64).abs() >= threshold {
            extreme += 1;
        }
    }
    Ok(SignificanceResult {
        p_value: (extreme + 1) as f64 / (iterations + 1) as f64,
        iterations,
        observed_diff: observed,
    })
}

/// One relation-subset experiment: filter, split, train, evaluate — all from
/// the same seed so every subset sees the identical purchase split.
pub fn run_ablation(
    kg: &Graph,
    relation_sets: &[std::collections::BTreeSet<RelationType>],
    hp: &Hyperparams,
    k: usize,
    ratio: f64,
) -> Result<Vec<(std::collections::BTreeSet<RelationType>, EvalReport)>, EvalError> {
    let mut reports = Vec::with_capacity(relation_sets.len());
    for subset in relation_sets {
        let filtered = kg.filter_relations(subset)?;
        let split = filtered.split_train_test(ratio, hp.seed)?;
        let (model, _) = train(&split.train, hp)?;
        let report = evaluate(&model, &split, k)?;
        reports.push((subset.clone(), report));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Triplet;
    use crate::ingest::{generate_synthetic, SyntheticConfig};
    use rand::Rng;
    use std::collections::BTreeSet;

    fn uid(i: u32) -> EntityId {
        EntityId::new(EntityType::User, i)
    }
    fn iid(i: u32) -> EntityId {
        EntityId::new(EntityType::Item, i)
    }

    #[test]
    fn single_hit_at_rank_one_is_perfect_ndcg() {
        let ranked: Vec<EntityId> = (0..10).map(iid).collect();
        let relevant = HashSet::from([iid(0)]);
        let m = metrics_at_k(&ranked, &relevant, 10).unwrap();
        assert_eq!(m.ndcg, 1.0);
        assert_eq!(m.recall, 1.0);
        assert!((m.precision - 0.1).abs() < 1e-15);
        assert_eq!(m.hit_ratio, 1.0);
    }

    #[test]
    fn single_hit_at_rank_two_discounts_by_log() {
        let ranked: Vec<EntityId> = (0..10).map(iid).collect();
        let relevant = HashSet::from([iid(1)]);
        let m = metrics_at_k(&ranked, &relevant, 10).unwrap();
        assert!((m.ndcg - 1.0 / 3.0f64.log2()).abs() < 1e-12);
        assert!((m.ndcg - 0.6309297535714574).abs() < 1e-12);
    }

    #[test]
    fn missing_all_relevant_items_zeroes_every_metric() {
        let ranked: Vec<EntityId> = (0..10).map(iid).collect();
        let relevant = HashSet::from([iid(50)]);
        let m = metrics_at_k(&ranked, &relevant, 10).unwrap();
        assert_eq!((m.ndcg, m.recall, m.precision, m.hit_ratio), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn empty_relevant_set_is_an_error() {
        let ranked: Vec<EntityId> = (0..3).map(iid).collect();
        assert!(matches!(
            metrics_at_k(&ranked, &HashSet::new(), 10),
            Err(EvalError::EmptyRelevantSet)
        ));
    }

    #[test]
    fn idcg_truncates_at_the_cutoff() {
        // 5 relevant, k=3, all three ranked slots hit: ndcg must be 1
        let ranked: Vec<EntityId> = (0..3).map(iid).collect();
        let relevant: HashSet<EntityId> = (0..5).map(iid).collect();
        let m = metrics_at_k(&ranked, &relevant, 3).unwrap();
        assert!((m.ndcg - 1.0).abs() < 1e-15);
        assert!((m.recall - 0.6).abs() < 1e-15);
        assert_eq!(m.precision, 1.0);
    }

    #[test]
    fn hit_ratio_dominates_precision_on_random_cases() {
        let mut rng = seeds::stream_rng(31, 0);
        for _ in 0..100 {
            let pool: u32 = rng.gen_range(5..40);
            let k = rng.gen_range(1..15);
            let mut items: Vec<EntityId> = (0..pool).map(iid).collect();
            use rand::seq::SliceRandom;
            items.shuffle(&mut rng);
            let ranked: Vec<EntityId> = items.iter().take(rng.gen_range(1..=pool as usize)).copied().collect();
            let relevant: HashSet<EntityId> =
                (0..rng.gen_range(1..=5)).map(|_| iid(rng.gen_range(0..pool))).collect();
            let m = metrics_at_k(&ranked, &relevant, k).unwrap();
            assert!(m.hit_ratio >= m.precision);
            for v in [m.ndcg, m.recall, m.precision, m.hit_ratio] {
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    /// Graph where each of 5 users purchases 4 distinct items.
    fn disjoint_purchase_graph() -> Graph {
        let mut g = Graph::new();
        for u in 0..5 {
            g.register_entity(EntityType::User, &format!("u{u}"));
        }
        for i in 0..20 {
            g.register_entity(EntityType::Item, &format!("i{i}"));
        }
        for u in 0..5u32 {
            for j in 0..4u32 {
                g.add_triplet(Triplet::new(uid(u), RelationType::Purchase, iid(u * 4 + j)))
                    .unwrap();
            }
        }
        g
    }

    #[test]
    fn planted_optimum_reaches_full_hit_ratio() {
        let g = disjoint_purchase_graph();
        let split = g.split_train_test(0.7, 7).unwrap();
        let mut model = EmbeddingModel::zeros(g.vocabularies().clone(), 4);
        let mut rng = seeds::stream_rng(40, 0);
        for u in 0..5u32 {
            let row: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            model.entity_vector_mut(uid(u)).copy_from_slice(&row);
        }
        // every held-out item points straight at its user's purchase query
        for (u, tests) in split.test_purchases.iter().enumerate() {
            let query: Vec<f64> = model
                .entity_vector(uid(u as u32))
                .iter()
                .zip(model.relation_vector(RelationType::Purchase))
                .map(|(a, b)| 10.0 * (a + b))
                .collect();
            for item in tests {
                model.entity_vector_mut(*item).copy_from_slice(&query);
            }
        }
        let report = evaluate(&model, &split, 10).unwrap();
        assert_eq!(report.users, 5);
        assert_eq!(report.aggregate.unwrap().hit_ratio, 1.0);
    }

    #[test]
    fn random_model_scores_near_the_analytic_baseline() {
        let cfg = SyntheticConfig {
            num_users: 150,
            num_items: 120,
            num_words: 30,
            num_brands: 4,
            num_categories: 4,
            cluster_count: 3,
            purchases_per_user: 10,
            within_cluster_affinity: 0.8,
            seed: 9,
        };
        let (g, _) = generate_synthetic(&cfg).unwrap();
        let split = g.split_train_test(0.7, 9).unwrap();
        let mut model = EmbeddingModel::zeros(g.vocabularies().clone(), 8);
        let mut rng = seeds::stream_rng(41, 0);
        for u in 0..cfg.num_users as u32 {
            let row: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            model.entity_vector_mut(uid(u)).copy_from_slice(&row);
        }
        for i in 0..cfg.num_items as u32 {
            let row: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            model.entity_vector_mut(iid(i)).copy_from_slice(&row);
        }
        let k = 10;
        let report = evaluate(&model, &split, k).unwrap();
        // random ranking: E[hits] = k * relevant / candidates per user
        let mut expected_precision = 0.0;
        for (u, tests) in split.test_purchases.iter().enumerate() {
            let relevant: HashSet<EntityId> = tests.iter().copied().collect();
            let train_items: HashSet<EntityId> = split
                .train
                .tails_of(uid(u as u32), RelationType::Purchase)
                .iter()
                .copied()
                .collect();
            let candidates = cfg.num_items - train_items.len();
            expected_precision += relevant.len() as f64 / candidates as f64;
        }
        expected_precision /= split.test_purchases.len() as f64;
        let got = report.aggregate.unwrap().precision;
        assert!(
            (got - expected_precision).abs() < 0.02,
            "precision {got} vs analytic {expected_precision}"
        );
    }

    #[test]
    fn all_test_purchases_in_training_leaves_an_empty_report() {
        let mut g = Graph::new();
        for u in 0..2 {
            g.register_entity(EntityType::User, &format!("u{u}"));
        }
        for i in 0..4 {
            g.register_entity(EntityType::Item, &format!("i{i}"));
        }
        for u in 0..2u32 {
            g.add_triplet(Triplet::new(uid(u), RelationType::Purchase, iid(2 * u))).unwrap();
            g.add_triplet(Triplet::new(uid(u), RelationType::Purchase, iid(2 * u + 1))).unwrap();
        }
        // ceil(0.99 * 2) = 2 purchases in training, none held out
        let split = g.split_train_test(0.99, 3).unwrap();
        let model = EmbeddingModel::zeros(g.vocabularies().clone(), 2);
        let report = evaluate(&model, &split, 10).unwrap();
        assert_eq!(report.users, 0);
        assert!(report.aggregate.is_none());
        assert!(report.per_user.is_empty());
    }

    #[test]
    fn vocabulary_mismatch_is_detected() {
        let g = disjoint_purchase_graph();
        let split = g.split_train_test(0.7, 7).unwrap();
        let mut other = Graph::new();
        other.register_entity(EntityType::User, "someone");
        let model = EmbeddingModel::zeros(other.vocabularies().clone(), 4);
        assert!(matches!(evaluate(&model, &split, 10), Err(EvalError::VocabularyMismatch)));
    }

    #[test]
    fn evaluation_is_deterministic() {
        let g = disjoint_purchase_graph();
        let split = g.split_train_test(0.7, 7).unwrap();
        let hp = Hyperparams { dim: 8, epochs: 3, seed: 7, ..Hyperparams::default() };
        let (model, _) = train(&split.train, &hp).unwrap();
        let a = evaluate(&model, &split, 10).unwrap();
        let b = evaluate(&model, &split, 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identical_samples_are_never_significant() {
        let a = [0.3, 0.5, 0.9, 0.1];
        let r = fisher_randomization(&a, &a, 1000, 1).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.observed_diff, 0.0);
    }

    #[test]
    fn constant_shift_is_maximally_significant_in_the_exact_branch() {
        let b = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
        let a: Vec<f64> = b.iter().map(|x| x + 1.0).collect();
        let r = fisher_randomization(&a, &b, 0, 1).unwrap();
        assert_eq!(r.p_value, 2.0 / 1024.0);
        assert_eq!(r.iterations, 1024);
        assert!((r.observed_diff - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_pair_can_never_be_significant() {
        let r = fisher_randomization(&[1.0], &[0.0], 0, 1).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.iterations, 2);
    }

    #[test]
    fn exact_branch_matches_hand_enumeration_for_three_pairs() {
        // diffs (1, 2, 3): |mean| = 2; signs with |±1±2±3| ≥ 6 are the two
        // all-same patterns; |sum| values: 6,4,2,0,0,2,4,6 → p = 2/8
        let a = [1.0, 2.0, 3.0];
        let b = [0.0, 0.0, 0.0];
        let r = fisher_randomization(&a, &b, 0, 1).unwrap();
        assert_eq!(r.p_value, 2.0 / 8.0);
        // diffs (1, 1, -1): |sums|: 1,1,3,1,1,3,1,1 → 8 of 8 ≥ 1/3·3
        let a = [1.0, 1.0, 0.0];
        let b = [0.0, 0.0, 1.0];
        let r = fisher_randomization(&a, &b, 0, 1).unwrap();
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn mismatched_and_empty_inputs_are_rejected() {
        assert!(matches!(
            fisher_randomization(&[1.0], &[1.0, 2.0], 10, 1),
            Err(EvalError::LengthMismatch(1, 2))
        ));
        assert!(matches!(fisher_randomization(&[], &[], 10, 1), Err(EvalError::EmptySamples)));
    }

    #[test]
    fn sampled_p_values_are_reproducible_and_smoothed() {
        let mut rng = seeds::stream_rng(77, 0);
        let a: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..1.0)).collect();
        let r1 = fisher_randomization(&a, &b, 2000, 5).unwrap();
        let r2 = fisher_randomization(&a, &b, 2000, 5).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.p_value >= 1.0 / 2001.0);
        assert!(r1.p_value <= 1.0);
        let r3 = fisher_randomization(&a, &b, 2000, 6).unwrap();
        // a different seed may flip a few counts but stays a valid probability
        assert!(r3.p_value > 0.0 && r3.p_value <= 1.0);
    }

    #[test]
    fn ablation_runs_one_report_per_subset_on_the_same_split() {
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
        let (g, _) = generate_synthetic(&cfg).unwrap();
        let hp = Hyperparams { dim: 8, epochs: 2, seed: 3, ..Hyperparams::default() };
        let subsets = vec![
            BTreeSet::from([RelationType::Purchase]),
            BTreeSet::from([RelationType::Purchase, RelationType::Mention]),
        ];
        let reports = run_ablation(&g, &subsets, &hp, 10, 0.7).unwrap();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].1.config.relations, vec![RelationType::Purchase]);
        // both subsets evaluate the same users against the same held-out sets
        let users_a: Vec<EntityId> = reports[0].1.per_user.iter().map(|(u, _)| *u).collect();
        let users_b: Vec<EntityId> = reports[1].1.per_user.iter().map(|(u, _)| *u).collect();
        assert_eq!(users_a, users_b);
    }

    #[test]
    fn ablation_requires_purchase_in_every_subset() {
        let (g, _) = generate_synthetic(&SyntheticConfig {
            num_users: 6,
            num_items: 6,
            num_words: 6,
            num_brands: 2,
            num_categories: 2,
            cluster_count: 2,
            purchases_per_user: 3,
            within_cluster_affinity: 0.8,
            seed: 2,
        })
        .unwrap();
        let hp = Hyperparams { dim: 4, epochs: 1, seed: 1, ..Hyperparams::default() };
        let subsets = vec![BTreeSet::from([RelationType::Mention])];
        assert!(matches!(
            run_ablation(&g, &subsets, &hp, 10, 0.7),
            Err(EvalError::Graph(GraphError::MissingPurchase))
        ));
    }

    #[test]
    fn report_renders_a_table_and_tsv() {
        let g = disjoint_purchase_graph();
        let split = g.split_train_test(0.7, 7).unwrap();
        let hp = Hyperparams { dim: 4, epochs: 1, seed: 2, ..Hyperparams::default() };
        let (model, _) = train(&split.train, &hp).unwrap();
        let report = evaluate(&model, &split, 10).unwrap();
        let table = report.to_pretty_table();
        assert!(table.contains("NDCG"));
        assert!(table.contains('%'));
        let tsv = report.to_tsv(split.train.vocabularies());
        assert!(tsv.starts_with("user\tk\tndcg"));
        assert!(tsv.contains("macro_average"));
        assert_eq!(tsv.lines().count(), 1 + report.users + 1);
    }
}
