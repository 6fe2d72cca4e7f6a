//! Split purchases, evaluate top-N quality, and test significance.
//!
//! The split holds out a seeded fraction of each user's purchases; the model
//! trains on the rest and is scored with NDCG / recall / hit ratio /
//! precision at a cutoff. A paired sign-flip randomization test then checks
//! whether a stronger configuration beats a weaker one beyond what chance
//! explains.

use ecfkg::eval::{evaluate, fisher_randomization};
use ecfkg::ingest::{generate_synthetic, SyntheticConfig};
use ecfkg::model::train;
use ecfkg::Hyperparams;

fn main() -> anyhow::Result<()> {
    let (g, _) = generate_synthetic(&SyntheticConfig {
        num_users: 60,
        num_items: 60,
        num_words: 60,
        num_brands: 4,
        num_categories: 4,
        cluster_count: 4,
        purchases_per_user: 10,
        within_cluster_affinity: 0.9,
        seed: 5,
    })?;
    let split = g.split_train_test(0.7, 5)?;
    println!(
        "split: {} training occurrences, {} users with held-out purchases",
        split.train.len(),
        split.test_purchases.iter().filter(|p| !p.is_empty()).count()
    );

    let strong = Hyperparams { dim: 32, epochs: 20, seed: 5, ..Hyperparams::default() };
    let weak = Hyperparams { epochs: 1, ..strong.clone() };

    let (model, _) = train(&split.train, &strong)?;
    let report = evaluate(&model, &split, 10)?;
    println!();
    println!("trained {} epochs:", strong.epochs);
    print!("{}", report.to_pretty_table());

    let (barely, _) = train(&split.train, &weak)?;
    let weak_report = evaluate(&barely, &split, 10)?;
    println!("trained {} epoch:", weak.epochs);
    print!("{}", weak_report.to_pretty_table());

    // Paired per-user NDCG, sign-flipped: is the gap real?
    let a: Vec<f64> = report.per_user.iter().map(|(_, m)| m.ndcg).collect();
    let b: Vec<f64> = weak_report.per_user.iter().map(|(_, m)| m.ndcg).collect();
    let sig = fisher_randomization(&a, &b, 20_000, 5)?;
    println!();
    println!(
        "mean NDCG difference {:+.4}, p = {:.4} over {} sign patterns",
        sig.observed_diff, sig.p_value, sig.iterations
    );
    if sig.p_value < 0.05 {
        println!("the longer training schedule wins significantly at the 5% level");
    } else {
        println!("no significant difference at the 5% level");
    }
    Ok(())
}
