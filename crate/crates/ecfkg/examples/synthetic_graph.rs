//! Generate a clustered synthetic graph with recoverable structure.
//!
//! The generator plants `cluster_count` user/item communities: each user
//! buys inside their own cluster with probability `within_cluster_affinity`,
//! every item carries a cluster-aligned brand, category, and a distinctive
//! review word. The planted labels come back alongside the graph, so
//! downstream experiments can measure how much of the structure a model
//! recovers.

use ecfkg::graph::{EntityId, EntityType, RelationType};
use ecfkg::ingest::{generate_synthetic, SyntheticConfig};

fn main() -> anyhow::Result<()> {
    let cfg = SyntheticConfig {
        num_users: 40,
        num_items: 40,
        num_words: 40,
        num_brands: 4,
        num_categories: 4,
        cluster_count: 4,
        purchases_per_user: 6,
        within_cluster_affinity: 0.85,
        seed: 7,
    };
    let (g, assignments) = generate_synthetic(&cfg)?;

    println!(
        "{} users x {} items in {} clusters, {} triplet occurrences",
        cfg.num_users,
        cfg.num_items,
        cfg.cluster_count,
        g.len()
    );
    for r in g.relations_present() {
        println!("  {:<12} {}", r.name(), g.relation_total(r));
    }

    // How often did purchases stay inside the buyer's own cluster? With
    // affinity 0.85 the empirical rate lands nearby (sampling noise aside).
    let mut within = 0u64;
    let mut total = 0u64;
    for u in 0..cfg.num_users {
        let user = EntityId::new(EntityType::User, u as u32);
        for item in g.tails_of(user, RelationType::Purchase) {
            total += 1;
            if assignments.users[u] == assignments.items[item.index as usize] {
                within += 1;
            }
        }
    }
    println!();
    println!(
        "within-cluster purchases: {within}/{total} = {:.1}% (affinity {:.0}%)",
        100.0 * within as f64 / total as f64,
        100.0 * cfg.within_cluster_affinity
    );

    // Each item's planted word is shared with its buyers.
    let item0 = EntityId::new(EntityType::Item, 0);
    let word = g.tails_of(item0, RelationType::Mention)[0];
    println!();
    println!(
        "item {} (cluster {}) mentions '{}'; its brand is {}",
        g.key_of(item0),
        assignments.items[0],
        g.key_of(word),
        g.key_of(g.tails_of(item0, RelationType::ProducedBy)[0]),
    );
    Ok(())
}
