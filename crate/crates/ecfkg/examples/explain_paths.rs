//! Explain a recommendation with ranked entity paths.
//!
//! An explanation is a pair of relation chains over observed edges — one from
//! the user, one from the item — meeting at a shared entity. Each side is
//! scored by the softmax probability of its chain's translated query against
//! the full vocabulary of the meeting type, and paths are ranked by the
//! product. The direct user→item purchase edge is never used to explain
//! itself.

use std::io::Cursor;

use ecfkg::explain::{best_explanation, render_explanation};
use ecfkg::graph::EntityType;
use ecfkg::ingest::parse_triplets;
use ecfkg::model::train;
use ecfkg::Hyperparams;

const TRIPLETS: &str = "\
user:dana\tpurchase\titem:turntable
user:dana\tpurchase\titem:speakers
user:dana\tmention\tword:vinyl
user:dana\tmention\tword:vinyl
user:dana\tmention\tword:crisp
item:amplifier\tmention\tword:vinyl
item:amplifier\tmention\tword:crisp
item:amplifier\tproduced_by\tbrand:audiophonic
item:turntable\tproduced_by\tbrand:audiophonic
item:turntable\tmention\tword:vinyl
item:speakers\tproduced_by\tbrand:boomcraft
item:speakers\tmention\tword:crisp
item:amplifier\tbelongs_to\tcategory:hifi
item:turntable\tbelongs_to\tcategory:hifi
item:speakers\tbelongs_to\tcategory:home_cinema
user:erik\tpurchase\titem:amplifier
user:erik\tmention\tword:crisp
";

fn main() -> anyhow::Result<()> {
    let g = parse_triplets(Cursor::new(TRIPLETS))?;
    let hp = Hyperparams { dim: 16, epochs: 40, seed: 2, ..Hyperparams::default() };
    let (model, _) = train(&g, &hp)?;

    // Why would dana like the amplifier she never bought?
    let user = g.entity_id(EntityType::User, "dana").expect("dana is registered");
    let item = g.entity_id(EntityType::Item, "amplifier").expect("amplifier is registered");

    let paths = best_explanation(&g, &model, user, item, 2)?;
    println!(
        "found {} explanation paths from {} to {} within 2 hops per side",
        paths.len(),
        g.key_of(user),
        g.key_of(item)
    );
    println!();
    for (rank, p) in paths.iter().enumerate() {
        println!(
            "{}. p = {:.6} (user side {:.4} x item side {:.4}), via {}",
            rank + 1,
            p.probability,
            p.user_side_prob,
            p.item_side_prob,
            g.key_of(p.via)
        );
        println!("   {}", render_explanation(p, g.vocabularies()));
    }
    Ok(())
}
