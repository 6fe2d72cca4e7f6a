//! Drives the compiled binary end to end in scratch directories, checking
//! exit codes, written files, and output formats the way a shell user would.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecfkg"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary launches")
}

fn run_ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn exit_codes_follow_convention() {
    let dir = tempfile::tempdir().unwrap();

    let help = run(dir.path(), &["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let help_text = String::from_utf8_lossy(&help.stdout);
    for subcommand in ["ingest", "synth", "train", "recommend", "explain", "evaluate", "ablate"] {
        assert!(help_text.contains(subcommand), "--help lists {subcommand}");
    }

    assert_eq!(run(dir.path(), &["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["train"]).status.code(), Some(2), "missing required args");
    assert_eq!(
        run(dir.path(), &["recommend", "--model", "m.ckpt"]).status.code(),
        Some(2),
        "recommend needs a user selection"
    );

    let missing = run(
        dir.path(),
        &["train", "--triplets", "no-such-file.tsv", "--out", "model.ckpt"],
    );
    assert_eq!(missing.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&missing.stderr).starts_with("error:"),
        "runtime failures are reported on stderr"
    );
}

#[test]
fn ingest_builds_triplets_from_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("reviews.jsonl"),
        concat!(
            r#"{"reviewerID": "alice", "asin": "radio", "reviewText": "Crisp warm sound"}"#,
            "\n",
            r#"{"reviewerID": "bob", "asin": "radio", "reviewText": "crisp bass"}"#,
            "\n",
            r#"{"reviewerID": "alice", "asin": "speaker", "reviewText": "warm tone"}"#,
            "\n",
            r#"{"reviewerID": "carol", "asin": "lamp", "reviewText": "Quirky design"}"#,
            "\n",
        ),
    )
    .unwrap();
    fs::write(
        dir.path().join("meta.jsonl"),
        concat!(
            r#"{"asin": "radio", "brand": "acme", "categories": ["electronics"], "related": {"bought_together": ["speaker"]}}"#,
            "\n",
            r#"{"asin": "speaker", "brand": "acme", "categories": ["electronics", "audio"], "related": {"also_bought": ["radio"], "also_viewed": ["lamp"]}}"#,
            "\n",
            r#"{"asin": "lamp", "categories": [["home", "lighting"]]}"#,
            "\n",
        ),
    )
    .unwrap();

    run_ok(
        dir.path(),
        &[
            "ingest",
            "--reviews",
            "reviews.jsonl",
            "--meta",
            "meta.jsonl",
            "--min-word-count",
            "2",
            "--out",
            "graph.tsv",
        ],
    );

    let tsv = fs::read_to_string(dir.path().join("graph.tsv")).unwrap();
    let lines: Vec<&str> = tsv.lines().collect();
    for expected in [
        "user:alice\tpurchase\titem:radio",
        "user:alice\tmention\tword:crisp",
        "item:radio\tmention\tword:crisp",
        "user:alice\tmention\tword:warm",
        "item:radio\tproduced_by\tbrand:acme",
        "item:radio\tbelongs_to\tcategory:electronics",
        "item:radio\tbought_together\titem:speaker",
        "item:speaker\talso_bought\titem:radio",
        "item:speaker\talso_viewed\titem:lamp",
        "item:lamp\tbelongs_to\tcategory:lighting",
    ] {
        assert!(lines.contains(&expected), "missing line {expected:?} in:\n{tsv}");
    }
    // words below the frequency floor are dropped entirely
    assert!(!tsv.contains("quirky"), "rare word slipped through:\n{tsv}");
    assert!(!tsv.contains("bass"), "rare word slipped through:\n{tsv}");
}

#[test]
fn pipeline_writes_well_formed_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        dir.path(),
        &[
            "synth", "--users", "25", "--items", "25", "--words", "25", "--brands", "3",
            "--categories", "3", "--clusters", "3", "--purchases", "6", "--seed", "5",
            "--out", "graph.tsv", "--assignments", "clusters.tsv",
        ],
    );
    let clusters = fs::read_to_string(dir.path().join("clusters.tsv")).unwrap();
    assert!(clusters.starts_with("type\tkey\tcluster\n"));
    assert_eq!(clusters.lines().count(), 1 + 25 + 25, "one row per user and item");

    run_ok(
        dir.path(),
        &[
            "train", "--triplets", "graph.tsv", "--dim", "16", "--epochs", "6", "--seed",
            "5", "--split", "0.7", "--out", "model.ckpt",
        ],
    );

    run_ok(
        dir.path(),
        &[
            "recommend", "--model", "model.ckpt", "--triplets", "graph.tsv", "--users",
            "u0,u1", "--n", "5", "--out", "recs.tsv",
        ],
    );
    let recs = fs::read_to_string(dir.path().join("recs.tsv")).unwrap();
    let mut rec_lines = recs.lines();
    assert_eq!(rec_lines.next(), Some("user\trank\titem\tscore"));
    let rows: Vec<Vec<&str>> = rec_lines.map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 10, "5 recommendations for each of 2 users");
    let mut prev: Option<(&str, usize, f64)> = None;
    for row in &rows {
        assert!(row[0] == "u0" || row[0] == "u1");
        let rank: usize = row[1].parse().unwrap();
        let score: f64 = row[3].parse().unwrap();
        if let Some((user, prev_rank, prev_score)) = prev {
            if user == row[0] {
                assert_eq!(rank, prev_rank + 1, "ranks are consecutive");
                assert!(score <= prev_score, "scores are non-increasing");
            }
        }
        prev = Some((row[0], rank, score));
    }

    let explained = run_ok(
        dir.path(),
        &[
            "explain", "--model", "model.ckpt", "--triplets", "graph.tsv", "--pairs",
            "u0:i3", "--zmax", "2", "--text",
        ],
    );
    let text = String::from_utf8_lossy(&explained.stdout);
    assert!(text.contains("u0 -> i3:"), "text mode labels the pair:\n{text}");
    assert!(
        text.contains("[p=") || text.contains("no connecting paths"),
        "paths carry probabilities:\n{text}"
    );

    let evaluated = run_ok(
        dir.path(),
        &[
            "evaluate", "--model", "model.ckpt", "--triplets", "graph.tsv", "--split",
            "0.7", "--k", "5", "--seed", "5", "--out", "eval.tsv",
        ],
    );
    let table = String::from_utf8_lossy(&evaluated.stdout);
    assert!(table.contains("NDCG"), "pretty table on stdout:\n{table}");
    let eval_tsv = fs::read_to_string(dir.path().join("eval.tsv")).unwrap();
    assert!(eval_tsv.starts_with("user\tk\tndcg\trecall\thit_ratio\tprecision\n"));
    assert!(eval_tsv.lines().last().unwrap().starts_with("macro_average\t"));

    let ablated = run_ok(
        dir.path(),
        &[
            "ablate", "--triplets", "graph.tsv", "--relation-sets", "purchase|all",
            "--dim", "16", "--epochs", "6", "--seed", "5", "--k", "5", "--split", "0.7",
            "--iterations", "2000", "--out", "ablation.tsv",
        ],
    );
    let ablation = String::from_utf8_lossy(&ablated.stdout);
    assert!(ablation.contains("p_vs_first"), "comparison column present:\n{ablation}");
    let ablation_tsv = fs::read_to_string(dir.path().join("ablation.tsv")).unwrap();
    let mut ab_lines = ablation_tsv.lines();
    assert_eq!(
        ab_lines.next(),
        Some("relations\tusers\tndcg\trecall\thit_ratio\tprecision\tp_vs_first")
    );
    let data: Vec<&str> = ab_lines.collect();
    assert_eq!(data.len(), 2);
    assert!(data[0].starts_with("purchase\t"));
    // relation sets print in declaration order, purchase first
    assert!(data[1].starts_with(
        "purchase,mention,belongs_to,produced_by,bought_together,also_bought,also_viewed\t"
    ));
    let p_text = data[1].rsplit('\t').next().unwrap();
    let p: f64 = p_text.parse().expect("second row carries a numeric p-value");
    assert!((0.0..=1.0).contains(&p));
}
