use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tdpareto::gen;

fn bin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdpareto"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = bin(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn cut_instance(dir: &Path, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gen::cut_graph(&mut rng, 10, 2, 0.35);
    std::fs::write(dir.join("g.gr"), g.to_text()).unwrap();
}

#[test]
fn missing_td_exits_2_naming_path() {
    let d = tempfile::tempdir().unwrap();
    cut_instance(d.path(), 1);
    let out = bin(
        &["solve", "--problem", "stcut", "--graph", "g.gr", "--td", "absent.td"],
        d.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.td"));
}

#[test]
fn usage_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["solve", "--nonsense"], d.path()).status.code(), Some(2));
    assert_eq!(bin(&["solve", "--graph", "x"], d.path()).status.code(), Some(2));
    assert_eq!(bin(&["--help"], d.path()).status.code(), Some(0));
}

#[test]
fn toy_aggregation_matches_oracle() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(
        &[
            "gen", "knapsack", "-n", "5", "--seed", "7", "--out", "k.json", "--td", "k.td",
        ],
        p,
    );
    ok(
        &[
            "solve",
            "--problem",
            "aggregation",
            "--instance",
            "k.json",
            "--td",
            "k.td",
            "--out",
            "dp.txt",
        ],
        p,
    );
    ok(
        &[
            "oracle",
            "--problem",
            "aggregation",
            "--graph",
            "k.json",
            "--out",
            "bf.txt",
        ],
        p,
    );
    assert_eq!(read(p.join("dp.txt")), read(p.join("bf.txt")));
    // without a decomposition file the min-degree fallback is used
    ok(
        &[
            "solve",
            "--problem",
            "aggregation",
            "--instance",
            "k.json",
            "--out",
            "md.txt",
        ],
        p,
    );
    assert_eq!(read(p.join("md.txt")), read(p.join("bf.txt")));
}

#[test]
fn heuristic_and_threads_do_not_change_fronts() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    cut_instance(p, 3);
    let base = ok(
        &[
            "solve",
            "--problem",
            "stcut",
            "--graph",
            "g.gr",
            "--heuristic",
            "off",
            "--threads",
            "1",
        ],
        p,
    );
    for args in [
        ["--heuristic", "on", "--threads", "1"],
        ["--heuristic", "on", "--threads", "4"],
    ] {
        let mut v = vec!["solve", "--problem", "stcut", "--graph", "g.gr"];
        v.extend(args);
        assert_eq!(ok(&v, p), base);
    }
    let bf = ok(&["oracle", "--problem", "stcut", "--graph", "g.gr"], p);
    assert_eq!(base, bf);
}

#[test]
fn reconstruct_after_prune_matches() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    cut_instance(p, 5);
    ok(
        &[
            "solve",
            "--problem",
            "stcut",
            "--graph",
            "g.gr",
            "--store",
            "st",
            "--out",
            "f.txt",
            "--solutions",
            "a.txt",
        ],
        p,
    );
    ok(&["reconstruct", "--store", "st", "--out", "b.txt", "--prune-first"], p);
    assert_eq!(read(p.join("a.txt")), read(p.join("b.txt")));
    let front_lines = read(p.join("f.txt")).lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(read(p.join("a.txt")).lines().count(), front_lines);
}

#[test]
fn stats_plot_and_config() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    cut_instance(p, 9);
    std::fs::write(p.join("run.toml"), "threads = 2\n[heuristic]\nenabled = false\n").unwrap();
    ok(
        &[
            "--config",
            "run.toml",
            "solve",
            "--problem",
            "stcut",
            "--graph",
            "g.gr",
            "--stats",
            "s.jsonl",
            "--plot",
            "plot",
            "--out",
            "f.txt",
        ],
        p,
    );
    let stats = read(p.join("s.jsonl"));
    let last: serde_json::Value = serde_json::from_str(stats.lines().last().unwrap()).unwrap();
    assert_eq!(last["event"], "summary");
    assert_eq!(last["threads"], 2);
    assert_eq!(last["heuristic"], false);
    assert!(stats
        .lines()
        .all(|l| serde_json::from_str::<serde_json::Value>(l).is_ok()));
    assert!(read(p.join("plot.svg")).starts_with("<svg"));
    assert!(read(p.join("plot.csv")).starts_with("f1,f2"));

    std::fs::write(p.join("bad.toml"), "threads = 0\n").unwrap();
    let out = bin(
        &["--config", "bad.toml", "solve", "--problem", "stcut", "--graph", "g.gr"],
        p,
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn estimate_is_deterministic_and_scored() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    std::fs::create_dir(p.join("one")).unwrap();
    std::fs::write(p.join("one/a.td"), "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n").unwrap();
    let single = ok(&["estimate", "--td-dir", "one"], p);
    let row: Vec<&str> = single.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row[0], "a.td");
    assert_eq!(row[4].parse::<f64>().unwrap(), 1.0);

    std::fs::write(p.join("one/b.td"), "s td 1 3 3\nb 1 1 2 3\n").unwrap();
    let first = ok(&["estimate", "--td-dir", "one", "--optimize-root"], p);
    assert_eq!(first, ok(&["estimate", "--td-dir", "one", "--optimize-root"], p));
    assert_eq!(first.lines().count(), 3);

    std::fs::create_dir(p.join("empty")).unwrap();
    assert_eq!(bin(&["estimate", "--td-dir", "empty"], p).status.code(), Some(2));
}

#[test]
fn mst_and_tsp_solve_match_oracle() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = gen::connected_graph(&mut rng, 6, 2, 0.4);
    std::fs::write(p.join("m.gr"), g.to_text()).unwrap();
    let t = gen::tour_graph(&mut rng, 6, 2, 0.4, true);
    std::fs::write(p.join("t.gr"), t.to_text()).unwrap();
    for (prob, file) in [("mst", "m.gr"), ("tsp", "t.gr")] {
        let dp = ok(&["solve", "--problem", prob, "--graph", file], p);
        let bf = ok(&["oracle", "--problem", prob, "--graph", file], p);
        assert_eq!(dp, bf, "{prob}");
    }
}
