use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdpareto::engine::EngineConfig;
use tdpareto::gen;
use tdpareto::heuristic::HeuristicConfig;
use tdpareto::oracle::{brute_cuts, brute_mst, brute_tsp};
use tdpareto::pareto::Cost;
use tdpareto::solve::{solve_mst, solve_stcut, solve_tsp, SolveOptions};
use tdpareto::store::Store;
use tdpareto::td::{min_degree_decomposition, Graph, TreeDecomposition};

fn costs(f: &tdpareto::pareto::ParetoFront) -> Vec<Cost> {
    f.costs().cloned().collect()
}

fn td_for(g: &Graph) -> TreeDecomposition {
    let edges = g
        .edges
        .iter()
        .filter(|e| !g.is_terminal(e.u) && !g.is_terminal(e.v))
        .map(|e| (e.u, e.v));
    min_degree_decomposition(g.n, edges)
}

fn edge_td(g: &Graph) -> TreeDecomposition {
    min_degree_decomposition(g.n, g.edges.iter().map(|e| (e.u, e.v)))
}

#[test]
fn stcut_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..60 {
        let n = rng.gen_range(0..=9);
        let dim = rng.gen_range(2..=3);
        let g = gen::cut_graph(&mut rng, n, dim, 0.4);
        let td = td_for(&g);
        for fusion in [false, true] {
            let opts = SolveOptions {
                fusion,
                ..Default::default()
            };
            let mut store = Store::in_memory(dim);
            let got = solve_stcut(&g, &td, &opts, &mut store).unwrap();
            let want = brute_cuts(&g).unwrap();
            assert_eq!(
                costs(&got.front),
                want.costs(),
                "case {case} fusion {fusion}\n{}",
                g.to_text()
            );
        }
    }
}

#[test]
fn stcut_witnesses_reach_their_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.gen_range(1..=8);
        let g = gen::cut_graph(&mut rng, n, 2, 0.5);
        let mut store = Store::in_memory(2);
        let got = solve_stcut(&g, &td_for(&g), &SolveOptions::default(), &mut store).unwrap();
        let sols = store.reconstruct_all(&got.front).unwrap();
        for ((c, _), s) in got.front.iter().zip(sols) {
            let side: Vec<bool> = (0..=n + 1).map(|v| s.contains(&(v as u64))).collect();
            assert_eq!(&tdpareto::stcut::cut_cost(&g, &side), c);
        }
    }
}

#[test]
fn mst_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..40 {
        let n = rng.gen_range(1..=7);
        let dim = rng.gen_range(2..=3);
        let g = gen::connected_graph(&mut rng, n, dim, 0.4);
        let mut store = Store::in_memory(dim);
        let got = solve_mst(&g, &edge_td(&g), &SolveOptions::default(), &mut store).unwrap();
        let want = brute_mst(&g).unwrap();
        assert_eq!(costs(&got.front), want.costs(), "case {case}\n{}", g.to_text());
    }
}

#[test]
fn tsp_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..40 {
        let n = rng.gen_range(4..=7);
        let ham = rng.gen_bool(0.8);
        let g = gen::tour_graph(&mut rng, n, 2, 0.5, ham);
        let mut store = Store::in_memory(2);
        let got = solve_tsp(&g, &edge_td(&g), &SolveOptions::default(), &mut store).unwrap();
        let want = brute_tsp(&g).unwrap();
        assert_eq!(costs(&got.front), want.costs(), "case {case}\n{}", g.to_text());
    }
}

#[test]
fn heuristic_off_matches_on() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let g = gen::cut_graph(&mut rng, 10, 2, 0.3);
        let td = td_for(&g);
        let mut a = Store::in_memory(2);
        let on = solve_stcut(&g, &td, &SolveOptions::default(), &mut a).unwrap();
        let off_opts = SolveOptions {
            engine: EngineConfig {
                heuristic: HeuristicConfig::disabled(),
                ..Default::default()
            },
            ..Default::default()
        };
        let mut b = Store::in_memory(2);
        let off = solve_stcut(&g, &td, &off_opts, &mut b).unwrap();
        assert_eq!(on.front, off.front);
    }
}
