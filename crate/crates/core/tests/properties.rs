mod common;

use bcdpf::analysis::{alpha_exponents, bp_symbolic_table};
use bcdpf::consensus::{
    bg_tick, bp_history, mbc_round, metropolis_weights, rg_tick, run_bp, run_consensus, run_max_consensus, sbc_round,
    Algorithm, ConsensusSpec, LogBeliefTable, ScenarioMetrics,
};
use bcdpf::costmodel::{dpf_cost, dpf_preferred, ncpf_cost, CostInputs};
use bcdpf::dynamics::TargetState;
use bcdpf::filter::{estimate, systematic_indices, ParticleSet};
use bcdpf::harness::config::IterationSetting;
use bcdpf::harness::ScenarioConfig;
use bcdpf::numerics::{log_sum_exp, normalize_log_weights};
use bcdpf::topology::{generate_semi_random, NetworkGraph, SemiRandomParams};
use bcdpf::tracker::TrackerKind;
use common::{max_abs_diff, random_connected, random_loopy, random_table, random_tree, rng};
use proptest::prelude::*;

fn spec(alg: Algorithm, iterations: usize, g: &NetworkGraph, seed: u64) -> ConsensusSpec {
    let mut s = ConsensusSpec::new(alg, iterations, ScenarioMetrics::of(g).unwrap());
    s.seed = seed;
    s
}

fn combine(a: &LogBeliefTable, b: &LogBeliefTable, ka: f64, kb: f64) -> LogBeliefTable {
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| ka * x + kb * y)
        .collect();
    LogBeliefTable::from_rows(a.nodes(), a.particles(), values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sbc_and_mbc_rounds_preserve_column_sums(n in 2usize..12, extra in 0usize..10, seed in any::<u64>(), rounds in 1usize..20) {
        let g = random_connected(n, extra, seed);
        let (w, _) = metropolis_weights(&g, g.is_bipartite());
        let xi = 1.0 / (g.degree_metrics().max as f64 + 1.0);
        let start = random_table(n, 7, -10.0, 0.0, seed ^ 1);
        let sums = start.column_sums();
        let (mut a, mut b) = (start.clone(), start);
        for _ in 0..rounds {
            a = sbc_round(&a, &g, xi);
            b = mbc_round(&b, &g, &w);
            prop_assert!(max_abs_diff(&a.column_sums(), &sums) < 1e-11);
            prop_assert!(max_abs_diff(&b.column_sums(), &sums) < 1e-11);
        }
    }

    #[test]
    fn gossip_ticks_stay_in_the_convex_hull(n in 2usize..12, extra in 0usize..10, seed in any::<u64>(), ticks in 1usize..200) {
        let g = random_connected(n, extra, seed);
        let start = random_table(n, 5, -10.0, 0.0, seed ^ 2);
        let mut a = start.clone();
        let mut b = start.clone();
        let mut r = rng(seed);
        for _ in 0..ticks {
            rg_tick(&mut a, &g, &mut r);
            bg_tick(&mut b, &g, 0.7, &mut r);
        }
        prop_assert!(max_abs_diff(&a.column_sums(), &start.column_sums()) < 1e-11);
        for m in 0..5 {
            let col: Vec<f64> = (0..n).map(|k| start.get(k, m)).collect();
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min) - 1e-12;
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1e-12;
            for k in 0..n {
                prop_assert!(a.get(k, m) >= lo && a.get(k, m) <= hi);
                prop_assert!(b.get(k, m) >= lo && b.get(k, m) <= hi);
            }
        }
    }

    #[test]
    fn consensus_is_linear(n in 3usize..10, extra in 0usize..8, seed in any::<u64>(), it in 1usize..8, k in -3.0f64..3.0) {
        let g = random_connected(n, extra, seed);
        let x = random_table(n, 4, -5.0, 5.0, seed ^ 3);
        let y = random_table(n, 4, -5.0, 5.0, seed ^ 4);
        for alg in Algorithm::ALL {
            let s = spec(alg, it, &g, seed);
            let run = |t: LogBeliefTable| run_consensus(t, &g, &s, &mut rng(seed)).values().to_vec();
            let lhs = run(combine(&x, &y, k, 1.0));
            let rx = run(x.clone());
            let ry = run(y.clone());
            let rhs: Vec<f64> = rx.iter().zip(&ry).map(|(a, b)| k * a + b).collect();
            let scale = 1.0 + rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-9 * scale, "{alg}");
        }
    }

    #[test]
    fn bp_on_trees_is_exact_at_diameter_plus_one(n in 2usize..26, seed in any::<u64>()) {
        let g = random_tree(n, seed);
        let d = g.diameter().unwrap();
        let b = random_table(n, 6, -20.0, 0.0, seed ^ 5);
        let sums = b.column_sums();
        let out = run_bp(b, &g, &spec(Algorithm::Bp, d + 1, &g, 0));
        for k in 0..n {
            prop_assert!(max_abs_diff(out.row(k), &sums) < 1e-9);
        }
    }

    #[test]
    fn bp_numeric_matches_symbolic(n in 3usize..12, extra in 1usize..8, seed in any::<u64>()) {
        let g = random_loopy(n, extra, seed);
        let last = g.diameter().unwrap() + 3;
        let b = random_table(n, 3, -2.0, 2.0, seed ^ 6);
        let numeric = bp_history(b.clone(), &g, last);
        let symbolic = bp_symbolic_table(&g, last).unwrap();
        prop_assert_eq!(numeric.len(), symbolic.len());
        for (num, sym) in numeric.iter().zip(&symbolic) {
            for node in 0..n {
                for m in 0..3 {
                    let col: Vec<f64> = (0..n).map(|u| b.get(u, m)).collect();
                    let expected = sym.apply(node, &col);
                    prop_assert!((num.get(node, m) - expected).abs() < 1e-9 * (1.0 + expected.abs()));
                }
            }
        }
    }

    #[test]
    fn max_consensus_reaches_global_max_in_diameter_rounds(n in 2usize..15, extra in 0usize..10, seed in any::<u64>()) {
        let g = random_connected(n, extra, seed);
        let b = random_table(n, 5, -3.0, 3.0, seed ^ 7);
        let colmax: Vec<f64> = (0..5)
            .map(|m| (0..n).map(|k| b.get(k, m)).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let out = run_max_consensus(b, &g, g.diameter().unwrap());
        for k in 0..n {
            prop_assert_eq!(out.row(k), &colmax[..]);
        }
    }

    #[test]
    fn systematic_counts_are_floor_or_ceil(raw in prop::collection::vec(0.0f64..1.0, 1..40), seed in any::<u64>()) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-6);
        let lw: Vec<f64> = raw.iter().map(|w| (w / total).ln()).collect();
        let idx = systematic_indices(&lw, &mut rng(seed));
        let n = raw.len();
        prop_assert_eq!(idx.len(), n);
        let mut counts = vec![0usize; n];
        for i in idx {
            counts[i] += 1;
        }
        for (c, w) in counts.iter().zip(&raw) {
            let expected = n as f64 * w / total;
            prop_assert!((*c as f64 - expected).abs() < 1.0 + 1e-9, "count {} expected {}", c, expected);
        }
    }

    #[test]
    fn normalization_is_shift_invariant(xs in prop::collection::vec(-50.0f64..50.0, 1..30), shift in -500.0f64..500.0) {
        let mut a = xs.clone();
        let mut b: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        normalize_log_weights(&mut a).unwrap();
        normalize_log_weights(&mut b).unwrap();
        prop_assert!(log_sum_exp(&a).abs() < 1e-12);
        prop_assert!(max_abs_diff(&a, &b) < 1e-9);
    }

    #[test]
    fn costs_are_monotone(
        particles in 1u64..5000, p in 1u64..5000, d in 1u64..8, it in 1u64..10,
        eta in 0.0f64..30.0, data in 1u64..20,
    ) {
        let c = CostInputs { particles, packet_size: p, diameter: d, mean_degree: eta, data_scalars: data, iterations: it };
        let bigger_d = CostInputs { diameter: d + 1, ..c.clone() };
        let more_it = CostInputs { iterations: it + 1, ..c.clone() };
        let denser = CostInputs { mean_degree: eta + 1.0, ..c.clone() };
        let bigger_p = CostInputs { packet_size: p + 1, ..c.clone() };
        prop_assert!(dpf_cost(&bigger_d) >= dpf_cost(&c));
        prop_assert!(dpf_cost(&more_it) >= dpf_cost(&c));
        prop_assert!(dpf_cost(&bigger_p) <= dpf_cost(&c));
        prop_assert!(ncpf_cost(&bigger_d) >= ncpf_cost(&c));
        prop_assert!(ncpf_cost(&denser) >= ncpf_cost(&c));
        prop_assert!(ncpf_cost(&bigger_p) <= ncpf_cost(&c));
        let m = c.with_matched_iterations();
        prop_assert_eq!(dpf_preferred(&c), dpf_cost(&m) < ncpf_cost(&m));
    }

    #[test]
    fn graph_text_roundtrip(rows in 1usize..6, cols in 2usize..6, seed in any::<u64>(), radius in 5.0f64..80.0) {
        let params = SemiRandomParams {
            rows,
            cols,
            area: [100.0, 80.0],
            jitter_std: 3.0,
            comm_radius: radius,
            sense_radius: radius / 2.0,
        };
        let g = generate_semi_random(&params, seed).unwrap();
        let back = NetworkGraph::parse_text(&g.to_text()).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_text(), g.to_text());
    }

    #[test]
    fn config_text_roundtrip(
        runs in 1usize..1000, particles in 1usize..2000, seed in any::<u64>(), radius in 26.0f64..200.0,
        tree in any::<bool>(), auto in any::<bool>(), n_it in 1usize..20, xi in prop::option::of(0.01f64..1.0),
        pick in prop::collection::vec(0usize..8, 1..6),
    ) {
        let kinds: Vec<TrackerKind> = ["exact", "ncpf", "sbc", "rg", "bg", "mbc", "bp", "oracle"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let mut cfg = ScenarioConfig::preset("paper-loopy-45").unwrap();
        cfg.runs = runs;
        cfg.particles = particles;
        cfg.seed = seed;
        cfg.comm_radius = radius;
        cfg.tree = tree;
        cfg.iterations = if auto { IterationSetting::DiameterPlusOne } else { IterationSetting::Fixed(n_it) };
        cfg.sbc_xi = xi;
        cfg.trackers = pick.iter().map(|&i| kinds[i]).collect();
        prop_assert_eq!(ScenarioConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn overcounting_never_decreases_past_diameter_plus_one(n in 3usize..12, extra in 1usize..8, seed in any::<u64>()) {
        let g = random_loopy(n, extra, seed);
        let first = g.diameter().unwrap() + 1;
        let mut prev = alpha_exponents(&g, first).unwrap();
        for it in first + 1..first + 4 {
            let next = alpha_exponents(&g, it).unwrap();
            for node in 0..n {
                for u in 0..n {
                    prop_assert!(next.get(u, node) >= prev.get(u, node));
                }
            }
            prev = next;
        }
    }

    #[test]
    fn estimate_ignores_a_common_weight_offset(
        raw in prop::collection::vec((-50.0f64..50.0, -5.0f64..5.0, -10.0f64..0.0), 1..30),
        shift in -300.0f64..300.0,
    ) {
        let states: Vec<TargetState> = raw.iter().map(|(x, v, _)| TargetState::new(*x, -x, *v, 2.0 * v)).collect();
        let mut a = ParticleSet { states: states.clone(), log_weights: raw.iter().map(|r| r.2).collect() };
        let mut b = ParticleSet { states, log_weights: raw.iter().map(|r| r.2 + shift).collect() };
        a.normalize().unwrap();
        b.normalize().unwrap();
        let (ea, eb) = (estimate(&a).as_array(), estimate(&b).as_array());
        prop_assert!(max_abs_diff(&ea, &eb) < 1e-9);
    }

    #[test]
    fn parsers_reject_garbage_without_panicking(text in "(graph|node|edge|rows|preset|=|#| |[0-9.eE+-]{1,6}|[a-z_]{1,8}|\n){0,40}") {
        let _ = NetworkGraph::parse_text(&text);
        let _ = ScenarioConfig::parse(&text);
    }

    #[test]
    fn parsers_handle_arbitrary_text(text in "\\PC{0,200}") {
        let _ = NetworkGraph::parse_text(&text);
        let _ = ScenarioConfig::parse(&text);
    }
}

#[test]
fn table_parse_rejects_nan() {
    assert!(LogBeliefTable::from_rows(1, 2, vec![0.0, f64::NAN]).is_err());
}
