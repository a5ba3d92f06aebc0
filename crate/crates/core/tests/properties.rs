use std::path::PathBuf;

use pgg_core::agent::{combinations, fermi_probability, run_abm, LearningParams, Population};
use pgg_core::analysis::{stats, trajectory_distance};
use pgg_core::dynamics::{mutation_terms, rhs, DynamicsMode, Trajectory};
use pgg_core::game::{expected_payoffs, mixed_equilibrium_abc, outcome_distribution, Matrix2x2, MixedStrategy2};
use pgg_core::io::config::{DensitySource, ModeKind, RunConfig, SweepKind};
use pgg_core::io::csv::{ode_csv, sig};
use pgg_core::network::{adjacency_from_edges, degree_sum, generate_er, Graph, GraphParams};
use pgg_core::payoffs::{closed_form_average, expected_profile, PggParams, SimplexState};
use proptest::prelude::*;

fn simplex() -> impl Strategy<Value = SimplexState> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(a, b)| {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        SimplexState::new(lo, hi - lo, 1.0 - hi).unwrap()
    })
}

fn params() -> impl Strategy<Value = PggParams> {
    (2usize..=20, 0.1..5.0f64, 0.01..0.99f64, 0.0..5.0f64, 0.0..=1.0f64).prop_map(|(n, c, frac, g, u)| PggParams {
        population: n + 50,
        sample: n,
        cost: c,
        rate: 1.0 + (n as f64 - 1.0) * frac,
        participation_cost: g,
        mutation: u,
        ..PggParams::default()
    })
}

fn mode() -> impl Strategy<Value = DynamicsMode> {
    prop_oneof![
        Just(DynamicsMode::Replicator),
        Just(DynamicsMode::ReplicatorMutator),
        (0.0..=1.0f64).prop_map(|density| DynamicsMode::NetworkScaled { density }),
    ]
}

proptest! {
    #[test]
    fn flow_is_tangent_to_simplex(s in simplex(), p in params(), m in mode()) {
        let f = rhs(&s, &p, m).unwrap();
        let scale = 1.0 + f.iter().map(|v| v.abs()).sum::<f64>();
        prop_assert!(f.iter().sum::<f64>().abs() <= 1e-14 * scale * 8.0);
    }

    #[test]
    fn average_payoff_identity(s in simplex(), p in params()) {
        let prof = expected_profile(&s, &p);
        let direct = s.x() * prof.cooperator + s.y() * prof.defector + s.z() * prof.loner;
        prop_assert!((prof.average - direct).abs() <= 1e-12);
        if 1.0 - s.z() >= 1e-12 {
            prop_assert!((closed_form_average(&s, &p) - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn payoff_gap_law(s in simplex(), p in params()) {
        let prof = expected_profile(&s, &p);
        prop_assert_eq!(prof.loner, 0.0);
        if 1.0 - s.z() >= 1e-12 {
            let want = p.cost * (1.0 - s.z().powi(p.sample as i32 - 1));
            prop_assert!(((prof.defector - prof.cooperator) - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn mutation_terms_cancel(s in simplex(), mu in 0.0..=1.0f64) {
        let m = mutation_terms(&s.as_array(), mu);
        prop_assert!(m.iter().sum::<f64>().abs() <= 1e-14);
    }

    #[test]
    fn fermi_symmetric_and_monotone(d in -50.0..50.0f64, e in 0.0..10.0f64, beta in 0.0..10.0f64) {
        let p = fermi_probability(0.0, d, beta);
        prop_assert!((p + fermi_probability(0.0, -d, beta) - 1.0).abs() <= 1e-12);
        prop_assert!(fermi_probability(0.0, d + e, beta) >= p);
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn outcome_grid_is_a_distribution(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let d = outcome_distribution(MixedStrategy2::new(a).unwrap(), MixedStrategy2::new(b).unwrap());
        let total: f64 = d.iter().flatten().sum();
        prop_assert!((total - 1.0).abs() <= 1e-15);
        prop_assert!(d.iter().flatten().all(|&w| w >= 0.0));
    }

    #[test]
    fn payoffs_are_bilinear(p1 in 0.0..=1.0f64, p2 in 0.0..=1.0f64, q in 0.0..=1.0f64, t in 0.0..=1.0f64,
                           cells in prop::array::uniform8(-10.0..10.0f64)) {
        let m = Matrix2x2::new([[(cells[0], cells[1]), (cells[2], cells[3])], [(cells[4], cells[5]), (cells[6], cells[7])]]).unwrap();
        let ms = |p| MixedStrategy2::new(p).unwrap();
        let mixed = expected_payoffs(&m, ms(t * p1 + (1.0 - t) * p2), ms(q));
        let (a, b) = (expected_payoffs(&m, ms(p1), ms(q)), expected_payoffs(&m, ms(p2), ms(q)));
        prop_assert!((mixed.0 - (t * a.0 + (1.0 - t) * b.0)).abs() <= 1e-12);
        prop_assert!((mixed.1 - (t * a.1 + (1.0 - t) * b.1)).abs() <= 1e-12);
    }

    #[test]
    fn equilibrium_makes_opponent_indifferent(c in -5.0..5.0f64, gap1 in 0.01..5.0f64, gap2 in 0.01..5.0f64) {
        let (b, a) = (c + gap1, c + gap1 + gap2);
        let sigma = mixed_equilibrium_abc(a, b, c).unwrap();
        let m = Matrix2x2::abc(a, b, c).unwrap();
        let row = MixedStrategy2::new(sigma).unwrap();
        let left = expected_payoffs(&m, row, MixedStrategy2::pure(true)).1;
        let right = expected_payoffs(&m, row, MixedStrategy2::pure(false)).1;
        prop_assert!((left - right).abs() <= 1e-12 * (1.0 + a.abs() + c.abs()));
    }

    #[test]
    fn handshake_and_adjacency(n in 1usize..60, p in 0.0..=1.0f64, seed in any::<u64>()) {
        let g = generate_er(&GraphParams { nodes: n, edge_prob: p, seed }).unwrap();
        prop_assert_eq!(degree_sum(&g), 2 * g.edge_count());
        let rebuilt = adjacency_from_edges(n, g.edges());
        prop_assert_eq!(g.adjacency(), rebuilt.as_slice());
        let mut back = Vec::new();
        for (i, nbrs) in g.adjacency().iter().enumerate() {
            back.extend(nbrs.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        prop_assert_eq!(back.as_slice(), g.edges());
        prop_assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g.clone());
        let again = generate_er(&GraphParams { nodes: n, edge_prob: p, seed }).unwrap();
        prop_assert_eq!(again, g);
    }

    #[test]
    fn distance_is_a_metric(raw in prop::collection::vec((simplex(), simplex(), simplex()), 1..30)) {
        let traj = |k: usize| Trajectory {
            times: (0..raw.len()).map(|i| i as f64 * 0.1).collect(),
            states: raw.iter().map(|t| [t.0, t.1, t.2][k]).collect(),
        };
        let (a, b, c) = (traj(0), traj(1), traj(2));
        let ab = trajectory_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, trajectory_distance(&b, &a).unwrap());
        prop_assert_eq!(trajectory_distance(&a, &a).unwrap(), 0.0);
        let ac = trajectory_distance(&a, &c).unwrap();
        let cb = trajectory_distance(&c, &b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-12);
    }

    #[test]
    fn amplitude_grows_with_window(rows in prop::collection::vec(simplex(), 1..60), w in 0.01..=1.0f64, extra in 0.0..=1.0f64) {
        let rows: Vec<[f64; 3]> = rows.iter().map(|s| s.as_array()).collect();
        let wide = (w + extra * (1.0 - w)).min(1.0);
        let (narrow, broad) = (stats(&rows, w).unwrap(), stats(&rows, wide).unwrap());
        for i in 0..3 {
            prop_assert!(broad.amplitude[i] >= narrow.amplitude[i]);
            prop_assert!(broad.minimum[i] <= narrow.minimum[i]);
        }
    }

    #[test]
    fn config_text_round_trips(
        n in 2usize..30, extra in 0usize..200, g in 0.0..5.0f64, u in 0.0..=1.0f64, beta in 0.0..10.0f64,
        seed in any::<u64>(), dt in 1e-4..0.1f64, rates in prop::collection::vec(1.01..2.0f64, 0..4),
        mode in 0usize..3, graph in any::<bool>(), abm in any::<bool>(), plot in any::<bool>(),
    ) {
        let mut cfg = RunConfig::default();
        cfg.pgg.sample = n;
        cfg.pgg.population = n + extra;
        cfg.pgg.participation_cost = g;
        cfg.pgg.mutation = u;
        cfg.learning.beta = beta;
        cfg.seed = seed;
        cfg.dt = dt;
        cfg.sweep.rate = rates;
        cfg.mode = [ModeKind::Replicator, ModeKind::Mutator, ModeKind::Network][mode];
        cfg.density_source = if graph { DensitySource::Graph } else { DensitySource::Fixed };
        cfg.sweep_kind = if abm { SweepKind::Abm } else { SweepKind::Ode };
        cfg.plot = plot;
        cfg.out = plot.then(|| PathBuf::from("runs/out.csv"));
        let text = cfg.to_config_string();
        prop_assert_eq!(RunConfig::parse_str(&text).unwrap(), cfg);
    }

    #[test]
    fn csv_values_parse_back(v in prop::num::f64::NORMAL) {
        let back: f64 = sig(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 5e-12 * v.abs());
    }

    #[test]
    fn abm_conserves_population(c in 0usize..40, d in 0usize..40, l in 0usize..40, seed in any::<u64>(), pe in 0.0..=1.0f64) {
        prop_assume!(c + d + l >= 5);
        let p = PggParams { population: c + d + l, ..PggParams::default() };
        let lp = LearningParams { exploration: pe, ..LearningParams::default() };
        let traj = run_abm(&Population::from_counts(c, d, l), &p, &lp, 5, seed).unwrap();
        for row in &traj.rows {
            let counts = row.fractions.map(|f| (f * p.population as f64).round());
            prop_assert_eq!(counts.iter().sum::<f64>(), p.population as f64);
        }
    }

    #[test]
    fn binomial_symmetry(n in 0u64..60, r in 0u64..60) {
        prop_assume!(r <= n);
        prop_assert_eq!(combinations(n, r).unwrap(), combinations(n, n - r).unwrap());
        if r >= 1 {
            let pascal = combinations(n - 1, r - 1).unwrap() + if r < n { combinations(n - 1, r).unwrap() } else { 0 };
            prop_assert_eq!(combinations(n, r).unwrap(), pascal);
        }
    }
}

#[test]
fn ode_csv_rows_parse_back() {
    let s = SimplexState::new(0.123456789012345, 0.3, 0.576543210987655).unwrap();
    let t = Trajectory::constant(s, 0.01, 3);
    let text = ode_csv(&t);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,y,z"));
    for line in lines {
        let vals: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        for (got, want) in vals[1..].iter().zip(s.as_array()) {
            assert!((got - want).abs() <= 5e-12 * want);
        }
    }
}
