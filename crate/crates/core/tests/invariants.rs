use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hexrd::analysis::{compute_likelihoods, enumerate_rules, symmetrize, CorpusEntry, ReducedRuleSet, SymmetrizeMode, Table};
use hexrd::detector::{extract_components, track, CanonicalShape, TrackConfig};
use hexrd::engine::{self, Trajectory};
use hexrd::evolve::{crossover, mutate};
use hexrd::reactor::{paper_system, ssa_run, ReactorState, SsaConfig};
use hexrd::rules::{PAIRS, RULE_LEN};
use hexrd::{CellState, Grid, RuleMatrix};

fn state() -> impl Strategy<Value = CellState> {
    prop_oneof![Just(CellState::S), Just(CellState::A), Just(CellState::B)]
}

fn rule() -> impl Strategy<Value = RuleMatrix> {
    prop::collection::vec(state(), RULE_LEN - 1).prop_map(|tail| {
        let mut e = [CellState::S; RULE_LEN];
        e[1..].copy_from_slice(&tail);
        RuleMatrix::from_entries(e).unwrap()
    })
}

fn grid(max_w: usize, max_half_h: usize) -> impl Strategy<Value = Grid> {
    (3..=max_w, 2..=max_half_h).prop_flat_map(|(w, hh)| {
        let h = 2 * hh;
        prop::collection::vec(prop::sample::select(vec![CellState::S, CellState::S, CellState::A, CellState::B]), w * h)
            .prop_map(move |cells| Grid::from_cells(w, h, cells).unwrap())
    })
}

fn table() -> impl Strategy<Value = Table> {
    prop::collection::vec(0.0..1.0f64, RULE_LEN).prop_map(|v| v.try_into().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_agrees_with_reference(g in grid(20, 10), m in rule()) {
        prop_assert_eq!(engine::step(&g, &m), engine::step_reference(&g, &m));
    }

    #[test]
    fn step_commutes_with_translation(g in grid(16, 8), m in rule(), dr in -20isize..20, dc in -20isize..20) {
        prop_assert_eq!(engine::step(&g.translate(dr, dc), &m), engine::step(&g, &m).translate(dr, dc));
    }

    #[test]
    fn components_partition_live_cells(g in grid(16, 8)) {
        let comps = extract_components(&g);
        let mut seen = HashSet::new();
        for c in &comps {
            prop_assert!(!c.is_empty());
            for &(cell, s) in &c.cells {
                prop_assert_ne!(s, CellState::S);
                prop_assert!(seen.insert(cell));
            }
        }
        prop_assert_eq!(seen.len(), g.len() - g.count(CellState::S));
    }

    #[test]
    fn shapes_survive_translation(g in grid(16, 8), dr in -20isize..20, dc in -20isize..20) {
        let shapes = |g: &Grid| {
            let mut v: Vec<_> = extract_components(g).iter().filter(|c| !c.wraps_torus()).map(|c| c.shape()).collect();
            v.sort();
            v
        };
        prop_assert_eq!(shapes(&g), shapes(&g.translate(dr, dc)));
    }

    #[test]
    fn symmetry_key_ignores_rotation_and_reflection(
        cells in prop::collection::btree_map((-4i64..4, -4i64..4), state(), 1..10),
        turns in 0usize..6,
        reflect in any::<bool>(),
    ) {
        let shape = |it: Vec<(i64, i64, CellState)>| {
            let mut v = it;
            v.sort();
            let (r0, q0) = (v[0].0, v[0].1);
            CanonicalShape { cells: v.into_iter().map(|(r, q, s)| (r - r0, q - q0, s)).collect() }
        };
        let base: Vec<_> = cells.into_iter().map(|((r, q), s)| (r, q, s)).collect();
        let mut moved = base.clone();
        for _ in 0..turns {
            // sixty degrees about the origin in axial (r, q)
            moved = moved.into_iter().map(|(r, q, s)| (q + r, -r, s)).collect();
        }
        if reflect {
            moved = moved.into_iter().map(|(r, q, s)| (q, r, s)).collect();
        }
        prop_assert_eq!(shape(base).symmetry_key(), shape(moved).symmetry_key());
    }

    #[test]
    fn tracking_is_translation_invariant(seed in 0u64..1000, dr in -12isize..12, dc in -12isize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = hexrd::rules::random_rule(&mut rng, None);
        let mut g = Grid::new(24, 24).unwrap();
        g.fill_random_patch(8, 8, 0.15, 0.15, &mut rng);
        let tr = engine::run(&g, &m, 30, 16).unwrap();
        let moved = Trajectory { frames: tr.frames.iter().map(|f| f.translate(dr, dc)).collect(), ..tr.clone() };
        let cfg = TrackConfig { window: 16, ..TrackConfig::default() };
        let summary = |tr: &Trajectory| {
            let mut v: Vec<_> = track(tr, &cfg).unwrap().iter().map(|l| (l.class, l.period, l.displacement, l.size())).collect();
            v.sort();
            v
        };
        prop_assert_eq!(summary(&tr), summary(&moved));
    }

    #[test]
    fn symmetrize_is_idempotent(f1 in table(), f2 in table(), eps in 0.01..0.5f64) {
        for mode in [SymmetrizeMode::Mean, SymmetrizeMode::Floor] {
            let (a, b) = symmetrize(&f1, &f2, eps, mode);
            prop_assert_eq!(symmetrize(&a, &b, eps, mode), (a, b));
        }
    }

    #[test]
    fn likelihoods_partition_unity(
        entries in prop::collection::vec((rule(), prop::collection::vec(0..RULE_LEN, 0..20)), 1..12)
    ) {
        let corpus: Vec<CorpusEntry> = entries
            .into_iter()
            .map(|(rule, idx)| CorpusEntry {
                rule,
                necessary: idx.into_iter().map(|k| PAIRS[k]).chain([(0, 0)]).collect(),
            })
            .collect();
        let l = compute_likelihoods(&corpus).unwrap();
        prop_assert!(l.partition_error() < 1e-9);
        prop_assert_eq!(l.fhash[0], 0.0);
        prop_assert_eq!(l.fs[0], 1.0);
    }

    #[test]
    fn enumeration_is_exhaustive(masks in prop::collection::vec(1u8..8, 4)) {
        let mut r = ReducedRuleSet::default();
        let slots = [(1, 0), (0, 2), (2, 1), (3, 3)];
        for (&(i, j), &m) in slots.iter().zip(&masks) {
            let states: Vec<_> = CellState::ALL.into_iter().filter(|s| m & (1 << s.index()) != 0).collect();
            r.set(i, j, &states).unwrap();
        }
        let all: Vec<RuleMatrix> = enumerate_rules(&r).collect();
        let distinct: HashSet<_> = all.iter().collect();
        prop_assert_eq!(all.len() as u128, r.count());
        prop_assert_eq!(distinct.len(), all.len());
        for m in &all {
            for &(i, j) in &PAIRS {
                prop_assert!(r.contains(i, j, m.lookup(i, j)));
            }
        }
    }

    #[test]
    fn genetic_operators_keep_rules_valid(a in rule(), b in rule(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c1, c2) = crossover(&a.encode(), &b.encode(), &mut rng);
        prop_assert!(mutate(&c1, &mut rng).decode().is_ok());
        prop_assert!(mutate(&c2, &mut rng).decode().is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reactor_conserves_particles(a in 0u64..300, b in 0u64..300, s in 0u64..300, seed in any::<u64>()) {
        let init = ReactorState::new(a, b, s);
        let cfg = SsaConfig { t_max: 20.0, sample_dt: 0.5, omega: 100.0, max_events: Some(50_000) };
        let ts = ssa_run(&paper_system(), &init, &cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        for smp in &ts.samples {
            prop_assert_eq!(smp.counts.iter().sum::<u64>(), a + b + s);
        }
        prop_assert_eq!(ts.final_state.total(), a + b + s);
    }
}
