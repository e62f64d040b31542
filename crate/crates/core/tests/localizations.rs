use hexrd::analysis::{
    isolate_glider, necessary_transitions, stationarity_sweep, ReducedRuleSet, SweepConfig,
};
use hexrd::detector::{self, track, FitnessConfig, LocalizationClass, TrackConfig, TrackEnd};
use hexrd::engine::{self, Trajectory};
use hexrd::rules::pinned_glider_rule;
use hexrd::{CellState, Grid, HexCoord, RuleMatrix};

fn pinned_glider() -> hexrd::analysis::IsolatedGlider {
    let m = pinned_glider_rule();
    let cfg = FitnessConfig::default();
    let reports = detector::detect(&m, &cfg, 0).unwrap();
    reports
        .iter()
        .flat_map(|r| &r.localizations)
        .find_map(|l| isolate_glider(&m, l, &cfg.track).unwrap())
        .expect("fixture rule yields an isolable glider")
}

#[test]
fn fixture_glider_is_period_two() {
    let g = pinned_glider();
    assert_eq!(g.localization.class, LocalizationClass::Glider);
    assert_eq!(g.localization.period, 2);
    assert_ne!(g.localization.displacement, (0, 0));
    // the glider alone in a quiescent field never needs more than five live neighbours
    let set = necessary_transitions(&g.rule, &g.localization, &g.trajectory).unwrap();
    assert!(set.contains(&(0, 0)));
    assert!(set.iter().all(|&(i, j)| i + j <= 6));
}

#[test]
fn necessary_set_does_not_depend_on_phase() {
    let g = pinned_glider();
    let p = g.localization.period;
    let long = engine::run(&g.trajectory.frames[0], &g.rule, 3 * p, 3 * p + 1).unwrap();
    let sets: Vec<_> = (0..p)
        .map(|k| {
            let tr = Trajectory {
                frames: long.frames[k..].to_vec(),
                rule: g.rule,
                t0: k,
            };
            necessary_transitions(&g.rule, &g.localization, &tr).unwrap()
        })
        .collect();
    assert!(sets.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn necessary_rejects_wrong_rule() {
    let g = pinned_glider();
    assert!(necessary_transitions(&RuleMatrix::quiescent(), &g.localization, &g.trajectory).is_err());
}

#[test]
fn colliding_patterns_are_unresolved() {
    // two cells walking towards each other one column per frame
    let frames: Vec<Grid> = (0..20)
        .map(|t| {
            let mut g = Grid::new(40, 12).unwrap();
            let left = 4 + t;
            let right = 30usize.saturating_sub(t);
            if left < right {
                g.set(HexCoord::new(5, left), CellState::A);
                g.set(HexCoord::new(5, right), CellState::B);
            } else {
                g.set(HexCoord::new(5, 17), CellState::A);
                g.set(HexCoord::new(5, 18), CellState::B);
            }
            g
        })
        .collect();
    let tr = Trajectory {
        frames,
        rule: RuleMatrix::quiescent(),
        t0: 0,
    };
    let locs = track(&tr, &TrackConfig { window: 20, ..TrackConfig::default() }).unwrap();
    let walkers: Vec<_> = locs.iter().filter(|l| l.first_frame == 0).collect();
    assert_eq!(walkers.len(), 2);
    for w in walkers {
        assert_eq!(w.end, Some(TrackEnd::Merged));
        assert_eq!(w.class, LocalizationClass::Unresolved);
    }
}

#[test]
fn stationary_member_of_reduced_class() {
    // a member of the published reduced class that settles into still lifes and breathers
    let m: RuleMatrix = "SSSSSSSSSASSSSSSBASSSAASSSASSSSSSSSS".parse().unwrap();
    let r = ReducedRuleSet::paper_r();
    assert!(hexrd::rules::PAIRS.iter().all(|&(i, j)| r.contains(i, j, m.lookup(i, j))));
    let cfg = SweepConfig::default().fitness;
    let reports = detector::detect(&m, &cfg, 0).unwrap();
    let classes: Vec<_> = reports.iter().flat_map(|t| &t.localizations).map(|l| l.class).collect();
    assert!(classes.contains(&LocalizationClass::StillLife));
    assert!(classes.contains(&LocalizationClass::Oscillator));
    assert!(classes
        .iter()
        .all(|c| matches!(c, LocalizationClass::StillLife | LocalizationClass::Oscillator)));
}

#[test]
fn sweep_histogram_counts_every_track() {
    let cfg = SweepConfig {
        rules: 4,
        fitness: FitnessConfig {
            steps: 60,
            trials: 2,
            track: TrackConfig {
                window: 20,
                ..TrackConfig::default()
            },
            ..SweepConfig::default().fitness
        },
    };
    let report = stationarity_sweep(&ReducedRuleSet::paper_r(), &cfg, 5).unwrap();
    assert_eq!(report.per_rule.len(), 4);
    let mut tracks = 0;
    for r in &report.per_rule {
        let m: RuleMatrix = r.rule.parse().unwrap();
        let reports = detector::detect(&m, &cfg.fitness, 5).unwrap();
        let n: usize = reports.iter().map(|t| t.localizations.len()).sum();
        assert_eq!(r.histogram.iter().sum::<usize>(), n);
        tracks += n;
    }
    assert_eq!(report.histogram.iter().sum::<usize>(), tracks);

    let quiet = ReducedRuleSet::default();
    let empty = stationarity_sweep(&quiet, &cfg, 5).unwrap();
    assert_eq!(empty.histogram.iter().sum::<usize>(), 0);
}
