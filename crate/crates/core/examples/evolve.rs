//! A short constrained evolutionary search on a small lattice.

use hexrd::detector::{FitnessConfig, TrackConfig};
use hexrd::evolve::{ea_run_constrained, EaConfig};
use hexrd::rules::RuleConstraints;
use hexrd::CellState;

fn main() -> hexrd::Result<()> {
    let mut c = RuleConstraints::new();
    c.bind(1, 1, CellState::A)?;
    for i in 0..=7u8 {
        for j in 0..=(7 - i) {
            if i + j >= 5 {
                c.bind(i, j, CellState::S)?;
            }
        }
    }
    let cfg = EaConfig {
        population_size: 24,
        stall_generations: 6,
        max_generations: Some(25),
        rng_seed: 4,
        fitness: FitnessConfig {
            width: 32,
            height: 32,
            patch: 12,
            steps: 100,
            trials: 2,
            track: TrackConfig {
                window: 24,
                ..TrackConfig::default()
            },
            ..FitnessConfig::default()
        },
        ..EaConfig::default()
    };
    let run = ea_run_constrained(&cfg, Some(&c))?;
    for g in &run.history {
        println!("gen {:>2}  best {:.3e}  mean {:.3e}", g.generation, g.best, g.mean);
    }
    println!(
        "best {} fitness {:.3e} (generation {})",
        run.best_rule, run.best_fitness, run.generation_of_best
    );
    Ok(())
}
