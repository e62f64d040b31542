//! Evolutionary search for glider-supporting rules.
//!
//! Generational loop with single-individual elitism, size-2 tournament
//! selection, one-point crossover and a single-symbol mutation per
//! offspring. The run stops once `stall_generations` consecutive
//! generations fail to strictly improve the best fitness.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{self, FitnessConfig};
use crate::error::{Error, Result};
use crate::hexgrid::CellState;
use crate::rules::{random_rule, Genome, RuleConstraints, RuleMatrix, RULE_LEN};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EaConfig {
    pub population_size: usize,
    pub stall_generations: usize,
    pub crossover_rate: f64,
    pub tournament_size: usize,
    /// Hard cap on generations; `None` relies on the stall rule alone.
    pub max_generations: Option<usize>,
    pub fitness: FitnessConfig,
    pub rng_seed: u64,
}

impl Default for EaConfig {
    fn default() -> Self {
        EaConfig {
            population_size: 40,
            stall_generations: 10,
            crossover_rate: 0.6,
            tournament_size: 2,
            max_generations: None,
            fitness: FitnessConfig::default(),
            rng_seed: 0,
        }
    }
}

impl EaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population_size must be >= 2".into()));
        }
        if self.stall_generations < 1 {
            return Err(Error::Config("stall_generations must be >= 1".into()));
        }
        if self.tournament_size < 1 {
            return Err(Error::Config("tournament_size must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::Config("crossover_rate must lie in [0,1]".into()));
        }
        self.fitness.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EaRun {
    pub best_rule: RuleMatrix,
    pub best_fitness: f64,
    pub generation_of_best: usize,
    pub history: Vec<GenerationStats>,
}

impl EaRun {
    pub fn generations(&self) -> usize {
        self.history.len()
    }
}

/// Changes one of the 35 free positions to a different state.
pub fn mutate<R: Rng + ?Sized>(g: &Genome, rng: &mut R) -> Genome {
    let mut out = g.clone();
    let pos = rng.random_range(1..g.len());
    let cur = out.0[pos].index();
    let shift = rng.random_range(1..3);
    out.0[pos] = CellState::ALL[(cur + shift) % 3];
    out
}

/// One-point crossover with the cut drawn from `1..=35`.
pub fn crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, rng: &mut R) -> (Genome, Genome) {
    let k = rng.random_range(1..RULE_LEN);
    crossover_at(a, b, k)
}

pub fn crossover_at(a: &Genome, b: &Genome, k: usize) -> (Genome, Genome) {
    let mut c1 = a.0[..k].to_vec();
    c1.extend_from_slice(&b.0[k..]);
    let mut c2 = b.0[..k].to_vec();
    c2.extend_from_slice(&a.0[k..]);
    (Genome(c1), Genome(c2))
}

fn tournament<'a, R: Rng + ?Sized>(pop: &'a [(Genome, f64)], size: usize, rng: &mut R) -> &'a Genome {
    let mut best = &pop[rng.random_range(0..pop.len())];
    for _ in 1..size {
        let c = &pop[rng.random_range(0..pop.len())];
        if c.1 > best.1 {
            best = c;
        }
    }
    &best.0
}

/// Runs the search with the glider-count fitness.
pub fn ea_run(cfg: &EaConfig) -> Result<EaRun> {
    ea_run_constrained(cfg, None)
}

/// Runs the search with the initial population drawn under `constraints`.
pub fn ea_run_constrained(cfg: &EaConfig, constraints: Option<&RuleConstraints>) -> Result<EaRun> {
    cfg.validate()?;
    // every individual sees the same initial configurations
    let eval_seed = cfg.rng_seed ^ 0x5eed_f17e_55e5_0000;
    let fit = cfg.fitness;
    ea_run_with(cfg, constraints, |m| {
        detector::fitness(m, &fit, eval_seed).expect("validated fitness config")
    })
}

/// Runs the search with an arbitrary fitness function.
///
/// Each genome is evaluated once; the carried elite keeps its score.
pub fn ea_run_with<F>(cfg: &EaConfig, constraints: Option<&RuleConstraints>, fitness: F) -> Result<EaRun>
where
    F: Fn(&RuleMatrix) -> f64 + Sync,
{
    if cfg.population_size < 2 || cfg.stall_generations < 1 || cfg.tournament_size < 1 {
        return Err(Error::Config("invalid EA configuration".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let evaluate = |genomes: Vec<Genome>| -> Vec<(Genome, f64)> {
        genomes
            .into_par_iter()
            .map(|g| {
                let f = fitness(&g.decode().expect("operators keep genomes valid"));
                (g, f)
            })
            .collect()
    };

    let initial: Vec<Genome> = (0..cfg.population_size)
        .map(|_| random_rule(&mut rng, constraints).encode())
        .collect();
    let mut pop = evaluate(initial);

    let mut history = Vec::new();
    let mut best = best_of(&pop).clone();
    let mut generation_of_best = 0;
    let mut stall = 0;
    let mut generation = 0;
    loop {
        let mean = pop.iter().map(|p| p.1).sum::<f64>() / pop.len() as f64;
        history.push(GenerationStats {
            generation,
            best: best.1,
            mean,
        });
        if stall >= cfg.stall_generations || cfg.max_generations.is_some_and(|m| generation + 1 >= m) {
            break;
        }

        let mut offspring = Vec::with_capacity(cfg.population_size - 1);
        while offspring.len() < cfg.population_size - 1 {
            let a = tournament(&pop, cfg.tournament_size, &mut rng);
            let b = tournament(&pop, cfg.tournament_size, &mut rng);
            let (c1, c2) = if rng.random_bool(cfg.crossover_rate) {
                crossover(a, b, &mut rng)
            } else {
                (a.clone(), b.clone())
            };
            offspring.push(mutate(&c1, &mut rng));
            if offspring.len() < cfg.population_size - 1 {
                offspring.push(mutate(&c2, &mut rng));
            }
        }
        let mut next = vec![best.clone()];
        next.extend(evaluate(offspring));
        pop = next;
        generation += 1;

        let cand = best_of(&pop);
        if cand.1 > best.1 {
            best = cand.clone();
            generation_of_best = generation;
            stall = 0;
        } else {
            stall += 1;
        }
    }

    Ok(EaRun {
        best_rule: best.0.decode()?,
        best_fitness: best.1,
        generation_of_best,
        history,
    })
}

fn best_of(pop: &[(Genome, f64)]) -> &(Genome, f64) {
    // first maximum, so the carried elite wins ties
    pop.iter()
        .fold(&pop[0], |acc, p| if p.1 > acc.1 { p } else { acc })
}
