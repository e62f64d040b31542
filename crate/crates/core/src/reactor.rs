//! Well-stirred reactor for the quasi-chemical reading of glider rules.
//!
//! Exact stochastic simulation (Gillespie direct method). Propensities use
//! the combinatorial mass-action convention
//! `a = k * prod_s C(n_s, v_s) / omega^(order - 1)`, where `omega` is the
//! number of particles that corresponds to unit concentration.

use std::fmt;
use std::io::{self, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::trial_rng;
use crate::error::{Error, Result};

pub const SPECIES: [&str; 3] = ["A", "B", "S"];

/// Stoichiometry over `[A, B, S]`.
pub type Stoich = [u32; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reaction {
    pub reactants: Stoich,
    pub products: Stoich,
    pub rate: f64,
}

impl Reaction {
    pub fn new(reactants: Stoich, products: Stoich, rate: f64) -> Self {
        Reaction {
            reactants,
            products,
            rate,
        }
    }

    pub fn order(&self) -> u32 {
        self.reactants.iter().sum()
    }

    pub fn conserves_particles(&self) -> bool {
        self.reactants.iter().sum::<u32>() == self.products.iter().sum::<u32>()
    }
}

fn side(f: &mut fmt::Formatter<'_>, st: &Stoich) -> fmt::Result {
    let mut first = true;
    for (n, name) in st.iter().zip(SPECIES) {
        if *n == 0 {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        if *n > 1 {
            write!(f, "{n}")?;
        }
        write!(f, "{name}")?;
    }
    Ok(())
}

impl fmt::Display for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        side(f, &self.reactants)?;
        write!(f, " -> ")?;
        side(f, &self.products)?;
        write!(f, " (k={})", self.rate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionSystem {
    pub reactions: Vec<Reaction>,
}

/// The eleven reactions generalised from the glider-likelihood matrices.
pub fn paper_system() -> ReactionSystem {
    let r = Reaction::new;
    ReactionSystem {
        reactions: vec![
            r([1, 1, 0], [2, 0, 0], 1.0),
            r([2, 1, 0], [3, 0, 0], 0.1),
            r([3, 1, 0], [4, 0, 0], 0.01),
            r([1, 2, 0], [0, 3, 0], 0.1),
            r([0, 1, 1], [0, 2, 0], 0.01),
            r([0, 1, 0], [0, 0, 1], 0.0015),
            r([1, 2, 0], [2, 1, 0], 0.4),
            r([2, 2, 0], [3, 1, 0], 0.01),
            r([1, 1, 0], [0, 2, 0], 1.0),
            r([2, 1, 0], [1, 2, 0], 0.05),
            r([1, 0, 0], [0, 0, 1], 0.054),
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReactorState {
    pub counts: [u64; 3],
    pub time: f64,
}

impl ReactorState {
    pub fn new(a: u64, b: u64, s: u64) -> Self {
        ReactorState {
            counts: [a, b, s],
            time: 0.0,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn binomial(n: u64, k: u32) -> f64 {
    if n < k as u64 {
        return 0.0;
    }
    let mut acc = 1.0;
    for t in 0..k as u64 {
        acc *= (n - t) as f64 / (t + 1) as f64;
    }
    acc
}

pub fn propensity(sys: &ReactionSystem, st: &ReactorState, r: usize, omega: f64) -> f64 {
    reaction_propensity(&sys.reactions[r], &st.counts, omega)
}

fn reaction_propensity(rx: &Reaction, counts: &[u64; 3], omega: f64) -> f64 {
    let mut a = rx.rate;
    for (n, v) in counts.iter().zip(rx.reactants) {
        if v > 0 {
            a *= binomial(*n, v);
        }
    }
    let order = rx.order() as i32;
    if order > 1 {
        a /= omega.powi(order - 1);
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsaConfig {
    pub t_max: f64,
    pub sample_dt: f64,
    /// Particles per unit concentration.
    pub omega: f64,
    /// Optional cap on the number of reaction events.
    pub max_events: Option<u64>,
}

impl SsaConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0;
        if !positive(self.t_max) || !positive(self.sample_dt) || !positive(self.omega) {
            return Err(Error::Config("t_max, sample_dt and omega must be positive".into()));
        }
        Ok(())
    }
}

/// Scale at which the initial mixture sits at one unit per species: a third
/// of the initial particle total.
pub fn unit_omega(init: &ReactorState) -> f64 {
    (init.total() as f64 / 3.0).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    /// Reached `t_max`.
    TimeLimit,
    /// Every propensity vanished at `time`.
    Absorbing { time: f64 },
    /// Hit `max_events` at `time`.
    EventLimit { time: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub counts: [u64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub samples: Vec<Sample>,
    pub final_state: ReactorState,
    pub events: u64,
    pub termination: Termination,
}

impl TimeSeries {
    pub fn species(&self, s: usize) -> Vec<f64> {
        self.samples.iter().map(|x| x.counts[s] as f64).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,nA,nB,nS")?;
        for s in &self.samples {
            writeln!(w, "{},{},{},{}", s.t, s.counts[0], s.counts[1], s.counts[2])?;
        }
        Ok(())
    }
}

/// Gillespie direct method. Counts are recorded on the `sample_dt` lattice
/// up to `t_max`, or up to the termination time when the run ends early.
pub fn ssa_run<R: Rng + ?Sized>(
    sys: &ReactionSystem,
    init: &ReactorState,
    cfg: &SsaConfig,
    rng: &mut R,
) -> Result<TimeSeries> {
    cfg.validate()?;
    let n_samples = (cfg.t_max / cfg.sample_dt).floor() as usize + 1;
    let mut samples = Vec::with_capacity(n_samples.min(1 << 16));
    let mut st = *init;
    let mut props = vec![0.0; sys.reactions.len()];
    let mut events = 0u64;
    let deltas: Vec<[i64; 3]> = sys
        .reactions
        .iter()
        .map(|r| std::array::from_fn(|s| r.products[s] as i64 - r.reactants[s] as i64))
        .collect();

    let record_until = |samples: &mut Vec<Sample>, upto: f64, counts: [u64; 3]| {
        while samples.len() < n_samples {
            let t = samples.len() as f64 * cfg.sample_dt;
            if t > upto {
                break;
            }
            samples.push(Sample { t, counts });
        }
    };

    let termination = loop {
        let mut total = 0.0;
        for (p, rx) in props.iter_mut().zip(&sys.reactions) {
            *p = reaction_propensity(rx, &st.counts, cfg.omega);
            total += *p;
        }
        if total <= 0.0 {
            record_until(&mut samples, st.time, st.counts);
            break Termination::Absorbing { time: st.time };
        }
        if cfg.max_events.is_some_and(|m| events >= m) {
            record_until(&mut samples, st.time, st.counts);
            break Termination::EventLimit { time: st.time };
        }
        let u: f64 = rng.random();
        let tau = -(1.0 - u).ln() / total;
        let next_t = st.time + tau;
        // the current state holds on [time, next_t)
        let before = next_t.min(cfg.t_max);
        while samples.len() < n_samples && (samples.len() as f64 * cfg.sample_dt) < before {
            let t = samples.len() as f64 * cfg.sample_dt;
            samples.push(Sample { t, counts: st.counts });
        }
        if next_t > cfg.t_max {
            while samples.len() < n_samples {
                let t = samples.len() as f64 * cfg.sample_dt;
                samples.push(Sample { t, counts: st.counts });
            }
            st.time = cfg.t_max;
            break Termination::TimeLimit;
        }
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = props.len() - 1;
        for (k, &p) in props.iter().enumerate() {
            acc += p;
            if target < acc && p > 0.0 {
                chosen = k;
                break;
            }
        }
        // guard against round-off selecting a zero-propensity tail entry
        while props[chosen] <= 0.0 {
            chosen -= 1;
        }
        for (c, d) in st.counts.iter_mut().zip(deltas[chosen]) {
            *c = (*c as i64 + d) as u64;
        }
        st.time = next_t;
        events += 1;
    };

    Ok(TimeSeries {
        samples,
        final_state: st,
        events,
        termination,
    })
}

/// Independent runs with per-run random streams derived from `seed`.
pub fn ensemble(
    sys: &ReactionSystem,
    init: &ReactorState,
    cfg: &SsaConfig,
    seed: u64,
    runs: usize,
) -> Result<Vec<TimeSeries>> {
    (0..runs)
        .into_par_iter()
        .map(|k| ssa_run(sys, init, cfg, &mut trial_rng(seed, k as u64)))
        .collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Number of strict local extrema in a sampled series.
pub fn turning_points(xs: &[f64]) -> usize {
    xs.windows(3)
        .filter(|w| (w[1] > w[0] && w[1] > w[2]) || (w[1] < w[0] && w[1] < w[2]))
        .count()
}
