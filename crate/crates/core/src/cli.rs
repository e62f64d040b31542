//! `hexrd` command-line front end.
//!
//! Every subcommand writes a JSON metadata record (resolved configuration
//! and tool version) next to its primary output as `<output>.meta.json`, or
//! to stderr when the primary output goes to stdout.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::analysis::{self, LikelihoodMatrices, ReduceParams, ReducedRuleSet, SweepConfig, SymmetrizeMode};
use crate::detector::{self, FitnessConfig, TrackConfig, TrialReport};
use crate::engine;
use crate::error::{Error, Result};
use crate::evolve::{self, EaConfig};
use crate::hexgrid::{CellState, Grid};
use crate::reactor::{self, ReactorState, SsaConfig, TimeSeries};
use crate::rules::{self, RuleConstraints};

#[derive(Debug, Parser)]
#[command(name = "hexrd", version, about = "Hexagonal three-state automata, glider search and reactor kinetics")]
pub struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Master random seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a rule from a grid file or a random patch.
    Simulate(SimulateArgs),
    /// Track localizations and report glider fitness.
    Detect(DetectArgs),
    /// Evolve a glider-supporting rule.
    Evolve(EvolveArgs),
    /// Glider-likelihood matrices over a rule corpus.
    Likelihood(LikelihoodArgs),
    /// Reduce likelihood matrices to a set-valued rule table.
    Reduce(ReduceArgs),
    /// Stochastic simulation of the reaction scheme.
    React(ReactArgs),
    /// Sample rules from a reduced table and tally localization classes.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FitnessArgs {
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    #[arg(long, default_value_t = 64)]
    pub height: usize,
    /// Side of the centred random patch.
    #[arg(long, default_value_t = 16)]
    pub patch: usize,
    #[arg(long, default_value_t = 0.1)]
    pub p_a: f64,
    #[arg(long, default_value_t = 0.1)]
    pub p_b: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[command(flatten)]
    pub track: TrackArgs,
    /// Do not count puffer trains as gliders.
    #[arg(long)]
    pub no_puffers: bool,
}

impl FitnessArgs {
    pub fn config(&self) -> FitnessConfig {
        FitnessConfig {
            width: self.width,
            height: self.height,
            patch: self.patch,
            p_a: self.p_a,
            p_b: self.p_b,
            steps: self.steps,
            trials: self.trials,
            track: self.track.config(),
            count_puffers: !self.no_puffers,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrackArgs {
    /// Trailing frames analysed by the tracker.
    #[arg(long, default_value_t = 48)]
    pub window: usize,
    #[arg(long, default_value_t = 12)]
    pub p_max: usize,
    #[arg(long, default_value_t = 4)]
    pub min_frames: usize,
}

impl TrackArgs {
    pub fn config(&self) -> TrackConfig {
        TrackConfig {
            window: self.window,
            p_max: self.p_max,
            min_frames: self.min_frames,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Rule file (one 36-symbol line).
    #[arg(long)]
    pub rule: PathBuf,
    /// Initial grid; a random patch is used when absent.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    #[arg(long, default_value_t = 64)]
    pub height: usize,
    #[arg(long, default_value_t = 16)]
    pub patch: usize,
    #[arg(long, default_value_t = 0.1)]
    pub p_a: f64,
    #[arg(long, default_value_t = 0.1)]
    pub p_b: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Frame dump (grid text, blank-line separated).
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Frames kept in the dump, counted from the end; default all.
    #[arg(long)]
    pub keep: Option<usize>,
    /// Final grid as text; stdout when neither this nor --dump is given.
    #[arg(long = "final")]
    pub final_grid: Option<PathBuf>,
    /// Final grid as PGM.
    #[arg(long)]
    pub pgm: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub rule: PathBuf,
    /// Track a frame dump instead of running random trials.
    #[arg(long)]
    pub frames: Option<PathBuf>,
    #[command(flatten)]
    pub fitness: FitnessArgs,
    /// Report CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub fitness: FitnessArgs,
    #[arg(long, default_value_t = 40)]
    pub population: usize,
    /// Generations without strict improvement before stopping.
    #[arg(long, default_value_t = 10)]
    pub stall: usize,
    #[arg(long, default_value_t = 0.6)]
    pub crossover_rate: f64,
    #[arg(long, default_value_t = 2)]
    pub tournament: usize,
    #[arg(long)]
    pub max_generations: Option<usize>,
    /// Fix an entry of every initial rule, e.g. `1,1=A`. Repeatable.
    #[arg(long = "bind", value_name = "I,J=STATE")]
    pub bind: Vec<String>,
    /// Best rule file.
    #[arg(long)]
    pub out: PathBuf,
    /// Corpus file the best rule is appended to.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Per-generation CSV (generation,best,mean).
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct LikelihoodArgs {
    /// Corpus file, one rule per line.
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub fitness: FitnessArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Directory for one PGM heatmap per matrix.
    #[arg(long)]
    pub heatmaps: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReduceArgs {
    /// Likelihood CSV; the bundled published matrices when absent.
    #[arg(long)]
    pub matrices: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub negligible: f64,
    /// Floor the symmetrized means instead of keeping them.
    #[arg(long)]
    pub floor: bool,
    /// Reduced table CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Table to compare against; the bundled published table when absent.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Differences against the reference as CSV.
    #[arg(long)]
    pub diff: Option<PathBuf>,
    /// Write every member rule as a corpus file.
    #[arg(long)]
    pub enumerate: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReactArgs {
    #[arg(long, default_value_t = 1000.0)]
    pub tmax: f64,
    /// Sampling interval.
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    /// Particles per unit concentration; a third of the initial total by default.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 33_333)]
    pub a: u64,
    #[arg(long, default_value_t = 33_333)]
    pub b: u64,
    #[arg(long, default_value_t = 33_333)]
    pub s: u64,
    /// Ensemble size; with more than one run the CSV holds the ensemble mean.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[arg(long)]
    pub max_events: Option<u64>,
    /// Time-series CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Reduced table CSV; the bundled published table when absent.
    #[arg(long)]
    pub reduced: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub rules: usize,
    #[arg(long, default_value_t = 30)]
    pub width: usize,
    #[arg(long, default_value_t = 30)]
    pub height: usize,
    /// Random patch side; defaults to the whole grid.
    #[arg(long)]
    pub patch: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub p_a: f64,
    #[arg(long, default_value_t = 0.1)]
    pub p_b: f64,
    #[arg(long, default_value_t = 300)]
    pub steps: usize,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 60)]
    pub window: usize,
    #[arg(long, default_value_t = 12)]
    pub p_max: usize,
    /// Per-rule class counts as CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `std::env::args` and runs the selected subcommand.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hexrd: {e}");
            ExitCode::FAILURE
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Simulate(a) => simulate(cli, a),
        Command::Detect(a) => detect(cli, a),
        Command::Evolve(a) => evolve_cmd(cli, a),
        Command::Likelihood(a) => likelihood(cli, a),
        Command::Reduce(a) => reduce(cli, a),
        Command::React(a) => react(cli, a),
        Command::Sweep(a) => sweep(cli, a),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Output file or stdout.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_meta(cli: &Cli, command: &str, primary: Option<&Path>, config: Value) -> Result<()> {
    let meta = json!({
        "tool": "hexrd",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": cli.seed,
        "threads": cli.threads,
        "config": config,
    });
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Config(e.to_string()))?;
    match primary {
        Some(p) => {
            let mut name = p.as_os_str().to_owned();
            name.push(".meta.json");
            fs::write(PathBuf::from(name), text + "\n")?;
        }
        None => eprintln!("{text}"),
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("configs serialize")
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<()> {
    let m = rules::read_rule_file(&a.rule)?;
    let g = match &a.grid {
        Some(p) => fs::read_to_string(p)?.parse::<Grid>()?,
        None => {
            let mut g = Grid::new(a.width, a.height)?;
            g.fill_random_patch(a.patch, a.patch, a.p_a, a.p_b, &mut detector::trial_rng(cli.seed, 0));
            g
        }
    };
    let keep = match (&a.dump, a.keep) {
        (Some(_), k) => k.unwrap_or(a.steps + 1),
        (None, _) => 1,
    };
    let tr = engine::run(&g, &m, a.steps, keep)?;
    let last = tr.last().expect("at least one frame kept");
    if let Some(p) = &a.dump {
        let mut w = create(p)?;
        engine::write_frames(&mut w, &tr.frames)?;
        w.flush()?;
    }
    if let Some(p) = &a.pgm {
        let mut w = create(p)?;
        last.write_pgm(&mut w)?;
        w.flush()?;
    }
    if a.final_grid.is_some() || a.dump.is_none() {
        let mut w = sink(a.final_grid.as_deref())?;
        write!(w, "{last}")?;
        w.flush()?;
    }
    let primary = a.dump.as_deref().or(a.final_grid.as_deref());
    emit_meta(
        cli,
        "simulate",
        primary,
        json!({
            "rule": m.to_string(),
            "grid": a.grid,
            "width": g.width(),
            "height": g.height(),
            "random_patch": a.grid.is_none().then(|| json!({"patch": a.patch, "p_a": a.p_a, "p_b": a.p_b})),
            "steps": a.steps,
            "frames_kept": tr.len(),
        }),
    )
}

fn detect(cli: &Cli, a: &DetectArgs) -> Result<()> {
    let m = rules::read_rule_file(&a.rule)?;
    let cfg = a.fitness.config();
    let reports = match &a.frames {
        Some(p) => {
            let frames = engine::parse_frames(&fs::read_to_string(p)?)?;
            let tr = engine::Trajectory { frames, rule: m, t0: 0 };
            let track = TrackConfig {
                window: cfg.track.window.min(tr.len()),
                ..cfg.track
            };
            vec![TrialReport {
                trial: 0,
                localizations: detector::track(&tr, &track)?,
            }]
        }
        None => detector::detect(&m, &cfg, cli.seed)?,
    };
    let mut w = sink(a.out.as_deref())?;
    detector::write_report_csv(&mut w, &reports)?;
    w.flush()?;
    if a.frames.is_none() {
        eprintln!("fitness {:e}", detector::fitness_from_reports(&reports, &cfg));
    }
    emit_meta(
        cli,
        "detect",
        a.out.as_deref(),
        json!({"rule": m.to_string(), "frames": a.frames, "fitness": to_value(&cfg)}),
    )
}

fn parse_bind(s: &str) -> Result<(u8, u8, CellState)> {
    let bad = || Error::Config(format!("bad binding `{s}`, expected I,J=STATE"));
    let (pair, state) = s.split_once('=').ok_or_else(bad)?;
    let (i, j) = pair.split_once(',').ok_or_else(bad)?;
    let i: u8 = i.trim().parse().map_err(|_| bad())?;
    let j: u8 = j.trim().parse().map_err(|_| bad())?;
    let mut chars = state.trim().chars();
    let st = match (chars.next(), chars.next()) {
        (Some(c), None) => CellState::from_letter(c).ok_or_else(bad)?,
        _ => return Err(bad()),
    };
    Ok((i, j, st))
}

fn evolve_cmd(cli: &Cli, a: &EvolveArgs) -> Result<()> {
    let cfg = EaConfig {
        population_size: a.population,
        stall_generations: a.stall,
        crossover_rate: a.crossover_rate,
        tournament_size: a.tournament,
        max_generations: a.max_generations,
        fitness: a.fitness.config(),
        rng_seed: cli.seed,
    };
    let mut constraints = RuleConstraints::new();
    for b in &a.bind {
        let (i, j, s) = parse_bind(b)?;
        constraints.bind(i, j, s)?;
    }
    let run = evolve::ea_run_constrained(&cfg, (!constraints.is_empty()).then_some(&constraints))?;
    rules::write_rule_file(&a.out, &run.best_rule)?;
    if let Some(c) = &a.corpus {
        rules::append_to_corpus(c, &run.best_rule)?;
    }
    if let Some(h) = &a.history {
        let mut w = create(h)?;
        writeln!(w, "generation,best,mean")?;
        for g in &run.history {
            writeln!(w, "{},{},{}", g.generation, g.best, g.mean)?;
        }
        w.flush()?;
    }
    eprintln!(
        "best fitness {:e} at generation {} of {}",
        run.best_fitness,
        run.generation_of_best,
        run.generations()
    );
    emit_meta(
        cli,
        "evolve",
        Some(&a.out),
        json!({
            "ea": to_value(&cfg),
            "bind": a.bind,
            "best_rule": run.best_rule.to_string(),
            "best_fitness": run.best_fitness,
            "generations": run.generations(),
        }),
    )
}

fn likelihood(cli: &Cli, a: &LikelihoodArgs) -> Result<()> {
    let corpus_rules = rules::read_corpus(&a.corpus)?;
    let cfg = a.fitness.config();
    let corpus = analysis::build_corpus(&corpus_rules, &cfg, cli.seed)?;
    if corpus.is_empty() {
        return Err(Error::Config("no isolable glider found in the corpus".into()));
    }
    let l = analysis::compute_likelihoods(&corpus)?;
    let mut w = create(&a.out)?;
    l.write_csv(&mut w)?;
    w.flush()?;
    if let Some(dir) = &a.heatmaps {
        fs::create_dir_all(dir)?;
        for (name, t) in [("FS", &l.fs), ("FA", &l.fa), ("FB", &l.fb), ("Fhash", &l.fhash)] {
            let mut w = create(&dir.join(format!("{name}.pgm")))?;
            analysis::write_heatmap_pgm(&mut w, t)?;
            w.flush()?;
        }
    }
    eprintln!("{} gliders from {} rules", corpus.len(), corpus_rules.len());
    emit_meta(
        cli,
        "likelihood",
        Some(&a.out),
        json!({"corpus": a.corpus, "rules": corpus_rules.len(), "entries": corpus.len(), "fitness": to_value(&cfg)}),
    )
}

fn reduce(cli: &Cli, a: &ReduceArgs) -> Result<()> {
    let l = match &a.matrices {
        Some(p) => LikelihoodMatrices::read_csv(File::open(p)?)?,
        None => LikelihoodMatrices::fig1(),
    };
    let params = ReduceParams {
        theta: a.theta,
        eps: a.eps,
        negligible: a.negligible,
        mode: if a.floor {
            SymmetrizeMode::Floor
        } else {
            SymmetrizeMode::Mean
        },
        ..ReduceParams::default()
    };
    let r = analysis::reduce(&l, &params)?;
    let reference = match &a.reference {
        Some(p) => ReducedRuleSet::read_csv(File::open(p)?)?,
        None => ReducedRuleSet::paper_r(),
    };
    let diffs = analysis::compare(&r, &reference);
    let mut w = sink(a.out.as_deref())?;
    r.write_csv(&mut w)?;
    w.flush()?;
    if let Some(p) = &a.diff {
        let mut w = create(p)?;
        analysis::write_diff_csv(&mut w, &diffs)?;
        w.flush()?;
    }
    if let Some(p) = &a.enumerate {
        let mut w = create(p)?;
        for m in analysis::enumerate_rules(&r) {
            writeln!(w, "{m}")?;
        }
        w.flush()?;
    }
    eprintln!(
        "{}/36 entries match the reference; {} member rules",
        36 - diffs.len(),
        r.count()
    );
    emit_meta(
        cli,
        "reduce",
        a.out.as_deref(),
        json!({
            "matrices": a.matrices,
            "reference": a.reference,
            "params": to_value(&params),
            "matching_entries": 36 - diffs.len(),
            "rules": r.count().to_string(),
        }),
    )
}

fn react(cli: &Cli, a: &ReactArgs) -> Result<()> {
    if a.runs == 0 {
        return Err(Error::Config("runs must be >= 1".into()));
    }
    let init = ReactorState::new(a.a, a.b, a.s);
    let cfg = SsaConfig {
        t_max: a.tmax,
        sample_dt: a.dt,
        omega: a.omega.unwrap_or_else(|| reactor::unit_omega(&init)),
        max_events: a.max_events,
    };
    let sys = reactor::paper_system();
    let runs = reactor::ensemble(&sys, &init, &cfg, cli.seed, a.runs)?;
    let mut w = sink(a.out.as_deref())?;
    if let [one] = runs.as_slice() {
        one.write_csv(&mut w)?;
    } else {
        write_mean_csv(&mut w, &runs)?;
    }
    w.flush()?;
    let terminations: Vec<Value> = runs.iter().map(|r| to_value(&r.termination)).collect();
    emit_meta(
        cli,
        "react",
        a.out.as_deref(),
        json!({
            "initial": [a.a, a.b, a.s],
            "ssa": to_value(&cfg),
            "runs": a.runs,
            "events": runs.iter().map(|r| r.events).collect::<Vec<_>>(),
            "terminations": terminations,
        }),
    )
}

/// Ensemble mean over the samples every run reached.
fn write_mean_csv<W: Write>(mut w: W, runs: &[TimeSeries]) -> io::Result<()> {
    writeln!(w, "t,nA,nB,nS")?;
    let n = runs.iter().map(|r| r.samples.len()).min().unwrap_or(0);
    for k in 0..n {
        let mut sum = [0.0; 3];
        for r in runs {
            for (s, c) in sum.iter_mut().zip(r.samples[k].counts) {
                *s += c as f64;
            }
        }
        let m = sum.map(|s| s / runs.len() as f64);
        writeln!(w, "{},{},{},{}", runs[0].samples[k].t, m[0], m[1], m[2])?;
    }
    Ok(())
}

fn sweep(cli: &Cli, a: &SweepArgs) -> Result<()> {
    let r = match &a.reduced {
        Some(p) => ReducedRuleSet::read_csv(File::open(p)?)?,
        None => ReducedRuleSet::paper_r(),
    };
    let cfg = SweepConfig {
        rules: a.rules,
        fitness: FitnessConfig {
            width: a.width,
            height: a.height,
            patch: a.patch.unwrap_or(a.width.max(a.height)),
            p_a: a.p_a,
            p_b: a.p_b,
            steps: a.steps,
            trials: a.trials,
            track: TrackConfig {
                window: a.window,
                p_max: a.p_max,
                ..TrackConfig::default()
            },
            count_puffers: true,
        },
    };
    let report = analysis::stationarity_sweep(&r, &cfg, cli.seed)?;
    let mut w = sink(a.out.as_deref())?;
    report.write_csv(&mut w)?;
    w.flush()?;
    eprintln!("class totals {:?}, mobile {}", report.histogram, report.mobile());
    emit_meta(
        cli,
        "sweep",
        a.out.as_deref(),
        json!({"reduced": a.reduced, "sweep": to_value(&cfg), "histogram": report.histogram}),
    )
}
