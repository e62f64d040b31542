//! Glider-likelihood matrices and the reduced rule class.
//!
//! For a corpus of (rule, glider) pairs, [`compute_likelihoods`] records how
//! often each neighbourhood signature `(i, j)` is exercised by the glider and,
//! when it is, which output state the rule assigns. [`reduce`] collapses the
//! four matrices into a set-valued table ([`ReducedRuleSet`]) whose concrete
//! members are listed by [`enumerate_rules`] and probed by
//! [`stationarity_sweep`].

use std::collections::{BTreeSet, HashSet};
use std::io::{self, Read, Write};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{self, CanonicalShape, FitnessConfig, Localization, LocalizationClass, TrackConfig};
use crate::engine::{self, Trajectory};
use crate::error::{Error, Result};
use crate::hexgrid::{from_axial, CellState, Grid};
use crate::rules::{index, RuleMatrix, PAIRS, RULE_LEN};

const FIG1_CSV: &str = include_str!("../fixtures/fig1_likelihoods.csv");
const PAPER_R_CSV: &str = include_str!("../fixtures/reduced_r.csv");

/// Slack for threshold comparisons on two-decimal inputs.
const SLACK: f64 = 1e-9;

/// One value per `(i, j)` pair, in canonical rule order.
pub type Table = [f64; RULE_LEN];

#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodMatrices {
    pub fs: Table,
    pub fa: Table,
    pub fb: Table,
    /// Fraction of corpus entries for which the transition is never used.
    pub fhash: Table,
}

#[derive(Debug, Serialize, Deserialize)]
struct LikelihoodRow {
    i: u8,
    j: u8,
    #[serde(rename = "FS")]
    fs: f64,
    #[serde(rename = "FA")]
    fa: f64,
    #[serde(rename = "FB")]
    fb: f64,
    #[serde(rename = "Fhash")]
    fhash: f64,
}

impl LikelihoodMatrices {
    pub fn zeros() -> Self {
        LikelihoodMatrices {
            fs: [0.0; RULE_LEN],
            fa: [0.0; RULE_LEN],
            fb: [0.0; RULE_LEN],
            fhash: [0.0; RULE_LEN],
        }
    }

    /// The matrices printed in the original glider study.
    pub fn fig1() -> Self {
        Self::read_csv(FIG1_CSV.as_bytes()).expect("bundled likelihood table is well formed")
    }

    pub fn state(&self, s: CellState) -> &Table {
        match s {
            CellState::S => &self.fs,
            CellState::A => &self.fa,
            CellState::B => &self.fb,
        }
    }

    pub fn sum(&self, i: u8, j: u8) -> f64 {
        let k = index(i, j);
        self.fs[k] + self.fa[k] + self.fb[k] + self.fhash[k]
    }

    /// Largest deviation of `FS + FA + FB + Fhash` from 1 over all entries.
    pub fn partition_error(&self) -> f64 {
        PAIRS.iter().map(|&(i, j)| (self.sum(i, j) - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            out.serialize(LikelihoodRow {
                i,
                j,
                fs: self.fs[k],
                fa: self.fa[k],
                fb: self.fb[k],
                fhash: self.fhash[k],
            })
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a table with columns `i,j,FS,FA,FB,Fhash`. Every pair must
    /// appear exactly once.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut m = Self::zeros();
        let mut seen = [false; RULE_LEN];
        for (n, row) in csv::Reader::from_reader(r).deserialize::<LikelihoodRow>().enumerate() {
            let row = row.map_err(csv_err)?;
            let k = checked_index(row.i, row.j, n + 2)?;
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::Parse {
                    line: n + 2,
                    msg: format!("duplicate entry ({}, {})", row.i, row.j),
                });
            }
            m.fs[k] = row.fs;
            m.fa[k] = row.fa;
            m.fb[k] = row.fb;
            m.fhash[k] = row.fhash;
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            let (i, j) = PAIRS[k];
            return Err(Error::Config(format!("missing entry ({i}, {j})")));
        }
        Ok(m)
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        msg: e.to_string(),
    }
}

fn checked_index(i: u8, j: u8, line: usize) -> Result<usize> {
    if i as u16 + j as u16 > 7 {
        return Err(Error::Parse {
            line,
            msg: format!("pair ({i}, {j}) out of range"),
        });
    }
    Ok(index(i, j))
}

/// Signatures visited by a lone glider over one full period.
///
/// `tr` must start with the glider alone in a quiescent field, follow `m`
/// and hold at least `glider.period` frames. `(0, 0)` is always included.
pub fn necessary_transitions(
    m: &RuleMatrix,
    glider: &Localization,
    tr: &Trajectory,
) -> Result<BTreeSet<(u8, u8)>> {
    if glider.period == 0 {
        return Err(Error::Config("localization has no period".into()));
    }
    if tr.len() < glider.period {
        return Err(Error::Config(format!(
            "trajectory has {} frames, period is {}",
            tr.len(),
            glider.period
        )));
    }
    let span = &tr.frames[..glider.period];
    if span.windows(2).any(|w| engine::step(&w[0], m) != w[1]) {
        return Err(Error::Config("trajectory does not follow the rule".into()));
    }
    let mut out = BTreeSet::from([(0, 0)]);
    for (k, g) in span.iter().enumerate() {
        if touches_seam(g) {
            return Err(Error::SeamContact { frame: tr.t0 + k });
        }
        for idx in 0..g.len() {
            out.insert(g.count_states(g.coord_of(idx)));
        }
    }
    Ok(out)
}

fn touches_seam(g: &Grid) -> bool {
    let (w, h) = (g.width(), g.height());
    g.cells()
        .iter()
        .enumerate()
        .any(|(idx, &s)| s != CellState::S && {
            let (r, c) = (idx / w, idx % w);
            r == 0 || r == h - 1 || c == 0 || c == w - 1
        })
}

/// A glider re-simulated on its own.
#[derive(Debug, Clone)]
pub struct IsolatedGlider {
    pub rule: RuleMatrix,
    /// Track of the glider in the clean run.
    pub localization: Localization,
    /// The clean run, starting from the placed glider.
    pub trajectory: Trajectory,
}

/// Places `shape` (axial offsets) in the middle of an otherwise empty grid.
pub fn place_shape(shape: &CanonicalShape, width: usize, height: usize) -> Result<Grid> {
    let mut g = Grid::new(width, height)?;
    let offset: Vec<(i64, i64, CellState)> = shape
        .cells
        .iter()
        .map(|&(r, q, s)| {
            let (row, col) = from_axial(r, q);
            (row, col, s)
        })
        .collect();
    let (rmin, rmax) = min_max(offset.iter().map(|c| c.0));
    let (cmin, cmax) = min_max(offset.iter().map(|c| c.1));
    // even row shift keeps the odd-r offsets unchanged
    let dr = ((height as i64 - (rmax - rmin + 1)) / 2 - rmin) & !1;
    let dc = (width as i64 - (cmax - cmin + 1)) / 2 - cmin;
    for (r, c, s) in offset {
        let cell = g.wrap((r + dr) as isize, (c + dc) as isize);
        g.set(cell, s);
    }
    Ok(g)
}

fn min_max(it: impl Iterator<Item = i64>) -> (i64, i64) {
    it.fold((i64::MAX, i64::MIN), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

/// Re-runs the final shape of `loc` alone and keeps it when it still
/// behaves as a glider with the same period.
pub fn isolate_glider(m: &RuleMatrix, loc: &Localization, track_cfg: &TrackConfig) -> Result<Option<IsolatedGlider>> {
    if loc.class != LocalizationClass::Glider {
        return Ok(None);
    }
    let shape = loc.shapes.last().expect("localizations have frames");
    let span = shape
        .cells
        .iter()
        .flat_map(|&(r, q, _)| [r.unsigned_abs(), q.unsigned_abs()])
        .max()
        .unwrap_or(0) as usize;
    let travel = (loc.displacement.0.unsigned_abs() + loc.displacement.1.unsigned_abs()) as usize;
    let side = (2 * span + 2 * travel + 12).max(24);
    let side = side + side % 2;
    let g = place_shape(shape, side, side)?;
    let frames = (2 * loc.period).max(track_cfg.min_frames);
    let tr = engine::run(&g, m, frames - 1, frames)?;
    let cfg = TrackConfig {
        window: frames,
        ..*track_cfg
    };
    let locs = detector::track(&tr, &cfg)?;
    match locs.as_slice() {
        [only] if only.class == LocalizationClass::Glider && only.period == loc.period => Ok(Some(IsolatedGlider {
            rule: *m,
            localization: only.clone(),
            trajectory: tr,
        })),
        _ => Ok(None),
    }
}

/// One (rule, glider) pair with the signatures the glider uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub rule: RuleMatrix,
    pub necessary: BTreeSet<(u8, u8)>,
}

impl CorpusEntry {
    pub fn from_glider(g: &IsolatedGlider) -> Result<Self> {
        Ok(CorpusEntry {
            rule: g.rule,
            necessary: necessary_transitions(&g.rule, &g.localization, &g.trajectory)?,
        })
    }
}

/// Finds the distinct gliders of each rule under `cfg` and records one
/// corpus entry per (rule, glider). Rules without an isolable glider
/// contribute nothing.
pub fn build_corpus(rules: &[RuleMatrix], cfg: &FitnessConfig, seed: u64) -> Result<Vec<CorpusEntry>> {
    let per_rule: Vec<Vec<CorpusEntry>> = rules
        .par_iter()
        .map(|m| {
            let reports = detector::detect(m, cfg, seed)?;
            let mut seen: HashSet<CanonicalShape> = HashSet::new();
            let mut out = Vec::new();
            for loc in reports.iter().flat_map(|r| &r.localizations) {
                let Some(iso) = isolate_glider(m, loc, &cfg.track)? else {
                    continue;
                };
                // one entry per glider whatever its phase or heading
                let key = iso.localization.shapes[..iso.localization.period]
                    .iter()
                    .map(CanonicalShape::symmetry_key)
                    .min()
                    .expect("period >= 1");
                if seen.insert(key) {
                    out.push(CorpusEntry::from_glider(&iso)?);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_rule.into_iter().flatten().collect())
}

/// Fractions of corpus entries by output state (when the signature is
/// needed) or by redundancy (when it is not).
pub fn compute_likelihoods(corpus: &[CorpusEntry]) -> Result<LikelihoodMatrices> {
    if corpus.is_empty() {
        return Err(Error::Config("empty corpus".into()));
    }
    let mut counts = [[0u64; 4]; RULE_LEN];
    for e in corpus {
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            let slot = if e.necessary.contains(&(i, j)) {
                e.rule.lookup(i, j).index()
            } else {
                3
            };
            counts[k][slot] += 1;
        }
    }
    let n = corpus.len() as f64;
    let mut m = LikelihoodMatrices::zeros();
    for (k, c) in counts.iter().enumerate() {
        m.fs[k] = c[0] as f64 / n;
        m.fa[k] = c[1] as f64 / n;
        m.fb[k] = c[2] as f64 / n;
        m.fhash[k] = c[3] as f64 / n;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SymmetrizeMode {
    /// Replace both entries by their arithmetic mean.
    #[default]
    Mean,
    /// Replace both entries by the floor of their mean, as literally printed.
    Floor,
}

/// Pairs `F1[i][j]` with `F2[j][i]`; when they differ by less than `eps`
/// both are replaced according to `mode`.
pub fn symmetrize(f1: &Table, f2: &Table, eps: f64, mode: SymmetrizeMode) -> (Table, Table) {
    let mut o1 = *f1;
    let mut o2 = *f2;
    for &(i, j) in &PAIRS {
        let a = index(i, j);
        let b = index(j, i);
        if (f1[a] - f2[b]).abs() < eps {
            let mean = 0.5 * (f1[a] + f2[b]);
            let v = match mode {
                SymmetrizeMode::Mean => mean,
                SymmetrizeMode::Floor => mean.floor(),
            };
            o1[a] = v;
            o2[b] = v;
        }
    }
    (o1, o2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReduceParams {
    /// Dominance margin.
    pub theta: f64,
    /// Symmetrization tolerance.
    pub eps: f64,
    /// Likelihoods below this are treated as absent.
    pub negligible: f64,
    pub mode: SymmetrizeMode,
    /// Entries whose B likelihood is dropped outright.
    pub drop_b: Vec<(u8, u8)>,
}

impl Default for ReduceParams {
    fn default() -> Self {
        ReduceParams {
            theta: 0.2,
            eps: 0.1,
            negligible: 0.1,
            mode: SymmetrizeMode::Mean,
            drop_b: vec![(0, 5), (1, 4)],
        }
    }
}

impl ReduceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::Config("theta must lie in (0,1)".into()));
        }
        if self.eps <= 0.0 {
            return Err(Error::Config("eps must be positive".into()));
        }
        if let Some(&(i, j)) = self.drop_b.iter().find(|(i, j)| i + j > 7) {
            return Err(Error::Constraint { i, j });
        }
        Ok(())
    }
}

/// Set-valued rule table: each entry is a nonempty subset of {S, A, B}
/// stored as a bitmask (bit `s.index()`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReducedRuleSet {
    allowed: [u8; RULE_LEN],
}

const ONLY_S: u8 = 1;

fn mask(states: &[CellState]) -> u8 {
    states.iter().fold(0, |m, s| m | 1 << s.index())
}

fn states_of(mask: u8) -> Vec<CellState> {
    CellState::ALL.into_iter().filter(|s| mask & (1 << s.index()) != 0).collect()
}

fn letters(mask: u8) -> String {
    states_of(mask).iter().map(|s| s.letter()).collect()
}

impl Default for ReducedRuleSet {
    fn default() -> Self {
        ReducedRuleSet {
            allowed: [ONLY_S; RULE_LEN],
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ReducedRow {
    i: u8,
    j: u8,
    allowed: String,
}

impl ReducedRuleSet {
    /// The reduced table printed in the original study, with 0/1/2 read as S/A/B.
    pub fn paper_r() -> Self {
        Self::read_csv(PAPER_R_CSV.as_bytes()).expect("bundled reduced table is well formed")
    }

    pub fn get(&self, i: u8, j: u8) -> Vec<CellState> {
        states_of(self.allowed[index(i, j)])
    }

    pub fn contains(&self, i: u8, j: u8, s: CellState) -> bool {
        self.allowed[index(i, j)] & (1 << s.index()) != 0
    }

    pub fn set(&mut self, i: u8, j: u8, states: &[CellState]) -> Result<()> {
        if i + j > 7 {
            return Err(Error::Constraint { i, j });
        }
        let m = mask(states);
        if m == 0 || ((i, j) == (0, 0) && m != ONLY_S) {
            return Err(Error::Constraint { i, j });
        }
        self.allowed[index(i, j)] = m;
        Ok(())
    }

    /// Number of concrete rules, `prod |allowed(i, j)|`.
    pub fn count(&self) -> u128 {
        self.allowed.iter().map(|m| m.count_ones() as u128).product()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            out.serialize(ReducedRow {
                i,
                j,
                allowed: letters(self.allowed[k]),
            })
            .map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads `i,j,allowed` rows; pairs not listed stay `{S}`.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut out = ReducedRuleSet::default();
        for (n, row) in csv::Reader::from_reader(r).deserialize::<ReducedRow>().enumerate() {
            let row = row.map_err(csv_err)?;
            checked_index(row.i, row.j, n + 2)?;
            let states = row
                .allowed
                .chars()
                .map(|ch| {
                    CellState::from_letter(ch).ok_or_else(|| Error::Parse {
                        line: n + 2,
                        msg: format!("invalid state `{ch}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            out.set(row.i, row.j, &states)?;
        }
        Ok(out)
    }
}

/// Collapses likelihood matrices into a set-valued rule table.
///
/// After symmetrizing FA against FB and dropping the listed B entries, an
/// entry becomes `{A}` when only A was ever needed there, a singleton when
/// one state beats both others by more than `theta`, and otherwise the set
/// of non-negligible states within `theta` of the best. Entries with
/// nothing left fall back to `{S}`.
pub fn reduce(l: &LikelihoodMatrices, p: &ReduceParams) -> Result<ReducedRuleSet> {
    p.validate()?;
    let (fa, mut fb) = symmetrize(&l.fa, &l.fb, p.eps, p.mode);
    for &(i, j) in &p.drop_b {
        fb[index(i, j)] = 0.0;
    }
    let mut out = ReducedRuleSet::default();
    for (k, &(i, j)) in PAIRS.iter().enumerate().skip(1) {
        let f = [l.fs[k], fa[k], fb[k]];
        let m = if f[2] == 0.0 && f[0] == 0.0 && f[1] > 0.0 {
            1 << CellState::A.index()
        } else if let Some(z) = (0..3).find(|&z| (0..3).all(|o| o == z || f[z] - f[o] > p.theta + SLACK)) {
            1 << z
        } else {
            let best = f.iter().copied().fold(f64::MIN, f64::max);
            (0..3)
                .filter(|&z| f[z] >= p.negligible - SLACK && best - f[z] <= p.theta + SLACK)
                .fold(0u8, |m, z| m | 1 << z)
        };
        out.allowed[k] = if m == 0 { ONLY_S } else { m };
        debug_assert_eq!(PAIRS[k], (i, j));
    }
    Ok(out)
}

/// An entry where two reduced tables disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryDiff {
    pub i: u8,
    pub j: u8,
    pub left: Vec<CellState>,
    pub right: Vec<CellState>,
}

pub fn compare(left: &ReducedRuleSet, right: &ReducedRuleSet) -> Vec<EntryDiff> {
    PAIRS
        .iter()
        .enumerate()
        .filter(|&(k, _)| left.allowed[k] != right.allowed[k])
        .map(|(k, &(i, j))| EntryDiff {
            i,
            j,
            left: states_of(left.allowed[k]),
            right: states_of(right.allowed[k]),
        })
        .collect()
}

/// CSV `i,j,computed,reference` with one row per differing entry.
pub fn write_diff_csv<W: Write>(mut w: W, diffs: &[EntryDiff]) -> io::Result<()> {
    writeln!(w, "i,j,computed,reference")?;
    for d in diffs {
        let l: String = d.left.iter().map(|s| s.letter()).collect();
        let r: String = d.right.iter().map(|s| s.letter()).collect();
        writeln!(w, "{},{},{l},{r}", d.i, d.j)?;
    }
    Ok(())
}

/// The `n`-th rule of `r` in mixed-radix order (entry 0 varies fastest).
pub fn rule_at(r: &ReducedRuleSet, mut n: u128) -> Option<RuleMatrix> {
    if n >= r.count() {
        return None;
    }
    let mut entries = [CellState::S; RULE_LEN];
    for (k, e) in entries.iter_mut().enumerate() {
        let opts = states_of(r.allowed[k]);
        let radix = opts.len() as u128;
        *e = opts[(n % radix) as usize];
        n /= radix;
    }
    Some(RuleMatrix::from_entries(entries).expect("(0,0) is pinned to S"))
}

/// Iterator over every concrete rule of a reduced table.
#[derive(Debug, Clone)]
pub struct RuleIter {
    set: ReducedRuleSet,
    next: u128,
    total: u128,
}

impl Iterator for RuleIter {
    type Item = RuleMatrix;

    fn next(&mut self) -> Option<RuleMatrix> {
        let m = rule_at(&self.set, self.next)?;
        self.next += 1;
        Some(m)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = usize::try_from(self.total - self.next).ok();
        (left.unwrap_or(usize::MAX), left)
    }
}

pub fn enumerate_rules(r: &ReducedRuleSet) -> RuleIter {
    RuleIter {
        set: *r,
        next: 0,
        total: r.count(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Rules drawn without replacement from the class.
    pub rules: usize,
    /// Initial configurations and detection per rule.
    pub fitness: FitnessConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            rules: 20,
            fitness: FitnessConfig {
                width: 30,
                height: 30,
                patch: 30,
                steps: 300,
                trials: 5,
                track: TrackConfig {
                    window: 60,
                    ..TrackConfig::default()
                },
                ..FitnessConfig::default()
            },
        }
    }
}

/// Class counts for one rule of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSweep {
    pub rule: String,
    pub histogram: [usize; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub per_rule: Vec<RuleSweep>,
    /// Total per class, ordered as [`LocalizationClass::ALL`].
    pub histogram: [usize; 5],
}

impl SweepReport {
    pub fn count(&self, c: LocalizationClass) -> usize {
        self.histogram[class_slot(c)]
    }

    pub fn mobile(&self) -> usize {
        self.count(LocalizationClass::Glider) + self.count(LocalizationClass::PufferTrain)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let names: Vec<&str> = LocalizationClass::ALL.iter().map(|c| c.name()).collect();
        writeln!(w, "rule,{}", names.join(","))?;
        for r in &self.per_rule {
            let counts: Vec<String> = r.histogram.iter().map(|c| c.to_string()).collect();
            writeln!(w, "{},{}", r.rule, counts.join(","))?;
        }
        Ok(())
    }
}

fn class_slot(c: LocalizationClass) -> usize {
    LocalizationClass::ALL.iter().position(|&x| x == c).expect("listed")
}

/// Samples rules from `r`, runs random initial configurations for each and
/// tallies the classes of every track in the detection window.
pub fn stationarity_sweep(r: &ReducedRuleSet, cfg: &SweepConfig, seed: u64) -> Result<SweepReport> {
    cfg.fitness.validate()?;
    let total = usize::try_from(r.count()).map_err(|_| Error::Config("rule class too large to sample".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, total, cfg.rules.min(total)).into_vec();
    let per_rule = picks
        .par_iter()
        .map(|&n| {
            let m = rule_at(r, n as u128).expect("index below count");
            let reports = detector::detect(&m, &cfg.fitness, seed)?;
            let mut histogram = [0usize; 5];
            for loc in reports.iter().flat_map(|t| &t.localizations) {
                histogram[class_slot(loc.class)] += 1;
            }
            Ok(RuleSweep {
                rule: m.to_string(),
                histogram,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut histogram = [0usize; 5];
    for r in &per_rule {
        for (h, c) in histogram.iter_mut().zip(r.histogram) {
            *h += c;
        }
    }
    Ok(SweepReport { per_rule, histogram })
}

/// 8x8 binary PGM of a table: row `i`, column `j`, grey `255 * F`;
/// cells with `i + j > 7` are black.
pub fn write_heatmap_pgm<W: Write>(mut w: W, t: &Table) -> io::Result<()> {
    write!(w, "P5\n8 8\n255\n")?;
    let mut px = [0u8; 64];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        px[i as usize * 8 + j as usize] = (t[k].clamp(0.0, 1.0) * 255.0).round() as u8;
    }
    w.write_all(&px)
}
