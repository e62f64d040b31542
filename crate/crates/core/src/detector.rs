//! Localization detection.
//!
//! Each frame is split into connected components of non-substrate cells.
//! Components are linked between consecutive frames when one touches the
//! other's one-ring dilation, giving tracks. A track that is still alive at
//! the end of the window is resolved by looking for the smallest period `p`
//! over which its canonical shape recurs with a constant displacement.
//!
//! Shapes and positions are kept in axial coordinates, where a hex
//! translation is vector addition, so odd-r row parity needs no special
//! handling.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{self, Trajectory};
use crate::error::{Error, Result};
use crate::hexgrid::{to_axial, axial_to_offset_displacement, CellState, Grid, HexCoord, AXIAL_DIRECTIONS};
use crate::rules::RuleMatrix;

const NO_LABEL: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub cells: Vec<(HexCoord, CellState)>,
    pub frame: usize,
    /// Axial coordinates of `cells`, unwrapped relative to the first cell.
    unwrapped: Vec<(i64, i64)>,
    /// Whether the component closes on itself around the torus.
    wraps: bool,
}

impl Component {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn wraps_torus(&self) -> bool {
        self.wraps
    }

    /// Lexicographically smallest unwrapped axial cell.
    fn anchor(&self) -> (i64, i64) {
        *self.unwrapped.iter().min().expect("components are nonempty")
    }

    pub fn shape(&self) -> CanonicalShape {
        let (ar, aq) = self.anchor();
        let mut cells: Vec<_> = self
            .unwrapped
            .iter()
            .zip(&self.cells)
            .map(|(&(r, q), &(_, s))| (r - ar, q - aq, s))
            .collect();
        cells.sort_unstable();
        CanonicalShape { cells }
    }
}

/// Translation-normalised cell set: axial offsets from the smallest cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalShape {
    pub cells: Vec<(i64, i64, CellState)>,
}

impl CanonicalShape {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn renormalised(mut cells: Vec<(i64, i64, CellState)>) -> CanonicalShape {
        cells.sort_unstable();
        if let Some(&(ar, aq, _)) = cells.first() {
            for c in &mut cells {
                c.0 -= ar;
                c.1 -= aq;
            }
        }
        CanonicalShape { cells }
    }

    /// Smallest image under the twelve rotations and reflections of the
    /// hexagonal lattice.
    pub fn symmetry_key(&self) -> CanonicalShape {
        // cube coordinates x = q, z = r, y = -q - r
        let cube: Vec<_> = self.cells.iter().map(|&(r, q, s)| ([q, -q - r, r], s)).collect();
        let mut best: Option<CanonicalShape> = None;
        for reflect in [false, true] {
            let mut cur: Vec<_> = cube
                .iter()
                .map(|&([x, y, z], s)| if reflect { ([z, y, x], s) } else { ([x, y, z], s) })
                .collect();
            for _ in 0..6 {
                cur = cur.iter().map(|&([x, y, z], s)| ([-z, -x, -y], s)).collect();
                let img = Self::renormalised(cur.iter().map(|&([x, _, z], s)| (z, x, s)).collect());
                if best.as_ref().is_none_or(|b| img < *b) {
                    best = Some(img);
                }
            }
        }
        best.unwrap_or_else(|| self.clone())
    }
}

fn label_components(g: &Grid, nbrs: &[[u32; 6]], frame: usize) -> (Vec<Component>, Vec<u32>) {
    let mut labels = vec![NO_LABEL; g.len()];
    let mut unwrapped = vec![(0i64, 0i64); g.len()];
    let mut comps = Vec::new();
    let mut stack = Vec::new();
    for start in 0..g.len() {
        if g.cells()[start] == CellState::S || labels[start] != NO_LABEL {
            continue;
        }
        let id = comps.len() as u32;
        let mut comp = Component {
            cells: Vec::new(),
            frame,
            unwrapped: Vec::new(),
            wraps: false,
        };
        labels[start] = id;
        unwrapped[start] = to_axial(g.coord_of(start));
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let c = g.coord_of(idx);
            let (r, q) = unwrapped[idx];
            comp.cells.push((c, g.cells()[idx]));
            comp.unwrapped.push((r, q));
            for (k, &n) in nbrs[idx].iter().enumerate() {
                let nidx = n as usize;
                if g.cells()[nidx] == CellState::S {
                    continue;
                }
                let (dr, dq) = AXIAL_DIRECTIONS[k];
                let expect = (r + dr, q + dq);
                if labels[nidx] == NO_LABEL {
                    labels[nidx] = id;
                    unwrapped[nidx] = expect;
                    stack.push(nidx);
                } else if unwrapped[nidx] != expect {
                    comp.wraps = true;
                }
            }
        }
        comps.push(comp);
    }
    (comps, labels)
}

/// Maximal 6-connected groups of non-substrate cells, with torus wrap.
pub fn extract_components(g: &Grid) -> Vec<Component> {
    label_components(g, &g.neighbor_table(), 0).0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LocalizationClass {
    StillLife,
    Oscillator,
    Glider,
    PufferTrain,
    Unresolved,
}

impl LocalizationClass {
    pub const ALL: [LocalizationClass; 5] = [
        LocalizationClass::StillLife,
        LocalizationClass::Oscillator,
        LocalizationClass::Glider,
        LocalizationClass::PufferTrain,
        LocalizationClass::Unresolved,
    ];

    pub fn is_mobile(self) -> bool {
        matches!(self, LocalizationClass::Glider | LocalizationClass::PufferTrain)
    }

    pub fn name(self) -> &'static str {
        match self {
            LocalizationClass::StillLife => "still_life",
            LocalizationClass::Oscillator => "oscillator",
            LocalizationClass::Glider => "glider",
            LocalizationClass::PufferTrain => "puffer_train",
            LocalizationClass::Unresolved => "unresolved",
        }
    }
}

impl fmt::Display for LocalizationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LocalizationClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LocalizationClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown class `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackEnd {
    Died,
    Merged,
    AmbiguousSplit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Localization {
    /// Absolute time of the first tracked frame.
    pub first_frame: usize,
    /// Canonical shape in every tracked frame.
    pub shapes: Vec<CanonicalShape>,
    /// Cumulative axial position of the shape anchor per tracked frame.
    pub positions: Vec<(i64, i64)>,
    /// Cells in the last tracked frame.
    pub last_cells: Vec<(HexCoord, CellState)>,
    /// Minimal period, 0 when none was found.
    pub period: usize,
    /// Displacement per period as `(dr, dc)` in the [`Grid::translate`] convention.
    pub displacement: (i64, i64),
    /// Persistent non-substrate cells left inside the swept region.
    pub trail: bool,
    pub end: Option<TrackEnd>,
    pub wraps: bool,
    pub class: LocalizationClass,
}

impl Localization {
    pub fn size(&self) -> usize {
        self.last_cells.len()
    }

    pub fn frames(&self) -> usize {
        self.shapes.len()
    }
}

/// Class implied by a localization's period, displacement and trail.
pub fn classify(loc: &Localization) -> LocalizationClass {
    if loc.period == 0 || loc.end.is_some() || loc.wraps {
        return LocalizationClass::Unresolved;
    }
    match (loc.displacement == (0, 0), loc.period, loc.trail) {
        (true, 1, _) => LocalizationClass::StillLife,
        (true, _, _) => LocalizationClass::Oscillator,
        (false, _, true) => LocalizationClass::PufferTrain,
        (false, _, false) => LocalizationClass::Glider,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackConfig {
    /// Number of trailing frames to analyse.
    pub window: usize,
    pub p_max: usize,
    /// A periodic segment must span at least this many frames (and `2p`).
    pub min_frames: usize,
}

impl Default for TrackConfig {
    fn default() -> Self {
        TrackConfig {
            window: 48,
            p_max: 12,
            min_frames: 4,
        }
    }
}

#[derive(Debug, Clone)]
struct Record {
    shape: CanonicalShape,
    pos: (i64, i64),
    cells: Vec<(HexCoord, CellState)>,
}

#[derive(Debug, Clone)]
struct Track {
    first_frame: usize,
    records: Vec<Record>,
    end: Option<TrackEnd>,
    wraps: bool,
}

/// Shortest representative of an axial displacement on the torus.
fn minimal_image(width: usize, height: usize, dr: i64, dq: i64) -> (i64, i64) {
    let (w, h) = (width as i64, height as i64);
    // one period down the rows is axial (h, -h/2); along a row it is (0, w)
    let k = (dr as f64 / h as f64).round() as i64;
    let dr = dr - k * h;
    let dq = dq + k * (h / 2);
    let m = (dq as f64 / w as f64).round() as i64;
    (dr, dq - m * w)
}

/// Best overlap of `x` shifted by at most one ring with each successor in `succ`.
fn overlap_scores(g: &Grid, x: &Component, labels: &[u32], succ: &[u32]) -> Vec<usize> {
    let mut best = vec![0usize; succ.len()];
    let mut counts = vec![0usize; succ.len()];
    for (dr, dq) in std::iter::once((0, 0)).chain(AXIAL_DIRECTIONS) {
        counts.iter_mut().for_each(|c| *c = 0);
        for &(r, q) in &x.unwrapped {
            let l = labels[g.index_of(g.wrap_axial(r + dr, q + dq))];
            if let Ok(k) = succ.binary_search(&l) {
                counts[k] += 1;
            }
        }
        for (b, &c) in best.iter_mut().zip(&counts) {
            *b = (*b).max(c);
        }
    }
    best
}

/// Smallest `p <= p_max` such that the trailing segment of the track is
/// periodic with a constant displacement over at least `max(2p, min_frames)`
/// frames.
fn find_period(records: &[Record], p_max: usize, min_frames: usize) -> Option<(usize, (i64, i64))> {
    let n = records.len();
    for p in 1..=p_max {
        let need = (2 * p).max(min_frames);
        if n < need {
            break;
        }
        let last = n - 1;
        let d = (
            records[last].pos.0 - records[last - p].pos.0,
            records[last].pos.1 - records[last - p].pos.1,
        );
        let mut span = p;
        for t in (0..n - p).rev() {
            let a = &records[t];
            let b = &records[t + p];
            if a.shape != b.shape || (b.pos.0 - a.pos.0, b.pos.1 - a.pos.1) != d {
                break;
            }
            span += 1;
        }
        if span >= need {
            return Some((p, d));
        }
    }
    None
}

/// Tracks localizations over the last `cfg.window` frames of `tr`.
pub fn track(tr: &Trajectory, cfg: &TrackConfig) -> Result<Vec<Localization>> {
    if cfg.p_max == 0 {
        return Err(Error::Config("p_max must be >= 1".into()));
    }
    if cfg.window > tr.len() {
        return Err(Error::Config(format!(
            "window {} exceeds {} retained frames",
            cfg.window,
            tr.len()
        )));
    }
    let win = tr.tail(cfg.window);
    let Some(first) = win.frames.first() else {
        return Ok(Vec::new());
    };
    let (w, h) = (first.width(), first.height());

    let mut tracks: Vec<Track> = Vec::new();
    let nbrs = first.neighbor_table();
    let (mut comps, _) = label_components(first, &nbrs, win.t0);
    let mut active: Vec<usize> = Vec::with_capacity(comps.len());
    for c in &comps {
        active.push(tracks.len());
        tracks.push(Track {
            first_frame: win.t0,
            records: vec![Record {
                shape: c.shape(),
                pos: c.anchor(),
                cells: c.cells.clone(),
            }],
            end: None,
            wraps: c.wraps,
        });
    }

    for (k, g) in win.frames.iter().enumerate().skip(1) {
        let frame = win.t0 + k;
        let (next, next_labels) = label_components(g, &nbrs, frame);
        let mut succ: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); comps.len()];
        let mut preds: Vec<usize> = vec![0; next.len()];
        for (x, comp) in comps.iter().enumerate() {
            for &(c, _) in &comp.cells {
                let idx = g.index_of(c);
                for n in std::iter::once(idx as u32).chain(nbrs[idx]) {
                    let l = next_labels[n as usize];
                    if l != NO_LABEL {
                        succ[x].insert(l);
                    }
                }
            }
            for &y in &succ[x] {
                preds[y as usize] += 1;
            }
        }

        let mut next_active: Vec<Option<usize>> = vec![None; next.len()];
        for (x, comp) in comps.iter().enumerate() {
            let tid = active[x];
            let s = &succ[x];
            let chosen = if s.is_empty() {
                tracks[tid].end = Some(TrackEnd::Died);
                None
            } else if s.iter().any(|&y| preds[y as usize] > 1) {
                tracks[tid].end = Some(TrackEnd::Merged);
                None
            } else if s.len() == 1 {
                s.first().copied()
            } else {
                let succ_ids: Vec<u32> = s.iter().copied().collect();
                let mut scored: Vec<(usize, u32)> = overlap_scores(g, comp, &next_labels, &succ_ids)
                    .into_iter()
                    .zip(succ_ids)
                    .collect();
                scored.sort_unstable_by_key(|s| std::cmp::Reverse(s.0));
                if scored[0].0 > scored[1].0 {
                    Some(scored[0].1)
                } else {
                    tracks[tid].end = Some(TrackEnd::AmbiguousSplit);
                    None
                }
            };
            if let Some(y) = chosen {
                let yc = &next[y as usize];
                let prev = tracks[tid].records.last().expect("tracks are nonempty");
                let raw_prev = comp.anchor();
                let raw_next = yc.anchor();
                let (dr, dq) = minimal_image(w, h, raw_next.0 - raw_prev.0, raw_next.1 - raw_prev.1);
                let pos = (prev.pos.0 + dr, prev.pos.1 + dq);
                tracks[tid].records.push(Record {
                    shape: yc.shape(),
                    pos,
                    cells: yc.cells.clone(),
                });
                tracks[tid].wraps |= yc.wraps;
                next_active[y as usize] = Some(tid);
            }
        }
        for (y, slot) in next_active.iter_mut().enumerate() {
            if slot.is_none() {
                let c = &next[y];
                *slot = Some(tracks.len());
                tracks.push(Track {
                    first_frame: frame,
                    records: vec![Record {
                        shape: c.shape(),
                        pos: c.anchor(),
                        cells: c.cells.clone(),
                    }],
                    end: None,
                    wraps: c.wraps,
                });
            }
        }
        active = next_active.into_iter().map(|s| s.expect("every component assigned")).collect();
        comps = next;
    }

    // cells held by each surviving track in the final frame, for trail detection
    let survivors: Vec<(usize, HashSet<HexCoord>)> = tracks
        .iter()
        .enumerate()
        .filter(|(_, t)| t.end.is_none() && t.records.len() >= 2)
        .map(|(i, t)| (i, t.records.last().unwrap().cells.iter().map(|&(c, _)| c).collect()))
        .collect();

    let mut out = Vec::with_capacity(tracks.len());
    for (tid, t) in tracks.iter().enumerate() {
        let mut period = 0;
        let mut displacement = (0, 0);
        let mut trail = false;
        if t.end.is_none() {
            if let Some((p, (dr, dq))) = find_period(&t.records, cfg.p_max, cfg.min_frames) {
                period = p;
                displacement = axial_to_offset_displacement(dr, dq);
                if displacement != (0, 0) {
                    let last = t.records.len() - 1;
                    let swept: HashSet<HexCoord> = t.records[..last]
                        .iter()
                        .flat_map(|r| r.cells.iter().map(|&(c, _)| c))
                        .collect();
                    trail = survivors
                        .iter()
                        .any(|(other, cells)| *other != tid && cells.iter().any(|c| swept.contains(c)));
                }
            }
        }
        let mut loc = Localization {
            first_frame: t.first_frame,
            shapes: t.records.iter().map(|r| r.shape.clone()).collect(),
            positions: t.records.iter().map(|r| r.pos).collect(),
            last_cells: t.records.last().unwrap().cells.clone(),
            period,
            displacement,
            trail,
            end: t.end,
            wraps: t.wraps,
            class: LocalizationClass::Unresolved,
        };
        loc.class = classify(&loc);
        out.push(loc);
    }
    Ok(out)
}

/// Parameters of the glider-count fitness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessConfig {
    pub width: usize,
    pub height: usize,
    /// Side of the centred random patch.
    pub patch: usize,
    pub p_a: f64,
    pub p_b: f64,
    pub steps: usize,
    pub trials: usize,
    pub track: TrackConfig,
    pub count_puffers: bool,
}

impl Default for FitnessConfig {
    fn default() -> Self {
        FitnessConfig {
            width: 64,
            height: 64,
            patch: 16,
            p_a: 0.1,
            p_b: 0.1,
            steps: 200,
            trials: 5,
            track: TrackConfig::default(),
            count_puffers: true,
        }
    }
}

impl FitnessConfig {
    pub fn validate(&self) -> Result<()> {
        Grid::validate_dims(self.width, self.height)?;
        if self.track.window == 0 || self.track.window > self.steps + 1 {
            return Err(Error::Config("window must be in 1..=steps+1".into()));
        }
        if !(0.0..=1.0).contains(&(self.p_a + self.p_b)) || self.p_a < 0.0 || self.p_b < 0.0 {
            return Err(Error::Config("state probabilities must lie in [0,1]".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        Ok(())
    }

    fn counts(&self, class: LocalizationClass) -> bool {
        match class {
            LocalizationClass::Glider => true,
            LocalizationClass::PufferTrain => self.count_puffers,
            _ => false,
        }
    }
}

/// Independent random stream for trial `k` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

/// Random initial grid for one trial.
pub fn initial_grid(cfg: &FitnessConfig, rng: &mut ChaCha8Rng) -> Result<Grid> {
    let mut g = Grid::new(cfg.width, cfg.height)?;
    g.fill_random_patch(cfg.patch, cfg.patch, cfg.p_a, cfg.p_b, rng);
    Ok(g)
}

#[derive(Debug, Clone)]
pub struct TrialReport {
    pub trial: usize,
    pub localizations: Vec<Localization>,
}

/// Runs all trials and tracks localizations in the final window of each.
pub fn detect(m: &RuleMatrix, cfg: &FitnessConfig, seed: u64) -> Result<Vec<TrialReport>> {
    cfg.validate()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(seed, k as u64);
            let g = initial_grid(cfg, &mut rng)?;
            let tr = engine::run(&g, m, cfg.steps, cfg.track.window)?;
            Ok(TrialReport {
                trial: k,
                localizations: track(&tr, &cfg.track)?,
            })
        })
        .collect()
}

/// Number of gliders found per cell, averaged over trials.
pub fn fitness(m: &RuleMatrix, cfg: &FitnessConfig, seed: u64) -> Result<f64> {
    let reports = detect(m, cfg, seed)?;
    Ok(fitness_from_reports(&reports, cfg))
}

pub fn fitness_from_reports(reports: &[TrialReport], cfg: &FitnessConfig) -> f64 {
    let gliders: usize = reports
        .iter()
        .map(|r| r.localizations.iter().filter(|l| cfg.counts(l.class)).count())
        .sum();
    gliders as f64 / (cfg.width * cfg.height * cfg.trials) as f64
}

/// CSV with one record per localization:
/// `trial,class,period,dr,dc,size,first_frame`.
pub fn write_report_csv<W: Write>(mut w: W, reports: &[TrialReport]) -> io::Result<()> {
    writeln!(w, "trial,class,period,dr,dc,size,first_frame")?;
    for r in reports {
        for l in &r.localizations {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.trial,
                l.class,
                l.period,
                l.displacement.0,
                l.displacement.1,
                l.size(),
                l.first_frame
            )?;
        }
    }
    Ok(())
}
