//! Synchronous stepping.
//!
//! [`step`] is the production kernel: each cell's neighbourhood signature is
//! packed into a single byte `i + 8j` by weighting A as 1 and B as 8, and the
//! rule becomes a 64-entry lookup table. [`step_reference`] is the naive
//! per-cell version kept as an oracle.

use std::collections::VecDeque;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hexgrid::{CellState, Grid};
use crate::rules::RuleMatrix;

const WEIGHT: [u8; 3] = [0, 1, 8];

/// Per-step scratch: cell weights and sums of horizontally adjacent pairs.
struct Packed {
    width: usize,
    weights: Vec<u8>,
    pairs: Vec<u8>,
}

impl Packed {
    fn new(g: &Grid) -> Packed {
        let w = g.width();
        let weights: Vec<u8> = g.cells().iter().map(|&c| WEIGHT[c as usize]).collect();
        let mut pairs = vec![0u8; weights.len()];
        for (row_w, row_p) in weights.chunks(w).zip(pairs.chunks_mut(w)) {
            for k in 0..w - 1 {
                row_p[k] = row_w[k] + row_w[k + 1];
            }
            row_p[w - 1] = row_w[w - 1] + row_w[0];
        }
        Packed {
            width: w,
            weights,
            pairs,
        }
    }

    #[inline]
    fn fill_row(&self, r: usize, height: usize, table: &[CellState; 64], out: &mut [CellState]) {
        let w = self.width;
        let up = (r + height - 1) % height;
        let down = (r + 1) % height;
        let cur_w = &self.weights[r * w..(r + 1) * w];
        let cur_p = &self.pairs[r * w..(r + 1) * w];
        let up_p = &self.pairs[up * w..(up + 1) * w];
        let down_p = &self.pairs[down * w..(down + 1) * w];
        // even rows see columns (c-1, c) above and below, odd rows (c, c+1)
        let odd = r & 1 == 1;
        for c in 0..w {
            let left = if c == 0 { w - 1 } else { c - 1 };
            let k = if odd { c } else { left };
            let sig = cur_w[left] + cur_p[c] + up_p[k] + down_p[k];
            out[c] = table[sig as usize];
        }
    }
}

/// One synchronous update.
pub fn step(g: &Grid, m: &RuleMatrix) -> Grid {
    let mut out = g.clone();
    step_into(g, m, &mut out);
    out
}

/// Writes the successor of `g` into `out`, which must have the same shape.
pub fn step_into(g: &Grid, m: &RuleMatrix, out: &mut Grid) {
    assert_eq!((g.width(), g.height()), (out.width(), out.height()));
    let table = m.kernel_table();
    let packed = Packed::new(g);
    let (w, h) = (g.width(), g.height());
    for (r, row) in out.cells_mut().chunks_mut(w).enumerate() {
        packed.fill_row(r, h, &table, row);
    }
}

/// Same as [`step`] but splits rows across the rayon pool. Output is
/// identical to the sequential kernel.
pub fn step_par(g: &Grid, m: &RuleMatrix) -> Grid {
    let table = m.kernel_table();
    let packed = Packed::new(g);
    let (w, h) = (g.width(), g.height());
    let mut out = g.clone();
    out.cells_mut()
        .par_chunks_mut(w)
        .enumerate()
        .for_each(|(r, row)| packed.fill_row(r, h, &table, row));
    out
}

/// Cell-by-cell update through `neighborhood` and `count_states`.
pub fn step_reference(g: &Grid, m: &RuleMatrix) -> Grid {
    let mut out = g.clone();
    for idx in 0..g.len() {
        let c = g.coord_of(idx);
        let (i, j) = g.count_states(c);
        out.set(c, m.lookup(i, j));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub frames: Vec<Grid>,
    pub rule: RuleMatrix,
    /// Time index of `frames[0]`.
    pub t0: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn last(&self) -> Option<&Grid> {
        self.frames.last()
    }

    /// Trailing `n` frames as a new trajectory.
    pub fn tail(&self, n: usize) -> Trajectory {
        let n = n.min(self.frames.len());
        let skip = self.frames.len() - n;
        Trajectory {
            frames: self.frames[skip..].to_vec(),
            rule: self.rule,
            t0: self.t0 + skip,
        }
    }
}

/// Applies `t` steps to `g`, keeping only the last `keep_last` of the
/// `t + 1` states.
pub fn run(g: &Grid, m: &RuleMatrix, t: usize, keep_last: usize) -> Result<Trajectory> {
    if keep_last > t + 1 {
        return Err(Error::Config(format!("keep_last {keep_last} exceeds {} frames", t + 1)));
    }
    let mut frames = VecDeque::with_capacity(keep_last + 1);
    let mut cur = g.clone();
    let mut next = g.clone();
    if keep_last > 0 {
        frames.push_back(cur.clone());
    }
    for _ in 0..t {
        step_into(&cur, m, &mut next);
        std::mem::swap(&mut cur, &mut next);
        if keep_last > 0 {
            if frames.len() == keep_last {
                frames.pop_front();
            }
            frames.push_back(cur.clone());
        }
    }
    Ok(Trajectory {
        frames: frames.into(),
        rule: *m,
        t0: t + 1 - keep_last,
    })
}

/// Frames in grid text format, separated by blank lines.
pub fn write_frames<W: Write>(mut w: W, frames: &[Grid]) -> io::Result<()> {
    for (k, f) in frames.iter().enumerate() {
        if k > 0 {
            writeln!(w)?;
        }
        write!(w, "{f}")?;
    }
    Ok(())
}

pub fn parse_frames(text: &str) -> Result<Vec<Grid>> {
    text.split("\n\n")
        .filter(|block| !block.trim().is_empty())
        .map(|block| block.parse())
        .collect()
}
