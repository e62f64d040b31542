//! Totalistic rule matrix.
//!
//! A rule maps the number of A cells `i` and B cells `j` in the 7-cell
//! neighbourhood (`i + j <= 7`) to the next state of the centre cell. There
//! are 36 such pairs. The canonical order walks `i` ascending and, within a
//! fixed `i`, `j` ascending, so `(i, j)` sits at `j + sum_{k<i} (8 - k)`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;

use crate::error::{parse_err, Error, Result};
use crate::hexgrid::CellState;

pub const RULE_LEN: usize = 36;
pub const MAX_COUNT: u8 = 7;

/// Canonical genome position of `(i, j)`.
///
/// Panics when `i + j > 7`; neighbourhoods only ever produce valid pairs.
pub fn index(i: u8, j: u8) -> usize {
    assert!(i + j <= MAX_COUNT, "neighbourhood counts ({i}, {j}) out of range");
    let i = i as usize;
    // sum_{k<i} (8 - k) = 8i - i(i-1)/2
    8 * i - i * (i.saturating_sub(1)) / 2 + j as usize
}

/// Inverse of [`index`].
pub fn pair(idx: usize) -> (u8, u8) {
    PAIRS[idx]
}

/// All `(i, j)` pairs in canonical order.
pub const PAIRS: [(u8, u8); RULE_LEN] = {
    let mut out = [(0u8, 0u8); RULE_LEN];
    let mut n = 0;
    let mut i = 0u8;
    while i <= MAX_COUNT {
        let mut j = 0u8;
        while i + j <= MAX_COUNT {
            out[n] = (i, j);
            n += 1;
            j += 1;
        }
        i += 1;
    }
    out
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleMatrix {
    entries: [CellState; RULE_LEN],
}

impl RuleMatrix {
    /// The rule that sends every neighbourhood to S.
    pub fn quiescent() -> RuleMatrix {
        RuleMatrix {
            entries: [CellState::S; RULE_LEN],
        }
    }

    /// Builds a rule from canonical-order entries. `entries[0]` must be S.
    pub fn from_entries(entries: [CellState; RULE_LEN]) -> Result<RuleMatrix> {
        if entries[0] != CellState::S {
            return Err(Error::Genome("entry (0,0) must be S".into()));
        }
        Ok(RuleMatrix { entries })
    }

    pub fn entries(&self) -> &[CellState; RULE_LEN] {
        &self.entries
    }

    pub fn lookup(&self, i: u8, j: u8) -> CellState {
        self.entries[index(i, j)]
    }

    /// Sets `M_ij`. Setting `(0,0)` to anything but S is rejected.
    pub fn set(&mut self, i: u8, j: u8, s: CellState) -> Result<()> {
        if (i, j) == (0, 0) && s != CellState::S {
            return Err(Error::Constraint { i, j });
        }
        self.entries[index(i, j)] = s;
        Ok(())
    }

    /// Flat table indexed by `i + 8 * j`, used by the stepping kernel.
    pub fn kernel_table(&self) -> [CellState; 64] {
        let mut t = [CellState::S; 64];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            t[i as usize + 8 * j as usize] = self.entries[k];
        }
        t
    }

    pub fn encode(&self) -> Genome {
        Genome(self.entries.to_vec())
    }
}

impl fmt::Display for RuleMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.entries {
            write!(f, "{}", s.letter())?;
        }
        Ok(())
    }
}

impl FromStr for RuleMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<RuleMatrix> {
        s.trim().parse::<Genome>()?.decode()
    }
}

/// Ternary string form of a rule. Unlike [`RuleMatrix`] a genome may be
/// malformed; [`Genome::decode`] checks it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Genome(pub Vec<CellState>);

impl Genome {
    pub fn symbols(&self) -> &[CellState] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn decode(&self) -> Result<RuleMatrix> {
        let entries: [CellState; RULE_LEN] = self
            .0
            .as_slice()
            .try_into()
            .map_err(|_| Error::Genome(format!("expected {RULE_LEN} symbols, got {}", self.0.len())))?;
        RuleMatrix::from_entries(entries)
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.letter())?;
        }
        Ok(())
    }
}

impl FromStr for Genome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Genome> {
        s.chars()
            .map(|ch| CellState::from_letter(ch).ok_or_else(|| Error::Genome(format!("invalid symbol `{ch}`"))))
            .collect::<Result<Vec<_>>>()
            .map(Genome)
    }
}

/// Entries of a rule fixed ahead of random initialisation, e.g. the
/// transitions a known glider relies on.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleConstraints {
    fixed: BTreeMap<(u8, u8), CellState>,
}

impl RuleConstraints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, i: u8, j: u8, s: CellState) -> Result<()> {
        if i + j > MAX_COUNT || ((i, j) == (0, 0) && s != CellState::S) {
            return Err(Error::Constraint { i, j });
        }
        match self.fixed.insert((i, j), s) {
            Some(prev) if prev != s => Err(Error::Constraint { i, j }),
            _ => Ok(()),
        }
    }

    pub fn get(&self, i: u8, j: u8) -> Option<CellState> {
        self.fixed.get(&(i, j)).copied()
    }

    pub fn len(&self) -> usize {
        self.fixed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixed.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u8, u8), CellState)> + '_ {
        self.fixed.iter().map(|(&k, &v)| (k, v))
    }
}

/// Random rule with `M_00 = S`, constrained entries at their bound values
/// and every other entry uniform over {S, A, B}.
pub fn random_rule<R: Rng + ?Sized>(rng: &mut R, constraints: Option<&RuleConstraints>) -> RuleMatrix {
    let mut entries = [CellState::S; RULE_LEN];
    for (k, &(i, j)) in PAIRS.iter().enumerate().skip(1) {
        // draw unconditionally so constrained and free runs share a stream layout
        let drawn = CellState::ALL[rng.random_range(0..3)];
        entries[k] = constraints.and_then(|c| c.get(i, j)).unwrap_or(drawn);
    }
    RuleMatrix { entries }
}

/// Reads a rule file: a single 36-character line.
pub fn read_rule_file(path: &Path) -> Result<RuleMatrix> {
    let text = fs::read_to_string(path)?;
    let line = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .ok_or_else(|| parse_err(1, "empty rule file"))?;
    line.parse()
}

pub fn write_rule_file(path: &Path, rule: &RuleMatrix) -> Result<()> {
    fs::write(path, format!("{rule}\n"))?;
    Ok(())
}

/// Parses a corpus: one rule per line. Blank lines and `#` comments are skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<RuleMatrix>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(n, l)| {
            l.trim().parse().map_err(|e| match e {
                Error::Genome(msg) => parse_err(n + 1, msg),
                other => other,
            })
        })
        .collect()
}

/// The glider-supporting rule shipped in `fixtures/glider_rule.txt`.
pub fn pinned_glider_rule() -> RuleMatrix {
    parse_corpus(include_str!("../fixtures/glider_rule.txt")).expect("bundled rule is well formed")[0]
}

pub fn read_corpus(path: &Path) -> Result<Vec<RuleMatrix>> {
    parse_corpus(&fs::read_to_string(path)?)
}

pub fn append_to_corpus(path: &Path, rule: &RuleMatrix) -> Result<()> {
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{rule}")?;
    Ok(())
}
