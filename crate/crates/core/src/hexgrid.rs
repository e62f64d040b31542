//! Hexagonal torus lattice.
//!
//! Cells are stored row-major in "odd-r" offset layout: odd rows are shifted
//! half a cell to the east. On a torus this layout is only consistent when
//! the number of rows is even, so grids require an even height.
//!
//! Internally the detector works in axial coordinates `(r, q)` where a hex
//! translation is plain vector addition; [`to_axial`] and [`from_axial`]
//! convert between the two.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::Rng;

use crate::error::{parse_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(u8)]
pub enum CellState {
    #[default]
    S = 0,
    A = 1,
    B = 2,
}

impl CellState {
    pub const ALL: [CellState; 3] = [CellState::S, CellState::A, CellState::B];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<CellState> {
        CellState::ALL.get(i).copied()
    }

    /// Letter used in rule and genome files.
    pub fn letter(self) -> char {
        match self {
            CellState::S => 'S',
            CellState::A => 'A',
            CellState::B => 'B',
        }
    }

    pub fn from_letter(ch: char) -> Option<CellState> {
        match ch {
            'S' => Some(CellState::S),
            'A' => Some(CellState::A),
            'B' => Some(CellState::B),
            _ => None,
        }
    }

    /// Character used in the grid text format (`.` for substrate).
    pub fn grid_char(self) -> char {
        match self {
            CellState::S => '.',
            other => other.letter(),
        }
    }

    pub fn from_grid_char(ch: char) -> Option<CellState> {
        match ch {
            '.' => Some(CellState::S),
            'A' => Some(CellState::A),
            'B' => Some(CellState::B),
            _ => None,
        }
    }

    /// Grey level for PGM export.
    pub fn grey(self) -> u8 {
        match self {
            CellState::S => 0,
            CellState::A => 128,
            CellState::B => 255,
        }
    }
}

impl fmt::Display for CellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HexCoord {
    pub row: usize,
    pub col: usize,
}

impl HexCoord {
    pub fn new(row: usize, col: usize) -> Self {
        HexCoord { row, col }
    }
}

/// Offset deltas `(dr, dc)` of the six neighbours, clockwise from east:
/// E, SE, SW, W, NW, NE. Indexed by row parity.
pub const NEIGHBOR_OFFSETS: [[(isize, isize); 6]; 2] = [
    [(0, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0)],
    [(0, 1), (1, 1), (1, 0), (0, -1), (-1, 0), (-1, 1)],
];

/// Axial deltas `(dr, dq)` of the six neighbours in the same order as
/// [`NEIGHBOR_OFFSETS`].
pub const AXIAL_DIRECTIONS: [(i64, i64); 6] = [(0, 1), (1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1)];

pub fn to_axial(c: HexCoord) -> (i64, i64) {
    let r = c.row as i64;
    (r, c.col as i64 - r.div_euclid(2))
}

/// Offset column of an axial coordinate (row is unchanged).
pub fn from_axial(r: i64, q: i64) -> (i64, i64) {
    (r, q + r.div_euclid(2))
}

/// Converts an axial displacement to the `(dr, dc)` convention used by
/// [`Grid::translate`].
pub fn axial_to_offset_displacement(dr: i64, dq: i64) -> (i64, i64) {
    (dr, dq + dr.div_euclid(2))
}

pub fn offset_to_axial_displacement(dr: i64, dc: i64) -> (i64, i64) {
    (dr, dc - dr.div_euclid(2))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    width: usize,
    height: usize,
    cells: Vec<CellState>,
}

impl Grid {
    pub fn validate_dims(width: usize, height: usize) -> Result<()> {
        if width < 3 || height < 4 || !height.is_multiple_of(2) {
            return Err(Error::GridDimensions { width, height });
        }
        Ok(())
    }

    /// All-substrate grid.
    pub fn new(width: usize, height: usize) -> Result<Grid> {
        Grid::validate_dims(width, height)?;
        Ok(Grid {
            width,
            height,
            cells: vec![CellState::S; width * height],
        })
    }

    pub fn from_cells(width: usize, height: usize, cells: Vec<CellState>) -> Result<Grid> {
        Grid::validate_dims(width, height)?;
        if cells.len() != width * height {
            return Err(Error::Config(format!(
                "expected {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        Ok(Grid {
            width,
            height,
            cells,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [CellState] {
        &mut self.cells
    }

    pub fn index_of(&self, c: HexCoord) -> usize {
        c.row * self.width + c.col
    }

    pub fn coord_of(&self, idx: usize) -> HexCoord {
        HexCoord::new(idx / self.width, idx % self.width)
    }

    pub fn get(&self, c: HexCoord) -> CellState {
        self.cells[self.index_of(c)]
    }

    pub fn set(&mut self, c: HexCoord, s: CellState) {
        let idx = self.index_of(c);
        self.cells[idx] = s;
    }

    /// Wraps an arbitrary (possibly negative) offset coordinate onto the torus.
    #[inline]
    pub fn wrap(&self, row: isize, col: isize) -> HexCoord {
        HexCoord::new(
            row.rem_euclid(self.height as isize) as usize,
            col.rem_euclid(self.width as isize) as usize,
        )
    }

    /// Wraps an axial coordinate onto the torus.
    pub fn wrap_axial(&self, r: i64, q: i64) -> HexCoord {
        let (row, col) = from_axial(r, q);
        self.wrap(row as isize, col as isize)
    }

    /// The six neighbours of `c`, clockwise from east.
    pub fn neighbors(&self, c: HexCoord) -> [HexCoord; 6] {
        let parity = c.row & 1;
        let (r, col) = (c.row as isize, c.col as isize);
        NEIGHBOR_OFFSETS[parity].map(|(dr, dc)| self.wrap(r + dr, col + dc))
    }

    /// Flat indices of the six neighbours of every cell, clockwise from east.
    pub fn neighbor_table(&self) -> Vec<[u32; 6]> {
        (0..self.len())
            .map(|idx| self.neighbors(self.coord_of(idx)).map(|n| self.index_of(n) as u32))
            .collect()
    }

    /// Centre cell followed by its six neighbours, clockwise from east.
    pub fn neighborhood(&self, c: HexCoord) -> [HexCoord; 7] {
        let n = self.neighbors(c);
        [c, n[0], n[1], n[2], n[3], n[4], n[5]]
    }

    /// Number of A and B cells in the 7-cell neighbourhood of `c`,
    /// centre included.
    pub fn count_states(&self, c: HexCoord) -> (u8, u8) {
        let mut i = 0;
        let mut j = 0;
        for n in self.neighborhood(c) {
            match self.get(n) {
                CellState::A => i += 1,
                CellState::B => j += 1,
                CellState::S => {}
            }
        }
        (i, j)
    }

    pub fn count(&self, s: CellState) -> usize {
        self.cells.iter().filter(|&&c| c == s).count()
    }

    /// Hex-lattice translation. `dr` rows south and `dc` columns east; for
    /// odd `dr` the column shift of cells on odd rows gains one so that the
    /// map is a lattice translation rather than a shear.
    pub fn translate(&self, dr: isize, dc: isize) -> Grid {
        let mut out = Grid {
            width: self.width,
            height: self.height,
            cells: vec![CellState::S; self.cells.len()],
        };
        let odd_shift = dr.rem_euclid(2) as usize;
        for (idx, &s) in self.cells.iter().enumerate() {
            let c = self.coord_of(idx);
            let extra = (c.row & 1 & odd_shift) as isize;
            let to = self.wrap(c.row as isize + dr, c.col as isize + dc + extra);
            out.set(to, s);
        }
        out
    }

    /// Translates a single coordinate the same way [`Grid::translate`] moves cells.
    pub fn translate_coord(&self, c: HexCoord, dr: isize, dc: isize) -> HexCoord {
        let extra = (c.row & 1 & dr.rem_euclid(2) as usize) as isize;
        self.wrap(c.row as isize + dr, c.col as isize + dc + extra)
    }

    /// Fills a centred `patch_w` x `patch_h` window with independent random
    /// cells (A with `p_a`, B with `p_b`, S otherwise). Cells outside the
    /// window are left untouched.
    pub fn fill_random_patch<R: Rng + ?Sized>(
        &mut self,
        patch_w: usize,
        patch_h: usize,
        p_a: f64,
        p_b: f64,
        rng: &mut R,
    ) {
        let pw = patch_w.min(self.width);
        let ph = patch_h.min(self.height);
        let r0 = (self.height - ph) / 2;
        let c0 = (self.width - pw) / 2;
        for r in r0..r0 + ph {
            for c in c0..c0 + pw {
                let u: f64 = rng.random();
                let s = if u < p_a {
                    CellState::A
                } else if u < p_a + p_b {
                    CellState::B
                } else {
                    CellState::S
                };
                self.set(HexCoord::new(r, c), s);
            }
        }
    }

    /// Binary PGM (P5), one byte per cell.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self.cells.iter().map(|c| c.grey()).collect();
        w.write_all(&bytes)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.width, self.height)?;
        for row in self.cells.chunks(self.width) {
            let line: String = row.iter().map(|c| c.grid_char()).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Grid> {
        let mut lines = s.lines();
        let header = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(1, format!("bad header `{header}`: {e}")))?;
        let [width, height] = dims[..] else {
            return Err(parse_err(1, "header must be `W H`"));
        };
        Grid::validate_dims(width, height)?;
        let mut cells = Vec::with_capacity(width * height);
        for r in 0..height {
            let line = lines
                .next()
                .ok_or_else(|| parse_err(r + 2, "missing grid row"))?;
            if line.chars().count() != width {
                return Err(parse_err(
                    r + 2,
                    format!("expected {width} cells, found {}", line.chars().count()),
                ));
            }
            for ch in line.chars() {
                let s = CellState::from_grid_char(ch)
                    .ok_or_else(|| parse_err(r + 2, format!("invalid cell `{ch}`")))?;
                cells.push(s);
            }
        }
        Grid::from_cells(width, height, cells)
    }
}
