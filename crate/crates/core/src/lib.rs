//! Three-state totalistic cellular automata on a hexagonal torus.
//!
//! The crate covers the whole workflow around glider-supporting rules:
//!
//! * [`hexgrid`], [`rules`], [`engine`]: lattice, rule matrix and stepping.
//! * [`detector`]: component tracking, localization classes, glider fitness.
//! * [`evolve`]: the evolutionary search over rule matrices.
//! * [`analysis`]: glider-likelihood matrices, their reduction to a
//!   set-valued rule table and sweeps over the resulting rule class.
//! * [`reactor`]: Gillespie simulation of the quasi-chemical reaction scheme.
//! * [`cli`]: the `hexrd` command-line front end.

pub mod analysis;
pub mod cli;
pub mod detector;
pub mod engine;
pub mod error;
pub mod evolve;
pub mod hexgrid;
pub mod reactor;
pub mod rules;

pub use error::{Error, Result};
pub use hexgrid::{CellState, Grid, HexCoord};
pub use rules::{Genome, RuleMatrix};
