use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid dimensions {width}x{height}: width must be >= 3 and height an even number >= 4")]
    GridDimensions { width: usize, height: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid genome: {0}")]
    Genome(String),

    #[error("invalid or contradictory rule entry at ({i}, {j})")]
    Constraint { i: u8, j: u8 },

    #[error("localization touches the torus seam at frame {frame}")]
    SeamContact { frame: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
