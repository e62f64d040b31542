//! Runs the fixture rule from a random seed patch and writes the final grid
//! as text and as a PGM image.

use std::fs::File;

use hexrd::engine;
use hexrd::rules::pinned_glider_rule;
use hexrd::{CellState, Grid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hexrd::Result<()> {
    let rule = pinned_glider_rule();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut grid = Grid::new(48, 48)?;
    grid.fill_random_patch(16, 16, 0.1, 0.1, &mut rng);

    let tr = engine::run(&grid, &rule, 150, 1)?;
    let last = tr.last().expect("at least one frame");
    println!("rule {rule}");
    println!(
        "after 150 steps: {} A, {} B on a {}x{} torus",
        last.count(CellState::A),
        last.count(CellState::B),
        last.width(),
        last.height()
    );

    let dir = std::env::temp_dir();
    std::fs::write(dir.join("hexrd_final.txt"), last.to_string())?;
    last.write_pgm(File::create(dir.join("hexrd_final.pgm"))?)?;
    println!("wrote {}", dir.join("hexrd_final.{txt,pgm}").display());
    Ok(())
}
