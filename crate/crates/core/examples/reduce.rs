//! Reduces the bundled frequency table to a rule class and compares it with
//! the bundled reference class.

use hexrd::analysis::{compare, enumerate_rules, reduce, LikelihoodMatrices, ReduceParams, ReducedRuleSet};
use hexrd::rules::PAIRS;

fn show(s: &[hexrd::CellState]) -> String {
    s.iter().map(|c| c.letter()).collect()
}

fn main() -> hexrd::Result<()> {
    let r = reduce(&LikelihoodMatrices::fig1(), &ReduceParams::default())?;
    let reference = ReducedRuleSet::paper_r();
    for &(i, j) in PAIRS.iter() {
        let states = r.get(i, j);
        if states.len() > 1 || states[0] != hexrd::CellState::S {
            println!("({i},{j}) -> {}", show(&states));
        }
    }
    let diffs = compare(&r, &reference);
    println!("{}/36 entries agree with the reference", 36 - diffs.len());
    for d in &diffs {
        println!("  ({},{}): computed {} reference {}", d.i, d.j, show(&d.left), show(&d.right));
    }
    println!("class size: computed {}, reference {}", r.count(), reference.count());
    for m in enumerate_rules(&reference).take(3) {
        println!("  member {m}");
    }
    Ok(())
}
