//! Stochastic simulation of the well-mixed reaction scheme from an equal
//! three-way mixture.

use std::fs::File;

use hexrd::reactor::{mean, paper_system, pearson, ssa_run, turning_points, unit_omega, ReactorState, SsaConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hexrd::Result<()> {
    let init = ReactorState::new(33_333, 33_333, 33_333);
    let cfg = SsaConfig {
        t_max: 200.0,
        sample_dt: 1.0,
        omega: unit_omega(&init),
        max_events: None,
    };
    let ts = ssa_run(&paper_system(), &init, &cfg, &mut ChaCha8Rng::seed_from_u64(0))?;
    let (a, b, s) = (ts.species(0), ts.species(1), ts.species(2));
    println!("{} events, {:?}", ts.events, ts.termination);
    println!("mean A {:.0}  B {:.0}  S {:.0}", mean(&a), mean(&b), mean(&s));
    println!("corr(A,B) {:.3}", pearson(&a, &b));
    println!("turning points in A: {}", turning_points(&a));
    let path = std::env::temp_dir().join("hexrd_reactor.csv");
    ts.write_csv(File::create(&path)?)?;
    println!("wrote {}", path.display());
    Ok(())
}
