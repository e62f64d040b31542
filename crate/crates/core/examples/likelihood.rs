//! Builds a glider corpus, computes the conditional transition frequencies
//! and writes them with greyscale heat maps.

use std::fs::File;

use hexrd::analysis::{build_corpus, compute_likelihoods, write_heatmap_pgm};
use hexrd::detector::FitnessConfig;
use hexrd::rules::pinned_glider_rule;
use hexrd::RuleMatrix;

fn main() -> hexrd::Result<()> {
    let rules: Vec<RuleMatrix> = [
        pinned_glider_rule(),
        "SSSBSSSSSAASSSSSBASSSSASSSASSSSSSSSS".parse()?,
    ]
    .into();
    let corpus = build_corpus(&rules, &FitnessConfig::default(), 0)?;
    println!("{} distinct gliders from {} rules", corpus.len(), rules.len());
    for e in &corpus {
        println!("  {} needs {:?}", e.rule, e.necessary);
    }
    let l = compute_likelihoods(&corpus)?;
    println!("max |FS+FA+FB+F#-1| = {:.1e}", l.partition_error());

    let dir = std::env::temp_dir();
    l.write_csv(File::create(dir.join("hexrd_F.csv"))?)?;
    for (name, t) in [("FS", &l.fs), ("FA", &l.fa), ("FB", &l.fb), ("Fhash", &l.fhash)] {
        write_heatmap_pgm(File::create(dir.join(format!("hexrd_{name}.pgm")))?, t)?;
    }
    println!("wrote {}", dir.join("hexrd_F.csv").display());
    Ok(())
}
