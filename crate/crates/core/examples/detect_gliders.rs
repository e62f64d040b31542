//! Tracks localized patterns under the fixture rule and prints the
//! per-trial census plus the resulting fitness.

use std::collections::BTreeMap;

use hexrd::detector::{self, FitnessConfig};
use hexrd::rules::pinned_glider_rule;

fn main() -> hexrd::Result<()> {
    let rule = pinned_glider_rule();
    let cfg = FitnessConfig::default();
    let reports = detector::detect(&rule, &cfg, 0)?;
    for r in &reports {
        let mut census = BTreeMap::new();
        for l in &r.localizations {
            *census.entry(l.class.name()).or_insert(0usize) += 1;
        }
        println!("trial {}: {census:?}", r.trial);
        for l in r.localizations.iter().filter(|l| l.class.is_mobile()) {
            println!(
                "  {} period {} displacement {:?} size {}",
                l.class.name(),
                l.period,
                l.displacement,
                l.size()
            );
        }
    }
    println!("fitness {:.4e}", detector::fitness_from_reports(&reports, &cfg));
    Ok(())
}
