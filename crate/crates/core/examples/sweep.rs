//! Samples members of the reference rule class and tallies what kinds of
//! localization they produce.

use hexrd::analysis::{stationarity_sweep, ReducedRuleSet, SweepConfig};
use hexrd::detector::LocalizationClass;

fn main() -> hexrd::Result<()> {
    let cfg = SweepConfig {
        rules: 8,
        ..SweepConfig::default()
    };
    let report = stationarity_sweep(&ReducedRuleSet::paper_r(), &cfg, 0)?;
    report.write_csv(std::io::stdout())?;
    println!(
        "still {} oscillator {} glider {} puffer {} unresolved {}",
        report.count(LocalizationClass::StillLife),
        report.count(LocalizationClass::Oscillator),
        report.count(LocalizationClass::Glider),
        report.count(LocalizationClass::PufferTrain),
        report.count(LocalizationClass::Unresolved),
    );
    println!("mobile localizations: {}", report.mobile());
    Ok(())
}
