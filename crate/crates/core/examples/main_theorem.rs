// Full verification pipeline on generated sequences, and a run that fails
// because the sequence is too dense for the requested `n`.

use nevkit::generate::{clustered, radial_exponential};
use nevkit::pipeline::{verify_main_theorem, MainTheoremConfig};

pub fn run() -> nevkit::Result<()> {
    for (name, seq, n) in [
        ("radial", radial_exponential(12)?, 1),
        ("clustered n=2", clustered(2, 3, 1e-6, 7)?, 2),
        ("clustered n=2 as n=1", clustered(2, 3, 1e-6, 7)?, 1),
    ] {
        let mut cfg = MainTheoremConfig::new(n);
        cfg.seed = 7;
        let report = verify_main_theorem(&seq, &cfg)?;
        println!("{name}: passed {}", report.passed);
        for step in &report.steps {
            println!("  {:<16} {}", step.name, if step.passed { "ok" } else { "FAIL" });
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nevkit::Result<()> {
    run()
}
