// Disk covering of a union of separated parts and value extension.

use num_complex::Complex64;
use nevkit::covering::{build_covering, extend_values, verify_covering};
use nevkit::generate::random_union;
use nevkit::pipeline::covering_majorant;

pub fn run() -> nevkit::Result<()> {
    let parts = random_union(2, 8, 0.3, 0.9, 7)?.parts()?;
    let h = covering_majorant(&parts)?;
    let cov = build_covering(&parts, &h, None)?;
    println!("C = {}, alpha = {}, beta = {}", cov.c, cov.alpha, cov.beta);
    println!("{} disks for {} points", cov.centers.len(), parts.iter().map(Vec::len).sum::<usize>());
    println!("verified: {}", verify_covering(&cov, &parts).all_pass());

    let w: Vec<Complex64> = (0..parts[0].len()).map(|k| Complex64::new(k as f64, 0.0)).collect();
    let ext = extend_values(&cov, &parts, 1, &w)?;
    println!("extended values: {:?}", ext.values().unwrap().iter().map(|v| v.re).collect::<Vec<_>>());
    Ok(())
}

#[allow(dead_code)]
fn main() -> nevkit::Result<()> {
    run()
}
