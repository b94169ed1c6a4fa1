// Interpolating a rational function on a two-part union with the chained
// Blaschke construction.

use num_complex::Complex64;
use nevkit::generate::random_union;
use nevkit::interpolator::chained_solve;
use nevkit::pipeline::weak_separation_majorant;
use nevkit::DiskPoint;

pub fn run() -> nevkit::Result<()> {
    let f = |z: Complex64| (z * z + 1.0) / (z - 2.0);
    let parts = random_union(2, 10, 0.3, 0.9, 7)?.parts()?;
    let omega: Vec<Vec<Complex64>> =
        parts.iter().map(|p| p.iter().map(|z| f(z.to_complex())).collect()).collect();
    let h = weak_separation_majorant(&parts)?;
    let chain = chained_solve(&parts, &omega, &h)?;
    println!("node residual {:.2e}", chain.max_residual(&omega));
    println!("sup bound {:.3e}", chain.sup_bound());

    // off the nodes the chain is some other bounded function
    let z = DiskPoint::new(0.1, 0.2)?;
    println!("chain(z) = {:.6}, f(z) = {:.6}", chain.eval(z), f(z.to_complex()));
    println!("stage bounds within: {}", chain.report.all_within);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nevkit::Result<()> {
    run()
}
