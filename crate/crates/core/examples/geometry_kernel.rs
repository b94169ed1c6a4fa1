// Pseudo-hyperbolic distance, Blaschke factors and Harnack bounds near the
// boundary, where the naive `1 - |z|^2` loses every digit.

use nevkit::{blaschke_factor, harnack_interval, rho, DiskPoint, HarmonicMajorant};

pub fn run() -> nevkit::Result<()> {
    let z = DiskPoint::real(1.0 - 1e-12)?;
    let w = DiskPoint::new(0.0, 1.0 - 1e-12)?;
    println!("rho(z, w) = {:.17}", rho(z, w));
    println!("1 - |z|^2 = {:e}", z.one_minus_norm_sq());

    let l = DiskPoint::new(0.3, -0.4)?;
    let b = blaschke_factor(l, z);
    println!("|b_l(z)| = {:.15}, rho(l, z) = {:.15}", b.norm(), rho(l, z));

    let (lo, hi) = harnack_interval(rho(l, z))?;
    println!("harnack ratio interval for rho = {:.3}: [{lo:.3e}, {hi:.3e}]", rho(l, z));

    let h = HarmonicMajorant::standard();
    println!("H = log 3 at z: {:.6}", h.eval(z));
    Ok(())
}

#[allow(dead_code)]
fn main() -> nevkit::Result<()> {
    run()
}
