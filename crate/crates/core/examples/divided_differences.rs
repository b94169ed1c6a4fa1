// Divided differences along a sequence and the weighted sup statistic.

use num_complex::Complex64;
use nevkit::divdiff::{divided_difference, xn_statistic, StatConfig};
use nevkit::generate::radial_exponential;
use nevkit::HarmonicMajorant;

pub fn run() -> nevkit::Result<()> {
    let seq = radial_exponential(10)?;
    let values: Vec<Complex64> = (0..seq.len()).map(|k| Complex64::new((-1f64).powi(k as i32), 0.0)).collect();
    let seq = seq.with_values(values.clone())?;

    let d2 = divided_difference(&seq.points()[..3], &values[..3])?;
    println!("second difference on the first three points: {d2:.6}");

    let h = HarmonicMajorant::constant(2.0)?;
    for n in 1..=3 {
        let st = xn_statistic(&seq, n, &h, &StatConfig::default())?;
        println!("order {}: sup {:.4e} at {} points", st.order, st.sup, st.witness.len());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nevkit::Result<()> {
    run()
}
