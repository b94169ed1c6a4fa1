// Count condition, weak separation and the partition into separated parts.

use nevkit::generate::clustered;
use nevkit::separation::{count_condition, partition_weakly_separated, weakly_separated};
use nevkit::HarmonicMajorant;

pub fn run() -> nevkit::Result<()> {
    let seq = clustered(3, 4, 1e-6, 7)?;
    let h = HarmonicMajorant::standard();
    println!("{} points, separated under log 3: {}", seq.len(), weakly_separated(seq.points(), &h).separated);
    println!("max points in one disk: {}", count_condition(seq.points(), &h).max_count);

    let res = partition_weakly_separated(seq.points(), &h, 3)?;
    let sizes: Vec<usize> = res.parts.iter().map(Vec::len).collect();
    println!("parts {sizes:?}, all separated under witness: {}", res.all_separated());
    println!("witness constant {:.3}", res.witness.constant_term());

    let err = partition_weakly_separated(seq.points(), &h, 2).unwrap_err();
    println!("with n = 2: {err}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> nevkit::Result<()> {
    run()
}
