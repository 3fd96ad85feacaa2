use radlap::lpscan::riesz_normalization_check;
use std::time::Instant;

#[test]
fn dbg() {
    for c in [2.0, 1.0] {
        let t = Instant::now();
        let chk = riesz_normalization_check(3.0, c).unwrap();
        println!("c_norm={c}: distance = {:.4e}   [{:?}]", chk.distance, t.elapsed());
    }
}
