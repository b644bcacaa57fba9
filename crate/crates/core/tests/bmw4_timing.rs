use jucys_core::bmw::build_bmw;
use std::time::Instant;

#[test]
#[ignore]
fn bmw_four_timing() {
    let t = Instant::now();
    let inst = build_bmw(4, 7).expect("bmw4");
    eprintln!("bmw4 total {:?} (dim {})", t.elapsed(), inst.algebra.dim());
}
