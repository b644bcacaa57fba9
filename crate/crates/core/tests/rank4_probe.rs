use jucys_core::affine::{affine_dim, build_affine, sample_affine};
use std::time::Instant;

#[test]
#[ignore]
fn rank_three_closure_timing() {
    let t0 = Instant::now();
    let base = sample_affine(2, 2, 7).expect("rank-2 instance");
    eprintln!("rank 2 total {:?} (dim {})", t0.elapsed(), base.algebra.dim());
    let point = base.point().clone();

    let t1 = Instant::now();
    let r3 = build_affine(3, 2, &point, 4 * affine_dim(3, 2) + 8).expect("rank 3");
    eprintln!("rank 3 total {:?} (dim {})", t1.elapsed(), r3.algebra.dim());
}

#[test]
#[ignore]
fn rank_four_closure_timing() {
    let t0 = Instant::now();
    let base = sample_affine(2, 2, 7).expect("rank-2 instance");
    eprintln!("rank 2 total {:?} (dim {})", t0.elapsed(), base.algebra.dim());
    let point = base.point().clone();

    let t2 = Instant::now();
    let r4 = build_affine(4, 2, &point, 4 * affine_dim(4, 2) + 8).expect("rank 4");
    eprintln!("rank 4 total {:?} (dim {})", t2.elapsed(), r4.algebra.dim());
}
