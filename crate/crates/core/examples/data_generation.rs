//! Seeded data for one repetition: a Gaussian design, width slicing with
//! 1/√d scaling, the two targets, label noise and the 80/20 split.
//!
//!     cargo run --release --example data_generation

use rfm::data::{add_noise, eval_target, gen_design, make_split, slice_and_scale, NoiseSpec, TargetKind, TargetSpec};
use rfm::seed::SeedStream;

fn main() -> rfm::Result<()> {
    let rep = SeedStream::for_rep(1, 0);
    let design = gen_design(200, 50, &rep.child("design"))?;
    let noise = NoiseSpec::draw(200, 0.01, &rep.child("noise"))?;
    let split = make_split(200, 0.8, &rep.child("split"))?;
    println!("split: {} train / {} test rows", split.train.len(), split.test.len());

    for kind in [TargetKind::Cubic, TargetKind::RandMat] {
        let target = TargetSpec::draw(kind, &rep.child("coeffs"));
        for d in [10, 25, 50] {
            // every width reuses the same draws, only the first d columns change
            let x = slice_and_scale(&design, d)?;
            let y = add_noise(eval_target(&x, &target)?.view(), &noise)?;
            let norm2 = x.view().rows().into_iter().map(|r| r.dot(&r)).sum::<f64>() / x.rows() as f64;
            let var = y.var(0.0);
            println!("{:>6} d={d:>2}: mean ‖x‖²={norm2:.3}  var(y)={var:.4}", kind.as_str());
        }
    }

    // streams are pure functions of their path
    let again = gen_design(200, 50, &SeedStream::for_rep(1, 0).child("design"))?;
    assert_eq!(again.view(), design.view());
    Ok(())
}
