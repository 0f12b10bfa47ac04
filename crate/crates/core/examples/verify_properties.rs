//! The quick acceptance checks: iteration-0 RFM against the baseline,
//! analytic against finite-difference gradients, and recovery of a linear
//! target's direction. The sweep-based criteria run with
//! `cargo test --release --test acceptance` or `rfm-sweep verify`.
//!
//!     cargo run --release --example verify_properties

use rfm::verify::*;

fn main() -> rfm::Result<()> {
    let eq = baseline_equivalence(50, 7)?;
    println!("{eq:?}");
    let grad = gradient_oracle(100, 7)?;
    println!("{grad:?}");
    let align = linear_target_alignment(7)?;
    println!("|cos(top eigenvector, w)| = {:.6}", align.cosine.abs());

    let mut acc = Acceptance::new(AcceptanceConfig::default());
    for id in [4, 5, 8] {
        println!("{}", acc.criterion(id)?);
    }
    Ok(())
}
