//! Compare the exact plug-in conditional mutual information of discrete
//! predictions with the differentiable kernel-smoothed approximation used
//! during training.
//!
//! Run with: `cargo run --release --example cmi_estimation`

use fairsurv::fairness::{cmi_approx, exact_cmi, NoiseConfig};

fn main() -> fairsurv::Result<()> {
    // A predictor that leaks group membership inside the positive class:
    // group 0 positives are always flagged, group 1 positives never.
    let n = 200;
    let mut yhat = Vec::new();
    let mut y = Vec::new();
    let mut z = Vec::new();
    let mut scores = Vec::new();
    for i in 0..n {
        let zi = i % 2;
        let yi = u8::from(i % 4 < 2);
        let leak = if yi == 1 { u8::from(zi == 0) } else { 0 };
        yhat.push(leak);
        y.push(yi);
        z.push(zi);
        // continuous surrogate score: +2 when flagged, -2 otherwise
        scores.push(if leak == 1 { 2.0 } else { -2.0 });
    }

    let exact = exact_cmi(&yhat, &y, &z)?;
    println!("exact plug-in CMI: {exact:.6} nats");

    // The kernel estimator targets the CMI of the noised continuous score,
    // which is slightly below the discrete value because the Gaussian noise
    // blurs the two score clusters; it stabilizes as m grows.
    for m in [50, 500, 2000] {
        let mut noise = NoiseConfig::new(m, 1.0, 42)?;
        noise.materialize(42)?;
        let (value, _grad) = cmi_approx(&scores, &y, &z, &noise)?;
        println!("kernel approximation, m = {m:>4}: {value:.6} nats");
    }
    Ok(())
}
