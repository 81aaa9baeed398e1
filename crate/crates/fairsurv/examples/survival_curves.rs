//! Fit the Breslow baseline cumulative hazard on a small censored sample and
//! print Cox and Weibull AFT survival curves for a low-risk and a high-risk
//! score.
//!
//! Run with: `cargo run --example survival_curves`

use fairsurv::survival::{breslow_baseline, survival_aft, survival_cox};

fn main() -> fairsurv::Result<()> {
    let times = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
    let events = [1, 1, 0, 1, 1, 0, 1, 1];
    // linear scores: positive means higher hazard under Cox,
    // longer predicted log-time under AFT
    let scores = [0.5, 0.3, 0.1, 0.0, -0.1, -0.2, -0.4, -0.6];

    let base = breslow_baseline(&scores, &times, &events)?;
    println!("baseline cumulative hazard steps:");
    for t in [1.0, 3.0, 5.0, 7.0, 9.0] {
        println!("  Lambda0({t}) = {:.4}", base.eval(t));
    }

    println!("\n t    Cox S(t|g=0.5)  Cox S(t|g=-0.5)  AFT S(t|g=1.5)  AFT S(t|g=0.5)");
    let sigma = 0.8;
    for t in [1.0, 2.0, 4.0, 6.0, 8.0] {
        println!(
            "{t:>3}         {:.4}           {:.4}          {:.4}          {:.4}",
            survival_cox(&base, 0.5, t),
            survival_cox(&base, -0.5, t),
            survival_aft(1.5, sigma, t),
            survival_aft(0.5, sigma, t),
        );
    }
    Ok(())
}
