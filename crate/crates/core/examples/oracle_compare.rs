//! Integrates the model with the adaptive Dormand–Prince reference and
//! compares the order-10 series against it at ħ = -1 and at the optimal ħ.

use hatm::diagnostics::{compare, optimal_hbar, rk_reference, uniform_grid};
use hatm::model::hiv_cd8_default;

fn main() -> hatm::Result<()> {
    let sys = hiv_cd8_default();
    let oracle = rk_reference(&sys, 1.0, 1e-10, 1e-12)?;
    println!(
        "reference: {} accepted / {} rejected steps, y(1) = {:?}",
        oracle.accepted,
        oracle.rejected,
        oracle.final_state()
    );

    let series = hatm::solve(&sys, 10)?;
    let best = optimal_hbar(&series, &uniform_grid(-1.5, 0.0, 0.01)?, 0.0, 1.0)?;
    for (hbar, t_hi) in [(-1.0, 0.5), (-1.0, 1.0), (best, 1.0), (-0.5, 1.0)] {
        let err = compare(&series, hbar, &oracle, 0.0, t_hi)?;
        let cols: Vec<String> = sys
            .names()
            .iter()
            .zip(&err)
            .map(|(n, e)| format!("{n} {e:.2e}"))
            .collect();
        println!("ħ={hbar:+.2} t∈[0, {t_hi}]: {}", cols.join("  "));
    }
    Ok(())
}
