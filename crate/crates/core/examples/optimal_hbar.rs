//! Picks the convergence-control parameter that minimizes the integrated
//! squared residual over t ∈ [0, 1], for several orders.

use hatm::diagnostics::{optimal_hbar, residual_objective, uniform_grid, ResidualEvaluator};
use hatm::model::hiv_cd8_default;

fn main() -> hatm::Result<()> {
    let sys = hiv_cd8_default();
    let grid = uniform_grid(-1.5, 0.0, 0.01)?;
    for n in [5, 10, 15] {
        let series = hatm::solve(&sys, n)?;
        let best = optimal_hbar(&series, &grid, 0.0, 1.0)?;
        let eval = ResidualEvaluator::new(&series);
        let at_best = residual_objective(&eval, best, 0.0, 1.0)?;
        let at_taylor = residual_objective(&eval, -1.0, 0.0, 1.0)?;
        println!("N={n:<2} ħ* = {best:+.2}  objective {at_best:.3e}  (ħ = -1: {at_taylor:.3e})");
    }
    Ok(())
}
