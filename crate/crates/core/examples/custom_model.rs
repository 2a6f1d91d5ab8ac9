//! Any autonomous system with constant, linear, and bilinear terms can be
//! solved. Here: the logistic equation `x' = x - x²`, loaded from a JSON
//! model document, checked against its closed form `1 / (1 + 9e^{-t})`.

use hatm::diagnostics::{optimal_hbar, uniform_grid};
use hatm::model::load_system;

const LOGISTIC: &str = r#"{
    "states": [{ "name": "x", "init": 0.1 }],
    "constant": [0.0],
    "linear": [[1.0]],
    "quadratic": [{ "target": "x", "j": "x", "k": "x", "coef": -1.0 }]
}"#;

fn main() -> hatm::Result<()> {
    let sys = load_system(LOGISTIC)?;
    let series = hatm::solve(&sys, 12)?;
    let best = optimal_hbar(&series, &uniform_grid(-1.5, 0.0, 0.01)?, 0.0, 1.0)?;
    let sum = series.partial_sum(0);
    println!("ħ* = {best:.2}");
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let exact = 1.0 / (1.0 + 9.0 * f64::exp(-t));
        let approx = sum.eval(best, t);
        println!(
            "t={t:.2}  series {approx:.10}  exact {exact:.10}  err {:.1e}",
            (approx - exact).abs()
        );
    }
    Ok(())
}
