//! Residual error functions `E_i(t) = dS_i/dt - f_i(S)` of the partial sums
//! at ħ = -0.8, and how their sup over [0, 1] falls as the order grows.

use hatm::diagnostics::{leading_exponent, linspace, residual_grid, sup_residual};
use hatm::model::hiv_cd8_default;

fn main() -> hatm::Result<()> {
    let sys = hiv_cd8_default();
    let hbar = -0.8;

    println!("sup |E_i| on [0, 1] at ħ = {hbar}");
    println!(
        "{:>3} {}",
        "N",
        sys.names()
            .iter()
            .map(|n| format!("{n:>11}"))
            .collect::<String>()
    );
    for n in [2, 5, 10, 15, 20] {
        let sup = sup_residual(&hatm::solve(&sys, n)?, hbar, 0.0, 1.0, 201)?;
        println!(
            "{n:>3} {}",
            sup.iter()
                .map(|v| format!("{v:>11.3e}"))
                .collect::<String>()
        );
    }

    let series = hatm::solve(&sys, 5)?;
    println!("\nE(t) for N = 5:");
    let grid = residual_grid(&series, hbar, &linspace(0.0, 1.0, 6)?)?;
    for (t, row) in grid.t_samples.iter().zip(&grid.values) {
        println!(
            "t={t:.1} {}",
            row.iter()
                .map(|v| format!("{v:>11.3e}"))
                .collect::<String>()
        );
    }

    println!("\nleading exponent of E near t = 0 at ħ = -1 (expect ≈ N):");
    for n in [5, 10] {
        let series = hatm::solve(&sys, n)?;
        let exps: Vec<String> = (0..sys.dim())
            .map(|i| match leading_exponent(&series, i, -1.0, 0.1, 21) {
                Ok(Some(p)) => format!("{p:.2}"),
                _ => "-".into(),
            })
            .collect();
        println!("N={n}: {}", exps.join(", "));
    }
    Ok(())
}
