//! Samples every state's ħ-curve at t = 1 for N = 5 and 10 and reports the
//! flat segment (plateau) the detector finds, using the value curve and its
//! first t-derivative.

use hatm::diagnostics::{
    detect_plateau, hbar_curve_of, uniform_grid, CurveQuantity, DEFAULT_REL_SLOPE_TOL,
};
use hatm::model::hiv_cd8_default;

fn main() -> hatm::Result<()> {
    let sys = hiv_cd8_default();
    let grid = uniform_grid(-1.5, 0.0, 0.01)?;
    for n in [5, 10] {
        let series = hatm::solve(&sys, n)?;
        for (label, quantity) in [
            ("value", CurveQuantity::Value),
            ("d/dt ", CurveQuantity::FirstDerivative),
        ] {
            print!("N={n:<2} {label}:");
            for (i, name) in sys.names().iter().enumerate() {
                let curve = hbar_curve_of(&series, i, 1.0, &grid, quantity)?;
                match detect_plateau(&curve, DEFAULT_REL_SLOPE_TOL)? {
                    Some(iv) => print!("  {name} [{:.2}, {:.2}]", iv.lo, iv.hi),
                    None => print!("  {name} none"),
                }
            }
            println!();
        }
    }
    Ok(())
}
