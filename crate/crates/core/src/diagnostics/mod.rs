//! What gets done with a solved series: ħ-curves and their plateaus,
//! residual functions, optimal-ħ selection, and comparison against an
//! adaptive Runge–Kutta reference.

mod curve;
mod oracle;
mod residual;

pub use curve::{
    detect_plateau, hbar_curve, hbar_curve_of, uniform_grid, ConvergenceInterval, CurveQuantity,
    HbarCurve, DEFAULT_REL_SLOPE_TOL,
};
pub use oracle::{compare, compare_rows, rk_reference, ComparisonRow, OracleSolution};
pub use residual::{
    leading_exponent, linspace, optimal_hbar, residual, residual_grid, residual_objective,
    residual_polys, sup_residual, ResidualEvaluator, ResidualGrid, COEFF_NOISE_FLOOR,
    OBJECTIVE_NODES,
};
