//! Inspects the order components directly: the first-order correction, the
//! ħt carryover into higher orders, and the telescoping identity
//! `Σ_{m=1}^{N} (x_m - χ_m x_{m-1}) = x_N`.

use hatm::engine::{chi, telescoping_check};
use hatm::model::hiv_cd8_default;

fn main() -> hatm::Result<()> {
    let sys = hiv_cd8_default();
    let series = hatm::solve(&sys, 6)?;
    for (i, name) in sys.names().iter().enumerate() {
        println!("{name}_1(t) = {}", series.component(i, 1));
        let carry: Vec<String> = (1..=6)
            .map(|m| format!("{}", series.component(i, m).coeff(1, 1)))
            .collect();
        println!("  ħt coefficient of x_1..x_6: {}", carry.join(", "));
    }
    println!("χ_1 = {}, χ_2 = {}", chi(1), chi(2));
    println!("telescoping defect: {:e}", telescoping_check(&series));
    Ok(())
}
