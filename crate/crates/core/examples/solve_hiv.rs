//! Solves the HIV / CD8⁺ model to order 5 and prints each partial sum as a
//! polynomial in ħ and t.
//!
//! ```text
//! cargo run --example solve_hiv [N]
//! ```

use hatm::model::hiv_cd8_default;

fn main() -> hatm::Result<()> {
    let n = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("N must be an integer"))
        .unwrap_or(5);
    let sys = hiv_cd8_default();
    let series = hatm::solve(&sys, n)?;
    for (name, sum) in sys.names().iter().zip(series.partial_sums()) {
        println!("{name}_{n}(t) = {sum}\n");
    }
    Ok(())
}
