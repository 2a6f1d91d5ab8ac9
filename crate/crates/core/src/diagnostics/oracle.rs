//! Independent numerical reference: Dormand–Prince 5(4) with PI step control.

use crate::engine::DeformationSeries;
use crate::error::{Error, Result};
use crate::model::QuadraticOdeSystem;

// Butcher tableau. The systems are autonomous, so the nodes c_i are unused.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th-order weights minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const PI_ALPHA: f64 = 0.7 / 5.0;
const PI_BETA: f64 = 0.4 / 5.0;
const MAX_STEPS: usize = 1_000_000;

/// Accepted nodes of an adaptive run.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution {
    pub t_nodes: Vec<f64>,
    /// `states[j]` is the state vector at `t_nodes[j]`.
    pub states: Vec<Vec<f64>>,
    pub accepted: usize,
    pub rejected: usize,
}

impl OracleSolution {
    pub fn t_end(&self) -> f64 {
        *self.t_nodes.last().expect("oracle always holds t = 0")
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("oracle always holds t = 0")
    }
}

fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], rel_tol: f64, abs_tol: f64) -> f64 {
    let n = y.len() as f64;
    let sum: f64 = y
        .iter()
        .zip(y_new)
        .zip(err)
        .map(|((a, b), e)| {
            let sc = abs_tol + rel_tol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

fn initial_step(
    sys: &QuadraticOdeSystem,
    y0: &[f64],
    f0: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    let n = y0.len() as f64;
    let scale: Vec<f64> = y0.iter().map(|y| abs_tol + rel_tol * y.abs()).collect();
    let rms = |v: &[f64]| {
        (v.iter()
            .zip(&scale)
            .map(|(x, s)| (x / s).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
    };
    let d0 = rms(y0);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let mut f1 = vec![0.0; y0.len()];
    sys.rhs_into(&y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1)
}

/// Integrates `sys` from its initial values to `t_end`.
pub fn rk_reference(
    sys: &QuadraticOdeSystem,
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<OracleSolution> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "t_end must be > 0, got {t_end}"
        )));
    }
    if !(rel_tol > 0.0 && abs_tol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be > 0".into()));
    }
    let n = sys.dim();
    let mut t = 0.0;
    let mut y = sys.init().to_vec();
    let mut k1 = vec![0.0; n];
    sys.rhs_into(&y, &mut k1);
    let mut h = initial_step(sys, &y, &k1, rel_tol, abs_tol).min(t_end);

    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];

    let mut sol = OracleSolution {
        t_nodes: vec![0.0],
        states: vec![y.clone()],
        accepted: 0,
        rejected: 0,
    };
    let mut prev_err = 1e-4_f64;

    while t < t_end {
        if sol.accepted + sol.rejected >= MAX_STEPS {
            return Err(Error::StepUnderflow { t });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t });
        }

        let stage = |out: &mut [f64], tmp: &mut [f64], coeffs: &[(f64, &[f64])]| {
            for i in 0..n {
                tmp[i] = y[i] + h * coeffs.iter().map(|(a, k)| a * k[i]).sum::<f64>();
            }
            sys.rhs_into(tmp, out);
        };
        stage(&mut k2, &mut tmp, &[(A21, &k1)]);
        stage(&mut k3, &mut tmp, &[(A31, &k1), (A32, &k2)]);
        stage(&mut k4, &mut tmp, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        stage(
            &mut k5,
            &mut tmp,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        );
        stage(
            &mut k6,
            &mut tmp,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        for i in 0..n {
            y_new[i] =
                y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        sys.rhs_into(&y_new, &mut k7);
        for i in 0..n {
            err[i] =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err_norm = error_norm(&y, &y_new, &err, rel_tol, abs_tol);
        if !err_norm.is_finite() {
            sol.rejected += 1;
            h *= MIN_FACTOR;
            continue;
        }

        if err_norm <= 1.0 {
            let factor = if err_norm == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err_norm.powf(-PI_ALPHA) * prev_err.powf(PI_BETA))
                    .clamp(MIN_FACTOR, MAX_FACTOR)
            };
            prev_err = err_norm.max(1e-4);
            t = if last { t_end } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            sol.accepted += 1;
            sol.t_nodes.push(t);
            sol.states.push(y.clone());
            h *= factor;
        } else {
            sol.rejected += 1;
            h *= (SAFETY * err_norm.powf(-1.0 / 5.0)).max(MIN_FACTOR);
        }
    }
    Ok(sol)
}

/// Per-state maximum of `|S_i(ħ, t) - y_i(t)| / max(1, |y_i(t)|)` over the
/// oracle's accepted nodes in `[t_lo, t_hi]`.
pub fn compare(
    series: &DeformationSeries,
    hbar: f64,
    oracle: &OracleSolution,
    t_lo: f64,
    t_hi: f64,
) -> Result<Vec<f64>> {
    Ok(compare_rows(series, hbar, oracle, t_lo, t_hi)?
        .into_iter()
        .fold(vec![0.0; series.system().dim()], |mut acc, row| {
            acc[row.state] = f64::max(acc[row.state], row.rel_err);
            acc
        }))
}

/// One node/state pair of a series-versus-oracle comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub t: f64,
    pub state: usize,
    pub hatm: f64,
    pub oracle: f64,
    pub rel_err: f64,
}

pub fn compare_rows(
    series: &DeformationSeries,
    hbar: f64,
    oracle: &OracleSolution,
    t_lo: f64,
    t_hi: f64,
) -> Result<Vec<ComparisonRow>> {
    if !(t_lo <= t_hi) || t_lo < 0.0 || t_hi > oracle.t_end() {
        return Err(Error::InvalidArgument(format!(
            "range [{t_lo}, {t_hi}] outside oracle span [0, {}]",
            oracle.t_end()
        )));
    }
    if oracle.states.first().map(Vec::len) != Some(series.system().dim()) {
        return Err(Error::InvalidArgument(
            "oracle and series have different state counts".into(),
        ));
    }
    let sums = series.partial_sums();
    let mut rows = Vec::new();
    for (&t, y) in oracle.t_nodes.iter().zip(&oracle.states) {
        if t < t_lo || t > t_hi {
            continue;
        }
        for (state, (p, &yi)) in sums.iter().zip(y).enumerate() {
            let hatm = p.eval(hbar, t);
            rows.push(ComparisonRow {
                t,
                state,
                hatm,
                oracle: yi,
                rel_err: (hatm - yi).abs() / yi.abs().max(1.0),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::solve;
    use crate::model::hiv_cd8_default;

    fn decay() -> QuadraticOdeSystem {
        QuadraticOdeSystem::new(
            vec!["x".into()],
            vec![1.0],
            vec![0.0],
            vec![vec![-1.0]],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn exponential_decay() {
        let sol = rk_reference(&decay(), 1.0, 1e-10, 1e-12).unwrap();
        let x1 = sol.final_state()[0];
        assert_eq!(sol.t_end(), 1.0);
        assert!(((x1 - (-1.0f64).exp()) / x1).abs() < 1e-10);
        assert!(sol.accepted > 0);
    }

    #[test]
    fn starts_at_initial_state() {
        let sol = rk_reference(&hiv_cd8_default(), 0.5, 1e-8, 1e-10).unwrap();
        assert_eq!(sol.t_nodes[0], 0.0);
        assert_eq!(sol.states[0], vec![1000.0, 0.0, 1.0, 500.0, 0.0]);
        let dt = sol.t_nodes[1];
        let slope = (sol.states[1][0] - 1000.0) / dt;
        assert!((slope + 0.024).abs() < 1e-3, "{slope}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(rk_reference(&decay(), 0.0, 1e-6, 1e-6).is_err());
        assert!(rk_reference(&decay(), 1.0, 0.0, 1e-6).is_err());
    }

    #[test]
    fn blow_up_reports_underflow() {
        // x' = x², x(0) = 1 escapes to infinity at t = 1.
        let sys = QuadraticOdeSystem::new(
            vec!["x".into()],
            vec![1.0],
            vec![0.0],
            vec![vec![0.0]],
            vec![crate::model::QuadraticTerm {
                target: 0,
                j: 0,
                k: 0,
                coef: 1.0,
            }],
        )
        .unwrap();
        match rk_reference(&sys, 2.0, 1e-8, 1e-8) {
            Err(Error::StepUnderflow { t }) => assert!(t > 0.9 && t < 1.001, "{t}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn compare_at_origin_only() {
        let sys = hiv_cd8_default();
        let series = solve(&sys, 3).unwrap();
        let sol = rk_reference(&sys, 1.0, 1e-8, 1e-10).unwrap();
        assert_eq!(
            compare(&series, -0.8, &sol, 0.0, 0.0).unwrap(),
            vec![0.0; 5]
        );
        assert!(compare(&series, -0.8, &sol, 0.0, 2.0).is_err());
    }
}
