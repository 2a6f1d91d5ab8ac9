use crate::engine::DeformationSeries;
use crate::error::{Error, Result};
use crate::model::QuadraticOdeSystem;
use crate::series::BiPoly;

/// Trapezoid nodes used by the optimal-`ħ` objective.
pub const OBJECTIVE_NODES: usize = 101;

/// Relative size below which a collapsed residual coefficient is treated as
/// rounding noise by [`leading_exponent`].
pub const COEFF_NOISE_FLOOR: f64 = 1e-12;

/// Cached partial sums and their `t`-derivatives for repeated residual
/// evaluation.
#[derive(Clone, Debug)]
pub struct ResidualEvaluator<'a> {
    system: &'a QuadraticOdeSystem,
    sums: Vec<BiPoly>,
    derivs: Vec<BiPoly>,
}

impl<'a> ResidualEvaluator<'a> {
    pub fn new(series: &'a DeformationSeries) -> Self {
        let sums = series.partial_sums();
        let derivs = sums.iter().map(BiPoly::diff_t).collect();
        ResidualEvaluator {
            system: series.system(),
            sums,
            derivs,
        }
    }

    /// Partial sums at `(ħ, t)`.
    pub fn state(&self, hbar: f64, t: f64) -> Vec<f64> {
        self.sums.iter().map(|p| p.eval(hbar, t)).collect()
    }

    /// `E_i = d/dt S_i - f_i(S)` for every state.
    pub fn residual(&self, hbar: f64, t: f64) -> Vec<f64> {
        let x = self.state(hbar, t);
        let mut f = vec![0.0; x.len()];
        self.system.rhs_into(&x, &mut f);
        self.derivs
            .iter()
            .zip(f)
            .map(|(d, fi)| d.eval(hbar, t) - fi)
            .collect()
    }
}

/// Residual of every state's partial sum at `(ħ, t)`.
pub fn residual(series: &DeformationSeries, hbar: f64, t: f64) -> Vec<f64> {
    ResidualEvaluator::new(series).residual(hbar, t)
}

/// Residuals sampled over a `t` grid at fixed `ħ`. `values[j][i]` is the
/// residual of state `i` at `t_samples[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualGrid {
    pub order: usize,
    pub hbar: f64,
    pub t_samples: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

pub fn residual_grid(
    series: &DeformationSeries,
    hbar: f64,
    t_samples: &[f64],
) -> Result<ResidualGrid> {
    if t_samples.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "t samples must be increasing".into(),
        ));
    }
    let eval = ResidualEvaluator::new(series);
    Ok(ResidualGrid {
        order: series.order(),
        hbar,
        t_samples: t_samples.to_vec(),
        values: t_samples.iter().map(|&t| eval.residual(hbar, t)).collect(),
    })
}

/// `samples` equally spaced points on `[t_lo, t_hi]`, endpoints included.
pub fn linspace(t_lo: f64, t_hi: f64, samples: usize) -> Result<Vec<f64>> {
    if !(t_lo < t_hi) || samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need t_lo < t_hi and at least 2 samples (got [{t_lo}, {t_hi}], {samples})"
        )));
    }
    let h = (t_hi - t_lo) / (samples - 1) as f64;
    let mut v: Vec<f64> = (0..samples).map(|k| t_lo + k as f64 * h).collect();
    v[samples - 1] = t_hi;
    Ok(v)
}

/// Per-state maximum of `|E_i|` over a uniform grid.
pub fn sup_residual(
    series: &DeformationSeries,
    hbar: f64,
    t_lo: f64,
    t_hi: f64,
    samples: usize,
) -> Result<Vec<f64>> {
    let ts = linspace(t_lo, t_hi, samples)?;
    let eval = ResidualEvaluator::new(series);
    let mut sup = vec![0.0_f64; series.system().dim()];
    for t in ts {
        for (s, e) in sup.iter_mut().zip(eval.residual(hbar, t)) {
            *s = s.max(e.abs());
        }
    }
    Ok(sup)
}

/// `Σ_i ∫ E_i(t)² dt` over `[t_lo, t_hi]` by the trapezoid rule.
pub fn residual_objective(
    eval: &ResidualEvaluator<'_>,
    hbar: f64,
    t_lo: f64,
    t_hi: f64,
) -> Result<f64> {
    let ts = linspace(t_lo, t_hi, OBJECTIVE_NODES)?;
    let h = (t_hi - t_lo) / (OBJECTIVE_NODES - 1) as f64;
    let sq: Vec<f64> = ts
        .iter()
        .map(|&t| eval.residual(hbar, t).iter().map(|e| e * e).sum())
        .collect();
    let interior: f64 = sq[1..sq.len() - 1].iter().sum();
    Ok(h * (0.5 * (sq[0] + sq[sq.len() - 1]) + interior))
}

/// Grid point minimizing [`residual_objective`]; exact ties go to the point
/// closest to `ħ = -1`.
pub fn optimal_hbar(series: &DeformationSeries, grid: &[f64], t_lo: f64, t_hi: f64) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty ħ grid".into()));
    }
    let eval = ResidualEvaluator::new(series);
    let mut best: Option<(f64, f64)> = None;
    for &h in grid {
        let obj = residual_objective(&eval, h, t_lo, t_hi)?;
        if !obj.is_finite() {
            continue;
        }
        let better = match best {
            None => true,
            Some((bh, bo)) => obj < bo || (obj == bo && (h + 1.0).abs() < (bh + 1.0).abs()),
        };
        if better {
            best = Some((h, obj));
        }
    }
    best.map(|(h, _)| h)
        .ok_or_else(|| Error::NonFinite("residual objective on every grid point".into()))
}

/// Symbolic residuals `d/dt S_i - f_i(S)` as polynomials in `ħ` and `t`,
/// paired with a same-shape polynomial of absolute term magnitudes that
/// bounds the rounding of each coefficient.
pub fn residual_polys(series: &DeformationSeries) -> Vec<(BiPoly, BiPoly)> {
    let sys = series.system();
    let sums = series.partial_sums();
    let abs_sums: Vec<BiPoly> = sums.iter().map(abs_poly).collect();
    (0..sys.dim())
        .map(|i| {
            let d = sums[i].diff_t();
            let mut f = BiPoly::constant(sys.constant()[i]);
            let mut mag = &abs_poly(&d) + &BiPoly::constant(sys.constant()[i].abs());
            for (j, &a) in sys.linear()[i].iter().enumerate() {
                if a != 0.0 {
                    f = &f + &sums[j].scale(a);
                    mag = &mag + &abs_sums[j].scale(a.abs());
                }
            }
            for q in sys.quadratic().iter().filter(|q| q.target == i) {
                f = &f + &(&sums[q.j] * &sums[q.k]).scale(q.coef);
                mag = &mag + &(&abs_sums[q.j] * &abs_sums[q.k]).scale(q.coef.abs());
            }
            (&d - &f, mag)
        })
        .collect()
}

fn abs_poly(p: &BiPoly) -> BiPoly {
    BiPoly::from_terms(p.terms().map(|(m, c)| (m.hbar, m.t, c.abs())))
}

/// Estimated exponent `p` in `|E_state(t)| ~ C t^p` on `(0, t_hi]` at fixed
/// `ħ`.
///
/// The residual polynomial is collapsed at `ħ`; coefficients below
/// [`COEFF_NOISE_FLOOR`] times their term magnitude are dropped as rounding
/// noise, and the exponent is the least-squares slope of `log|E|` against
/// `log t` over `samples` log-spaced points in `[t_hi / 100, t_hi]`.
/// Returns `None` when nothing survives the floor (the residual vanishes to
/// working precision).
pub fn leading_exponent(
    series: &DeformationSeries,
    state: usize,
    hbar: f64,
    t_hi: f64,
    samples: usize,
) -> Result<Option<f64>> {
    if state >= series.system().dim() {
        return Err(Error::InvalidArgument(format!(
            "no state with index {state}"
        )));
    }
    if !(t_hi > 0.0) || samples < 2 {
        return Err(Error::InvalidArgument(
            "need t_hi > 0 and at least 2 samples".into(),
        ));
    }
    let (poly, mag) = residual_polys(series).swap_remove(state);
    let values = poly.collapse_hbar(hbar);
    let scales = mag.collapse_hbar(hbar.abs());
    let coeffs: Vec<(u32, f64)> = values
        .into_iter()
        .filter_map(|(k, (v, _))| {
            let scale = scales.get(&k).map_or(0.0, |s| s.0);
            (v.abs() > COEFF_NOISE_FLOOR * scale).then_some((k, v))
        })
        .collect();
    if coeffs.is_empty() {
        return Ok(None);
    }
    let log_lo = (t_hi / 100.0).ln();
    let log_hi = t_hi.ln();
    let pts: Vec<(f64, f64)> = linspace(log_lo, log_hi, samples)?
        .into_iter()
        .map(|lt| {
            let t = lt.exp();
            let e: f64 = coeffs.iter().map(|&(k, c)| c * t.powi(k as i32)).sum();
            (lt, e.abs().ln())
        })
        .collect();
    Ok(Some(ls_slope(&pts)))
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
