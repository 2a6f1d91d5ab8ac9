use crate::engine::DeformationSeries;
use crate::error::{Error, Result};

/// Default plateau slope tolerance, relative to the curve scale.
pub const DEFAULT_REL_SLOPE_TOL: f64 = 1e-3;

/// Partial sum of one state at fixed `t`, sampled over `ħ`.
#[derive(Clone, Debug, PartialEq)]
pub struct HbarCurve {
    pub state: usize,
    /// Series order the curve was sampled from.
    pub order: usize,
    pub t_fixed: f64,
    samples: Vec<(f64, f64)>,
}

impl HbarCurve {
    /// `ħ` must be strictly increasing and every value finite.
    pub fn new(state: usize, order: usize, t_fixed: f64, samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidArgument(
                "ħ samples must be strictly increasing".into(),
            ));
        }
        if let Some(&(h, _)) = samples
            .iter()
            .find(|(h, v)| !h.is_finite() || !v.is_finite())
        {
            return Err(Error::NonFinite(format!("ħ-curve sample at ħ = {h}")));
        }
        Ok(HbarCurve {
            state,
            order,
            t_fixed,
            samples,
        })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Contiguous `ħ` range where a curve is flat.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceInterval {
    pub state: usize,
    pub lo: f64,
    pub hi: f64,
    pub order: usize,
}

impl ConvergenceInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, hbar: f64) -> bool {
        self.lo <= hbar && hbar <= self.hi
    }
}

/// `lo, lo + step, …` up to `hi` inclusive. The last point snaps to `hi`
/// when it lands within rounding of it.
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 || hi < lo {
        return Err(Error::InvalidArgument(format!("bad grid {lo}:{hi}:{step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| lo + k as f64 * step).collect();
    if let Some(last) = grid.last_mut() {
        if (*last - hi).abs() <= 1e-9 * step.max(hi.abs()) {
            *last = hi;
        }
    }
    Ok(grid)
}

/// What an ħ-curve plots at fixed `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CurveQuantity {
    /// The partial sum itself.
    #[default]
    Value,
    /// Its first `t`-derivative.
    FirstDerivative,
    /// Its second `t`-derivative.
    SecondDerivative,
}

/// Evaluates the partial sum of `state` at `t_fixed` on every `ħ` in `grid`.
pub fn hbar_curve(
    series: &DeformationSeries,
    state: usize,
    t_fixed: f64,
    grid: &[f64],
) -> Result<HbarCurve> {
    hbar_curve_of(series, state, t_fixed, grid, CurveQuantity::Value)
}

pub fn hbar_curve_of(
    series: &DeformationSeries,
    state: usize,
    t_fixed: f64,
    grid: &[f64],
    quantity: CurveQuantity,
) -> Result<HbarCurve> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty ħ grid".into()));
    }
    if state >= series.system().dim() {
        return Err(Error::InvalidArgument(format!(
            "no state with index {state}"
        )));
    }
    let sum = series.partial_sum(state);
    let sum = match quantity {
        CurveQuantity::Value => sum,
        CurveQuantity::FirstDerivative => sum.diff_t(),
        CurveQuantity::SecondDerivative => sum.diff_t().diff_t(),
    };
    let samples = grid.iter().map(|&h| (h, sum.eval(h, t_fixed))).collect();
    HbarCurve::new(state, series.order(), t_fixed, samples)
}

/// Widest run of samples over which every finite-difference slope satisfies
/// `|Δv/Δħ| <= rel_slope_tol · max(1, median |v|)`. A run needs at least
/// three consecutive points; ties go to the leftmost run.
pub fn detect_plateau(
    curve: &HbarCurve,
    rel_slope_tol: f64,
) -> Result<Option<ConvergenceInterval>> {
    let s = curve.samples();
    if s.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "plateau detection needs at least 3 samples, got {}",
            s.len()
        )));
    }
    let bound = rel_slope_tol * curve_scale(s);
    let flat: Vec<bool> = s
        .windows(2)
        .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs() <= bound)
        .collect();

    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < flat.len() {
        if !flat[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < flat.len() && flat[i] {
            i += 1;
        }
        // segments start..i cover sample points start..=i
        if i - start >= 2 {
            let width = s[i].0 - s[start].0;
            if best.is_none_or(|(a, b)| width > s[b].0 - s[a].0) {
                best = Some((start, i));
            }
        }
    }
    Ok(best.map(|(a, b)| ConvergenceInterval {
        state: curve.state,
        lo: s[a].0,
        hi: s[b].0,
        order: curve.order,
    }))
}

fn curve_scale(samples: &[(f64, f64)]) -> f64 {
    let mut mags: Vec<f64> = samples.iter().map(|(_, v)| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let n = mags.len();
    let median = if n % 2 == 1 {
        mags[n / 2]
    } else {
        0.5 * (mags[n / 2 - 1] + mags[n / 2])
    };
    median.max(1.0)
}
