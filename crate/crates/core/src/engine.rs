//! The m-th-order deformation recurrence.
//!
//! For a system `dx_i/dt = c_i + (A x)_i + Σ coef x_j x_k` with zero-order
//! guess `x_i,0 = x_i(0)` and unit auxiliary functions, order `m ≥ 1` is
//!
//! ```text
//! R_i,m = L[x_i,m-1] - x_i,m-1(0)/s - (1 - χ_m) c_i/s²
//!         - (1/s) L[(A x_m-1)_i] - (1/s) L[Σ coef Σ_r x_j,r x_k,m-1-r]
//! x_i,m = χ_m x_i,m-1 + ħ L⁻¹[R_i,m]
//! ```
//!
//! `ħ` stays symbolic, so one solve serves every `ħ`. The embedding
//! parameter never appears at runtime: order `m` is its `q^m` Taylor
//! coefficient.

use crate::error::{Error, Result, MAX_ORDER};
use crate::laplace::{div_s, inverse_laplace, laplace, LaplaceImage};
use crate::model::QuadraticOdeSystem;
use crate::series::BiPoly;

/// `χ_m`: 0 for `m <= 1`, 1 otherwise.
pub fn chi(m: usize) -> f64 {
    if m <= 1 {
        0.0
    } else {
        1.0
    }
}

/// How each order's correction is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RecurrencePath {
    /// Through explicit Laplace images, division by `s`, and inversion.
    #[default]
    Laplace,
    /// Directly in time: every `(1/s) L[·]` followed by `L⁻¹` becomes an
    /// antiderivative vanishing at `t = 0`.
    TimeDomain,
}

/// Order components `x_i,0 … x_i,N` for every state.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationSeries {
    system: QuadraticOdeSystem,
    /// `components[m][i]` is `x_i,m`.
    components: Vec<Vec<BiPoly>>,
}

impl DeformationSeries {
    /// Series holding only the zero-order guess.
    pub fn zeroth(system: &QuadraticOdeSystem) -> Self {
        let x0 = system.init().iter().map(|&v| BiPoly::constant(v)).collect();
        DeformationSeries {
            system: system.clone(),
            components: vec![x0],
        }
    }

    /// Rebuilds a series from stored components (e.g. a parsed export).
    pub fn from_components(
        system: QuadraticOdeSystem,
        components: Vec<Vec<BiPoly>>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("series has no components".into()));
        }
        if components.len() > MAX_ORDER + 1 {
            return Err(Error::OrderOutOfRange(components.len() as i64 - 1));
        }
        if components.iter().any(|c| c.len() != system.dim()) {
            return Err(Error::InvalidArgument(
                "component count differs from the system's state count".into(),
            ));
        }
        Ok(DeformationSeries { system, components })
    }

    pub fn system(&self) -> &QuadraticOdeSystem {
        &self.system
    }

    /// Highest order held.
    pub fn order(&self) -> usize {
        self.components.len() - 1
    }

    /// `x_state,m`.
    pub fn component(&self, state: usize, m: usize) -> &BiPoly {
        &self.components[m][state]
    }

    /// All states at order `m`.
    pub fn order_components(&self, m: usize) -> &[BiPoly] {
        &self.components[m]
    }

    /// `Σ_{m=0}^{N} x_state,m`.
    pub fn partial_sum(&self, state: usize) -> BiPoly {
        self.partial_sum_to(state, self.order())
    }

    /// Partial sum truncated at order `upto`.
    pub fn partial_sum_to(&self, state: usize, upto: usize) -> BiPoly {
        self.components[..=upto]
            .iter()
            .fold(BiPoly::zero(), |acc, c| &acc + &c[state])
    }

    pub fn partial_sums(&self) -> Vec<BiPoly> {
        (0..self.system.dim())
            .map(|i| self.partial_sum(i))
            .collect()
    }

    fn push(&mut self, next: Vec<BiPoly>) {
        self.components.push(next);
    }
}

/// Cauchy-product convolution `Σ_{r=0}^{m-1} x_j,r · x_k,m-1-r`, summed over
/// every quadratic term feeding each state and weighted by its coefficient.
fn quadratic_convolution(series: &DeformationSeries, m: usize) -> Vec<BiPoly> {
    let sys = series.system();
    let mut out = vec![BiPoly::zero(); sys.dim()];
    for q in sys.quadratic() {
        let mut conv = BiPoly::zero();
        for r in 0..m {
            let prod = series.component(q.j, r) * series.component(q.k, m - 1 - r);
            conv = &conv + &prod;
        }
        out[q.target] = &out[q.target] + &conv.scale(q.coef);
    }
    out
}

/// `(A x_m-1)_i` for every state.
fn linear_part(series: &DeformationSeries, m: usize) -> Vec<BiPoly> {
    let sys = series.system();
    let prev = series.order_components(m - 1);
    sys.linear()
        .iter()
        .map(|row| {
            row.iter()
                .zip(prev)
                .filter(|(a, _)| **a != 0.0)
                .fold(BiPoly::zero(), |acc, (&a, x)| &acc + &x.scale(a))
        })
        .collect()
}

fn check_step(series: &DeformationSeries, m: usize) -> Result<()> {
    if m == 0 || m > series.order() + 1 {
        return Err(Error::InvalidArgument(format!(
            "order {m} needs components 0..{} (series holds 0..{})",
            m.saturating_sub(1),
            series.order()
        )));
    }
    if m > MAX_ORDER {
        return Err(Error::OrderOutOfRange(m as i64));
    }
    Ok(())
}

/// The transform-domain right-hand sides `R_i,m`, one image per state.
/// Requires components `0..m-1`.
pub fn deformation_rhs(series: &DeformationSeries, m: usize) -> Result<Vec<LaplaceImage>> {
    check_step(series, m)?;
    let sys = series.system();
    let carry = chi(m);
    let linear = linear_part(series, m);
    let quad = quadratic_convolution(series, m);

    let mut out = Vec::with_capacity(sys.dim());
    for i in 0..sys.dim() {
        let prev = series.component(i, m - 1);
        let mut img = laplace(prev).sub(&LaplaceImage::term(1, prev.at_t_zero())?);
        let c = sys.constant()[i];
        if carry == 0.0 && c != 0.0 {
            img = img.sub(&LaplaceImage::term(2, BiPoly::constant(c))?);
        }
        let model_terms = &linear[i] + &quad[i];
        img = img.sub(&div_s(&laplace(&model_terms)));
        out.push(img);
    }
    Ok(out)
}

/// Order-`m` components `x_i,m = χ_m x_i,m-1 + ħ L⁻¹[R_i,m]`.
pub fn next_order(series: &DeformationSeries, m: usize) -> Result<Vec<BiPoly>> {
    next_order_via(series, m, RecurrencePath::Laplace)
}

/// [`next_order`] along a chosen path.
pub fn next_order_via(
    series: &DeformationSeries,
    m: usize,
    path: RecurrencePath,
) -> Result<Vec<BiPoly>> {
    let carry = chi(m);
    let corrections = match path {
        RecurrencePath::Laplace => deformation_rhs(series, m)?
            .iter()
            .map(inverse_laplace)
            .collect::<Result<Vec<_>>>()?,
        RecurrencePath::TimeDomain => time_domain_corrections(series, m)?,
    };
    Ok(corrections
        .into_iter()
        .enumerate()
        .map(|(i, corr)| &series.component(i, m - 1).scale(carry) + &corr.shift_hbar(1))
        .collect())
}

/// `L⁻¹[R_i,m]` computed without the transform layer.
fn time_domain_corrections(series: &DeformationSeries, m: usize) -> Result<Vec<BiPoly>> {
    check_step(series, m)?;
    let sys = series.system();
    let linear = linear_part(series, m);
    let quad = quadratic_convolution(series, m);
    let mut out = Vec::with_capacity(sys.dim());
    for i in 0..sys.dim() {
        let prev = series.component(i, m - 1);
        let mut source = &linear[i] + &quad[i];
        if chi(m) == 0.0 {
            source = &source + &BiPoly::constant(sys.constant()[i]);
        }
        out.push(&(prev - &prev.at_t_zero()) - &source.integrate_t());
    }
    Ok(out)
}

/// Runs the recurrence to order `n`.
pub fn solve(sys: &QuadraticOdeSystem, n: usize) -> Result<DeformationSeries> {
    solve_via(sys, n, RecurrencePath::Laplace)
}

pub fn solve_via(
    sys: &QuadraticOdeSystem,
    n: usize,
    path: RecurrencePath,
) -> Result<DeformationSeries> {
    if n > MAX_ORDER {
        return Err(Error::OrderOutOfRange(n as i64));
    }
    let mut series = DeformationSeries::zeroth(sys);
    for m in 1..=n {
        let next = next_order_via(&series, m, path)?;
        series.push(next);
    }
    Ok(series)
}

/// Largest coefficient of `Σ_{m=1}^{N} [x_m - χ_m x_m-1] - x_N` over all
/// states; zero up to rounding for a correctly built series.
pub fn telescoping_check(series: &DeformationSeries) -> f64 {
    let n = series.order();
    if n == 0 {
        return 0.0;
    }
    (0..series.system().dim())
        .map(|i| {
            let mut acc = BiPoly::zero();
            for m in 1..=n {
                let diff = series.component(i, m) - &series.component(i, m - 1).scale(chi(m));
                acc = &acc + &diff;
            }
            (&acc - series.component(i, n)).max_abs_coeff()
        })
        .fold(0.0, f64::max)
}
