//! Sparse polynomials in the convergence-control symbol `ħ` and time `t`.
//!
//! Every order component and partial sum produced by the deformation
//! recurrence is a [`BiPoly`]. Terms live in a `BTreeMap` keyed by
//! [`Monomial`], so iteration order (and therefore every serialized artifact)
//! is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent pair of a single term `ħ^hbar · t^t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub hbar: u32,
    pub t: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { hbar: 0, t: 0 };

    pub fn new(hbar: u32, t: u32) -> Self {
        Monomial { hbar, t }
    }

    pub fn total_degree(self) -> u32 {
        self.hbar + self.t
    }
}

/// Polynomial in `ħ` and `t` with `f64` coefficients, kept in canonical sparse
/// form: no stored zero coefficient and unique keys.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BiPoly {
    terms: BTreeMap<Monomial, f64>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn one() -> Self {
        BiPoly::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        BiPoly::monomial(c, 0, 0)
    }

    /// `c · ħ^hbar · t^t`.
    pub fn monomial(c: f64, hbar: u32, t: u32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert(Monomial::new(hbar, t), c);
        }
        BiPoly { terms }
    }

    /// The polynomial `t`.
    pub fn t() -> Self {
        BiPoly::monomial(1.0, 0, 1)
    }

    /// The polynomial `ħ`.
    pub fn hbar() -> Self {
        BiPoly::monomial(1.0, 1, 0)
    }

    /// Builds a polynomial from `(hbar_exp, t_exp, coef)` triples; repeated
    /// keys are summed.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, f64)>,
    {
        let mut p = BiPoly::zero();
        for (a, b, c) in terms {
            p.add_term(Monomial::new(a, b), c);
        }
        p
    }

    fn add_term(&mut self, key: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(key).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `ħ^hbar t^t` (zero when absent).
    pub fn coeff(&self, hbar: u32, t: u32) -> f64 {
        self.terms
            .get(&Monomial::new(hbar, t))
            .copied()
            .unwrap_or(0.0)
    }

    /// Terms in ascending `(ħ-exponent, t-exponent)` order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, f64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    /// Highest `ħ` exponent, or `None` for the zero polynomial.
    pub fn hbar_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.hbar).max()
    }

    /// Highest `t` exponent, or `None` for the zero polynomial.
    pub fn t_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.t).max()
    }

    pub fn scale(&self, s: f64) -> BiPoly {
        if s == 0.0 {
            return BiPoly::zero();
        }
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(&k, &c)| (k, c * s))
                .filter(|&(_, c)| c != 0.0)
                .collect(),
        }
    }

    /// Multiplies by `ħ^k`, raising every `ħ` exponent by `k`.
    pub fn shift_hbar(&self, k: u32) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(&m, &c)| (Monomial::new(m.hbar + k, m.t), c))
                .collect(),
        }
    }

    /// `d/dt`, term by term.
    pub fn diff_t(&self) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&m, &c) in &self.terms {
            if m.t > 0 {
                out.add_term(Monomial::new(m.hbar, m.t - 1), c * f64::from(m.t));
            }
        }
        out
    }

    /// Antiderivative in `t` vanishing at `t = 0`.
    pub fn integrate_t(&self) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&m, &c) in &self.terms {
            out.add_term(Monomial::new(m.hbar, m.t + 1), c / f64::from(m.t + 1));
        }
        out
    }

    /// The `t`-independent part, i.e. `p(ħ, 0)` as a polynomial in `ħ`.
    pub fn at_t_zero(&self) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.t == 0)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    /// Drops every term whose `ħ` exponent exceeds `max_hbar` or whose `t`
    /// exponent exceeds `max_t`.
    pub fn truncate(&self, max_hbar: u32, max_t: u32) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.hbar <= max_hbar && k.t <= max_t)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    /// Evaluates at `(ħ, t)`, accumulating terms by ascending total degree.
    pub fn eval(&self, hbar: f64, t: f64) -> f64 {
        let mut ordered: Vec<(Monomial, f64)> = self.terms().collect();
        ordered.sort_by_key(|(m, _)| (m.total_degree(), m.hbar));
        ordered
            .into_iter()
            .map(|(m, c)| c * pow(hbar, m.hbar) * pow(t, m.t))
            .sum()
    }

    /// Substitutes `ħ` and returns, for each `t` exponent present, the
    /// collapsed coefficient together with the sum of absolute values of the
    /// contributing terms (a scale for the rounding error of the collapse).
    pub fn collapse_hbar(&self, hbar: f64) -> BTreeMap<u32, (f64, f64)> {
        let mut out: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
        for (&m, &c) in &self.terms {
            let v = c * pow(hbar, m.hbar);
            let e = out.entry(m.t).or_insert((0.0, 0.0));
            e.0 += v;
            e.1 += v.abs();
        }
        out
    }

    /// Largest absolute coefficient (0 for the zero polynomial).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }
}

fn pow(x: f64, n: u32) -> f64 {
    // Exponents are bounded by the order cap; 0^0 = 1 as required for the
    // constant term.
    x.powi(n as i32)
}

impl Add for &BiPoly {
    type Output = BiPoly;

    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&k, &c) in &rhs.terms {
            out.add_term(k, c);
        }
        out
    }
}

impl Add for BiPoly {
    type Output = BiPoly;

    fn add(self, rhs: BiPoly) -> BiPoly {
        &self + &rhs
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;

    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&k, &c) in &rhs.terms {
            out.add_term(k, -c);
        }
        out
    }
}

impl Sub for BiPoly {
    type Output = BiPoly;

    fn sub(self, rhs: BiPoly) -> BiPoly {
        &self - &rhs
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;

    fn neg(self) -> BiPoly {
        self.scale(-1.0)
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;

    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &rhs.terms {
                out.add_term(Monomial::new(a.hbar + b.hbar, a.t + b.t), ca * cb);
            }
        }
        out
    }
}

impl Mul for BiPoly {
    type Output = BiPoly;

    fn mul(self, rhs: BiPoly) -> BiPoly {
        &self * &rhs
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(Monomial, f64)> = self.terms().collect();
        ordered.sort_by_key(|(m, _)| (m.t, m.hbar));
        for (i, (m, c)) in ordered.into_iter().enumerate() {
            if i == 0 {
                write!(f, "{c}")?;
            } else if c < 0.0 {
                write!(f, " - {}", -c)?;
            } else {
                write!(f, " + {c}")?;
            }
            match m.hbar {
                0 => {}
                1 => write!(f, " ħ")?,
                a => write!(f, " ħ^{a}")?,
            }
            match m.t {
                0 => {}
                1 => write!(f, " t")?,
                b => write!(f, " t^{b}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_cancels_to_empty() {
        let p = BiPoly::t();
        let q = BiPoly::monomial(-1.0, 0, 1);
        assert!((&p + &q).is_zero());
        assert_eq!((&p + &q).len(), 0);
    }

    #[test]
    fn add_accumulates() {
        let p = BiPoly::monomial(0.024, 1, 1);
        let s = &p + &p;
        assert_eq!(s.len(), 1);
        assert!((s.coeff(1, 1) - 0.048).abs() < 1e-15);
        assert_eq!(&p + &BiPoly::zero(), p);
    }

    #[test]
    fn mul_basic() {
        let a = BiPoly::from_terms([(0, 0, 1.0), (0, 1, 1.0)]);
        let b = BiPoly::from_terms([(0, 0, 1.0), (0, 1, -1.0)]);
        let prod = &a * &b;
        assert_eq!(prod, BiPoly::from_terms([(0, 0, 1.0), (0, 2, -1.0)]));

        let p = BiPoly::monomial(0.024, 1, 1);
        let q = BiPoly::monomial(3.0, 1, 1);
        let pq = &p * &q;
        assert_eq!(pq.len(), 1);
        assert!((pq.coeff(2, 2) - 0.072).abs() < 1e-15);
        assert_eq!(&p * &BiPoly::one(), p);
    }

    #[test]
    fn diff_and_integrate() {
        assert_eq!(BiPoly::monomial(3.0, 0, 1).diff_t(), BiPoly::constant(3.0));
        let d = BiPoly::monomial(0.024, 1, 2).diff_t();
        assert!((d.coeff(1, 1) - 0.048).abs() < 1e-15);
        assert!(BiPoly::constant(1000.0).diff_t().is_zero());

        assert_eq!(
            BiPoly::constant(3.0).integrate_t(),
            BiPoly::monomial(3.0, 0, 1)
        );
        let i = BiPoly::monomial(0.048, 1, 1).integrate_t();
        assert!((i.coeff(1, 2) - 0.024).abs() < 1e-15);
        assert!(BiPoly::zero().integrate_t().is_zero());
    }

    #[test]
    fn eval_examples() {
        let p = BiPoly::from_terms([(0, 0, 1000.0), (1, 1, 0.12)]);
        assert_eq!(p.eval(0.0, 1.0), 1000.0);
        assert_eq!(BiPoly::zero().eval(3.5, -2.0), 0.0);
        let q = BiPoly::monomial(0.024, 1, 1);
        assert!((q.eval(-1.0, 2.0) + 0.048).abs() < 1e-15);
    }

    #[test]
    fn scale_by_zero_is_zero() {
        let p = BiPoly::from_terms([(0, 0, 2.0), (3, 1, -1.0)]);
        assert!(p.scale(0.0).is_zero());
    }

    #[test]
    fn truncate_and_degrees() {
        let p = BiPoly::from_terms([(0, 0, 1.0), (2, 1, 1.0), (1, 3, 1.0)]);
        assert_eq!(p.hbar_degree(), Some(2));
        assert_eq!(p.t_degree(), Some(3));
        let q = p.truncate(1, 3);
        assert_eq!(q, BiPoly::from_terms([(0, 0, 1.0), (1, 3, 1.0)]));
        assert_eq!(BiPoly::zero().t_degree(), None);
    }

    #[test]
    fn collapse_tracks_magnitude() {
        let p = BiPoly::from_terms([(0, 2, 1.0), (1, 2, 1.0), (0, 0, 5.0)]);
        let c = p.collapse_hbar(-1.0);
        assert_eq!(c[&2], (0.0, 2.0));
        assert_eq!(c[&0], (5.0, 5.0));
    }

    #[test]
    fn display_orders_by_t() {
        let p = BiPoly::from_terms([(0, 0, 1000.0), (1, 1, 0.12), (2, 1, -0.24)]);
        assert_eq!(p.to_string(), "1000 + 0.12 ħ t - 0.24 ħ^2 t");
    }
}
