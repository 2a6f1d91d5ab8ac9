//! Laplace-domain images of `t`-polynomials.
//!
//! Only polynomial inputs occur in the recurrence, so an image is a finite sum
//! `Σ c_k / s^k` with `k ≥ 1` and `ħ`-polynomial coefficients `c_k`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::series::BiPoly;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaplaceImage {
    terms: BTreeMap<u32, BiPoly>,
}

impl LaplaceImage {
    pub fn empty() -> Self {
        LaplaceImage::default()
    }

    /// `c / s^k`. The coefficient must not depend on `t` and `k` must be
    /// at least 1.
    pub fn term(k: i64, coeff: BiPoly) -> Result<Self> {
        LaplaceImage::from_terms([(k, coeff)])
    }

    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, BiPoly)>,
    {
        let mut img = LaplaceImage::empty();
        for (k, c) in terms {
            if k < 1 {
                return Err(Error::MalformedImage(format!("s-power {k} is not >= 1")));
            }
            if c.t_degree().is_some_and(|d| d > 0) {
                return Err(Error::MalformedImage(format!(
                    "coefficient of 1/s^{k} depends on t"
                )));
            }
            img.add_term(k as u32, &c);
        }
        Ok(img)
    }

    fn add_term(&mut self, k: u32, c: &BiPoly) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&k) {
            Some(prev) => prev + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, sum);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `1/s^k`.
    pub fn coeff(&self, k: u32) -> BiPoly {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &BiPoly)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn max_power(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn scale(&self, s: f64) -> LaplaceImage {
        let mut out = LaplaceImage::empty();
        for (&k, c) in &self.terms {
            out.add_term(k, &c.scale(s));
        }
        out
    }

    pub fn add(&self, other: &LaplaceImage) -> LaplaceImage {
        let mut out = self.clone();
        for (&k, c) in &other.terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn sub(&self, other: &LaplaceImage) -> LaplaceImage {
        self.add(&other.scale(-1.0))
    }
}

/// Forward transform: `c ħ^a t^b ↦ c b! ħ^a / s^(b+1)`.
pub fn laplace(p: &BiPoly) -> LaplaceImage {
    let mut img = LaplaceImage::empty();
    for (m, c) in p.terms() {
        img.add_term(m.t + 1, &BiPoly::monomial(c * factorial(m.t), m.hbar, 0));
    }
    img
}

/// Inverse transform: `c / s^k ↦ c t^(k-1) / (k-1)!`.
pub fn inverse_laplace(img: &LaplaceImage) -> Result<BiPoly> {
    let mut triples = Vec::new();
    for (&k, c) in &img.terms {
        if k < 1 {
            return Err(Error::MalformedImage(format!("s-power {k} is not >= 1")));
        }
        let fact = factorial(k - 1);
        triples.extend(c.terms().map(|(m, v)| (m.hbar, k - 1, v / fact)));
    }
    Ok(BiPoly::from_terms(triples))
}

/// Multiplies an image by `1/s`.
pub fn div_s(img: &LaplaceImage) -> LaplaceImage {
    LaplaceImage {
        terms: img.terms.iter().map(|(&k, c)| (k + 1, c.clone())).collect(),
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_examples() {
        assert_eq!(
            laplace(&BiPoly::one()),
            LaplaceImage::term(1, BiPoly::one()).unwrap()
        );
        let t2 = BiPoly::monomial(1.0, 0, 2);
        assert_eq!(
            laplace(&t2),
            LaplaceImage::term(3, BiPoly::constant(2.0)).unwrap()
        );
        let img = laplace(&BiPoly::monomial(0.024, 1, 1));
        assert_eq!(img.coeff(2), BiPoly::monomial(0.024, 1, 0));
    }

    #[test]
    fn inverse_examples() {
        let one = LaplaceImage::term(1, BiPoly::one()).unwrap();
        assert_eq!(inverse_laplace(&one).unwrap(), BiPoly::one());
        let img = LaplaceImage::term(3, BiPoly::monomial(0.048, 1, 0)).unwrap();
        let p = inverse_laplace(&img).unwrap();
        assert!((p.coeff(1, 2) - 0.024).abs() < 1e-15);
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn rejects_malformed() {
        assert!(LaplaceImage::term(0, BiPoly::one()).is_err());
        assert!(LaplaceImage::term(-2, BiPoly::one()).is_err());
        assert!(LaplaceImage::term(2, BiPoly::t()).is_err());
    }

    #[test]
    fn div_s_shifts() {
        let one = LaplaceImage::term(1, BiPoly::one()).unwrap();
        assert_eq!(div_s(&one), LaplaceImage::term(2, BiPoly::one()).unwrap());
        let img = LaplaceImage::term(2, BiPoly::monomial(0.024, 1, 0)).unwrap();
        assert_eq!(div_s(&img).coeff(3), BiPoly::monomial(0.024, 1, 0));
        assert!(div_s(&LaplaceImage::empty()).is_empty());
    }

    #[test]
    fn cancellation_drops_terms() {
        let a = LaplaceImage::term(2, BiPoly::constant(1.5)).unwrap();
        assert!(a.sub(&a).is_empty());
    }
}
