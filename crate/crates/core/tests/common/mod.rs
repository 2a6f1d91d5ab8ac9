#![allow(dead_code)]

use hatm::model::{QuadraticOdeSystem, QuadraticTerm};

/// Small deterministic generator so fixtures do not depend on a seed policy.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 11
    }

    /// Uniform in `[-1, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Random quadratic system with at most `max_dim` states and O(1)
/// coefficients.
pub fn random_system(rng: &mut Lcg, max_dim: usize) -> QuadraticOdeSystem {
    let n = 1 + rng.below(max_dim);
    let names = (0..n).map(|i| format!("x{i}")).collect();
    let init = (0..n).map(|_| rng.unit()).collect();
    let constant = (0..n).map(|_| rng.unit()).collect();
    let linear = (0..n)
        .map(|_| (0..n).map(|_| rng.unit()).collect())
        .collect();
    let mut quadratic = Vec::new();
    for target in 0..n {
        for j in 0..n {
            for k in j..n {
                if rng.below(2) == 0 {
                    quadratic.push(QuadraticTerm {
                        target,
                        j,
                        k,
                        coef: rng.unit(),
                    });
                }
            }
        }
    }
    QuadraticOdeSystem::new(names, init, constant, linear, quadratic).unwrap()
}

use hatm::BiPoly;
use proptest::prelude::*;

/// Sparse polynomial with up to 8 terms, degrees below 6, coefficients in
/// `[-10, 10]`.
pub fn poly() -> impl Strategy<Value = BiPoly> {
    prop::collection::vec((0u32..6, 0u32..6, -10.0f64..10.0), 0..8).prop_map(BiPoly::from_terms)
}

/// Polynomial in `ħ` only, as carried by a Laplace image coefficient.
pub fn hbar_poly() -> impl Strategy<Value = BiPoly> {
    prop::collection::vec((0u32..6, -10.0f64..10.0), 0..5)
        .prop_map(|terms| BiPoly::from_terms(terms.into_iter().map(|(a, c)| (a, 0, c))))
}

/// Coefficient-wise agreement of `p` and `q` up to `rel` of the larger
/// coefficient scale.
pub fn close(p: &BiPoly, q: &BiPoly, rel: f64) -> bool {
    let scale = 1.0_f64.max(p.max_abs_coeff()).max(q.max_abs_coeff());
    p.terms().chain(q.terms()).all(|(m, _)| {
        approx::abs_diff_eq!(
            p.coeff(m.hbar, m.t),
            q.coeff(m.hbar, m.t),
            epsilon = rel * scale
        )
    })
}
