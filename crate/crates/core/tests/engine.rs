mod common;

use hatm::engine::{solve, solve_via, telescoping_check, RecurrencePath};
use hatm::model::{hiv_cd8_default, HivCd8Params, QuadraticOdeSystem, QuadraticTerm};
use hatm::{BiPoly, Error};

use common::{random_system, Lcg};

/// Taylor coefficients `a[k][i]` of the exact solution at `t = 0`, from the
/// Cauchy-product recursion `(k+1) a_{k+1} = c δ_k0 + A a_k + Σ coef (a_j * a_k)_k`.
fn taylor_coefficients(sys: &QuadraticOdeSystem, degree: usize) -> Vec<Vec<f64>> {
    let n = sys.dim();
    let mut a = vec![sys.init().to_vec()];
    for k in 0..degree {
        let mut next: Vec<f64> = (0..n)
            .map(|i| {
                let c = if k == 0 { sys.constant()[i] } else { 0.0 };
                c + sys.linear()[i]
                    .iter()
                    .zip(&a[k])
                    .map(|(l, x)| l * x)
                    .sum::<f64>()
            })
            .collect();
        for q in sys.quadratic() {
            let conv: f64 = (0..=k).map(|r| a[r][q.j] * a[k - r][q.k]).sum();
            next[q.target] += q.coef * conv;
        }
        a.push(next.into_iter().map(|v| v / (k + 1) as f64).collect());
    }
    a
}

#[test]
fn laplace_and_time_domain_paths_agree_on_random_systems() {
    let mut rng = Lcg::new(42);
    for _ in 0..25 {
        let sys = random_system(&mut rng, 4);
        let a = solve_via(&sys, 8, RecurrencePath::Laplace).unwrap();
        let b = solve_via(&sys, 8, RecurrencePath::TimeDomain).unwrap();
        for m in 0..=8 {
            for i in 0..sys.dim() {
                let (p, q) = (a.component(i, m), b.component(i, m));
                let scale = 1.0_f64.max(p.max_abs_coeff());
                assert!((p - q).max_abs_coeff() <= 1e-12 * scale, "m={m} i={i}");
            }
        }
    }
}

#[test]
fn synthetic_systems_telescope() {
    let mut rng = Lcg::new(7);
    for _ in 0..50 {
        let sys = random_system(&mut rng, 4);
        let series = solve(&sys, 1 + rng.below(8)).unwrap();
        assert!(telescoping_check(&series) <= 1e-12);
    }
}

#[test]
fn partial_sum_at_minus_one_is_the_taylor_polynomial() {
    let mut systems = vec![hiv_cd8_default()];
    let mut rng = Lcg::new(99);
    systems.extend((0..10).map(|_| random_system(&mut rng, 4)));
    for sys in &systems {
        for n in [1, 3, 6, 10] {
            let series = solve(sys, n).unwrap();
            let taylor = taylor_coefficients(sys, n);
            for i in 0..sys.dim() {
                let collapsed = series.partial_sum(i).collapse_hbar(-1.0);
                assert!(collapsed.keys().all(|&k| k as usize <= n));
                for (k, a) in taylor.iter().enumerate() {
                    let (got, mag) = collapsed.get(&(k as u32)).copied().unwrap_or((0.0, 0.0));
                    let tol = 1e-12 * mag.max(a[i].abs()).max(1e-300);
                    assert!(
                        (got - a[i]).abs() <= tol.max(1e-14),
                        "n={n} i={i} k={k}: {got} vs {}",
                        a[i]
                    );
                }
            }
        }
    }
}

#[test]
fn hiv_first_taylor_coefficients_in_closed_form() {
    let series = solve(&hiv_cd8_default(), 2).unwrap();
    let t = series.partial_sum(0).collapse_hbar(-1.0);
    assert_eq!(t[&0].0, 1000.0);
    assert!((t[&1].0 + 0.024).abs() < 1e-15);
}

#[test]
fn solve_is_bit_identical_across_runs() {
    let sys = hiv_cd8_default();
    let a = solve(&sys, 12).unwrap();
    let b = solve(&sys, 12).unwrap();
    for m in 0..=12 {
        for i in 0..sys.dim() {
            let pa: Vec<_> = a
                .component(i, m)
                .terms()
                .map(|(k, c)| (k, c.to_bits()))
                .collect();
            let pb: Vec<_> = b
                .component(i, m)
                .terms()
                .map(|(k, c)| (k, c.to_bits()))
                .collect();
            assert_eq!(pa, pb);
        }
    }
}

#[test]
fn order_bounds() {
    let sys = hiv_cd8_default();
    assert_eq!(
        solve(&sys, 0).unwrap().partial_sum(2),
        BiPoly::constant(1.0)
    );
    assert!(solve(&sys, 30).is_ok());
    assert!(matches!(solve(&sys, 31), Err(Error::OrderOutOfRange(31))));
}

/// The five right-hand sides written out directly.
fn hiv_rhs_by_hand(p: &HivCd8Params, x: &[f64]) -> [f64; 5] {
    let (t, i, v, z, za) = (x[0], x[1], x[2], x[3], x[4]);
    [
        p.lambda_t - p.mu_t * t - p.chi * t * v,
        p.chi * t * v - p.mu_i * i - p.alpha * i * za,
        p.eps_v * p.mu_i * i - p.mu_v * v,
        p.lambda_z - p.mu_z * z - p.beta * z * i,
        p.beta * z * i - p.mu_za * za,
    ]
}

#[test]
fn generic_rhs_matches_hand_coded_model() {
    let p = HivCd8Params::default();
    let sys = hiv_cd8_default();
    let mut rng = Lcg::new(2024);
    let scales = [2000.0, 100.0, 1000.0, 1000.0, 100.0];
    for _ in 0..100 {
        let x: Vec<f64> = scales
            .iter()
            .map(|s| s * (rng.unit() + 1.0) / 2.0)
            .collect();
        let generic = sys.rhs_eval(&x).unwrap();
        let hand = hiv_rhs_by_hand(&p, &x);
        for (g, h) in generic.iter().zip(hand) {
            // Relative to the largest term, since cancellation can make the
            // sum itself arbitrarily small.
            let terms = 1.0 + x.iter().map(|v| v.abs()).sum::<f64>().powi(2);
            assert!((g - h).abs() <= 1e-14 * terms.max(h.abs()), "{g} vs {h}");
        }
    }
}

#[test]
fn nonlinear_operator_is_negated_rhs() {
    // With the derivative term dropped, the first-order correction is
    // x_1 = ħ t N(x0), so its ħt coefficient reads off N_i(x0) = -rhs_i(x0).
    let mut rng = Lcg::new(11);
    let base = hiv_cd8_default();
    for _ in 0..100 {
        let init: Vec<f64> = base.init().iter().map(|v| v * (1.5 + rng.unit())).collect();
        let sys = base.with_init(init).unwrap();
        let series = solve(&sys, 1).unwrap();
        let rhs = sys.rhs_eval(sys.init()).unwrap();
        for (i, r) in rhs.iter().enumerate() {
            let n_i = series.component(i, 1).coeff(1, 1);
            assert!(
                (n_i + r).abs() <= 1e-12 * (1.0 + r.abs()),
                "state {i}: {n_i} vs {r}"
            );
        }
    }
}

#[test]
fn quadratic_terms_are_canonicalized() {
    let build = |j, k| {
        QuadraticOdeSystem::new(
            vec!["a".into(), "b".into()],
            vec![1.0, 2.0],
            vec![0.0, 0.0],
            vec![vec![0.0; 2]; 2],
            vec![QuadraticTerm {
                target: 0,
                j,
                k,
                coef: 1.5,
            }],
        )
        .unwrap()
    };
    assert_eq!(build(1, 0).quadratic(), build(0, 1).quadratic());
}
